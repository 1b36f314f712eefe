//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! fails if any criterion fails:
//!
//!     cargo test -p mskit --test acceptance -- --nocapture

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use common::*;
use mskit::brauer::{build_algebra, build_quiver, build_relations, special_cycles, BrauerConfiguration};
use mskit::format;
use mskit::presentation::{self, enumerate_dimension, SpecialPresentation};
use mskit::quiver::{ArrowId, Path, Quiver};
use mskit::radcube::{extract_presentation, normalize_arr, radcube_to_configuration};
use mskit::random::{self, ConfigParams};
use mskit::recovery::{config_isomorphic, induced_permutation, recover_configuration};
use mskit::representation::{decompose_multiserial, exhaustive_decomposition, projective_rep, verify_multiserial, FALLBACK_DIM};
use mskit::scalar::Field;

const Q: Field = Field::Rationals;
const F5: Field = Field::Prime(5);
const F7: Field = Field::Prime(7);

struct Outcome {
    failures: Vec<String>,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Outcome { failures: Vec::new(), detail: String::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn within(&mut self, start: Instant, limit: Duration) {
        let took = start.elapsed();
        self.detail.push_str(&format!(" [{:.2?}, limit {:?}]", took, limit));
        self.check(took < limit, || format!("took {took:.2?}, limit {limit:?}"));
    }
}

fn report(n: usize, title: &str, o: &Outcome) -> bool {
    let ok = o.failures.is_empty();
    println!("criterion {n}: {} {title}:{}", if ok { "PASS" } else { "FAIL" }, o.detail);
    for f in o.failures.iter().take(10) {
        println!("    {f}");
    }
    if o.failures.len() > 10 {
        println!("    ... {} more", o.failures.len() - 10);
    }
    ok
}

fn cycle_class(words: &[String]) -> String {
    // smallest rotation of a cycle written as arrow names
    (0..words.len())
        .map(|k| words[k..].iter().chain(&words[..k]).cloned().collect::<Vec<_>>().join(""))
        .min()
        .unwrap_or_default()
}

// ---------------------------------------------------------------- 1

fn fixture_reproduction() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let cfg = cfg_ex();
    let bq = build_quiver(&cfg).unwrap();
    let q = &bq.quiver;
    o.check(q.vertex_count() == 3, || format!("{} quiver vertices", q.vertex_count()));
    o.check(q.arrow_count() == 10, || format!("{} arrows", q.arrow_count()));

    let p = build_algebra(&cfg, Q).unwrap();
    let s = induced_permutation(&p).unwrap();
    let mut orbits: Vec<(usize, usize)> = s.orbits.iter().zip(&s.m).map(|(o, &m)| (o.len(), m)).collect();
    orbits.sort();
    o.check(orbits == vec![(1, 2), (2, 3), (3, 1), (4, 1)], || format!("orbit (size, m) = {orbits:?}"));

    // the cycle multiset, with each cycle written in the letter names and tagged by its base
    let got: BTreeSet<(String, String)> = special_cycles(&cfg, &bq)
        .iter()
        .map(|c| (q.vertex_name(c.base).to_string(), c.arrows.iter().map(|&a| ex_name(q, a)).collect()))
        .collect();
    let expected: BTreeSet<(String, String)> = [
        ("V1", "a1a2"),
        ("V1", "a2a1"),
        ("V1", "b1b2b3b4"),
        ("V3", "b2b3b4b1"),
        ("V2", "b3b4b1b2"),
        ("V2", "b4b1b2b3"),
        ("V1", "c1c2c3"),
        ("V1", "c2c3c1"),
        ("V2", "c3c1c2"),
        ("V3", "d"),
    ]
    .iter()
    .map(|(v, w)| (v.to_string(), w.to_string()))
    .collect();
    o.check(got == expected, || format!("special cycles {got:?}"));

    // canonical relabelling: σ-orbits of the built algebra against the cycle classes
    let classes: BTreeMap<String, usize> = s
        .orbits
        .iter()
        .map(|orb| (cycle_class(&orb.iter().map(|&a| ex_name(q, a)).collect::<Vec<_>>()), orb.len()))
        .collect();
    let want: BTreeMap<String, usize> =
        [("a1a2", 2), ("b1b2b3b4", 4), ("c1c2c3", 3), ("d", 1)].iter().map(|(k, v)| (k.to_string(), *v)).collect();
    o.check(classes == want, || format!("orbit classes {classes:?}"));
    o.detail = format!(" 3 vertices, 10 arrows, orbits {orbits:?}, 10 special cycles");
    o.within(start, Duration::from_secs(1));
    o
}

// ---------------------------------------------------------------- 2

fn relation_reproduction() -> Outcome {
    let mut o = Outcome::new();
    let cfg = cfg_ex();
    let (bq, rel) = build_relations(&cfg).unwrap();
    let q = &bq.quiver;
    let has_one = |x: &str, y: &str| {
        let (x, y) = (ex_path(q, x), ex_path(q, y));
        rel.type_one.iter().any(|(l, r)| (l == &x && r == &y) || (l == &y && r == &x))
    };
    o.check(has_one("a1*a2*a1*a2*a1*a2", "a2*a1*a2*a1*a2*a1"), || "missing (a1a2)^3 - (a2a1)^3".into());
    o.check(has_one("a1*a2*a1*a2*a1*a2", "b1*b2*b3*b4"), || "missing (a1a2)^3 - b1b2b3b4".into());
    for z in ["a1*a2*a1*a2*a1*a2*a1", "d*d*d"] {
        o.check(rel.type_two.contains(&ex_path(q, z)), || format!("missing type-two {z}"));
    }
    // every composable pair of arrows that is not consecutive in a special cycle
    let consecutive: BTreeSet<(ArrowId, ArrowId)> = bq
        .arrows_of
        .iter()
        .flat_map(|c| (0..c.len()).map(move |i| (c[i], c[(i + 1) % c.len()])))
        .collect();
    let three: BTreeSet<(ArrowId, ArrowId)> = rel.type_three.iter().copied().collect();
    let mut expected = BTreeSet::new();
    for a in q.arrow_ids() {
        for b in q.arrows_from(q.target(a)) {
            if !consecutive.contains(&(a, b)) {
                expected.insert((a, b));
            }
        }
    }
    o.check(three == expected, || "type-three set differs from the composable non-cycle pairs".into());
    for b in ["b1"] {
        for a in ["a1", "a2"] {
            let pair = (ex_arrow(q, a), ex_arrow(q, b));
            o.check(three.contains(&pair), || format!("missing type-three {a}{b}"));
        }
    }
    // products of arrows whose endpoints do not meet: never relations
    let mut skipped = Vec::new();
    let mut listed = Vec::new();
    for a in ["a1", "a2"] {
        for j in 2..=4 {
            listed.push((a.to_string(), format!("b{j}")));
        }
        listed.push((a.to_string(), "c3".into()));
        listed.push((a.to_string(), "d".into()));
    }
    for j in [1, 2, 3] {
        for a in ["a1", "a2"] {
            listed.push((format!("b{j}"), a.to_string()));
        }
    }
    for j in [1, 3, 4] {
        listed.push(("d".into(), format!("b{j}")));
    }
    for (x, y) in &listed {
        let (a, b) = (ex_arrow(q, x), ex_arrow(q, y));
        let composable = q.target(a) == q.source(b);
        o.check(!composable, || format!("{x}{y} is composable"));
        o.check(!three.contains(&(a, b)), || format!("non-path {x}{y} listed as a relation"));
        skipped.push(format!("{x}{y}"));
    }
    println!("criterion 2 log: non-composable products omitted: {}", skipped.join(" "));
    o.detail = format!(
        " {} type-one, {} type-two, {} type-three; {} non-composable products absent",
        rel.type_one.len(),
        rel.type_two.len(),
        rel.type_three.len(),
        skipped.len()
    );
    o
}

// ---------------------------------------------------------------- 3

const ROUND_TRIP: ConfigParams = ConfigParams { polygons: 6, max_val: 5, max_mu: 3 };

fn within_bounds(cfg: &BrauerConfiguration, params: ConfigParams) -> bool {
    cfg.polygons.len() <= params.polygons
        && (0..cfg.vertex_count()).all(|v| cfg.val(v) <= params.max_val && cfg.mu[v] <= params.max_mu)
}

fn round_trip() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let cfg = cfg_ex();
    for field in [Q, F5] {
        let back = recover_configuration(&build_algebra(&cfg, field).unwrap()).unwrap();
        o.check(config_isomorphic(&cfg, &back), || format!("running example over {field}"));
    }
    let mut count = 0;
    for seed in 0..200u64 {
        let cfg = random::random_configuration(&mut random::rng(seed), ROUND_TRIP).unwrap();
        o.check(within_bounds(&cfg, ROUND_TRIP), || format!("seed {seed}: out of bounds"));
        for field in [Q, F5] {
            count += 1;
            match build_algebra(&cfg, field).and_then(|p| recover_configuration(&p)) {
                Ok(back) => o.check(config_isomorphic(&cfg, &back), || format!("seed {seed} over {field}: not isomorphic")),
                Err(e) => o.check(false, || format!("seed {seed} over {field}: {e}")),
            }
        }
    }
    o.detail = format!(" running example + {count} random cases (200 seeds x Q, F5)");
    o.within(start, Duration::from_secs(30));
    o
}

// ---------------------------------------------------------------- 4

/// (M) and (M') straight from the pair table.
fn oracle_m(q: &Quiver, pairs: &BTreeSet<(ArrowId, ArrowId)>) -> (bool, bool) {
    let succ = |a: ArrowId| pairs.iter().filter(|&&(x, _)| x == a).count();
    let pred = |a: ArrowId| pairs.iter().filter(|&&(_, y)| y == a).count();
    let m = q.arrow_ids().all(|a| succ(a) <= 1 && pred(a) <= 1);
    let m_prime = q.arrow_ids().all(|a| succ(a) == 1 && pred(a) == 1);
    (m, m_prime)
}

fn equivalence_suite() -> Outcome {
    let mut o = Outcome::new();
    let (mut from_cfg, mut sampled, mut sampled_true, mut mutated) = (0, 0, 0, 0);
    for seed in 0..250u64 {
        let cfg = random::random_configuration(&mut random::rng(10_000 + seed), ConfigParams::default()).unwrap();
        let p = build_algebra(&cfg, Q).unwrap();
        let r = p.check_conditions();
        o.check(r.arrow_free, || format!("config seed {seed}: socle not arrow-free"));
        o.check(r.consistent() && r.m, || format!("config seed {seed}: flags {r:?}"));
        from_cfg += 1;
    }
    let mut r = random::rng(20_000);
    while sampled < 300 {
        let (q, pairs) = random::random_arrow_free_pairs(&mut r, 4, 8);
        let rep = presentation::check_conditions(&q, &pairs, None);
        let (m, m_prime) = oracle_m(&q, &pairs);
        o.check(rep.arrow_free, || format!("sample {sampled}: not arrow-free"));
        o.check(rep.consistent(), || format!("sample {sampled}: flags disagree {rep:?}"));
        o.check(rep.m == m && rep.m_prime == m_prime, || format!("sample {sampled}: (M) oracle disagrees"));
        sampled_true += m as usize;
        sampled += 1;

        if mutated < 80 {
            if let Some(bad) = random::mutate_pairs(&mut r, &q, &pairs) {
                let rep = presentation::check_conditions(&q, &bad, None);
                let all_false = !rep.m && !rep.m_prime && !rep.phi_bijective && !rep.psi_bijective && rep.special_cycles.is_none();
                o.check(all_false && rep.arrow_free, || format!("mutation {mutated}: {rep:?}"));
                mutated += 1;
            }
        }
    }
    o.detail = format!(
        " {from_cfg} from configurations + {sampled} sampled tables ({sampled_true} with (M)); {mutated} mutated all-false"
    );
    o.check(from_cfg + sampled >= 500, || "fewer than 500 presentations".into());
    o.check(mutated >= 50, || "fewer than 50 mutations".into());
    o
}

// ---------------------------------------------------------------- 5

fn decomposition_suite() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let mut projectives = 0;
    for seed in 0..50u64 {
        let cfg = random::random_configuration(&mut random::rng(30_000 + seed), ConfigParams::default()).unwrap();
        let field = if seed % 2 == 0 { Q } else { F5 };
        let p = build_algebra(&cfg, field).unwrap();
        for v in p.quiver().vertex_ids() {
            let (proj, _) = projective_rep(&p, v);
            let ok = decompose_multiserial(&p, &proj).map(|d| verify_multiserial(&proj, &d.uniserials));
            o.check(matches!(ok, Ok(true)), || format!("config seed {seed}: P({}) {ok:?}", p.quiver().vertex_name(v)));
            projectives += 1;
        }
    }

    let t_proj = start.elapsed();
    let fields = [Q, F5, Field::Prime(3)];
    let mut modules = 0;
    let mut r = random::rng(40_000);
    while modules < 320 {
        let field = fields[modules % 3];
        let p = random::random_presentation(&mut r, field, 3, 6, 3);
        let Some(m) = random::random_representation(&mut r, &p, 12) else { continue };
        let ok = decompose_multiserial(&p, &m).map(|d| verify_multiserial(&m, &d.uniserials));
        o.check(matches!(ok, Ok(true)), || format!("module {modules}: {ok:?}"));
        modules += 1;
    }

    let t_mod = start.elapsed() - t_proj;
    // over a prime field the fallback enumerates every coefficient, so it is exhaustive
    let primes = [Field::Prime(2), Field::Prime(3), F5, F7];
    let mut small = 0;
    let mut r = random::rng(50_000);
    while small < 160 {
        let field = primes[small % primes.len()];
        let p = random::random_presentation(&mut r, field, 2, 4, 3);
        let Some(m) = random::random_representation(&mut r, &p, FALLBACK_DIM) else { continue };
        let main = decompose_multiserial(&p, &m).map(|d| verify_multiserial(&m, &d.uniserials)).unwrap_or(false);
        let fallback = exhaustive_decomposition(&p, &m).is_some_and(|d| verify_multiserial(&m, &d.uniserials));
        o.check(main && main == fallback, || format!("small module {small} over {field}: main {main}, exhaustive {fallback}"));
        small += 1;
    }
    // over Q the fallback only searches a grid of small fractions: reported, not required
    let (mut q_total, mut q_found) = (0, 0);
    while q_total < 40 {
        let p = random::random_presentation(&mut r, Q, 2, 4, 3);
        let Some(m) = random::random_representation(&mut r, &p, FALLBACK_DIM) else { continue };
        q_found += exhaustive_decomposition(&p, &m).is_some_and(|d| verify_multiserial(&m, &d.uniserials)) as usize;
        q_total += 1;
    }
    let t_small = start.elapsed() - t_proj - t_mod;
    o.detail = format!(
        " {projectives} projectives of 50 algebras ({t_proj:.1?}), {modules} modules of dim <= 12 ({t_mod:.1?}), \
         {small} exhaustive cross-checks of dim <= 8 over F2/F3/F5/F7 ({t_small:.1?}); \
         Q grid fallback certified {q_found}/{q_total}"
    );
    o.within(start, Duration::from_secs(300));
    o
}

// ---------------------------------------------------------------- 6

fn orbit_shape(p: &SpecialPresentation) -> Vec<(usize, usize)> {
    let s = induced_permutation(p).unwrap();
    let mut v: Vec<(usize, usize)> = s.orbits.iter().zip(&s.m).map(|(o, &m)| (o.len(), m)).collect();
    v.sort();
    v
}

fn gram_fixture(name: &str) -> mskit::radcube::GramSpec {
    format::parse_gram(&read_fixture(name)).unwrap()
}

fn radcube_pipeline() -> Outcome {
    let mut o = Outcome::new();
    let mut obstructed = 0;
    for seed in 0..220u64 {
        let field = if seed % 2 == 0 { F5 } else { F7 };
        let g = random::random_gram(&mut random::rng(60_000 + seed), field, 4, 6);
        let q = &g.quiver;
        o.check(q.vertex_count() <= 4 && q.arrow_count() <= 6, || format!("gram {seed}: too large"));
        let arr = match normalize_arr(&g) {
            Ok(a) => a,
            Err(e) => {
                o.check(false, || format!("gram {seed}: {e}"));
                continue;
            }
        };
        o.check(arr.is_block_normal(), || format!("gram {seed}: not block normal"));
        obstructed += (!arr.obstructions.is_empty()) as usize;
        let p = extract_presentation(&g, &arr).unwrap();
        let rep = p.check_conditions();
        o.check(rep.m_prime, || format!("gram {seed}: extracted presentation violates (M')"));
        o.check(q.arrow_ids().all(|a| p.cutoff(a) == 1), || format!("gram {seed}: cutoffs not all 1"));
        let expected = 2 * q.vertex_count() + q.arrow_count();
        let enumerated = enumerate_dimension(&p);
        o.check(enumerated == expected, || format!("gram {seed}: dimension {enumerated}, expected {expected}"));
        match radcube_to_configuration(&g) {
            Ok(r) => {
                let built = build_algebra(&r.configuration, field).unwrap();
                let same = built.quiver().vertex_count() == q.vertex_count()
                    && built.quiver().arrow_count() == q.arrow_count()
                    && built.dim() == p.dim()
                    && orbit_shape(&built) == orbit_shape(&p);
                o.check(same, || format!("gram {seed}: rebuilt algebra differs"));
                let back = recover_configuration(&built).unwrap();
                o.check(config_isomorphic(&back, &r.configuration), || format!("gram {seed}: round trip"));
            }
            Err(e) => o.check(false, || format!("gram {seed}: {e}")),
        }
    }

    // exterior type: one polygon {α, α}
    let r = radcube_to_configuration(&gram_fixture("exterior.gram")).unwrap();
    let c = &r.configuration;
    o.check(
        c.polygons.len() == 1 && c.vertex_count() == 1 && c.polygons[0].members == vec![0, 0] && c.mu[0] == 1,
        || format!("exterior: {}", format::print_config(c)),
    );
    // a single loop with a square value: a 2-gon with μ = 2, i.e. K[x]/(x^3)
    let g = format::parse_gram("field F5\nvertex v\narrow x: v -> v\ngamma x x = 4\n").unwrap();
    let r = radcube_to_configuration(&g).unwrap();
    let c = &r.configuration;
    let alpha = c.nontruncated().next();
    o.check(
        c.polygons.len() == 1 && c.polygons[0].members.len() == 2 && alpha.is_some_and(|a| c.mu[a] == 2) && r.presentation.dim() == 3,
        || format!("single loop: {}", format::print_config(c)),
    );
    // a hyperbolic pair between two vertices: two 2-gons sharing a vertex
    let r = radcube_to_configuration(&gram_fixture("hyperbolic.gram")).unwrap();
    let c = &r.configuration;
    o.check(
        c.polygons.len() == 2 && c.polygons.iter().all(|p| p.members.len() == 2) && r.presentation.dim() == 6,
        || format!("hyperbolic: {}", format::print_config(c)),
    );
    o.detail = format!(" 220 random Grams over F5/F7 ({obstructed} with a square-root obstruction) + 3 fixtures");
    o
}

// ---------------------------------------------------------------- 7

fn small_dimensions() -> Outcome {
    let mut o = Outcome::new();
    let k = truncated_polynomial();
    o.check(k.dim() == 3 && enumerate_dimension(&k) == 3, || format!("K[a]/(a^3): {}", k.dim()));
    let x = exterior();
    let oracle: usize = x.quiver().vertex_ids().map(|v| projective_dimension(&x, v)).sum();
    o.check(x.dim() == 4 && oracle == 4, || format!("exterior: {} / oracle {oracle}", x.dim()));
    let cfg = cfg_ex();
    let (bq, rel) = build_relations(&cfg).unwrap();
    let words = relation_dimension_of(&bq.quiver, &rel, 8);
    let p = build_algebra(&cfg, Q).unwrap();
    let dims = [p.dim(), enumerate_dimension(&p), words, closed_form_dimension(&cfg)];
    o.check(dims.iter().all(|&d| d == 35), || format!("running example dimensions {dims:?}"));
    o.detail = format!(" K[a]/(a^3) = 3, exterior = 4, running example = {} (basis, enumeration, words, closed form)", dims[0]);
    o
}

// ---------------------------------------------------------------- 8

fn socle_contains(p: &SpecialPresentation, x: &[mskit::scalar::Scalar]) -> bool {
    let q = p.quiver();
    q.arrow_ids().all(|a| {
        let e = p.element_of_path(&Path::arrow(q, a));
        mskit::linalg::is_zero_vector(&p.mul(&x.to_vec(), &e)) && mskit::linalg::is_zero_vector(&p.mul(&e, &x.to_vec()))
    })
}

/// Largest `k` with `c^k` nonzero.
fn top_power(p: &SpecialPresentation, c: &Path) -> usize {
    let mut k = 0;
    while c.power(k + 1).is_some_and(|path| p.normal_form(&path).is_some()) {
        k += 1;
    }
    k
}

fn orbit_multiplicities(p: &SpecialPresentation, o: &mut Outcome, label: &str) -> usize {
    let s = match induced_permutation(p) {
        Ok(s) => s,
        Err(e) => {
            o.check(false, || format!("{label}: {e}"));
            return 0;
        }
    };
    let mut checked = 0;
    for (i, orbit) in s.orbits.iter().enumerate() {
        let ms: Vec<usize> = orbit.iter().map(|&a| top_power(p, &s.cycle(p, a))).collect();
        o.check(ms.iter().all(|&m| m == s.m[i]), || format!("{label}: m not constant on an orbit: {ms:?}"));
        for &a in orbit {
            let c = s.cycle(p, a).power(s.m_of(a)).unwrap();
            let nf = p.normal_form(&c);
            o.check(nf.is_some(), || format!("{label}: c^m vanishes"));
            o.check(socle_contains(p, &p.element_of_path(&c)), || {
                format!("{label}: c^m of {} is not in the socle", p.quiver().arrow_name(a))
            });
            checked += 1;
        }
    }
    checked
}

fn orbit_power_checks() -> Outcome {
    let mut o = Outcome::new();
    let mut algebras = 0;
    let mut arrows = 0;
    let cfg = cfg_ex();
    for field in [Q, F5] {
        arrows += orbit_multiplicities(&build_algebra(&cfg, field).unwrap(), &mut o, "running example");
        algebras += 1;
    }
    for seed in 0..200u64 {
        let cfg = random::random_configuration(&mut random::rng(seed), ROUND_TRIP).unwrap();
        let field = if seed % 2 == 0 { Q } else { F5 };
        arrows += orbit_multiplicities(&build_algebra(&cfg, field).unwrap(), &mut o, &format!("seed {seed}"));
        algebras += 1;
    }
    for name in ["ka3.qpres", "two_loops.qpres", "trim.qpres"] {
        arrows += orbit_multiplicities(&presentation(&read_fixture(name)), &mut o, name);
        algebras += 1;
    }
    arrows += orbit_multiplicities(&exterior(), &mut o, "exterior");
    algebras += 1;
    o.detail = format!(" {algebras} symmetric presentations, {arrows} arrows, {} violations", o.failures.len());
    o
}

#[test]
fn acceptance() {
    let results = [
        report(1, "running example quiver, orbits and special cycles", &fixture_reproduction()),
        report(2, "running example relations", &relation_reproduction()),
        report(3, "configuration round trip", &round_trip()),
        report(4, "condition-flag equivalence", &equivalence_suite()),
        report(5, "multiserial decomposition", &decomposition_suite()),
        report(6, "radical-cube-zero pipeline", &radcube_pipeline()),
        report(7, "small dimensions", &small_dimensions()),
        report(8, "orbit multiplicities and socle powers", &orbit_power_checks()),
    ];
    let failed: Vec<usize> = (1..=8).filter(|&i| !results[i - 1]).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
