//! Seeded generators. Everything is driven by a caller-supplied RNG so that a
//! seed determines the output exactly.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::brauer::{BrauerConfiguration, Polygon};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Subspace, Vector};
use crate::presentation::SpecialPresentation;
use crate::quiver::{ArrowId, Quiver, VertexId};
use crate::radcube::GramSpec;
use crate::representation::{projective_rep, Representation};
use crate::scalar::{Field, Scalar};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConfigParams {
    pub polygons: usize,
    pub max_val: usize,
    pub max_mu: u32,
}

impl Default for ConfigParams {
    fn default() -> Self {
        ConfigParams {
            polygons: 4,
            max_val: 4,
            max_mu: 3,
        }
    }
}

/// A connected configuration with between one and `params.polygons` polygons.
///
/// Polygon multisets are sampled first and then repaired: a polygon without a
/// vertex of `val * mu > 1` gets a multiplicity bump (or a repeated member),
/// and a would-be truncated vertex in a polygon larger than a 2-gon likewise.
pub fn random_configuration(rng: &mut impl Rng, params: ConfigParams) -> Result<BrauerConfiguration> {
    let ConfigParams { polygons: k, max_val, max_mu } = params;
    if k == 0 || max_val == 0 || max_mu == 0 || max_val * (max_mu as usize) < 2 {
        return Err(Error::invalid("need at least one polygon and max_val * max_mu >= 2"));
    }
    let k = rng.gen_range(1..=k);
    let mut val: Vec<usize> = Vec::new();
    let mut polys: Vec<Vec<usize>> = Vec::new();
    for i in 0..k {
        let size = rng.gen_range(2..=4);
        let mut members = Vec::with_capacity(size);
        if i > 0 {
            // attach to what exists so far
            let open: Vec<usize> = (0..val.len()).filter(|&v| val[v] < max_val).collect();
            match open.choose(rng) {
                Some(&v) => {
                    members.push(v);
                    val[v] += 1;
                }
                None => break,
            }
        }
        while members.len() < size {
            let open: Vec<usize> = (0..val.len()).filter(|&v| val[v] < max_val).collect();
            let v = if !open.is_empty() && rng.gen_bool(0.5) {
                *open.choose(rng).unwrap()
            } else {
                val.push(0);
                val.len() - 1
            };
            members.push(v);
            val[v] += 1;
        }
        polys.push(members);
    }
    let n = val.len();
    let mut mu: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=max_mu)).collect();
    let weight = |v: usize, val: &[usize], mu: &[u32]| val[v] * mu[v] as usize;
    // C3 repair
    for p in 0..polys.len() {
        if polys[p].iter().any(|&v| weight(v, &val, &mu) > 1) {
            continue;
        }
        let v = polys[p][0];
        if max_mu >= 2 {
            mu[v] = 2;
        } else {
            polys[p].push(v);
            val[v] += 1;
        }
    }
    // C4 repair
    for p in 0..polys.len() {
        if polys[p].len() == 2 {
            continue;
        }
        for i in 0..polys[p].len() {
            let v = polys[p][i];
            if val[v] == 1 && mu[v] == 1 {
                if max_mu >= 2 {
                    mu[v] = 2;
                } else {
                    polys[p].push(v);
                    val[v] += 1;
                }
            }
        }
    }
    for p in &mut polys {
        p.sort_unstable();
    }
    let mut cfg = BrauerConfiguration {
        vertices: (1..=n).map(|i| i.to_string()).collect(),
        polygons: polys
            .into_iter()
            .enumerate()
            .map(|(i, members)| Polygon { name: format!("V{}", i + 1), members })
            .collect(),
        mu,
        orientation: vec![Vec::new(); n],
    };
    for v in 0..n {
        if !cfg.is_truncated(v) {
            let mut occs = cfg.occurrences(v);
            occs.shuffle(rng);
            cfg.orientation[v] = occs;
        }
    }
    cfg.check()?;
    Ok(cfg)
}

/// A quiver whose arrows are covered by random closed walks, with `Π` the
/// consecutive pairs of those walks: an (M′) pair table by construction.
pub fn random_cycle_quiver(rng: &mut impl Rng, max_vertices: usize, max_arrows: usize) -> (Quiver, BTreeSet<(ArrowId, ArrowId)>) {
    let nv = rng.gen_range(1..=max_vertices.max(1));
    let mut q = Quiver::new();
    for v in 0..nv {
        q.add_vertex(format!("v{v}")).unwrap();
    }
    let mut pairs = BTreeSet::new();
    let mut walks: Vec<Vec<ArrowId>> = Vec::new();
    // a closed walk through every vertex keeps the quiver connected
    let mut order: Vec<usize> = (0..nv).collect();
    order.shuffle(rng);
    let mut budget = max_arrows.max(nv);
    let mut first = true;
    while budget > 0 {
        let len = if first { nv } else { rng.gen_range(1..=budget.min(3)) };
        let stops: Vec<usize> = if first {
            order.clone()
        } else {
            (0..len).map(|_| rng.gen_range(0..nv)).collect()
        };
        first = false;
        let mut walk = Vec::new();
        for i in 0..stops.len() {
            let (u, w) = (stops[i], stops[(i + 1) % stops.len()]);
            let name = format!("a{}", q.arrow_count());
            walk.push(q.add_arrow(name, VertexId(u), VertexId(w)).unwrap());
        }
        budget -= walk.len().min(budget);
        walks.push(walk);
        if rng.gen_bool(0.4) {
            break;
        }
    }
    for w in &walks {
        for i in 0..w.len() {
            pairs.insert((w[i], w[(i + 1) % w.len()]));
        }
    }
    (q, pairs)
}

/// Adds one composable pair that is not already in `Π`, breaking (M) while
/// keeping every arrow's existing neighbours. `None` when no such pair exists.
pub fn mutate_pairs(
    rng: &mut impl Rng,
    q: &Quiver,
    pairs: &BTreeSet<(ArrowId, ArrowId)>,
) -> Option<BTreeSet<(ArrowId, ArrowId)>> {
    let candidates: Vec<(ArrowId, ArrowId)> = q
        .arrow_ids()
        .flat_map(|a| q.arrows_from(q.target(a)).map(move |b| (a, b)))
        .filter(|p| !pairs.contains(p))
        .collect();
    let extra = *candidates.choose(rng)?;
    let mut out = pairs.clone();
    out.insert(extra);
    Some(out)
}

/// Random composable pair table in which every arrow has at least one
/// successor and one predecessor. About half the tables satisfy (M′).
pub fn random_arrow_free_pairs(rng: &mut impl Rng, max_vertices: usize, max_arrows: usize) -> (Quiver, BTreeSet<(ArrowId, ArrowId)>) {
    let (q, pairs) = random_cycle_quiver(rng, max_vertices, max_arrows);
    if rng.gen_bool(0.5) {
        return (q, pairs);
    }
    // resample: keep one successor per arrow from the walks, then add noise
    let mut out = BTreeSet::new();
    for &(a, b) in &pairs {
        let alt: Vec<ArrowId> = q.arrows_from(q.target(a)).collect();
        let b = if rng.gen_bool(0.3) { *alt.choose(rng).unwrap() } else { b };
        out.insert((a, b));
    }
    for a in q.arrow_ids() {
        if !out.iter().any(|&(_, y)| y == a) {
            let pred: Vec<ArrowId> = q.arrows_into(q.source(a)).collect();
            out.insert((*pred.choose(rng).unwrap(), a));
        }
    }
    (q, out)
}

/// A special presentation built from a random closed-walk quiver: each pair
/// of `Π` is kept with probability 0.85 and cutoffs are clamped to be valid.
pub fn random_presentation(rng: &mut impl Rng, field: Field, max_vertices: usize, max_arrows: usize, max_cutoff: usize) -> SpecialPresentation {
    let (q, pairs) = random_cycle_quiver(rng, max_vertices, max_arrows);
    let pi: BTreeSet<(ArrowId, ArrowId)> = pairs.into_iter().filter(|_| rng.gen_bool(0.85)).collect();
    let n = q.arrow_count();
    let mut next = vec![None; n];
    for &(a, b) in &pi {
        next[a.0] = Some(b);
    }
    let mut t: Vec<usize> = (0..n)
        .map(|a| if next[a].is_some() { rng.gen_range(1..=max_cutoff.max(1)) } else { 0 })
        .collect();
    loop {
        let mut changed = false;
        for a in 0..n {
            if let Some(b) = next[a] {
                if t[a] > t[b.0] + 1 {
                    t[a] = t[b.0] + 1;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    SpecialPresentation::new(field, q, pi, t, Vec::new()).expect("clamped cutoffs are valid")
}

pub fn random_scalar(rng: &mut impl Rng, field: Field) -> Scalar {
    match field {
        Field::Rationals => field.from_i64(rng.gen_range(-3..=3)),
        Field::Prime(p) => field.from_i64(rng.gen_range(0..p as i64)),
    }
}

pub fn random_nonzero(rng: &mut impl Rng, field: Field) -> Scalar {
    loop {
        let s = random_scalar(rng, field);
        if !s.is_zero() {
            return s;
        }
    }
}

pub fn random_vector(rng: &mut impl Rng, field: Field, n: usize) -> Vector {
    (0..n).map(|_| random_scalar(rng, field)).collect()
}

/// Uniform over a prime field. Over `Q` a product `P L U` of a permutation and
/// unit-triangular matrices with entries in `{-1, 0, 1}`, so the matrix and its
/// inverse stay integral and small.
pub fn random_invertible(rng: &mut impl Rng, field: Field, n: usize) -> Matrix {
    if field == Field::Rationals {
        let mut lower = Matrix::identity(field, n);
        let mut upper = Matrix::identity(field, n);
        for i in 0..n {
            for j in 0..i {
                lower.set(i, j, field.from_i64(rng.gen_range(-1..=1)));
                upper.set(j, i, field.from_i64(rng.gen_range(-1..=1)));
            }
        }
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        let mut p = Matrix::zeros(field, n, n);
        for (i, &j) in perm.iter().enumerate() {
            p.set(i, j, field.one());
        }
        return p.mul(&lower).mul(&upper);
    }
    loop {
        let rows = (0..n).map(|_| random_vector(rng, field, n)).collect();
        let m = Matrix::from_rows(field, n, n, rows).unwrap();
        if m.rank() == n {
            return m;
        }
    }
}

/// `M` in a random basis at every vertex.
pub fn random_base_change(rng: &mut impl Rng, m: &Representation, q: &Quiver) -> Representation {
    let field = m.field();
    let change: Vec<Matrix> = m.dims().iter().map(|&d| random_invertible(rng, field, d)).collect();
    let maps = q
        .arrow_ids()
        .map(|a| {
            let (u, w) = (q.source(a).0, q.target(a).0);
            change[u].inverse().unwrap().mul(&m.maps()[a.0]).mul(&change[w])
        })
        .collect();
    Representation::new(field, q, m.dims().to_vec(), maps).expect("conjugation preserves shapes")
}

/// A random module of total dimension at most `max_dim` (if any projective
/// quotient fits): sums of quotients of indecomposable projectives, in a random basis.
pub fn random_representation(rng: &mut impl Rng, p: &SpecialPresentation, max_dim: usize) -> Option<Representation> {
    let q = p.quiver();
    let mut acc: Option<Representation> = None;
    let summands = rng.gen_range(1..=3);
    for _ in 0..summands {
        let v = VertexId(rng.gen_range(0..q.vertex_count()));
        let (proj, _) = projective_rep(p, v);
        let room = max_dim - acc.as_ref().map_or(0, Representation::total_dim);
        let Some(piece) = random_quotient(rng, q, &proj, room) else {
            continue;
        };
        acc = Some(match acc {
            None => piece,
            Some(m) => m.direct_sum(q, &piece).unwrap(),
        });
    }
    let m = acc?;
    Some(random_base_change(rng, &m, q))
}

/// Quotient of `m` by a random submodule, pushed down until it has dimension `<= room`.
fn random_quotient(rng: &mut impl Rng, q: &Quiver, m: &Representation, room: usize) -> Option<Representation> {
    if room == 0 {
        return None;
    }
    let field = m.field();
    let n = m.total_dim();
    let rad = m.radical();
    let mut sub = Subspace::zero(field, n);
    if rng.gen_bool(0.5) && rad.dim() > 0 {
        let x = rad.basis().choose(rng).unwrap().clone();
        let y = linalg::scale(&x, &random_nonzero(rng, field));
        sub = m.submodule_generated(&[y]);
    }
    // cut down from the socle of what remains until it fits
    let mut cur = m.quotient(q, &sub).ok()?;
    while cur.total_dim() > room {
        let soc = cur.socle();
        let x = soc.basis().choose(rng)?.clone();
        let s = cur.submodule_generated(&[x]);
        cur = cur.quotient(q, &s).ok()?;
    }
    (cur.total_dim() > 0).then_some(cur)
}

/// A valid Gram specification: a spanning tree of two-way arrow pairs plus
/// random extra loops and pairs, with random nondegenerate blocks.
pub fn random_gram(rng: &mut impl Rng, field: Field, max_vertices: usize, max_arrows: usize) -> GramSpec {
    let nv = rng.gen_range(1..=max_vertices.clamp(1, 1 + max_arrows / 2));
    let mut q = Quiver::new();
    for v in 0..nv {
        q.add_vertex(format!("v{v}")).unwrap();
    }
    // blocks[(u, w)] with u <= w: number of arrows each way (loops when u == w)
    let mut blocks: std::collections::BTreeMap<(usize, usize), usize> = Default::default();
    let mut used = 0;
    for w in 1..nv {
        let u = rng.gen_range(0..w);
        *blocks.entry((u, w)).or_default() += 1;
        used += 2;
    }
    if nv == 1 {
        blocks.insert((0, 0), 1);
        used = 1;
    }
    while used < max_arrows && rng.gen_bool(0.5) {
        let u = rng.gen_range(0..nv);
        let w = rng.gen_range(0..nv);
        let cost = if u == w { 1 } else { 2 };
        if used + cost > max_arrows {
            break;
        }
        *blocks.entry((u.min(w), u.max(w))).or_default() += 1;
        used += cost;
    }
    let mut plan = Vec::new();
    for (&(u, w), &k) in &blocks {
        let out: Vec<ArrowId> = (0..k)
            .map(|_| {
                let name = format!("a{}", q.arrow_count());
                q.add_arrow(name, VertexId(u), VertexId(w)).unwrap()
            })
            .collect();
        let back: Vec<ArrowId> = if u == w {
            out.clone()
        } else {
            (0..k)
                .map(|_| {
                    let name = format!("a{}", q.arrow_count());
                    q.add_arrow(name, VertexId(w), VertexId(u)).unwrap()
                })
                .collect()
        };
        plan.push((out, back));
    }
    let mut g = GramSpec::new(field, q);
    for (out, back) in plan {
        let k = out.len();
        let loops = out == back;
        let m = loop {
            let mut m = Matrix::zeros(field, k, k);
            for i in 0..k {
                for j in 0..k {
                    if loops && j < i {
                        m.set(i, j, m.get(j, i).clone());
                    } else {
                        m.set(i, j, random_scalar(rng, field));
                    }
                }
            }
            if m.rank() == k {
                break m;
            }
        };
        for i in 0..k {
            for j in 0..k {
                let v = m.get(i, j).clone();
                if !v.is_zero() {
                    g.set_symmetric(out[i], back[j], v);
                }
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::check_conditions;
    use crate::radcube::validate_gram;

    #[test]
    fn configurations_are_valid_and_deterministic() {
        for seed in 0..200 {
            let params = ConfigParams { polygons: 6, max_val: 5, max_mu: 3 };
            let a = random_configuration(&mut rng(seed), params).unwrap();
            let b = random_configuration(&mut rng(seed), params).unwrap();
            assert_eq!(a, b);
            assert!(a.validate().is_empty(), "seed {seed}: {:?}", a.validate());
        }
        let params = ConfigParams { polygons: 3, max_val: 3, max_mu: 1 };
        for seed in 0..50 {
            assert!(random_configuration(&mut rng(seed), params).is_ok());
        }
    }

    #[test]
    fn pair_tables() {
        for seed in 0..100 {
            let mut r = rng(seed);
            let (q, pairs) = random_cycle_quiver(&mut r, 4, 6);
            assert!(q.is_connected());
            let rep = check_conditions(&q, &pairs, None);
            assert!(rep.m_prime && rep.arrow_free);
            let (q, pairs) = random_arrow_free_pairs(&mut r, 4, 6);
            assert!(check_conditions(&q, &pairs, None).arrow_free);
        }
    }

    #[test]
    fn grams_validate() {
        for seed in 0..100 {
            let field = if seed % 2 == 0 { Field::Prime(5) } else { Field::Prime(7) };
            let g = random_gram(&mut rng(seed), field, 4, 6);
            assert!(g.quiver.arrow_count() <= 6);
            assert!(validate_gram(&g).is_empty(), "seed {seed}: {:?}", validate_gram(&g));
        }
    }

    #[test]
    fn representations_fit() {
        for seed in 0..30 {
            let mut r = rng(seed);
            let p = random_presentation(&mut r, Field::Prime(3), 3, 4, 3);
            if let Some(m) = random_representation(&mut r, &p, 12) {
                assert!(m.total_dim() <= 12);
                assert!(m.validate(&p).is_empty());
            }
        }
    }
}
