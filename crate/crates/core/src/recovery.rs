//! Recovering a Brauer configuration from a symmetric special multiserial presentation.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::brauer::{self, BrauerConfiguration, Occurrence, Polygon};
use crate::error::{Error, Result, Violation};
use crate::presentation::{SocleIdent, SpecialPresentation};
use crate::quiver::{ArrowId, Path, VertexId};
use crate::scalar::{Field, Scalar};

/// The arrow permutation `σ`, its orbits, and the orbit multiplicities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SigmaData {
    pub sigma: Vec<ArrowId>,
    /// Each orbit starts at its smallest arrow and follows `σ`.
    pub orbits: Vec<Vec<ArrowId>>,
    pub orbit_of: Vec<usize>,
    /// `m` per orbit
    pub m: Vec<usize>,
}

impl SigmaData {
    /// `c_a = a σ(a) … σ^{|O|-1}(a)`.
    pub fn cycle(&self, p: &SpecialPresentation, a: ArrowId) -> Path {
        let len = self.orbits[self.orbit_of[a.0]].len();
        let mut arrows = vec![a];
        for _ in 1..len {
            arrows.push(self.sigma[arrows.last().unwrap().0]);
        }
        p.quiver().path_from_arrows(&arrows).expect("σ-chains are paths")
    }

    pub fn m_of(&self, a: ArrowId) -> usize {
        self.m[self.orbit_of[a.0]]
    }
}

/// Requires (M′); fails with "not M-prime" otherwise.
pub fn induced_permutation(p: &SpecialPresentation) -> Result<SigmaData> {
    let q = p.quiver();
    let mut sigma = Vec::with_capacity(q.arrow_count());
    for a in q.arrow_ids() {
        match (p.next_arrow(a), p.prev_arrow(a)) {
            (Some(b), Some(_)) => sigma.push(b),
            (None, _) => return Err(Error::NotMPrime(format!("arrow {} has no successor", q.arrow_name(a)))),
            (_, None) => return Err(Error::NotMPrime(format!("arrow {} has no predecessor", q.arrow_name(a)))),
        }
    }
    let mut orbit_of = vec![usize::MAX; sigma.len()];
    let mut orbits = Vec::new();
    for start in q.arrow_ids() {
        if orbit_of[start.0] != usize::MAX {
            continue;
        }
        let mut orbit = vec![start];
        orbit_of[start.0] = orbits.len();
        let mut cur = sigma[start.0];
        while cur != start {
            orbit_of[cur.0] = orbits.len();
            orbit.push(cur);
            cur = sigma[cur.0];
        }
        orbits.push(orbit);
    }
    let mut m = Vec::with_capacity(orbits.len());
    let mut violations = Vec::new();
    for orbit in &orbits {
        let ms: Vec<usize> = orbit.iter().map(|&a| (p.cutoff(a) + 1) / orbit.len()).collect();
        if ms.iter().any(|&x| x != ms[0]) {
            violations.push(Violation::new(
                "cycle-power",
                format!("m is not constant on the orbit of {}", q.arrow_name(orbit[0])),
            ));
        }
        m.push(ms[0]);
    }
    let data = SigmaData { sigma, orbits, orbit_of, m };
    if violations.is_empty() {
        violations = cycle_power_violations(p, &data);
    }
    if !violations.is_empty() {
        return Err(Error::Validation(violations));
    }
    Ok(data)
}

/// Each `c_a^{m_a}` must be a nonzero basis element annihilated by every arrow on both sides.
pub fn cycle_power_violations(p: &SpecialPresentation, s: &SigmaData) -> Vec<Violation> {
    let q = p.quiver();
    let mut v = Vec::new();
    for a in q.arrow_ids() {
        let name = q.arrow_name(a);
        let Some(top) = s.cycle(p, a).power(s.m_of(a)) else {
            v.push(Violation::new("cycle-power", format!("c_{name} is not a cycle")));
            continue;
        };
        if top.is_trivial() || p.normal_form(&top).is_none() {
            v.push(Violation::new("cycle-power", format!("c_{name}^m is zero")));
            continue;
        }
        let in_socle = q.arrow_ids().all(|b| {
            let right = top.compose(&Path::arrow(q, b)).is_none_or(|x| p.normal_form(&x).is_none());
            let left = Path::arrow(q, b).compose(&top).is_none_or(|x| p.normal_form(&x).is_none());
            right && left
        });
        if !in_socle {
            v.push(Violation::new("cycle-power", format!("c_{name}^m is not in the socle")));
        }
    }
    v
}

/// Orbit–vertex scalar system `κ_O · w_a = k_v`; see [`rescale_to_unit_idents`].
fn solve_orbit_scalars(p: &SpecialPresentation, s: &SigmaData) -> Option<Vec<Scalar>> {
    let q = p.quiver();
    let k = p.field();
    // Every arrow a from v gives the edge (O(a), v) with weight w_a, where M_a = w_a M_root(v)
    let edges: Vec<(usize, VertexId, Scalar)> = q
        .arrow_ids()
        .map(|a| {
            let w = p.class_weight(a).map_or(k.one(), |(_, w)| w);
            (s.orbit_of[a.0], q.source(a), w)
        })
        .collect();
    let mut kappa: Vec<Option<Scalar>> = vec![None; s.orbits.len()];
    let mut kv: Vec<Option<Scalar>> = vec![None; q.vertex_count()];
    for start in 0..s.orbits.len() {
        if kappa[start].is_some() {
            continue;
        }
        kappa[start] = Some(k.one());
        let mut changed = true;
        while changed {
            changed = false;
            for (o, v, w) in &edges {
                match (&kappa[*o], &kv[v.0]) {
                    (Some(x), None) => {
                        kv[v.0] = Some(x * w);
                        changed = true;
                    }
                    (None, Some(y)) => {
                        kappa[*o] = Some(y / w);
                        changed = true;
                    }
                    _ => {}
                }
            }
        }
    }
    for (o, v, w) in &edges {
        if &(kappa[*o].as_ref()? * w) != kv[v.0].as_ref()? {
            return None;
        }
    }
    kappa.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryReport {
    pub violations: Vec<Violation>,
}

/// Detailed symmetry test; empty violations means symmetric.
pub fn symmetry_violations(p: &SpecialPresentation) -> Vec<Violation> {
    let q = p.quiver();
    let s = match induced_permutation(p) {
        Ok(s) => s,
        Err(Error::NotMPrime(msg)) => return vec![Violation::new("(M')", msg)],
        Err(Error::Validation(v)) => return v,
        Err(e) => return vec![Violation::new("symmetry", e.to_string())],
    };
    let mut v = Vec::new();
    for vert in q.vertex_ids() {
        let arrows: Vec<ArrowId> = q.arrows_from(vert).collect();
        if arrows.iter().any(|&a| !p.same_class(a, arrows[0])) {
            v.push(Violation::new(
                "symmetry",
                format!("maximal paths at {} are not all identified", q.vertex_name(vert)),
            ));
        }
    }
    for a in q.arrow_ids() {
        let len = s.orbits[s.orbit_of[a.0]].len();
        if p.cutoff(a) + 1 != s.m_of(a) * len {
            v.push(Violation::new(
                "symmetry",
                format!("the maximal path from {} is not a full cycle power", q.arrow_name(a)),
            ));
        }
    }
    if v.is_empty() && solve_orbit_scalars(p, &s).is_none() {
        v.push(Violation::new("symmetry", "identification scalars admit no symmetrizing form"));
    }
    v
}

pub fn verify_symmetric(p: &SpecialPresentation) -> bool {
    symmetry_violations(p).is_empty()
}

#[derive(Clone, Debug)]
pub struct Rescaling {
    /// Scalar applied to each arrow (`a ↦ λ_a a`).
    pub arrow_scalars: Vec<Scalar>,
    pub presentation: SpecialPresentation,
}

/// Rescales one designated arrow per orbit so every identification scalar becomes 1.
pub fn rescale_to_unit_idents(p: &SpecialPresentation) -> Result<Rescaling> {
    let v = symmetry_violations(p);
    if !v.is_empty() {
        return Err(Error::Validation(v));
    }
    let s = induced_permutation(p)?;
    let kappa = solve_orbit_scalars(p, &s).expect("checked by the symmetry test");
    let field = p.field();
    let roots = |c: &Scalar| -> Option<Vec<Scalar>> {
        kappa
            .iter()
            .zip(&s.m)
            .map(|(k, &m)| (c * k).nth_root(m as u32))
            .collect()
    };
    let mut found = None;
    for c in global_scale_candidates(field, &kappa, &s.m) {
        if let Some(r) = roots(&c) {
            found = Some((c, r));
            break;
        }
    }
    let Some((c, big_lambda)) = found else {
        let (o, bad) = kappa
            .iter()
            .enumerate()
            .find(|(o, k)| k.nth_root(s.m[*o] as u32).is_none())
            .expect("some orbit lacks a root");
        let q = p.quiver();
        return Err(Error::RootObstruction(format!(
            "orbit of {} needs a {}-th root of {} in {}",
            q.arrow_name(s.orbits[o][0]),
            s.m[o],
            bad,
            field
        )));
    };
    let mut arrow_scalars = vec![field.one(); s.sigma.len()];
    for (o, orbit) in s.orbits.iter().enumerate() {
        arrow_scalars[orbit[0].0] = big_lambda[o].clone();
    }
    // κ_O after rescaling is c·κ_O; λ_new = λ · κ(p) / κ(q)
    let scaled: Vec<Scalar> = kappa.iter().map(|k| &c * k).collect();
    let mut idents = Vec::new();
    for id in p.idents() {
        let op = s.orbit_of[id.lhs.first().unwrap().0];
        let oq = s.orbit_of[id.rhs.first().unwrap().0];
        let scalar = &(&id.scalar * &scaled[op]) / &scaled[oq];
        if !scalar.is_one() {
            return Err(Error::Checker(format!("rescaled identification has scalar {scalar}")));
        }
        idents.push(SocleIdent {
            lhs: id.lhs.clone(),
            rhs: id.rhs.clone(),
            scalar,
        });
    }
    Ok(Rescaling {
        arrow_scalars,
        presentation: p.with_idents(idents)?,
    })
}

/// Global factors `c` for the homogeneous system: all of `F_p^*` for small `p`,
/// otherwise `1` and small powers of the orbit constants.
fn global_scale_candidates(field: Field, kappa: &[Scalar], m: &[usize]) -> Vec<Scalar> {
    let mut out = vec![field.one()];
    if let Field::Prime(p) = field {
        if p <= 1 << 16 {
            out.extend(field.elements().unwrap().filter(|x| !x.is_zero() && !x.is_one()));
            return out;
        }
    }
    let l = m.iter().copied().fold(1, num_integer::lcm) as i64;
    for k in kappa {
        let inv = k.inv().unwrap();
        for e in 1..=l {
            out.push(inv.pow(e as u64));
            out.push(k.pow(e as u64));
        }
    }
    out
}

/// Extracts the Brauer configuration of a symmetric special multiserial presentation.
pub fn recover_configuration(p: &SpecialPresentation) -> Result<BrauerConfiguration> {
    let v = symmetry_violations(p);
    if !v.is_empty() {
        if let Some(x) = v.iter().find(|x| x.condition == "(M')") {
            return Err(Error::NotMPrime(x.message.clone()));
        }
        return Err(Error::Validation(v));
    }
    let s = induced_permutation(p)?;
    let q = p.quiver();
    let mut polygons: Vec<Polygon> = q
        .vertex_ids()
        .map(|v| Polygon {
            name: q.vertex_name(v).to_string(),
            members: Vec::new(),
        })
        .collect();
    let mut vertices = Vec::new();
    let mut mu = Vec::new();
    let mut orientation = Vec::new();
    for (k, orbit) in s.orbits.iter().enumerate() {
        vertices.push(format!("o{}", k + 1));
        mu.push(s.m[k] as u32);
        let mut order = Vec::new();
        for &a in orbit {
            let v = q.source(a).0;
            let occ = polygons[v].multiplicity(k);
            polygons[v].members.push(k);
            order.push(Occurrence { polygon: v, occ });
        }
        orientation.push(order);
    }
    for i in 0..polygons.len() {
        if polygons[i].members.len() == 1 {
            let t = vertices.len();
            vertices.push(format!("t_{}", polygons[i].name));
            mu.push(1);
            orientation.push(Vec::new());
            polygons[i].members.push(t);
        }
    }
    let cfg = BrauerConfiguration {
        vertices,
        polygons,
        mu,
        orientation,
    };
    cfg.check()?;
    combinatorial_match(p, &cfg, &s)?;
    Ok(cfg)
}

/// `build_algebra(cfg)` has the same quiver, `Π`, cutoffs, identification
/// pattern, and dimension as `p`, under the arrow matching induced by orbits.
fn combinatorial_match(p: &SpecialPresentation, cfg: &BrauerConfiguration, s: &SigmaData) -> Result<()> {
    let built = brauer::build_algebra(cfg, p.field())?;
    let (q, bq) = (p.quiver(), built.quiver());
    let fail = |what: &str| Err(Error::Checker(format!("recovered configuration differs in {what}")));
    if q.vertex_count() != bq.vertex_count() || q.arrow_count() != bq.arrow_count() {
        return fail("quiver size");
    }
    // the r-th arrow of orbit k is named o{k+1}_{r+1}
    let mut map = vec![ArrowId(0); q.arrow_count()];
    for (k, orbit) in s.orbits.iter().enumerate() {
        for (r, &a) in orbit.iter().enumerate() {
            match bq.arrow_by_name(&format!("o{}_{}", k + 1, r + 1)) {
                Some(b) => map[a.0] = b,
                None => return fail("arrow set"),
            }
        }
    }
    for a in q.arrow_ids() {
        let b = map[a.0];
        if q.source(a) != bq.source(b) || q.target(a) != bq.target(b) {
            return fail("arrow endpoints");
        }
        if p.cutoff(a) != built.cutoff(b) {
            return fail("cutoffs");
        }
        if p.next_arrow(a).map(|x| map[x.0]) != built.next_arrow(b) {
            return fail("the table of surviving pairs");
        }
    }
    for a in q.arrow_ids() {
        for c in q.arrow_ids() {
            if p.same_class(a, c) != built.same_class(map[a.0], map[c.0]) {
                return fail("identification pattern");
            }
        }
    }
    if p.dim() != built.dim() {
        return fail("dimension");
    }
    Ok(())
}

/// Isomorphism of configurations: vertex and polygon bijections preserving μ,
/// membership, and orientations up to rotation; truncated vertices match freely.
pub fn config_isomorphic(g: &BrauerConfiguration, h: &BrauerConfiguration) -> bool {
    if g.vertex_count() != h.vertex_count() || g.polygons.len() != h.polygons.len() {
        return false;
    }
    let words = |c: &BrauerConfiguration| -> BTreeMap<usize, Vec<usize>> {
        c.nontruncated()
            .map(|a| (a, c.orientation[a].iter().map(|o| o.polygon).collect()))
            .collect()
    };
    let (wg, wh) = (words(g), words(h));
    if wg.len() != wh.len() {
        return false;
    }
    let gv: Vec<usize> = wg.keys().copied().collect();
    let mut used = vec![false; h.vertex_count()];
    let mut pmap: HashMap<usize, usize> = HashMap::new();
    let mut pinv: HashMap<usize, usize> = HashMap::new();
    if !iso_search(g, h, &wg, &wh, &gv, 0, &mut used, &mut pmap, &mut pinv) {
        return false;
    }
    true
}

#[allow(clippy::too_many_arguments)]
fn iso_search(
    g: &BrauerConfiguration,
    h: &BrauerConfiguration,
    wg: &BTreeMap<usize, Vec<usize>>,
    wh: &BTreeMap<usize, Vec<usize>>,
    order: &[usize],
    depth: usize,
    used: &mut [bool],
    pmap: &mut HashMap<usize, usize>,
    pinv: &mut HashMap<usize, usize>,
) -> bool {
    if depth == order.len() {
        return pmap.len() == g.polygons.len()
            && pmap.iter().all(|(&x, &y)| truncated_count(g, x) == truncated_count(h, y));
    }
    let a = order[depth];
    let word = &wg[&a];
    for (&b, target) in wh {
        if used[b] || g.mu[a] != h.mu[b] || word.len() != target.len() {
            continue;
        }
        for r in 0..target.len() {
            let mut added = Vec::new();
            let mut ok = true;
            for (i, &x) in word.iter().enumerate() {
                let y = target[(i + r) % target.len()];
                match (pmap.get(&x), pinv.get(&y)) {
                    (Some(&yy), _) if yy != y => ok = false,
                    (None, Some(_)) => ok = false,
                    (None, None) => {
                        pmap.insert(x, y);
                        pinv.insert(y, x);
                        added.push(x);
                    }
                    _ => {}
                }
                if !ok {
                    break;
                }
            }
            if ok {
                used[b] = true;
                if iso_search(g, h, wg, wh, order, depth + 1, used, pmap, pinv) {
                    return true;
                }
                used[b] = false;
            }
            for x in added {
                let y = pmap.remove(&x).unwrap();
                pinv.remove(&y);
            }
        }
    }
    false
}

fn truncated_count(c: &BrauerConfiguration, polygon: usize) -> usize {
    c.polygons[polygon].members.iter().filter(|&&a| c.is_truncated(a)).count()
}
