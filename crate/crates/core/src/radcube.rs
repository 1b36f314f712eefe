//! Symmetric algebras with radical cube zero, given by the pairing
//! `γ(a, b) = f(ab)` on cyclic pairs of arrows.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::brauer::BrauerConfiguration;
use crate::error::{Error, Result, Violation};
use crate::linalg::{self, Matrix, Vector};
use crate::presentation::{SocleIdent, SpecialPresentation};
use crate::quiver::{ArrowId, Path, Quiver};
use crate::recovery;
use crate::scalar::{Field, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramSpec {
    pub field: Field,
    pub quiver: Quiver,
    /// Entries as given; missing pairs are zero.
    pub gamma: BTreeMap<(ArrowId, ArrowId), Scalar>,
}

impl GramSpec {
    pub fn new(field: Field, quiver: Quiver) -> Self {
        GramSpec {
            field,
            quiver,
            gamma: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, a: ArrowId, b: ArrowId, value: Scalar) {
        self.gamma.insert((a, b), value);
    }

    /// Sets both `γ(a,b)` and `γ(b,a)`.
    pub fn set_symmetric(&mut self, a: ArrowId, b: ArrowId, value: Scalar) {
        self.gamma.insert((a, b), value.clone());
        self.gamma.insert((b, a), value);
    }

    pub fn get(&self, a: ArrowId, b: ArrowId) -> Scalar {
        self.gamma.get(&(a, b)).cloned().unwrap_or_else(|| self.field.zero())
    }

    fn cyclic(&self, a: ArrowId, b: ArrowId) -> bool {
        let q = &self.quiver;
        q.target(a) == q.source(b) && q.target(b) == q.source(a)
    }

    /// The pairing as a dense symmetric matrix over the arrows (as given, not symmetrized).
    pub fn matrix(&self) -> Matrix {
        let n = self.quiver.arrow_count();
        let mut m = Matrix::zeros(self.field, n, n);
        for (&(a, b), v) in &self.gamma {
            m.set(a.0, b.0, v.clone());
        }
        m
    }
}

pub fn validate_gram(g: &GramSpec) -> Vec<Violation> {
    let q = &g.quiver;
    let mut v = Vec::new();
    for (&(a, b), x) in &g.gamma {
        if !g.cyclic(a, b) && !x.is_zero() {
            v.push(Violation::new(
                "domain",
                format!("{}*{} is not a cycle", q.arrow_name(a), q.arrow_name(b)),
            ));
        }
        if x.field() != g.field {
            v.push(Violation::new("domain", format!("gamma value {x} is not in {}", g.field)));
        }
    }
    if !v.is_empty() {
        return v;
    }
    for (&(a, b), x) in &g.gamma {
        if (a < b || !g.gamma.contains_key(&(b, a)))
            && *x != g.get(b, a) {
                v.push(Violation::new(
                    "symmetry",
                    format!(
                        "gamma({0},{1}) = {2} but gamma({1},{0}) = {3}",
                        q.arrow_name(a),
                        q.arrow_name(b),
                        x,
                        g.get(b, a)
                    ),
                ));
            }
    }
    if !q.is_connected() {
        v.push(Violation::new("connected", "the quiver is not connected"));
    }
    if q.arrow_count() == 0 {
        v.push(Violation::new("degenerate", "no arrows, so the radical squares to zero"));
    }
    for a in q.arrow_ids() {
        if q.arrow_ids().all(|b| g.get(a, b).is_zero()) {
            v.push(Violation::new("dead arrow", format!("{} pairs to zero with every arrow", q.arrow_name(a))));
        }
    }
    if v.is_empty() {
        // the pairing between arrows u -> w and w -> u must be perfect
        for u in q.vertex_ids() {
            for w in q.vertex_ids().filter(|w| w.0 >= u.0) {
                let out: Vec<ArrowId> = q.arrow_ids().filter(|&a| q.source(a) == u && q.target(a) == w).collect();
                let back: Vec<ArrowId> = q.arrow_ids().filter(|&a| q.source(a) == w && q.target(a) == u).collect();
                if out.is_empty() && back.is_empty() {
                    continue;
                }
                let block = Matrix::from_rows(
                    g.field,
                    out.len(),
                    back.len(),
                    out.iter().map(|&a| back.iter().map(|&b| g.get(a, b)).collect()).collect(),
                )
                .unwrap();
                if out.len() != back.len() || block.rank() != out.len() {
                    v.push(Violation::new(
                        "nondegenerate",
                        format!(
                            "pairing between arrows {} -> {} and back is degenerate",
                            q.vertex_name(u),
                            q.vertex_name(w)
                        ),
                    ));
                }
            }
        }
    }
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ArrKind {
    SelfPaired,
    Hyperbolic(usize),
}

/// The normalized basis: element `i` replaces arrow `i`.
#[derive(Clone, Debug)]
pub struct ArrBasis {
    pub elements: Vec<Vector>,
    pub gamma: Matrix,
    pub kinds: Vec<ArrKind>,
    /// Self-paired elements whose value has no square root in the field.
    pub obstructions: Vec<String>,
    pub log: Vec<String>,
}

impl ArrBasis {
    /// Every row and column of the transformed pairing has exactly one nonzero entry.
    pub fn is_block_normal(&self) -> bool {
        let n = self.elements.len();
        (0..n).all(|i| {
            let row = (0..n).filter(|&j| !self.gamma.get(i, j).is_zero()).count();
            let col = (0..n).filter(|&j| !self.gamma.get(j, i).is_zero()).count();
            row == 1 && col == 1
        })
    }

    pub fn partner(&self, i: usize) -> usize {
        match self.kinds[i] {
            ArrKind::SelfPaired => i,
            ArrKind::Hyperbolic(j) => j,
        }
    }
}

fn pair(g: &Matrix, x: &[Scalar], y: &[Scalar]) -> Scalar {
    let field = g.field();
    let mut s = field.zero();
    for i in linalg::support(x) {
        for j in linalg::support(y) {
            let v = g.get(i, j);
            if !v.is_zero() {
                s += &(&(&x[i] * &y[j]) * v);
            }
        }
    }
    s
}

fn describe(q: &Quiver, x: &[Scalar]) -> String {
    let terms: Vec<String> = linalg::support(x)
        .into_iter()
        .map(|i| {
            let name = q.arrow_name(ArrowId(i));
            if x[i].is_one() {
                name.to_string()
            } else {
                format!("({})*{name}", x[i])
            }
        })
        .collect();
    terms.join(" + ")
}

/// Orthogonalizes the arrows into self-paired loops and hyperbolic pairs, then
/// scales pairs (and, where square roots exist, loops) to value one.
pub fn normalize_arr(g: &GramSpec) -> Result<ArrBasis> {
    let v = validate_gram(g);
    if !v.is_empty() {
        return Err(Error::Validation(v));
    }
    let q = &g.quiver;
    let field = g.field;
    let n = q.arrow_count();
    let gm = g.matrix();
    let mut elems: Vec<Vector> = (0..n).map(|i| linalg::unit_vector(field, n, i)).collect();
    let mut kinds: Vec<Option<ArrKind>> = vec![None; n];
    let mut log = Vec::new();
    let parallel = |a: usize, c: usize| q.source(ArrowId(a)) == q.source(ArrowId(c)) && q.target(ArrowId(a)) == q.target(ArrowId(c));
    loop {
        let open: Vec<usize> = (0..n).filter(|&i| kinds[i].is_none()).collect();
        if open.is_empty() {
            break;
        }
        if let Some(&a) = open.iter().find(|&&a| !pair(&gm, &elems[a], &elems[a]).is_zero()) {
            let gaa = pair(&gm, &elems[a], &elems[a]);
            for &c in open.iter().filter(|&&c| c != a) {
                let gac = pair(&gm, &elems[a], &elems[c]);
                if gac.is_zero() {
                    continue;
                }
                debug_assert!(parallel(a, c));
                let coeff = -&(&gac / &gaa);
                let ea = elems[a].clone();
                linalg::axpy(&mut elems[c], &coeff, &ea);
                log.push(format!("pass 1: {} := {}", q.arrow_name(ArrowId(c)), describe(q, &elems[c])));
            }
            kinds[a] = Some(ArrKind::SelfPaired);
            continue;
        }
        let hyperbolic = open.iter().find_map(|&a| {
            open.iter()
                .find(|&&b| b != a && !pair(&gm, &elems[a], &elems[b]).is_zero())
                .map(|&b| (a, b))
        });
        let Some((a, b)) = hyperbolic else {
            return Err(Error::invalid(format!(
                "degenerate pairing: no self-paired or hyperbolic pivot among {}",
                open.iter().map(|&i| q.arrow_name(ArrowId(i))).collect::<Vec<_>>().join(", ")
            )));
        };
        let gab = pair(&gm, &elems[a], &elems[b]);
        for &c in open.iter().filter(|&&c| c != a && c != b) {
            let gbc = pair(&gm, &elems[b], &elems[c]);
            let gac = pair(&gm, &elems[a], &elems[c]);
            if gbc.is_zero() && gac.is_zero() {
                continue;
            }
            debug_assert!(gbc.is_zero() || parallel(a, c));
            debug_assert!(gac.is_zero() || parallel(b, c));
            let (ea, eb) = (elems[a].clone(), elems[b].clone());
            linalg::axpy(&mut elems[c], &-(&gbc / &gab), &ea);
            linalg::axpy(&mut elems[c], &-(&gac / &gab), &eb);
            log.push(format!("pass 2: {} := {}", q.arrow_name(ArrowId(c)), describe(q, &elems[c])));
        }
        kinds[a] = Some(ArrKind::Hyperbolic(b));
        kinds[b] = Some(ArrKind::Hyperbolic(a));
    }
    let kinds: Vec<ArrKind> = kinds.into_iter().map(Option::unwrap).collect();
    let mut obstructions = Vec::new();
    for i in 0..n {
        match kinds[i] {
            ArrKind::Hyperbolic(j) if i < j => {
                let gij = pair(&gm, &elems[i], &elems[j]);
                if !gij.is_one() {
                    elems[i] = linalg::scale(&elems[i], &gij.inv().unwrap());
                    log.push(format!("pass 3: {} := {}", q.arrow_name(ArrowId(i)), describe(q, &elems[i])));
                }
            }
            ArrKind::SelfPaired => {
                let gii = pair(&gm, &elems[i], &elems[i]);
                if gii.is_one() {
                    continue;
                }
                match gii.sqrt() {
                    Some(r) => {
                        elems[i] = linalg::scale(&elems[i], &r.inv().unwrap());
                        log.push(format!("pass 3: {} := {}", q.arrow_name(ArrowId(i)), describe(q, &elems[i])));
                    }
                    None => {
                        let msg = format!("{} pairs to {gii}, which has no square root in {field}", q.arrow_name(ArrowId(i)));
                        log.push(format!("pass 3: {msg}"));
                        obstructions.push(msg);
                    }
                }
            }
            _ => {}
        }
    }
    let mut gamma = Matrix::zeros(field, n, n);
    for i in 0..n {
        for j in 0..n {
            gamma.set(i, j, pair(&gm, &elems[i], &elems[j]));
        }
    }
    Ok(ArrBasis {
        elements: elems,
        gamma,
        kinds,
        obstructions,
        log,
    })
}

/// The special-shape presentation in the normalized basis: each element
/// survives only against its partner, `t ≡ 1`, and the length-two cycles at
/// each vertex are identified with ratios of pairing values.
pub fn extract_presentation(g: &GramSpec, arr: &ArrBasis) -> Result<SpecialPresentation> {
    let q = &g.quiver;
    let n = q.arrow_count();
    let pi: Vec<(ArrowId, ArrowId)> = (0..n).map(|i| (ArrowId(i), ArrowId(arr.partner(i)))).collect();
    let mut idents = Vec::new();
    for v in q.vertex_ids() {
        let at_v: Vec<ArrowId> = q.arrows_from(v).collect();
        let Some((&first, rest)) = at_v.split_first() else {
            continue;
        };
        let two_cycle = |a: ArrowId| -> Path {
            q.path_from_arrows(&[a, ArrowId(arr.partner(a.0))]).expect("partners compose")
        };
        let base = arr.gamma.get(first.0, arr.partner(first.0)).clone();
        for &a in rest {
            let value = arr.gamma.get(a.0, arr.partner(a.0));
            idents.push(SocleIdent {
                lhs: two_cycle(a),
                rhs: two_cycle(first),
                scalar: value / &base,
            });
        }
    }
    SpecialPresentation::new(g.field, q.clone(), pi, vec![1; n], idents)
}

#[derive(Clone, Debug)]
pub struct RadcubeResult {
    pub arr: ArrBasis,
    pub presentation: SpecialPresentation,
    pub configuration: BrauerConfiguration,
}

pub fn radcube_to_configuration(g: &GramSpec) -> Result<RadcubeResult> {
    let arr = normalize_arr(g)?;
    let presentation = extract_presentation(g, &arr)?;
    let expected = 2 * g.quiver.vertex_count() + g.quiver.arrow_count();
    if presentation.dim() != expected {
        return Err(Error::Checker(format!(
            "extracted algebra has dimension {}, expected {expected}",
            presentation.dim()
        )));
    }
    let configuration = recovery::recover_configuration(&presentation)?;
    Ok(RadcubeResult {
        arr,
        presentation,
        configuration,
    })
}
