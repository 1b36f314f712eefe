//! Brauer configurations and their algebras.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result, Violation};
use crate::presentation::{SocleIdent, SpecialPresentation};
use crate::quiver::{ArrowId, Path, Quiver, VertexId};
use crate::scalar::Field;

/// The `occ`-th (0-based) occurrence of a vertex inside polygon `polygon`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Occurrence {
    pub polygon: usize,
    pub occ: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Polygon {
    pub name: String,
    /// Vertex indices, repeated according to multiplicity.
    pub members: Vec<usize>,
}

impl Polygon {
    pub fn multiplicity(&self, alpha: usize) -> usize {
        self.members.iter().filter(|&&m| m == alpha).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BrauerConfiguration {
    pub vertices: Vec<String>,
    pub polygons: Vec<Polygon>,
    pub mu: Vec<u32>,
    /// Cyclic order of occurrences at each vertex; ignored for truncated vertices.
    pub orientation: Vec<Vec<Occurrence>>,
}

impl BrauerConfiguration {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn polygon_by_name(&self, name: &str) -> Option<usize> {
        self.polygons.iter().position(|p| p.name == name)
    }

    pub fn val(&self, alpha: usize) -> usize {
        self.polygons.iter().map(|p| p.multiplicity(alpha)).sum()
    }

    pub fn is_truncated(&self, alpha: usize) -> bool {
        self.val(alpha) == 1 && self.mu[alpha] == 1
    }

    /// All occurrences of `alpha`, in polygon order.
    pub fn occurrences(&self, alpha: usize) -> Vec<Occurrence> {
        self.polygons
            .iter()
            .enumerate()
            .flat_map(|(i, p)| (0..p.multiplicity(alpha)).map(move |occ| Occurrence { polygon: i, occ }))
            .collect()
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        let n = self.vertex_count();
        if self.mu.len() != n || self.orientation.len() != n {
            v.push(Violation::new("shape", "multiplicity and orientation must cover every vertex"));
            return v;
        }
        for p in &self.polygons {
            if let Some(&bad) = p.members.iter().find(|&&m| m >= n) {
                v.push(Violation::new("shape", format!("polygon {} names vertex #{bad}", p.name)));
                return v;
            }
        }
        for alpha in 0..n {
            let name = &self.vertices[alpha];
            if self.mu[alpha] == 0 {
                v.push(Violation::new("mu", format!("mu({name}) must be positive")));
            }
            if self.val(alpha) == 0 {
                v.push(Violation::new("C1", format!("vertex {name} lies in no polygon")));
                continue;
            }
            if self.is_truncated(alpha) {
                continue;
            }
            let expected: BTreeSet<Occurrence> = self.occurrences(alpha).into_iter().collect();
            let given = &self.orientation[alpha];
            let given_set: BTreeSet<Occurrence> = given.iter().copied().collect();
            if given_set.len() != given.len() || given_set != expected {
                v.push(Violation::new(
                    "orientation",
                    format!("order at {name} must list each of its {} occurrences exactly once", expected.len()),
                ));
            }
        }
        for p in &self.polygons {
            if p.members.len() < 2 {
                v.push(Violation::new("C2", format!("polygon {} has fewer than two vertices", p.name)));
            }
            if !p.members.iter().any(|&a| self.val(a) * self.mu[a] as usize > 1) {
                v.push(Violation::new("C3", format!("polygon {} has no vertex with val*mu > 1", p.name)));
            }
            for &a in &p.members {
                if self.is_truncated(a) && p.members.len() != 2 {
                    v.push(Violation::new(
                        "C4",
                        format!("truncated vertex {} lies in polygon {} which is not a 2-gon", self.vertices[a], p.name),
                    ));
                }
            }
        }
        v
    }

    pub fn check(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(v))
        }
    }

    pub fn nontruncated(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertex_count()).filter(move |&a| !self.is_truncated(a))
    }
}

/// A special α-cycle `C_j = a_j … a_{j-1}`, based at the polygon of occurrence `j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpecialCycle {
    pub alpha: usize,
    pub position: usize,
    pub base: VertexId,
    pub arrows: Vec<ArrowId>,
}

/// Quiver of a configuration plus the bookkeeping linking arrows back to it.
#[derive(Clone, Debug)]
pub struct BrauerQuiver {
    pub quiver: Quiver,
    /// arrow -> (α, r) where the arrow is `a_r` of the successor sequence at α (0-based r)
    pub origin: Vec<(usize, usize)>,
    /// per nontruncated α, its arrows `a_1 … a_val`
    pub arrows_of: Vec<Vec<ArrowId>>,
}

pub fn build_quiver(cfg: &BrauerConfiguration) -> Result<BrauerQuiver> {
    cfg.check()?;
    let mut quiver = Quiver::new();
    for p in &cfg.polygons {
        quiver.add_vertex(p.name.clone())?;
    }
    let mut origin = Vec::new();
    let mut arrows_of = vec![Vec::new(); cfg.vertex_count()];
    for alpha in cfg.nontruncated() {
        let order = &cfg.orientation[alpha];
        for r in 0..order.len() {
            let from = VertexId(order[r].polygon);
            let to = VertexId(order[(r + 1) % order.len()].polygon);
            let a = quiver.add_arrow(format!("{}_{}", cfg.vertices[alpha], r + 1), from, to)?;
            origin.push((alpha, r));
            arrows_of[alpha].push(a);
        }
    }
    Ok(BrauerQuiver {
        quiver,
        origin,
        arrows_of,
    })
}

pub fn special_cycles(cfg: &BrauerConfiguration, bq: &BrauerQuiver) -> Vec<SpecialCycle> {
    let mut out = Vec::new();
    for alpha in cfg.nontruncated() {
        let arrows = &bq.arrows_of[alpha];
        let n = arrows.len();
        for j in 0..n {
            out.push(SpecialCycle {
                alpha,
                position: j,
                base: VertexId(cfg.orientation[alpha][j].polygon),
                arrows: (0..n).map(|i| arrows[(j + i) % n]).collect(),
            });
        }
    }
    out
}

#[derive(Clone, Debug, Default)]
pub struct RelationSet {
    /// `C^μ - C'^μ'` for special cycles based at a common vertex
    pub type_one: Vec<(Path, Path)>,
    /// `C^μ a_1`
    pub type_two: Vec<Path>,
    /// composable `ab` lying in no special cycle
    pub type_three: Vec<(ArrowId, ArrowId)>,
}

fn cycle_power(q: &Quiver, cycle: &[ArrowId], mu: u32) -> Path {
    q.path_from_arrows(cycle).expect("special cycles are paths").power(mu as usize).unwrap()
}

pub fn build_relations(cfg: &BrauerConfiguration) -> Result<(BrauerQuiver, RelationSet)> {
    let bq = build_quiver(cfg)?;
    let q = &bq.quiver;
    let cycles = special_cycles(cfg, &bq);
    let mut rel = RelationSet::default();
    for v in q.vertex_ids() {
        let at_v: Vec<&SpecialCycle> = cycles.iter().filter(|c| c.base == v).collect();
        for i in 0..at_v.len() {
            for j in i + 1..at_v.len() {
                rel.type_one.push((
                    cycle_power(q, &at_v[i].arrows, cfg.mu[at_v[i].alpha]),
                    cycle_power(q, &at_v[j].arrows, cfg.mu[at_v[j].alpha]),
                ));
            }
        }
    }
    for c in &cycles {
        let p = cycle_power(q, &c.arrows, cfg.mu[c.alpha]);
        rel.type_two.push(p.compose(&Path::arrow(q, c.arrows[0])).unwrap());
    }
    let pi = consecutive_pairs(&bq);
    for a in q.arrow_ids() {
        for b in q.arrows_from(q.target(a)) {
            if !pi.contains(&(a, b)) {
                rel.type_three.push((a, b));
            }
        }
    }
    Ok((bq, rel))
}

fn consecutive_pairs(bq: &BrauerQuiver) -> BTreeSet<(ArrowId, ArrowId)> {
    bq.arrows_of
        .iter()
        .flat_map(|arrows| (0..arrows.len()).map(move |i| (arrows[i], arrows[(i + 1) % arrows.len()])))
        .collect()
}

/// The Brauer configuration algebra as a special-shape presentation.
pub fn build_algebra(cfg: &BrauerConfiguration, field: Field) -> Result<SpecialPresentation> {
    let bq = build_quiver(cfg)?;
    let cycles = special_cycles(cfg, &bq);
    let q = &bq.quiver;
    let cutoff = bq
        .origin
        .iter()
        .map(|&(alpha, _)| cfg.val(alpha) * cfg.mu[alpha] as usize - 1)
        .collect();
    let mut idents = Vec::new();
    for v in q.vertex_ids() {
        let mut at_v: Vec<&SpecialCycle> = cycles.iter().filter(|c| c.base == v).collect();
        at_v.sort_by_key(|c| c.arrows[0]);
        if let Some((first, rest)) = at_v.split_first() {
            let rhs = cycle_power(q, &first.arrows, cfg.mu[first.alpha]);
            for c in rest {
                idents.push(SocleIdent {
                    lhs: cycle_power(q, &c.arrows, cfg.mu[c.alpha]),
                    rhs: rhs.clone(),
                    scalar: field.one(),
                });
            }
        }
    }
    SpecialPresentation::new(field, bq.quiver.clone(), consecutive_pairs(&bq), cutoff, idents)
}
