//! Quivers, paths, and formal linear combinations of paths.
//!
//! Paths are written left to right: in `ab` the arrow `a` is traversed first.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct VertexId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ArrowId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Arrow {
    pub name: String,
    pub source: VertexId,
    pub target: VertexId,
}

/// A finite directed multigraph with named vertices and arrows.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Quiver {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
    #[serde(skip)]
    vertex_index: HashMap<String, VertexId>,
    #[serde(skip)]
    arrow_index: HashMap<String, ArrowId>,
}

impl PartialEq for Quiver {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.arrows == other.arrows
    }
}

impl Eq for Quiver {}

impl Quiver {
    pub fn new() -> Self {
        Quiver::default()
    }

    pub fn add_vertex(&mut self, name: impl Into<String>) -> Result<VertexId> {
        let name = name.into();
        if self.vertex_index.contains_key(&name) {
            return Err(Error::invalid(format!("duplicate vertex `{name}`")));
        }
        let id = VertexId(self.vertices.len());
        self.vertex_index.insert(name.clone(), id);
        self.vertices.push(name);
        Ok(id)
    }

    pub fn add_arrow(&mut self, name: impl Into<String>, source: VertexId, target: VertexId) -> Result<ArrowId> {
        let name = name.into();
        if self.arrow_index.contains_key(&name) {
            return Err(Error::invalid(format!("duplicate arrow `{name}`")));
        }
        if source.0 >= self.vertices.len() || target.0 >= self.vertices.len() {
            return Err(Error::invalid(format!("arrow `{name}` uses an undeclared vertex")));
        }
        let id = ArrowId(self.arrows.len());
        self.arrow_index.insert(name.clone(), id);
        self.arrows.push(Arrow { name, source, target });
        Ok(id)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertices.len()).map(VertexId)
    }

    pub fn arrow_ids(&self) -> impl Iterator<Item = ArrowId> + '_ {
        (0..self.arrows.len()).map(ArrowId)
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v.0]
    }

    pub fn arrow(&self, a: ArrowId) -> &Arrow {
        &self.arrows[a.0]
    }

    pub fn arrow_name(&self, a: ArrowId) -> &str {
        &self.arrows[a.0].name
    }

    pub fn source(&self, a: ArrowId) -> VertexId {
        self.arrows[a.0].source
    }

    pub fn target(&self, a: ArrowId) -> VertexId {
        self.arrows[a.0].target
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.vertex_index.get(name).copied()
    }

    pub fn arrow_by_name(&self, name: &str) -> Option<ArrowId> {
        self.arrow_index.get(name).copied()
    }

    pub fn arrows_from(&self, v: VertexId) -> impl Iterator<Item = ArrowId> + '_ {
        self.arrow_ids().filter(move |&a| self.source(a) == v)
    }

    pub fn arrows_into(&self, v: VertexId) -> impl Iterator<Item = ArrowId> + '_ {
        self.arrow_ids().filter(move |&a| self.target(a) == v)
    }

    /// Connected as an undirected graph. The empty quiver counts as disconnected.
    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for a in &self.arrows {
                let next = if a.source.0 == v {
                    a.target.0
                } else if a.target.0 == v {
                    a.source.0
                } else {
                    continue;
                };
                if !seen[next] {
                    seen[next] = true;
                    stack.push(next);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// The same vertices with every arrow reversed.
    pub fn opposite(&self) -> Quiver {
        let mut q = Quiver::new();
        for name in &self.vertices {
            q.add_vertex(name.clone()).expect("names are unique");
        }
        for a in &self.arrows {
            q.add_arrow(a.name.clone(), a.target, a.source).expect("names are unique");
        }
        q
    }

    pub fn path_from_arrows(&self, arrows: &[ArrowId]) -> Result<Path> {
        let (first, rest) = arrows
            .split_first()
            .ok_or_else(|| Error::invalid("a path given by arrows needs at least one arrow"))?;
        let mut path = Path::arrow(self, *first);
        for &a in rest {
            path = path
                .compose(&Path::arrow(self, a))
                .ok_or_else(|| Error::invalid(format!("arrows do not compose at `{}`", self.arrow_name(a))))?;
        }
        Ok(path)
    }

    /// Parses `a*b*c` or `e_<vertex>`.
    pub fn parse_path(&self, text: &str) -> Result<Path> {
        let text = text.trim();
        if let Some(v) = text.strip_prefix("e_") {
            if let Some(v) = self.vertex_by_name(v) {
                return Ok(Path::trivial(v));
            }
        }
        let arrows = text
            .split('*')
            .map(|name| {
                self.arrow_by_name(name.trim())
                    .ok_or_else(|| Error::invalid(format!("unknown arrow `{}`", name.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        self.path_from_arrows(&arrows)
    }

    pub fn display_path<'a>(&'a self, path: &'a Path) -> PathDisplay<'a> {
        PathDisplay { quiver: self, path }
    }
}

/// A path; the empty arrow sequence is the trivial path at `source == target`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Path {
    source: VertexId,
    target: VertexId,
    arrows: Vec<ArrowId>,
}

impl Path {
    pub fn trivial(v: VertexId) -> Self {
        Path {
            source: v,
            target: v,
            arrows: Vec::new(),
        }
    }

    pub fn arrow(quiver: &Quiver, a: ArrowId) -> Self {
        Path {
            source: quiver.source(a),
            target: quiver.target(a),
            arrows: vec![a],
        }
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn target(&self) -> VertexId {
        self.target
    }

    pub fn arrows(&self) -> &[ArrowId] {
        &self.arrows
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn first(&self) -> Option<ArrowId> {
        self.arrows.first().copied()
    }

    pub fn last(&self) -> Option<ArrowId> {
        self.arrows.last().copied()
    }

    pub fn is_cycle(&self) -> bool {
        !self.is_trivial() && self.source == self.target
    }

    /// `self` followed by `other`, when the target of `self` is the source of `other`.
    pub fn compose(&self, other: &Path) -> Option<Path> {
        if self.target != other.source {
            return None;
        }
        let mut arrows = self.arrows.clone();
        arrows.extend_from_slice(&other.arrows);
        Some(Path {
            source: self.source,
            target: other.target,
            arrows,
        })
    }

    /// `self >= other`: `other` is a terminal segment, i.e. `self = q * other`.
    pub fn ge(&self, other: &Path) -> bool {
        self.divide_left(other).is_some()
    }

    /// The unique `r` with `r * q = self`.
    pub fn divide_left(&self, q: &Path) -> Option<Path> {
        if self.target != q.target || q.len() > self.len() {
            return None;
        }
        let split = self.len() - q.len();
        if self.arrows[split..] != q.arrows[..] {
            return None;
        }
        Some(Path {
            source: self.source,
            target: q.source,
            arrows: self.arrows[..split].to_vec(),
        })
    }

    /// The unique `r` with `q * r = self`.
    pub fn divide_right(&self, q: &Path) -> Option<Path> {
        if self.source != q.source || q.len() > self.len() {
            return None;
        }
        if self.arrows[..q.len()] != q.arrows[..] {
            return None;
        }
        Some(Path {
            source: q.target,
            target: self.target,
            arrows: self.arrows[q.len()..].to_vec(),
        })
    }

    pub fn power(&self, n: usize) -> Option<Path> {
        if n == 0 {
            return Some(Path::trivial(self.source));
        }
        if n > 1 && self.source != self.target {
            return None;
        }
        let mut arrows = Vec::with_capacity(self.len() * n);
        for _ in 0..n {
            arrows.extend_from_slice(&self.arrows);
        }
        Some(Path {
            source: self.source,
            target: self.target,
            arrows,
        })
    }

    /// The same arrow sequence read backwards, as a path of the opposite quiver.
    pub fn reversed(&self) -> Path {
        Path {
            source: self.target,
            target: self.source,
            arrows: self.arrows.iter().rev().copied().collect(),
        }
    }

    /// Cyclic rotation starting at position `k` (only meaningful for cycles).
    pub fn rotated(&self, quiver: &Quiver, k: usize) -> Path {
        debug_assert!(self.is_cycle());
        let n = self.len();
        let arrows: Vec<ArrowId> = (0..n).map(|i| self.arrows[(i + k) % n]).collect();
        let v = quiver.source(arrows[0]);
        Path {
            source: v,
            target: v,
            arrows,
        }
    }
}

pub struct PathDisplay<'a> {
    quiver: &'a Quiver,
    path: &'a Path,
}

impl fmt::Display for PathDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_trivial() {
            return write!(f, "e_{}", self.quiver.vertex_name(self.path.source));
        }
        let names: Vec<&str> = self.path.arrows.iter().map(|&a| self.quiver.arrow_name(a)).collect();
        write!(f, "{}", names.join("*"))
    }
}

/// A finite combination of paths with nonzero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearCombination {
    terms: BTreeMap<Path, Scalar>,
}

impl LinearCombination {
    pub fn new() -> Self {
        LinearCombination::default()
    }

    pub fn from_term(path: Path, coeff: Scalar) -> Self {
        let mut lc = LinearCombination::new();
        lc.add_term(path, coeff);
        lc
    }

    pub fn add_term(&mut self, path: Path, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&path) {
            Some(c) => {
                *c += &coeff;
                if c.is_zero() {
                    self.terms.remove(&path);
                }
            }
            None => {
                self.terms.insert(path, coeff);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Path, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// All paths share one source and one target.
    pub fn is_uniform(&self) -> bool {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return true;
        };
        it.all(|p| p.source == first.source && p.target == first.target)
    }

    pub fn display<'a>(&'a self, quiver: &'a Quiver) -> impl fmt::Display + 'a {
        CombinationDisplay { quiver, lc: self }
    }
}

struct CombinationDisplay<'a> {
    quiver: &'a Quiver,
    lc: &'a LinearCombination,
}

impl fmt::Display for CombinationDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lc.is_zero() {
            return write!(f, "0");
        }
        for (i, (p, c)) in self.lc.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.is_one() {
                write!(f, "{}", self.quiver.display_path(p))?;
            } else {
                write!(f, "({c})*{}", self.quiver.display_path(p))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Field;

    /// One vertex with loops a1, a2 and a second vertex reached by b1.
    fn sample() -> (Quiver, ArrowId, ArrowId, ArrowId) {
        let mut q = Quiver::new();
        let v1 = q.add_vertex("v1").unwrap();
        let v3 = q.add_vertex("v3").unwrap();
        let a1 = q.add_arrow("a1", v1, v1).unwrap();
        let a2 = q.add_arrow("a2", v1, v1).unwrap();
        let b1 = q.add_arrow("b1", v1, v3).unwrap();
        (q, a1, a2, b1)
    }

    #[test]
    fn compose_loops_and_identity() {
        let (q, a1, a2, b1) = sample();
        let p = Path::arrow(&q, a1).compose(&Path::arrow(&q, a2)).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(q.display_path(&p).to_string(), "a1*a2");
        let e = Path::trivial(q.source(a1));
        assert_eq!(e.compose(&p).unwrap(), p);
        assert_eq!(p.compose(&e).unwrap(), p);
        // b1 ends at v3, where no a-loop starts
        assert!(Path::arrow(&q, b1).compose(&Path::arrow(&q, a1)).is_none());
    }

    #[test]
    fn order_and_division() {
        let (q, a1, a2, b1) = sample();
        let a1a2 = q.path_from_arrows(&[a1, a2]).unwrap();
        let pa2 = Path::arrow(&q, a2);
        let pa1 = Path::arrow(&q, a1);
        assert!(a1a2.ge(&pa2));
        assert!(a1a2.ge(&a1a2));
        assert!(!a1a2.ge(&pa1));
        assert_eq!(a1a2.divide_left(&pa2).unwrap(), pa1);
        assert_eq!(a1a2.divide_left(&a1a2).unwrap(), Path::trivial(q.source(a1)));
        assert!(a1a2.divide_left(&Path::arrow(&q, b1)).is_none());
        assert_eq!(a1a2.divide_right(&pa1).unwrap(), pa2);
    }

    #[test]
    fn parse_and_print_paths() {
        let (q, a1, a2, _) = sample();
        let p = q.parse_path("a1*a2*a1").unwrap();
        assert_eq!(p.arrows(), &[a1, a2, a1]);
        assert!(q.parse_path("a1*b1*a1").is_err());
        assert!(q.parse_path("zz").is_err());
        assert!(q.parse_path("e_v3").unwrap().is_trivial());
    }

    #[test]
    fn combinations_drop_zero_terms() {
        let (q, a1, a2, _) = sample();
        let k = Field::Rationals;
        let p = q.path_from_arrows(&[a1, a2]).unwrap();
        let r = q.path_from_arrows(&[a2, a1]).unwrap();
        let mut lc = LinearCombination::from_term(p.clone(), k.one());
        lc.add_term(r, k.from_i64(-1));
        assert!(lc.is_uniform());
        assert_eq!(lc.len(), 2);
        lc.add_term(p, k.from_i64(-1));
        assert_eq!(lc.len(), 1);
    }
}
