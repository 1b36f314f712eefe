//! Algebras `KQ/I` in special shape: a table `Π` of surviving length-two
//! paths, per-arrow cutoffs `t(a)`, and binomial identifications between
//! parallel maximal paths.
//!
//! In this shape the nonzero paths starting with an arrow `a` are exactly
//! `p_i(a) = a σ(a) … σ^i(a)` for `0 <= i <= t(a)`, which gives linear-time
//! normal forms without a general rewriting engine.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result, Violation};
use crate::linalg::{self, Subspace, Vector};
use crate::quiver::{ArrowId, Path, Quiver, VertexId};
use crate::scalar::{Field, Scalar};

/// `lhs - scalar * rhs ∈ I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SocleIdent {
    pub lhs: Path,
    pub rhs: Path,
    pub scalar: Scalar,
}

/// Arrows partitioned into basic cycles whose wrapped consecutive pairs are exactly `Π`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpecialCycleSet {
    pub cycles: Vec<Vec<ArrowId>>,
}

impl SpecialCycleSet {
    /// Canonical form: each cycle rotated to start at its smallest arrow, cycles sorted.
    pub fn canonical(&self) -> Vec<Vec<ArrowId>> {
        let mut out: Vec<Vec<ArrowId>> = self.cycles.iter().map(|c| rotate_to_min(c)).collect();
        out.sort();
        out
    }
}

pub(crate) fn rotate_to_min<T: Ord + Copy>(c: &[T]) -> Vec<T> {
    let k = (0..c.len()).min_by_key(|&i| c[i]).unwrap_or(0);
    c[k..].iter().chain(&c[..k]).copied().collect()
}

/// The flags of the five-way equivalence for arrow-free algebras.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub m: bool,
    pub m_prime: bool,
    pub phi_bijective: bool,
    pub psi_bijective: bool,
    pub special_cycles: Option<SpecialCycleSet>,
    pub arrow_free: bool,
}

impl ConditionReport {
    /// True when all five equivalent conditions agree.
    pub fn consistent(&self) -> bool {
        let s = self.special_cycles.is_some();
        self.m == self.m_prime && self.m == self.phi_bijective && self.m == self.psi_bijective && self.m == s
    }
}

/// Computes the condition flags for a raw pair set; `Π` need not satisfy (M).
///
/// When `cutoff` is given, arrow-freeness also requires the cutoffs to let
/// each arrow extend on both sides.
pub fn check_conditions(
    quiver: &Quiver,
    pairs: &BTreeSet<(ArrowId, ArrowId)>,
    cutoff: Option<&[usize]>,
) -> ConditionReport {
    let n = quiver.arrow_count();
    let mut succ = vec![0usize; n];
    let mut pred = vec![0usize; n];
    for &(a, b) in pairs {
        succ[a.0] += 1;
        pred[b.0] += 1;
    }
    let m = succ.iter().chain(&pred).all(|&c| c <= 1);
    let m_prime = succ.iter().chain(&pred).all(|&c| c == 1);
    // φ(ab) = a is bijective iff every arrow is a left member exactly once
    let phi_bijective = succ.iter().all(|&c| c == 1);
    let psi_bijective = pred.iter().all(|&c| c == 1);
    let arrow_free = (0..n).all(|a| {
        let has_succ = pairs.iter().any(|&(x, _)| x.0 == a);
        let has_pred = pairs
            .iter()
            .any(|&(c, y)| y.0 == a && cutoff.is_none_or(|t| t[c.0] >= 1));
        has_succ && has_pred && cutoff.is_none_or(|t| t[a] >= 1)
    });
    ConditionReport {
        m,
        m_prime,
        phi_bijective,
        psi_bijective,
        special_cycles: special_cycles_from_pairs(n, pairs),
        arrow_free,
    }
}

/// Follows unique successors until the first repeat; fails unless this yields a special set.
fn special_cycles_from_pairs(n: usize, pairs: &BTreeSet<(ArrowId, ArrowId)>) -> Option<SpecialCycleSet> {
    let unique_succ = |a: ArrowId| -> Option<ArrowId> {
        let mut it = pairs.iter().filter(|&&(x, _)| x == a).map(|&(_, b)| b);
        let b = it.next()?;
        it.next().is_none().then_some(b)
    };
    let mut covered = vec![false; n];
    let mut cycles = Vec::new();
    for start in (0..n).map(ArrowId) {
        if covered[start.0] {
            continue;
        }
        let mut cycle = vec![start];
        let mut seen = BTreeSet::from([start]);
        let mut cur = start;
        loop {
            let next = unique_succ(cur)?;
            if seen.contains(&next) {
                if next != start {
                    return None;
                }
                break;
            }
            if covered[next.0] {
                return None;
            }
            seen.insert(next);
            cycle.push(next);
            cur = next;
        }
        for a in &cycle {
            covered[a.0] = true;
        }
        cycles.push(cycle);
    }
    let wrapped: BTreeSet<(ArrowId, ArrowId)> = cycles
        .iter()
        .flat_map(|c| (0..c.len()).map(move |i| (c[i], c[(i + 1) % c.len()])))
        .collect();
    (&wrapped == pairs).then_some(SpecialCycleSet { cycles })
}

/// A validated special-shape presentation together with its normal-form tables.
#[derive(Clone, Debug)]
pub struct SpecialPresentation {
    field: Field,
    quiver: Quiver,
    pi: BTreeSet<(ArrowId, ArrowId)>,
    cutoff: Vec<usize>,
    idents: Vec<SocleIdent>,
    next: Vec<Option<ArrowId>>,
    prev: Vec<Option<ArrowId>>,
    /// For each arrow whose maximal path is identified: (class root, w) with `M_a = w * M_root`.
    class: Vec<Option<(ArrowId, Scalar)>>,
    basis: Vec<Path>,
    chain_index: HashMap<(ArrowId, usize), usize>,
}

impl PartialEq for SpecialPresentation {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.quiver == other.quiver
            && self.pi == other.pi
            && self.cutoff == other.cutoff
            && self.idents == other.idents
    }
}

impl SpecialPresentation {
    pub fn new(
        field: Field,
        quiver: Quiver,
        pi: impl IntoIterator<Item = (ArrowId, ArrowId)>,
        cutoff: Vec<usize>,
        idents: Vec<SocleIdent>,
    ) -> Result<Self> {
        let pi: BTreeSet<_> = pi.into_iter().collect();
        let n = quiver.arrow_count();
        let mut v = Vec::new();
        if cutoff.len() != n {
            return Err(Error::invalid(format!("{} cutoffs given for {n} arrows", cutoff.len())));
        }
        let mut next = vec![None; n];
        let mut prev = vec![None; n];
        for &(a, b) in &pi {
            if a.0 >= n || b.0 >= n {
                return Err(Error::invalid("pair refers to an unknown arrow"));
            }
            let (an, bn) = (quiver.arrow_name(a), quiver.arrow_name(b));
            if quiver.target(a) != quiver.source(b) {
                v.push(Violation::new("composable", format!("{an}*{bn} is not a path")));
            }
            if next[a.0].replace(b).is_some() {
                v.push(Violation::new("(M)", format!("{an} has two successors")));
            }
            if prev[b.0].replace(a).is_some() {
                v.push(Violation::new("(M)", format!("{bn} has two predecessors")));
            }
            if cutoff[a.0] == 0 {
                v.push(Violation::new("cutoff", format!("{an}*{bn} survives but t({an}) = 0")));
            } else if cutoff[a.0] > cutoff[b.0] + 1 {
                v.push(Violation::new(
                    "cutoff",
                    format!("t({an}) = {} exceeds t({bn}) + 1 = {}", cutoff[a.0], cutoff[b.0] + 1),
                ));
            }
        }
        for a in quiver.arrow_ids() {
            if cutoff[a.0] >= 1 && next[a.0].is_none() {
                v.push(Violation::new(
                    "cutoff",
                    format!("t({}) = {} but the arrow has no successor", quiver.arrow_name(a), cutoff[a.0]),
                ));
            }
        }
        if !v.is_empty() {
            return Err(Error::Validation(v));
        }

        let mut p = SpecialPresentation {
            field,
            quiver,
            pi,
            cutoff,
            idents,
            next,
            prev,
            class: vec![None; n],
            basis: Vec::new(),
            chain_index: HashMap::new(),
        };
        p.resolve_identifications()?;
        p.build_basis();
        Ok(p)
    }

    /// Checks identification shape and scalar consistency, then fixes class roots and weights.
    fn resolve_identifications(&mut self) -> Result<()> {
        let mut v = Vec::new();
        let mut edges: Vec<(ArrowId, ArrowId, Scalar)> = Vec::new();
        for id in &self.idents {
            let lhs = self.quiver.display_path(&id.lhs).to_string();
            let rhs = self.quiver.display_path(&id.rhs).to_string();
            if id.scalar.field() != self.field || id.scalar.is_zero() {
                v.push(Violation::new("ident", format!("{lhs} ~ {rhs} needs a nonzero scalar of {}", self.field)));
                continue;
            }
            if id.lhs.source() != id.rhs.source() || id.lhs.target() != id.rhs.target() {
                v.push(Violation::new("ident", format!("{lhs} and {rhs} are not parallel")));
                continue;
            }
            let mut ok = true;
            for (path, text) in [(&id.lhs, &lhs), (&id.rhs, &rhs)] {
                if let Err(msg) = self.check_maximal(path) {
                    v.push(Violation::new("ident", format!("{text} {msg}")));
                    ok = false;
                }
            }
            if ok {
                edges.push((id.lhs.first().unwrap(), id.rhs.first().unwrap(), id.scalar.clone()));
            }
        }
        if !v.is_empty() {
            return Err(Error::Validation(v));
        }

        // M_a = λ M_b; propagate weights from the smallest arrow of each component
        let n = self.quiver.arrow_count();
        let mut adj: Vec<Vec<(ArrowId, Scalar)>> = vec![Vec::new(); n];
        for (a, b, l) in &edges {
            adj[a.0].push((*b, l.inv().unwrap()));
            adj[b.0].push((*a, l.clone()));
        }
        let mut weight: Vec<Option<(ArrowId, Scalar)>> = vec![None; n];
        for root in (0..n).map(ArrowId) {
            if weight[root.0].is_some() || adj[root.0].is_empty() {
                continue;
            }
            weight[root.0] = Some((root, self.field.one()));
            let mut stack = vec![root];
            while let Some(x) = stack.pop() {
                let wx = weight[x.0].as_ref().unwrap().1.clone();
                // an edge (y, s) at x means M_y = s * M_x
                for (y, s) in &adj[x.0] {
                    if weight[y.0].is_none() {
                        weight[y.0] = Some((root, s * &wx));
                        stack.push(*y);
                    }
                }
            }
        }
        for (a, b, l) in &edges {
            let wa = &weight[a.0].as_ref().unwrap().1;
            let wb = &weight[b.0].as_ref().unwrap().1;
            if *wa != l * wb {
                let lhs = self.quiver.display_path(&self.chain(*a, self.cutoff[a.0]).unwrap()).to_string();
                return Err(Error::Validation(vec![Violation::new(
                    "ident",
                    format!("identification scalars around {lhs} are inconsistent"),
                )]));
            }
        }
        self.class = weight;
        Ok(())
    }

    fn check_maximal(&self, path: &Path) -> Result<(), &'static str> {
        if path.len() < 2 {
            return Err("has length < 2");
        }
        let a = path.first().unwrap();
        if self.chain(a, path.len() - 1).as_ref() != Some(path) {
            return Err("is zero in the algebra");
        }
        if path.len() - 1 != self.cutoff[a.0] {
            return Err("is not right-maximal");
        }
        if let Some(c) = self.prev[a.0] {
            if self.cutoff[c.0] >= path.len() {
                return Err("is not left-maximal");
            }
        }
        Ok(())
    }

    fn build_basis(&mut self) {
        let mut basis: Vec<Path> = self.quiver.vertex_ids().map(Path::trivial).collect();
        let mut index = HashMap::new();
        for a in self.quiver.arrow_ids() {
            for i in 0..=self.cutoff[a.0] {
                if i == self.cutoff[a.0] {
                    if let Some((root, _)) = &self.class[a.0] {
                        if *root != a {
                            continue;
                        }
                    }
                }
                index.insert((a, i), basis.len());
                basis.push(self.chain(a, i).expect("cutoffs were validated against Π"));
            }
        }
        self.basis = basis;
        self.chain_index = index;
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn pi(&self) -> &BTreeSet<(ArrowId, ArrowId)> {
        &self.pi
    }

    pub fn cutoff(&self, a: ArrowId) -> usize {
        self.cutoff[a.0]
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoff
    }

    pub fn idents(&self) -> &[SocleIdent] {
        &self.idents
    }

    pub fn next_arrow(&self, a: ArrowId) -> Option<ArrowId> {
        self.next[a.0]
    }

    pub fn prev_arrow(&self, a: ArrowId) -> Option<ArrowId> {
        self.prev[a.0]
    }

    /// `s(a)`: the number of predecessors that can be prepended to `a`.
    pub fn s(&self, a: ArrowId) -> usize {
        let bound = self.cutoff.iter().copied().max().unwrap_or(0) + 1;
        let mut j = 0;
        let mut cur = a;
        while j < bound {
            match self.prev[cur.0] {
                Some(c) if self.cutoff[c.0] > j => {
                    j += 1;
                    cur = c;
                }
                _ => break,
            }
        }
        j
    }

    /// `a` followed by `i` successors, ignoring the cutoff.
    fn chain(&self, a: ArrowId, i: usize) -> Option<Path> {
        let mut arrows = vec![a];
        let mut cur = a;
        for _ in 0..i {
            cur = self.next[cur.0]?;
            arrows.push(cur);
        }
        self.quiver.path_from_arrows(&arrows).ok()
    }

    /// `p_i(a)` for `-s(a) <= i <= t(a)`.
    pub fn p_chain(&self, a: ArrowId, i: i64) -> Option<Path> {
        if i >= 0 {
            let i = i as usize;
            if i > self.cutoff[a.0] {
                return None;
            }
            return self.chain(a, i);
        }
        let j = i.unsigned_abs() as usize;
        if j > self.s(a) {
            return None;
        }
        let mut arrows = vec![a];
        let mut cur = a;
        for _ in 0..j {
            cur = self.prev[cur.0]?;
            arrows.insert(0, cur);
        }
        self.quiver.path_from_arrows(&arrows).ok()
    }

    /// Basis labels: idempotents first, then the nonzero chains, one per identification class.
    pub fn basis(&self) -> &[Path] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Writes a path as a multiple of a basis label, or `None` when it lies in `I`.
    pub fn normal_form(&self, path: &Path) -> Option<(usize, Scalar)> {
        let Some(a) = path.first() else {
            return Some((path.source().0, self.field.one()));
        };
        let i = path.len() - 1;
        if i > self.cutoff[a.0] {
            return None;
        }
        let arrows = path.arrows();
        if arrows.windows(2).any(|w| self.next[w[0].0] != Some(w[1])) {
            return None;
        }
        if i == self.cutoff[a.0] {
            if let Some((root, w)) = &self.class[a.0] {
                return Some((self.chain_index[&(*root, self.cutoff[root.0])], w.clone()));
            }
        }
        Some((self.chain_index[&(a, i)], self.field.one()))
    }

    pub fn mul_basis(&self, i: usize, j: usize) -> Option<(usize, Scalar)> {
        let p = self.basis[i].compose(&self.basis[j])?;
        self.normal_form(&p)
    }

    pub fn element_of_path(&self, path: &Path) -> Vector {
        let mut v = linalg::zero_vector(self.field, self.dim());
        if let Some((i, c)) = self.normal_form(path) {
            v[i] = c;
        }
        v
    }

    pub fn mul(&self, x: &Vector, y: &Vector) -> Vector {
        let mut out = linalg::zero_vector(self.field, self.dim());
        for i in linalg::support(x) {
            for j in linalg::support(y) {
                if let Some((k, c)) = self.mul_basis(i, j) {
                    out[k] += &(&(&x[i] * &y[j]) * &c);
                }
            }
        }
        out
    }

    /// `x · a` for an arrow `a`.
    pub fn mul_arrow(&self, x: &Vector, a: ArrowId) -> Vector {
        self.mul(x, &self.element_of_path(&Path::arrow(&self.quiver, a)))
    }

    /// Basis `[p_0(a), …, p_{t(a)}(a)]` of `U_a = aA`.
    pub fn uniserial_u(&self, a: ArrowId) -> Vec<Path> {
        (0..=self.cutoff[a.0]).filter_map(|i| self.chain(a, i)).collect()
    }

    pub fn uniserial_subspace(&self, a: ArrowId) -> Subspace {
        let rows: Vec<Vector> = self.uniserial_u(a).iter().map(|p| self.element_of_path(p)).collect();
        Subspace::spanned_by(self.field, self.dim(), rows)
    }

    /// Maximal nonzero paths starting at `v`, one per arrow out of `v`.
    pub fn maximal_paths_at(&self, v: VertexId) -> Vec<Path> {
        self.quiver
            .arrows_from(v)
            .filter_map(|a| self.chain(a, self.cutoff[a.0]))
            .collect()
    }

    /// Whether the maximal paths starting with `a` and `b` lie in one identification class.
    pub fn same_class(&self, a: ArrowId, b: ArrowId) -> bool {
        a == b
            || matches!((&self.class[a.0], &self.class[b.0]), (Some((x, _)), Some((y, _))) if x == y)
    }

    /// `M_a = w * M_root`, or `None` when the maximal path of `a` is not identified.
    pub fn class_weight(&self, a: ArrowId) -> Option<(ArrowId, Scalar)> {
        self.class[a.0].clone()
    }

    pub fn check_conditions(&self) -> ConditionReport {
        check_conditions(&self.quiver, &self.pi, Some(&self.cutoff))
    }

    pub fn special_cycles(&self) -> Option<SpecialCycleSet> {
        special_cycles_from_pairs(self.quiver.arrow_count(), &self.pi)
    }

    /// Same presentation with identification scalars replaced.
    pub fn with_idents(&self, idents: Vec<SocleIdent>) -> Result<Self> {
        SpecialPresentation::new(self.field, self.quiver.clone(), self.pi.clone(), self.cutoff.clone(), idents)
    }

    /// Arrows reversed, `Π` transposed, `t` replaced by `s`, identified paths reversed.
    pub fn opposite(&self) -> SpecialPresentation {
        let quiver = self.quiver.opposite();
        let pi: BTreeSet<_> = self.pi.iter().map(|&(a, b)| (b, a)).collect();
        let cutoff = self.quiver.arrow_ids().map(|a| self.s(a)).collect();
        let idents = self
            .idents
            .iter()
            .map(|id| SocleIdent {
                lhs: id.lhs.reversed(),
                rhs: id.rhs.reversed(),
                scalar: id.scalar.clone(),
            })
            .collect();
        SpecialPresentation::new(self.field, quiver, pi, cutoff, idents)
            .expect("the opposite of a valid presentation is valid")
    }

    /// Decomposes each `rad(e_v A)` into the `U_a` and checks the multiserial conditions,
    /// on both sides.
    pub fn multiserial_check(&self) -> MultiserialReport {
        let right = self.right_multiserial_witness();
        let left = self.opposite().right_multiserial_witness();
        let ok = right.iter().chain(&left).all(|w| w.ok);
        MultiserialReport { right, left, ok }
    }

    fn right_multiserial_witness(&self) -> Vec<VertexWitness> {
        self.quiver
            .vertex_ids()
            .map(|v| {
                let arrows: Vec<ArrowId> = self.quiver.arrows_from(v).collect();
                let spaces: Vec<Subspace> = arrows.iter().map(|&a| self.uniserial_subspace(a)).collect();
                let rad_rows: Vec<Vector> = self
                    .basis
                    .iter()
                    .filter(|p| !p.is_trivial() && p.source() == v)
                    .map(|p| self.element_of_path(p))
                    .collect();
                let rad = Subspace::spanned_by(self.field, self.dim(), rad_rows);
                let mut sum = Subspace::zero(self.field, self.dim());
                let mut ok = true;
                for (a, s) in arrows.iter().zip(&spaces) {
                    ok &= s.dim() == self.cutoff[a.0] + 1 && self.is_submodule(s);
                    sum = sum.sum(s);
                }
                ok &= sum == rad;
                let mut max_intersection = 0;
                for i in 0..spaces.len() {
                    for j in i + 1..spaces.len() {
                        let cap = spaces[i].intersection(&spaces[j]);
                        max_intersection = max_intersection.max(cap.dim());
                        ok &= cap.dim() <= 1 && self.is_submodule(&cap);
                    }
                }
                VertexWitness {
                    vertex: self.quiver.vertex_name(v).to_string(),
                    uniserials: arrows
                        .iter()
                        .zip(&spaces)
                        .map(|(&a, s)| (self.quiver.arrow_name(a).to_string(), s.dim()))
                        .collect(),
                    max_intersection,
                    ok,
                }
            })
            .collect()
    }

    /// Closed under right multiplication by every arrow.
    pub fn is_submodule(&self, s: &Subspace) -> bool {
        s.basis()
            .iter()
            .all(|x| self.quiver.arrow_ids().all(|a| s.contains(&self.mul_arrow(x, a))))
    }

    /// Human-readable listing of the arrows of each special cycle.
    pub fn describe_cycle(&self, cycle: &[ArrowId]) -> String {
        cycle.iter().map(|&a| self.quiver.arrow_name(a)).collect::<Vec<_>>().join("*")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VertexWitness {
    pub vertex: String,
    /// (arrow, dim U_a)
    pub uniserials: Vec<(String, usize)>,
    pub max_intersection: usize,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MultiserialReport {
    pub right: Vec<VertexWitness>,
    pub left: Vec<VertexWitness>,
    pub ok: bool,
}

/// Counts nonzero paths by brute-force enumeration of all arrow words, then
/// collapses identification classes. Independent of the chain tables above;
/// used as an oracle in tests.
pub fn enumerate_dimension(p: &SpecialPresentation) -> usize {
    let q = p.quiver();
    let max_len = p.cutoffs().iter().copied().max().map_or(0, |t| t + 1);
    let survives = |w: &[ArrowId]| {
        let a = w[0];
        w.len() <= p.cutoff(a) + 1 && w.windows(2).all(|x| p.pi().contains(&(x[0], x[1])))
    };
    let mut nonzero: BTreeMap<usize, Vec<Vec<ArrowId>>> = BTreeMap::new();
    let mut layer: Vec<Vec<ArrowId>> = q.arrow_ids().map(|a| vec![a]).collect();
    for len in 1..=max_len {
        let alive: Vec<Vec<ArrowId>> = layer.into_iter().filter(|w| survives(w)).collect();
        layer = alive
            .iter()
            .flat_map(|w| {
                let last = *w.last().unwrap();
                q.arrows_from(q.target(last)).map(move |b| {
                    let mut x = w.clone();
                    x.push(b);
                    x
                })
            })
            .collect();
        nonzero.insert(len, alive);
    }
    let words: Vec<Vec<ArrowId>> = nonzero.into_values().flatten().collect();
    // union the identified words
    let mut parent: HashMap<Vec<ArrowId>, Vec<ArrowId>> = words.iter().map(|w| (w.clone(), w.clone())).collect();
    fn find(parent: &mut HashMap<Vec<ArrowId>, Vec<ArrowId>>, w: &[ArrowId]) -> Vec<ArrowId> {
        let mut cur = w.to_vec();
        while parent[&cur] != cur {
            cur = parent[&cur].clone();
        }
        cur
    }
    for id in p.idents() {
        let (a, b) = (find(&mut parent, id.lhs.arrows()), find(&mut parent, id.rhs.arrows()));
        if a != b {
            parent.insert(a, b);
        }
    }
    let classes: BTreeSet<Vec<ArrowId>> = words.iter().map(|w| find(&mut parent, w)).collect();
    q.vertex_count() + classes.len()
}
