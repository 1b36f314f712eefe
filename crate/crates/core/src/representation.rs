//! Finite-dimensional right modules as quiver representations, and the
//! decomposition of their radical into uniserials meeting in zero or a simple.
//!
//! Elements live in the global space `⊕_v M_v`; arrow `a: u -> w` acts on row
//! vectors of `M_u` by its matrix.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result, Violation};
use crate::linalg::{self, left_kernel, Matrix, Subspace, Vector};
use crate::presentation::SpecialPresentation;
use crate::quiver::{ArrowId, Path, Quiver, VertexId};
use crate::scalar::{Field, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representation {
    field: Field,
    dims: Vec<usize>,
    offsets: Vec<usize>,
    ends: Vec<(VertexId, VertexId)>,
    maps: Vec<Matrix>,
}

impl Representation {
    pub fn new(field: Field, quiver: &Quiver, dims: Vec<usize>, maps: Vec<Matrix>) -> Result<Self> {
        if dims.len() != quiver.vertex_count() || maps.len() != quiver.arrow_count() {
            return Err(Error::invalid("representation does not match the quiver"));
        }
        for a in quiver.arrow_ids() {
            let m = &maps[a.0];
            let (u, w) = (quiver.source(a), quiver.target(a));
            if m.rows() != dims[u.0] || m.cols() != dims[w.0] || m.field() != field {
                return Err(Error::invalid(format!(
                    "map of {} must be {}x{} over {field}",
                    quiver.arrow_name(a),
                    dims[u.0],
                    dims[w.0]
                )));
            }
        }
        let mut offsets = Vec::with_capacity(dims.len());
        let mut total = 0;
        for d in &dims {
            offsets.push(total);
            total += d;
        }
        let ends = quiver.arrow_ids().map(|a| (quiver.source(a), quiver.target(a))).collect();
        Ok(Representation {
            field,
            dims,
            offsets,
            ends,
            maps,
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn maps(&self) -> &[Matrix] {
        &self.maps
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Global coordinates of `M_v`.
    pub fn block(&self, v: VertexId) -> std::ops::Range<usize> {
        self.offsets[v.0]..self.offsets[v.0] + self.dims[v.0]
    }

    pub fn vertex_of_coordinate(&self, i: usize) -> VertexId {
        VertexId((0..self.dims.len()).rev().find(|&v| self.offsets[v] <= i && self.dims[v] > 0).unwrap())
    }

    pub fn act_arrow(&self, x: &[Scalar], a: ArrowId) -> Vector {
        let (u, w) = self.ends[a.0];
        let mut out = linalg::zero_vector(self.field, self.total_dim());
        let part = self.maps[a.0].apply(&x[self.block(u)]);
        let start = self.offsets[w.0];
        out[start..start + part.len()].clone_from_slice(&part);
        out
    }

    pub fn act_path(&self, x: &[Scalar], path: &Path) -> Vector {
        let mut out = self.project(x, path.source());
        for &a in path.arrows() {
            out = self.act_arrow(&out, a);
        }
        out
    }

    /// `x e_v`.
    pub fn project(&self, x: &[Scalar], v: VertexId) -> Vector {
        let mut out = linalg::zero_vector(self.field, self.total_dim());
        for i in self.block(v) {
            out[i] = x[i].clone();
        }
        out
    }

    pub fn path_matrix(&self, path: &Path) -> Matrix {
        let mut m = Matrix::identity(self.field, self.dims[path.source().0]);
        for &a in path.arrows() {
            m = m.mul(&self.maps[a.0]);
        }
        m
    }

    /// Relations of the presentation that fail on this representation.
    pub fn validate(&self, p: &SpecialPresentation) -> Vec<Violation> {
        let q = p.quiver();
        let mut v = Vec::new();
        if self.dims.len() != q.vertex_count() || self.maps.len() != q.arrow_count() || self.field != p.field() {
            v.push(Violation::new("shape", "representation does not match the presentation"));
            return v;
        }
        for a in q.arrow_ids() {
            for b in q.arrows_from(q.target(a)) {
                if !p.pi().contains(&(a, b)) && !self.maps[a.0].mul(&self.maps[b.0]).is_zero() {
                    v.push(Violation::new(
                        "relation",
                        format!("{}*{} must act as zero", q.arrow_name(a), q.arrow_name(b)),
                    ));
                }
            }
            let t = p.cutoff(a);
            if let Some(path) = chain_past_cutoff(p, a, t) {
                if !self.path_matrix(&path).is_zero() {
                    v.push(Violation::new(
                        "relation",
                        format!("{} must act as zero", q.display_path(&path)),
                    ));
                }
            }
        }
        for id in p.idents() {
            let lhs = self.path_matrix(&id.lhs);
            let rhs = self.path_matrix(&id.rhs).scaled(&id.scalar);
            if lhs != rhs {
                v.push(Violation::new(
                    "relation",
                    format!(
                        "{} must act as ({}) * {}",
                        q.display_path(&id.lhs),
                        id.scalar,
                        q.display_path(&id.rhs)
                    ),
                ));
            }
        }
        v
    }

    pub fn check(&self, p: &SpecialPresentation) -> Result<()> {
        let v = self.validate(p);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(v))
        }
    }

    fn unit(&self, i: usize) -> Vector {
        linalg::unit_vector(self.field, self.total_dim(), i)
    }

    /// `S·J`: span of all arrow images of `S`.
    pub fn times_radical(&self, s: &Subspace) -> Subspace {
        let vectors = s
            .basis()
            .iter()
            .flat_map(|x| (0..self.maps.len()).map(move |a| self.act_arrow(x, ArrowId(a))))
            .collect::<Vec<_>>();
        Subspace::spanned_by(self.field, self.total_dim(), vectors)
    }

    pub fn whole(&self) -> Subspace {
        Subspace::full(self.field, self.total_dim())
    }

    pub fn radical(&self) -> Subspace {
        self.times_radical(&self.whole())
    }

    /// `rad^k(M)`.
    pub fn radical_power(&self, k: usize) -> Subspace {
        let mut s = self.whole();
        for _ in 0..k {
            s = self.times_radical(&s);
        }
        s
    }

    /// Joint kernel of all arrow maps.
    pub fn socle(&self) -> Subspace {
        let n = self.total_dim();
        let rows: Vec<Vector> = (0..n)
            .map(|i| {
                let e = self.unit(i);
                (0..self.maps.len()).flat_map(|a| self.act_arrow(&e, ArrowId(a))).collect()
            })
            .collect();
        let width = n * self.maps.len();
        let kernel = left_kernel(self.field, &rows, width);
        Subspace::spanned_by(self.field, n, kernel)
    }

    pub fn is_submodule(&self, s: &Subspace) -> bool {
        s.contains_space(&self.times_radical(s))
    }

    /// Smallest submodule containing `gens`.
    pub fn submodule_generated(&self, gens: &[Vector]) -> Subspace {
        let mut s = Subspace::zero(self.field, self.total_dim());
        let mut queue: Vec<Vector> = Vec::new();
        for g in gens {
            for v in 0..self.dims.len() {
                queue.push(self.project(g, VertexId(v)));
            }
        }
        while let Some(x) = queue.pop() {
            if s.insert(&x) {
                for a in 0..self.maps.len() {
                    queue.push(self.act_arrow(&x, ArrowId(a)));
                }
            }
        }
        s
    }

    /// The submodule `s` (a vertex-graded subspace) as a representation.
    pub fn restrict(&self, quiver: &Quiver, s: &Subspace) -> Result<Representation> {
        let by_vertex = self.graded_basis(s)?;
        let dims = by_vertex.iter().map(Vec::len).collect();
        let mut maps = Vec::new();
        for a in quiver.arrow_ids() {
            let (u, w) = self.ends[a.0];
            let target = Subspace::spanned_by(self.field, self.total_dim(), by_vertex[w.0].clone());
            let mut entries = Vec::new();
            for x in &by_vertex[u.0] {
                let y = self.act_arrow(x, a);
                entries.push(
                    target
                        .coordinates(&y)
                        .ok_or_else(|| Error::invalid("subspace is not a submodule"))?,
                );
            }
            maps.push(
                Matrix::from_rows(self.field, by_vertex[u.0].len(), by_vertex[w.0].len(), entries).unwrap(),
            );
        }
        Representation::new(self.field, quiver, dims, maps)
    }

    /// `M / s` for a vertex-graded submodule `s`; the quotient basis is the non-pivot columns.
    pub fn quotient(&self, quiver: &Quiver, s: &Subspace) -> Result<Representation> {
        self.graded_basis(s)?;
        if !self.is_submodule(s) {
            return Err(Error::invalid("subspace is not a submodule"));
        }
        let free: Vec<Vec<usize>> = (0..self.dims.len())
            .map(|v| {
                self.block(VertexId(v))
                    .filter(|i| !s.pivots().contains(i))
                    .collect()
            })
            .collect();
        let dims = free.iter().map(Vec::len).collect();
        let mut maps = Vec::new();
        for a in quiver.arrow_ids() {
            let (u, w) = self.ends[a.0];
            let entries = free[u.0]
                .iter()
                .map(|&i| {
                    let y = s.reduce(&self.act_arrow(&self.unit(i), a));
                    free[w.0].iter().map(|&j| y[j].clone()).collect()
                })
                .collect();
            maps.push(Matrix::from_rows(self.field, free[u.0].len(), free[w.0].len(), entries).unwrap());
        }
        Representation::new(self.field, quiver, dims, maps)
    }

    fn graded_basis(&self, s: &Subspace) -> Result<Vec<Vec<Vector>>> {
        let mut by_vertex = vec![Vec::new(); self.dims.len()];
        for x in s.basis() {
            let supp = linalg::support(x);
            let v = self.vertex_of_coordinate(supp[0]);
            if supp.iter().any(|&i| !self.block(v).contains(&i)) {
                return Err(Error::invalid("subspace is not vertex-graded"));
            }
            by_vertex[v.0].push(x.clone());
        }
        Ok(by_vertex)
    }

    pub fn direct_sum(&self, quiver: &Quiver, other: &Representation) -> Result<Representation> {
        let dims: Vec<usize> = self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect();
        let maps = quiver
            .arrow_ids()
            .map(|a| {
                let (x, y) = (&self.maps[a.0], &other.maps[a.0]);
                let mut m = Matrix::zeros(self.field, x.rows() + y.rows(), x.cols() + y.cols());
                for r in 0..x.rows() {
                    for c in 0..x.cols() {
                        m.set(r, c, x.get(r, c).clone());
                    }
                }
                for r in 0..y.rows() {
                    for c in 0..y.cols() {
                        m.set(x.rows() + r, x.cols() + c, y.get(r, c).clone());
                    }
                }
                m
            })
            .collect();
        Representation::new(self.field, quiver, dims, maps)
    }
}

/// `p_{t+1}(a)` when the successor chain continues past the cutoff.
fn chain_past_cutoff(p: &SpecialPresentation, a: ArrowId, t: usize) -> Option<Path> {
    let mut arrows = vec![a];
    let mut cur = a;
    for _ in 0..=t {
        cur = p.next_arrow(cur)?;
        arrows.push(cur);
    }
    p.quiver().path_from_arrows(&arrows).ok()
}

/// The indecomposable projective `e_v A`, indexed by the basis labels starting at `v`.
pub fn projective_rep(p: &SpecialPresentation, v: VertexId) -> (Representation, Vec<usize>) {
    let q = p.quiver();
    let labels: Vec<usize> = (0..p.dim()).filter(|&i| p.basis()[i].source() == v).collect();
    let mut per_vertex: Vec<Vec<usize>> = vec![Vec::new(); q.vertex_count()];
    for &i in &labels {
        per_vertex[p.basis()[i].target().0].push(i);
    }
    let local = |i: usize| -> usize {
        let w = p.basis()[i].target().0;
        per_vertex[w].iter().position(|&x| x == i).unwrap()
    };
    let maps = q
        .arrow_ids()
        .map(|a| {
            let (u, w) = (q.source(a), q.target(a));
            let mut m = Matrix::zeros(p.field(), per_vertex[u.0].len(), per_vertex[w.0].len());
            let (arrow_label, _) = p.normal_form(&Path::arrow(q, a)).expect("arrows are nonzero");
            for &i in &per_vertex[u.0] {
                if let Some((k, c)) = p.mul_basis(i, arrow_label) {
                    m.set(local(i), local(k), c);
                }
            }
            m
        })
        .collect();
    let dims = per_vertex.iter().map(Vec::len).collect();
    let order = per_vertex.into_iter().flatten().collect();
    let rep = Representation::new(p.field(), q, dims, maps).expect("shapes follow the labels");
    (rep, order)
}

/// Top generators and the radical generators `u_i = m_i a_i` built from them.
#[derive(Clone, Debug)]
pub struct Generators {
    pub tops: Vec<(Vector, VertexId)>,
    pub radical: Vec<(Vector, ArrowId)>,
}

pub fn uniform_generators(m: &Representation, quiver: &Quiver) -> Generators {
    let rad = m.radical();
    let mut span = rad.clone();
    let mut tops = Vec::new();
    for v in quiver.vertex_ids() {
        for i in m.block(v) {
            let e = m.unit(i);
            if span.insert(&e) {
                tops.push((e, v));
            }
        }
    }
    let mut span = m.times_radical(&rad);
    let mut radical = Vec::new();
    for (x, v) in &tops {
        for a in quiver.arrows_from(*v) {
            if span.insert(&m.act_arrow(x, a)) {
                radical.push((x.clone(), a));
            }
        }
    }
    Generators { tops, radical }
}

/// The chain `m p_0(a), m p_1(a), …` up to its last nonzero term, with the arrow at each step.
fn chain(m: &Representation, p: &SpecialPresentation, x: &[Scalar], a: ArrowId) -> (Vec<Vector>, Vec<ArrowId>) {
    let mut vecs = Vec::new();
    let mut arrows = Vec::new();
    let mut cur_arrow = a;
    let mut cur = m.act_arrow(x, a);
    loop {
        if linalg::is_zero_vector(&cur) {
            break;
        }
        vecs.push(cur.clone());
        arrows.push(cur_arrow);
        if arrows.len() > p.cutoff(a) {
            break;
        }
        match p.next_arrow(cur_arrow) {
            Some(b) => {
                cur = m.act_arrow(&cur, b);
                cur_arrow = b;
            }
            None => break,
        }
    }
    (vecs, arrows)
}

/// The uniserial submodule generated by `x a` for `x` uniform at the source of `a`.
pub fn cyclic_uniserial(m: &Representation, p: &SpecialPresentation, x: &[Scalar], a: ArrowId) -> Subspace {
    let (vecs, _) = chain(m, p, x, a);
    Subspace::spanned_by(m.field(), m.total_dim(), vecs)
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    /// `(m_i, a_i)` with `U_i = m_i a_i A`
    pub generators: Vec<(Vector, ArrowId)>,
    pub uniserials: Vec<Subspace>,
    /// Number of trimming steps taken.
    pub steps: usize,
    pub used_fallback: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionSummary {
    pub uniserial_dims: Vec<usize>,
    pub steps: usize,
    pub used_fallback: bool,
    pub verdict: bool,
}

struct Chains {
    gens: Vec<(Vector, ArrowId)>,
    vecs: Vec<Vec<Vector>>,
    arrows: Vec<Vec<ArrowId>>,
}

impl Chains {
    fn new(m: &Representation, p: &SpecialPresentation, gens: Vec<(Vector, ArrowId)>) -> Self {
        let mut c = Chains {
            vecs: Vec::new(),
            arrows: Vec::new(),
            gens: Vec::new(),
        };
        for (x, a) in gens {
            let (v, ar) = chain(m, p, &x, a);
            c.vecs.push(v);
            c.arrows.push(ar);
            c.gens.push((x, a));
        }
        c
    }

    fn len(&self, j: usize) -> usize {
        self.vecs[j].len()
    }

    fn coords(&self) -> Vec<(usize, usize)> {
        (0..self.vecs.len())
            .flat_map(|j| (0..self.len(j)).map(move |k| (j, k)))
            .collect()
    }

    fn height(&self, (j, k): (usize, usize)) -> usize {
        self.len(j) - 1 - k
    }

    fn subspaces(&self, field: Field, n: usize) -> Vec<Subspace> {
        self.vecs
            .iter()
            .map(|v| Subspace::spanned_by(field, n, v.clone()))
            .collect()
    }
}

/// Splits `rad(M)` into uniserial submodules with pairwise intersections zero or simple.
///
/// Generators are trimmed until the kernel of `⊕ U_i -> M` lies in the formal
/// socle. Each trim shortens one chain, so `Σ dim U_i` strictly decreases.
pub fn decompose_multiserial(p: &SpecialPresentation, m: &Representation) -> Result<Decomposition> {
    if !p.check_conditions().m {
        return Err(Error::Validation(vec![Violation::new("(M)", "presentation violates (M)")]));
    }
    m.check(p)?;
    let gens = uniform_generators(m, p.quiver()).radical;
    decompose_with_generators(p, m, gens)
}

/// Runs the trimming procedure from explicit radical generators `(m_i, a_i)`,
/// which must induce a basis of `rad(M)/rad²(M)`.
pub fn decompose_with_generators(
    p: &SpecialPresentation,
    m: &Representation,
    gens: Vec<(Vector, ArrowId)>,
) -> Result<Decomposition> {
    let field = m.field();
    let n = m.total_dim();
    let rad = m.radical();
    let rad2 = m.times_radical(&rad);
    let mut tops = rad2.clone();
    for (x, a) in &gens {
        if !tops.insert(&m.act_arrow(x, *a)) {
            return Err(Error::invalid("generators are not independent modulo rad^2"));
        }
    }
    if tops != rad {
        return Err(Error::invalid("generators do not span rad/rad^2"));
    }
    let mut chains = Chains::new(m, p, gens);
    let budget = chains.coords().len() + 1;
    let mut steps = 0;
    loop {
        let coords = chains.coords();
        let rows: Vec<Vector> = chains.vecs.iter().flatten().cloned().collect();
        let kernel = left_kernel(field, &rows, n);
        let offending = kernel
            .iter()
            .filter(|x| linalg::support(x).iter().any(|&i| chains.height(coords[i]) > 0))
            .min_by_key(|x| linalg::support(x).len());
        let Some(x) = offending else {
            break;
        };
        if steps == budget {
            return Err(Error::Checker("trimming did not terminate".into()));
        }
        steps += 1;
        trim(m, p, &mut chains, &coords, x)?;
        let sum = chains
            .subspaces(field, n)
            .iter()
            .fold(Subspace::zero(field, n), |acc, s| acc.sum(s));
        if sum != rad {
            return Err(Error::Checker("a trimming step changed the sum of the uniserials".into()));
        }
    }
    let uniserials = chains.subspaces(field, n);
    if check_multiserial(m, &uniserials).is_ok() {
        return Ok(Decomposition {
            generators: chains.gens,
            uniserials,
            steps,
            used_fallback: false,
        });
    }
    if n <= FALLBACK_DIM {
        if let Some(d) = exhaustive_decomposition(p, m) {
            return Ok(d);
        }
    }
    Err(Error::Checker(format!(
        "decomposition failed verification: {}",
        check_multiserial(m, &uniserials).unwrap_err()
    )))
}

/// One trimming step driven by a kernel element `x` with a term above the formal socle.
fn trim(
    m: &Representation,
    p: &SpecialPresentation,
    chains: &mut Chains,
    coords: &[(usize, usize)],
    x: &[Scalar],
) -> Result<()> {
    let field = m.field();
    let index = |c: (usize, usize)| coords.iter().position(|&d| d == c).unwrap();
    let (top_pos, h) = linalg::support(x)
        .into_iter()
        .map(|i| (i, chains.height(coords[i])))
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .unwrap();
    let (j0, k0) = coords[top_pos];
    // push the chosen term to height one along its own chain
    let mut z = x.to_vec();
    for step in 0..h - 1 {
        let c = chains.arrows[j0][k0 + 1 + step];
        let mut next = linalg::zero_vector(field, z.len());
        for i in linalg::support(&z) {
            let (j, k) = coords[i];
            if k + 1 < chains.len(j) && chains.arrows[j][k + 1] == c {
                next[index((j, k + 1))] = z[i].clone();
            }
        }
        z = next;
    }
    let b = chains.arrows[j0][chains.len(j0) - 1];
    let s_b: Vec<(usize, Scalar)> = (0..chains.vecs.len())
        .filter(|&i| chains.len(i) >= 2 && chains.arrows[i][chains.len(i) - 1] == b)
        .map(|i| (i, z[index((i, chains.len(i) - 2))].clone()))
        .filter(|(_, c)| !c.is_zero())
        .collect();
    if s_b.len() < 2 {
        return Err(Error::Checker("kernel element has a single surviving term".into()));
    }
    let label = |i: usize| -> Path {
        p.quiver()
            .path_from_arrows(&chains.arrows[i][..chains.len(i) - 1])
            .expect("chain arrows form a path")
    };
    let (j, zj) = s_b.iter().min_by_key(|(i, _)| (chains.len(*i), *i)).cloned().unwrap();
    let pj = label(j);
    let mut new_m = chains.gens[j].0.clone();
    for (i, zi) in &s_b {
        if *i == j {
            continue;
        }
        let qi = label(*i)
            .divide_left(&pj)
            .ok_or_else(|| Error::Checker("chain labels are not comparable".into()))?;
        let shifted = m.act_path(&chains.gens[*i].0, &qi);
        linalg::axpy(&mut new_m, &(zi / &zj), &shifted);
    }
    let a = chains.gens[j].1;
    let (v, ar) = chain(m, p, &new_m, a);
    if v.len() >= chains.len(j) {
        return Err(Error::Checker("trimming did not shorten the chain".into()));
    }
    chains.gens[j].0 = new_m;
    chains.vecs[j] = v;
    chains.arrows[j] = ar;
    Ok(())
}

/// Largest total dimension handled by the exhaustive search.
pub const FALLBACK_DIM: usize = 8;

/// Caps on generated candidates and on pairwise compatibility checks.
const CANDIDATE_BUDGET: usize = 100_000;
const FALLBACK_BUDGET: usize = 200_000;

/// Searches corrections `m_j + Σ c_y y` for a certified decomposition. Only
/// `m_j a_j` matters, so `y` runs over elements of `e_v M` whose products with
/// `a_j` are independent of each other and of `m_j a_j`; `c_y` runs over the
/// whole field when it is finite (an exhaustive search) and over small
/// fractions over `Q`. Candidates are deduplicated by the uniserial they
/// generate, then a backtracking search with forward checking picks one per
/// generator so that the tops stay independent modulo `rad²` and all pairwise
/// intersections are zero or simple.
pub fn exhaustive_decomposition(p: &SpecialPresentation, m: &Representation) -> Option<Decomposition> {
    let q = p.quiver();
    let gens = uniform_generators(m, q).radical;
    let rad = m.radical();
    let rad2 = m.times_radical(&rad);
    let field = m.field();
    let grid: Vec<Scalar> = match field.elements() {
        Some(all) => all.collect(),
        None => {
            let mut g = vec![field.zero()];
            for (a, b) in [(1, 1), (2, 1), (3, 1), (1, 2), (1, 3), (2, 3), (3, 2)] {
                g.push(field.from_fraction(a, b).unwrap());
                g.push(field.from_fraction(-a, b).unwrap());
            }
            g
        }
    };
    let mut work = 0;
    let mut candidates: Vec<Vec<Candidate>> = Vec::new();
    for (base, a) in &gens {
        let mut image = Subspace::spanned_by(field, m.total_dim(), [m.act_arrow(base, *a)]);
        let dirs: Vec<Vector> = m
            .block(q.source(*a))
            .map(|i| m.unit(i))
            .filter(|y| image.insert(&m.act_arrow(y, *a)))
            .collect();
        let total = u32::try_from(dirs.len()).ok().and_then(|k| grid.len().checked_pow(k))?;
        work += total;
        if work > CANDIDATE_BUDGET {
            return None;
        }
        let mut mine: Vec<Candidate> = Vec::new();
        for code in 0..total {
            let mut x = base.clone();
            let mut c = code;
            for y in &dirs {
                linalg::axpy(&mut x, &grid[c % grid.len()], y);
                c /= grid.len();
            }
            let top = m.act_arrow(&x, *a);
            if rad2.contains(&top) {
                continue;
            }
            let space = cyclic_uniserial(m, p, &x, *a);
            if !mine.iter().any(|c| c.space == space) {
                mine.push(Candidate { x, top, space });
            }
        }
        candidates.push(mine);
    }
    let mut search = Search {
        m,
        rad2: &rad2,
        candidates: &candidates,
        work: 0,
        cache: HashMap::new(),
    };
    let domains: Vec<Vec<usize>> = candidates.iter().map(|c| (0..c.len()).collect()).collect();
    let choice = search.assign(domains)?;
    let (generators, uniserials) = choice
        .iter()
        .enumerate()
        .map(|(j, &c)| ((candidates[j][c].x.clone(), gens[j].1), candidates[j][c].space.clone()))
        .unzip();
    Some(Decomposition {
        generators,
        uniserials,
        steps: 0,
        used_fallback: true,
    })
}

struct Candidate {
    x: Vector,
    top: Vector,
    space: Subspace,
}

struct Search<'a> {
    m: &'a Representation,
    rad2: &'a Subspace,
    candidates: &'a [Vec<Candidate>],
    work: usize,
    cache: HashMap<(usize, usize, usize, usize), bool>,
}

impl Search<'_> {
    fn compatible(&mut self, i: usize, ci: usize, j: usize, cj: usize) -> Option<bool> {
        let key = if i < j { (i, ci, j, cj) } else { (j, cj, i, ci) };
        if let Some(&ok) = self.cache.get(&key) {
            return Some(ok);
        }
        self.work += 1;
        if self.work > FALLBACK_BUDGET {
            return None;
        }
        let (x, y) = (&self.candidates[i][ci], &self.candidates[j][cj]);
        let mut tops = self.rad2.clone();
        let cap = x.space.intersection(&y.space);
        let ok = tops.insert(&x.top) && tops.insert(&y.top) && cap.dim() <= 1 && self.m.is_submodule(&cap);
        self.cache.insert(key, ok);
        Some(ok)
    }

    /// Assigns the generator with the smallest remaining domain first; `None`
    /// when no assignment exists or the budget runs out.
    fn assign(&mut self, domains: Vec<Vec<usize>>) -> Option<Vec<usize>> {
        let open = (0..domains.len()).filter(|&j| domains[j].len() > 1).min_by_key(|&j| domains[j].len());
        let Some(j) = open else {
            let choice: Vec<usize> = domains.iter().map(|d| d.first().copied()).collect::<Option<_>>()?;
            for i in 0..choice.len() {
                for k in i + 1..choice.len() {
                    if !self.compatible(i, choice[i], k, choice[k])? {
                        return None;
                    }
                }
            }
            let mut tops = self.rad2.clone();
            let independent = choice
                .iter()
                .enumerate()
                .all(|(j, &c)| tops.insert(&self.candidates[j][c].top));
            return independent.then_some(choice);
        };
        for &c in &domains[j] {
            let mut next = domains.clone();
            next[j] = vec![c];
            let mut dead = false;
            for (k, dom) in next.iter_mut().enumerate() {
                if k == j {
                    continue;
                }
                let mut kept = Vec::with_capacity(dom.len());
                for &d in dom.iter() {
                    if self.compatible(j, c, k, d)? {
                        kept.push(d);
                    }
                }
                *dom = kept;
                if dom.is_empty() {
                    dead = true;
                    break;
                }
            }
            if !dead {
                if let Some(found) = self.assign(next) {
                    return Some(found);
                }
            }
            if self.work > FALLBACK_BUDGET {
                return None;
            }
        }
        None
    }
}

/// Each space is a uniserial submodule, they sum to `rad(M)`, and pairwise
/// intersections are zero or simple submodules.
pub fn check_multiserial(m: &Representation, spaces: &[Subspace]) -> std::result::Result<(), String> {
    let n = m.total_dim();
    for (i, s) in spaces.iter().enumerate() {
        if !m.is_submodule(s) {
            return Err(format!("U_{} is not a submodule", i + 1));
        }
        let mut cur = s.clone();
        while !cur.is_zero() {
            let next = m.times_radical(&cur);
            if cur.dim() - next.dim() != 1 {
                return Err(format!("U_{} is not uniserial", i + 1));
            }
            cur = next;
        }
    }
    let sum = spaces.iter().fold(Subspace::zero(m.field(), n), |a, s| a.sum(s));
    if sum != m.radical() {
        return Err("the uniserials do not sum to the radical".into());
    }
    for i in 0..spaces.len() {
        for j in i + 1..spaces.len() {
            let cap = spaces[i].intersection(&spaces[j]);
            if cap.dim() > 1 || !m.is_submodule(&cap) {
                return Err(format!("U_{} and U_{} meet in dimension {}", i + 1, j + 1, cap.dim()));
            }
        }
    }
    Ok(())
}

pub fn verify_multiserial(m: &Representation, spaces: &[Subspace]) -> bool {
    check_multiserial(m, spaces).is_ok()
}
