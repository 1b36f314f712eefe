#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;

use mskit::brauer::{BrauerConfiguration, RelationSet};
use mskit::format;
use mskit::linalg::Subspace;
use mskit::presentation::SpecialPresentation;
use mskit::quiver::{ArrowId, Path, Quiver};
use mskit::representation::Representation;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

pub fn cfg_ex() -> BrauerConfiguration {
    format::parse_config(&read_fixture("cfg_ex.bcfg")).unwrap()
}

pub fn presentation(text: &str) -> SpecialPresentation {
    format::parse_presentation(text).unwrap()
}

pub fn truncated_polynomial() -> SpecialPresentation {
    presentation(&read_fixture("ka3.qpres"))
}

pub fn exterior() -> SpecialPresentation {
    presentation("vertex v\narrow x: v -> v\narrow y: v -> v\npi x y\npi y x\ncutoff x = 1\ncutoff y = 1\nident x*y = 1 y*x\n")
}

/// Arrow of the running example by its letter name: `a2` is the second arrow of vertex 1, `d` the arrow of vertex 4.
pub fn ex_arrow(q: &Quiver, name: &str) -> ArrowId {
    let (letter, r) = name.split_at(1);
    let alpha = (letter.as_bytes()[0] - b'a' + 1) as usize;
    let r = if r.is_empty() { "1" } else { r };
    q.arrow_by_name(&format!("{alpha}_{r}")).unwrap_or_else(|| panic!("no arrow {name}"))
}

/// `a1*a2*b1` style words in the running example's letter names.
pub fn ex_path(q: &Quiver, word: &str) -> Path {
    let arrows: Vec<ArrowId> = word.split('*').map(|n| ex_arrow(q, n)).collect();
    q.path_from_arrows(&arrows).unwrap()
}

/// Letter name of a running-example arrow (inverse of `ex_arrow`).
pub fn ex_name(q: &Quiver, a: ArrowId) -> String {
    let (alpha, r) = q.arrow_name(a).split_once('_').unwrap();
    let letter = (b'a' + alpha.parse::<u8>().unwrap() - 1) as char;
    if letter == 'd' {
        "d".into()
    } else {
        format!("{letter}{r}")
    }
}

/// Closed-form dimension of a configuration algebra: two per polygon plus
/// `val(α)(val(α)μ(α) - 1)` per nontruncated vertex.
pub fn closed_form_dimension(cfg: &BrauerConfiguration) -> usize {
    2 * cfg.polygons.len()
        + (0..cfg.vertex_count())
            .filter(|&a| !cfg.is_truncated(a))
            .map(|a| {
                let v = cfg.val(a);
                v * (v * cfg.mu[a] as usize - 1)
            })
            .sum::<usize>()
}

/// Dimension of `KQ/I` for `I` generated by the given monomials and unit
/// binomials, computed on words up to length `max_len`: words are merged along
/// binomial substitutions, and a class is zero as soon as one member contains a
/// monomial or would exceed `max_len`. Panics if some word of length
/// `max_len` survives, since then the cut-off is too small.
pub fn relation_dimension(q: &Quiver, monomials: &[Vec<ArrowId>], binomials: &[(Vec<ArrowId>, Vec<ArrowId>)], max_len: usize) -> usize {
    let mut words: Vec<Vec<ArrowId>> = q.arrow_ids().map(|a| vec![a]).collect();
    let mut start = 0;
    for _ in 1..max_len {
        let end = words.len();
        for i in start..end {
            let w = words[i].clone();
            for b in q.arrows_from(q.target(*w.last().unwrap())) {
                let mut x = w.clone();
                x.push(b);
                words.push(x);
            }
        }
        start = end;
    }
    let index: HashMap<Vec<ArrowId>, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    let contains = |w: &[ArrowId], sub: &[ArrowId]| sub.len() <= w.len() && w.windows(sub.len()).any(|x| x == sub);
    let mut parent: Vec<usize> = (0..words.len()).collect();
    let mut zero: Vec<bool> = words.iter().map(|w| monomials.iter().any(|m| contains(w, m))).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for (i, w) in words.iter().enumerate() {
        for (x, y) in binomials.iter().flat_map(|(x, y)| [(x, y), (y, x)]) {
            if x.len() > w.len() {
                continue;
            }
            for k in 0..=w.len() - x.len() {
                if &w[k..k + x.len()] != x.as_slice() {
                    continue;
                }
                let mut v = w[..k].to_vec();
                v.extend_from_slice(y);
                v.extend_from_slice(&w[k + x.len()..]);
                match index.get(&v) {
                    Some(&j) => {
                        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                        parent[ri] = rj;
                    }
                    None => zero[i] = true,
                }
            }
        }
    }
    let mut class_zero: BTreeMap<usize, bool> = BTreeMap::new();
    for i in 0..words.len() {
        let r = find(&mut parent, i);
        *class_zero.entry(r).or_insert(false) |= zero[i];
    }
    for (i, w) in words.iter().enumerate() {
        if w.len() == max_len {
            let r = find(&mut parent, i);
            assert!(class_zero[&r], "word of length {max_len} survives; raise the cut-off");
        }
    }
    q.vertex_count() + class_zero.values().filter(|z| !**z).count()
}

pub fn relation_dimension_of(q: &Quiver, rel: &RelationSet, max_len: usize) -> usize {
    let monomials: Vec<Vec<ArrowId>> = rel
        .type_two
        .iter()
        .map(|p| p.arrows().to_vec())
        .chain(rel.type_three.iter().map(|&(a, b)| vec![a, b]))
        .collect();
    let binomials: Vec<(Vec<ArrowId>, Vec<ArrowId>)> = rel
        .type_one
        .iter()
        .map(|(x, y)| (x.arrows().to_vec(), y.arrows().to_vec()))
        .collect();
    relation_dimension(q, &monomials, &binomials, max_len)
}

/// Dimension of `e_v A`: idempotent plus the surviving words starting at `v`,
/// with identified words counted once. Works straight from `Π`, cutoffs and identifications.
pub fn projective_dimension(p: &SpecialPresentation, v: mskit::quiver::VertexId) -> usize {
    let q = p.quiver();
    let mut words: Vec<Vec<ArrowId>> = Vec::new();
    let mut stack: Vec<Vec<ArrowId>> = q.arrows_from(v).map(|a| vec![a]).collect();
    while let Some(w) = stack.pop() {
        if w.len() > p.cutoff(w[0]) + 1 {
            continue;
        }
        for b in q.arrows_from(q.target(*w.last().unwrap())) {
            if p.pi().contains(&(*w.last().unwrap(), b)) {
                let mut x = w.clone();
                x.push(b);
                stack.push(x);
            }
        }
        words.push(w);
    }
    let mut parent: HashMap<Vec<ArrowId>, Vec<ArrowId>> = words.iter().map(|w| (w.clone(), w.clone())).collect();
    let root = |parent: &HashMap<Vec<ArrowId>, Vec<ArrowId>>, w: &[ArrowId]| {
        let mut cur = w.to_vec();
        while parent[&cur] != cur {
            cur = parent[&cur].clone();
        }
        cur
    };
    let mut merged = 0;
    for id in p.idents().iter().filter(|id| id.lhs.source() == v) {
        let (x, y) = (root(&parent, id.lhs.arrows()), root(&parent, id.rhs.arrows()));
        if x != y {
            parent.insert(x, y);
            merged += 1;
        }
    }
    1 + words.len() - merged
}

/// Independent multiserial certificate: each space is a submodule with simple
/// radical layers, pairwise intersections have dimension at most one, and the
/// spaces add up to `rad M`.
pub fn oracle_multiserial(m: &Representation, q: &Quiver, spaces: &[Subspace]) -> bool {
    let field = m.field();
    let n = m.total_dim();
    let act = |s: &Subspace| -> Subspace {
        let images = s.basis().iter().flat_map(|x| q.arrow_ids().map(move |a| m.act_arrow(x, a)));
        Subspace::spanned_by(field, n, images)
    };
    let mut total = Subspace::zero(field, n);
    for s in spaces {
        let mut cur = s.clone();
        if !s.contains_space(&act(s)) {
            return false;
        }
        while !cur.is_zero() {
            let next = act(&cur);
            if cur.dim() - next.dim() > 1 {
                return false;
            }
            cur = next;
        }
        total = total.sum(s);
    }
    for i in 0..spaces.len() {
        for j in i + 1..spaces.len() {
            if spaces[i].intersection(&spaces[j]).dim() > 1 {
                return false;
            }
        }
    }
    total == act(&Subspace::full(field, n))
}
