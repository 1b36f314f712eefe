//! Line-oriented text formats (`.bcfg`, `.qpres`, `.qrep`, `.gram`) plus JSON
//! and Graphviz export.
//!
//! Blank lines and lines starting with `#` are ignored everywhere.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::brauer::{BrauerConfiguration, Occurrence, Polygon};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::presentation::{SocleIdent, SpecialPresentation};
use crate::quiver::{ArrowId, Quiver};
use crate::radcube::GramSpec;
use crate::representation::Representation;
use crate::scalar::{Field, Scalar};

pub const SCHEMA: &str = "mskit/1";

fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn keyword(line: &str) -> (&str, &str) {
    match line.split_once(char::is_whitespace) {
        Some((k, rest)) => (k, rest.trim()),
        None => (line, ""),
    }
}

fn assignment(n: usize, rest: &str) -> Result<(&str, &str)> {
    rest.split_once('=')
        .map(|(l, r)| (l.trim(), r.trim()))
        .filter(|(l, r)| !l.is_empty() && !r.is_empty())
        .ok_or_else(|| Error::parse(n, "expected `<name> = <value>`"))
}

fn parse_int<T: std::str::FromStr>(n: usize, s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::parse(n, format!("expected an integer, got `{s}`")))
}

// ---------------------------------------------------------------- .bcfg

pub fn parse_config(text: &str) -> Result<BrauerConfiguration> {
    let mut vertices: Vec<String> = Vec::new();
    let mut polygons: Vec<Polygon> = Vec::new();
    let mut mu: BTreeMap<usize, u32> = BTreeMap::new();
    let mut orders: BTreeMap<usize, Vec<(usize, String, usize)>> = BTreeMap::new();
    let vertex = |vertices: &[String], n: usize, name: &str| {
        vertices
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::parse(n, format!("unknown vertex `{name}`")))
    };
    for (n, line) in lines(text) {
        match keyword(line) {
            ("vertex", rest) => {
                for name in rest.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()) {
                    if vertices.iter().any(|v| v == name) {
                        return Err(Error::parse(n, format!("vertex `{name}` declared twice")));
                    }
                    vertices.push(name.to_string());
                }
            }
            ("polygon", rest) => {
                let (name, body) = assignment(n, rest)?;
                if polygons.iter().any(|p| p.name == name) {
                    return Err(Error::parse(n, format!("polygon `{name}` declared twice")));
                }
                let body = body
                    .strip_prefix('[')
                    .and_then(|b| b.strip_suffix(']'))
                    .ok_or_else(|| Error::parse(n, "polygon members must be written `[v, w, ...]`"))?;
                let members = body
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|m| vertex(&vertices, n, m))
                    .collect::<Result<Vec<_>>>()?;
                polygons.push(Polygon { name: name.to_string(), members });
            }
            ("mu", rest) => {
                let (name, value) = assignment(n, rest)?;
                let v = vertex(&vertices, n, name)?;
                mu.insert(v, parse_int(n, value)?);
            }
            ("order", rest) => {
                let (name, body) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::parse(n, "expected `order <vertex>: <P>#<k> ...`"))?;
                let v = vertex(&vertices, n, name.trim())?;
                let mut seq = Vec::new();
                for tok in body.split_whitespace() {
                    let (p, k) = match tok.split_once('#') {
                        Some((p, k)) => (p, parse_int::<usize>(n, k)?),
                        None => (tok, 1),
                    };
                    if k == 0 {
                        return Err(Error::parse(n, "occurrences are numbered from 1"));
                    }
                    seq.push((n, p.to_string(), k - 1));
                }
                if orders.insert(v, seq).is_some() {
                    return Err(Error::parse(n, format!("second order for vertex `{}`", name.trim())));
                }
            }
            (k, _) => return Err(Error::parse(n, format!("unknown directive `{k}`"))),
        }
    }
    let mut cfg = BrauerConfiguration {
        mu: (0..vertices.len()).map(|v| mu.get(&v).copied().unwrap_or(1)).collect(),
        orientation: vec![Vec::new(); vertices.len()],
        vertices,
        polygons,
    };
    for (v, seq) in orders {
        for (n, p, occ) in seq {
            let polygon = cfg
                .polygon_by_name(&p)
                .ok_or_else(|| Error::parse(n, format!("unknown polygon `{p}`")))?;
            cfg.orientation[v].push(Occurrence { polygon, occ });
        }
    }
    // a single occurrence admits only one cyclic order
    for v in 0..cfg.vertex_count() {
        if cfg.orientation[v].is_empty() && !cfg.is_truncated(v) {
            let occs = cfg.occurrences(v);
            if occs.len() == 1 {
                cfg.orientation[v] = occs;
            }
        }
    }
    Ok(cfg)
}

pub fn print_config(cfg: &BrauerConfiguration) -> String {
    let mut s = String::new();
    writeln!(s, "vertex {}", cfg.vertices.join(" ")).unwrap();
    for p in &cfg.polygons {
        let members: Vec<&str> = p.members.iter().map(|&m| cfg.vertices[m].as_str()).collect();
        writeln!(s, "polygon {} = [{}]", p.name, members.join(", ")).unwrap();
    }
    for (v, &m) in cfg.mu.iter().enumerate() {
        if m != 1 {
            writeln!(s, "mu {} = {m}", cfg.vertices[v]).unwrap();
        }
    }
    for v in 0..cfg.vertex_count() {
        if cfg.is_truncated(v) || cfg.orientation[v].is_empty() {
            continue;
        }
        let seq: Vec<String> = cfg.orientation[v]
            .iter()
            .map(|o| format!("{}#{}", cfg.polygons[o.polygon].name, o.occ + 1))
            .collect();
        writeln!(s, "order {}: {}", cfg.vertices[v], seq.join(" ")).unwrap();
    }
    s
}

// ---------------------------------------------------------------- quivers

/// Shared `field` / `vertex` / `arrow` handling. Returns false for other directives.
#[derive(Default)]
struct QuiverBuilder {
    field: Option<Field>,
    quiver: Quiver,
}

impl QuiverBuilder {
    fn field(&self) -> Field {
        self.field.unwrap_or(Field::Rationals)
    }

    fn accept(&mut self, n: usize, key: &str, rest: &str) -> Result<bool> {
        match key {
            "field" => {
                if self.field.is_some() {
                    return Err(Error::parse(n, "field declared twice"));
                }
                self.field = Some(rest.parse().map_err(|e: String| Error::parse(n, e))?);
            }
            "vertex" => {
                for name in rest.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()) {
                    self.quiver.add_vertex(name).map_err(|e| Error::parse(n, e.to_string()))?;
                }
            }
            "arrow" => {
                let (name, ends) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::parse(n, "expected `arrow <name>: <u> -> <v>`"))?;
                let (u, v) = ends
                    .split_once("->")
                    .ok_or_else(|| Error::parse(n, "expected `arrow <name>: <u> -> <v>`"))?;
                let u = self.vertex(n, u.trim())?;
                let v = self.vertex(n, v.trim())?;
                self.quiver.add_arrow(name.trim(), u, v).map_err(|e| Error::parse(n, e.to_string()))?;
            }
            _ => return Ok(false),
        }
        Ok(true)
    }

    fn vertex(&self, n: usize, name: &str) -> Result<crate::quiver::VertexId> {
        self.quiver
            .vertex_by_name(name)
            .ok_or_else(|| Error::parse(n, format!("unknown vertex `{name}`")))
    }

    fn arrow(&self, n: usize, name: &str) -> Result<ArrowId> {
        self.quiver
            .arrow_by_name(name)
            .ok_or_else(|| Error::parse(n, format!("unknown arrow `{name}`")))
    }

    fn scalar(&self, n: usize, text: &str) -> Result<Scalar> {
        self.field().parse_scalar(text).map_err(|e| Error::parse(n, e))
    }
}

fn print_quiver(s: &mut String, field: Field, q: &Quiver) {
    writeln!(s, "field {field}").unwrap();
    let names: Vec<&str> = q.vertex_ids().map(|v| q.vertex_name(v)).collect();
    writeln!(s, "vertex {}", names.join(" ")).unwrap();
    for a in q.arrow_ids() {
        writeln!(
            s,
            "arrow {}: {} -> {}",
            q.arrow_name(a),
            q.vertex_name(q.source(a)),
            q.vertex_name(q.target(a))
        )
        .unwrap();
    }
}

// ---------------------------------------------------------------- .qpres

/// Parses a presentation. An arrow without a `cutoff` line gets 1 if it has a
/// successor in `pi` and 0 otherwise.
pub fn parse_presentation(text: &str) -> Result<SpecialPresentation> {
    let mut b = QuiverBuilder::default();
    let mut pi = Vec::new();
    let mut cutoff: BTreeMap<ArrowId, usize> = BTreeMap::new();
    let mut idents = Vec::new();
    for (n, line) in lines(text) {
        let (key, rest) = keyword(line);
        if b.accept(n, key, rest)? {
            continue;
        }
        match key {
            "pi" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                let [x, y] = parts[..] else {
                    return Err(Error::parse(n, "expected `pi <arrow> <arrow>`"));
                };
                pi.push((b.arrow(n, x)?, b.arrow(n, y)?));
            }
            "cutoff" => {
                let (a, t) = assignment(n, rest)?;
                cutoff.insert(b.arrow(n, a)?, parse_int(n, t)?);
            }
            "ident" => {
                let (lhs, rhs) = assignment(n, rest)?;
                let parts: Vec<&str> = rhs.split_whitespace().collect();
                let (scalar, path) = match parts[..] {
                    [p] => (b.field().one(), p),
                    [c, p] => (b.scalar(n, c)?, p),
                    _ => return Err(Error::parse(n, "expected `ident <path> = <scalar> <path>`")),
                };
                let lhs = b.quiver.parse_path(lhs).map_err(|e| Error::parse(n, e.to_string()))?;
                let rhs = b.quiver.parse_path(path).map_err(|e| Error::parse(n, e.to_string()))?;
                idents.push(SocleIdent { lhs, rhs, scalar });
            }
            k => return Err(Error::parse(n, format!("unknown directive `{k}`"))),
        }
    }
    let q = b.quiver;
    let cutoffs = q
        .arrow_ids()
        .map(|a| {
            cutoff
                .get(&a)
                .copied()
                .unwrap_or_else(|| usize::from(pi.iter().any(|&(x, _)| x == a)))
        })
        .collect();
    SpecialPresentation::new(b.field.unwrap_or(Field::Rationals), q, pi, cutoffs, idents)
}

pub fn print_presentation(p: &SpecialPresentation) -> String {
    let q = p.quiver();
    let mut s = String::new();
    print_quiver(&mut s, p.field(), q);
    for &(a, b) in p.pi() {
        writeln!(s, "pi {} {}", q.arrow_name(a), q.arrow_name(b)).unwrap();
    }
    for a in q.arrow_ids() {
        writeln!(s, "cutoff {} = {}", q.arrow_name(a), p.cutoff(a)).unwrap();
    }
    for id in p.idents() {
        writeln!(
            s,
            "ident {} = {} {}",
            q.display_path(&id.lhs),
            id.scalar,
            q.display_path(&id.rhs)
        )
        .unwrap();
    }
    s
}

// ---------------------------------------------------------------- .qrep

fn parse_matrix(n: usize, field: Field, text: &str, rows: usize, cols: usize) -> Result<Matrix> {
    let body = text
        .strip_prefix('[')
        .and_then(|b| b.strip_suffix(']'))
        .ok_or_else(|| Error::parse(n, "matrices are written `[r r; r r]`"))?;
    let mut entries = Vec::new();
    for row in body.split(';') {
        let row: Vec<&str> = row.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()).collect();
        if row.is_empty() {
            continue;
        }
        entries.push(
            row.into_iter()
                .map(|e| field.parse_scalar(e).map_err(|m| Error::parse(n, m)))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    if rows == 0 || cols == 0 {
        if !entries.is_empty() {
            return Err(Error::parse(n, format!("expected an empty {rows}x{cols} matrix")));
        }
        return Ok(Matrix::zeros(field, rows, cols));
    }
    Matrix::from_rows(field, rows, cols, entries)
        .ok_or_else(|| Error::parse(n, format!("expected a {rows}x{cols} matrix")))
}

/// Parses a representation of `p`'s quiver. Arrows without a `map` act by zero.
pub fn parse_representation(text: &str, p: &SpecialPresentation) -> Result<Representation> {
    let q = p.quiver();
    let field = p.field();
    let mut dims = vec![0usize; q.vertex_count()];
    let mut maps: BTreeMap<ArrowId, (usize, String)> = BTreeMap::new();
    for (n, line) in lines(text) {
        match keyword(line) {
            ("field", rest) => {
                let f: Field = rest.parse().map_err(|e: String| Error::parse(n, e))?;
                if f != field {
                    return Err(Error::parse(n, format!("representation over {f} but presentation over {field}")));
                }
            }
            ("dim", rest) => {
                let (v, d) = assignment(n, rest)?;
                let v = q.vertex_by_name(v).ok_or_else(|| Error::parse(n, format!("unknown vertex `{v}`")))?;
                dims[v.0] = parse_int(n, d)?;
            }
            ("map", rest) => {
                let (a, m) = assignment(n, rest)?;
                let a = q.arrow_by_name(a).ok_or_else(|| Error::parse(n, format!("unknown arrow `{a}`")))?;
                maps.insert(a, (n, m.to_string()));
            }
            (k, _) => return Err(Error::parse(n, format!("unknown directive `{k}`"))),
        }
    }
    let maps = q
        .arrow_ids()
        .map(|a| {
            let (r, c) = (dims[q.source(a).0], dims[q.target(a).0]);
            match maps.get(&a) {
                Some((n, text)) => parse_matrix(*n, field, text, r, c),
                None => Ok(Matrix::zeros(field, r, c)),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Representation::new(field, q, dims, maps)
}

fn print_matrix(m: &Matrix) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|r| m.row(r).iter().map(ToString::to_string).collect::<Vec<_>>().join(" "))
        .collect();
    format!("[{}]", rows.join("; "))
}

pub fn print_representation(m: &Representation, q: &Quiver) -> String {
    let mut s = String::new();
    writeln!(s, "field {}", m.field()).unwrap();
    for v in q.vertex_ids() {
        writeln!(s, "dim {} = {}", q.vertex_name(v), m.dims()[v.0]).unwrap();
    }
    for a in q.arrow_ids() {
        let map = &m.maps()[a.0];
        if map.rows() > 0 && map.cols() > 0 && !map.is_zero() {
            writeln!(s, "map {} = {}", q.arrow_name(a), print_matrix(map)).unwrap();
        }
    }
    s
}

// ---------------------------------------------------------------- .gram

pub fn parse_gram(text: &str) -> Result<GramSpec> {
    let mut b = QuiverBuilder::default();
    let mut entries = Vec::new();
    for (n, line) in lines(text) {
        let (key, rest) = keyword(line);
        if b.accept(n, key, rest)? {
            continue;
        }
        match key {
            "gamma" => {
                let (pair, value) = assignment(n, rest)?;
                let parts: Vec<&str> = pair.split_whitespace().collect();
                let [x, y] = parts[..] else {
                    return Err(Error::parse(n, "expected `gamma <arrow> <arrow> = <scalar>`"));
                };
                entries.push((n, b.arrow(n, x)?, b.arrow(n, y)?, b.scalar(n, value)?));
            }
            k => return Err(Error::parse(n, format!("unknown directive `{k}`"))),
        }
    }
    let mut g = GramSpec::new(b.field(), b.quiver);
    for (n, x, y, v) in entries {
        if g.gamma.contains_key(&(x, y)) {
            return Err(Error::parse(n, "gamma entry given twice"));
        }
        g.set(x, y, v);
    }
    Ok(g)
}

pub fn print_gram(g: &GramSpec) -> String {
    let mut s = String::new();
    print_quiver(&mut s, g.field, &g.quiver);
    for (&(a, b), v) in &g.gamma {
        if !v.is_zero() {
            writeln!(s, "gamma {} {} = {v}", g.quiver.arrow_name(a), g.quiver.arrow_name(b)).unwrap();
        }
    }
    s
}

// ---------------------------------------------------------------- JSON / DOT

pub fn quiver_json(q: &Quiver) -> Value {
    json!({
        "vertices": q.vertex_ids().map(|v| q.vertex_name(v)).collect::<Vec<_>>(),
        "arrows": q.arrow_ids().map(|a| json!({
            "name": q.arrow_name(a),
            "source": q.vertex_name(q.source(a)),
            "target": q.vertex_name(q.target(a)),
        })).collect::<Vec<_>>(),
    })
}

pub fn config_json(cfg: &BrauerConfiguration) -> Value {
    json!({
        "schema": SCHEMA,
        "kind": "configuration",
        "vertices": cfg.vertices,
        "polygons": cfg.polygons.iter().map(|p| json!({
            "name": p.name,
            "members": p.members.iter().map(|&m| &cfg.vertices[m]).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "mu": cfg.vertices.iter().zip(&cfg.mu).map(|(v, m)| (v.clone(), json!(m))).collect::<serde_json::Map<_, _>>(),
        "orientation": (0..cfg.vertex_count()).filter(|&v| !cfg.is_truncated(v)).map(|v| (
            cfg.vertices[v].clone(),
            json!(cfg.orientation[v].iter().map(|o| json!({
                "polygon": cfg.polygons[o.polygon].name,
                "occurrence": o.occ + 1,
            })).collect::<Vec<_>>()),
        )).collect::<serde_json::Map<_, _>>(),
    })
}

pub fn presentation_json(p: &SpecialPresentation) -> Value {
    let q = p.quiver();
    json!({
        "schema": SCHEMA,
        "kind": "presentation",
        "field": p.field().to_string(),
        "quiver": quiver_json(q),
        "pi": p.pi().iter().map(|&(a, b)| [q.arrow_name(a), q.arrow_name(b)]).collect::<Vec<_>>(),
        "cutoff": q.arrow_ids().map(|a| (q.arrow_name(a).to_string(), json!(p.cutoff(a)))).collect::<serde_json::Map<_, _>>(),
        "idents": p.idents().iter().map(|i| json!({
            "lhs": q.display_path(&i.lhs).to_string(),
            "rhs": q.display_path(&i.rhs).to_string(),
            "scalar": i.scalar,
        })).collect::<Vec<_>>(),
        "dimension": p.dim(),
        "basis": p.basis().iter().map(|b| q.display_path(b).to_string()).collect::<Vec<_>>(),
    })
}

fn matrix_json(m: &Matrix) -> Value {
    json!((0..m.rows()).map(|r| m.row(r).to_vec()).collect::<Vec<_>>())
}

pub fn representation_json(m: &Representation, q: &Quiver) -> Value {
    json!({
        "schema": SCHEMA,
        "kind": "representation",
        "field": m.field().to_string(),
        "dims": q.vertex_ids().map(|v| (q.vertex_name(v).to_string(), json!(m.dims()[v.0]))).collect::<serde_json::Map<_, _>>(),
        "maps": q.arrow_ids().map(|a| (q.arrow_name(a).to_string(), matrix_json(&m.maps()[a.0]))).collect::<serde_json::Map<_, _>>(),
    })
}

pub fn gram_json(g: &GramSpec) -> Value {
    let q = &g.quiver;
    json!({
        "schema": SCHEMA,
        "kind": "gram",
        "field": g.field.to_string(),
        "quiver": quiver_json(q),
        "gamma": g.gamma.iter().filter(|(_, v)| !v.is_zero()).map(|(&(a, b), v)| json!({
            "left": q.arrow_name(a),
            "right": q.arrow_name(b),
            "value": v,
        })).collect::<Vec<_>>(),
    })
}

fn dot_id(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn quiver_dot(q: &Quiver) -> String {
    let mut s = String::from("digraph Q {\n");
    for v in q.vertex_ids() {
        writeln!(s, "  {};", dot_id(q.vertex_name(v))).unwrap();
    }
    for a in q.arrow_ids() {
        writeln!(
            s,
            "  {} -> {} [label={}];",
            dot_id(q.vertex_name(q.source(a))),
            dot_id(q.vertex_name(q.target(a))),
            dot_id(q.arrow_name(a))
        )
        .unwrap();
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brauer::tests::cfg_ex;

    const CFG_EX: &str = "\
# the running example
vertex 1 2 3 4
polygon V1 = [1, 1, 2, 3, 3]
polygon V2 = [2, 2, 3]
polygon V3 = [2, 4]
mu 1 = 3
mu 4 = 2
order 1: V1#1 V1#2
order 2: V1 V3 V2#1 V2#2
order 3: V1#1 V1#2 V2
";

    #[test]
    fn config_round_trip() {
        let cfg = parse_config(CFG_EX).unwrap();
        assert_eq!(cfg, cfg_ex());
        let printed = print_config(&cfg);
        assert_eq!(parse_config(&printed).unwrap(), cfg);
        assert_eq!(print_config(&parse_config(&printed).unwrap()), printed);
    }

    #[test]
    fn config_errors_carry_lines() {
        let err = parse_config("vertex a\npolygon P = [a, b]\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_config("vertex a\nfrobnicate\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn presentation_round_trip() {
        let text = "field F5\nvertex v\narrow x: v -> v\narrow y: v -> v\npi x x\npi y y\ncutoff x = 2\ncutoff y = 2\nident x*x*x = 3 y*y*y\n";
        let p = parse_presentation(text).unwrap();
        assert_eq!(p.dim(), 6);
        let printed = print_presentation(&p);
        assert_eq!(parse_presentation(&printed).unwrap(), p);
        assert_eq!(print_presentation(&parse_presentation(&printed).unwrap()), printed);
    }

    #[test]
    fn representation_and_gram() {
        let p = parse_presentation("vertex v\narrow a: v -> v\npi a a\ncutoff a = 2\n").unwrap();
        let m = parse_representation("dim v = 3\nmap a = [0 1 0; 0 0 1; 0 0 0]\n", &p).unwrap();
        assert!(m.validate(&p).is_empty());
        assert_eq!(parse_representation(&print_representation(&m, p.quiver()), &p).unwrap(), m);
        assert!(parse_representation("dim v = 2\nmap a = [1 0]\n", &p).is_err());

        let g = parse_gram("field F7\nvertex v\narrow x: v -> v\narrow y: v -> v\ngamma x y = 1\ngamma y x = 1\n").unwrap();
        assert_eq!(parse_gram(&print_gram(&g)).unwrap(), g);
        assert!(quiver_dot(&g.quiver).contains("\"v\" -> \"v\" [label=\"x\"];"));
        assert_eq!(gram_json(&g)["schema"], SCHEMA);
    }
}
