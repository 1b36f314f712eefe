//! Command-line driver. `run` takes the argument list and an output sink and
//! returns the process exit code, so commands are testable in-process.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path as FsPath, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::brauer::{build_algebra, build_quiver, build_relations, special_cycles, BrauerConfiguration};
use crate::error::{Error, Result};
use crate::format;
use crate::presentation::SpecialPresentation;
use crate::radcube::{radcube_to_configuration, validate_gram};
use crate::random::{self, ConfigParams};
use crate::recovery::{self, config_isomorphic, recover_configuration, rescale_to_unit_idents};
use crate::representation::{decompose_multiserial, projective_rep, verify_multiserial, DecompositionSummary};
use crate::scalar::Field;

#[derive(Parser, Debug)]
#[command(name = "mskit", version, about = "Special multiserial algebras and Brauer configurations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a .bcfg, .qpres, .gram or (with --presentation) .qrep file
    Validate {
        path: PathBuf,
        #[arg(long)]
        presentation: Option<PathBuf>,
    },
    /// Build the configuration algebra: .bcfg -> .qpres with relation listing
    Build {
        path: PathBuf,
        #[arg(long, default_value = "Q")]
        field: Field,
        #[command(flatten)]
        out: Output,
    },
    /// Recover a configuration from a symmetric presentation: .qpres -> .bcfg
    Recover {
        path: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Build then recover, and compare up to isomorphism
    Roundtrip {
        path: PathBuf,
        #[arg(long, default_value = "Q")]
        field: Field,
    },
    /// Split rad(M) into uniserials and check the result
    Decompose {
        presentation: PathBuf,
        module: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Radical-cube-zero pipeline: .gram -> .bcfg with normalization log
    Radcube {
        path: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Print a random valid configuration
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        polygons: usize,
        #[arg(long, default_value_t = 4)]
        maxval: usize,
        #[arg(long, default_value_t = 3)]
        maxmu: u32,
        #[command(flatten)]
        out: Output,
    },
    /// Export as Graphviz (quiver) or JSON
    Export {
        path: PathBuf,
        #[arg(long, conflicts_with = "json", required_unless_present = "json")]
        dot: bool,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        presentation: Option<PathBuf>,
        #[arg(long, default_value = "Q")]
        field: Field,
    },
    /// Run the property checks over a seeded corpus of random configurations
    Corpus {
        #[arg(long, default_value_t = 100)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long, default_value_t = 4)]
        polygons: usize,
        #[arg(long, default_value_t = 4)]
        maxval: usize,
        #[arg(long, default_value_t = 3)]
        maxmu: u32,
        #[arg(long, default_value = "Q")]
        field: Field,
    },
}

#[derive(Args, Debug)]
struct Output {
    /// Write to a file instead of stdout
    #[arg(short, long)]
    output: Option<PathBuf>,
}

impl Output {
    fn emit(&self, out: &mut dyn Write, text: &str) -> Result<()> {
        match &self.output {
            Some(p) => std::fs::write(p, text)?,
            None => out.write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Config,
    Presentation,
    Rep,
    Gram,
}

fn kind(path: &FsPath) -> Result<Kind> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("bcfg") => Ok(Kind::Config),
        Some("qpres") => Ok(Kind::Presentation),
        Some("qrep") => Ok(Kind::Rep),
        Some("gram") => Ok(Kind::Gram),
        _ => Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::InvalidInput,
            format!("{}: expected a .bcfg, .qpres, .qrep or .gram file", path.display()),
        ))),
    }
}

fn read(path: &FsPath) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn in_file<T>(path: &FsPath, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        e => e,
    })
}

fn load_config(path: &FsPath) -> Result<BrauerConfiguration> {
    in_file(path, format::parse_config(&read(path)?))
}

fn load_presentation(path: &FsPath) -> Result<SpecialPresentation> {
    in_file(path, format::parse_presentation(&read(path)?))
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = out.write_all(text.as_bytes());
            } else {
                let _ = err.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            match &e {
                Error::Validation(v) => {
                    for v in v {
                        let _ = writeln!(err, "{v}");
                    }
                }
                e => {
                    let _ = writeln!(err, "error: {e}");
                }
            }
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Validate { path, presentation } => validate(&path, presentation.as_deref(), out),
        Command::Build { path, field, out: o } => {
            let cfg = load_config(&path)?;
            cfg.check()?;
            let p = build_algebra(&cfg, field)?;
            let (bq, rel) = build_relations(&cfg)?;
            let q = &bq.quiver;
            let mut text = format::print_presentation(&p);
            text.push_str(&format!("# dimension {}\n", p.dim()));
            for c in special_cycles(&cfg, &bq) {
                text.push_str(&format!(
                    "# special cycle of {} at {}: {}\n",
                    cfg.vertices[c.alpha],
                    q.vertex_name(c.base),
                    p.describe_cycle(&c.arrows)
                ));
            }
            for (l, r) in &rel.type_one {
                text.push_str(&format!("# relation {} - {}\n", q.display_path(l), q.display_path(r)));
            }
            for z in &rel.type_two {
                text.push_str(&format!("# relation {}\n", q.display_path(z)));
            }
            for &(a, b) in &rel.type_three {
                text.push_str(&format!("# relation {}*{}\n", q.arrow_name(a), q.arrow_name(b)));
            }
            o.emit(out, &text)?;
            Ok(0)
        }
        Command::Recover { path, out: o } => {
            let p = load_presentation(&path)?;
            let r = rescale_to_unit_idents(&p)?;
            let cfg = recover_configuration(&p)?;
            let mut text = String::new();
            for a in p.quiver().arrow_ids() {
                let s = &r.arrow_scalars[a.0];
                if !s.is_one() {
                    text.push_str(&format!("# rescaled {} by {s}\n", p.quiver().arrow_name(a)));
                }
            }
            text.push_str(&format::print_config(&cfg));
            o.emit(out, &text)?;
            Ok(0)
        }
        Command::Roundtrip { path, field } => {
            let cfg = load_config(&path)?;
            cfg.check()?;
            let p = build_algebra(&cfg, field)?;
            let back = recover_configuration(&p)?;
            if config_isomorphic(&cfg, &back) {
                writeln!(out, "isomorphic (dimension {})", p.dim())?;
                Ok(0)
            } else {
                Err(Error::Checker(format!(
                    "recovered configuration is not isomorphic:\n{}",
                    format::print_config(&back)
                )))
            }
        }
        Command::Decompose { presentation, module, json } => {
            let p = load_presentation(&presentation)?;
            let m = in_file(&module, format::parse_representation(&read(&module)?, &p))?;
            let d = decompose_multiserial(&p, &m)?;
            let verdict = verify_multiserial(&m, &d.uniserials);
            if json {
                let s = DecompositionSummary {
                    uniserial_dims: d.uniserials.iter().map(|u| u.dim()).collect(),
                    steps: d.steps,
                    used_fallback: d.used_fallback,
                    verdict,
                };
                let v = serde_json::json!({ "schema": format::SCHEMA, "kind": "decomposition", "result": s });
                writeln!(out, "{}", serde_json::to_string_pretty(&v).unwrap())?;
            } else {
                let q = p.quiver();
                for (i, (u, (x, a))) in d.uniserials.iter().zip(&d.generators).enumerate() {
                    let x: Vec<String> = x.iter().map(ToString::to_string).collect();
                    writeln!(out, "U{}: dim {} generated by [{}]*{}", i + 1, u.dim(), x.join(" "), q.arrow_name(*a))?;
                }
                writeln!(
                    out,
                    "trimming steps: {}{}",
                    d.steps,
                    if d.used_fallback { " (exhaustive fallback)" } else { "" }
                )?;
                writeln!(out, "verdict: {}", if verdict { "PASS" } else { "FAIL" })?;
            }
            Ok(if verdict { 0 } else { 4 })
        }
        Command::Radcube { path, out: o } => {
            let g = in_file(&path, format::parse_gram(&read(&path)?))?;
            let r = radcube_to_configuration(&g)?;
            let mut text = String::new();
            for line in &r.arr.log {
                text.push_str(&format!("# {line}\n"));
            }
            text.push_str(&format!("# dimension {}\n", r.presentation.dim()));
            text.push_str(&format::print_config(&r.configuration));
            o.emit(out, &text)?;
            if !r.arr.obstructions.is_empty() {
                return Err(Error::RootObstruction(r.arr.obstructions.join("; ")));
            }
            Ok(0)
        }
        Command::Random { seed, polygons, maxval, maxmu, out: o } => {
            let params = ConfigParams { polygons, max_val: maxval, max_mu: maxmu };
            let cfg = random::random_configuration(&mut random::rng(seed), params)?;
            o.emit(out, &format::print_config(&cfg))?;
            Ok(0)
        }
        Command::Export { path, dot, presentation, field, .. } => export(&path, dot, presentation.as_deref(), field, out),
        Command::Corpus { count, seed, jobs, polygons, maxval, maxmu, field } => {
            let params = ConfigParams { polygons, max_val: maxval, max_mu: maxmu };
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| Error::invalid(e.to_string()))?;
            let results: Vec<(u64, std::result::Result<(), String>)> = pool.install(|| {
                (0..count)
                    .into_par_iter()
                    .map(|i| (seed + i, corpus_case(seed + i, params, field)))
                    .collect()
            });
            let mut failed = 0;
            for (s, r) in &results {
                if let Err(msg) = r {
                    failed += 1;
                    writeln!(out, "seed {s}: FAIL {msg}")?;
                }
            }
            writeln!(out, "{} cases, {} passed, {failed} failed", results.len(), results.len() - failed)?;
            Ok(if failed == 0 { 0 } else { 4 })
        }
    }
}

/// Round trip, condition flags, cycle powers and projective decompositions for one seed.
pub fn corpus_case(seed: u64, params: ConfigParams, field: Field) -> std::result::Result<(), String> {
    let cfg = random::random_configuration(&mut random::rng(seed), params).map_err(|e| e.to_string())?;
    let p = build_algebra(&cfg, field).map_err(|e| e.to_string())?;
    let back = recover_configuration(&p).map_err(|e| e.to_string())?;
    if !config_isomorphic(&cfg, &back) {
        return Err("round trip is not isomorphic".into());
    }
    let report = p.check_conditions();
    if !report.consistent() || !report.m_prime {
        return Err("condition flags disagree".into());
    }
    let s = recovery::induced_permutation(&p).map_err(|e| e.to_string())?;
    if let Some(v) = recovery::cycle_power_violations(&p, &s).first() {
        return Err(v.to_string());
    }
    for v in p.quiver().vertex_ids() {
        let (proj, _) = projective_rep(&p, v);
        let d = decompose_multiserial(&p, &proj).map_err(|e| e.to_string())?;
        if !verify_multiserial(&proj, &d.uniserials) {
            return Err(format!("decomposition of P({}) fails the checker", p.quiver().vertex_name(v)));
        }
    }
    Ok(())
}

fn validate(path: &FsPath, presentation: Option<&FsPath>, out: &mut dyn Write) -> Result<i32> {
    match kind(path)? {
        Kind::Config => {
            let cfg = load_config(path)?;
            cfg.check()?;
            writeln!(
                out,
                "valid configuration: {} vertices, {} polygons",
                cfg.vertex_count(),
                cfg.polygons.len()
            )?;
        }
        Kind::Presentation => {
            let p = load_presentation(path)?;
            let r = p.check_conditions();
            writeln!(out, "valid presentation over {}: dimension {}", p.field(), p.dim())?;
            writeln!(
                out,
                "(M) {}  (M') {}  arrow-free socle {}  symmetric {}",
                r.m,
                r.m_prime,
                r.arrow_free,
                recovery::verify_symmetric(&p)
            )?;
        }
        Kind::Rep => {
            let pres = presentation.ok_or_else(|| Error::invalid("validating a .qrep needs --presentation"))?;
            let p = load_presentation(pres)?;
            let m = in_file(path, format::parse_representation(&read(path)?, &p))?;
            m.check(&p)?;
            writeln!(out, "valid representation: dimension {}", m.total_dim())?;
        }
        Kind::Gram => {
            let g = in_file(path, format::parse_gram(&read(path)?))?;
            let v = validate_gram(&g);
            if !v.is_empty() {
                return Err(Error::Validation(v));
            }
            writeln!(out, "valid gram specification: {} arrows", g.quiver.arrow_count())?;
        }
    }
    Ok(0)
}

fn export(path: &FsPath, dot: bool, presentation: Option<&FsPath>, field: Field, out: &mut dyn Write) -> Result<i32> {
    let text = match kind(path)? {
        Kind::Config => {
            let cfg = load_config(path)?;
            cfg.check()?;
            if dot {
                format::quiver_dot(&build_quiver(&cfg)?.quiver)
            } else {
                let mut v = format::config_json(&cfg);
                v["algebra"] = format::presentation_json(&build_algebra(&cfg, field)?);
                serde_json::to_string_pretty(&v).unwrap() + "\n"
            }
        }
        Kind::Presentation => {
            let p = load_presentation(path)?;
            if dot {
                format::quiver_dot(p.quiver())
            } else {
                serde_json::to_string_pretty(&format::presentation_json(&p)).unwrap() + "\n"
            }
        }
        Kind::Rep => {
            let pres = presentation.ok_or_else(|| Error::invalid("exporting a .qrep needs --presentation"))?;
            let p = load_presentation(pres)?;
            let m = in_file(path, format::parse_representation(&read(path)?, &p))?;
            if dot {
                format::quiver_dot(p.quiver())
            } else {
                serde_json::to_string_pretty(&format::representation_json(&m, p.quiver())).unwrap() + "\n"
            }
        }
        Kind::Gram => {
            let g = in_file(path, format::parse_gram(&read(path)?))?;
            if dot {
                format::quiver_dot(&g.quiver)
            } else {
                serde_json::to_string_pretty(&format::gram_json(&g)).unwrap() + "\n"
            }
        }
    };
    out.write_all(text.as_bytes())?;
    Ok(0)
}
