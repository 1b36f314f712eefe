use std::path::PathBuf;
use std::process::Command;

use mskit::cli;
use mskit::Error;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("mskit").chain(args.iter().copied());
    let code = cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write_temp(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn validate_running_example() {
    let (code, out, _) = run(&["validate", &fixture("cfg_ex.bcfg")]);
    assert_eq!(code, 0);
    assert!(out.contains("4 vertices, 3 polygons"), "{out}");
}

#[test]
fn validate_reports_c4_with_exit_2() {
    let (code, _, err) = run(&["validate", &fixture("bad_2gon.bcfg")]);
    assert_eq!(code, 2);
    assert!(err.contains("C4 violated"), "{err}");
}

#[test]
fn validate_gram_symmetry() {
    let (code, _, err) = run(&["validate", &fixture("bad_gamma.gram")]);
    assert_eq!(code, 2);
    assert!(err.contains("symmetry violated"), "{err}");
    let (code, out, _) = run(&["validate", &fixture("exterior.gram")]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn validate_presentation_flags() {
    let (code, out, _) = run(&["validate", &fixture("ka3.qpres")]);
    assert_eq!(code, 0);
    assert!(out.contains("dimension 3"), "{out}");
    assert!(out.contains("(M') true"), "{out}");
    assert!(out.contains("symmetric true"), "{out}");
    let (_, out, _) = run(&["validate", &fixture("quantum_exterior.qpres")]);
    assert!(out.contains("symmetric false"), "{out}");
}

#[test]
fn validate_representation_needs_presentation() {
    let (code, _, err) = run(&["validate", &fixture("ka3_regular.qrep")]);
    assert_eq!(code, 2, "{err}");
    let (code, out, _) = run(&[
        "validate",
        &fixture("ka3_regular.qrep"),
        "--presentation",
        &fixture("ka3.qpres"),
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("dimension 3"));
}

#[test]
fn build_lists_dimension_and_relations() {
    let (code, out, _) = run(&["build", &fixture("cfg_ex.bcfg")]);
    assert_eq!(code, 0);
    assert!(out.contains("# dimension 35"), "{out}");
    assert!(out.contains("# relation "));
    assert!(out.contains("# special cycle of 1"));
    // the printed presentation parses back to the same algebra
    let p = mskit::format::parse_presentation(&out).unwrap();
    assert_eq!(p.dim(), 35);
}

#[test]
fn roundtrip_running_example() {
    let (code, out, _) = run(&["roundtrip", &fixture("cfg_ex.bcfg")]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "isomorphic (dimension 35)");
    let (code, out, _) = run(&["roundtrip", &fixture("cfg_ex.bcfg"), "--field", "F5"]);
    assert_eq!(code, 0);
    assert!(out.contains("35"));
}

#[test]
fn recover_rescales() {
    let (code, out, err) = run(&["recover", &fixture("two_loops.qpres")]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("# rescaled"), "{out}");
    let cfg = mskit::format::parse_config(&out).unwrap();
    assert_eq!(cfg.polygons.len(), 1);
    assert_eq!(cfg.vertex_count(), 2);
    assert!(cfg.mu.iter().all(|&m| m == 3));
}

#[test]
fn recover_rejects_non_symmetric() {
    let (code, _, err) = run(&["recover", &fixture("quantum_exterior.qpres")]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn decompose_text_and_json() {
    let (code, out, _) = run(&["decompose", &fixture("ka3.qpres"), &fixture("ka3_regular.qrep")]);
    assert_eq!(code, 0);
    assert!(out.contains("U1: dim 2"), "{out}");
    assert!(out.contains("verdict: PASS"));

    let (code, out, _) = run(&["decompose", &fixture("trim.qpres"), &fixture("trim.qrep"), "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema"], "mskit/1");
    let mut dims: Vec<u64> = v["result"]["uniserial_dims"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d.as_u64().unwrap())
        .collect();
    dims.sort();
    assert_eq!(dims, vec![1, 3]);
    assert_eq!(v["result"]["verdict"], true);
}

#[test]
fn radcube_examples() {
    let (code, out, _) = run(&["radcube", &fixture("exterior.gram")]);
    assert_eq!(code, 0);
    assert!(out.contains("# dimension 4"), "{out}");
    let (code, out, _) = run(&["radcube", &fixture("hyperbolic.gram")]);
    assert_eq!(code, 0);
    assert!(out.contains("# dimension 6"), "{out}");
    let (code, _, _) = run(&["radcube", &fixture("polarize.gram")]);
    assert_eq!(code, 0);
}

#[test]
fn radcube_root_obstruction_exits_3() {
    let (code, _, err) = run(&["radcube", &fixture("loop.gram")]);
    assert_eq!(code, 3);
    assert!(err.contains("obstruction"), "{err}");
}

#[test]
fn parse_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(&dir, "broken.bcfg", "# header\nvertex a b\npolygon P = [a, c]\n");
    let (code, _, err) = run(&["validate", &path]);
    assert_eq!(code, 1);
    assert!(err.contains("line 3"), "{err}");
    assert!(err.contains("unknown vertex `c`"), "{err}");

    let path = write_temp(&dir, "broken.qpres", "field Q\nvertex v\narrow a: v -> w\n");
    let (code, _, err) = run(&["validate", &path]);
    assert_eq!(code, 1);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn io_errors_exit_1() {
    let (code, _, err) = run(&["validate", "/nonexistent/x.bcfg"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error:"));
    let (code, _, _) = run(&["validate", &fixture("ka3_regular.qrep").replace(".qrep", ".txt")]);
    assert_eq!(code, 1);
    let (code, _, _) = run(&["frobnicate"]);
    assert_eq!(code, 1);
}

#[test]
fn checker_failures_map_to_exit_4() {
    assert_eq!(Error::Checker("x".into()).exit_code(), 4);
    assert_eq!(Error::RootObstruction("x".into()).exit_code(), 3);
    assert_eq!(Error::Obstruction("x".into()).exit_code(), 3);
    assert_eq!(Error::NotMPrime("x".into()).exit_code(), 2);
    assert_eq!(Error::parse(1, "x").exit_code(), 1);
}

#[test]
fn random_is_deterministic_and_valid() {
    let a = run(&["random", "--seed", "17", "--polygons", "5"]);
    let b = run(&["random", "--seed", "17", "--polygons", "5"]);
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
    let c = run(&["random", "--seed", "18", "--polygons", "5"]);
    assert_ne!(a.1, c.1);
    let cfg = mskit::format::parse_config(&a.1).unwrap();
    assert!(cfg.validate().is_empty());
}

#[test]
fn random_writes_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.bcfg").to_string_lossy().into_owned();
    let (code, out, _) = run(&["random", "--seed", "3", "-o", &path]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let (code, _, _) = run(&["roundtrip", &path]);
    assert_eq!(code, 0);
}

#[test]
fn export_dot_and_json() {
    let (code, out, _) = run(&["export", &fixture("cfg_ex.bcfg"), "--dot"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("digraph Q"));
    assert_eq!(out.matches("->").count(), 10);

    let (code, out, _) = run(&["export", &fixture("cfg_ex.bcfg"), "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema"], "mskit/1");
    assert_eq!(v["algebra"]["dimension"], 35);

    let (code, out, _) = run(&["export", &fixture("hyperbolic.gram"), "--json"]);
    assert_eq!(code, 0);
    let _: serde_json::Value = serde_json::from_str(&out).unwrap();

    let (code, _, _) = run(&["export", &fixture("cfg_ex.bcfg")]);
    assert_eq!(code, 1);
}

#[test]
fn corpus_small_run() {
    let (code, out, _) = run(&["corpus", "--count", "12", "--seed", "100", "--jobs", "2"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("12 cases, 12 passed, 0 failed"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_mskit");
    let ok = Command::new(bin).args(["validate", &fixture("cfg_ex.bcfg")]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(bin).args(["validate", &fixture("bad_2gon.bcfg")]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("C4"));
    let obstruction = Command::new(bin).args(["radcube", &fixture("loop.gram")]).output().unwrap();
    assert_eq!(obstruction.status.code(), Some(3));
    let help = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("roundtrip"));
}
