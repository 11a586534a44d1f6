use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sosconvex::certificates::CertificateFile;
use sosconvex::polynomial::text::to_canonical;

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(rel)
}

fn sosconvex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sosconvex"))
        .args(args)
        .env_remove("SOSCONVEX_LOG")
        .output()
        .expect("binary runs")
}

fn reports(out: &Output) -> Vec<Value> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).expect("one JSON report per line"))
        .collect()
}

fn single(out: &Output) -> Value {
    let mut r = reports(out);
    assert_eq!(r.len(), 1, "{}", String::from_utf8_lossy(&out.stdout));
    r.pop().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn motzkin_is_certified_not_sos() {
    let out = sosconvex(&["check-sos", "--poly", path(&data("catalog/motzkin.poly"))]);
    assert_eq!(out.status.code(), Some(1));
    let r = single(&out);
    assert_eq!(r["verdict"], "certified-no");
    assert_eq!(r["property"], "sos");
    assert!(r["pairing"].as_str().unwrap().starts_with('-'));
}

#[test]
fn sos_input_exits_zero_and_certificate_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let poly = write(dir.path(), "two.poly", "x1^2 - 2*x1*x2 + 2*x2^2\n");
    let certs = dir.path().join("certs");
    let out = sosconvex(&["check-sos", "--poly", path(&poly), "--out", path(&certs)]);
    assert_eq!(out.status.code(), Some(0));
    let r = single(&out);
    assert_eq!(r["verdict"], "certified-yes");
    let cert = r["certificate"].as_str().unwrap();
    assert!(cert.ends_with("two.cert"));
    let check = sosconvex(&["verify-cert", "--cert", cert, "--poly", path(&poly)]);
    assert_eq!(check.status.code(), Some(0));
    assert_eq!(single(&check)["verdict"], "valid");
}

#[test]
fn reference_gram_certificate_reports_its_scale() {
    let cert = data("certificates/reference_gram.cert");
    let dir = tempfile::tempdir().unwrap();
    let file = CertificateFile::read(&cert).unwrap();
    let poly = write(dir.path(), "multiplied.poly", &to_canonical(&file.polynomial));
    let out = sosconvex(&["verify-cert", "--poly", path(&poly), "--cert", path(&cert)]);
    assert_eq!(out.status.code(), Some(0));
    let r = single(&out);
    assert_eq!(r["verdict"], "valid");
    assert_eq!(r["scale"], "1/84");
    assert_eq!(r["definiteness"], "PositiveDefinite");
}

#[test]
fn reference_separation_reports_exact_pairing() {
    let out = sosconvex(&[
        "verify-cert",
        "--cert",
        path(&data("certificates/reference_separation.cert")),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(single(&out)["pairing"], "-364547/16");
}

#[test]
fn certificate_for_another_polynomial_is_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let poly = write(
        dir.path(),
        "other.poly",
        &to_canonical(&sosconvex::polynomial::motzkin()),
    );
    let out = sosconvex(&[
        "verify-cert",
        "--cert",
        path(&data("certificates/reference_separation.cert")),
        "--poly",
        path(&poly),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(single(&out)["verdict"], "invalid");
}

#[test]
fn malformed_inputs_exit_65() {
    let dir = tempfile::tempdir().unwrap();
    let bad_poly = write(dir.path(), "bad.poly", "x1^2 +\n");
    let bad_cert = write(dir.path(), "bad.cert", "{\"kind\": \"gram\"");
    let missing = dir.path().join("missing.poly");
    for args in [
        vec!["check-sos", "--poly", path(&bad_poly)],
        vec!["check-sos", "--poly", path(&missing)],
        vec!["verify-cert", "--cert", path(&bad_cert)],
        vec!["check-sos-convex", "--poly", path(&bad_poly)],
    ] {
        let out = sosconvex(&args);
        assert_eq!(out.status.code(), Some(65), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        vec!["frobnicate"],
        vec!["classify", "--n", "2"],
        vec!["classify", "--n", "2", "--d", "3"],
        vec!["construct", "--degree", "5"],
        vec!["catalog", "--name", "nonexistent"],
        vec!["--jobs", "0", "classify", "--n", "2", "--d", "4"],
        vec![],
    ] {
        assert_eq!(sosconvex(&args).status.code(), Some(64), "{args:?}");
    }
    assert_eq!(sosconvex(&["--help"]).status.code(), Some(0));
}

#[test]
fn odd_degree_input_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let poly = write(dir.path(), "cube.poly", "x1^3 + x2^2\n");
    let out = sosconvex(&["check-sos", "--poly", path(&poly)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(single(&out)["verdict"], "inconclusive");
}

#[test]
fn classify_rows() {
    let r = single(&sosconvex(&["classify", "--n", "2", "--d", "4"]));
    assert_eq!(r["psd_vs_sos"], "equal");
    assert_eq!(r["convex_vs_sos_convex"], "equal");
    let r = single(&sosconvex(&["classify", "--n", "3", "--d", "6", "--homogeneous"]));
    assert_eq!(r["psd_vs_sos"], "strict");
    assert_eq!(r["convex_vs_sos_convex"], "strict");
    assert!(r["route"].as_str().unwrap().starts_with("f36"));
}

#[test]
fn catalog_emit_matches_golden_files() {
    let dir = tempfile::tempdir().unwrap();
    for name in sosconvex::constructions::NAMES {
        let golden = std::fs::read(data(&format!("catalog/{name}.poly"))).unwrap();
        let out = sosconvex(&["catalog", "--name", name, "--emit"]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(out.stdout, golden, "{name}");
        let file = dir.path().join(format!("{name}.poly"));
        let out = sosconvex(&["catalog", "--name", name, "--emit", "--out", path(&file)]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(std::fs::read(&file).unwrap(), golden);
    }
    let r = single(&sosconvex(&["catalog", "--name", "choi"]));
    assert_eq!(r["object"], "matrix");
}

#[test]
fn reports_are_reproducible_and_ordered() {
    let inputs = [
        data("catalog/motzkin.poly"),
        data("catalog/choi.poly"),
        data("catalog/robinson.poly"),
    ];
    let mut args = vec!["check-sos", "--poly"];
    args.extend(inputs.iter().map(|p| path(p)));
    let first = sosconvex(&args);
    let again = sosconvex(&args);
    assert_eq!(first.stdout, again.stdout);
    let mut parallel = vec!["--jobs", "3"];
    parallel.extend(&args);
    let par = sosconvex(&parallel);
    assert_eq!(first.stdout, par.stdout);
    let rs = reports(&first);
    assert_eq!(rs.len(), 3);
    assert_eq!(rs[1]["property"], "sos-matrix");
    assert!(rs
        .iter()
        .all(|r| r["verdict"] == "certified-no" && r.get("elapsed_ms").is_none()));
    assert_eq!(first.status.code(), Some(1));
    let timed = sosconvex(&["--timing", "classify", "--n", "1", "--d", "2"]);
    assert!(single(&timed).get("elapsed_ms").is_some());
}

#[test]
fn sos_convexity_and_multiplier_convexity() {
    let f26 = data("catalog/f26.poly");
    let out = sosconvex(&["check-sos-convex", "--poly", path(&f26)]);
    assert_eq!(out.status.code(), Some(1));
    let r = single(&out);
    assert_eq!(r["property"], "sos-convex");
    assert_eq!(r["witness"], "second-order");
    let dir = tempfile::tempdir().unwrap();
    let quartic = write(dir.path(), "quartic.poly", "x1^4 + x2^4\n");
    for kind in ["second-order", "first-order", "midpoint"] {
        let out = sosconvex(&["check-sos-convex", "--poly", path(&quartic), "--kind", kind]);
        assert_eq!(out.status.code(), Some(0), "{kind}");
    }
    let out = sosconvex(&[
        "check-sos-convex",
        "--poly",
        path(&data("catalog/f36.poly")),
        "--max-r",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = single(&out);
    assert_eq!(r["property"], "convex");
    assert_eq!(r["exponent"], 1);
}

#[test]
fn construct_writes_a_verifiable_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = dir.path().join("bundle");
    let out = sosconvex(&["construct", "--degree", "6", "--out", path(&bundle)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = single(&out);
    assert_eq!(r["verdict"], "certified-yes");
    assert_eq!(r["degree"], 8);
    assert_eq!(r["sampling_seed"], sosconvex_cli::DEFAULT_SEED);
    let recipe = std::fs::read_to_string(bundle.join("recipe.json")).unwrap();
    let recipe = sosconvex::constructions::ConstructionRecipe::from_json(&recipe).unwrap();
    assert_eq!(recipe.form.hessian().get(0, 0), &recipe.seed);
    for name in ["seed.cert", "convexity.cert"] {
        let out = sosconvex(&["verify-cert", "--cert", path(&bundle.join(name))]);
        assert_eq!(out.status.code(), Some(0), "{name}");
    }
}
