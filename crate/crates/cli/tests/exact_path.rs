use std::path::{Path, PathBuf};

use sosconvex::analysis::{is_sos, SosStatus};
use sosconvex::sdp::{set_solver_enabled, solver_runs};

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(rel)
}

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = sosconvex_cli::run(
        std::iter::once("sosconvex").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (code, String::from_utf8(out).unwrap())
}

// Kept as the only test in this binary: it flips a process-wide switch.
#[test]
fn verify_cert_never_starts_the_solver() {
    let gram = data("certificates/reference_gram.cert");
    let separation = data("certificates/reference_separation.cert");
    let (code, report) = run(&["verify-cert", "--cert", gram.to_str().unwrap()]);
    assert_eq!(code, 0, "{report}");
    assert_eq!(solver_runs(), 0);

    set_solver_enabled(false);
    assert!(matches!(
        is_sos(&sosconvex::polynomial::motzkin()),
        SosStatus::Inconclusive(_)
    ));
    let (code, report) = run(&["verify-cert", "--cert", separation.to_str().unwrap()]);
    assert_eq!(code, 0, "{report}");
    assert!(report.contains("\"pairing\":\"-364547/16\""));
    assert_eq!(solver_runs(), 0);
    set_solver_enabled(true);

    let (code, _) = run(&["check-sos", "--poly", data("catalog/motzkin.poly").to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(solver_runs() > 0);
}
