use std::path::{Path, PathBuf};

use serde_json::json;
use sosconvex::analysis::{
    check_convexity_multiplier, classify as classify_pair, is_sos, is_sos_convex, is_sos_matrix, ConvexityStatus,
    Relation, SosStatus,
};
use sosconvex::certificates::{Certificate, CertificateFile, GramCertificate, SeparationCertificate};
use sosconvex::constructions::{
    catalog as catalog_entry, construct as run_pipeline, coverage_plan, matrix_from_canonical, CatalogObject,
    CoveragePlan, PipelineOptions, SamplingOptions, NAMES,
};
use sosconvex::forms::WitnessKind;
use sosconvex::polynomial::scalar::{display_scalar, parse_scalar};
use sosconvex::polynomial::text::parse_polynomial;
use sosconvex::polynomial::{default_names, xy_names, Polynomial};
use sosconvex::sdp::{set_solver_enabled, solver_enabled};

use crate::report::{Report, Verdict};
use crate::{Catalog, CheckSos, CheckSosConvex, Classify, Construct, Context, Failure, Kind, Output, VerifyCert};

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn malformed(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Input(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))
}

fn cert_path(dir: &Path, input: &Path) -> PathBuf {
    let stem = input
        .file_stem()
        .map_or_else(|| "input".into(), |s| s.to_string_lossy().into_owned());
    dir.join(format!("{stem}.cert"))
}

fn save(
    out: Option<&Path>,
    input: &Path,
    polynomial: &Polynomial,
    names: Vec<String>,
    certificate: Certificate,
) -> Result<Option<String>, Failure> {
    let Some(dir) = out else { return Ok(None) };
    std::fs::create_dir_all(dir).map_err(|e| Failure::Input(format!("cannot create {}: {e}", dir.display())))?;
    let path = cert_path(dir, input);
    let file = CertificateFile::new(polynomial.clone(), certificate).with_variables(names);
    write_file(&path, &file.to_json())?;
    Ok(Some(path.display().to_string()))
}

fn gram_detail(cert: &GramCertificate) -> String {
    format!("exact Gram certificate over {} monomials", cert.basis.len())
}

fn separation_detail(cert: &SeparationCertificate) -> String {
    format!(
        "separating functional with positive definite {0}x{0} moment matrix",
        cert.moment_basis.len()
    )
}

fn pairing(cert: &SeparationCertificate, p: &Polynomial) -> Option<String> {
    cert.pairing(p).ok().map(|v| display_scalar(&v))
}

fn sos_report(
    input: &Path,
    property: &str,
    target: &Polynomial,
    names: Vec<String>,
    status: SosStatus,
    out: Option<&Path>,
) -> Result<Report, Failure> {
    let mut report = match status {
        SosStatus::CertifiedSos(cert) => {
            let mut r = Report::new("check-sos", Verdict::CertifiedYes, gram_detail(&cert));
            r.scale = Some(display_scalar(&cert.scale));
            r.certificate = save(out, input, target, names, Certificate::Gram(cert))?;
            r
        }
        SosStatus::CertifiedNotSos(cert) => {
            let mut r = Report::new("check-sos", Verdict::CertifiedNo, separation_detail(&cert));
            r.pairing = pairing(&cert, target);
            r.certificate = save(out, input, target, names, Certificate::Separation(cert))?;
            r
        }
        SosStatus::Inconclusive(msg) => Report::new("check-sos", Verdict::Inconclusive, msg),
    };
    report.input = Some(input.display().to_string());
    report.property = Some(property.to_string());
    Ok(report)
}

pub(crate) fn check_sos(input: &Path, args: &CheckSos) -> Result<Output, Failure> {
    let text = read(input)?;
    let out = args.out.as_deref();
    let report = if text.trim_start().starts_with("matrix") {
        let u = matrix_from_canonical(&text).map_err(|e| malformed(input, e))?;
        let t = u.quadratic_form();
        let names = xy_names(u.num_vars(), u.dim());
        sos_report(input, "sos-matrix", &t, names, is_sos_matrix(&u), out)?
    } else {
        let named = parse_polynomial(&text).map_err(|e| malformed(input, e))?;
        let status = is_sos(&named.polynomial);
        sos_report(input, "sos", &named.polynomial, named.names, status, out)?
    };
    Ok(Output::Report(report))
}

pub(crate) fn check_sos_convex(input: &Path, args: &CheckSosConvex) -> Result<Output, Failure> {
    let text = read(input)?;
    let p = parse_polynomial(&text).map_err(|e| malformed(input, e))?.polynomial;
    let n = p.num_vars();
    let out = args.out.as_deref();
    let (status, property) = match args.max_r {
        Some(r) => (check_convexity_multiplier(&p, r), "convex"),
        None => {
            let kind = match args.kind {
                Kind::SecondOrder => WitnessKind::SecondOrder,
                Kind::FirstOrder => WitnessKind::FirstOrder,
                Kind::Midpoint => {
                    let lambda = parse_scalar(&args.lambda).map_err(|e| Failure::Usage(e.to_string()))?;
                    WitnessKind::Midpoint(lambda)
                }
            };
            (is_sos_convex(&p, &kind), "sos-convex")
        }
    };
    let mut report = match status {
        ConvexityStatus::SosConvex {
            kind,
            witness,
            certificate,
        } => {
            let mut r = Report::new("check-sos-convex", Verdict::CertifiedYes, gram_detail(&certificate))
                .with("witness", kind.label());
            r.scale = Some(display_scalar(&certificate.scale));
            r.certificate = save(out, input, &witness, xy_names(n, n), Certificate::Gram(certificate))?;
            r
        }
        ConvexityStatus::NotSosConvex {
            kind,
            witness,
            certificate,
        } => {
            let mut r = Report::new(
                "check-sos-convex",
                Verdict::CertifiedNo,
                separation_detail(&certificate),
            )
            .with("witness", kind.label());
            r.pairing = pairing(&certificate, &witness);
            r.certificate = save(
                out,
                input,
                &witness,
                xy_names(n, n),
                Certificate::Separation(certificate),
            )?;
            r
        }
        ConvexityStatus::ConvexNumeric {
            exponent,
            multiplier,
            hessian_form,
            certificate,
            note,
        } => {
            let mut r = Report::new("check-sos-convex", Verdict::CertifiedYes, note)
                .with("multiplier", multiplier.to_string())
                .with("exponent", exponent);
            r.scale = Some(display_scalar(&certificate.scale));
            r.certificate = save(
                out,
                input,
                &hessian_form,
                xy_names(n, n),
                Certificate::Gram(certificate),
            )?;
            r
        }
        ConvexityStatus::Inconclusive(msg) => Report::new("check-sos-convex", Verdict::Inconclusive, msg),
    };
    report.input = Some(input.display().to_string());
    report.property = Some(property.to_string());
    Ok(Output::Report(report))
}

/// Disables the numerical solver until dropped.
struct SolverOff(bool);

impl SolverOff {
    fn new() -> Self {
        let before = solver_enabled();
        set_solver_enabled(false);
        SolverOff(before)
    }
}

impl Drop for SolverOff {
    fn drop(&mut self) {
        set_solver_enabled(self.0);
    }
}

pub(crate) fn verify_cert(args: &VerifyCert) -> Result<Output, Failure> {
    // the exact path must not depend on floating point search
    let _guard = SolverOff::new();
    let file = CertificateFile::from_json(&read(&args.cert)?).map_err(|e| malformed(&args.cert, e))?;
    let (target, source) = match &args.poly {
        Some(path) => {
            let p = parse_polynomial(&read(path)?)
                .map_err(|e| malformed(path, e))?
                .polynomial;
            (p, path.display().to_string())
        }
        None => (file.polynomial.clone(), args.cert.display().to_string()),
    };
    let mut r = match file.verify_against(&target) {
        Ok(check) => {
            let verdict = if check.valid { Verdict::Valid } else { Verdict::Invalid };
            let detail = match (&check.failed, &check.mismatch) {
                (None, _) => "identity and definiteness checks passed".to_string(),
                (Some(f), Some(m)) => format!("{f:?} check failed at monomial {m}"),
                (Some(f), None) => format!("{f:?} check failed"),
            };
            let mut r = Report::new("verify-cert", verdict, detail);
            r.pairing = check.pairing.as_ref().map(display_scalar);
            if let Some(d) = check.definiteness {
                r = r.with("definiteness", format!("{d:?}"));
            }
            r
        }
        Err(e) => Report::new("verify-cert", Verdict::Invalid, e.to_string()),
    };
    match &file.certificate {
        Certificate::Gram(g) => {
            r.property = Some("gram".into());
            r.scale = Some(display_scalar(&g.scale));
        }
        Certificate::Separation(_) => r.property = Some("separation".into()),
    }
    r.input = Some(source);
    r.certificate = Some(args.cert.display().to_string());
    Ok(Output::Report(r))
}

pub(crate) fn construct(args: &Construct, ctx: &Context) -> Result<Output, Failure> {
    if args.degree < 6 || args.degree % 2 == 1 {
        return Err(Failure::Usage(format!(
            "--degree must be even and at least 6, got {}",
            args.degree
        )));
    }
    let opts = PipelineOptions {
        sampling: SamplingOptions {
            seed: ctx.seed,
            samples: args.samples,
            ..SamplingOptions::default()
        },
        max_r: args.max_r,
        ..PipelineOptions::default()
    };
    let c = match run_pipeline(args.degree, &opts) {
        Ok(c) => c,
        Err(e) => {
            return Ok(Output::Report(Report::new(
                "construct",
                Verdict::Inconclusive,
                e.to_string(),
            )))
        }
    };
    let recipe = &c.recipe;
    let minor_is_seed = recipe.form.hessian().get(0, 0) == &recipe.seed;
    let mut r = match &c.convexity {
        ConvexityStatus::ConvexNumeric {
            exponent,
            multiplier,
            certificate,
            ..
        } if minor_is_seed => {
            let mut r = Report::new(
                "construct",
                Verdict::CertifiedYes,
                "convex by the multiplier certificate; not sos-convex since the first Hessian minor is the seed, which is not sos",
            )
            .with("multiplier", multiplier.to_string())
            .with("exponent", *exponent);
            r.scale = Some(display_scalar(&certificate.scale));
            r
        }
        ConvexityStatus::Inconclusive(msg) => Report::new("construct", Verdict::Inconclusive, msg.clone()),
        _ => Report::new("construct", Verdict::Inconclusive, "convexity was not certified"),
    };
    r.property = Some("convex, not sos-convex".into());
    r.pairing = pairing(&c.alpha.certificate, &c.alpha.seed);
    r = r
        .with("degree", recipe.form.degree())
        .with("alpha", display_scalar(&c.alpha.alpha))
        .with("gamma", display_scalar(&recipe.gamma))
        .with("form", recipe.form.to_string())
        .with("sampling_seed", ctx.seed)
        .with(
            "estimates",
            json!({
                "beta1": format!("{:.6e}", c.estimate.beta1),
                "beta2": format!("{:.6e}", c.estimate.beta2),
                "requirement": format!("{:.6e}", c.estimate.requirement),
            }),
        );
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Input(format!("cannot create {}: {e}", dir.display())))?;
        write_file(&dir.join("recipe.json"), &recipe.to_json())?;
        let seed_file = CertificateFile::new(
            c.alpha.seed.clone(),
            Certificate::Separation(c.alpha.certificate.clone()),
        );
        write_file(&dir.join("seed.cert"), &seed_file.to_json())?;
        if let ConvexityStatus::ConvexNumeric {
            hessian_form,
            certificate,
            ..
        } = &c.convexity
        {
            let file = CertificateFile::new(hessian_form.clone(), Certificate::Gram(certificate.clone()))
                .with_variables(xy_names(3, 3));
            write_file(&dir.join("convexity.cert"), &file.to_json())?;
        }
        r.certificate = Some(dir.display().to_string());
    }
    Ok(Output::Report(r))
}

pub(crate) fn catalog(args: &Catalog) -> Result<Output, Failure> {
    if args.list {
        let r =
            Report::new("catalog", Verdict::Valid, format!("{} entries", NAMES.len())).with("names", NAMES.to_vec());
        return Ok(Output::Report(r));
    }
    let name = args.name.as_deref().unwrap_or_default();
    let entry = catalog_entry(name).map_err(|e| Failure::Usage(e.to_string()))?;
    let text = entry.canonical_text();
    if args.emit {
        return match &args.out {
            Some(path) => {
                write_file(path, &text)?;
                let mut r = Report::new("catalog", Verdict::Valid, "canonical text written");
                r.certificate = Some(path.display().to_string());
                Ok(Output::Report(r.with("name", entry.name)))
            }
            None => Ok(Output::Text(text)),
        };
    }
    let (kind, vars) = match &entry.object {
        CatalogObject::Polynomial(p) => ("polynomial", p.num_vars()),
        CatalogObject::Matrix(m) => ("matrix", m.num_vars()),
    };
    let r = Report::new("catalog", Verdict::Valid, entry.description)
        .with("name", entry.name)
        .with("object", kind)
        .with("variables", default_names(vars))
        .with("claims", entry.claims);
    Ok(Output::Report(r))
}

fn relation(r: Relation) -> &'static str {
    match r {
        Relation::Equal => "equal",
        Relation::Strict => "strict",
    }
}

pub(crate) fn classify(args: &Classify) -> Result<Output, Failure> {
    let c = classify_pair(args.n, args.d, args.homogeneous).map_err(|e| Failure::Usage(e.to_string()))?;
    let route = match coverage_plan(args.n, args.d, args.homogeneous).map_err(|e| Failure::Usage(e.to_string()))? {
        CoveragePlan::EqualCase => "equal case".to_string(),
        CoveragePlan::Route { base, extensions } => format!("{} plus {extensions} added variables", base.label()),
    };
    let detail = format!(
        "{} n={} d={}",
        if args.homogeneous { "forms" } else { "polynomials" },
        args.n,
        args.d
    );
    let r = Report::new("classify", Verdict::Valid, detail)
        .with("psd_vs_sos", relation(c.psd_vs_sos))
        .with("convex_vs_sos_convex", relation(c.convex_vs_sos_convex))
        .with("route", route);
    Ok(Output::Report(r))
}
