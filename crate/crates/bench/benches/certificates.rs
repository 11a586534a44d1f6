use std::hint::black_box;
use std::path::PathBuf;

use criterion::{criterion_group, criterion_main, Criterion};

use sosconvex::analysis::{default_basis, is_sos};
use sosconvex::certificates::{rational_ldlt, verify_gram, Certificate, CertificateFile};
use sosconvex::polynomial::{motzkin, Polynomial};
use sosconvex::sdp::{sos_gram_search, SolverOptions};

fn reference_gram() -> CertificateFile {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data/certificates/reference_gram.cert");
    CertificateFile::read(path).expect("shipped certificate parses")
}

fn exact(c: &mut Criterion) {
    let file = reference_gram();
    let Certificate::Gram(cert) = &file.certificate else {
        panic!("expected a Gram certificate");
    };
    c.bench_function("rational_ldlt/reference_gram", |b| {
        b.iter(|| rational_ldlt(black_box(&cert.gram)).unwrap())
    });
    c.bench_function("verify_gram/reference_gram", |b| {
        b.iter(|| verify_gram(black_box(&file.polynomial), black_box(cert)).unwrap())
    });
}

fn numeric(c: &mut Criterion) {
    let p = motzkin();
    let basis = default_basis(&p).unwrap();
    let one = Polynomial::one(p.num_vars());
    let mut group = c.benchmark_group("search");
    group.sample_size(20);
    group.bench_function("gram_search/motzkin", |b| {
        b.iter(|| sos_gram_search(black_box(&p), &basis, &one, &SolverOptions::default()).unwrap())
    });
    group.bench_function("is_sos/motzkin", |b| b.iter(|| is_sos(black_box(&p))));
    group.finish();
}

criterion_group!(benches, exact, numeric);
criterion_main!(benches);
