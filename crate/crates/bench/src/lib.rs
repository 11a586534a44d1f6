//! Criterion benchmarks for the `sosconvex` crate; see `benches/`.
