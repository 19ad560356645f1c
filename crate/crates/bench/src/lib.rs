//! Criterion benchmarks for the Fekete search kernels; see `benches/`.
