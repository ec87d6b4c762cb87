//! Criterion benchmarks for the hardylab kernels; see `benches/`.
