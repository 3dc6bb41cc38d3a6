//! Criterion benchmarks for the propagation and synthesis kernels live in `benches/`.
