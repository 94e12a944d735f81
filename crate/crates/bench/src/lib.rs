//! Benchmarks for the enumeration and reduction kernels live in `benches/`.
