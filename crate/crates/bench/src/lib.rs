//! Criterion benchmarks for `nmc-core`; see `benches/`.
