//! Criterion benchmarks for mms-core live in `benches/`.
