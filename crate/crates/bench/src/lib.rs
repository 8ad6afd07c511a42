//! Criterion benchmarks for `mtum-core`; see `benches/`.
