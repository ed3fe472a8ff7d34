//! Criterion benchmarks for the path algebra, tail envelopes and
//! Monte-Carlo estimators. Run with `cargo bench -p smoothbound-bench`.
