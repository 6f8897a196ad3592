//! Benchmark-only package; see `benches/pipeline.rs`. No library code.
