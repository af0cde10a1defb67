//! Benchmarks only; run them with `cargo bench -p ilab-bench`.
