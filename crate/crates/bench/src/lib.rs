//! Benchmarks live in `benches/`; run `cargo bench -p vlc-polar-bench`.
