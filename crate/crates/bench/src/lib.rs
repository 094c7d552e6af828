//! Benchmarks for the phasekin kernels; see `benches/`.
