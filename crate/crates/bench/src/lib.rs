//! Criterion benchmarks for the propagator, negativity and contour paths live in `benches/`.
