//! Benchmark-only crate; see `benches/kernels.rs`.
//!
//! Shared fixtures for the benchmarks live here so the bench target stays
//! small.

use swan_core::{Geometry, RfParams, SPEED_OF_LIGHT};

/// Reference RF parameters: 28 GHz, index 1.4, 10 dBm over -90 dBm noise.
pub fn reference_rf() -> RfParams {
    let lambda = SPEED_OF_LIGHT / 28e9;
    RfParams::new(28e9, 1.4, 0.01, 1e-12, lambda / 2.0).expect("valid reference parameters")
}

/// Reference geometry: a centered span with the waveguide at 3 m height.
pub fn reference_geometry(width: f64) -> Geometry {
    Geometry::new(width, 20.0, 3.0, [0.0, 0.0, 0.0], -width / 2.0).expect("valid reference geometry")
}
