//! Closed-form maintainability metrics for a monolithic-waveguide system:
//! probability of non-zero rate and outage probability at steady state.

/// Outage target: rate threshold and the equivalent SNR threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageSpec {
    /// Target rate (bits/s/Hz).
    pub target_rate: f64,
    /// SNR threshold 2^target_rate - 1.
    pub snr_threshold: f64,
}

impl OutageSpec {
    pub fn new(target_rate: f64) -> Self {
        debug_assert!(target_rate >= 0.0);
        Self { target_rate, snr_threshold: target_rate.exp2() - 1.0 }
    }

    /// Target set to a fraction of the rate achievable at `snr`, e.g. 0.9 of
    /// the maximum single-antenna rate.
    pub fn fraction_of_rate_at(fraction: f64, snr: f64) -> Self {
        Self::new(fraction * (1.0 + snr).log2())
    }
}

/// Probability of non-zero rate for a monolithic waveguide of length `d_x`:
/// 1/(f3r d_x^2 + 1). Decays quadratically in the length.
pub fn pnr_conventional(f3r: f64, d_x: f64) -> f64 {
    debug_assert!(f3r >= 0.0 && d_x > 0.0);
    1.0 / (f3r * d_x * d_x + 1.0)
}

/// Outage probability for the monolithic waveguide. When the working-state
/// SNR clears the threshold the outage event is exactly "failed"; otherwise
/// the link is always in outage. The boundary snr == threshold is non-outage.
pub fn op_conventional(f3r: f64, d_x: f64, snr: f64, spec: &OutageSpec) -> f64 {
    if snr >= spec.snr_threshold {
        1.0 - pnr_conventional(f3r, d_x)
    } else {
        1.0
    }
}
