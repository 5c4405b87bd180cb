//! Segmented-waveguide architecture: segment geometry, the segment-selection
//! (SS) and segment-aggregation (SA) protocol metrics, and the relative gains
//! over a monolithic deployment.

mod outage;
mod placement;

pub use outage::{
    op_sa_bruteforce, op_sa_gaussian_bound, sa_bound_threshold, sa_moments, sa_moments_symmetric,
    tail_prob_bruteforce, SaMoments, MAX_BRUTE_FORCE_SEGMENTS,
};
pub use placement::{electrical_length, place_antennas, snr_sa_approx, snr_sa_exact, PlacementSolution};

use crate::error::{require, Error, Result};

/// A waveguide split into `segments` equal end-to-end pieces, each with its
/// own feed at the segment's left end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentedWaveguide {
    segments: usize,
    segment_len_m: f64,
    first_feed_x_m: f64,
}

impl SegmentedWaveguide {
    /// Splits a span of `width_x_m` starting at `first_feed_x_m` into
    /// `segments` pieces.
    pub fn new(segments: usize, width_x_m: f64, first_feed_x_m: f64) -> Result<Self> {
        require(segments >= 1, "segments", segments as f64, ">= 1")?;
        require(width_x_m > 0.0, "width_x_m", width_x_m, "> 0")?;
        Ok(Self { segments, segment_len_m: width_x_m / segments as f64, first_feed_x_m })
    }

    /// Builds from an explicit segment length instead of the total span.
    pub fn from_segment_length(segments: usize, segment_len_m: f64, first_feed_x_m: f64) -> Result<Self> {
        require(segments >= 1, "segments", segments as f64, ">= 1")?;
        require(segment_len_m > 0.0, "segment_len_m", segment_len_m, "> 0")?;
        Ok(Self { segments, segment_len_m, first_feed_x_m })
    }

    pub fn segments(&self) -> usize {
        self.segments
    }

    /// Length of one segment (m).
    pub fn segment_len(&self) -> f64 {
        self.segment_len_m
    }

    /// Total span covered by the segments (m).
    pub fn total_len(&self) -> f64 {
        self.segment_len_m * self.segments as f64
    }

    /// Feed x-coordinate of segment `m` (0-based).
    pub fn feed_x(&self, m: usize) -> f64 {
        debug_assert!(m < self.segments);
        self.first_feed_x_m + m as f64 * self.segment_len_m
    }

    pub fn first_feed_x(&self) -> f64 {
        self.first_feed_x_m
    }

    /// Right end of the whole span.
    pub fn last_x(&self) -> f64 {
        self.first_feed_x_m + self.total_len()
    }
}

/// Working/failed indicator per segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentStates {
    pub working: Vec<bool>,
}

impl SegmentStates {
    pub fn new(working: Vec<bool>) -> Self {
        Self { working }
    }

    pub fn all_working(n: usize) -> Self {
        Self { working: vec![true; n] }
    }

    /// Number of working segments.
    pub fn working_count(&self) -> usize {
        self.working.iter().filter(|&&b| b).count()
    }
}

/// Index (0-based) of the segment whose span contains the user projection.
/// A projection exactly on a boundary maps to the lower-index segment; the
/// left edge of the span maps to segment 0.
pub fn select_segment(u_x: f64, wg: &SegmentedWaveguide) -> Result<usize> {
    let lo = wg.first_feed_x();
    let hi = wg.last_x();
    if u_x < lo || u_x > hi {
        return Err(Error::UserOutsideRegion { u_x, lo, hi });
    }
    let raw = ((u_x - lo) / wg.segment_len()).ceil() as i64;
    Ok((raw.clamp(1, wg.segments() as i64) - 1) as usize)
}

/// Probability of non-zero rate under segment selection: the steady-state
/// working probability of one segment, 1/(f3r L^2 + 1).
pub fn pnr_ss(f3r: f64, segment_len: f64) -> f64 {
    debug_assert!(f3r >= 0.0 && segment_len > 0.0);
    1.0 / (f3r * segment_len * segment_len + 1.0)
}

/// Outage probability under segment selection.
pub fn op_ss(f3r: f64, segment_len: f64, snr: f64, spec: &crate::conventional::OutageSpec) -> f64 {
    if snr >= spec.snr_threshold {
        1.0 - pnr_ss(f3r, segment_len)
    } else {
        1.0
    }
}

/// Relative PNR gain of segment selection over a monolithic guide of length
/// `d_x` split into `m` segments: (f3r d^2 m^2 + m^2)/(f3r d^2 + m^2).
pub fn gain_ss(f3r: f64, d_x: f64, m: usize) -> f64 {
    debug_assert!(m >= 1);
    let m2 = (m * m) as f64;
    let ed2 = f3r * d_x * d_x;
    (ed2 * m2 + m2) / (ed2 + m2)
}

/// Probability that at least one of `m` independent segments is working:
/// 1 - (f3r d^2/(f3r d^2 + m^2))^m.
pub fn pnr_sa(f3r: f64, d_x: f64, m: usize) -> f64 {
    debug_assert!(m >= 1);
    1.0 - all_failed_prob(f3r, d_x, m)
}

/// Probability that every segment is failed, (f3r d^2/(f3r d^2 + m^2))^m.
pub fn all_failed_prob(f3r: f64, d_x: f64, m: usize) -> f64 {
    let m2 = (m * m) as f64;
    let ed2 = f3r * d_x * d_x;
    (ed2 / (ed2 + m2)).powi(m as i32)
}

/// Relative PNR gain of segment aggregation over a monolithic guide:
/// (1 + d^2 f3r)(1 - (L^2 f3r/(L^2 f3r + 1))^m) with L = d/m.
pub fn gain_sa(f3r: f64, d_x: f64, m: usize) -> f64 {
    debug_assert!(m >= 1);
    let l = d_x / m as f64;
    let le = f3r * l * l;
    (1.0 + f3r * d_x * d_x) * (1.0 - (le / (le + 1.0)).powi(m as i32))
}

/// Coefficients of the large-segment-count behavior of the aggregated link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticCoeffs {
    /// (2/d_x) asinh(d_x / (2 sqrt(lateral^2))), 1/m.
    pub tau_dx: f64,
    /// (4 f3r d_x / sqrt(lateral^2)) atan(d_x / (2 sqrt(lateral^2))).
    pub kappa_dx: f64,
}

/// Mean/variance growth coefficients for the aggregated channel sum as the
/// segment count grows at fixed span.
pub fn sa_asymptotic_coeffs(f3r: f64, d_x: f64, lateral_sq: f64) -> AsymptoticCoeffs {
    debug_assert!(d_x > 0.0 && lateral_sq > 0.0);
    let root_cy = lateral_sq.sqrt();
    AsymptoticCoeffs {
        tau_dx: (2.0 / d_x) * (d_x / (2.0 * root_cy)).asinh(),
        kappa_dx: (4.0 * f3r * d_x / root_cy) * (d_x / (2.0 * root_cy)).atan(),
    }
}
