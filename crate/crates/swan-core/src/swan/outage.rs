//! Exact and approximate outage probability of the segment-aggregation
//! protocol: full subset enumeration over the 2^M working patterns, the
//! channel-sum moments, and the moment-matched Gaussian bound.

use crate::channel::{Geometry, RfParams};
use crate::conventional::OutageSpec;
use crate::error::{Error, Result};
use crate::stats::normal_cdf;
use crate::swan::{PlacementSolution, SegmentedWaveguide};

/// Largest segment count accepted by the 2^M enumerations.
pub const MAX_BRUTE_FORCE_SEGMENTS: usize = 24;

/// Mean and variance of the aggregated channel sum (the working-weighted sum
/// of inverse ranges).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaMoments {
    pub mean: f64,
    pub variance: f64,
}

/// Inverse ranges 1/sqrt((psi_hat - u_x)^2 + lateral^2) at the pre-shift
/// positions, the scale on which the subset formulas are written.
fn inverse_ranges(sol: &PlacementSolution, geo: &Geometry) -> Vec<f64> {
    sol.psi_hat.iter().map(|&x| 1.0 / geo.range_to_user(x)).collect()
}

/// Per-segment steady-state working probability for segments of length `l`.
fn segment_work_prob(f3r: f64, l: f64) -> f64 {
    1.0 / (f3r * l * l + 1.0)
}

/// Sums the probability mass of every working pattern for which `outage`
/// returns true. The closure receives the channel sum over the working
/// segments and the working count. Patterns are visited in Gray-code order
/// with an incrementally maintained sum; the mass is accumulated with
/// compensated summation so the result is a deterministic function of the
/// inputs.
fn enumerate_patterns<F>(amps: &[f64], p_work: f64, mut outage: F) -> Result<f64>
where
    F: FnMut(f64, u32) -> bool,
{
    let m = amps.len();
    if m > MAX_BRUTE_FORCE_SEGMENTS {
        return Err(Error::TooManySegments { segments: m, max: MAX_BRUTE_FORCE_SEGMENTS });
    }
    let p_fail = 1.0 - p_work;
    let weights: Vec<f64> = (0..=m)
        .map(|k| p_fail.powi((m - k) as i32) * p_work.powi(k as i32))
        .collect();

    let mut total = 0.0;
    let mut comp = 0.0;
    let mut add = |w: f64| {
        let y = w - comp;
        let t = total + y;
        comp = (t - total) - y;
        total = t;
    };

    if outage(0.0, 0) {
        add(weights[0]);
    }
    let mut members: u64 = 0;
    let mut sum = 0.0;
    let mut count: u32 = 0;
    for i in 1u64..(1u64 << m) {
        let j = i.trailing_zeros();
        let bit = 1u64 << j;
        members ^= bit;
        if members & bit != 0 {
            sum += amps[j as usize];
            count += 1;
        } else {
            sum -= amps[j as usize];
            count -= 1;
        }
        if outage(sum, count) {
            add(weights[count as usize]);
        }
    }
    Ok(total)
}

/// Exact outage probability of segment aggregation by enumeration of all
/// working patterns: a pattern with working set I is in outage when the
/// channel sum over I falls below sqrt(|I| tau) sigma / sqrt(P gain). The
/// all-failed pattern carries zero rate and always counts as outage.
pub fn op_sa_bruteforce(
    sol: &PlacementSolution,
    f3r: f64,
    wg: &SegmentedWaveguide,
    rf: &RfParams,
    geo: &Geometry,
    spec: &OutageSpec,
) -> Result<f64> {
    let amps = inverse_ranges(sol, geo);
    let p_work = segment_work_prob(f3r, wg.segment_len());
    let unit = spec.snr_threshold * rf.noise_w / (rf.tx_power_w * rf.free_space_gain());
    let thresholds: Vec<f64> = (0..=amps.len()).map(|k| (k as f64 * unit).sqrt()).collect();
    enumerate_patterns(&amps, p_work, |sum, k| k == 0 || sum < thresholds[k as usize])
}

/// Probability that the channel sum falls below a fixed threshold,
/// enumerated over all working patterns. With the threshold
/// sqrt(M tau) sigma / sqrt(P gain) this is the exact value of the bound the
/// Gaussian approximation targets, and it dominates [`op_sa_bruteforce`] for
/// any positive rate target.
pub fn tail_prob_bruteforce(
    sol: &PlacementSolution,
    f3r: f64,
    wg: &SegmentedWaveguide,
    threshold: f64,
    geo: &Geometry,
) -> Result<f64> {
    let amps = inverse_ranges(sol, geo);
    let p_work = segment_work_prob(f3r, wg.segment_len());
    enumerate_patterns(&amps, p_work, |sum, _| sum < threshold)
}

/// Threshold sqrt(M tau) sigma / sqrt(P gain) used by the outage upper bound.
pub fn sa_bound_threshold(m: usize, rf: &RfParams, spec: &OutageSpec) -> f64 {
    (m as f64 * spec.snr_threshold * rf.noise_w / (rf.tx_power_w * rf.free_space_gain())).sqrt()
}

/// Moments of the channel sum from the per-segment working probability:
/// mean p1 * sum a_m, variance p0 p1 * sum a_m^2.
pub fn sa_moments(sol: &PlacementSolution, f3r: f64, wg: &SegmentedWaveguide, geo: &Geometry) -> SaMoments {
    let p_work = segment_work_prob(f3r, wg.segment_len());
    let amps = inverse_ranges(sol, geo);
    let sum: f64 = amps.iter().sum();
    let sum_sq: f64 = amps.iter().map(|a| a * a).sum();
    SaMoments { mean: p_work * sum, variance: (1.0 - p_work) * p_work * sum_sq }
}

/// Closed-form moments for an odd segment count with the user beneath the
/// center of the middle segment, where the antennas sit at offsets
/// L(k - 1/2):
/// mean ~ p1 (1/sqrt(cy) + (2/L) asinh(L(M-1)/(2 sqrt(cy)))),
/// variance ~ (p0 p1/sqrt(cy)) (1/sqrt(cy) + (2/L) atan(L(M-1)/(2 sqrt(cy)))).
pub fn sa_moments_symmetric(f3r: f64, wg: &SegmentedWaveguide, geo: &Geometry) -> Result<SaMoments> {
    let m = wg.segments();
    if m.is_multiple_of(2) {
        return Err(Error::AsymmetricLayout(format!("segment count {m} is even")));
    }
    let mid = m / 2;
    let center = wg.feed_x(mid) + wg.segment_len() / 2.0;
    if (geo.user_x() - center).abs() > 1e-9 {
        return Err(Error::AsymmetricLayout(format!(
            "user at x = {} but the middle segment is centered at {center}",
            geo.user_x()
        )));
    }
    let l = wg.segment_len();
    let root_cy = geo.lateral_sq().sqrt();
    let arg = l * (m as f64 - 1.0) / (2.0 * root_cy);
    let p_work = segment_work_prob(f3r, l);
    let mean = p_work * (1.0 / root_cy + (2.0 / l) * arg.asinh());
    let variance =
        ((1.0 - p_work) * p_work / root_cy) * (1.0 / root_cy + (2.0 / l) * arg.atan());
    Ok(SaMoments { mean, variance })
}

/// Moment-matched Gaussian approximation of the outage upper bound:
/// Phi((threshold - mean)/std_dev). A zero variance degenerates to the
/// indicator that the mean lies below the threshold.
pub fn op_sa_gaussian_bound(moments: &SaMoments, m: usize, rf: &RfParams, spec: &OutageSpec) -> f64 {
    let threshold = sa_bound_threshold(m, rf, spec);
    if moments.variance <= 0.0 {
        return if moments.mean < threshold { 1.0 } else { 0.0 };
    }
    normal_cdf((threshold - moments.mean) / moments.variance.sqrt())
}
