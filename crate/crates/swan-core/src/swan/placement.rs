//! Pinching-antenna placement for segment aggregation.
//!
//! One antenna per segment: the antenna in the user's segment sits directly
//! beneath the user; every other antenna is first pushed as close to the user
//! as its segment and the minimum spacing allow, then nudged away by a
//! sub-wavelength shift so its electrical length (free-space range plus
//! refractive-index-weighted in-guide run) is congruent to the center
//! antenna's modulo the wavelength. Congruent electrical lengths make the
//! per-segment phasors add coherently at the combiner.
//!
//! The shift solves a quadratic; every closed-form solution is cross-checked
//! against a bracketed bisection of the alignment condition, and the
//! bisection value wins if they disagree beyond 1e-10 m.

use crate::channel::{free_space_channel, in_waveguide_phase, Geometry, RfParams};
use crate::error::{Error, Result};
use crate::swan::{select_segment, SegmentStates, SegmentedWaveguide};

/// Tolerance at which the closed-form shift must agree with the bisection.
const CLOSED_FORM_TOL: f64 = 1e-10;
/// Width at which the bisection bracket stops shrinking.
const BISECT_WIDTH: f64 = 1e-13;
/// Slack for the in-segment and spacing feasibility checks.
const FEASIBILITY_SLACK: f64 = 1e-9;

/// Per-segment antenna positions produced by the alignment sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacementSolution {
    /// Final antenna x-coordinates, one per segment.
    pub psi: Vec<f64>,
    /// Pre-shift positions (segment edge or spacing-limited).
    pub psi_hat: Vec<f64>,
    /// Magnitudes of the alignment shifts; zero for the user's segment.
    pub nu: Vec<f64>,
    /// Index of the user's segment (0-based).
    pub m_star: usize,
    /// Per-segment flag: position inside its segment and spacing respected.
    pub feasible: Vec<bool>,
    /// Segments where the closed form disagreed with the bisection and the
    /// bisection value was used. Empty in normal operation.
    pub closed_form_disagreements: Vec<usize>,
    /// Largest observed |closed form - bisection| over all shifted segments.
    pub max_solver_gap: f64,
}

impl PlacementSolution {
    /// True when every segment is feasible.
    pub fn all_feasible(&self) -> bool {
        self.feasible.iter().all(|&f| f)
    }

    /// Unoptimized baseline: every antenna at its segment center, no
    /// alignment shifts. Centers sit one segment length apart, so the
    /// spacing constraint holds exactly when it does not exceed the segment
    /// length.
    pub fn segment_centers(wg: &SegmentedWaveguide, rf: &RfParams, geo: &Geometry) -> Result<Self> {
        let m = wg.segments();
        let half = wg.segment_len() / 2.0;
        let psi: Vec<f64> = (0..m).map(|i| wg.feed_x(i) + half).collect();
        let spaced = m == 1 || wg.segment_len() >= rf.min_spacing_m;
        Ok(Self {
            psi_hat: psi.clone(),
            nu: vec![0.0; m],
            m_star: select_segment(geo.user_x(), wg)?,
            feasible: vec![spaced; m],
            closed_form_disagreements: Vec::new(),
            max_solver_gap: 0.0,
            psi,
        })
    }
}

/// Electrical length of an antenna at `psi`: straight-line range to the user
/// plus the refractive-index-weighted run from the feed.
pub fn electrical_length(psi: f64, feed_x: f64, geo: &Geometry, rf: &RfParams) -> Result<f64> {
    if psi < feed_x {
        return Err(Error::AntennaBeforeFeed { feed_x, pa_x: psi });
    }
    Ok(geo.range_to_user(psi) + rf.refractive_index * (psi - feed_x))
}

fn electrical_length_unchecked(psi: f64, feed_x: f64, geo: &Geometry, rf: &RfParams) -> f64 {
    geo.range_to_user(psi) + rf.refractive_index * (psi - feed_x)
}

/// Places one antenna per segment with phase-aligned electrical lengths.
///
/// Works for any segment count; the sweep runs outward from the user's
/// segment in both directions. A segment whose aligned position would leave
/// its span or violate the minimum spacing is flagged infeasible rather than
/// clamped.
pub fn place_antennas(wg: &SegmentedWaveguide, rf: &RfParams, geo: &Geometry) -> Result<PlacementSolution> {
    let m = wg.segments();
    let lambda = rf.wavelength();
    let u_x = geo.user_x();
    let m_star = select_segment(u_x, wg)?;

    let mut psi = vec![0.0; m];
    let mut psi_hat = vec![0.0; m];
    let mut nu = vec![0.0; m];
    let mut feasible = vec![true; m];
    let mut disagreements = Vec::new();
    let mut max_gap = 0.0f64;

    psi[m_star] = u_x;
    psi_hat[m_star] = u_x;
    let center_len = electrical_length_unchecked(u_x, wg.feed_x(m_star), geo, rf);

    // Sweep left of the user's segment: initialize at the segment's right
    // edge (or the spacing limit), then shift leftward to the nearest
    // congruent electrical length.
    for seg in (0..m_star).rev() {
        let feed = wg.feed_x(seg);
        let hat = (feed + wg.segment_len()).min(psi[seg + 1] - rf.min_spacing_m);
        let own_len = electrical_length_unchecked(hat, feed, geo, rf);
        let target = own_len - crate::stats::wrap_positive(own_len - center_len, lambda);
        // The root can only lie at or left of the pre-shift position; the min
        // guards against rounding pushing a zero shift infinitesimally right.
        let x = solve_alignment(target, hat, feed, geo, rf, Sweep::Left, seg, &mut disagreements, &mut max_gap).min(hat);
        psi_hat[seg] = hat;
        psi[seg] = x;
        nu[seg] = hat - x;
        feasible[seg] = in_segment(x, feed, wg.segment_len())
            && psi[seg + 1] - x >= rf.min_spacing_m - FEASIBILITY_SLACK;
    }

    // Mirror sweep right of the user's segment: initialize at the left edge
    // (or the spacing limit) and shift rightward.
    for seg in (m_star + 1)..m {
        let feed = wg.feed_x(seg);
        let hat = feed.max(psi[seg - 1] + rf.min_spacing_m);
        let own_len = electrical_length_unchecked(hat, feed, geo, rf);
        let target = own_len + crate::stats::wrap_positive(center_len - own_len, lambda);
        let x = solve_alignment(target, hat, feed, geo, rf, Sweep::Right, seg, &mut disagreements, &mut max_gap).max(hat);
        psi_hat[seg] = hat;
        psi[seg] = x;
        nu[seg] = x - hat;
        feasible[seg] = in_segment(x, feed, wg.segment_len())
            && x - psi[seg - 1] >= rf.min_spacing_m - FEASIBILITY_SLACK;
    }

    Ok(PlacementSolution {
        psi,
        psi_hat,
        nu,
        m_star,
        feasible,
        closed_form_disagreements: disagreements,
        max_solver_gap: max_gap,
    })
}

fn in_segment(x: f64, feed: f64, len: f64) -> bool {
    x >= feed - FEASIBILITY_SLACK && x <= feed + len + FEASIBILITY_SLACK
}

#[derive(Clone, Copy, PartialEq)]
enum Sweep {
    Left,
    Right,
}

/// Solves electrical_length(x) == target near the pre-shift position `hat`.
/// The electrical length is strictly increasing in x for a refractive index
/// of at least one, so the root is unique; `sweep` states on which side of
/// `hat` it lies.
#[allow(clippy::too_many_arguments)]
fn solve_alignment(
    target: f64,
    hat: f64,
    feed: f64,
    geo: &Geometry,
    rf: &RfParams,
    sweep: Sweep,
    seg: usize,
    disagreements: &mut Vec<usize>,
    max_gap: &mut f64,
) -> f64 {
    let closed = alignment_closed_form(target, feed, geo, rf);
    let bisected = alignment_bisect(target, hat, feed, geo, rf, sweep);
    match (closed, bisected) {
        (Some(c), Some(b)) => {
            *max_gap = max_gap.max((c - b).abs());
            if (c - b).abs() <= CLOSED_FORM_TOL {
                c
            } else {
                disagreements.push(seg);
                b
            }
        }
        (Some(c), None) => c,
        (None, Some(b)) => {
            disagreements.push(seg);
            b
        }
        (None, None) => {
            // No solution found; keep the pre-shift position and let the
            // feasibility flags report the residual misalignment.
            disagreements.push(seg);
            hat
        }
    }
}

/// Closed-form root of range(x) + n (x - feed) = target.
///
/// Squaring the range gives (n^2 - 1) x^2 - 2 (A n - u_x) x + (A^2 - u_x^2 -
/// lateral^2) = 0 with A = target + n feed; the root that satisfies the
/// unsquared equation is returned. Degenerates to a linear solve at n = 1.
fn alignment_closed_form(target: f64, feed: f64, geo: &Geometry, rf: &RfParams) -> Option<f64> {
    let n = rf.refractive_index;
    let u = geo.user_x();
    let cy = geo.lateral_sq();
    if (n - 1.0).abs() < 1e-12 {
        let a = target + feed;
        let denom = 2.0 * (a - u);
        if denom.abs() < 1e-30 {
            return None;
        }
        return Some((a * a - (u * u + cy)) / denom);
    }
    let a = target + n * feed;
    let b = a * n - u;
    let disc = {
        let s = a - n * u;
        s * s + cy * (n * n - 1.0)
    };
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let n2m1 = n * n - 1.0;
    let r1 = (b - sq) / n2m1;
    let r2 = (b + sq) / n2m1;
    let resid = |x: f64| (electrical_length_unchecked(x, feed, geo, rf) - target).abs();
    let (e1, e2) = (resid(r1), resid(r2));
    Some(if e1 <= e2 { r1 } else { r2 })
}

/// Bracketed bisection of the alignment condition, expanding the bracket
/// geometrically from one wavelength.
fn alignment_bisect(
    target: f64,
    hat: f64,
    feed: f64,
    geo: &Geometry,
    rf: &RfParams,
    sweep: Sweep,
) -> Option<f64> {
    let f = |x: f64| electrical_length_unchecked(x, feed, geo, rf) - target;
    let mut step = rf.wavelength();
    let max_step = 8.0 * (hat - feed).abs().max(rf.wavelength()) + 8.0;
    let (mut lo, mut hi) = match sweep {
        Sweep::Left => {
            // f(hat) >= 0; walk left until the sign flips.
            let mut lo = hat - step;
            while f(lo) > 0.0 {
                step *= 2.0;
                if step > max_step {
                    return None;
                }
                lo = hat - step;
            }
            (lo, hat)
        }
        Sweep::Right => {
            let mut hi = hat + step;
            while f(hi) < 0.0 {
                step *= 2.0;
                if step > max_step {
                    return None;
                }
                hi = hat + step;
            }
            (hat, hi)
        }
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < BISECT_WIDTH {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Received SNR under segment aggregation with full propagation phases:
/// P |sum of working-segment coefficients|^2 / (working_count sigma^2).
/// Zero when no segment is working.
///
/// Expects a placement whose working antennas sit downstream of their feeds
/// (always true for feasible placements) and panics otherwise.
pub fn snr_sa_exact(
    sol: &PlacementSolution,
    states: &SegmentStates,
    wg: &SegmentedWaveguide,
    rf: &RfParams,
    geo: &Geometry,
) -> f64 {
    let m_hat = states.working_count();
    if m_hat == 0 {
        return 0.0;
    }
    let (mut re, mut im) = (0.0, 0.0);
    for (m, &working) in states.working.iter().enumerate() {
        if !working {
            continue;
        }
        let h_o = free_space_channel(sol.psi[m], rf, geo);
        let h_i = in_waveguide_phase(wg.feed_x(m), sol.psi[m], rf)
            .expect("placement keeps antennas downstream of their feeds");
        let (r, i) = h_i.product(h_o).to_cartesian();
        re += r;
        im += i;
    }
    rf.tx_power_w * (re * re + im * im) / (m_hat as f64 * rf.noise_w)
}

/// Magnitude-only aggregated SNR at the solution's antenna positions:
/// P gain (sum of working 1/range)^2 / (working_count sigma^2).
/// Matches [`snr_sa_exact`] when the placement is phase-aligned.
pub fn snr_sa_approx(
    sol: &PlacementSolution,
    states: &SegmentStates,
    rf: &RfParams,
    geo: &Geometry,
) -> f64 {
    let m_hat = states.working_count();
    if m_hat == 0 {
        return 0.0;
    }
    let sum: f64 = states
        .working
        .iter()
        .enumerate()
        .filter(|&(_, &w)| w)
        .map(|(m, _)| 1.0 / geo.range_to_user(sol.psi[m]))
        .sum();
    rf.tx_power_w * rf.free_space_gain() * sum * sum / (m_hat as f64 * rf.noise_w)
}
