//! Seeded Monte Carlo estimators for the probability of non-zero rate and
//! the outage probability of all three architectures.
//!
//! Trials are split into batches; each batch owns its own counter-based RNG
//! stream derived from the run seed, and batches are reduced by summing
//! integer counts, so estimates are bit-identical for a given configuration
//! regardless of thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{free_space_channel, in_waveguide_phase, snr_single_pa, Geometry, RfParams};
use crate::conventional::OutageSpec;
use crate::error::{require, Result};
use crate::stats::binomial_std_err;
use crate::swan::{PlacementSolution, SegmentedWaveguide};

/// Trial count, seed, and batch size of one Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub n_trials: u64,
    pub seed: u64,
    /// Trials per RNG stream; the final batch absorbs the remainder.
    pub batch: u64,
}

impl McConfig {
    pub fn new(n_trials: u64, seed: u64) -> Self {
        Self { n_trials, seed, batch: 1 << 16 }
    }

    pub fn with_batch(mut self, batch: u64) -> Self {
        self.batch = batch.max(1);
        self
    }
}

impl Default for McConfig {
    fn default() -> Self {
        Self::new(1_000_000, 1)
    }
}

/// A proportion estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_err: f64,
    pub n: u64,
}

impl McEstimate {
    fn from_count(count: u64, n: u64) -> Self {
        let value = count as f64 / n as f64;
        Self { value, std_err: binomial_std_err(value, n), n }
    }
}

/// The three architectures under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Architecture {
    Conventional,
    SegmentSelection,
    SegmentAggregation,
}

/// Everything an outage trial needs besides the RNG.
#[derive(Debug, Clone, Copy)]
pub struct OutageScenario<'a> {
    pub f3r: f64,
    pub wg: &'a SegmentedWaveguide,
    pub rf: &'a RfParams,
    pub geo: &'a Geometry,
    pub spec: &'a OutageSpec,
}

/// Exact-phase and magnitude-criterion outage estimates from the same trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaOpEstimates {
    /// Outage judged on the full-phase aggregated SNR at the final positions.
    pub exact: McEstimate,
    /// Outage judged on the working-weighted inverse-range sum at the
    /// pre-shift positions, the criterion the subset enumeration uses.
    pub approx: McEstimate,
}

/// Estimated probability of a non-zero rate. Conventional and segment
/// selection sample one steady-state component; aggregation samples all
/// segment states and succeeds when any is working.
pub fn estimate_pnr(
    arch: Architecture,
    f3r: f64,
    wg: &SegmentedWaveguide,
    mc: &McConfig,
) -> Result<McEstimate> {
    require(mc.n_trials >= 1, "n_trials", mc.n_trials as f64, ">= 1")?;
    let counts = match arch {
        Architecture::Conventional => {
            let p = crate::reliability::steady_state_from_f3r(f3r, wg.total_len()).p_work;
            run_tally(mc, move |rng| [rng.random::<f64>() < p, false])
        }
        Architecture::SegmentSelection => {
            let p = crate::reliability::steady_state_from_f3r(f3r, wg.segment_len()).p_work;
            run_tally(mc, move |rng| [rng.random::<f64>() < p, false])
        }
        Architecture::SegmentAggregation => {
            let p = crate::reliability::steady_state_from_f3r(f3r, wg.segment_len()).p_work;
            let m = wg.segments();
            run_tally(mc, move |rng| {
                let mut any = false;
                for _ in 0..m {
                    // Draw every state so PNR and OP runs share trial layouts.
                    any |= rng.random::<f64>() < p;
                }
                [any, false]
            })
        }
    };
    Ok(McEstimate::from_count(counts[0], mc.n_trials))
}

/// Estimated outage probability. For aggregation this is the exact-phase
/// criterion of [`estimate_op_sa`], which requires a placement.
pub fn estimate_op(
    arch: Architecture,
    scn: &OutageScenario<'_>,
    placement: Option<&PlacementSolution>,
    mc: &McConfig,
) -> Result<McEstimate> {
    require(mc.n_trials >= 1, "n_trials", mc.n_trials as f64, ">= 1")?;
    match arch {
        Architecture::Conventional | Architecture::SegmentSelection => {
            let len = match arch {
                Architecture::Conventional => scn.wg.total_len(),
                _ => scn.wg.segment_len(),
            };
            let p = crate::reliability::steady_state_from_f3r(scn.f3r, len).p_work;
            // Operating point: antenna directly beneath the user.
            let snr = snr_single_pa(scn.geo.user_x(), scn.rf, scn.geo);
            let clears = snr >= scn.spec.snr_threshold;
            let counts = run_tally(mc, move |rng| {
                let working = rng.random::<f64>() < p;
                [!(working && clears), false]
            });
            Ok(McEstimate::from_count(counts[0], mc.n_trials))
        }
        Architecture::SegmentAggregation => {
            let sol = placement.ok_or(crate::error::Error::InvalidParameter {
                name: "placement",
                value: f64::NAN,
                expected: "a placement solution for segment aggregation",
            })?;
            Ok(estimate_op_sa(scn, sol, mc).exact)
        }
    }
}

/// Outage of segment aggregation under both criteria, from one set of
/// sampled segment states per trial. A trial with no working segment has
/// zero rate and counts as outage under both.
pub fn estimate_op_sa(
    scn: &OutageScenario<'_>,
    sol: &PlacementSolution,
    mc: &McConfig,
) -> SaOpEstimates {
    let m = scn.wg.segments();
    let p = crate::reliability::steady_state_from_f3r(scn.f3r, scn.wg.segment_len()).p_work;
    let tau = scn.spec.snr_threshold;

    // Per-segment phasors at the final positions for the exact criterion.
    let phasors: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let h_o = free_space_channel(sol.psi[i], scn.rf, scn.geo);
            let h_i = in_waveguide_phase(scn.wg.feed_x(i), sol.psi[i], scn.rf)
                .expect("antennas sit downstream of their feeds");
            h_i.product(h_o).to_cartesian()
        })
        .collect();
    // Inverse ranges at the pre-shift positions for the magnitude criterion,
    // with per-count thresholds sqrt(k tau sigma^2 / (P gain)).
    let amps: Vec<f64> = sol.psi_hat.iter().map(|&x| 1.0 / scn.geo.range_to_user(x)).collect();
    let unit = tau * scn.rf.noise_w / (scn.rf.tx_power_w * scn.rf.free_space_gain());
    let thresholds: Vec<f64> = (0..=m).map(|k| (k as f64 * unit).sqrt()).collect();
    let power_over_noise = scn.rf.tx_power_w / scn.rf.noise_w;

    let counts = run_tally(mc, move |rng| {
        let (mut re, mut im, mut lam, mut working) = (0.0f64, 0.0f64, 0.0f64, 0usize);
        for i in 0..m {
            if rng.random::<f64>() < p {
                re += phasors[i].0;
                im += phasors[i].1;
                lam += amps[i];
                working += 1;
            }
        }
        if working == 0 {
            return [true, true];
        }
        let snr_exact = power_over_noise * (re * re + im * im) / working as f64;
        [snr_exact < tau, lam < thresholds[working]]
    });
    SaOpEstimates {
        exact: McEstimate::from_count(counts[0], mc.n_trials),
        approx: McEstimate::from_count(counts[1], mc.n_trials),
    }
}

/// Runs `per_trial` once per trial, in parallel over seeded batches, and
/// returns how many trials set each of the two flags. The reduction sums
/// integers, so the result does not depend on thread scheduling.
fn run_tally<F>(mc: &McConfig, per_trial: F) -> [u64; 2]
where
    F: Fn(&mut ChaCha8Rng) -> [bool; 2] + Sync,
{
    let batch = mc.batch.max(1);
    let n_batches = mc.n_trials.div_ceil(batch);
    (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
            rng.set_stream(b);
            let trials = batch.min(mc.n_trials - b * batch);
            let mut counts = [0u64; 2];
            for _ in 0..trials {
                let hit = per_trial(&mut rng);
                counts[0] += u64::from(hit[0]);
                counts[1] += u64::from(hit[1]);
            }
            counts
        })
        .reduce(|| [0u64; 2], |a, b| [a[0] + b[0], a[1] + b[1]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::SPEED_OF_LIGHT;
    use crate::swan::{place_antennas, pnr_sa};

    fn rf() -> RfParams {
        let lambda = SPEED_OF_LIGHT / 28e9;
        RfParams::new(28e9, 1.4, 0.01, 1e-12, lambda / 2.0).unwrap()
    }

    fn geo() -> Geometry {
        Geometry::new(50.0, 20.0, 3.0, [0.0, 0.0, 0.0], -25.0).unwrap()
    }

    #[test]
    fn estimates_are_reproducible() {
        let wg = SegmentedWaveguide::new(10, 50.0, -25.0).unwrap();
        let mc = McConfig::new(50_000, 77);
        let a = estimate_pnr(Architecture::SegmentAggregation, 0.3, &wg, &mc).unwrap();
        let b = estimate_pnr(Architecture::SegmentAggregation, 0.3, &wg, &mc).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn perfectly_reliable_segments_never_fail() {
        let wg = SegmentedWaveguide::new(5, 50.0, -25.0).unwrap();
        let mc = McConfig::new(10_000, 3);
        let est = estimate_pnr(Architecture::Conventional, 0.0, &wg, &mc).unwrap();
        assert_eq!(est.value, 1.0);
        assert_eq!(est.std_err, 0.0);
    }

    #[test]
    fn pnr_estimates_track_closed_forms() {
        let wg = SegmentedWaveguide::new(10, 50.0, -25.0).unwrap();
        let mc = McConfig::new(200_000, 2024);
        let conv = estimate_pnr(Architecture::Conventional, 0.3, &wg, &mc).unwrap();
        assert!((conv.value - 1.0 / 751.0).abs() <= 3.0 * conv.std_err.max(1e-5));
        let ss = estimate_pnr(Architecture::SegmentSelection, 0.3, &wg, &mc).unwrap();
        assert!((ss.value - 2.0 / 17.0).abs() <= 3.0 * ss.std_err);
        let sa = estimate_pnr(Architecture::SegmentAggregation, 0.3, &wg, &mc).unwrap();
        assert!((sa.value - pnr_sa(0.3, 50.0, 10)).abs() <= 3.0 * sa.std_err);
    }

    #[test]
    fn stream_partitioning_stays_within_noise() {
        let wg = SegmentedWaveguide::new(10, 50.0, -25.0).unwrap();
        let single = McConfig::new(100_000, 5).with_batch(100_000);
        let split = McConfig::new(100_000, 5).with_batch(12_800);
        let a = estimate_pnr(Architecture::SegmentSelection, 0.3, &wg, &single).unwrap();
        let b = estimate_pnr(Architecture::SegmentSelection, 0.3, &wg, &split).unwrap();
        assert!((a.value - b.value).abs() <= 3.0 * a.std_err);
    }

    #[test]
    fn zero_rate_target_makes_outage_the_pnr_complement() {
        let rf = rf();
        let geo = geo();
        let wg = SegmentedWaveguide::new(8, 50.0, -25.0).unwrap();
        let spec = OutageSpec::new(0.0);
        let scn = OutageScenario { f3r: 0.3, wg: &wg, rf: &rf, geo: &geo, spec: &spec };
        let sol = place_antennas(&wg, &rf, &geo).unwrap();
        let mc = McConfig::new(30_000, 11);
        for (arch, placement) in [
            (Architecture::Conventional, None),
            (Architecture::SegmentSelection, None),
            (Architecture::SegmentAggregation, Some(&sol)),
        ] {
            let op = estimate_op(arch, &scn, placement, &mc).unwrap();
            let pnr = estimate_pnr(arch, 0.3, &wg, &mc).unwrap();
            assert_eq!(op.value, 1.0 - pnr.value, "{arch:?}");
        }
    }

    #[test]
    fn op_estimates_track_closed_forms() {
        let rf = rf();
        let geo = geo();
        let wg = SegmentedWaveguide::new(10, 50.0, -25.0).unwrap();
        let peak = snr_single_pa(0.0, &rf, &geo);
        let spec = OutageSpec::fraction_of_rate_at(0.9, peak);
        let scn = OutageScenario { f3r: 0.3, wg: &wg, rf: &rf, geo: &geo, spec: &spec };
        let mc = McConfig::new(200_000, 31);
        let conv = estimate_op(Architecture::Conventional, &scn, None, &mc).unwrap();
        assert!(
            (conv.value - crate::conventional::op_conventional(0.3, 50.0, peak, &spec)).abs()
                <= 3.0 * conv.std_err
        );
        let ss = estimate_op(Architecture::SegmentSelection, &scn, None, &mc).unwrap();
        assert!((ss.value - crate::swan::op_ss(0.3, 5.0, peak, &spec)).abs() <= 3.0 * ss.std_err);
    }

    #[test]
    fn sub_threshold_link_is_always_out() {
        let rf = rf();
        let geo = geo();
        let wg = SegmentedWaveguide::new(4, 50.0, -25.0).unwrap();
        // Demand more rate than the overhead antenna can ever deliver.
        let spec = OutageSpec::new(64.0);
        let scn = OutageScenario { f3r: 0.3, wg: &wg, rf: &rf, geo: &geo, spec: &spec };
        let mc = McConfig::new(5_000, 4);
        let op = estimate_op(Architecture::Conventional, &scn, None, &mc).unwrap();
        assert_eq!(op.value, 1.0);
    }

    #[test]
    fn sa_outage_requires_placement() {
        let rf = rf();
        let geo = geo();
        let wg = SegmentedWaveguide::new(4, 50.0, -25.0).unwrap();
        let spec = OutageSpec::new(1.0);
        let scn = OutageScenario { f3r: 0.3, wg: &wg, rf: &rf, geo: &geo, spec: &spec };
        let mc = McConfig::new(100, 4);
        assert!(estimate_op(Architecture::SegmentAggregation, &scn, None, &mc).is_err());
    }

    #[test]
    fn sa_criteria_agree_on_aligned_placements() {
        // With aligned phases the exact and magnitude criteria judge the
        // same trials identically except for knife-edge patterns.
        let rf = rf();
        let geo = geo();
        let wg = SegmentedWaveguide::new(5, 50.0, -25.0).unwrap();
        let sol = place_antennas(&wg, &rf, &geo).unwrap();
        let peak = snr_single_pa(0.0, &rf, &geo);
        let spec = OutageSpec::fraction_of_rate_at(0.9, peak);
        let scn = OutageScenario { f3r: 0.3, wg: &wg, rf: &rf, geo: &geo, spec: &spec };
        let est = estimate_op_sa(&scn, &sol, &McConfig::new(100_000, 9));
        assert!((est.exact.value - est.approx.value).abs() <= 4.0 * est.exact.std_err);
    }
}
