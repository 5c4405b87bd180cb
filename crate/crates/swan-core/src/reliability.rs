//! Exponential failure/repair model for a waveguide component: length
//! scaling of the rates, the two-state continuous-time Markov chain, its
//! steady state, and a discrete-event trajectory simulator used as an
//! independent oracle for the closed forms.

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::error::{require, Result};

/// Per-unit-length failure and repair rates.
///
/// Steady-state quantities depend on these only through their ratio (the
/// failure-repair rate ratio, F3R); the individual values matter for
/// transient and trajectory work.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitRates {
    /// Failures per unit time per unit length.
    pub fail_per_m: f64,
    /// Repair rate scale; 1/repair_scale is the mean repair time per unit length.
    pub repair_scale: f64,
}

impl UnitRates {
    pub fn new(fail_per_m: f64, repair_scale: f64) -> Result<Self> {
        require(fail_per_m > 0.0, "fail_per_m", fail_per_m, "> 0")?;
        require(repair_scale > 0.0, "repair_scale", repair_scale, "> 0")?;
        Ok(Self { fail_per_m, repair_scale })
    }

    /// Failure-repair rate ratio (F3R).
    pub fn f3r(&self) -> f64 {
        self.fail_per_m / self.repair_scale
    }
}

/// Whole-component failure and repair rates for a waveguide of a given length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentRates {
    /// Physical length (m).
    pub length_m: f64,
    /// Failure rate (1/time): per-unit-length rate times length.
    pub fail_rate: f64,
    /// Repair rate (1/time): repair scale divided by length.
    pub repair_rate: f64,
}

/// Rates for a component of length `length_m`: the failure rate scales up
/// with length and the repair rate scales down.
pub fn rates_for_length(unit: &UnitRates, length_m: f64) -> Result<ComponentRates> {
    require(length_m > 0.0, "length_m", length_m, "> 0")?;
    Ok(ComponentRates {
        length_m,
        fail_rate: unit.fail_per_m * length_m,
        repair_rate: unit.repair_scale / length_m,
    })
}

/// Lifetime CDF of an exponential component: 1 - e^{-rate t}.
pub fn lifetime_cdf(t: f64, fail_rate: f64) -> Result<f64> {
    require(t >= 0.0, "t", t, ">= 0")?;
    require(fail_rate > 0.0, "fail_rate", fail_rate, "> 0")?;
    Ok(-(-fail_rate * t).exp_m1())
}

/// Mean time to failure of an exponential lifetime.
pub fn mttf(fail_rate: f64) -> f64 {
    debug_assert!(fail_rate > 0.0);
    1.0 / fail_rate
}

/// Mean time to repair of an exponential repair process.
pub fn mttr(repair_rate: f64) -> f64 {
    debug_assert!(repair_rate > 0.0);
    1.0 / repair_rate
}

/// Transition probabilities of the two-state working/failed chain after an
/// elapsed time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CtmcTransition {
    pub t: f64,
    /// Working at t given working at 0.
    pub p11: f64,
    /// Failed at t given working at 0.
    pub p10: f64,
    /// Failed at t given failed at 0.
    pub p00: f64,
    /// Working at t given failed at 0.
    pub p01: f64,
}

/// Closed-form CTMC transition probabilities:
/// p11(t) = mu/(lambda+mu) + lambda/(lambda+mu) e^{-(lambda+mu)t}, and the
/// failed-start row by symmetry. Complements are formed by subtraction so the
/// rows sum to one exactly.
pub fn transition_probabilities(t: f64, rates: &ComponentRates) -> Result<CtmcTransition> {
    require(t >= 0.0, "t", t, ">= 0")?;
    let total = rates.fail_rate + rates.repair_rate;
    let work_frac = rates.repair_rate / total;
    let fail_frac = rates.fail_rate / total;
    let decay = (-total * t).exp();
    let p11 = work_frac + fail_frac * decay;
    let p00 = fail_frac + work_frac * decay;
    Ok(CtmcTransition { t, p11, p10: 1.0 - p11, p00, p01: 1.0 - p00 })
}

/// Limiting occupancy of the chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub p_work: f64,
    pub p_fail: f64,
}

/// Steady state of the chain: p_work = mu/(lambda + mu).
pub fn steady_state(rates: &ComponentRates) -> SteadyState {
    let p_work = rates.repair_rate / (rates.fail_rate + rates.repair_rate);
    SteadyState { p_work, p_fail: 1.0 - p_work }
}

/// Steady-state working probability from the F3R alone:
/// 1/(f3r * length^2 + 1).
pub fn steady_state_from_f3r(f3r: f64, length_m: f64) -> SteadyState {
    debug_assert!(f3r >= 0.0 && length_m > 0.0);
    let p_work = 1.0 / (f3r * length_m * length_m + 1.0);
    SteadyState { p_work, p_fail: 1.0 - p_work }
}

/// Operational state of a component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WgState {
    Working,
    Failed,
}

impl WgState {
    pub fn is_working(self) -> bool {
        matches!(self, WgState::Working)
    }

    fn flipped(self) -> Self {
        match self {
            WgState::Working => WgState::Failed,
            WgState::Failed => WgState::Working,
        }
    }
}

/// Iterator of (state, holding time) pairs for one failure/repair trajectory.
/// Holding times are exact event times, not discretized.
pub struct TrajectoryIter<'r, R: Rng> {
    state: WgState,
    hold_working: Exp<f64>,
    hold_failed: Exp<f64>,
    rng: &'r mut R,
}

impl<'r, R: Rng> TrajectoryIter<'r, R> {
    pub fn new(rates: &ComponentRates, start: WgState, rng: &'r mut R) -> Result<Self> {
        require(rates.fail_rate > 0.0, "fail_rate", rates.fail_rate, "> 0")?;
        require(rates.repair_rate > 0.0, "repair_rate", rates.repair_rate, "> 0")?;
        Ok(Self {
            state: start,
            hold_working: Exp::new(rates.fail_rate).expect("positive rate"),
            hold_failed: Exp::new(rates.repair_rate).expect("positive rate"),
            rng,
        })
    }
}

impl<R: Rng> Iterator for TrajectoryIter<'_, R> {
    type Item = (WgState, f64);

    fn next(&mut self) -> Option<Self::Item> {
        let state = self.state;
        let hold = match state {
            WgState::Working => self.hold_working.sample(self.rng),
            WgState::Failed => self.hold_failed.sample(self.rng),
        };
        self.state = state.flipped();
        Some((state, hold))
    }
}

/// Simulates one trajectory of alternating working/failed intervals until the
/// accumulated time covers `horizon`. Deterministic for a fixed RNG state.
pub fn simulate_trajectory<R: Rng>(
    rates: &ComponentRates,
    start: WgState,
    horizon: f64,
    rng: &mut R,
) -> Result<Vec<(WgState, f64)>> {
    require(horizon > 0.0, "horizon", horizon, "> 0")?;
    let mut out = Vec::new();
    let mut elapsed = 0.0;
    for (state, hold) in TrajectoryIter::new(rates, start, rng)? {
        out.push((state, hold));
        elapsed += hold;
        if elapsed >= horizon {
            break;
        }
    }
    Ok(out)
}

/// State of a recorded trajectory at time `t` (which must lie within the
/// covered horizon; the final interval extends past it).
pub fn state_at(trajectory: &[(WgState, f64)], t: f64) -> WgState {
    let mut elapsed = 0.0;
    for &(state, hold) in trajectory {
        elapsed += hold;
        if t < elapsed {
            return state;
        }
    }
    trajectory.last().map(|&(s, _)| s.flipped()).unwrap_or(WgState::Working)
}

/// Draws a state from the steady-state distribution.
pub fn sample_steady_state<R: Rng>(ss: &SteadyState, rng: &mut R) -> WgState {
    if rng.random::<f64>() < ss.p_work {
        WgState::Working
    } else {
        WgState::Failed
    }
}

/// Fraction of trajectories (out of `n`) found working at each checkpoint,
/// starting from `start`. Streams events without storing trajectories.
pub fn empirical_working_fractions<R: Rng>(
    rates: &ComponentRates,
    start: WgState,
    checkpoints: &[f64],
    n: u64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let mut sorted: Vec<(usize, f64)> = checkpoints.iter().copied().enumerate().collect();
    sorted.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut counts = vec![0u64; checkpoints.len()];
    for _ in 0..n {
        let mut elapsed = 0.0;
        let mut next = 0;
        for (state, hold) in TrajectoryIter::new(rates, start, rng)? {
            elapsed += hold;
            while next < sorted.len() && sorted[next].1 < elapsed {
                if state.is_working() {
                    counts[sorted[next].0] += 1;
                }
                next += 1;
            }
            if next == sorted.len() {
                break;
            }
        }
    }
    Ok(counts.into_iter().map(|c| c as f64 / n as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit() -> UnitRates {
        UnitRates::new(0.3, 1.0).unwrap()
    }

    #[test]
    fn lifetime_cdf_reference() {
        assert_eq!(lifetime_cdf(0.0, 2.0).unwrap(), 0.0);
        assert!((lifetime_cdf(1e9, 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((lifetime_cdf(0.5, 2.0).unwrap() - 0.6321205588285577).abs() < 1e-15);
        assert!(lifetime_cdf(-0.1, 2.0).is_err());
    }

    #[test]
    fn mean_times() {
        assert_eq!(mttf(2.0), 0.5);
        assert_eq!(mttr(4.0), 0.25);
        // Segments of length D/M live M times longer than the whole guide.
        let whole = rates_for_length(&unit(), 50.0).unwrap();
        let segment = rates_for_length(&unit(), 5.0).unwrap();
        assert!((mttf(segment.fail_rate) / mttf(whole.fail_rate) - 10.0).abs() < 1e-12);
        assert!((mttr(segment.repair_rate) * 10.0 - mttr(whole.repair_rate)).abs() < 1e-12);
    }

    #[test]
    fn length_scaling() {
        let r = rates_for_length(&unit(), 1.0).unwrap();
        assert_eq!(r.fail_rate, 0.3);
        assert_eq!(r.repair_rate, 1.0);
        let r = rates_for_length(&unit(), 50.0).unwrap();
        assert!((r.fail_rate - 15.0).abs() < 1e-12);
        assert!((r.repair_rate - 0.02).abs() < 1e-15);
        assert!(rates_for_length(&unit(), 0.0).is_err());
        assert!(rates_for_length(&unit(), -3.0).is_err());
    }

    #[test]
    fn transition_matrix_limits() {
        let rates = rates_for_length(&unit(), 50.0).unwrap();
        let at0 = transition_probabilities(0.0, &rates).unwrap();
        assert_eq!(at0.p11, 1.0);
        assert_eq!(at0.p00, 1.0);
        assert_eq!(at0.p10, 0.0);
        assert_eq!(at0.p01, 0.0);
        let late = transition_probabilities(1e6, &rates).unwrap();
        let ss = steady_state(&rates);
        assert!((late.p11 - ss.p_work).abs() < 1e-12);
        assert!((late.p01 - ss.p_work).abs() < 1e-12);
        assert!(transition_probabilities(-1.0, &rates).is_err());
    }

    #[test]
    fn equal_rates_half_life() {
        // lambda = mu and (lambda+mu) t = ln 2 puts the decay factor at 1/2,
        // so p11 = 1/2 + 1/2 * 1/2 = 3/4.
        let rates = ComponentRates { length_m: 1.0, fail_rate: 1.0, repair_rate: 1.0 };
        let t = std::f64::consts::LN_2 / 2.0;
        let p = transition_probabilities(t, &rates).unwrap();
        assert!((p.p11 - 0.75).abs() < 1e-15);
        assert!((p.p00 - 0.75).abs() < 1e-15);
    }

    #[test]
    fn rows_sum_to_one_exactly() {
        let rates = rates_for_length(&unit(), 7.3).unwrap();
        let mut t = 0.0;
        while t < 20.0 {
            let p = transition_probabilities(t, &rates).unwrap();
            assert_eq!(p.p11 + p.p10, 1.0);
            assert_eq!(p.p00 + p.p01, 1.0);
            assert!(p.p11 >= 0.0 && p.p11 <= 1.0);
            assert!(p.p00 >= 0.0 && p.p00 <= 1.0);
            t += 0.37;
        }
    }

    #[test]
    fn chapman_kolmogorov() {
        let rates = rates_for_length(&unit(), 12.0).unwrap();
        for &(t, s) in &[(0.1, 0.9), (1.0, 2.0), (0.0, 5.0), (3.3, 0.07)] {
            let a = transition_probabilities(t, &rates).unwrap();
            let b = transition_probabilities(s, &rates).unwrap();
            let ab = transition_probabilities(t + s, &rates).unwrap();
            let p11 = a.p11 * b.p11 + a.p10 * b.p01;
            let p01 = a.p01 * b.p11 + a.p00 * b.p01;
            assert!((p11 - ab.p11).abs() < 1e-12);
            assert!((p01 - ab.p01).abs() < 1e-12);
        }
    }

    #[test]
    fn relaxation_is_monotone() {
        let rates = rates_for_length(&unit(), 9.0).unwrap();
        let ss = steady_state(&rates);
        let mut prev = f64::INFINITY;
        let mut t = 0.0;
        while t < 5.0 {
            let gap = (transition_probabilities(t, &rates).unwrap().p11 - ss.p_work).abs();
            assert!(gap < prev);
            prev = gap;
            t += 0.1;
        }
    }

    #[test]
    fn steady_state_reference() {
        let rates = rates_for_length(&unit(), 50.0).unwrap();
        let ss = steady_state(&rates);
        assert!((ss.p_work - 1.0 / 751.0).abs() < 1e-15);
        assert!((ss.p_work - 0.0013315579227696406).abs() < 1e-15);
        let via_f3r = steady_state_from_f3r(unit().f3r(), 50.0);
        assert!((ss.p_work / via_f3r.p_work - 1.0).abs() < 1e-12);
        // MTTF / (MTTF + MTTR) identity.
        let avail = mttf(rates.fail_rate) / (mttf(rates.fail_rate) + mttr(rates.repair_rate));
        assert!((ss.p_work - avail).abs() < 1e-12);
        // Vanishing F3R means an always-working component.
        assert!((steady_state_from_f3r(1e-18, 50.0).p_work - 1.0).abs() < 1e-12);
        // Balanced rates sit at one half.
        let bal = ComponentRates { length_m: 1.0, fail_rate: 2.0, repair_rate: 2.0 };
        assert_eq!(steady_state(&bal).p_work, 0.5);
    }

    #[test]
    fn trajectory_is_deterministic_and_alternates() {
        let rates = rates_for_length(&unit(), 5.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let a = simulate_trajectory(&rates, WgState::Working, 100.0, &mut rng).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let b = simulate_trajectory(&rates, WgState::Working, 100.0, &mut rng).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[0].0, WgState::Working);
        for pair in a.windows(2) {
            assert_ne!(pair[0].0, pair[1].0);
            assert!(pair[0].1 > 0.0);
        }
        let total: f64 = a.iter().map(|&(_, h)| h).sum();
        assert!(total >= 100.0);
    }

    #[test]
    fn trajectory_rejects_degenerate_rates() {
        let rates = ComponentRates { length_m: 1.0, fail_rate: 0.0, repair_rate: 1.0 };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(simulate_trajectory(&rates, WgState::Working, 1.0, &mut rng).is_err());
    }

    #[test]
    fn state_lookup_walks_intervals() {
        let traj = vec![(WgState::Working, 1.0), (WgState::Failed, 2.0), (WgState::Working, 1.0)];
        assert_eq!(state_at(&traj, 0.5), WgState::Working);
        assert_eq!(state_at(&traj, 1.5), WgState::Failed);
        assert_eq!(state_at(&traj, 3.5), WgState::Working);
    }

    #[test]
    fn steady_sampling_degenerate_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let always = SteadyState { p_work: 1.0, p_fail: 0.0 };
        let never = SteadyState { p_work: 0.0, p_fail: 1.0 };
        for _ in 0..100 {
            assert_eq!(sample_steady_state(&always, &mut rng), WgState::Working);
            assert_eq!(sample_steady_state(&never, &mut rng), WgState::Failed);
        }
    }
}
