//! Reliability modeling and link analysis for pinching-antenna systems built
//! on dielectric waveguides.
//!
//! The waveguide alternates between working and failed states under
//! exponential lifetimes and repair times, which makes its availability a
//! two-state continuous-time Markov chain whose steady state depends only on
//! the failure-repair rate ratio and the component length. On top of that
//! model the crate provides:
//!
//! - closed-form probability of non-zero rate (PNR) and outage probability
//!   (OP) for a monolithic waveguide ([`conventional`]);
//! - the same metrics for a segmented waveguide operated by segment
//!   selection or segment aggregation, including phase-aligned antenna
//!   placement, exact subset-enumeration outage, and a moment-matched
//!   Gaussian outage bound ([`swan`]);
//! - a discrete-event trajectory simulator and seeded Monte Carlo
//!   estimators that validate every closed form ([`reliability`],
//!   [`montecarlo`]).

pub mod channel;
pub mod conventional;
pub mod error;
pub mod montecarlo;
pub mod reliability;
pub mod stats;
pub mod swan;

pub use channel::{free_space_channel, in_waveguide_phase, rate, snr_single_pa, ComplexCoeff, Geometry, RfParams, SPEED_OF_LIGHT};
pub use conventional::{op_conventional, pnr_conventional, OutageSpec};
pub use error::{Error, Result};
pub use montecarlo::{estimate_op, estimate_op_sa, estimate_pnr, Architecture, McConfig, McEstimate, OutageScenario, SaOpEstimates};
pub use reliability::{
    lifetime_cdf, mttf, mttr, rates_for_length, sample_steady_state, simulate_trajectory,
    steady_state, steady_state_from_f3r, transition_probabilities, ComponentRates, CtmcTransition,
    SteadyState, UnitRates, WgState,
};
pub use swan::{
    electrical_length, gain_sa, gain_ss, op_sa_bruteforce, op_sa_gaussian_bound, op_ss,
    place_antennas, pnr_sa, pnr_ss, sa_asymptotic_coeffs, sa_moments, sa_moments_symmetric,
    select_segment, snr_sa_approx, snr_sa_exact, tail_prob_bruteforce, AsymptoticCoeffs,
    PlacementSolution, SaMoments, SegmentStates, SegmentedWaveguide,
};
