//! The five experiment commands: three CSV sweeps, the placement table, and
//! the cross-validation report.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use swan_core::montecarlo::{estimate_op_sa, estimate_pnr, Architecture, McConfig, OutageScenario};
use swan_core::reliability::{
    empirical_working_fractions, transition_probabilities, ComponentRates, WgState,
};
use swan_core::stats::wrap_nearest;
use swan_core::swan::sa_bound_threshold;
use swan_core::{
    electrical_length, gain_sa, gain_ss, op_conventional, op_sa_bruteforce, op_sa_gaussian_bound,
    op_ss, place_antennas, pnr_conventional, pnr_sa, pnr_ss, sa_moments, sa_moments_symmetric,
    snr_single_pa, PlacementSolution, SegmentedWaveguide,
};

use crate::config::{Axis, ExperimentConfig};

/// One resolved point of a sweep.
struct SweepPoint {
    axis_value: f64,
    f3r: f64,
    width: f64,
    segments: usize,
}

fn sweep_points(cfg: &ExperimentConfig) -> Result<Vec<SweepPoint>, String> {
    let values = cfg.range.values();
    if values.is_empty() {
        return Err("sweep range produced no values".into());
    }
    values
        .into_iter()
        .map(|v| match cfg.axis {
            Axis::SegmentCount => {
                let m = v.round();
                if (v - m).abs() > 1e-9 || m < 1.0 {
                    return Err(format!("segment-count sweep needs positive integers, got {v}"));
                }
                Ok(SweepPoint { axis_value: v, f3r: cfg.f3r, width: cfg.width_x_m, segments: m as usize })
            }
            Axis::SpanWidth => {
                let l = cfg.fixed_segment_len();
                let m = (v / l).round();
                if m < 1.0 || (m * l - v).abs() > 1e-9 {
                    return Err(format!(
                        "span width {v} is not a multiple of the segment length {l}"
                    ));
                }
                Ok(SweepPoint { axis_value: v, f3r: cfg.f3r, width: v, segments: m as usize })
            }
            Axis::F3r => {
                if v <= 0.0 {
                    return Err(format!("failure-repair ratio sweep needs positive values, got {v}"));
                }
                Ok(SweepPoint { axis_value: v, f3r: v, width: cfg.width_x_m, segments: cfg.segments })
            }
        })
        .collect()
}

fn fmt(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v}")
    }
}

fn csv(cfg: &ExperimentConfig, header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# config_hash={} seed={}", cfg.hash(), cfg.seed);
    let _ = writeln!(out, "{}", header.join(","));
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| fmt(v)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

const NAN: f64 = f64::NAN;

/// Closed-form and Monte Carlo PNR for every architecture across the sweep.
pub fn pnr_sweep(cfg: &ExperimentConfig) -> Result<String, String> {
    let mc = McConfig { n_trials: cfg.trials, seed: cfg.seed, batch: cfg.batch };
    let mut rows = Vec::new();
    for p in sweep_points(cfg)? {
        let wg = cfg.waveguide(p.segments, p.width)?;
        let l = wg.segment_len();
        let mut row = vec![p.axis_value, NAN, NAN, NAN, NAN, NAN, NAN, NAN, NAN, NAN];
        if cfg.protocols.conventional {
            row[1] = pnr_conventional(p.f3r, p.width);
            let est = estimate_pnr(Architecture::Conventional, p.f3r, &wg, &mc)
                .map_err(|e| e.to_string())?;
            row[4] = est.value;
            row[5] = est.std_err;
        }
        if cfg.protocols.ss {
            row[2] = pnr_ss(p.f3r, l);
            let est = estimate_pnr(Architecture::SegmentSelection, p.f3r, &wg, &mc)
                .map_err(|e| e.to_string())?;
            row[6] = est.value;
            row[7] = est.std_err;
        }
        if cfg.protocols.sa {
            row[3] = pnr_sa(p.f3r, p.width, p.segments);
            let est = estimate_pnr(Architecture::SegmentAggregation, p.f3r, &wg, &mc)
                .map_err(|e| e.to_string())?;
            row[8] = est.value;
            row[9] = est.std_err;
        }
        rows.push(row);
    }
    Ok(csv(
        cfg,
        &[
            "axis_value",
            "pnr_conventional",
            "pnr_ss",
            "pnr_sa",
            "mc_conventional",
            "mc_conventional_stderr",
            "mc_ss",
            "mc_ss_stderr",
            "mc_sa",
            "mc_sa_stderr",
        ],
        &rows,
    ))
}

/// Relative PNR gains of both protocols with their asymptote columns.
pub fn gain_sweep(cfg: &ExperimentConfig) -> Result<String, String> {
    let mut rows = Vec::new();
    for p in sweep_points(cfg)? {
        let m = p.segments as f64;
        rows.push(vec![
            p.axis_value,
            gain_ss(p.f3r, p.width, p.segments),
            gain_sa(p.f3r, p.width, p.segments),
            m * m,
            m * m * m,
            1.0 + p.f3r * p.width * p.width,
        ]);
    }
    Ok(csv(
        cfg,
        &["axis_value", "gain_ss", "gain_sa", "m_squared", "m_cubed", "limit_gain"],
        &rows,
    ))
}

/// Outage probability across the sweep: closed forms, Monte Carlo with
/// optimized and center placements, the Gaussian bound, and (for small
/// segment counts) the exact subset enumeration.
pub fn op_sweep(cfg: &ExperimentConfig) -> Result<String, String> {
    let rf = cfg.rf_params()?;
    let mc = McConfig { n_trials: cfg.trials, seed: cfg.seed, batch: cfg.batch };
    let mut rows = Vec::new();
    for p in sweep_points(cfg)? {
        let geo = cfg.geometry(p.width)?;
        let wg = cfg.waveguide(p.segments, p.width)?;
        let spec = cfg.outage_spec(&rf, &geo);
        let peak = snr_single_pa(geo.user_x(), &rf, &geo);
        let mut row = vec![p.axis_value, NAN, NAN, NAN, NAN, NAN, NAN, NAN, NAN, NAN, NAN];
        if cfg.protocols.conventional {
            row[1] = op_conventional(p.f3r, p.width, peak, &spec);
        }
        if cfg.protocols.ss {
            row[2] = op_ss(p.f3r, wg.segment_len(), peak, &spec);
        }
        if cfg.protocols.sa {
            let optimized = place_antennas(&wg, &rf, &geo).map_err(|e| e.to_string())?;
            let center = PlacementSolution::segment_centers(&wg, &rf, &geo).map_err(|e| e.to_string())?;
            let scn = OutageScenario { f3r: p.f3r, wg: &wg, rf: &rf, geo: &geo, spec: &spec };
            let opt = estimate_op_sa(&scn, &optimized, &mc);
            row[3] = opt.exact.value;
            row[4] = opt.exact.std_err;
            row[5] = opt.approx.value;
            row[6] = opt.approx.std_err;
            let cen = estimate_op_sa(&scn, &center, &mc);
            row[7] = cen.exact.value;
            row[8] = cen.exact.std_err;
            row[9] = op_sa_gaussian_bound(&sa_moments(&optimized, p.f3r, &wg, &geo), p.segments, &rf, &spec);
            if p.segments <= swan_core::swan::MAX_BRUTE_FORCE_SEGMENTS {
                row[10] =
                    op_sa_bruteforce(&optimized, p.f3r, &wg, &rf, &geo, &spec).map_err(|e| e.to_string())?;
            }
        }
        rows.push(row);
    }
    Ok(csv(
        cfg,
        &[
            "axis_value",
            "op_conventional",
            "op_ss",
            "op_sa_mc_optimized",
            "op_sa_mc_optimized_stderr",
            "op_sa_mc_optimized_approx",
            "op_sa_mc_optimized_approx_stderr",
            "op_sa_mc_center",
            "op_sa_mc_center_stderr",
            "op_sa_gaussian_bound",
            "op_sa_bruteforce",
        ],
        &rows,
    ))
}

/// Per-segment table of the aligned placement for the configured layout.
pub fn placement_dump(cfg: &ExperimentConfig) -> Result<String, String> {
    let rf = cfg.rf_params()?;
    let geo = cfg.geometry(cfg.width_x_m)?;
    let wg = cfg.waveguide(cfg.segments, cfg.width_x_m)?;
    let sol = place_antennas(&wg, &rf, &geo).map_err(|e| e.to_string())?;
    let center_len = electrical_length(sol.psi[sol.m_star], wg.feed_x(sol.m_star), &geo, &rf)
        .map_err(|e| e.to_string())?;
    let mut rows = Vec::new();
    for m in 0..wg.segments() {
        let len = electrical_length(sol.psi[m], wg.feed_x(m), &geo, &rf).map_err(|e| e.to_string())?;
        rows.push(vec![
            (m + 1) as f64,
            wg.feed_x(m),
            sol.psi_hat[m],
            sol.nu[m],
            sol.psi[m],
            len,
            wrap_nearest(len - center_len, rf.wavelength()).abs(),
            if sol.feasible[m] { 1.0 } else { 0.0 },
        ]);
    }
    Ok(csv(
        cfg,
        &["m", "psi0", "psi_hat", "nu", "psi", "electrical_length", "residual_mod_lambda", "feasible"],
        &rows,
    ))
}

struct Check {
    name: &'static str,
    detail: String,
    pass: bool,
}

fn ratio_or_zero(diff: f64, se: f64) -> f64 {
    if diff == 0.0 {
        0.0
    } else {
        diff / se
    }
}

/// Runs the oracle suite and renders a deterministic report. Returns the
/// report text and whether every check passed.
pub fn validate(cfg: &ExperimentConfig) -> Result<(String, bool), String> {
    let rf = cfg.rf_params()?;
    let mut checks: Vec<Check> = Vec::new();

    // Transient transition probabilities against discrete-event trajectories,
    // from both initial states.
    {
        let rates = ComponentRates { length_m: 1.0, fail_rate: cfg.f3r, repair_rate: 1.0 };
        let checkpoints: Vec<f64> = (1..=10).map(|i| 0.25 * i as f64).collect();
        let n = cfg.trials;
        let mut worst: f64 = 0.0;
        for (salt, start) in [(0x11u64, WgState::Working), (0x22, WgState::Failed)] {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ salt);
            let fractions = empirical_working_fractions(&rates, start, &checkpoints, n, &mut rng)
                .map_err(|e| e.to_string())?;
            for (&t, &hat) in checkpoints.iter().zip(&fractions) {
                let p = transition_probabilities(t, &rates).map_err(|e| e.to_string())?;
                let expect = if start.is_working() { p.p11 } else { p.p01 };
                let se = (expect * (1.0 - expect) / n as f64).sqrt();
                worst = worst.max(ratio_or_zero((hat - expect).abs(), se));
            }
        }
        checks.push(Check {
            name: "ctmc-transient-vs-trajectories",
            detail: format!("max deviation {worst:.3} standard errors (limit 3)"),
            pass: worst <= 3.0,
        });
    }

    // Semigroup property of the analytic transition matrix.
    {
        let rates = ComponentRates { length_m: 1.0, fail_rate: cfg.f3r, repair_rate: 1.0 };
        let grid = [0.1, 0.7, 1.3, 2.9];
        let mut worst: f64 = 0.0;
        for &t in &grid {
            for &s in &grid {
                let a = transition_probabilities(t, &rates).map_err(|e| e.to_string())?;
                let b = transition_probabilities(s, &rates).map_err(|e| e.to_string())?;
                let ab = transition_probabilities(t + s, &rates).map_err(|e| e.to_string())?;
                worst = worst.max((a.p11 * b.p11 + a.p10 * b.p01 - ab.p11).abs());
                worst = worst.max((a.p01 * b.p11 + a.p00 * b.p01 - ab.p01).abs());
            }
        }
        checks.push(Check {
            name: "chapman-kolmogorov",
            detail: format!("max residual {worst:.3e} (limit 1e-12)"),
            pass: worst <= 1e-12,
        });
    }

    // Aggregated PNR closed form against Monte Carlo.
    {
        let wg = cfg.waveguide(cfg.segments, cfg.width_x_m)?;
        let mc = McConfig { n_trials: cfg.trials, seed: cfg.seed ^ 0x33, batch: cfg.batch };
        let mut worst: f64 = 0.0;
        for (arch, closed) in [
            (Architecture::Conventional, pnr_conventional(cfg.f3r, cfg.width_x_m)),
            (Architecture::SegmentSelection, pnr_ss(cfg.f3r, wg.segment_len())),
            (Architecture::SegmentAggregation, pnr_sa(cfg.f3r, cfg.width_x_m, cfg.segments)),
        ] {
            let est = estimate_pnr(arch, cfg.f3r, &wg, &mc).map_err(|e| e.to_string())?;
            worst = worst.max(ratio_or_zero((est.value - closed).abs(), est.std_err));
        }
        checks.push(Check {
            name: "pnr-closed-forms-vs-monte-carlo",
            detail: format!("max deviation {worst:.3} standard errors (limit 3)"),
            pass: worst <= 3.0,
        });
    }

    // Subset-enumerated outage against Monte Carlo on the same criterion.
    {
        let m = cfg.segments.min(15);
        let geo = cfg.geometry(cfg.width_x_m)?;
        let wg = cfg.waveguide(m, cfg.width_x_m)?;
        let spec = cfg.outage_spec(&rf, &geo);
        let sol = place_antennas(&wg, &rf, &geo).map_err(|e| e.to_string())?;
        let exact = op_sa_bruteforce(&sol, cfg.f3r, &wg, &rf, &geo, &spec).map_err(|e| e.to_string())?;
        let scn = OutageScenario { f3r: cfg.f3r, wg: &wg, rf: &rf, geo: &geo, spec: &spec };
        let mc = McConfig { n_trials: cfg.trials, seed: cfg.seed ^ 0x44, batch: cfg.batch };
        let est = estimate_op_sa(&scn, &sol, &mc);
        let dev = ratio_or_zero((est.approx.value - exact).abs(), est.approx.std_err);
        // The enumerated bound must dominate the enumerated outage.
        let bound =
            swan_core::tail_prob_bruteforce(&sol, cfg.f3r, &wg, sa_bound_threshold(m, &rf, &spec), &geo)
                .map_err(|e| e.to_string())?;
        let dominated = bound >= exact;
        checks.push(Check {
            name: "sa-outage-enumeration-vs-monte-carlo",
            detail: format!(
                "segments {m}: deviation {dev:.3} standard errors (limit 3); bound {bound:.6e} >= outage {exact:.6e}: {dominated}"
            ),
            pass: dev <= 3.0 && dominated,
        });
    }

    // Symmetric-layout moment closed forms against the direct sums.
    {
        let m = if cfg.segments % 2 == 1 { cfg.segments.max(3) } else { cfg.segments + 1 };
        let l = 5.0;
        let width = l * m as f64;
        let geo = swan_core::Geometry::new(width, cfg.depth_y_m, cfg.height_m, [0.0, 0.0, 0.0], -width / 2.0)
            .map_err(|e| e.to_string())?;
        let wg = SegmentedWaveguide::new(m, width, -width / 2.0).map_err(|e| e.to_string())?;
        let sol = place_antennas(&wg, &rf, &geo).map_err(|e| e.to_string())?;
        let direct = sa_moments(&sol, cfg.f3r, &wg, &geo);
        let closed = sa_moments_symmetric(cfg.f3r, &wg, &geo).map_err(|e| e.to_string())?;
        let mean_dev = (closed.mean / direct.mean - 1.0).abs();
        let sd_dev = ((closed.variance / direct.variance).sqrt() - 1.0).abs();
        checks.push(Check {
            name: "symmetric-moments-vs-direct-sums",
            detail: format!(
                "segments {m}: mean deviation {:.4}%, std-dev deviation {:.4}% (limit 2%)",
                100.0 * mean_dev,
                100.0 * sd_dev
            ),
            pass: mean_dev <= 0.02 && sd_dev <= 0.02,
        });
    }

    // Alignment residuals and the closed-form shift against bisection.
    {
        let geo = cfg.geometry(cfg.width_x_m)?;
        let wg = cfg.waveguide(cfg.segments, cfg.width_x_m)?;
        let sol = place_antennas(&wg, &rf, &geo).map_err(|e| e.to_string())?;
        let center_len = electrical_length(sol.psi[sol.m_star], wg.feed_x(sol.m_star), &geo, &rf)
            .map_err(|e| e.to_string())?;
        let mut worst: f64 = 0.0;
        for m in 0..wg.segments() {
            let len = electrical_length(sol.psi[m], wg.feed_x(m), &geo, &rf).map_err(|e| e.to_string())?;
            worst = worst.max(wrap_nearest(len - center_len, rf.wavelength()).abs());
        }
        let pass = worst <= 1e-9 && sol.max_solver_gap <= 1e-10 && sol.all_feasible();
        checks.push(Check {
            name: "placement-alignment-and-shift-solver",
            detail: format!(
                "max residual {worst:.3e} m (limit 1e-9); max closed-form gap {:.3e} m (limit 1e-10); feasible {}",
                sol.max_solver_gap,
                sol.all_feasible()
            ),
            pass,
        });
    }

    let all_pass = checks.iter().all(|c| c.pass);
    let mut report = String::new();
    let _ = writeln!(report, "# validation report");
    let _ = writeln!(report, "# config_hash={} seed={}", cfg.hash(), cfg.seed);
    for c in &checks {
        let _ = writeln!(report, "{}: {} ... {}", c.name, c.detail, if c.pass { "PASS" } else { "FAIL" });
    }
    let _ = writeln!(report, "overall: {}", if all_pass { "PASS" } else { "FAIL" });
    Ok((report, all_pass))
}

/// Gnuplot script that renders every column of `csv_path` against the first.
pub fn gnuplot_script(csv_path: &str, header: &[&str]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator \",\"");
    let _ = writeln!(s, "set key outside");
    let _ = writeln!(s, "set xlabel \"{}\"", header[0]);
    let _ = writeln!(s, "set grid");
    let plots: Vec<String> = header
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, name)| !name.ends_with("stderr"))
        .map(|(i, name)| format!("\"{}\" using 1:{} with linespoints title \"{}\"", csv_path, i + 1, name))
        .collect();
    let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_cfg() -> ExperimentConfig {
        ExperimentConfig {
            trials: 20_000,
            segments: 5,
            range: crate::config::SweepRange { start: 1.0, stop: 3.0, step: 1.0 },
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn sweeps_are_deterministic() {
        let cfg = quick_cfg();
        assert_eq!(pnr_sweep(&cfg).unwrap(), pnr_sweep(&cfg).unwrap());
        assert_eq!(op_sweep(&cfg).unwrap(), op_sweep(&cfg).unwrap());
        assert_eq!(gain_sweep(&cfg).unwrap(), gain_sweep(&cfg).unwrap());
    }

    #[test]
    fn span_sweep_requires_multiples() {
        let mut cfg = quick_cfg();
        cfg.axis = Axis::SpanWidth;
        cfg.segment_len_m = Some(1.0);
        cfg.range = crate::config::SweepRange { start: 2.0, stop: 4.0, step: 1.0 };
        assert!(pnr_sweep(&cfg).is_ok());
        cfg.segment_len_m = Some(1.5);
        assert!(pnr_sweep(&cfg).is_err());
    }

    #[test]
    fn gain_rows_carry_asymptotes() {
        let cfg = quick_cfg();
        let out = gain_sweep(&cfg).unwrap();
        let last = out.lines().last().unwrap();
        let cells: Vec<f64> = last.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cells[0], 3.0);
        assert_eq!(cells[3], 9.0);
        assert_eq!(cells[4], 27.0);
        assert!((cells[5] - 751.0).abs() < 1e-9);
    }

    #[test]
    fn placement_dump_rows_align() {
        let cfg = quick_cfg();
        let out = placement_dump(&cfg).unwrap();
        let rows: Vec<&str> = out.lines().skip(2).collect();
        assert_eq!(rows.len(), 5);
        for row in rows {
            let cells: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
            assert!(cells[6] < 1e-9);
            assert_eq!(cells[7], 1.0);
        }
    }

    #[test]
    fn validation_passes_on_defaults() {
        let mut cfg = quick_cfg();
        cfg.trials = 50_000;
        let (report, pass) = validate(&cfg).unwrap();
        assert!(pass, "{report}");
        assert_eq!(report.matches("PASS").count(), 7, "{report}");
    }
}
