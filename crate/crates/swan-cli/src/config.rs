//! Flat key=value experiment configuration with the reference defaults:
//! 28 GHz carrier, refractive index 1.4, half-wavelength spacing, 10 dBm
//! transmit power, -90 dBm noise, a 50 m x 20 m region with the waveguide at
//! 3 m height, the user at the origin, failure-repair ratio 0.3, and the
//! outage target at 90% of the overhead-antenna rate.
//!
//! Power enters in dBm here and is converted to watts at parse time; the
//! core library sees watts only.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};
use swan_core::{Geometry, OutageSpec, RfParams, SegmentedWaveguide};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    SegmentCount,
    SpanWidth,
    F3r,
}

impl Axis {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "M" => Ok(Axis::SegmentCount),
            "Dx" => Ok(Axis::SpanWidth),
            "eps0" => Ok(Axis::F3r),
            other => Err(format!("unknown axis {other:?}: expected M, Dx, or eps0")),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::SegmentCount => "M",
            Axis::SpanWidth => "Dx",
            Axis::F3r => "eps0",
        }
    }
}

/// Inclusive numeric range written as start:stop:step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepRange {
    pub fn parse(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("range {s:?} must be start:stop:step"));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.parse::<f64>().map_err(|e| format!("bad range component {p:?}: {e}")))
            .collect::<Result<_, _>>()?;
        let range = SweepRange { start: nums[0], stop: nums[1], step: nums[2] };
        if !range.step.is_finite() || range.step <= 0.0 {
            return Err(format!("range step must be positive, got {}", range.step));
        }
        if range.stop < range.start {
            return Err(format!("range stop {} is below start {}", range.stop, range.start));
        }
        Ok(range)
    }

    pub fn values(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut k = 0u64;
        loop {
            let v = self.start + self.step * k as f64;
            if v > self.stop + 1e-9 * self.step {
                break;
            }
            out.push(v);
            k += 1;
        }
        out
    }

    fn to_text(self) -> String {
        format!("{}:{}:{}", self.start, self.stop, self.step)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateTargetMode {
    /// Target rate is `r0_value` bits/s/Hz.
    Absolute,
    /// Target rate is `r0_value` times the overhead-antenna rate.
    Fraction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Protocols {
    pub conventional: bool,
    pub ss: bool,
    pub sa: bool,
}

impl Protocols {
    fn parse(s: &str) -> Result<Self, String> {
        let mut p = Protocols { conventional: false, ss: false, sa: false };
        for item in s.split(',') {
            match item.trim() {
                "conventional" => p.conventional = true,
                "ss" => p.ss = true,
                "sa" => p.sa = true,
                "" => {}
                other => return Err(format!("unknown protocol {other:?}")),
            }
        }
        Ok(p)
    }

    fn to_text(self) -> String {
        let mut parts = Vec::new();
        if self.conventional {
            parts.push("conventional");
        }
        if self.ss {
            parts.push("ss");
        }
        if self.sa {
            parts.push("sa");
        }
        parts.join(",")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub carrier_hz: f64,
    pub refractive_index: f64,
    pub spacing_wavelengths: f64,
    pub tx_power_dbm: f64,
    pub noise_dbm: f64,
    pub width_x_m: f64,
    pub depth_y_m: f64,
    pub height_m: f64,
    pub user_x_m: f64,
    pub user_y_m: f64,
    pub user_z_m: f64,
    /// First feed x-coordinate; centered (-width/2) when absent.
    pub first_feed_x_m: Option<f64>,
    pub f3r: f64,
    pub segments: usize,
    /// Fixed segment length for span-width sweeps; width/segments when absent.
    pub segment_len_m: Option<f64>,
    pub rate_target_mode: RateTargetMode,
    pub rate_target_value: f64,
    pub trials: u64,
    pub seed: u64,
    pub batch: u64,
    pub axis: Axis,
    pub range: SweepRange,
    pub protocols: Protocols,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            carrier_hz: 28e9,
            refractive_index: 1.4,
            spacing_wavelengths: 0.5,
            tx_power_dbm: 10.0,
            noise_dbm: -90.0,
            width_x_m: 50.0,
            depth_y_m: 20.0,
            height_m: 3.0,
            user_x_m: 0.0,
            user_y_m: 0.0,
            user_z_m: 0.0,
            first_feed_x_m: None,
            f3r: 0.3,
            segments: 10,
            segment_len_m: None,
            rate_target_mode: RateTargetMode::Fraction,
            rate_target_value: 0.9,
            trials: 1_000_000,
            seed: 1,
            batch: 1 << 16,
            axis: Axis::SegmentCount,
            range: SweepRange { start: 1.0, stop: 20.0, step: 1.0 },
            protocols: Protocols { conventional: true, ss: true, sa: true },
        }
    }
}

fn dbm_to_watts(dbm: f64) -> f64 {
    1e-3 * 10f64.powf(dbm / 10.0)
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        Self::from_text(&text)
    }

    pub fn from_text(text: &str) -> Result<Self, String> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", lineno + 1))?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| format!("line {}: {e}", lineno + 1))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num(value: &str) -> Result<f64, String> {
            value.parse::<f64>().map_err(|e| format!("bad number {value:?}: {e}"))
        }
        fn int(value: &str) -> Result<u64, String> {
            value.parse::<u64>().map_err(|e| format!("bad integer {value:?}: {e}"))
        }
        match key {
            "f_c_hz" => self.carrier_hz = num(value)?,
            "n_eff" => self.refractive_index = num(value)?,
            "delta_over_lambda" => self.spacing_wavelengths = num(value)?,
            "p_dbm" => self.tx_power_dbm = num(value)?,
            "sigma2_dbm" => self.noise_dbm = num(value)?,
            "d_x_m" => self.width_x_m = num(value)?,
            "d_y_m" => self.depth_y_m = num(value)?,
            "height_m" => self.height_m = num(value)?,
            "u_x_m" => self.user_x_m = num(value)?,
            "u_y_m" => self.user_y_m = num(value)?,
            "u_z_m" => self.user_z_m = num(value)?,
            "psi0_first_m" => self.first_feed_x_m = Some(num(value)?),
            "eps0" => self.f3r = num(value)?,
            "segments" => self.segments = int(value)? as usize,
            "segment_len_m" => self.segment_len_m = Some(num(value)?),
            "r0_mode" => {
                self.rate_target_mode = match value {
                    "absolute" => RateTargetMode::Absolute,
                    "fraction" => RateTargetMode::Fraction,
                    other => return Err(format!("unknown r0_mode {other:?}")),
                }
            }
            "r0_value" => self.rate_target_value = num(value)?,
            "trials" => self.trials = int(value)?,
            "seed" => self.seed = int(value)?,
            "batch" => self.batch = int(value)?,
            "axis" => self.axis = Axis::parse(value)?,
            "range" => self.range = SweepRange::parse(value)?,
            "protocols" => self.protocols = Protocols::parse(value)?,
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.carrier_hz <= 0.0 {
            return Err("f_c_hz must be positive".into());
        }
        if self.refractive_index < 1.0 {
            return Err("n_eff must be at least 1".into());
        }
        if self.width_x_m <= 0.0 || self.height_m <= 0.0 {
            return Err("d_x_m and height_m must be positive".into());
        }
        if self.f3r <= 0.0 {
            return Err("eps0 must be positive".into());
        }
        if self.segments == 0 {
            return Err("segments must be at least 1".into());
        }
        if self.trials == 0 {
            return Err("trials must be at least 1".into());
        }
        if self.batch == 0 {
            return Err("batch must be at least 1".into());
        }
        if self.rate_target_value < 0.0 {
            return Err("r0_value must be nonnegative".into());
        }
        Ok(())
    }

    /// Canonical text form; parsing it back yields the same configuration.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# experiment configuration (key = value, '#' starts a comment)");
        let _ = writeln!(s, "f_c_hz = {}", self.carrier_hz);
        let _ = writeln!(s, "n_eff = {}", self.refractive_index);
        let _ = writeln!(s, "delta_over_lambda = {}", self.spacing_wavelengths);
        let _ = writeln!(s, "p_dbm = {}", self.tx_power_dbm);
        let _ = writeln!(s, "sigma2_dbm = {}", self.noise_dbm);
        let _ = writeln!(s, "d_x_m = {}", self.width_x_m);
        let _ = writeln!(s, "d_y_m = {}", self.depth_y_m);
        let _ = writeln!(s, "height_m = {}", self.height_m);
        let _ = writeln!(s, "u_x_m = {}", self.user_x_m);
        let _ = writeln!(s, "u_y_m = {}", self.user_y_m);
        let _ = writeln!(s, "u_z_m = {}", self.user_z_m);
        if let Some(x) = self.first_feed_x_m {
            let _ = writeln!(s, "psi0_first_m = {x}");
        }
        let _ = writeln!(s, "eps0 = {}", self.f3r);
        let _ = writeln!(s, "segments = {}", self.segments);
        if let Some(l) = self.segment_len_m {
            let _ = writeln!(s, "segment_len_m = {l}");
        }
        let mode = match self.rate_target_mode {
            RateTargetMode::Absolute => "absolute",
            RateTargetMode::Fraction => "fraction",
        };
        let _ = writeln!(s, "r0_mode = {mode}");
        let _ = writeln!(s, "r0_value = {}", self.rate_target_value);
        let _ = writeln!(s, "trials = {}", self.trials);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "batch = {}", self.batch);
        let _ = writeln!(s, "axis = {}", self.axis.name());
        let _ = writeln!(s, "range = {}", self.range.to_text());
        let _ = writeln!(s, "protocols = {}", self.protocols.to_text());
        s
    }

    /// Short hash of the canonical text, recorded in every output.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn first_feed_for_width(&self, width_x_m: f64) -> f64 {
        self.first_feed_x_m.unwrap_or(-width_x_m / 2.0)
    }

    /// Segment length for span-width sweeps.
    pub fn fixed_segment_len(&self) -> f64 {
        self.segment_len_m.unwrap_or(self.width_x_m / self.segments as f64)
    }

    pub fn rf_params(&self) -> Result<RfParams, String> {
        let lambda = swan_core::SPEED_OF_LIGHT / self.carrier_hz;
        RfParams::new(
            self.carrier_hz,
            self.refractive_index,
            dbm_to_watts(self.tx_power_dbm),
            dbm_to_watts(self.noise_dbm),
            self.spacing_wavelengths * lambda,
        )
        .map_err(|e| e.to_string())
    }

    pub fn geometry(&self, width_x_m: f64) -> Result<Geometry, String> {
        Geometry::new(
            width_x_m,
            self.depth_y_m,
            self.height_m,
            [self.user_x_m, self.user_y_m, self.user_z_m],
            self.first_feed_for_width(width_x_m),
        )
        .map_err(|e| e.to_string())
    }

    pub fn waveguide(&self, segments: usize, width_x_m: f64) -> Result<SegmentedWaveguide, String> {
        SegmentedWaveguide::new(segments, width_x_m, self.first_feed_for_width(width_x_m))
            .map_err(|e| e.to_string())
    }

    /// Outage target; the fractional mode anchors to the overhead-antenna SNR.
    pub fn outage_spec(&self, rf: &RfParams, geo: &Geometry) -> OutageSpec {
        match self.rate_target_mode {
            RateTargetMode::Absolute => OutageSpec::new(self.rate_target_value),
            RateTargetMode::Fraction => {
                let peak = swan_core::snr_single_pa(geo.user_x(), rf, geo);
                OutageSpec::fraction_of_rate_at(self.rate_target_value, peak)
            }
        }
    }
}
