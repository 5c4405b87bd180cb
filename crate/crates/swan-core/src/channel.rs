//! Physical constants, deployment geometry, and the line-of-sight /
//! in-waveguide channel coefficients for a single pinching antenna.

use std::f64::consts::TAU;

use crate::error::{require, Error, Result};
use crate::stats::wrap_nearest;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// RF front-end parameters with the derived wave quantities precomputed in
/// double precision at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfParams {
    /// Carrier frequency (Hz).
    pub carrier_hz: f64,
    /// Effective refractive index of the dielectric waveguide.
    pub refractive_index: f64,
    /// Transmit power (W).
    pub tx_power_w: f64,
    /// Noise power (W).
    pub noise_w: f64,
    /// Minimum inter-antenna spacing (m).
    pub min_spacing_m: f64,
    wavelength_m: f64,
    guided_wavelength_m: f64,
    wavenumber: f64,
    free_space_gain_m2: f64,
}

impl RfParams {
    pub fn new(
        carrier_hz: f64,
        refractive_index: f64,
        tx_power_w: f64,
        noise_w: f64,
        min_spacing_m: f64,
    ) -> Result<Self> {
        require(carrier_hz > 0.0, "carrier_hz", carrier_hz, "> 0")?;
        require(refractive_index >= 1.0, "refractive_index", refractive_index, ">= 1")?;
        require(tx_power_w > 0.0, "tx_power_w", tx_power_w, "> 0")?;
        require(noise_w > 0.0, "noise_w", noise_w, "> 0")?;
        require(min_spacing_m >= 0.0, "min_spacing_m", min_spacing_m, ">= 0")?;
        let wavelength_m = SPEED_OF_LIGHT / carrier_hz;
        Ok(Self {
            carrier_hz,
            refractive_index,
            tx_power_w,
            noise_w,
            min_spacing_m,
            wavelength_m,
            guided_wavelength_m: wavelength_m / refractive_index,
            wavenumber: TAU / wavelength_m,
            free_space_gain_m2: (SPEED_OF_LIGHT / (4.0 * std::f64::consts::PI * carrier_hz)).powi(2),
        })
    }

    /// Free-space wavelength (m).
    pub fn wavelength(&self) -> f64 {
        self.wavelength_m
    }

    /// Guided wavelength inside the dielectric (m).
    pub fn guided_wavelength(&self) -> f64 {
        self.guided_wavelength_m
    }

    /// Free-space wavenumber (rad/m).
    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    /// Squared amplitude gain of the line-of-sight channel at 1 m, i.e.
    /// (wavelength / 4 pi)^2 in m^2.
    pub fn free_space_gain(&self) -> f64 {
        self.free_space_gain_m2
    }

    /// Received SNR of an antenna at distance `dist_m` from the user.
    pub fn snr_at_distance_sq(&self, dist_sq_m2: f64) -> f64 {
        self.tx_power_w * self.free_space_gain_m2 / (self.noise_w * dist_sq_m2)
    }
}

/// Service-region and waveguide deployment geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    /// Service-region width along the waveguide axis (m).
    pub width_x_m: f64,
    /// Service-region depth across the waveguide axis (m).
    pub depth_y_m: f64,
    /// Waveguide deployment height (m).
    pub height_m: f64,
    /// User position (m); the model places the user on the ground plane.
    pub user: [f64; 3],
    /// x-coordinate of the first feed point (m).
    pub first_feed_x_m: f64,
    lateral_sq_m2: f64,
}

impl Geometry {
    pub fn new(
        width_x_m: f64,
        depth_y_m: f64,
        height_m: f64,
        user: [f64; 3],
        first_feed_x_m: f64,
    ) -> Result<Self> {
        require(width_x_m > 0.0, "width_x_m", width_x_m, "> 0")?;
        require(height_m > 0.0, "height_m", height_m, "> 0")?;
        let lateral_sq_m2 = user[1] * user[1] + (height_m - user[2]) * (height_m - user[2]);
        require(lateral_sq_m2 > 0.0, "lateral_sq_m2", lateral_sq_m2, "> 0")?;
        if user[0] < first_feed_x_m || user[0] > first_feed_x_m + width_x_m {
            return Err(Error::UserOutsideRegion {
                u_x: user[0],
                lo: first_feed_x_m,
                hi: first_feed_x_m + width_x_m,
            });
        }
        Ok(Self { width_x_m, depth_y_m, height_m, user, first_feed_x_m, lateral_sq_m2 })
    }

    /// User x-coordinate (m).
    pub fn user_x(&self) -> f64 {
        self.user[0]
    }

    /// Squared lateral distance from the user to the waveguide axis,
    /// u_y^2 + (height - u_z)^2 (m^2).
    pub fn lateral_sq(&self) -> f64 {
        self.lateral_sq_m2
    }

    /// Straight-line distance from an antenna at `pa_x` to the user (m).
    pub fn range_to_user(&self, pa_x: f64) -> f64 {
        let dx = pa_x - self.user[0];
        (dx * dx + self.lateral_sq_m2).sqrt()
    }
}

/// Polar form of a complex channel coefficient; the phase is normalized to
/// [0, 2 pi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexCoeff {
    pub amplitude: f64,
    pub phase: f64,
}

impl ComplexCoeff {
    pub fn new(amplitude: f64, phase: f64) -> Self {
        debug_assert!(amplitude >= 0.0);
        Self { amplitude, phase: normalize_angle(phase) }
    }

    /// Real and imaginary parts.
    pub fn to_cartesian(self) -> (f64, f64) {
        (self.amplitude * self.phase.cos(), self.amplitude * self.phase.sin())
    }

    /// Product of two coefficients: amplitudes multiply, phases add.
    pub fn product(self, other: ComplexCoeff) -> ComplexCoeff {
        ComplexCoeff::new(self.amplitude * other.amplitude, self.phase + other.phase)
    }
}

fn normalize_angle(phase: f64) -> f64 {
    let p = phase.rem_euclid(TAU);
    // rem_euclid can return the period itself after rounding.
    if p >= TAU {
        0.0
    } else {
        p
    }
}

/// Phase accumulated over a path of `len_m` metres at spatial period
/// `period_m`, i.e. (-2 pi len / period) mod 2 pi.
///
/// The path is reduced modulo the period before scaling so that long paths do
/// not lose the sub-wavelength detail.
fn path_phase(len_m: f64, period_m: f64) -> f64 {
    normalize_angle(-TAU * wrap_nearest(len_m, period_m) / period_m)
}

/// Free-space line-of-sight coefficient between an antenna at `pa_x` and the
/// user: amplitude sqrt(gain)/r, phase -k0 r.
pub fn free_space_channel(pa_x: f64, rf: &RfParams, geo: &Geometry) -> ComplexCoeff {
    let r = geo.range_to_user(pa_x);
    ComplexCoeff::new(rf.free_space_gain().sqrt() / r, path_phase(r, rf.wavelength()))
}

/// In-waveguide propagation coefficient from the feed at `feed_x` to the
/// antenna at `pa_x`: unit amplitude (in-guide attenuation is not modeled),
/// phase -(2 pi / guided wavelength)(pa_x - feed_x).
pub fn in_waveguide_phase(feed_x: f64, pa_x: f64, rf: &RfParams) -> Result<ComplexCoeff> {
    if pa_x < feed_x {
        return Err(Error::AntennaBeforeFeed { feed_x, pa_x });
    }
    Ok(ComplexCoeff::new(1.0, path_phase(pa_x - feed_x, rf.guided_wavelength())))
}

/// Received SNR of a single pinching antenna at `pa_x`:
/// P * gain / (sigma^2 ((pa_x - u_x)^2 + lateral^2)).
pub fn snr_single_pa(pa_x: f64, rf: &RfParams, geo: &Geometry) -> f64 {
    let dx = pa_x - geo.user_x();
    rf.snr_at_distance_sq(dx * dx + geo.lateral_sq())
}

/// Spectral efficiency log2(1 + snr) in bits/s/Hz.
pub fn rate(snr: f64) -> f64 {
    debug_assert!(snr >= 0.0);
    (1.0 + snr).log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_rf() -> RfParams {
        // 28 GHz, n_eff 1.4, 10 dBm tx, -90 dBm noise, half-wavelength spacing.
        let lambda = SPEED_OF_LIGHT / 28e9;
        RfParams::new(28e9, 1.4, 0.01, 1e-12, lambda / 2.0).unwrap()
    }

    fn reference_geo() -> Geometry {
        Geometry::new(50.0, 20.0, 3.0, [0.0, 0.0, 0.0], -25.0).unwrap()
    }

    #[test]
    fn derived_wave_quantities() {
        let rf = reference_rf();
        assert!((rf.wavelength() - 0.0107068735).abs() < 1e-15);
        assert!((rf.guided_wavelength() - rf.wavelength() / 1.4).abs() < 1e-18);
        // Independent route: gain must equal c^2 / (16 pi^2 f^2).
        let direct = SPEED_OF_LIGHT * SPEED_OF_LIGHT
            / (16.0 * std::f64::consts::PI.powi(2) * 28e9f64.powi(2));
        assert!((rf.free_space_gain() / direct - 1.0).abs() < 1e-12);
        assert!((rf.free_space_gain() - 7.259481705540116e-7).abs() < 1e-19);
        // gain * (4 pi / lambda)^2 == 1
        let k = 4.0 * std::f64::consts::PI / rf.wavelength();
        assert!((rf.free_space_gain() * k * k - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(RfParams::new(0.0, 1.4, 0.01, 1e-12, 0.0).is_err());
        assert!(RfParams::new(28e9, 0.9, 0.01, 1e-12, 0.0).is_err());
        assert!(RfParams::new(28e9, 1.4, 0.01, -1.0, 0.0).is_err());
        assert!(Geometry::new(50.0, 20.0, 0.0, [0.0, 0.0, 0.0], -25.0).is_err());
        // User on the waveguide axis would give a zero lateral distance.
        assert!(Geometry::new(50.0, 20.0, 3.0, [0.0, 0.0, 3.0], -25.0).is_err());
        // User outside the span.
        assert!(Geometry::new(50.0, 20.0, 3.0, [30.0, 0.0, 0.0], -25.0).is_err());
    }

    #[test]
    fn free_space_overhead_amplitude() {
        let rf = reference_rf();
        let geo = reference_geo();
        let h = free_space_channel(0.0, &rf, &geo);
        assert!((h.amplitude - rf.free_space_gain().sqrt() / 3.0).abs() < 1e-18);
    }

    #[test]
    fn free_space_offset_amplitude() {
        // 4 m along the guide, lateral^2 = 9 => range 5.
        let rf = reference_rf();
        let geo = reference_geo();
        let h = free_space_channel(4.0, &rf, &geo);
        assert!((geo.range_to_user(4.0) - 5.0).abs() < 1e-12);
        assert!((h.amplitude - 1.7040518425846224e-4).abs() < 1e-15);
    }

    #[test]
    fn free_space_phase_periodicity() {
        let rf = reference_rf();
        let lam = rf.wavelength();
        // Place the user so the ranges come out at exact wavelength multiples.
        let geo = Geometry::new(50.0, 20.0, lam, [0.0, 0.0, 0.0], -25.0).unwrap();
        let p1 = free_space_channel(0.0, &rf, &geo).phase;
        let geo2 = Geometry::new(50.0, 20.0, 2.0 * lam, [0.0, 0.0, 0.0], -25.0).unwrap();
        let p2 = free_space_channel(0.0, &rf, &geo2).phase;
        assert_eq!(p1, p2);
        assert_eq!(p1, 0.0);
    }

    #[test]
    fn guided_phase_cases() {
        let rf = reference_rf();
        let z = in_waveguide_phase(2.0, 2.0, &rf).unwrap();
        assert_eq!(z.amplitude, 1.0);
        assert_eq!(z.phase, 0.0);
        let one_wl = in_waveguide_phase(0.0, rf.guided_wavelength(), &rf).unwrap();
        assert_eq!(one_wl.phase, 0.0);
        let half = in_waveguide_phase(0.0, rf.guided_wavelength() / 2.0, &rf).unwrap();
        assert!((half.phase - std::f64::consts::PI).abs() < 1e-12);
        assert!(in_waveguide_phase(2.0, 1.0, &rf).is_err());
    }

    #[test]
    fn overhead_snr_reference() {
        let rf = reference_rf();
        let geo = reference_geo();
        let snr = snr_single_pa(0.0, &rf, &geo);
        assert!((snr - 806.6090783933463).abs() < 1e-9);
        assert!((10.0 * snr.log10() - 29.0666).abs() < 1e-3);
    }

    #[test]
    fn snr_maximized_overhead_and_inverse_square() {
        let rf = reference_rf();
        let geo = reference_geo();
        let peak = snr_single_pa(geo.user_x(), &rf, &geo);
        let mut x = -25.0;
        while x <= 25.0 {
            assert!(snr_single_pa(x, &rf, &geo) <= peak);
            x += 0.25;
        }
        // Doubling the squared distance halves the SNR.
        let s1 = rf.snr_at_distance_sq(9.0);
        let s2 = rf.snr_at_distance_sq(18.0);
        assert!((s1 / s2 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn magnitude_product_matches_snr() {
        let rf = reference_rf();
        let geo = reference_geo();
        for &pa_x in &[-25.0, -7.3, 0.0, 0.31, 12.9, 25.0] {
            let h_o = free_space_channel(pa_x, &rf, &geo);
            let h_i = in_waveguide_phase(-25.0, pa_x, &rf).unwrap();
            let combined = h_i.product(h_o);
            let via_channel = rf.tx_power_w * combined.amplitude * combined.amplitude / rf.noise_w;
            let direct = snr_single_pa(pa_x, &rf, &geo);
            assert!((via_channel / direct - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rate_reference_points() {
        assert_eq!(rate(0.0), 0.0);
        assert_eq!(rate(1.0), 1.0);
        assert_eq!(rate(3.0), 2.0);
    }
}
