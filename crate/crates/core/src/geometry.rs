//! Uniform linear array description and the near-field boundaries derived
//! from it: Rayleigh distance, effective beamfocused Rayleigh distance (EBRD)
//! and the 3 dB beamdepth of a focused beam.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Physical description of a ULA.
///
/// The aperture is `D = N·d` (not `(N-1)·d`); with N = 256 at 28 GHz this
/// puts the Rayleigh distance at ≈350.8 m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayConfig {
    carrier_frequency: f64,
    element_count: usize,
    element_spacing: f64,
}

impl ArrayConfig {
    pub fn new(carrier_frequency: f64, element_count: usize, element_spacing: f64) -> Result<Self> {
        if !(carrier_frequency.is_finite() && carrier_frequency > 0.0) {
            return Err(Error::InvalidArray(format!(
                "carrier frequency must be positive, got {carrier_frequency}"
            )));
        }
        if element_count < 2 {
            return Err(Error::InvalidArray(format!(
                "need at least 2 elements, got {element_count}"
            )));
        }
        if !(element_spacing.is_finite() && element_spacing > 0.0) {
            return Err(Error::InvalidArray(format!(
                "element spacing must be positive, got {element_spacing}"
            )));
        }
        Ok(ArrayConfig {
            carrier_frequency,
            element_count,
            element_spacing,
        })
    }

    /// Array with the default half-wavelength spacing.
    pub fn half_wavelength(carrier_frequency: f64, element_count: usize) -> Result<Self> {
        if !(carrier_frequency.is_finite() && carrier_frequency > 0.0) {
            return Err(Error::InvalidArray(format!(
                "carrier frequency must be positive, got {carrier_frequency}"
            )));
        }
        Self::new(
            carrier_frequency,
            element_count,
            0.5 * SPEED_OF_LIGHT / carrier_frequency,
        )
    }

    /// Spacing given as a multiple of the wavelength.
    pub fn with_spacing_ratio(
        carrier_frequency: f64,
        element_count: usize,
        spacing_over_lambda: f64,
    ) -> Result<Self> {
        if !(carrier_frequency.is_finite() && carrier_frequency > 0.0) {
            return Err(Error::InvalidArray(format!(
                "carrier frequency must be positive, got {carrier_frequency}"
            )));
        }
        Self::new(
            carrier_frequency,
            element_count,
            spacing_over_lambda * SPEED_OF_LIGHT / carrier_frequency,
        )
    }

    pub fn carrier_frequency(&self) -> f64 {
        self.carrier_frequency
    }

    pub fn element_count(&self) -> usize {
        self.element_count
    }

    pub fn element_spacing(&self) -> f64 {
        self.element_spacing
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_frequency
    }

    /// ν = 2π/λ.
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength()
    }

    pub fn spacing_over_wavelength(&self) -> f64 {
        self.element_spacing / self.wavelength()
    }

    /// True when `d = λ/2` to within rounding, which the Fresnel closed form
    /// assumes.
    pub fn is_half_wavelength(&self) -> bool {
        (self.spacing_over_wavelength() - 0.5).abs() < 1e-9
    }

    /// D = N·d.
    pub fn aperture(&self) -> f64 {
        self.element_count as f64 * self.element_spacing
    }

    /// 2D²/λ.
    pub fn rayleigh_distance(&self) -> f64 {
        let d = self.aperture();
        2.0 * d * d / self.wavelength()
    }

    /// Effective beamfocused Rayleigh distance `(R_d/10)·cos²θ`: beyond it a
    /// focused beam no longer has a finite 3 dB depth.
    pub fn ebrd(&self, theta: f64) -> f64 {
        let c = theta.cos();
        self.rayleigh_distance() / 10.0 * c * c
    }

    /// 3 dB beamdepth of a beam focused at `(theta, focus_range)`.
    ///
    /// Returns [`BeamDepth::Unbounded`] at and beyond the EBRD, where the
    /// approximation's denominator vanishes or turns negative.
    pub fn beamdepth(&self, theta: f64, focus_range: f64) -> BeamDepth {
        let c = theta.cos();
        let rc = self.rayleigh_distance() * c * c;
        let r = focus_range;
        if !(r > 0.0) || !(rc - 10.0 * r > 0.0) {
            return BeamDepth::Unbounded;
        }
        let far = r * rc / (rc - 10.0 * r);
        let near = r * rc / (rc + 10.0 * r);
        BeamDepth::Finite(far - near)
    }

    /// Free-space path-loss amplitude `λ/(4πr)`.
    pub fn path_loss_amplitude(&self, range: f64) -> f64 {
        self.wavelength() / (4.0 * PI * range)
    }

    /// Identity of this array for cache and table validation.
    pub fn fingerprint(&self) -> ConfigFingerprint {
        ConfigFingerprint {
            frequency_hz: self.carrier_frequency,
            element_count: self.element_count,
            spacing_over_lambda: self.spacing_over_wavelength(),
            aperture_m: self.aperture(),
            rayleigh_m: self.rayleigh_distance(),
        }
    }
}

/// Result of the beamdepth formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BeamDepth {
    Finite(f64),
    Unbounded,
}

impl BeamDepth {
    pub fn finite(self) -> Option<f64> {
        match self {
            BeamDepth::Finite(v) => Some(v),
            BeamDepth::Unbounded => None,
        }
    }
}

/// Summary of the array parameters a lookup table was generated for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfigFingerprint {
    pub frequency_hz: f64,
    pub element_count: usize,
    pub spacing_over_lambda: f64,
    pub aperture_m: f64,
    pub rayleigh_m: f64,
}

impl ConfigFingerprint {
    /// Equality up to relative rounding in the derived quantities.
    pub fn matches(&self, other: &ConfigFingerprint) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0);
        self.element_count == other.element_count
            && close(self.frequency_hz, other.frequency_hz)
            && close(self.spacing_over_lambda, other.spacing_over_lambda)
            && close(self.aperture_m, other.aperture_m)
            && close(self.rayleigh_m, other.rayleigh_m)
    }
}

impl fmt::Display for ConfigFingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "frequency_hz={} n={} d_over_lambda={} aperture_m={} rayleigh_m={}",
            self.frequency_hz,
            self.element_count,
            self.spacing_over_lambda,
            self.aperture_m,
            self.rayleigh_m
        )
    }
}

/// A location `(θ, r)` in the array's polar frame, measured from the array
/// centre. `θ` is the spatial angle from broadside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    angle: f64,
    range: f64,
}

impl PolarPoint {
    pub fn new(angle: f64, range: f64) -> Result<Self> {
        if !(angle.is_finite() && angle.abs() < FRAC_PI_2) {
            return Err(Error::InvalidPoint(format!(
                "angle {angle} outside (-pi/2, pi/2)"
            )));
        }
        if !(range.is_finite() && range > 0.0) {
            return Err(Error::InvalidPoint(format!(
                "range {range} must be positive and finite"
            )));
        }
        Ok(PolarPoint { angle, range })
    }

    pub fn from_sin(sin_theta: f64, range: f64) -> Result<Self> {
        if !(sin_theta.abs() < 1.0) {
            return Err(Error::InvalidPoint(format!(
                "sin(theta) = {sin_theta} outside (-1, 1)"
            )));
        }
        Self::new(sin_theta.asin(), range)
    }

    /// Point from broadside/axial Cartesian coordinates (x along the array,
    /// y away from it).
    pub fn from_cartesian(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) {
            return Err(Error::InvalidPoint(format!(
                "y = {y} must be in front of the array"
            )));
        }
        Self::new(x.atan2(y), x.hypot(y))
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn range(&self) -> f64 {
        self.range
    }

    pub fn sin_angle(&self) -> f64 {
        self.angle.sin()
    }

    pub fn to_cartesian(&self) -> (f64, f64) {
        (self.range * self.angle.sin(), self.range * self.angle.cos())
    }
}
