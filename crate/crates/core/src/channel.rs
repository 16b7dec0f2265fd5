//! Steering vectors, line-of-sight channel realisations, calibration
//! impairments and the noisy pilot sweep.
//!
//! Element offsets are measured from the array centre,
//! `δₙ = (n - (N-1)/2)·d`, and the near-field phase uses the exact distance
//! `rₙ = √(r² + δₙ² - 2rδₙ sinθ)`. With this sign convention
//! `b(θ, r) → a(θ)` (up to a global phase) as `r → ∞`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::beamscan::{GainProfile, ProfileSource};
use crate::codebook::Codebook;
use crate::error::{Error, Result};
use crate::geometry::{ArrayConfig, PolarPoint};
use crate::numerics::ComplexVector;

/// Far-field steering vector `a(θ)`, element `n` has phase `-νdn·sinθ`.
pub fn ff_steering(cfg: &ArrayConfig, theta: f64) -> ComplexVector {
    ff_steering_sin(cfg, theta.sin())
}

/// [`ff_steering`] parameterised directly by `sinθ`.
pub fn ff_steering_sin(cfg: &ArrayConfig, sin_theta: f64) -> ComplexVector {
    let n = cfg.element_count();
    let scale = 1.0 / (n as f64).sqrt();
    let step = -cfg.wavenumber() * cfg.element_spacing() * sin_theta;
    (0..n)
        .map(|i| Complex64::from_polar(scale, step * i as f64))
        .collect()
}

/// Exact near-field steering vector `b(θ, r)`.
pub fn nf_steering(cfg: &ArrayConfig, point: &PolarPoint) -> ComplexVector {
    let n = cfg.element_count();
    let scale = 1.0 / (n as f64).sqrt();
    let nu = cfg.wavenumber();
    let d = cfg.element_spacing();
    let r = point.range();
    let s = point.sin_angle();
    let centre = (n as f64 - 1.0) / 2.0;
    (0..n)
        .map(|i| {
            let delta = (i as f64 - centre) * d;
            let excess = delta * (delta - 2.0 * r * s);
            // rₙ - r without cancellation at large r
            let path_difference = excess / ((r * r + excess).sqrt() + r);
            Complex64::from_polar(scale, nu * path_difference)
        })
        .collect()
}

/// One line-of-sight channel draw.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    pub vector: ComplexVector,
    pub location: PolarPoint,
    pub complex_gain: Complex64,
    pub includes_path_loss: bool,
}

/// `h = √N · g · b(θ, r)` with `g = e^{-jνr}` times the path-loss amplitude
/// `λ/(4πr)` when requested.
pub fn los_channel(
    cfg: &ArrayConfig,
    point: &PolarPoint,
    include_path_loss: bool,
) -> ChannelRealization {
    let r = point.range();
    let amplitude = if include_path_loss {
        cfg.path_loss_amplitude(r)
    } else {
        1.0
    };
    let complex_gain = Complex64::from_polar(amplitude, -cfg.wavenumber() * r);
    let n = cfg.element_count() as f64;
    let vector = nf_steering(cfg, point).scaled(complex_gain * n.sqrt());
    ChannelRealization {
        vector,
        location: *point,
        complex_gain,
        includes_path_loss: include_path_loss,
    }
}

/// How calibration draws are shared across elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CalibrationGranularity {
    PerElement,
    /// One draw per contiguous block of `size` elements.
    PerSubarray {
        size: usize,
    },
}

/// Random per-element gain and phase mismatch of the array front end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationError {
    pub phase_bound: f64,
    pub amplitude_low: f64,
    pub amplitude_high: f64,
    pub granularity: CalibrationGranularity,
}

impl Default for CalibrationError {
    fn default() -> Self {
        CalibrationError {
            phase_bound: std::f64::consts::PI / 8.0,
            amplitude_low: 0.0,
            amplitude_high: 1.0,
            granularity: CalibrationGranularity::PerElement,
        }
    }
}

impl CalibrationError {
    pub fn new(
        phase_bound: f64,
        amplitude_low: f64,
        amplitude_high: f64,
        granularity: CalibrationGranularity,
    ) -> Result<Self> {
        if !(0.0..=std::f64::consts::PI).contains(&phase_bound) {
            return Err(Error::config(
                "calibration.phase_max_rad",
                format!("{phase_bound} outside [0, pi]"),
            ));
        }
        if !(amplitude_low >= 0.0 && amplitude_low <= amplitude_high && amplitude_high.is_finite())
        {
            return Err(Error::config(
                "calibration.amp_low",
                format!("need 0 <= amp_low <= amp_high, got [{amplitude_low}, {amplitude_high}]"),
            ));
        }
        if let CalibrationGranularity::PerSubarray { size: 0 } = granularity {
            return Err(Error::config(
                "calibration.subarray_size",
                "must be at least 1",
            ));
        }
        Ok(CalibrationError {
            phase_bound,
            amplitude_low,
            amplitude_high,
            granularity,
        })
    }

    pub fn phase_only(phase_bound: f64) -> Result<Self> {
        Self::new(phase_bound, 1.0, 1.0, CalibrationGranularity::PerElement)
    }

    pub fn amplitude_only(low: f64, high: f64) -> Result<Self> {
        Self::new(0.0, low, high, CalibrationGranularity::PerElement)
    }

    pub fn with_granularity(mut self, granularity: CalibrationGranularity) -> Self {
        self.granularity = granularity;
        self
    }

    /// Draws the multiplicative impairment `αᵢ e^{jφᵢ}` for an `n`-element
    /// array. Every block consumes exactly two uniforms (phase, amplitude), so
    /// phase-only and amplitude-only settings see the same random stream.
    pub fn draw<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> CalibrationProfile {
        let block = match self.granularity {
            CalibrationGranularity::PerElement => 1,
            CalibrationGranularity::PerSubarray { size } => size.max(1),
        };
        let mut factors = Vec::with_capacity(n);
        while factors.len() < n {
            let u_phase: f64 = rng.random();
            let u_amplitude: f64 = rng.random();
            let phase = self.phase_bound * u_phase;
            let amplitude =
                self.amplitude_low + (self.amplitude_high - self.amplitude_low) * u_amplitude;
            let factor = Complex64::from_polar(amplitude, phase);
            let take = block.min(n - factors.len());
            factors.extend(std::iter::repeat_n(factor, take));
        }
        CalibrationProfile(ComplexVector::new(factors))
    }
}

/// A drawn calibration impairment, applied elementwise to any combining
/// vector the array forms.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationProfile(ComplexVector);

impl CalibrationProfile {
    pub fn factors(&self) -> &ComplexVector {
        &self.0
    }

    pub fn apply(&self, w: &ComplexVector) -> ComplexVector {
        w.hadamard(&self.0)
    }
}

/// Draws a fresh impairment and applies it to `w`.
pub fn apply_calibration_errors<R: Rng + ?Sized>(
    w: &ComplexVector,
    err: &CalibrationError,
    rng: &mut R,
) -> ComplexVector {
    err.draw(w.len(), rng).apply(w)
}

/// Sweeps every codeword of `book` over channel `h` with unit pilots.
///
/// Measurement `p` is `y_p = w_pᴴ h + w_pᴴ n`; the noise term is drawn as a
/// scalar circular Gaussian of variance `σ²‖w_p‖²`. Each pilot consumes two
/// standard normals from `rng` whatever `σ²` is, so schemes fed the same seed
/// see the same noise per pilot index.
pub fn receive_beam_profile<R: Rng + ?Sized>(
    h: &ChannelRealization,
    book: &Codebook,
    noise_variance: f64,
    rng: &mut R,
) -> Result<GainProfile> {
    receive_impaired_profile(h, book, noise_variance, None, rng)
}

/// [`receive_beam_profile`] with every codeword passed through a calibration
/// impairment first.
pub fn receive_impaired_profile<R: Rng + ?Sized>(
    h: &ChannelRealization,
    book: &Codebook,
    noise_variance: f64,
    impairment: Option<&CalibrationProfile>,
    rng: &mut R,
) -> Result<GainProfile> {
    if !(noise_variance >= 0.0 && noise_variance.is_finite()) {
        return Err(Error::Domain(format!(
            "noise variance {noise_variance} must be non-negative"
        )));
    }
    let n = h.vector.len();
    if let Some(profile) = impairment {
        if profile.factors().len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: profile.factors().len(),
            });
        }
    }
    let mut measurements = Vec::with_capacity(book.len());
    for codeword in book.codewords() {
        if codeword.vector.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: codeword.vector.len(),
            });
        }
        let impaired;
        let w = match impairment {
            Some(profile) => {
                impaired = profile.apply(&codeword.vector);
                &impaired
            }
            None => &codeword.vector,
        };
        let signal = crate::numerics::inner_product(w, &h.vector);
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let sigma = (0.5 * noise_variance * w.norm_sqr()).sqrt();
        measurements.push(signal + Complex64::new(re, im) * sigma);
    }
    Ok(GainProfile::from_measurements(
        measurements,
        ProfileSource::Simulated,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::dft_codebook;
    use crate::numerics::inner_product;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn reference_array() -> ArrayConfig {
        ArrayConfig::half_wavelength(28e9, 256).unwrap()
    }

    #[test]
    fn ff_steering_boresight_is_flat() {
        let cfg = reference_array();
        let a = ff_steering(&cfg, 0.0);
        for z in a.iter() {
            assert_relative_eq!(z.re, 1.0 / 16.0, max_relative = 1e-14);
            assert!(z.im.abs() < 1e-15);
        }
    }

    #[test]
    fn ff_steering_phases_for_four_elements() {
        let cfg = ArrayConfig::half_wavelength(28e9, 4).unwrap();
        let a = ff_steering(&cfg, PI / 6.0);
        let expected = [0.0, -PI / 2.0, -PI, -3.0 * PI / 2.0];
        for (z, phase) in a.iter().zip(expected) {
            let want = Complex64::from_polar(0.5, phase);
            assert!((z - want).norm() < 1e-12);
        }
    }

    #[test]
    fn nf_steering_approaches_far_field() {
        let cfg = reference_array();
        for theta in [0.0, 0.3, -0.8] {
            let far = PolarPoint::new(theta, 1e6 * cfg.rayleigh_distance()).unwrap();
            let g = inner_product(&ff_steering(&cfg, theta), &nf_steering(&cfg, &far)).norm();
            assert!((g - 1.0).abs() < 1e-3, "theta {theta}: {g}");
        }
    }

    #[test]
    fn exact_gain_at_ebrd_boresight() {
        let cfg = reference_array();
        let ue = PolarPoint::new(0.0, 35.0).unwrap();
        let g = inner_product(&ff_steering(&cfg, 0.0), &nf_steering(&cfg, &ue)).norm_sqr();
        assert!((g - 0.226).abs() < 0.005, "{g}");
    }

    /// The same physical user, described relative to element 0 instead of the
    /// array centre, produces the same gain against any far-field beam.
    #[test]
    fn reference_element_convention_is_gain_invariant() {
        let cfg = reference_array();
        let n = cfg.element_count();
        let d = cfg.element_spacing();
        let nu = cfg.wavenumber();
        let ue = PolarPoint::new(0.4, 6.0).unwrap();
        let (x, y) = ue.to_cartesian();
        // element 0 sits at x = -(N-1)d/2 in the centred frame
        let x0 = x + (n as f64 - 1.0) / 2.0 * d;
        let r0 = x0.hypot(y);
        let s0 = x0 / r0;
        let end_referenced: ComplexVector = (0..n)
            .map(|i| {
                let delta = i as f64 * d;
                let rn = (r0 * r0 + delta * delta - 2.0 * r0 * delta * s0).sqrt();
                Complex64::from_polar(1.0 / (n as f64).sqrt(), nu * (rn - r0))
            })
            .collect();
        let centred = nf_steering(&cfg, &ue);
        for sin_beam in [-0.5, 0.0, 0.2, 0.389, 0.6] {
            let a = ff_steering_sin(&cfg, sin_beam);
            let g1 = inner_product(&centred, &a).norm_sqr();
            let g2 = inner_product(&end_referenced, &a).norm_sqr();
            assert!((g1 - g2).abs() < 1e-10);
        }
    }

    #[test]
    fn los_channel_norms() {
        let cfg = reference_array();
        let p = PolarPoint::new(0.2, 10.0).unwrap();
        let h = los_channel(&cfg, &p, false);
        assert_relative_eq!(h.vector.norm(), 16.0, max_relative = 1e-12);
        let b = nf_steering(&cfg, &p);
        let phase = Complex64::from_polar(16.0, -cfg.wavenumber() * 10.0);
        for (hz, bz) in h.vector.iter().zip(b.iter()) {
            assert!((hz - bz * phase).norm() < 1e-12);
        }

        let near = los_channel(&cfg, &PolarPoint::new(0.2, 10.0).unwrap(), true);
        let farther = los_channel(&cfg, &PolarPoint::new(0.2, 20.0).unwrap(), true);
        assert_relative_eq!(
            near.vector.norm(),
            2.0 * farther.vector.norm(),
            max_relative = 1e-12
        );

        let a = los_channel(&cfg, &PolarPoint::new(0.0, 3.5).unwrap(), true);
        let b = los_channel(&cfg, &PolarPoint::new(0.0, 350.0).unwrap(), true);
        assert_relative_eq!(
            a.vector.norm() / b.vector.norm(),
            100.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn calibration_identity_and_zero() {
        let cfg = reference_array();
        let w = nf_steering(&cfg, &PolarPoint::new(0.1, 5.0).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let identity =
            CalibrationError::new(0.0, 1.0, 1.0, CalibrationGranularity::PerElement).unwrap();
        assert_eq!(apply_calibration_errors(&w, &identity, &mut rng), w);
        let zero =
            CalibrationError::new(0.3, 0.0, 0.0, CalibrationGranularity::PerElement).unwrap();
        assert_eq!(apply_calibration_errors(&w, &zero, &mut rng).norm(), 0.0);
    }

    #[test]
    fn calibration_phase_only_keeps_modulus_and_bounds() {
        let cfg = reference_array();
        let w = nf_steering(&cfg, &PolarPoint::new(0.1, 5.0).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let err = CalibrationError::phase_only(PI / 8.0).unwrap();
        let profile = err.draw(w.len(), &mut rng);
        for f in profile.factors().iter() {
            assert_relative_eq!(f.norm(), 1.0, max_relative = 1e-12);
            assert!(f.arg() >= 0.0 && f.arg() <= PI / 8.0);
        }
        let impaired = profile.apply(&w);
        for (a, b) in impaired.iter().zip(w.iter()) {
            assert_relative_eq!(a.norm(), b.norm(), max_relative = 1e-12);
        }
    }

    #[test]
    fn calibration_subarray_blocks_share_draws() {
        let err = CalibrationError::default()
            .with_granularity(CalibrationGranularity::PerSubarray { size: 64 });
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let profile = err.draw(256, &mut rng);
        let f = profile.factors();
        for block in 0..4 {
            for i in 1..64 {
                assert_eq!(f[block * 64 + i], f[block * 64]);
            }
        }
        assert_ne!(f[0], f[64]);
    }

    #[test]
    fn calibration_rejects_bad_bounds() {
        assert!(CalibrationError::new(4.0, 0.0, 1.0, CalibrationGranularity::PerElement).is_err());
        assert!(CalibrationError::new(0.1, 0.9, 0.8, CalibrationGranularity::PerElement).is_err());
        assert!(CalibrationError::new(
            0.1,
            0.0,
            1.0,
            CalibrationGranularity::PerSubarray { size: 0 }
        )
        .is_err());
    }

    #[test]
    fn matched_single_codeword_profile() {
        let cfg = reference_array();
        let p = PolarPoint::new(-0.3, 7.0).unwrap();
        let book = Codebook::from_points(&cfg, &[p], crate::codebook::CodebookKind::Polar);
        let mut h = los_channel(&cfg, &p, false);
        // normalised channel: b(θ, r)
        h.vector = nf_steering(&cfg, &p);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let profile = receive_beam_profile(&h, &book, 0.0, &mut rng).unwrap();
        assert_eq!(profile.len(), 1);
        assert_relative_eq!(profile.powers()[0], 1.0, max_relative = 1e-12);
    }

    #[test]
    fn orthogonal_dft_book_sees_one_beam_for_far_field_grid_user() {
        let cfg = reference_array();
        let book = dft_codebook(&cfg, -1.0, 1.0).unwrap();
        let sin_user = book.angular_grid()[77];
        let far = PolarPoint::from_sin(sin_user, 1e9).unwrap();
        let mut h = los_channel(&cfg, &far, false);
        h.vector = ff_steering_sin(&cfg, sin_user);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let profile = receive_beam_profile(&h, &book, 0.0, &mut rng).unwrap();
        let above: Vec<usize> = profile
            .powers()
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 1e-12)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(above, vec![77]);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let cfg = reference_array();
        let small = ArrayConfig::half_wavelength(28e9, 8).unwrap();
        let book = dft_codebook(&small, -1.0, 1.0).unwrap();
        let h = los_channel(&cfg, &PolarPoint::new(0.0, 5.0).unwrap(), false);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        assert!(matches!(
            receive_beam_profile(&h, &book, 0.0, &mut rng),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn noisy_power_has_expected_mean() {
        let cfg = ArrayConfig::half_wavelength(28e9, 16).unwrap();
        let p = PolarPoint::new(0.2, 3.0).unwrap();
        let book = Codebook::from_points(
            &cfg,
            &[PolarPoint::new(0.25, 4.0).unwrap()],
            crate::codebook::CodebookKind::Polar,
        );
        let h = los_channel(&cfg, &p, false);
        let clean = inner_product(&book.codewords()[0].vector, &h.vector).norm_sqr();
        let sigma2 = 2.0;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let trials = 10_000;
        let samples: Vec<f64> = (0..trials)
            .map(|_| {
                receive_beam_profile(&h, &book, sigma2, &mut rng)
                    .unwrap()
                    .powers()[0]
            })
            .collect();
        let mean = samples.iter().sum::<f64>() / trials as f64;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        let stderr = (var / trials as f64).sqrt();
        assert!(
            (mean - (clean + sigma2)).abs() < 3.0 * stderr,
            "mean {mean}, expected {}",
            clean + sigma2
        );
    }

    #[test]
    fn seeded_profiles_are_bit_identical() {
        let cfg = reference_array();
        let book = dft_codebook(&cfg, -0.5, 0.5).unwrap();
        let h = los_channel(&cfg, &PolarPoint::new(0.1, 4.0).unwrap(), false);
        let a = receive_beam_profile(&h, &book, 0.3, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = receive_beam_profile(&h, &book, 0.3, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn far_field_gain_approaches_one_beyond_ebrd() {
        // Inside the EBRD the gain ripples with range (Fresnel oscillation),
        // so monotonicity only holds from the EBRD outwards.
        let cfg = reference_array();
        let top = 100.0 * cfg.rayleigh_distance();
        for theta in [0.0, 0.5] {
            let a = ff_steering(&cfg, theta);
            let start = cfg.ebrd(theta);
            let mut prev = 0.0;
            for i in 0..=200 {
                let r = start * (top / start).powf(i as f64 / 200.0);
                let g = inner_product(&a, &nf_steering(&cfg, &PolarPoint::new(theta, r).unwrap()))
                    .norm_sqr();
                assert!(g >= prev - 1e-12, "theta {theta}, r {r}: {g} < {prev}");
                prev = g;
            }
        }
    }

    proptest! {
        #[test]
        fn steering_vectors_are_unit_norm(theta in -1.5f64..1.5, r in 0.5f64..1e4) {
            let cfg = reference_array();
            prop_assert!((ff_steering(&cfg, theta).norm() - 1.0).abs() < 1e-12);
            let b = nf_steering(&cfg, &PolarPoint::new(theta, r).unwrap());
            prop_assert!((b.norm() - 1.0).abs() < 1e-12);
            prop_assert!((inner_product(&b, &b).re - 1.0).abs() < 1e-12);
        }
    }
}
