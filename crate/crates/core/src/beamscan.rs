//! DFT beam gains seen by a near-field user and the angular spread they form.
//!
//! The closed form uses the Fresnel-integral approximation of the ULA sum,
//!
//! ```text
//! G ≈ |(C̄ + jS̄) / (2γ₂)|²,   C̄ = C(γ₁+γ₂) - C(γ₁-γ₂),  S̄ likewise
//! γ₁ = √(r / (d cos²θ_u)) (sinθ_n - sinθ_u)
//! γ₂ = (N/2) √(d cos²θ_u / r)
//! ```
//!
//! which is only valid for half-wavelength spacing.

use std::io::Write;

use num_complex::Complex64;

use crate::channel::{ff_steering_sin, nf_steering};
use crate::codebook::{Codebook, CodebookKind};
use crate::error::{Error, Result};
use crate::geometry::{ArrayConfig, PolarPoint};
use crate::numerics::{fresnel, inner_product, ComplexVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileSource {
    Analytic,
    Simulated,
}

/// Per-beam received power, in codebook order.
#[derive(Debug, Clone, PartialEq)]
pub struct GainProfile {
    powers: Vec<f64>,
    measurements: Option<Vec<Complex64>>,
    source: ProfileSource,
}

impl GainProfile {
    pub fn from_measurements(measurements: Vec<Complex64>, source: ProfileSource) -> Self {
        GainProfile {
            powers: measurements.iter().map(|z| z.norm_sqr()).collect(),
            measurements: Some(measurements),
            source,
        }
    }

    pub fn from_powers(powers: Vec<f64>, source: ProfileSource) -> Result<Self> {
        if let Some(bad) = powers.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::Domain(format!(
                "beam power {bad} is not a finite non-negative number"
            )));
        }
        Ok(GainProfile {
            powers,
            measurements: None,
            source,
        })
    }

    pub fn len(&self) -> usize {
        self.powers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.powers.is_empty()
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn measurements(&self) -> Option<&[Complex64]> {
        self.measurements.as_deref()
    }

    pub fn source(&self) -> ProfileSource {
        self.source
    }

    /// Index of the strongest beam; the first one on ties.
    pub fn argmax(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, &p) in self.powers.iter().enumerate() {
            if best.is_none_or(|(_, b)| p > b) {
                best = Some((i, p));
            }
        }
        best.map(|(i, _)| i)
    }

    /// `beam_index,sin_theta,power` rows aligned with `book`.
    pub fn write_csv<W: Write>(&self, book: &Codebook, writer: W) -> Result<()> {
        check_alignment(self, book)?;
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["beam_index", "sin_theta", "power"])?;
        for (i, (p, s)) in self.powers.iter().zip(book.angular_grid()).enumerate() {
            out.write_record([i.to_string(), s.to_string(), p.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

fn check_alignment(profile: &GainProfile, book: &Codebook) -> Result<()> {
    if profile.len() != book.len() {
        return Err(Error::DimensionMismatch {
            expected: book.len(),
            found: profile.len(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainMode {
    Exact,
    Fresnel,
}

/// `|bᴴ(θ_u, r) a(θ_n)|²` with the exact spherical-wave steering vector.
pub fn gain_exact(cfg: &ArrayConfig, ue: &PolarPoint, theta_n: f64) -> f64 {
    gain_exact_sin(cfg, ue, theta_n.sin())
}

pub fn gain_exact_sin(cfg: &ArrayConfig, ue: &PolarPoint, sin_n: f64) -> f64 {
    inner_product(&nf_steering(cfg, ue), &ff_steering_sin(cfg, sin_n)).norm_sqr()
}

/// `(γ₁, γ₂)` for a user and a beam direction given in sinθ.
pub fn fresnel_parameters(cfg: &ArrayConfig, ue: &PolarPoint, sin_n: f64) -> (f64, f64) {
    let d = cfg.element_spacing();
    let r = ue.range();
    let cos2 = ue.angle().cos().powi(2);
    let gamma1 = (r / (d * cos2)).sqrt() * (sin_n - ue.sin_angle());
    let gamma2 = 0.5 * cfg.element_count() as f64 * (d * cos2 / r).sqrt();
    (gamma1, gamma2)
}

/// `|(C̄ + jS̄)/(2γ₂)|²` for explicit parameters.
pub fn fresnel_gain(gamma1: f64, gamma2: f64) -> Result<f64> {
    if !(gamma2 > 0.0 && gamma2.is_finite()) {
        return Err(Error::Domain(format!("gamma2 = {gamma2} must be positive")));
    }
    let hi = fresnel(gamma1 + gamma2)?;
    let lo = fresnel(gamma1 - gamma2)?;
    let c = hi.c - lo.c;
    let s = hi.s - lo.s;
    Ok((c * c + s * s) / (4.0 * gamma2 * gamma2))
}

/// Closed-form gain of DFT beam `θ_n` at a near-field user.
pub fn gain_fresnel(cfg: &ArrayConfig, ue: &PolarPoint, theta_n: f64) -> Result<f64> {
    gain_fresnel_sin(cfg, ue, theta_n.sin())
}

pub fn gain_fresnel_sin(cfg: &ArrayConfig, ue: &PolarPoint, sin_n: f64) -> Result<f64> {
    if !cfg.is_half_wavelength() {
        return Err(Error::SpacingNotHalfWavelength {
            ratio: cfg.spacing_over_wavelength(),
        });
    }
    let (g1, g2) = fresnel_parameters(cfg, ue, sin_n);
    fresnel_gain(g1, g2)
}

/// Noiseless gain of every beam of a DFT book at `ue`.
pub fn dft_profile(
    cfg: &ArrayConfig,
    ue: &PolarPoint,
    book: &Codebook,
    mode: GainMode,
) -> Result<GainProfile> {
    if book.kind() != CodebookKind::Dft {
        return Err(Error::WrongCodebookKind {
            expected: "dft",
            found: book.kind().to_string(),
        });
    }
    let powers = match mode {
        GainMode::Exact => {
            let b: ComplexVector = nf_steering(cfg, ue);
            book.codewords()
                .iter()
                .map(|cw| inner_product(&b, &cw.vector).norm_sqr())
                .collect()
        }
        GainMode::Fresnel => book
            .angular_grid()
            .iter()
            .map(|&s| gain_fresnel_sin(cfg, ue, s))
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(GainProfile {
        powers,
        measurements: None,
        source: ProfileSource::Analytic,
    })
}

/// Half-power beam set of a profile, summarised by its extent and centre.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadMeasure {
    /// Beams strictly above half the peak power, ascending.
    pub members: Vec<usize>,
    pub first: usize,
    pub last: usize,
    pub peak_index: usize,
    /// `sinθ_last - sinθ_first + 2/N`.
    pub width_sin: f64,
    /// Power-weighted median sinθ over beams `first..=last`.
    pub median_sin: f64,
    pub peak_power: f64,
}

impl SpreadMeasure {
    pub fn beam_count(&self) -> usize {
        self.members.len()
    }
}

/// Extracts the angular spread of `profile`, measured against `book`'s grid.
///
/// Membership is the full superlevel set `{n : p_n > max/2}`; the width
/// spans its outermost members. The median is the first beam, scanning up
/// from `first`, whose cumulative power reaches half the power in
/// `first..=last`.
pub fn angular_spread(profile: &GainProfile, book: &Codebook) -> Result<SpreadMeasure> {
    check_alignment(profile, book)?;
    let powers = profile.powers();
    let peak_index = profile.argmax().ok_or(Error::NoSignal)?;
    let peak_power = powers[peak_index];
    if !(peak_power > 0.0) {
        return Err(Error::NoSignal);
    }
    let threshold = 0.5 * peak_power;
    let members: Vec<usize> = (0..powers.len())
        .filter(|&i| powers[i] > threshold)
        .collect();
    let first = members[0];
    let last = members[members.len() - 1];
    let grid = book.angular_grid();
    let spacing = 2.0 / book.element_count() as f64;
    let width_sin = grid[last] - grid[first] + spacing;

    let window = &powers[first..=last];
    let half = 0.5 * window.iter().sum::<f64>();
    let mut cumulative = 0.0;
    let mut median_index = last;
    for (offset, p) in window.iter().enumerate() {
        cumulative += p;
        if cumulative >= half {
            median_index = first + offset;
            break;
        }
    }

    Ok(SpreadMeasure {
        members,
        first,
        last,
        peak_index,
        width_sin,
        median_sin: grid[median_index],
        peak_power,
    })
}
