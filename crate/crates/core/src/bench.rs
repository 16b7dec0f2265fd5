//! Benchmark beam-training schemes, the achievable-rate metric and pilot
//! overhead accounting.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::beamscan::GainProfile;
use crate::channel::{los_channel, nf_steering, receive_beam_profile, CalibrationProfile};
use crate::cidft::{run_cidft_impaired, LocationEstimate, SpreadLookupTable};
use crate::codebook::{Codebook, CodebookKind, Codeword, HierarchicalCodebook};
use crate::error::{Error, Result};
use crate::geometry::{ArrayConfig, PolarPoint};
use crate::numerics::{inner_product, ComplexVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SchemeId {
    PerfectCsi,
    Exhaustive,
    Hierarchical,
    FarField,
    Cidft,
}

impl SchemeId {
    pub const ALL: [SchemeId; 5] = [
        SchemeId::PerfectCsi,
        SchemeId::Exhaustive,
        SchemeId::Hierarchical,
        SchemeId::FarField,
        SchemeId::Cidft,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeId::PerfectCsi => "PerfectCSI",
            SchemeId::Exhaustive => "Exhaustive",
            SchemeId::Hierarchical => "Hierarchical",
            SchemeId::FarField => "FarField",
            SchemeId::Cidft => "CIDFT",
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim().to_ascii_lowercase();
        SchemeId::ALL
            .into_iter()
            .find(|id| id.name().to_ascii_lowercase() == wanted)
            .ok_or_else(|| Error::config("schemes", format!("unknown scheme `{s}`")))
    }
}

/// Transmit power and noise of a link. Pilots are sent at `tx_power`, so the
/// per-pilot noise seen after normalising the pilot to one is
/// `training_noise_variance`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub tx_power: f64,
    pub noise_variance: f64,
    pub training_noise_variance: f64,
}

impl LinkBudget {
    pub fn new(tx_power: f64, noise_variance: f64) -> Result<Self> {
        if !(tx_power >= 0.0 && tx_power.is_finite()) {
            return Err(Error::Domain(format!(
                "transmit power {tx_power} must be non-negative"
            )));
        }
        if !(noise_variance > 0.0 && noise_variance.is_finite()) {
            return Err(Error::Domain(format!(
                "noise variance {noise_variance} must be positive"
            )));
        }
        let training = if tx_power > 0.0 {
            noise_variance / tx_power
        } else {
            f64::INFINITY
        };
        Ok(LinkBudget {
            tx_power,
            noise_variance,
            training_noise_variance: training,
        })
    }

    /// `P_t = 1`, `σ² = 10^(-snr/10)`.
    pub fn from_snr_db(snr_db: f64) -> Result<Self> {
        Self::new(1.0, 10f64.powf(-snr_db / 10.0))
    }

    /// Same rate budget, but beam training sees no noise.
    pub fn noiseless_training(mut self) -> Self {
        self.training_noise_variance = 0.0;
        self
    }

    pub fn snr(&self) -> f64 {
        self.tx_power / self.noise_variance
    }
}

/// Outcome of one scheme for one user.
#[derive(Debug, Clone)]
pub struct SchemeResult {
    pub scheme: SchemeId,
    pub chosen_codeword: Codeword,
    /// The combiner actually used for data (the codeword after any front-end
    /// impairment, renormalised).
    pub data_beam: ComplexVector,
    /// `|bᴴ w|²` of the data beam.
    pub beam_gain: f64,
    pub achieved_rate: f64,
    pub pilots_used: usize,
    pub estimate: Option<LocationEstimate>,
}

/// `log₂(1 + P_t N |bᴴ(θ, r) w|² / σ²)` with the normalised exact steering
/// vector `b`.
pub fn rate(
    cfg: &ArrayConfig,
    ue: &PolarPoint,
    w: &ComplexVector,
    tx_power: f64,
    noise_variance: f64,
) -> f64 {
    let gain = inner_product(&nf_steering(cfg, ue), w).norm_sqr();
    rate_from_gain(cfg, gain, tx_power, noise_variance)
}

fn rate_from_gain(cfg: &ArrayConfig, gain: f64, tx_power: f64, noise_variance: f64) -> f64 {
    (1.0 + tx_power * cfg.element_count() as f64 * gain / noise_variance).log2()
}

/// [`rate`] with the free-space amplitude `λ/(4πr)` applied to the channel.
pub fn rate_with_path_loss(
    cfg: &ArrayConfig,
    ue: &PolarPoint,
    w: &ComplexVector,
    tx_power: f64,
    noise_variance: f64,
) -> f64 {
    let loss = cfg.path_loss_amplitude(ue.range()).powi(2);
    rate(cfg, ue, w, tx_power * loss, noise_variance)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    cfg: &ArrayConfig,
    ue: &PolarPoint,
    link: &LinkBudget,
    scheme: SchemeId,
    chosen_codeword: Codeword,
    data_beam: ComplexVector,
    pilots_used: usize,
    estimate: Option<LocationEstimate>,
) -> SchemeResult {
    let beam_gain = inner_product(&nf_steering(cfg, ue), &data_beam).norm_sqr();
    SchemeResult {
        scheme,
        achieved_rate: rate_from_gain(cfg, beam_gain, link.tx_power, link.noise_variance),
        chosen_codeword,
        data_beam,
        beam_gain,
        pilots_used,
        estimate,
    }
}

fn strongest(profile: &GainProfile) -> Result<usize> {
    profile.argmax().ok_or(Error::NoSignal)
}

/// Genie combiner `w = b(θ, r)`; no pilots.
pub fn perfect_csi(cfg: &ArrayConfig, ue: &PolarPoint, link: &LinkBudget) -> SchemeResult {
    let codeword = Codeword::near_field(cfg, ue);
    let beam = codeword.vector.clone();
    finish(cfg, ue, link, SchemeId::PerfectCsi, codeword, beam, 0, None)
}

/// Sweeps the whole polar codebook and keeps the strongest measured beam.
pub fn exhaustive_search<R: Rng + ?Sized>(
    cfg: &ArrayConfig,
    ue: &PolarPoint,
    polar_book: &Codebook,
    link: &LinkBudget,
    rng: &mut R,
) -> Result<SchemeResult> {
    if polar_book.kind() != CodebookKind::Polar {
        return Err(Error::WrongCodebookKind {
            expected: "polar",
            found: polar_book.kind().to_string(),
        });
    }
    let h = los_channel(cfg, ue, false);
    let profile = receive_beam_profile(&h, polar_book, link.training_noise_variance, rng)?;
    let codeword = polar_book.codewords()[strongest(&profile)?].clone();
    let beam = codeword.vector.clone();
    let pilots = overhead(SchemeId::Exhaustive, &OverheadParams::for_polar(polar_book));
    Ok(finish(
        cfg,
        ue,
        link,
        SchemeId::Exhaustive,
        codeword,
        beam,
        pilots,
        None,
    ))
}

/// Classical far-field training: strongest DFT beam.
pub fn farfield_search<R: Rng + ?Sized>(
    cfg: &ArrayConfig,
    ue: &PolarPoint,
    dft_book: &Codebook,
    link: &LinkBudget,
    rng: &mut R,
) -> Result<SchemeResult> {
    if dft_book.kind() != CodebookKind::Dft {
        return Err(Error::WrongCodebookKind {
            expected: "dft",
            found: dft_book.kind().to_string(),
        });
    }
    let h = los_channel(cfg, ue, false);
    let profile = receive_beam_profile(&h, dft_book, link.training_noise_variance, rng)?;
    let codeword = dft_book.codewords()[strongest(&profile)?].clone();
    let beam = codeword.vector.clone();
    Ok(finish(
        cfg,
        ue,
        link,
        SchemeId::FarField,
        codeword,
        beam,
        dft_book.len(),
        None,
    ))
}

/// Greedy descent through the levels of `book`, keeping the strongest
/// measured cell at each level. Returns the result and the winner path.
pub fn hierarchical_search<R: Rng + ?Sized>(
    cfg: &ArrayConfig,
    ue: &PolarPoint,
    book: &HierarchicalCodebook,
    link: &LinkBudget,
    rng: &mut R,
) -> Result<(SchemeResult, Vec<usize>)> {
    let h = los_channel(cfg, ue, false);
    let mut cell = book.root();
    let mut path = Vec::with_capacity(book.levels());
    let mut winner = None;
    for level in 1..=book.levels() {
        let level_book = book.tile(&cell, level)?;
        let profile = receive_beam_profile(&h, &level_book, link.training_noise_variance, rng)?;
        let index = strongest(&profile)?;
        path.push(index);
        cell = book.child(&cell, index);
        winner = Some(level_book.codewords()[index].clone());
    }
    let codeword =
        winner.ok_or_else(|| Error::DegenerateGrid("hierarchical book has no levels".into()))?;
    let beam = codeword.vector.clone();
    let (nx, ny) = book.grid();
    let pilots = overhead(
        SchemeId::Hierarchical,
        &OverheadParams {
            grid_x: nx,
            grid_y: ny,
            levels: book.levels(),
            ..OverheadParams::default()
        },
    );
    Ok((
        finish(
            cfg,
            ue,
            link,
            SchemeId::Hierarchical,
            codeword,
            beam,
            pilots,
            None,
        ),
        path,
    ))
}

/// CI-DFT training followed by data transmission on the near-field beam at
/// the estimated location. With an impairment, both the sweep and the data
/// beam pass through it; the data beam is renormalised afterwards.
#[allow(clippy::too_many_arguments)]
pub fn cidft_scheme<R: Rng + ?Sized>(
    cfg: &ArrayConfig,
    ue: &PolarPoint,
    table: &SpreadLookupTable,
    dft_book: &Codebook,
    link: &LinkBudget,
    impairment: Option<&CalibrationProfile>,
    rng: &mut R,
) -> Result<SchemeResult> {
    let run = run_cidft_impaired(
        cfg,
        table,
        dft_book,
        ue,
        link.training_noise_variance,
        impairment,
        rng,
    )?;
    let codeword = run.estimate.codeword.clone();
    let beam = match impairment {
        Some(profile) => profile.apply(&codeword.vector).normalized(),
        None => codeword.vector.clone(),
    };
    Ok(finish(
        cfg,
        ue,
        link,
        SchemeId::Cidft,
        codeword,
        beam,
        run.pilots,
        Some(run.estimate),
    ))
}

/// Inputs of the pilot-count formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OverheadParams {
    /// DFT beams ψ.
    pub beams: usize,
    /// Range samples per angle S.
    pub range_samples: usize,
    pub grid_x: usize,
    pub grid_y: usize,
    pub levels: usize,
}

impl OverheadParams {
    fn for_polar(book: &Codebook) -> Self {
        OverheadParams {
            beams: book.columns().len(),
            range_samples: book.max_column_len(),
            ..OverheadParams::default()
        }
    }
}

/// Pilots a scheme spends per training round.
///
/// The hierarchical count is `N_x·N_y·K`, the number of cells swept over all
/// levels.
pub fn overhead(scheme: SchemeId, p: &OverheadParams) -> usize {
    match scheme {
        SchemeId::PerfectCsi => 0,
        SchemeId::Exhaustive => p.beams * p.range_samples,
        SchemeId::Hierarchical => p.grid_x * p.grid_y * p.levels,
        SchemeId::FarField | SchemeId::Cidft => p.beams,
    }
}

pub fn overhead_formula(scheme: SchemeId) -> &'static str {
    match scheme {
        SchemeId::PerfectCsi => "0",
        SchemeId::Exhaustive => "psi*S",
        SchemeId::Hierarchical => "Nx*Ny*K",
        SchemeId::FarField | SchemeId::Cidft => "psi",
    }
}
