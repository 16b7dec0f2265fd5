//! Monte-Carlo rate experiments: configuration, sweeps and CSV reports.
//!
//! Every trial owns three random streams keyed by `(seed, point, trial)`:
//! the user location, the pilot noise and the calibration draw. Each scheme
//! starts from a fresh copy of the noise stream, so pilot `p` of every scheme
//! sees the same noise sample.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bench::{
    cidft_scheme, exhaustive_search, farfield_search, hierarchical_search, overhead,
    overhead_formula, perfect_csi, LinkBudget, OverheadParams, SchemeId, SchemeResult,
};
use crate::channel::{CalibrationError, CalibrationGranularity};
use crate::cidft::{build_lookup_table, SpreadLookupTable};
use crate::codebook::{
    dft_codebook, hierarchical_codebook, polar_codebook, range_samples, Codebook,
    HierarchicalCodebook,
};
use crate::error::{Error, Result};
use crate::geometry::{ArrayConfig, PolarPoint};

const STREAM_LOCATION: u64 = 0;
const STREAM_NOISE: u64 = 1;
const STREAM_CALIBRATION: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepKind {
    Distance,
    Snr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArraySection {
    pub frequency_hz: f64,
    pub n_antennas: usize,
    pub spacing_over_lambda: f64,
}

impl Default for ArraySection {
    fn default() -> Self {
        ArraySection {
            frequency_hz: 28e9,
            n_antennas: 256,
            spacing_over_lambda: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoverageSection {
    pub sin_min: f64,
    pub sin_max: f64,
}

impl Default for CoverageSection {
    fn default() -> Self {
        let edge = 3f64.sqrt() / 2.0;
        CoverageSection {
            sin_min: -edge,
            sin_max: edge,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub kind: SweepKind,
    /// Distances in meters or SNRs in dB. Empty selects the default grid for
    /// `kind`.
    pub points: Vec<f64>,
    pub trials: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            kind: SweepKind::Distance,
            points: Vec::new(),
            trials: 200,
        }
    }
}

impl SweepSection {
    pub fn resolved_points(&self) -> Vec<f64> {
        if !self.points.is_empty() {
            return self.points.clone();
        }
        match self.kind {
            SweepKind::Distance => vec![3.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0],
            SweepKind::Snr => vec![-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0],
        }
    }
}

/// User placement: range uniform in `[range_min_m, range_max_m]` (SNR
/// sweeps only) and sinθ uniform in `[sin_min, sin_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UeSection {
    pub range_min_m: f64,
    pub range_max_m: f64,
    pub sin_min: f64,
    pub sin_max: f64,
}

impl Default for UeSection {
    fn default() -> Self {
        let edge = 3f64.sqrt() / 2.0;
        UeSection {
            range_min_m: 3.0,
            range_max_m: 35.0,
            sin_min: -edge,
            sin_max: edge,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HierarchicalSection {
    pub levels: usize,
    pub grid_x: usize,
    pub grid_y: usize,
}

impl Default for HierarchicalSection {
    fn default() -> Self {
        HierarchicalSection {
            levels: 2,
            grid_x: 25,
            grid_y: 25,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GranularityName {
    Element,
    Subarray,
}

/// Front-end calibration error applied to the CI-DFT sweep and data beam.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationSection {
    pub phase_max_rad: f64,
    pub amp_low: f64,
    pub amp_high: f64,
    pub granularity: GranularityName,
    pub subarray_size: usize,
}

impl Default for CalibrationSection {
    fn default() -> Self {
        let d = CalibrationError::default();
        CalibrationSection {
            phase_max_rad: d.phase_bound,
            amp_low: d.amplitude_low,
            amp_high: d.amplitude_high,
            granularity: GranularityName::Element,
            subarray_size: 64,
        }
    }
}

impl CalibrationSection {
    pub fn to_error(&self) -> Result<CalibrationError> {
        let granularity = match self.granularity {
            GranularityName::Element => CalibrationGranularity::PerElement,
            GranularityName::Subarray => CalibrationGranularity::PerSubarray {
                size: self.subarray_size,
            },
        };
        CalibrationError::new(self.phase_max_rad, self.amp_low, self.amp_high, granularity)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Operating SNR `P_t/σ²` in dB for distance sweeps.
    pub snr_db: f64,
    pub schemes: Vec<String>,
    pub array: ArraySection,
    pub coverage: CoverageSection,
    pub sweep: SweepSection,
    pub ue: UeSection,
    pub hierarchical: HierarchicalSection,
    pub calibration: Option<CalibrationSection>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 1,
            snr_db: 10.0,
            schemes: SchemeId::ALL.iter().map(|s| s.to_string()).collect(),
            array: ArraySection::default(),
            coverage: CoverageSection::default(),
            sweep: SweepSection::default(),
            ue: UeSection::default(),
            hierarchical: HierarchicalSection::default(),
            calibration: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let message = e.message().to_string();
            let key = e
                .span()
                .and_then(|span| text.get(..span.start))
                .map(|before| {
                    let line = before.lines().count().max(1);
                    format!("line {line}")
                })
                .unwrap_or_else(|| "<config>".into());
            Error::config(key, message)
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::config("--config", format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("experiment config always serialises")
    }

    pub fn array_config(&self) -> Result<ArrayConfig> {
        ArrayConfig::with_spacing_ratio(
            self.array.frequency_hz,
            self.array.n_antennas,
            self.array.spacing_over_lambda,
        )
        .map_err(|e| Error::config("array", e.to_string()))
    }

    pub fn scheme_ids(&self) -> Result<Vec<SchemeId>> {
        let mut ids = self
            .schemes
            .iter()
            .map(|s| s.parse::<SchemeId>())
            .collect::<Result<Vec<_>>>()?;
        ids.sort();
        ids.dedup();
        Ok(ids)
    }

    pub fn calibration_error(&self) -> Result<Option<CalibrationError>> {
        self.calibration.as_ref().map(|c| c.to_error()).transpose()
    }

    /// Checks every field, naming the first offending key.
    pub fn validate(&self) -> Result<()> {
        let a = &self.array;
        if !(a.frequency_hz.is_finite() && a.frequency_hz > 0.0) {
            return Err(Error::config("array.frequency_hz", "must be positive"));
        }
        if a.n_antennas < 2 {
            return Err(Error::config(
                "array.n_antennas",
                "need at least 2 antennas",
            ));
        }
        if !(a.spacing_over_lambda.is_finite() && a.spacing_over_lambda > 0.0) {
            return Err(Error::config(
                "array.spacing_over_lambda",
                "must be positive",
            ));
        }
        let c = &self.coverage;
        if !(c.sin_min >= -1.0 && c.sin_min < c.sin_max && c.sin_max <= 1.0) {
            return Err(Error::config(
                "coverage",
                format!(
                    "need -1 <= sin_min < sin_max <= 1, got [{}, {}]",
                    c.sin_min, c.sin_max
                ),
            ));
        }
        if self.sweep.trials == 0 {
            return Err(Error::config("sweep.trials", "must be at least 1"));
        }
        let schemes = self.scheme_ids()?;
        if schemes.is_empty() {
            return Err(Error::config("schemes", "at least one scheme is required"));
        }
        if schemes.contains(&SchemeId::Cidft) && (a.spacing_over_lambda - 0.5).abs() > 1e-9 {
            return Err(Error::config(
                "array.spacing_over_lambda",
                "CIDFT requires half-wavelength spacing (0.5)",
            ));
        }
        if !self.snr_db.is_finite() {
            return Err(Error::config("snr_db", "must be finite"));
        }
        let cfg = self.array_config()?;
        let ebrd = cfg.ebrd(0.0);
        let u = &self.ue;
        if !(u.sin_min > -1.0 && u.sin_min <= u.sin_max && u.sin_max < 1.0) {
            return Err(Error::config(
                "ue.sin_min",
                format!(
                    "need -1 < sin_min <= sin_max < 1, got [{}, {}]",
                    u.sin_min, u.sin_max
                ),
            ));
        }
        let points = self.sweep.resolved_points();
        match self.sweep.kind {
            SweepKind::Distance => {
                if let Some(bad) = points
                    .iter()
                    .find(|r| !(r.is_finite() && **r > 0.0 && **r <= ebrd))
                {
                    return Err(Error::config(
                        "sweep.points",
                        format!("distance {bad} m outside (0, EBRD = {ebrd:.3} m]"),
                    ));
                }
            }
            SweepKind::Snr => {
                if let Some(bad) = points.iter().find(|s| !s.is_finite()) {
                    return Err(Error::config(
                        "sweep.points",
                        format!("SNR {bad} dB is not finite"),
                    ));
                }
                if !(u.range_min_m > 0.0 && u.range_min_m <= u.range_max_m) {
                    return Err(Error::config(
                        "ue.range_min_m",
                        format!(
                            "need 0 < range_min_m <= range_max_m, got [{}, {}]",
                            u.range_min_m, u.range_max_m
                        ),
                    ));
                }
                if u.range_max_m > ebrd {
                    return Err(Error::config(
                        "ue.range_max_m",
                        format!("{} m exceeds EBRD = {ebrd:.3} m", u.range_max_m),
                    ));
                }
            }
        }
        let h = &self.hierarchical;
        if schemes.contains(&SchemeId::Hierarchical)
            && (h.levels == 0 || h.grid_x == 0 || h.grid_y == 0)
        {
            return Err(Error::config(
                "hierarchical",
                "levels, grid_x and grid_y must be positive",
            ));
        }
        if let Some(cal) = &self.calibration {
            cal.to_error()?;
        }
        Ok(())
    }
}

/// Codebooks and lookup table shared by all trials of an experiment.
#[derive(Debug, Clone)]
pub struct Workspace {
    pub array: ArrayConfig,
    pub dft: Codebook,
    pub polar: Option<Codebook>,
    pub hierarchical: Option<HierarchicalCodebook>,
    pub table: Option<SpreadLookupTable>,
    pub overhead: OverheadParams,
}

impl Workspace {
    /// Builds what the enabled schemes need. With `table_cache`, a matching
    /// table on disk is reused and a missing one is written there.
    pub fn build(config: &ExperimentConfig, table_cache: Option<&Path>) -> Result<Self> {
        config.validate()?;
        let array = config.array_config()?;
        let schemes = config.scheme_ids()?;
        let (lo, hi) = (config.coverage.sin_min, config.coverage.sin_max);
        let dft = dft_codebook(&array, lo, hi)?;
        let polar = schemes
            .contains(&SchemeId::Exhaustive)
            .then(|| polar_codebook(&array, lo, hi))
            .transpose()?;
        let h = &config.hierarchical;
        let sin_bound = lo.abs().max(hi.abs()).min(1.0);
        let hierarchical = schemes
            .contains(&SchemeId::Hierarchical)
            .then(|| hierarchical_codebook(&array, h.levels, h.grid_x, h.grid_y, sin_bound))
            .transpose()?;
        let table = if schemes.contains(&SchemeId::Cidft) {
            Some(load_or_build_table(&array, &dft, table_cache)?)
        } else {
            None
        };
        let range_columns = dft
            .angular_grid()
            .iter()
            .map(|s| range_samples(&array, s.asin()).len())
            .max()
            .unwrap_or(0);
        let overhead = OverheadParams {
            beams: dft.len(),
            range_samples: range_columns,
            grid_x: h.grid_x,
            grid_y: h.grid_y,
            levels: h.levels,
        };
        Ok(Workspace {
            array,
            dft,
            polar,
            hierarchical,
            table,
            overhead,
        })
    }
}

fn load_or_build_table(
    array: &ArrayConfig,
    dft: &Codebook,
    cache: Option<&Path>,
) -> Result<SpreadLookupTable> {
    if let Some(path) = cache {
        if path.exists() {
            let table = SpreadLookupTable::load(path, array)?;
            if table.columns().len() == dft.len() {
                return Ok(table);
            }
        }
    }
    let table = build_lookup_table(array, dft)?;
    if let Some(path) = cache {
        table.save(path)?;
    }
    Ok(table)
}

/// One (sweep point, scheme, trial) outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub point_index: usize,
    pub sweep_value: f64,
    pub scheme: SchemeId,
    pub trial: usize,
    pub rate: f64,
    pub pilots: usize,
    /// `|sinθ̂ - sinθ|` of the chosen beam.
    pub d_sin_err: Option<f64>,
    /// `|r̂ - r|`, for beams focused at a finite range.
    pub d_range_err: Option<f64>,
}

fn trial_rng(seed: u64, point: usize, trial: usize, stream: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    for (chunk, word) in key
        .chunks_exact_mut(8)
        .zip([seed, point as u64, trial as u64, stream])
    {
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let u: f64 = rng.random();
    lo + (hi - lo) * u
}

#[allow(clippy::too_many_arguments)]
fn run_scheme(
    ws: &Workspace,
    scheme: SchemeId,
    ue: &PolarPoint,
    link: &LinkBudget,
    calibration: Option<&CalibrationError>,
    seed: u64,
    point: usize,
    trial: usize,
) -> Result<SchemeResult> {
    let cfg = &ws.array;
    let mut noise = trial_rng(seed, point, trial, STREAM_NOISE);
    let missing = |what: &str| {
        Error::config(
            "schemes",
            format!("{scheme} needs the {what}, which was not built"),
        )
    };
    match scheme {
        SchemeId::PerfectCsi => Ok(perfect_csi(cfg, ue, link)),
        SchemeId::Exhaustive => {
            let polar = ws.polar.as_ref().ok_or_else(|| missing("polar codebook"))?;
            exhaustive_search(cfg, ue, polar, link, &mut noise)
        }
        SchemeId::Hierarchical => {
            let book = ws
                .hierarchical
                .as_ref()
                .ok_or_else(|| missing("hierarchical codebook"))?;
            Ok(hierarchical_search(cfg, ue, book, link, &mut noise)?.0)
        }
        SchemeId::FarField => farfield_search(cfg, ue, &ws.dft, link, &mut noise),
        SchemeId::Cidft => {
            let table = ws.table.as_ref().ok_or_else(|| missing("lookup table"))?;
            let impairment = calibration.map(|c| {
                let mut rng = trial_rng(seed, point, trial, STREAM_CALIBRATION);
                c.draw(cfg.element_count(), &mut rng)
            });
            cidft_scheme(
                cfg,
                ue,
                table,
                &ws.dft,
                link,
                impairment.as_ref(),
                &mut noise,
            )
        }
    }
}

fn record(
    point_index: usize,
    sweep_value: f64,
    trial: usize,
    ue: &PolarPoint,
    res: &SchemeResult,
) -> Result<TrialRecord> {
    if !res.achieved_rate.is_finite() {
        return Err(Error::NonFinite(format!(
            "{} rate at sweep value {sweep_value}, trial {trial}",
            res.scheme
        )));
    }
    let cw = &res.chosen_codeword;
    Ok(TrialRecord {
        point_index,
        sweep_value,
        scheme: res.scheme,
        trial,
        rate: res.achieved_rate,
        pilots: res.pilots_used,
        d_sin_err: Some((cw.sin_angle() - ue.sin_angle()).abs()),
        d_range_err: cw.focus_range.map(|r| (r - ue.range()).abs()),
    })
}

fn evaluate_trial(
    ws: &Workspace,
    config: &ExperimentConfig,
    schemes: &[SchemeId],
    point_index: usize,
    value: f64,
    trial: usize,
) -> Result<Vec<TrialRecord>> {
    let seed = config.seed;
    let mut location = trial_rng(seed, point_index, trial, STREAM_LOCATION);
    let sin_theta = uniform(&mut location, config.ue.sin_min, config.ue.sin_max);
    let (range, snr_db) = match config.sweep.kind {
        SweepKind::Distance => (value, config.snr_db),
        SweepKind::Snr => (
            uniform(&mut location, config.ue.range_min_m, config.ue.range_max_m),
            value,
        ),
    };
    let ue = PolarPoint::from_sin(sin_theta, range)?;
    let link = LinkBudget::from_snr_db(snr_db)?;
    let calibration = config.calibration_error()?;
    schemes
        .iter()
        .map(|&scheme| {
            let res = run_scheme(
                ws,
                scheme,
                &ue,
                &link,
                calibration.as_ref(),
                seed,
                point_index,
                trial,
            )?;
            record(point_index, value, trial, &ue, &res)
        })
        .collect()
}

/// Runs every (point, trial) of `config.sweep` on a prebuilt workspace, in
/// parallel. Records come back in canonical order: sweep point, scheme,
/// trial.
pub fn run_sweep(config: &ExperimentConfig, ws: &Workspace) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    let schemes = config.scheme_ids()?;
    let points = config.sweep.resolved_points();
    let jobs: Vec<(usize, f64, usize)> = points
        .iter()
        .enumerate()
        .flat_map(|(i, &v)| (0..config.sweep.trials).map(move |t| (i, v, t)))
        .collect();
    let batches = jobs
        .par_iter()
        .map(|&(i, v, t)| evaluate_trial(ws, config, &schemes, i, v, t))
        .collect::<Result<Vec<_>>>()?;
    let mut records: Vec<TrialRecord> = batches.into_iter().flatten().collect();
    records.sort_by_key(|r| (r.point_index, r.scheme, r.trial));
    Ok(records)
}

fn run_kind(config: &ExperimentConfig, kind: SweepKind) -> Result<Vec<TrialRecord>> {
    if config.sweep.kind != kind {
        return Err(Error::config(
            "sweep.kind",
            format!("expected {kind:?} sweep"),
        ));
    }
    let ws = Workspace::build(config, None)?;
    run_sweep(config, &ws)
}

/// Mean rate against UE distance at a fixed SNR.
pub fn run_distance_sweep(config: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    run_kind(config, SweepKind::Distance)
}

/// Mean rate against SNR with UE range drawn uniformly.
pub fn run_snr_sweep(config: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    run_kind(config, SweepKind::Snr)
}

/// Mean and standard error of the rate for one (sweep point, scheme).
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub sweep_value: f64,
    pub scheme: SchemeId,
    pub mean_rate: f64,
    pub stderr: f64,
    pub pilots: usize,
    pub trials: usize,
}

pub fn aggregate(records: &[TrialRecord]) -> Vec<AggregateRow> {
    let mut groups: BTreeMap<(usize, SchemeId), Vec<&TrialRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.point_index, r.scheme)).or_default().push(r);
    }
    groups
        .into_values()
        .map(|rows| {
            let n = rows.len() as f64;
            let mean = rows.iter().map(|r| r.rate).sum::<f64>() / n;
            let stderr = if rows.len() > 1 {
                let var = rows.iter().map(|r| (r.rate - mean).powi(2)).sum::<f64>() / (n - 1.0);
                (var / n).sqrt()
            } else {
                0.0
            };
            AggregateRow {
                sweep_value: rows[0].sweep_value,
                scheme: rows[0].scheme,
                mean_rate: mean,
                stderr,
                pilots: rows[0].pilots,
                trials: rows.len(),
            }
        })
        .collect()
}

/// Files written by [`emit_report`].
#[derive(Debug, Clone)]
pub struct ReportPaths {
    pub trials: PathBuf,
    pub aggregate: PathBuf,
    pub overhead: PathBuf,
}

fn optional(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_trials_csv<W: Write>(records: &[TrialRecord], writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record([
        "sweep_value",
        "scheme",
        "trial",
        "rate_bps_hz",
        "pilots",
        "d_sin_err",
        "d_range_err_m",
    ])?;
    for r in records {
        out.write_record([
            r.sweep_value.to_string(),
            r.scheme.to_string(),
            r.trial.to_string(),
            r.rate.to_string(),
            r.pilots.to_string(),
            optional(r.d_sin_err),
            optional(r.d_range_err),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_aggregate_csv<W: Write>(rows: &[AggregateRow], writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["sweep_value", "scheme", "mean_rate", "stderr", "pilots"])?;
    for r in rows {
        out.write_record([
            r.sweep_value.to_string(),
            r.scheme.to_string(),
            r.mean_rate.to_string(),
            r.stderr.to_string(),
            r.pilots.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Pilot counts of the four trained schemes.
pub fn write_overhead_csv<W: Write>(params: &OverheadParams, writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["scheme", "formula", "value"])?;
    for scheme in [
        SchemeId::Exhaustive,
        SchemeId::Hierarchical,
        SchemeId::FarField,
        SchemeId::Cidft,
    ] {
        out.write_record([
            scheme.to_string(),
            overhead_formula(scheme).to_string(),
            overhead(scheme, params).to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Writes `trials.csv`, `aggregate.csv` and `overhead.csv` into `dir`.
pub fn emit_report(
    records: &[TrialRecord],
    params: &OverheadParams,
    dir: &Path,
) -> Result<ReportPaths> {
    fs::create_dir_all(dir)?;
    let paths = ReportPaths {
        trials: dir.join("trials.csv"),
        aggregate: dir.join("aggregate.csv"),
        overhead: dir.join("overhead.csv"),
    };
    let open = |p: &Path| -> Result<BufWriter<File>> { Ok(BufWriter::new(File::create(p)?)) };
    write_trials_csv(records, open(&paths.trials)?)?;
    write_aggregate_csv(&aggregate(records), open(&paths.aggregate)?)?;
    write_overhead_csv(params, open(&paths.overhead)?)?;
    Ok(paths)
}
