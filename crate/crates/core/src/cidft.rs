//! Correlative-interferometry DFT (CI-DFT) training: an offline table of
//! angular spreads over an angle × range grid, and the online match of a
//! measured spread against it.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;

use crate::beamscan::{angular_spread, dft_profile, GainMode, GainProfile, SpreadMeasure};
use crate::channel::{los_channel, receive_impaired_profile, CalibrationError, CalibrationProfile};
use crate::codebook::{range_samples, Codebook, CodebookKind, Codeword};
use crate::error::{Error, Result};
use crate::geometry::{ArrayConfig, ConfigFingerprint, PolarPoint};

const FINGERPRINT_PREFIX: &str = "# fingerprint:";

/// One stored cell: the spread an on-cell user would see.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableEntry {
    pub range: f64,
    pub width_sin: f64,
    pub median_sin: f64,
}

/// All entries that share one grid angle, ascending in range.
#[derive(Debug, Clone, PartialEq)]
pub struct TableColumn {
    pub sin_theta: f64,
    pub entries: Vec<TableEntry>,
    /// The angle's EBRD lies below `2D`; the column holds only the `2D` cell.
    pub degenerate: bool,
}

impl TableColumn {
    pub fn angle(&self) -> f64 {
        self.sin_theta.asin()
    }
}

/// Spread lookup table for one array and one DFT codebook.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadLookupTable {
    cfg: ArrayConfig,
    fingerprint: ConfigFingerprint,
    columns: Vec<TableColumn>,
}

impl SpreadLookupTable {
    pub fn config(&self) -> &ArrayConfig {
        &self.cfg
    }

    pub fn fingerprint(&self) -> &ConfigFingerprint {
        &self.fingerprint
    }

    pub fn columns(&self) -> &[TableColumn] {
        &self.columns
    }

    pub fn angle_grid(&self) -> Vec<f64> {
        self.columns.iter().map(|c| c.sin_theta).collect()
    }

    pub fn entry_count(&self) -> usize {
        self.columns.iter().map(|c| c.entries.len()).sum()
    }

    pub fn max_column_len(&self) -> usize {
        self.columns
            .iter()
            .map(|c| c.entries.len())
            .max()
            .unwrap_or(0)
    }

    fn ensure_matches(&self, cfg: &ArrayConfig) -> Result<()> {
        let requested = cfg.fingerprint();
        if !self.fingerprint.matches(&requested) {
            return Err(Error::FingerprintMismatch {
                table: self.fingerprint.to_string(),
                requested: requested.to_string(),
            });
        }
        Ok(())
    }

    /// Table file: a `# fingerprint: …` line, then CSV rows
    /// `angle_index,sin_theta,range_index,range_m,width_sin,median_sin`.
    pub fn write_csv<W: Write>(&self, mut writer: W) -> Result<()> {
        writeln!(writer, "{FINGERPRINT_PREFIX} {}", self.fingerprint)?;
        let mut out = csv::Writer::from_writer(writer);
        out.write_record([
            "angle_index",
            "sin_theta",
            "range_index",
            "range_m",
            "width_sin",
            "median_sin",
        ])?;
        for (i, col) in self.columns.iter().enumerate() {
            for (s, e) in col.entries.iter().enumerate() {
                out.write_record([
                    i.to_string(),
                    col.sin_theta.to_string(),
                    s.to_string(),
                    e.range.to_string(),
                    e.width_sin.to_string(),
                    e.median_sin.to_string(),
                ])?;
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(mut reader: R) -> Result<Self> {
        let mut header = String::new();
        reader.read_line(&mut header)?;
        let fingerprint = parse_fingerprint(header.trim_end())?;
        let cfg = ArrayConfig::with_spacing_ratio(
            fingerprint.frequency_hz,
            fingerprint.element_count,
            fingerprint.spacing_over_lambda,
        )?;

        let mut rows = csv::Reader::from_reader(reader);
        let mut columns: Vec<TableColumn> = Vec::new();
        for (line, record) in rows.records().enumerate() {
            let record = record?;
            let field = |k: usize| -> Result<&str> {
                record
                    .get(k)
                    .ok_or_else(|| Error::TableFormat(format!("row {line}: missing column {k}")))
            };
            let int = |k: usize| -> Result<usize> {
                field(k)?.parse().map_err(|_| {
                    Error::TableFormat(format!("row {line}: bad integer in column {k}"))
                })
            };
            let real = |k: usize| -> Result<f64> {
                field(k)?.parse().map_err(|_| {
                    Error::TableFormat(format!("row {line}: bad number in column {k}"))
                })
            };
            let (angle_index, sin_theta, range_index) = (int(0)?, real(1)?, int(2)?);
            if angle_index == columns.len() {
                columns.push(TableColumn {
                    sin_theta,
                    entries: Vec::new(),
                    degenerate: false,
                });
            }
            let column = columns
                .get_mut(angle_index)
                .filter(|c| c.entries.len() == range_index)
                .ok_or_else(|| {
                    Error::TableFormat(format!(
                        "row {line}: cell ({angle_index}, {range_index}) out of order"
                    ))
                })?;
            column.entries.push(TableEntry {
                range: real(3)?,
                width_sin: real(4)?,
                median_sin: real(5)?,
            });
        }
        for col in &mut columns {
            col.degenerate = cfg.ebrd(col.angle()) < 2.0 * cfg.aperture();
        }
        Ok(SpreadLookupTable {
            cfg,
            fingerprint,
            columns,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut file = BufWriter::new(File::create(path)?);
        self.write_csv(&mut file)?;
        file.flush()?;
        Ok(())
    }

    /// Reads a table written by [`SpreadLookupTable::save`] and checks it was
    /// generated for `cfg`.
    pub fn load(path: &Path, cfg: &ArrayConfig) -> Result<Self> {
        let table = Self::read_csv(BufReader::new(File::open(path)?))?;
        table.ensure_matches(cfg)?;
        Ok(table)
    }
}

fn parse_fingerprint(line: &str) -> Result<ConfigFingerprint> {
    let body = line
        .strip_prefix(FINGERPRINT_PREFIX)
        .ok_or_else(|| Error::TableFormat("missing fingerprint header".into()))?;
    let mut fields = std::collections::HashMap::new();
    for pair in body.split_whitespace() {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::TableFormat(format!("bad fingerprint field `{pair}`")))?;
        fields.insert(k, v);
    }
    let get = |k: &str| -> Result<&str> {
        fields
            .get(k)
            .copied()
            .ok_or_else(|| Error::TableFormat(format!("fingerprint lacks `{k}`")))
    };
    let real = |k: &str| -> Result<f64> {
        get(k)?
            .parse()
            .map_err(|_| Error::TableFormat(format!("fingerprint `{k}` is not a number")))
    };
    Ok(ConfigFingerprint {
        frequency_hz: real("frequency_hz")?,
        element_count: get("n")?
            .parse()
            .map_err(|_| Error::TableFormat("fingerprint `n` is not an integer".into()))?,
        spacing_over_lambda: real("d_over_lambda")?,
        aperture_m: real("aperture_m")?,
        rayleigh_m: real("rayleigh_m")?,
    })
}

/// Builds the table on `dft_book`'s angle grid. Each cell stores the spread
/// of the closed-form (Fresnel) profile of a user placed on it; ranges follow
/// the beamdepth spacing of the polar codebook.
pub fn build_lookup_table(cfg: &ArrayConfig, dft_book: &Codebook) -> Result<SpreadLookupTable> {
    if dft_book.kind() != CodebookKind::Dft {
        return Err(Error::WrongCodebookKind {
            expected: "dft",
            found: dft_book.kind().to_string(),
        });
    }
    if !cfg.is_half_wavelength() {
        return Err(Error::SpacingNotHalfWavelength {
            ratio: cfg.spacing_over_wavelength(),
        });
    }
    let columns = dft_book
        .angular_grid()
        .par_iter()
        .map(|&sin_theta| {
            let theta = sin_theta.asin();
            let mut ranges = range_samples(cfg, theta);
            let degenerate = ranges.is_empty();
            if degenerate {
                ranges.push(2.0 * cfg.aperture());
            }
            let entries = ranges
                .into_iter()
                .map(|range| {
                    let ue = PolarPoint::new(theta, range)?;
                    let profile = dft_profile(cfg, &ue, dft_book, GainMode::Fresnel)?;
                    let spread = angular_spread(&profile, dft_book)?;
                    Ok(TableEntry {
                        range,
                        width_sin: spread.width_sin,
                        median_sin: spread.median_sin,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(TableColumn {
                sin_theta,
                entries,
                degenerate,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpreadLookupTable {
        cfg: *cfg,
        fingerprint: cfg.fingerprint(),
        columns,
    })
}

/// Estimated user location and the near-field beam focused on it.
#[derive(Debug, Clone, PartialEq)]
pub struct LocationEstimate {
    pub theta_hat: f64,
    pub r_hat: f64,
    /// `(angle index, range index)` in the table.
    pub cell: (usize, usize),
    pub codeword: Codeword,
}

/// Two-stage match: the grid angle nearest the measured median, then the
/// range in that column whose stored width is nearest the measured width.
/// Ties go to the lower angle index and the smaller range.
///
/// Maximising `cos(Δwidth)` is the same as minimising `|Δwidth|` because all
/// widths lie in `[2/N, 2] ⊂ [0, π)`.
pub fn estimate_location(
    measured: &SpreadMeasure,
    table: &SpreadLookupTable,
) -> Result<LocationEstimate> {
    if measured.members.is_empty() {
        return Err(Error::NoSignal);
    }
    let mut angle_index = 0;
    let mut best = f64::INFINITY;
    for (i, col) in table.columns.iter().enumerate() {
        let distance = (col.sin_theta - measured.median_sin).abs();
        if distance < best {
            best = distance;
            angle_index = i;
        }
    }
    let column = table
        .columns
        .get(angle_index)
        .filter(|c| !c.entries.is_empty())
        .ok_or_else(|| Error::DegenerateGrid("lookup table has no entries".into()))?;

    let mut range_index = 0;
    let mut best = f64::INFINITY;
    for (s, e) in column.entries.iter().enumerate() {
        let distance = (e.width_sin - measured.width_sin).abs();
        if distance < best {
            best = distance;
            range_index = s;
        }
    }
    let theta_hat = column.angle();
    let r_hat = column.entries[range_index].range;
    let point = PolarPoint::new(theta_hat, r_hat)?;
    Ok(LocationEstimate {
        theta_hat,
        r_hat,
        cell: (angle_index, range_index),
        codeword: Codeword::near_field(&table.cfg, &point),
    })
}

/// Everything one CI-DFT training round produced.
#[derive(Debug, Clone)]
pub struct CidftRun {
    pub estimate: LocationEstimate,
    pub spread: SpreadMeasure,
    pub profile: GainProfile,
    pub pilots: usize,
}

/// Sweeps `dft_book` over the (unit path-gain) line-of-sight channel of `ue`,
/// extracts the spread and matches it against `table`. A calibration error,
/// if given, is drawn from `rng` before the sweep.
pub fn run_cidft<R: Rng + ?Sized>(
    cfg: &ArrayConfig,
    table: &SpreadLookupTable,
    dft_book: &Codebook,
    ue: &PolarPoint,
    noise_variance: f64,
    calibration: Option<&CalibrationError>,
    rng: &mut R,
) -> Result<CidftRun> {
    let impairment = calibration.map(|c| c.draw(cfg.element_count(), rng));
    run_cidft_impaired(
        cfg,
        table,
        dft_book,
        ue,
        noise_variance,
        impairment.as_ref(),
        rng,
    )
}

/// [`run_cidft`] with an already drawn calibration impairment.
pub fn run_cidft_impaired<R: Rng + ?Sized>(
    cfg: &ArrayConfig,
    table: &SpreadLookupTable,
    dft_book: &Codebook,
    ue: &PolarPoint,
    noise_variance: f64,
    impairment: Option<&CalibrationProfile>,
    rng: &mut R,
) -> Result<CidftRun> {
    table.ensure_matches(cfg)?;
    if dft_book.kind() != CodebookKind::Dft {
        return Err(Error::WrongCodebookKind {
            expected: "dft",
            found: dft_book.kind().to_string(),
        });
    }
    if dft_book.len() != table.columns.len() {
        return Err(Error::DimensionMismatch {
            expected: table.columns.len(),
            found: dft_book.len(),
        });
    }
    let h = los_channel(cfg, ue, false);
    let profile = receive_impaired_profile(&h, dft_book, noise_variance, impairment, rng)?;
    let spread = angular_spread(&profile, dft_book)?;
    let estimate = estimate_location(&spread, table)?;
    Ok(CidftRun {
        estimate,
        spread,
        profile,
        pilots: dft_book.len(),
    })
}
