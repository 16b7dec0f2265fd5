//! DFT, polar and hierarchical (Cartesian-tiled) codebooks.

use std::fmt;
use std::io::Write;
use std::ops::Range;

use crate::channel::{ff_steering_sin, nf_steering};
use crate::error::{Error, Result};
use crate::geometry::{ArrayConfig, BeamDepth, PolarPoint};
use crate::numerics::ComplexVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodewordKind {
    FarFieldDft,
    NearFieldPolar,
}

impl fmt::Display for CodewordKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodewordKind::FarFieldDft => "dft",
            CodewordKind::NearFieldPolar => "polar",
        })
    }
}

/// Unit-norm combining vector plus where it points.
#[derive(Debug, Clone, PartialEq)]
pub struct Codeword {
    pub vector: ComplexVector,
    pub kind: CodewordKind,
    pub beam_angle: f64,
    /// `None` for far-field beams (focused at infinity).
    pub focus_range: Option<f64>,
}

impl Codeword {
    pub fn far_field(cfg: &ArrayConfig, sin_theta: f64) -> Self {
        Codeword {
            vector: ff_steering_sin(cfg, sin_theta),
            kind: CodewordKind::FarFieldDft,
            beam_angle: sin_theta.asin(),
            focus_range: None,
        }
    }

    pub fn near_field(cfg: &ArrayConfig, point: &PolarPoint) -> Self {
        Codeword {
            vector: nf_steering(cfg, point),
            kind: CodewordKind::NearFieldPolar,
            beam_angle: point.angle(),
            focus_range: Some(point.range()),
        }
    }

    pub fn sin_angle(&self) -> f64 {
        self.beam_angle.sin()
    }

    pub fn focus_point(&self) -> Option<PolarPoint> {
        self.focus_range
            .and_then(|r| PolarPoint::new(self.beam_angle, r).ok())
    }

    /// Half-power beamwidth in sinθ, `2/(N cosθ)`, including the off-broadside
    /// broadening. Informational; the DFT grid itself is uniform in sinθ.
    pub fn broadened_beamwidth(&self) -> f64 {
        2.0 / (self.vector.len() as f64 * self.beam_angle.cos())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodebookKind {
    Dft,
    Polar,
    /// Level `k` (1-based) of a hierarchical search.
    HierarchicalLevel(usize),
}

impl fmt::Display for CodebookKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodebookKind::Dft => f.write_str("dft"),
            CodebookKind::Polar => f.write_str("polar"),
            CodebookKind::HierarchicalLevel(k) => write!(f, "hierarchical-{k}"),
        }
    }
}

/// Ordered codewords with their angular grid.
///
/// For DFT and polar books `columns[i]` is the index range of codewords that
/// share the `i`-th grid angle; polar columns are sorted by range.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    codewords: Vec<Codeword>,
    kind: CodebookKind,
    angular_grid: Vec<f64>,
    columns: Vec<Range<usize>>,
}

impl Codebook {
    /// Near-field codewords at arbitrary points, one column per codeword.
    pub fn from_points(cfg: &ArrayConfig, points: &[PolarPoint], kind: CodebookKind) -> Self {
        let codewords: Vec<Codeword> = points
            .iter()
            .map(|p| Codeword::near_field(cfg, p))
            .collect();
        let angular_grid = points.iter().map(|p| p.sin_angle()).collect();
        let columns = (0..codewords.len()).map(|i| i..i + 1).collect();
        Codebook {
            codewords,
            kind,
            angular_grid,
            columns,
        }
    }

    pub fn codewords(&self) -> &[Codeword] {
        &self.codewords
    }

    pub fn kind(&self) -> CodebookKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    /// Grid angles in sinθ units.
    pub fn angular_grid(&self) -> &[f64] {
        &self.angular_grid
    }

    pub fn columns(&self) -> &[Range<usize>] {
        &self.columns
    }

    /// Length of the longest column (the `S` of the polar overhead).
    pub fn max_column_len(&self) -> usize {
        self.columns.iter().map(|c| c.len()).max().unwrap_or(0)
    }

    pub fn element_count(&self) -> usize {
        self.codewords.first().map_or(0, |c| c.vector.len())
    }

    /// Codebook table: `index,kind,beam_angle_rad,sin_theta,focus_range_m`.
    /// Far-field beams report `inf` as focus range.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record([
            "index",
            "kind",
            "beam_angle_rad",
            "sin_theta",
            "focus_range_m",
        ])?;
        for (i, cw) in self.codewords.iter().enumerate() {
            let focus = cw
                .focus_range
                .map_or_else(|| "inf".to_string(), |r| r.to_string());
            out.write_record([
                i.to_string(),
                cw.kind.to_string(),
                cw.beam_angle.to_string(),
                cw.sin_angle().to_string(),
                focus,
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Codeword entries, one row per codeword, as interleaved `re,im` pairs.
    pub fn write_entries<W: Write>(&self, mut writer: W) -> Result<()> {
        for cw in &self.codewords {
            let row: Vec<String> = cw
                .vector
                .iter()
                .flat_map(|z| [z.re.to_string(), z.im.to_string()])
                .collect();
            writeln!(writer, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn check_interval(sin_min: f64, sin_max: f64) -> Result<()> {
    if !(sin_min >= -1.0 && sin_min < sin_max && sin_max <= 1.0) {
        return Err(Error::InvalidInterval {
            min: sin_min,
            max: sin_max,
        });
    }
    Ok(())
}

/// Number of `2/N`-wide beams needed to cover `[sin_min, sin_max]`.
///
/// Rounded up, so the coverage is never left with a gap: √3 coverage at
/// N = 256 needs 221.7 → 222 beams.
pub fn beam_count(element_count: usize, sin_min: f64, sin_max: f64) -> usize {
    let width = 2.0 / element_count as f64;
    let exact = (sin_max - sin_min).abs() / width;
    (exact - 1e-9).ceil().max(1.0) as usize
}

/// Beam centres `sin_min + (n + ½)·2/N`, `n = 0..ψ`.
pub fn dft_grid(cfg: &ArrayConfig, sin_min: f64, sin_max: f64) -> Result<Vec<f64>> {
    check_interval(sin_min, sin_max)?;
    let n = cfg.element_count();
    let width = 2.0 / n as f64;
    Ok((0..beam_count(n, sin_min, sin_max))
        .map(|i| sin_min + (i as f64 + 0.5) * width)
        .collect())
}

/// Focus ranges for one grid angle: start at `2D`, advance by the beamdepth,
/// stop once the next range would pass the EBRD or the beamdepth is
/// unbounded. Empty when `2D` already lies beyond the EBRD.
pub fn range_samples(cfg: &ArrayConfig, theta: f64) -> Vec<f64> {
    let limit = cfg.ebrd(theta);
    let mut r = 2.0 * cfg.aperture();
    let mut samples = Vec::new();
    while r <= limit {
        samples.push(r);
        match cfg.beamdepth(theta, r) {
            BeamDepth::Finite(depth) if depth > 0.0 => r += depth,
            _ => break,
        }
    }
    samples
}

/// Orthogonal far-field codebook over `[sin_min, sin_max]`.
pub fn dft_codebook(cfg: &ArrayConfig, sin_min: f64, sin_max: f64) -> Result<Codebook> {
    let grid = dft_grid(cfg, sin_min, sin_max)?;
    let codewords: Vec<Codeword> = grid.iter().map(|&s| Codeword::far_field(cfg, s)).collect();
    let columns = (0..codewords.len()).map(|i| i..i + 1).collect();
    Ok(Codebook {
        codewords,
        kind: CodebookKind::Dft,
        angular_grid: grid,
        columns,
    })
}

/// Polar codebook on the DFT angle grid with beamdepth-spaced ranges inside
/// each angle's EBRD.
pub fn polar_codebook(cfg: &ArrayConfig, sin_min: f64, sin_max: f64) -> Result<Codebook> {
    let grid = dft_grid(cfg, sin_min, sin_max)?;
    let mut codewords = Vec::new();
    let mut columns = Vec::with_capacity(grid.len());
    for &s in &grid {
        let theta = s.asin();
        let start = codewords.len();
        for r in range_samples(cfg, theta) {
            let point = PolarPoint::new(theta, r)?;
            codewords.push(Codeword::near_field(cfg, &point));
        }
        columns.push(start..codewords.len());
    }
    Ok(Codebook {
        codewords,
        kind: CodebookKind::Polar,
        angular_grid: grid,
        columns,
    })
}

/// Axis-aligned rectangle in front of the array; x along the array, y away
/// from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Cell {
    pub fn center(&self) -> (f64, f64) {
        (
            0.5 * (self.x_min + self.x_max),
            0.5 * (self.y_min + self.y_max),
        )
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let eps = 1e-9;
        x >= self.x_min - eps
            && x <= self.x_max + eps
            && y >= self.y_min - eps
            && y <= self.y_max + eps
    }

    /// Sub-cell `index` (row-major in y, then x) of an `nx × ny` tiling.
    pub fn subcell(&self, nx: usize, ny: usize, index: usize) -> Cell {
        let ix = index % nx;
        let iy = index / nx;
        let wx = (self.x_max - self.x_min) / nx as f64;
        let wy = (self.y_max - self.y_min) / ny as f64;
        Cell {
            x_min: self.x_min + ix as f64 * wx,
            x_max: self.x_min + (ix + 1) as f64 * wx,
            y_min: self.y_min + iy as f64 * wy,
            y_max: self.y_min + (iy + 1) as f64 * wy,
        }
    }
}

/// Multi-level near-field codebook: level 1 tiles the region
/// `x ∈ [-D_cov, D_cov]`, `y ∈ [2D, EBRD(0)]` into `nx × ny` cells, each later
/// level re-tiles the previous winner at the same resolution.
#[derive(Debug, Clone)]
pub struct HierarchicalCodebook {
    cfg: ArrayConfig,
    levels: usize,
    grid_x: usize,
    grid_y: usize,
    root: Cell,
}

impl HierarchicalCodebook {
    /// `sin_bound` is the largest `|sinθ|` of the coverage; the half-width of
    /// the region is `D_cov = EBRD(0)·sin_bound`.
    pub fn new(
        cfg: &ArrayConfig,
        levels: usize,
        grid_x: usize,
        grid_y: usize,
        sin_bound: f64,
    ) -> Result<Self> {
        if levels == 0 || grid_x == 0 || grid_y == 0 {
            return Err(Error::DegenerateGrid(format!(
                "levels={levels}, grid_x={grid_x}, grid_y={grid_y} must all be positive"
            )));
        }
        let y_min = 2.0 * cfg.aperture();
        let y_max = cfg.ebrd(0.0);
        if !(y_max > y_min) {
            return Err(Error::DegenerateGrid(format!(
                "EBRD {y_max} m does not exceed 2D = {y_min} m"
            )));
        }
        if !(sin_bound > 0.0 && sin_bound <= 1.0) {
            return Err(Error::DegenerateGrid(format!(
                "sin bound {sin_bound} outside (0, 1]"
            )));
        }
        let half_width = y_max * sin_bound;
        Ok(HierarchicalCodebook {
            cfg: *cfg,
            levels,
            grid_x,
            grid_y,
            root: Cell {
                x_min: -half_width,
                x_max: half_width,
                y_min,
                y_max,
            },
        })
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn grid(&self) -> (usize, usize) {
        (self.grid_x, self.grid_y)
    }

    pub fn root(&self) -> Cell {
        self.root
    }

    pub fn level_size(&self) -> usize {
        self.grid_x * self.grid_y
    }

    /// Codebook with one codeword at the centre of each sub-cell of `cell`.
    pub fn tile(&self, cell: &Cell, level: usize) -> Result<Codebook> {
        let points = (0..self.level_size())
            .map(|i| {
                let (x, y) = cell.subcell(self.grid_x, self.grid_y, i).center();
                PolarPoint::from_cartesian(x, y)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Codebook::from_points(
            &self.cfg,
            &points,
            CodebookKind::HierarchicalLevel(level),
        ))
    }

    pub fn child(&self, cell: &Cell, index: usize) -> Cell {
        cell.subcell(self.grid_x, self.grid_y, index)
    }

    /// The per-level codebooks visited along a descent `path` (winner index
    /// at each level). Returns `path.len() + 1` books, capped at `levels`.
    pub fn level_books(&self, path: &[usize]) -> Result<Vec<Codebook>> {
        let mut cell = self.root;
        let mut books = Vec::new();
        for level in 1..=self.levels {
            books.push(self.tile(&cell, level)?);
            match path.get(level - 1) {
                Some(&winner) if winner < self.level_size() => cell = self.child(&cell, winner),
                Some(&winner) => {
                    return Err(Error::DegenerateGrid(format!(
                        "winner index {winner} out of range for level {level}"
                    )))
                }
                None => break,
            }
        }
        Ok(books)
    }
}

pub fn hierarchical_codebook(
    cfg: &ArrayConfig,
    levels: usize,
    grid_x: usize,
    grid_y: usize,
    sin_bound: f64,
) -> Result<HierarchicalCodebook> {
    HierarchicalCodebook::new(cfg, levels, grid_x, grid_y, sin_bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::inner_product;
    use approx::assert_relative_eq;

    const SQRT3_2: f64 = 0.866_025_403_784_438_6;

    fn reference_array() -> ArrayConfig {
        ArrayConfig::half_wavelength(28e9, 256).unwrap()
    }

    #[test]
    fn dft_beam_counts() {
        let cfg = reference_array();
        assert_eq!(dft_codebook(&cfg, -SQRT3_2, SQRT3_2).unwrap().len(), 222);
        assert_eq!(dft_codebook(&cfg, -1.0, 1.0).unwrap().len(), 256);
        assert_eq!(beam_count(256, -0.5, 0.5), 128);
    }

    #[test]
    fn dft_grid_is_uniform_and_increasing() {
        let cfg = reference_array();
        let book = dft_codebook(&cfg, -SQRT3_2, SQRT3_2).unwrap();
        let grid = book.angular_grid();
        for pair in grid.windows(2) {
            assert_relative_eq!(pair[1] - pair[0], 2.0 / 256.0, max_relative = 1e-9);
        }
        assert_relative_eq!(grid[0], -SQRT3_2 + 1.0 / 256.0, max_relative = 1e-12);
        for cw in book.codewords() {
            assert!(cw.vector.is_normalized());
            assert_eq!(cw.kind, CodewordKind::FarFieldDft);
            assert!(cw.focus_range.is_none());
        }
    }

    #[test]
    fn full_range_dft_book_is_orthogonal() {
        let cfg = reference_array();
        let book = dft_codebook(&cfg, -1.0, 1.0).unwrap();
        let cws = book.codewords();
        for i in 0..cws.len() {
            for j in [i + 1, i + 2, i + 100] {
                if j < cws.len() {
                    assert!(inner_product(&cws[i].vector, &cws[j].vector).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn invalid_interval_rejected() {
        let cfg = reference_array();
        assert!(dft_codebook(&cfg, 0.5, 0.5).is_err());
        assert!(dft_codebook(&cfg, -1.5, 0.5).is_err());
        assert!(polar_codebook(&cfg, 0.6, 0.2).is_err());
    }

    #[test]
    fn boresight_range_samples() {
        let cfg = reference_array();
        let samples = range_samples(&cfg, 0.0);
        let expected = [2.74, 3.17, 3.75, 4.56, 5.77, 7.73, 11.3, 19.5];
        assert_eq!(samples.len(), expected.len());
        for (got, want) in samples.iter().zip(expected) {
            assert_relative_eq!(*got, want, max_relative = 0.02);
        }
        assert_relative_eq!(samples[0], 2.0 * cfg.aperture(), max_relative = 1e-12);
    }

    #[test]
    fn degenerate_angle_has_no_samples() {
        let cfg = reference_array();
        assert!(range_samples(&cfg, 80f64.to_radians()).is_empty());
    }

    #[test]
    fn polar_book_structure() {
        let cfg = reference_array();
        let book = polar_codebook(&cfg, -SQRT3_2, SQRT3_2).unwrap();
        assert_eq!(book.angular_grid().len(), 222);
        assert_eq!(book.columns().len(), 222);
        assert_eq!(book.max_column_len(), 8);
        assert!(book.len() < 222 * 8);

        let boresight = book.columns()[111].len();
        for (i, col) in book.columns().iter().enumerate() {
            let theta = book.angular_grid()[i].asin();
            let cws = &book.codewords()[col.clone()];
            let ranges: Vec<f64> = cws.iter().map(|c| c.focus_range.unwrap()).collect();
            for pair in ranges.windows(2) {
                assert!(pair[1] > pair[0]);
            }
            for cw in cws {
                assert!(cw.vector.is_normalized());
                assert!(cw.focus_range.unwrap() < cfg.ebrd(theta));
                assert_relative_eq!(cw.beam_angle, theta, max_relative = 1e-12);
            }
            if book.angular_grid()[i].abs() >= book.angular_grid()[111].abs() {
                assert!(col.len() <= boresight);
            }
        }
    }

    #[test]
    fn dft_book_is_deterministic() {
        let cfg = reference_array();
        assert_eq!(
            dft_codebook(&cfg, -0.3, 0.7).unwrap(),
            dft_codebook(&cfg, -0.3, 0.7).unwrap()
        );
    }

    #[test]
    fn hierarchical_level_sizes() {
        let cfg = reference_array();
        let h = hierarchical_codebook(&cfg, 2, 25, 25, SQRT3_2).unwrap();
        let books = h.level_books(&[312]).unwrap();
        assert_eq!(books.len(), 2);
        assert!(books.iter().all(|b| b.len() == 625));
        assert_eq!(books[1].kind(), CodebookKind::HierarchicalLevel(2));

        let parent = h.child(&h.root(), 312);
        for cw in books[1].codewords() {
            let (x, y) = cw.focus_point().unwrap().to_cartesian();
            assert!(parent.contains(x, y));
        }
    }

    #[test]
    fn hierarchical_single_cell_is_region_center() {
        let cfg = reference_array();
        let h = hierarchical_codebook(&cfg, 1, 1, 1, SQRT3_2).unwrap();
        let books = h.level_books(&[]).unwrap();
        assert_eq!(books.len(), 1);
        assert_eq!(books[0].len(), 1);
        let (x, y) = books[0].codewords()[0]
            .focus_point()
            .unwrap()
            .to_cartesian();
        let (cx, cy) = h.root().center();
        assert!((x - cx).abs() < 1e-9 && (y - cy).abs() < 1e-9);
    }

    #[test]
    fn hierarchical_degenerate_grid_rejected() {
        let cfg = reference_array();
        assert!(matches!(
            hierarchical_codebook(&cfg, 0, 25, 25, 0.5),
            Err(Error::DegenerateGrid(_))
        ));
        assert!(matches!(
            hierarchical_codebook(&cfg, 2, 0, 25, 0.5),
            Err(Error::DegenerateGrid(_))
        ));
    }

    #[test]
    fn csv_export_shape() {
        let cfg = ArrayConfig::half_wavelength(28e9, 8).unwrap();
        let book = dft_codebook(&cfg, -1.0, 1.0).unwrap();
        let mut table = Vec::new();
        book.write_csv(&mut table).unwrap();
        let text = String::from_utf8(table).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "index,kind,beam_angle_rad,sin_theta,focus_range_m"
        );
        assert_eq!(lines.len(), 9);
        assert!(lines[1].starts_with("0,dft,") && lines[1].ends_with(",inf"));

        let mut entries = Vec::new();
        book.write_entries(&mut entries).unwrap();
        let text = String::from_utf8(entries).unwrap();
        assert_eq!(text.lines().count(), 8);
        assert!(text.lines().all(|l| l.split(',').count() == 16));
    }
}
