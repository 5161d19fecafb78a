//! Phase-space grids, sampled Wigner fields and the coverage criterion.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::analysis::MomentSet;
use crate::error::{Error, Result};
use crate::format::sig17;
use crate::wigner::{PhasePoint, StateSpec};

/// Coverage a field must reach before it may be sonified.
pub const COVERAGE_THRESHOLD: f64 = 0.99;
/// Half-width of the square reference grid used as the coverage denominator.
pub const REFERENCE_RADIUS: f64 = 10.0;
pub const REFERENCE_CELLS: usize = 512;
/// Default sampling window: 64×64 cells, ±6 about the state's frame centre.
pub const DEFAULT_HALF_WIDTH: f64 = 6.0;
pub const DEFAULT_CELLS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    Regular,
    GaussianInterval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    kind: GridKind,
    r_edges: Vec<f64>,
    p_edges: Vec<f64>,
}

impl GridSpec {
    pub fn new(kind: GridKind, r_edges: Vec<f64>, p_edges: Vec<f64>) -> Result<Self> {
        for (name, edges) in [("r", &r_edges), ("p", &p_edges)] {
            if edges.len() < 2 {
                return Err(Error::InvalidBounds(format!("{name} axis needs at least 2 edges")));
            }
            if edges.iter().any(|e| !e.is_finite()) {
                return Err(Error::InvalidBounds(format!("{name} axis has non-finite edges")));
            }
            if edges.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::InvalidBounds(format!("{name} edges are not strictly increasing")));
            }
            if kind == GridKind::Regular {
                let step = (edges[edges.len() - 1] - edges[0]) / (edges.len() - 1) as f64;
                if edges
                    .windows(2)
                    .any(|w| ((w[1] - w[0]) - step).abs() > 1e-12 * step.abs().max(1e-300) * 16.0)
                {
                    return Err(Error::InvalidBounds(format!("{name} edges are not equidistant")));
                }
            }
        }
        Ok(GridSpec {
            kind,
            r_edges,
            p_edges,
        })
    }

    /// Equidistant grid with `n_r × n_p` cells.
    pub fn regular(r_min: f64, r_max: f64, p_min: f64, p_max: f64, n_r: usize, n_p: usize) -> Result<Self> {
        if !(r_max > r_min && p_max > p_min) {
            return Err(Error::InvalidBounds(format!(
                "need max > min per axis, got r [{r_min}, {r_max}], p [{p_min}, {p_max}]"
            )));
        }
        if n_r == 0 || n_p == 0 {
            return Err(Error::InvalidBounds("cell counts must be positive".into()));
        }
        Self::new(
            GridKind::Regular,
            linspace(r_min, r_max, n_r),
            linspace(p_min, p_max, n_p),
        )
    }

    /// Square regular grid of `cells × cells` with half-width `half` around `center`.
    pub fn square(center: PhasePoint, half: f64, cells: usize) -> Result<Self> {
        Self::regular(
            center.r - half,
            center.r + half,
            center.p - half,
            center.p + half,
            cells,
            cells,
        )
    }

    /// Edges at equal-probability quantiles of `N(r0, σ_r²)` and `N(p0, σ_p²)`,
    /// both truncated to `±span_sigmas` standard deviations. Bins shrink toward
    /// the centre where the distribution varies fastest.
    pub fn gaussian(moments: &MomentSet, n_r: usize, n_p: usize, span_sigmas: f64) -> Result<Self> {
        if !(moments.sigma_r > 0.0 && moments.sigma_p > 0.0) {
            return Err(Error::DegenerateMoments(format!(
                "σ_r = {}, σ_p = {}",
                moments.sigma_r, moments.sigma_p
            )));
        }
        if n_r == 0 || n_p == 0 || !(span_sigmas > 0.0 && span_sigmas.is_finite()) {
            return Err(Error::InvalidBounds("need positive cell counts and span".into()));
        }
        Self::new(
            GridKind::GaussianInterval,
            gaussian_edges(moments.r0, moments.sigma_r, n_r, span_sigmas),
            gaussian_edges(moments.p0, moments.sigma_p, n_p, span_sigmas),
        )
    }

    /// The default sampling grid for a state.
    pub fn default_for(state: &StateSpec) -> Result<Self> {
        Self::square(state.frame_center(), DEFAULT_HALF_WIDTH, DEFAULT_CELLS)
    }

    /// The coverage reference grid for a state.
    pub fn reference_for(state: &StateSpec) -> Result<Self> {
        Self::square(state.frame_center(), REFERENCE_RADIUS, REFERENCE_CELLS)
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn r_edges(&self) -> &[f64] {
        &self.r_edges
    }

    pub fn p_edges(&self) -> &[f64] {
        &self.p_edges
    }

    pub fn n_r(&self) -> usize {
        self.r_edges.len() - 1
    }

    pub fn n_p(&self) -> usize {
        self.p_edges.len() - 1
    }

    pub fn cell_count(&self) -> usize {
        self.n_r() * self.n_p()
    }

    pub fn r_centers(&self) -> Vec<f64> {
        centers(&self.r_edges)
    }

    pub fn p_centers(&self) -> Vec<f64> {
        centers(&self.p_edges)
    }

    pub fn center(&self, i: usize, j: usize) -> PhasePoint {
        PhasePoint::new(
            0.5 * (self.r_edges[i] + self.r_edges[i + 1]),
            0.5 * (self.p_edges[j] + self.p_edges[j + 1]),
        )
    }

    pub fn cell_area(&self, i: usize, j: usize) -> f64 {
        (self.r_edges[i + 1] - self.r_edges[i]) * (self.p_edges[j + 1] - self.p_edges[j])
    }

    pub fn bounds(&self) -> FieldBounds {
        FieldBounds {
            r_min: self.r_edges[0],
            r_max: self.r_edges[self.r_edges.len() - 1],
            p_min: self.p_edges[0],
            p_max: self.p_edges[self.p_edges.len() - 1],
        }
    }

    /// Parses `regular:<n>:<min>:<max>` or `gauss:<n>:<span_sigmas>`. Gaussian
    /// grids need the state's moments, which are taken from its default field.
    pub fn parse(text: &str, state: &StateSpec) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| Error::Parse(format!("grid value `{s}`: {e}")))
        };
        let count = |s: &str| {
            s.parse::<usize>()
                .map_err(|e| Error::Parse(format!("grid cell count `{s}`: {e}")))
        };
        match parts.as_slice() {
            ["regular", n, lo, hi] => {
                let n = count(n)?;
                let (lo, hi) = (num(lo)?, num(hi)?);
                Self::regular(lo, hi, lo, hi, n, n)
            }
            ["gauss", n, span] => {
                let n = count(n)?;
                let span = num(span)?;
                let seed = sample_field(state, &Self::default_for(state)?)?;
                let moments = crate::analysis::compute_moments(&seed)?;
                Self::gaussian(&moments, n, n, span)
            }
            _ => Err(Error::Parse(format!(
                "grid `{text}` is neither regular:<n>:<min>:<max> nor gauss:<n>:<span>"
            ))),
        }
    }
}

/// Outer extent of a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldBounds {
    pub r_min: f64,
    pub r_max: f64,
    pub p_min: f64,
    pub p_max: f64,
}

fn linspace(lo: f64, hi: f64, cells: usize) -> Vec<f64> {
    let step = (hi - lo) / cells as f64;
    let mut edges: Vec<f64> = (0..=cells).map(|k| lo + k as f64 * step).collect();
    edges[cells] = hi;
    edges
}

fn centers(edges: &[f64]) -> Vec<f64> {
    edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
}

fn gaussian_edges(mean: f64, sigma: f64, cells: usize, span: f64) -> Vec<f64> {
    let normal = Normal::standard();
    let lo_cdf = normal.cdf(-span);
    let mass = 1.0 - 2.0 * lo_cdf;
    let mut edges = Vec::with_capacity(cells + 1);
    edges.push(mean - span * sigma);
    for k in 1..cells {
        let q = if 2 * k == cells {
            0.0
        } else {
            normal.inverse_cdf(lo_cdf + mass * k as f64 / cells as f64)
        };
        edges.push(mean + q * sigma);
    }
    edges.push(mean + span * sigma);
    edges
}

/// Cell-centre samples of a state's Wigner function.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerField {
    grid: GridSpec,
    /// Row-major, row = r index.
    values: Vec<f64>,
    state: StateSpec,
}

impl WignerField {
    pub fn new(grid: GridSpec, values: Vec<f64>, state: StateSpec) -> Result<Self> {
        if values.len() != grid.cell_count() {
            return Err(Error::InvalidBounds(format!(
                "{} values for {} cells",
                values.len(),
                grid.cell_count()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse("field contains non-finite values".into()));
        }
        Ok(WignerField { grid, values, state })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn state(&self) -> &StateSpec {
        &self.state
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.n_p() + j]
    }

    /// Iterates `(i, j, centre, area, value)` in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, PhasePoint, f64, f64)> + '_ {
        let n_p = self.grid.n_p();
        self.values.iter().enumerate().map(move |(k, &v)| {
            let (i, j) = (k / n_p, k % n_p);
            (i, j, self.grid.center(i, j), self.grid.cell_area(i, j), v)
        })
    }

    /// Writes the `r,p,value` CSV and a JSON sidecar next to it.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::with_capacity(self.values.len() * 64);
        out.push_str("r,p,value\n");
        for (_, _, pt, _, v) in self.cells() {
            let _ = writeln!(out, "{},{},{}", sig17(pt.r), sig17(pt.p), sig17(v));
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))?;

        let sidecar = Sidecar {
            kind: self.grid.kind,
            r_edges: self.grid.r_edges.clone(),
            p_edges: self.grid.p_edges.clone(),
            state: self.state.to_string(),
        };
        let json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
        let side = sidecar_path(path);
        std::fs::write(&side, json + "\n").map_err(|e| Error::io(&side, e))
    }

    /// Reads a field written by [`WignerField::write_csv`].
    pub fn read_csv(path: &Path) -> Result<Self> {
        let side = sidecar_path(path);
        let side_text = std::fs::read_to_string(&side).map_err(|e| Error::io(&side, e))?;
        let sidecar: Sidecar = serde_json::from_str(&side_text)
            .map_err(|e| Error::Parse(format!("{}: {e}", side.display())))?;
        let grid = GridSpec::new(sidecar.kind, sidecar.r_edges, sidecar.p_edges)?;
        let state = StateSpec::parse(&sidecar.state)?;

        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("r,p,value") {
            return Err(Error::Parse(format!("{}: missing `r,p,value` header", path.display())));
        }
        let mut values = Vec::with_capacity(grid.cell_count());
        for (k, line) in lines.filter(|l| !l.trim().is_empty()).enumerate() {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 3 {
                return Err(Error::Parse(format!("{} row {}: expected 3 columns", path.display(), k + 1)));
            }
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("{} row {}: {e}", path.display(), k + 1)))
            };
            if k >= grid.cell_count() {
                return Err(Error::Parse(format!("{}: more rows than grid cells", path.display())));
            }
            let expected = grid.center(k / grid.n_p(), k % grid.n_p());
            let (r, p) = (parse(cols[0])?, parse(cols[1])?);
            if r.to_bits() != expected.r.to_bits() || p.to_bits() != expected.p.to_bits() {
                return Err(Error::Parse(format!(
                    "{} row {}: ({r}, {p}) is not the cell centre",
                    path.display(),
                    k + 1
                )));
            }
            values.push(parse(cols[2])?);
        }
        Self::new(grid, values, state)
    }
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    kind: GridKind,
    r_edges: Vec<f64>,
    p_edges: Vec<f64>,
    state: String,
}

fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Samples `state` at every cell centre of `grid`; rows are evaluated in parallel.
pub fn sample_field(state: &StateSpec, grid: &GridSpec) -> Result<WignerField> {
    let ps = grid.p_centers();
    let rows: Vec<Vec<f64>> = grid
        .r_centers()
        .par_iter()
        .map(|&r| state.evaluate_row(r, &ps))
        .collect::<Result<_>>()?;
    WignerField::new(grid.clone(), rows.concat(), state.clone())
}

/// Σ|ρ|·area over the field divided by the state's absolute mass on its
/// reference grid, clamped to [0, 1].
pub fn coverage(field: &WignerField) -> Result<f64> {
    let reference_grid = GridSpec::reference_for(field.state())?;
    let captured = absolute_mass(field);
    if *field.grid() == reference_grid {
        return Ok(if captured > 0.0 { 1.0 } else { 0.0 });
    }
    let reference = sample_field(field.state(), &reference_grid)?;
    let total = absolute_mass(&reference);
    if total <= 0.0 {
        return Ok(0.0);
    }
    Ok((captured / total).clamp(0.0, 1.0))
}

/// Fails with [`Error::CoverageTooLow`] below the 99 % threshold.
pub fn require_coverage(field: &WignerField) -> Result<f64> {
    let c = coverage(field)?;
    if c < COVERAGE_THRESHOLD {
        return Err(Error::CoverageTooLow {
            coverage: c,
            required: COVERAGE_THRESHOLD,
        });
    }
    Ok(c)
}

pub(crate) fn absolute_mass(field: &WignerField) -> f64 {
    let terms: Vec<f64> = field.cells().map(|(_, _, _, a, v)| v.abs() * a).collect();
    crate::analysis::pairwise_sum(&terms)
}
