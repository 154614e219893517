//! ħ-sweeps: run a solver over a geometric ħ grid, evaluate functionals at
//! every point, fit growth rates, and persist results.
//!
//! Reruns with an identical config are bitwise identical, independent of
//! the worker count: points are computed independently and written back by
//! grid index, and every random choice is seeded per point.

mod plot;

pub use plot::plot_functional;

use crate::eigen::EigenSet;
use crate::error::{Error, Result};
use crate::functionals::FunctionalSpec;
use crate::gridsolve::{self, GridParams};
use crate::potentials::{self, Potential, RadialPotential, SampledPotential, StepPotential};
use crate::secular::{self, SearchRegion};
use crate::util::{fmt_g17, fnv1a64};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const SCHEMA_VERSION: u64 = 1;
/// Seed used when a config does not provide one; fixed so omitted seeds
/// stay reproducible.
pub const DEFAULT_SEED: u64 = 0x5c40_d1ab_0001;

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_workers() -> usize {
    1
}

fn default_delta_min() -> f64 {
    0.1
}

/// Potential description as it appears in config files. Complex values are
/// [re, im] pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialSpec {
    Builtin { name: String, params: Vec<f64> },
    Step { breakpoints: Vec<f64>, values: Vec<[f64; 2]> },
    Sampled { left: f64, right: f64, samples: Vec<[f64; 2]> },
    Radial { dimension: u32, r_max: f64, samples: Vec<[f64; 2]>, l_max: u32 },
}

/// A realized potential: on the line or radial.
#[derive(Debug, Clone)]
pub enum BuiltPotential {
    Line(Potential),
    Radial(RadialPotential),
}

impl BuiltPotential {
    pub fn dimension(&self) -> u32 {
        match self {
            BuiltPotential::Line(_) => 1,
            BuiltPotential::Radial(r) => r.dimension,
        }
    }

    pub fn lp_power_integral(&self, p: f64) -> Result<f64> {
        match self {
            BuiltPotential::Line(v) => v.lp_power_integral(p),
            BuiltPotential::Radial(r) => r.lp_power_integral(p),
        }
    }
}

impl PotentialSpec {
    pub fn build(&self) -> Result<BuiltPotential> {
        let pair = |p: &[f64; 2]| crate::C64::new(p[0], p[1]);
        match self {
            PotentialSpec::Builtin { name, params } => {
                Ok(BuiltPotential::Line(Potential::Step(potentials::builtin(name, params)?)))
            }
            PotentialSpec::Step { breakpoints, values } => {
                let step =
                    StepPotential::new(breakpoints.clone(), values.iter().map(pair).collect())?;
                Ok(BuiltPotential::Line(Potential::Step(step)))
            }
            PotentialSpec::Sampled { left, right, samples } => {
                let sampled =
                    SampledPotential::new(*left, *right, samples.iter().map(pair).collect())?;
                Ok(BuiltPotential::Line(Potential::Sampled(sampled)))
            }
            PotentialSpec::Radial { dimension, r_max, samples, l_max } => {
                let profile =
                    SampledPotential::new(0.0, *r_max, samples.iter().map(pair).collect())?;
                Ok(BuiltPotential::Radial(RadialPotential::new(*dimension, profile, *l_max)?))
            }
        }
    }
}

/// Solver selection plus optional manual overrides of the auto-scaled
/// parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolverSpec {
    Secular {
        /// Optional explicit search rectangle; default is the ħ-scaled
        /// localization region.
        region: Option<SearchRegion>,
    },
    Grid {
        n: Option<usize>,
        half_width: Option<f64>,
        #[serde(default = "default_delta_min")]
        delta_min: f64,
    },
    Radial {
        n: Option<usize>,
        half_width: Option<f64>,
        #[serde(default = "default_delta_min")]
        delta_min: f64,
    },
}

/// Geometric ħ grid from `max` down to `min` (equal ratios, so log-log
/// fits see equispaced abscissae).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HbarGrid {
    pub max: f64,
    pub min: f64,
    pub points: usize,
}

impl HbarGrid {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.min && self.min < self.max && self.max <= 1.0) {
            return Err(Error::Config(format!(
                "need 0 < ħ_min < ħ_max <= 1, got [{}, {}]",
                self.min, self.max
            )));
        }
        if self.points < 2 {
            return Err(Error::Config("need at least 2 ħ points".into()));
        }
        Ok(())
    }

    /// Grid values in descending order.
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        let ratio = (self.min / self.max).powf(1.0 / (n - 1) as f64);
        (0..n).map(|k| self.max * ratio.powi(k as i32)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct OutputSpec {
    pub csv: Option<String>,
    pub svg_dir: Option<String>,
}

/// Full sweep configuration; the on-disk format is TOML with a
/// `schema_version` field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub schema_version: u64,
    pub potential: PotentialSpec,
    pub solver: SolverSpec,
    pub hbar: HbarGrid,
    #[serde(rename = "functional")]
    pub functionals: Vec<FunctionalSpec>,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: SweepConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::SchemaVersion {
                found: self.schema_version,
                expected: SCHEMA_VERSION,
            });
        }
        self.hbar.validate()?;
        if self.functionals.is_empty() {
            return Err(Error::Config("at least one [[functional]] required".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        let potential = self.potential.build()?;
        match (&self.solver, &potential) {
            (SolverSpec::Secular { .. }, BuiltPotential::Line(Potential::Step(_))) => {}
            (SolverSpec::Secular { .. }, _) => {
                return Err(Error::Config(
                    "secular solver requires a step potential".into(),
                ));
            }
            (SolverSpec::Grid { .. }, BuiltPotential::Line(_)) => {}
            (SolverSpec::Grid { .. }, _) => {
                return Err(Error::Config("grid solver requires a line potential".into()));
            }
            (SolverSpec::Radial { .. }, BuiltPotential::Radial(_)) => {}
            (SolverSpec::Radial { .. }, _) => {
                return Err(Error::Config("radial solver requires a radial potential".into()));
            }
        }
        Ok(())
    }

    /// Stable hash of the canonical JSON encoding of this config.
    /// Execution parameters (worker count, output paths) are normalized
    /// away: configs that differ only in how they run must produce
    /// byte-identical results, including this hash.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.workers = 1;
        canonical.output = OutputSpec::default();
        let json = serde_json::to_string(&canonical).expect("config is serializable");
        format!("{:016x}", fnv1a64(json.as_bytes()))
    }
}

/// Per-point solver diagnostics recorded alongside the values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Diagnostics {
    pub region: Option<SearchRegion>,
    pub grid_n: Option<usize>,
    pub grid_half_width: Option<f64>,
    /// Error message when this ħ point failed (a gap).
    pub error: Option<String>,
}

/// One row of a sweep: eigenvalues and functional values at a single ħ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub hbar: f64,
    /// None marks a gap (solver failure at this point).
    pub eigs: Option<EigenSet>,
    pub n_eigs: Option<u32>,
    /// One value per configured functional; None on gaps.
    pub values: Vec<Option<f64>>,
    pub diagnostics: Diagnostics,
}

/// Sweep output: one record per grid point, descending in ħ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub schema_version: u64,
    pub config_hash: String,
    pub functional_labels: Vec<String>,
    pub records: Vec<SweepRecord>,
}

impl SweepResult {
    pub fn gap_fraction(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        let gaps = self.records.iter().filter(|r| r.eigs.is_none()).count();
        gaps as f64 / self.records.len() as f64
    }
}

fn solve_point(
    potential: &BuiltPotential,
    solver: &SolverSpec,
    hbar: f64,
) -> Result<(EigenSet, Diagnostics)> {
    match (solver, potential) {
        (SolverSpec::Secular { region }, BuiltPotential::Line(Potential::Step(step))) => {
            let region = match region {
                Some(r) => Some(*r),
                None => secular::default_region(step, hbar)?,
            };
            let mut diag = Diagnostics { region, ..Default::default() };
            let set = match region {
                Some(r) => secular::find_eigenvalues(step, hbar, r)?,
                None => EigenSet::empty(hbar, crate::SolverTag::Secular, "zero".into()),
            };
            diag.error = None;
            Ok((set, diag))
        }
        (SolverSpec::Grid { n, half_width, delta_min }, BuiltPotential::Line(v)) => {
            let mut params = GridParams::auto(v, hbar, *delta_min)?;
            if let Some(n) = n {
                params.n = *n;
            }
            if let Some(l) = half_width {
                params.half_width = *l;
            }
            let diag = Diagnostics {
                grid_n: Some(params.n),
                grid_half_width: Some(params.half_width),
                ..Default::default()
            };
            Ok((gridsolve::find_eigenvalues_grid(v, hbar, &params)?, diag))
        }
        (SolverSpec::Radial { n, half_width, delta_min }, BuiltPotential::Radial(v)) => {
            let line = Potential::Sampled(v.profile.clone());
            let mut params = GridParams::auto_half_line(&line, hbar, *delta_min)?;
            if let Some(n) = n {
                params.n = *n;
            }
            if let Some(l) = half_width {
                params.half_width = *l;
            }
            let diag = Diagnostics {
                grid_n: Some(params.n),
                grid_half_width: Some(params.half_width),
                ..Default::default()
            };
            Ok((gridsolve::find_eigenvalues_radial(v, hbar, &params)?, diag))
        }
        _ => Err(Error::Config("solver does not match potential kind".into())),
    }
}

fn evaluate_point(
    config: &SweepConfig,
    potential: &BuiltPotential,
    hbar: f64,
) -> SweepRecord {
    let d = potential.dimension();
    match solve_point(potential, &config.solver, hbar) {
        Ok((set, diagnostics)) => {
            let mut values = Vec::with_capacity(config.functionals.len());
            let mut first_error: Option<String> = None;
            for f in &config.functionals {
                let threshold = if f.needs_threshold() {
                    match potential.lp_power_integral(f.gamma() + d as f64 / 2.0) {
                        Ok(integral) => hbar.powi(-(d as i32)) * integral,
                        Err(e) => {
                            first_error.get_or_insert(e.to_string());
                            0.0
                        }
                    }
                } else {
                    0.0
                };
                match f.evaluate(&set, threshold) {
                    Ok(v) => values.push(Some(v)),
                    Err(e) => {
                        first_error.get_or_insert(e.to_string());
                        values.push(None);
                    }
                }
            }
            SweepRecord {
                hbar,
                n_eigs: Some(set.total_multiplicity()),
                eigs: Some(set),
                values,
                diagnostics: Diagnostics { error: first_error, ..diagnostics },
            }
        }
        Err(e) => SweepRecord {
            hbar,
            eigs: None,
            n_eigs: None,
            values: vec![None; config.functionals.len()],
            diagnostics: Diagnostics { error: Some(e.to_string()), ..Default::default() },
        },
    }
}

/// Run a sweep. Deterministic for a fixed config, including across worker
/// counts; failed ħ points become gap records rather than errors.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let potential = config.potential.build()?;
    let hbars = config.hbar.values();

    let records: Vec<SweepRecord> = if config.workers == 1 {
        hbars.iter().map(|&h| evaluate_point(config, &potential, h)).collect()
    } else {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?;
        pool.install(|| {
            hbars
                .par_iter()
                .map(|&h| evaluate_point(config, &potential, h))
                .collect()
        })
    };

    if records.iter().all(|r| r.eigs.is_none()) {
        return Err(Error::AllPointsFailed);
    }
    Ok(SweepResult {
        schema_version: SCHEMA_VERSION,
        config_hash: config.hash(),
        functional_labels: config.functionals.iter().map(|f| f.label()).collect(),
        records,
    })
}

// ---------------------------------------------------------------------------
// Growth-rate fits
// ---------------------------------------------------------------------------

/// Growth model fitted to S(ħ) over a window of the sweep grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// S(ħ) ≈ c ħ^{-p}
    Power,
    /// S(ħ) ≈ c ħ^{-p} (log 1/ħ)^q
    PowerLog,
}

/// Result of a growth-rate fit: S(ħ) ≈ c · ħ^{-p} · (log 1/ħ)^q.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub exponent: f64,
    pub log_power: f64,
    pub prefactor: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
}

/// Least-squares fit of `log S` against `log(1/ħ)` (and `log log(1/ħ)` for
/// the power-log model) over the default window: the smallest half of the
/// ħ grid, where asymptotics live.
pub fn fit_rate(result: &SweepResult, functional_index: usize, model: FitModel) -> Result<RateFit> {
    let mut hbars: Vec<f64> = result.records.iter().map(|r| r.hbar).collect();
    hbars.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let take = hbars.len().div_ceil(2).max(3).min(hbars.len());
    let window = (hbars[0], hbars[take - 1]);
    fit_rate_windowed(result, functional_index, model, window)
}

/// Same fit over an explicit ħ window [lo, hi].
pub fn fit_rate_windowed(
    result: &SweepResult,
    functional_index: usize,
    model: FitModel,
    window: (f64, f64),
) -> Result<RateFit> {
    if functional_index >= result.functional_labels.len() {
        return Err(Error::FitError(format!(
            "functional index {functional_index} out of range"
        )));
    }
    let (lo, hi) = window;
    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for r in &result.records {
        if r.hbar < lo * (1.0 - 1e-12) || r.hbar > hi * (1.0 + 1e-12) {
            continue;
        }
        let Some(Some(v)) = r.values.get(functional_index) else {
            continue; // gap: excluded from the fit
        };
        if !(*v > 0.0) {
            return Err(Error::FitError(format!(
                "nonpositive functional value {v} at ħ = {}",
                r.hbar
            )));
        }
        xs.push((1.0 / r.hbar).ln());
        ys.push(v.ln());
    }
    if xs.len() < 3 {
        return Err(Error::FitError(format!(
            "need at least 3 positive records in the window, got {}",
            xs.len()
        )));
    }

    let fit = match model {
        FitModel::Power => {
            let (coef, r2) = least_squares(&xs, &[], &ys)?;
            RateFit {
                exponent: coef[1],
                log_power: 0.0,
                prefactor: coef[0].exp(),
                r_squared: r2,
                window,
            }
        }
        FitModel::PowerLog => {
            if xs.iter().any(|&x| x <= 0.0) {
                return Err(Error::FitError(
                    "power_log model needs ħ < 1 throughout the window".into(),
                ));
            }
            let logx: Vec<f64> = xs.iter().map(|&x| x.ln()).collect();
            let (coef, r2) = least_squares(&xs, &logx, &ys)?;
            RateFit {
                exponent: coef[1],
                log_power: coef[2],
                prefactor: coef[0].exp(),
                r_squared: r2,
                window,
            }
        }
    };
    Ok(fit)
}

/// Ordinary least squares for y = c0 + c1 x (+ c2 z), returning the
/// coefficients and R².
fn least_squares(x: &[f64], z: &[f64], y: &[f64]) -> Result<(Vec<f64>, f64)> {
    let n = x.len();
    let with_log = !z.is_empty();
    let cols = if with_log { 3 } else { 2 };
    // normal equations A^T A c = A^T y
    let mut ata = vec![vec![0.0f64; cols]; cols];
    let mut aty = vec![0.0f64; cols];
    for i in 0..n {
        let row = if with_log { vec![1.0, x[i], z[i]] } else { vec![1.0, x[i]] };
        for a in 0..cols {
            for b in 0..cols {
                ata[a][b] += row[a] * row[b];
            }
            aty[a] += row[a] * y[i];
        }
    }
    let coef = solve_small(&mut ata, &mut aty)
        .ok_or_else(|| Error::FitError("singular normal equations".into()))?;

    let mean = y.iter().sum::<f64>() / n as f64;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for i in 0..n {
        let pred = coef[0]
            + coef[1] * x[i]
            + if with_log { coef[2] * z[i] } else { 0.0 };
        ss_res += (y[i] - pred).powi(2);
        ss_tot += (y[i] - mean).powi(2);
    }
    let r2 = if ss_tot > 0.0 { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) } else { 1.0 };
    Ok((coef, r2))
}

/// Gaussian elimination with partial pivoting for the 2×2 / 3×3 normal
/// equations.
fn solve_small(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in col + 1..n {
            acc -= a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    Some(x)
}

// ---------------------------------------------------------------------------
// Persistence: CSV table + JSON sidecar
// ---------------------------------------------------------------------------

const BASE_COLUMNS: [&str; 2] = ["hbar", "n_eigs"];
const DIAG_COLUMNS: [&str; 7] = [
    "region_re_min",
    "region_re_max",
    "region_im_min",
    "region_im_max",
    "grid_n",
    "grid_half_width",
    "status",
];

fn csv_text(result: &SweepResult) -> String {
    let mut out = String::new();
    let mut header: Vec<String> = BASE_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend(result.functional_labels.iter().cloned());
    header.extend(DIAG_COLUMNS.iter().map(|s| s.to_string()));
    out.push_str(&header.join(","));
    out.push('\n');

    for r in &result.records {
        let mut cells: Vec<String> = Vec::with_capacity(header.len());
        cells.push(fmt_g17(r.hbar));
        cells.push(r.n_eigs.map(|n| n.to_string()).unwrap_or_default());
        for v in &r.values {
            cells.push(v.map(fmt_g17).unwrap_or_default());
        }
        let d = &r.diagnostics;
        match d.region {
            Some(reg) => {
                cells.push(fmt_g17(reg.re_min));
                cells.push(fmt_g17(reg.re_max));
                cells.push(fmt_g17(reg.im_min));
                cells.push(fmt_g17(reg.im_max));
            }
            None => cells.extend(std::iter::repeat(String::new()).take(4)),
        }
        cells.push(d.grid_n.map(|n| n.to_string()).unwrap_or_default());
        cells.push(d.grid_half_width.map(fmt_g17).unwrap_or_default());
        cells.push(if r.eigs.is_some() { "ok".into() } else { "gap".into() });
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Write the CSV table to `path` and the full JSON sidecar (eigenvalue
/// lists, config hash) next to it with extension `.json`.
pub fn persist(result: &SweepResult, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, csv_text(result))?;
    let sidecar = path.with_extension("json");
    let json = serde_json::to_string_pretty(result)
        .map_err(|e| Error::Schema(e.to_string()))?;
    std::fs::write(sidecar, json)?;
    Ok(())
}

/// Load a sweep back from its CSV path (the JSON sidecar must sit next to
/// it). The CSV header is validated column by column; the sidecar carries
/// the lossless record data.
pub fn load(path: &Path) -> Result<SweepResult> {
    let sidecar = path.with_extension("json");
    let json = std::fs::read_to_string(&sidecar)?;
    let result: SweepResult =
        serde_json::from_str(&json).map_err(|e| Error::Schema(e.to_string()))?;
    if result.schema_version != SCHEMA_VERSION {
        return Err(Error::SchemaVersion {
            found: result.schema_version,
            expected: SCHEMA_VERSION,
        });
    }

    let csv = std::fs::read_to_string(path)?;
    let mut lines = csv.lines();
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::Schema("empty CSV".into()))?
        .split(',')
        .collect();
    let mut expected: Vec<String> = BASE_COLUMNS.iter().map(|s| s.to_string()).collect();
    expected.extend(result.functional_labels.iter().cloned());
    expected.extend(DIAG_COLUMNS.iter().map(|s| s.to_string()));
    for col in &expected {
        if !header.contains(&col.as_str()) {
            return Err(Error::Schema(format!("missing column `{col}`")));
        }
    }
    let rows = lines.filter(|l| !l.is_empty()).count();
    if rows != result.records.len() {
        return Err(Error::Schema(format!(
            "CSV has {rows} rows but sidecar has {} records",
            result.records.len()
        )));
    }
    Ok(result)
}

/// Convenience wrapper: run, persist (if configured), plot (if configured).
pub fn run_and_persist(config: &SweepConfig) -> Result<SweepResult> {
    let result = run_sweep(config)?;
    if let Some(csv) = &config.output.csv {
        persist(&result, Path::new(csv))?;
    }
    if let Some(dir) = &config.output.svg_dir {
        let dir = Path::new(dir);
        std::fs::create_dir_all(dir)?;
        for (idx, label) in result.functional_labels.iter().enumerate() {
            let fit = fit_rate(&result, idx, FitModel::Power).ok();
            let file = dir.join(format!("{label}.svg"));
            plot_functional(&result, idx, fit.as_ref(), &file)?;
        }
    }
    Ok(result)
}
