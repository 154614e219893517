//! Derivative-free search over parameterized step-potential families for
//! candidates that stress the distance-weighted eigenvalue bounds.
//!
//! The objective is the single-ħ ratio of the distance-weighted sum to its
//! ħ^{-d}-scaled potential norm; the full ħ-sweep fit is reserved for final
//! candidates because sweeps are expensive.

use crate::error::{Error, Result};
use crate::functionals::dhk_sum;
use crate::potentials::StepPotential;
use crate::secular;
use crate::sweeps::{FitModel, HbarGrid, RateFit};
use crate::util::SplitMix64;
use crate::C64;
use serde::{Deserialize, Serialize};

/// Families of step potentials over a real parameter vector. Complex
/// heights are encoded as interleaved (re, im) pairs so the simplex search
/// sees plain real coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    /// Fixed breakpoints; parameters are the n complex piece heights:
    /// [re_1, im_1, ..., re_n, im_n].
    StepHeights { breakpoints: Vec<f64> },
    /// Widths and heights both free: [w_1, ..., w_n, re_1, im_1, ...],
    /// pieces laid left to right from x = 0.
    StepGeometry { pieces: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialFamily {
    pub kind: FamilyKind,
    /// Inclusive bounds per parameter, `bounds[i] = [lo_i, hi_i]`.
    pub bounds: Vec<[f64; 2]>,
    pub dimension: u32,
}

impl PotentialFamily {
    pub fn param_count(&self) -> usize {
        match &self.kind {
            FamilyKind::StepHeights { breakpoints } => 2 * (breakpoints.len() - 1),
            FamilyKind::StepGeometry { pieces } => 3 * pieces,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension != 1 {
            return Err(Error::Search(
                "step families realize line potentials; set dimension = 1".into(),
            ));
        }
        match &self.kind {
            FamilyKind::StepHeights { breakpoints } => {
                if breakpoints.len() < 2 {
                    return Err(Error::Search("need at least one piece".into()));
                }
                if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(Error::Search("breakpoints must increase".into()));
                }
            }
            FamilyKind::StepGeometry { pieces } => {
                if *pieces == 0 {
                    return Err(Error::Search("need at least one piece".into()));
                }
                for i in 0..*pieces {
                    if self.bounds.get(i).map(|b| b[0] <= 0.0).unwrap_or(true) {
                        return Err(Error::Search(format!(
                            "width bound {i} must be strictly positive"
                        )));
                    }
                }
            }
        }
        if self.bounds.len() != self.param_count() {
            return Err(Error::Search(format!(
                "expected {} parameter bounds, got {}",
                self.param_count(),
                self.bounds.len()
            )));
        }
        if self.bounds.iter().any(|b| !(b[0] < b[1])) {
            return Err(Error::Search("each bound must satisfy lo < hi".into()));
        }
        Ok(())
    }

    /// Build the step potential at a parameter vector.
    pub fn realize(&self, params: &[f64]) -> Result<StepPotential> {
        if params.len() != self.param_count() {
            return Err(Error::Search(format!(
                "expected {} parameters, got {}",
                self.param_count(),
                params.len()
            )));
        }
        match &self.kind {
            FamilyKind::StepHeights { breakpoints } => {
                let values = params
                    .chunks_exact(2)
                    .map(|c| C64::new(c[0], c[1]))
                    .collect();
                StepPotential::new(breakpoints.clone(), values)
            }
            FamilyKind::StepGeometry { pieces } => {
                let widths = &params[..*pieces];
                let mut breakpoints = Vec::with_capacity(pieces + 1);
                breakpoints.push(0.0);
                let mut x = 0.0;
                for &w in widths {
                    if !(w > 0.0) {
                        return Err(Error::Search(format!("nonpositive width {w}")));
                    }
                    x += w;
                    breakpoints.push(x);
                }
                let values = params[*pieces..]
                    .chunks_exact(2)
                    .map(|c| C64::new(c[0], c[1]))
                    .collect();
                StepPotential::new(breakpoints, values)
            }
        }
    }
}

/// Objective parameters: the distance-weighted sum exponents and the fixed
/// ħ used during optimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    pub gamma: f64,
    pub sigma: f64,
    pub hbar: f64,
}

/// True when σ is in the regime where the distance-weighted bound is
/// known to hold (σ > d/2); smaller σ is exploratory.
pub fn question_regime(sigma: f64, dimension: u32) -> bool {
    sigma > dimension as f64 / 2.0
}

/// Ratio `Σ |E|^{-σ} δ(E)^{γ+σ} / (ħ^{-d} ∫ |V|^{γ+d/2})` at one ħ.
/// Sustained growth of this ratio as ħ shrinks marks a candidate violation
/// of the ħ^{-d}-normalized bound.
pub fn objective(
    family: &PotentialFamily,
    params: &[f64],
    gamma: f64,
    sigma: f64,
    hbar: f64,
) -> Result<f64> {
    family.validate()?;
    let potential = family.realize(params)?;
    let d = family.dimension;
    let norm = potential.lp_power_integral(gamma + d as f64 / 2.0)?;
    if norm < 1e-12 {
        return Err(Error::Search("zero-norm potential rejected".into()));
    }
    let scaled_norm = hbar.powi(-(d as i32)) * norm;
    let eigs = secular::find_eigenvalues_default(&potential, hbar)?;
    Ok(dhk_sum(&eigs, gamma, sigma)? / scaled_norm)
}

/// Outcome of a derivative-free search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub best_params: Vec<f64>,
    pub best_value: f64,
    /// Best-so-far after each evaluation, non-decreasing.
    pub trace: Vec<f64>,
    pub evaluations: u64,
    pub seed: u64,
    #[serde(default)]
    pub flags: Vec<String>,
}

const PENALTY: f64 = -1e300;

/// Maximize `f` over a box with Nelder–Mead simplex descent plus seeded
/// random restarts. Deterministic for a fixed seed; restarts merge by
/// best value with ties broken by the lowest restart index. Evaluation
/// failures score a large penalty instead of aborting.
pub fn optimize_fn(
    f: &(dyn Fn(&[f64]) -> Result<f64> + Sync),
    bounds: &[[f64; 2]],
    budget: u64,
    restarts: usize,
    seed: u64,
) -> Result<SearchReport> {
    if budget < 10 {
        return Err(Error::Search(format!("budget must be >= 10 evaluations, got {budget}")));
    }
    if bounds.is_empty() || bounds.iter().any(|b| !(b[0] < b[1])) {
        return Err(Error::Search("invalid parameter bounds".into()));
    }
    let restarts = restarts.max(1);
    let share = (budget / restarts as u64).max(5);

    use rayon::prelude::*;
    let runs: Vec<(Vec<f64>, f64, Vec<f64>, u64)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = SplitMix64::new(seed.wrapping_add(0x9e37_79b9 * (r as u64 + 1)));
            let start: Vec<f64> =
                bounds.iter().map(|b| rng.uniform(b[0], b[1])).collect();
            nelder_mead(f, bounds, &start, share, &mut rng)
        })
        .collect();

    let mut best_idx = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.1 > runs[best_idx].1 {
            best_idx = i;
        }
    }
    let mut trace: Vec<f64> = Vec::new();
    let mut evaluations = 0u64;
    let mut best_so_far = f64::NEG_INFINITY;
    for run in &runs {
        for &v in &run.2 {
            best_so_far = best_so_far.max(v);
            trace.push(best_so_far);
        }
        evaluations += run.3;
    }
    if runs[best_idx].1 <= PENALTY {
        return Err(Error::Search("all evaluations failed".into()));
    }
    Ok(SearchReport {
        best_params: runs[best_idx].0.clone(),
        best_value: runs[best_idx].1,
        trace,
        evaluations,
        seed,
        flags: Vec::new(),
    })
}

/// Maximize the bound-violation objective over a family.
pub fn optimize(
    family: &PotentialFamily,
    spec: &ObjectiveSpec,
    budget: u64,
    restarts: usize,
    seed: u64,
) -> Result<SearchReport> {
    family.validate()?;
    let f = |params: &[f64]| objective(family, params, spec.gamma, spec.sigma, spec.hbar);
    let mut report = optimize_fn(&f, &family.bounds, budget, restarts, seed)?;
    if !question_regime(spec.sigma, family.dimension) {
        report.flags.push(format!(
            "sigma = {} is at or below d/2 = {}: outside the proven-bound regime (exploratory)",
            spec.sigma,
            family.dimension as f64 / 2.0
        ));
    }
    Ok(report)
}

/// One bounded Nelder–Mead run. Returns (best point, best value,
/// per-evaluation best trace, evaluations used).
fn nelder_mead(
    f: &(dyn Fn(&[f64]) -> Result<f64> + Sync),
    bounds: &[[f64; 2]],
    start: &[f64],
    budget: u64,
    rng: &mut SplitMix64,
) -> (Vec<f64>, f64, Vec<f64>, u64) {
    let dim = bounds.len();
    let clip = |x: &mut Vec<f64>| {
        for (v, b) in x.iter_mut().zip(bounds) {
            *v = v.clamp(b[0], b[1]);
        }
    };
    let mut evals = 0u64;
    let mut trace = Vec::new();
    let mut best_val = f64::NEG_INFINITY;
    let mut best_x = start.to_vec();

    // Minimize -f internally.
    let eval = |x: &[f64],
                    evals: &mut u64,
                    trace: &mut Vec<f64>,
                    best_val: &mut f64,
                    best_x: &mut Vec<f64>|
     -> f64 {
        *evals += 1;
        let v = f(x).unwrap_or(PENALTY);
        if v > *best_val {
            *best_val = v;
            *best_x = x.to_vec();
        }
        trace.push(v);
        -v
    };

    // Initial simplex: start plus 10%-of-range steps along each axis.
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(start.to_vec());
    for i in 0..dim {
        let mut x = start.to_vec();
        let step = 0.1 * (bounds[i][1] - bounds[i][0]);
        x[i] = if x[i] + step <= bounds[i][1] { x[i] + step } else { x[i] - step };
        simplex.push(x);
    }
    let mut values: Vec<f64> = simplex
        .iter()
        .map(|x| eval(x, &mut evals, &mut trace, &mut best_val, &mut best_x))
        .collect();

    let (alpha, gamma_e, rho, sigma_s) = (1.0, 2.0, 0.5, 0.5);
    while evals < budget {
        // sort ascending in internal (minimization) value
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        let reorder_simplex: Vec<Vec<f64>> = order.iter().map(|&i| simplex[i].clone()).collect();
        let reorder_values: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        simplex = reorder_simplex;
        values = reorder_values;

        // convergence: simplex collapsed
        let spread: f64 = (0..dim)
            .map(|i| {
                let lo = simplex.iter().map(|x| x[i]).fold(f64::INFINITY, f64::min);
                let hi = simplex.iter().map(|x| x[i]).fold(f64::NEG_INFINITY, f64::max);
                (hi - lo) / (bounds[i][1] - bounds[i][0])
            })
            .fold(0.0, f64::max);
        if spread < 1e-10 {
            // restart around a jittered best point with the leftover budget
            if evals + (dim as u64 + 1) >= budget {
                break;
            }
            let mut x0 = best_x.clone();
            for (i, b) in bounds.iter().enumerate() {
                x0[i] = (x0[i] + 0.01 * (b[1] - b[0]) * (rng.next_f64() - 0.5)).clamp(b[0], b[1]);
            }
            simplex = vec![x0.clone()];
            for i in 0..dim {
                let mut x = x0.clone();
                let step = 0.05 * (bounds[i][1] - bounds[i][0]);
                x[i] = if x[i] + step <= bounds[i][1] { x[i] + step } else { x[i] - step };
                simplex.push(x);
            }
            values = simplex
                .iter()
                .map(|x| eval(x, &mut evals, &mut trace, &mut best_val, &mut best_x))
                .collect();
            continue;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|i| simplex[..dim].iter().map(|x| x[i]).sum::<f64>() / dim as f64)
            .collect();

        let mut reflected: Vec<f64> = (0..dim)
            .map(|i| centroid[i] + alpha * (centroid[i] - simplex[dim][i]))
            .collect();
        clip(&mut reflected);
        let fr = eval(&reflected, &mut evals, &mut trace, &mut best_val, &mut best_x);

        if fr < values[0] {
            let mut expanded: Vec<f64> = (0..dim)
                .map(|i| centroid[i] + gamma_e * (reflected[i] - centroid[i]))
                .collect();
            clip(&mut expanded);
            let fe = eval(&expanded, &mut evals, &mut trace, &mut best_val, &mut best_x);
            if fe < fr {
                simplex[dim] = expanded;
                values[dim] = fe;
            } else {
                simplex[dim] = reflected;
                values[dim] = fr;
            }
        } else if fr < values[dim - 1] {
            simplex[dim] = reflected;
            values[dim] = fr;
        } else {
            let mut contracted: Vec<f64> = (0..dim)
                .map(|i| centroid[i] + rho * (simplex[dim][i] - centroid[i]))
                .collect();
            clip(&mut contracted);
            let fc = eval(&contracted, &mut evals, &mut trace, &mut best_val, &mut best_x);
            if fc < values[dim] {
                simplex[dim] = contracted;
                values[dim] = fc;
            } else {
                // shrink toward the best vertex
                for k in 1..=dim {
                    for i in 0..dim {
                        simplex[k][i] = simplex[0][i] + sigma_s * (simplex[k][i] - simplex[0][i]);
                    }
                    let v = eval(
                        &simplex[k].clone(),
                        &mut evals,
                        &mut trace,
                        &mut best_val,
                        &mut best_x,
                    );
                    values[k] = v;
                    if evals >= budget {
                        break;
                    }
                }
            }
        }
    }
    (best_x, best_val, trace, evals)
}

/// Fit the ħ-exponent of the objective over a grid: exponent p > 0 signals
/// super-ħ^{-d} growth of the distance-weighted sum.
pub fn sweep_objective(
    family: &PotentialFamily,
    params: &[f64],
    gamma: f64,
    sigma: f64,
    hbar_grid: &HbarGrid,
) -> Result<RateFit> {
    hbar_grid.validate()?;
    use rayon::prelude::*;
    let hbars = hbar_grid.values();
    let values: Vec<Option<f64>> = hbars
        .par_iter()
        .map(|&h| objective(family, params, gamma, sigma, h).ok())
        .collect();
    let records: Vec<crate::sweeps::SweepRecord> = hbars
        .iter()
        .zip(&values)
        .map(|(&h, &v)| crate::sweeps::SweepRecord {
            hbar: h,
            eigs: None,
            n_eigs: None,
            values: vec![v],
            diagnostics: crate::sweeps::Diagnostics::default(),
        })
        .collect();
    let result = crate::sweeps::SweepResult {
        schema_version: crate::sweeps::SCHEMA_VERSION,
        config_hash: String::new(),
        functional_labels: vec![format!("objective_g{gamma}_s{sigma}")],
        records,
    };
    crate::sweeps::fit_rate_windowed(&result, 0, FitModel::Power, (hbar_grid.min, hbar_grid.max))
}
