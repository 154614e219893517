//! Compactly supported complex potentials on the line, plus the radial
//! wrapper used for higher-dimensional problems.
//!
//! All potential values are immutable after construction; transformations
//! return new values so sweep results can be cached and replayed safely.

use crate::error::{Error, Result};
use crate::quad;
use crate::C64;
use serde::{Deserialize, Serialize};

/// Imaginary parts below this are treated as zero when a real-valued
/// potential is required.
pub const REAL_TOL: f64 = 1e-14;

/// Piecewise-constant potential: value `values[j]` on
/// `[breakpoints[j], breakpoints[j+1])`, zero outside the support.
///
/// The left-closed / right-open convention at breakpoints makes `eval`
/// deterministic; it never affects integrals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepPotential {
    breakpoints: Vec<f64>,
    values: Vec<C64>,
}

impl StepPotential {
    pub fn new(breakpoints: Vec<f64>, values: Vec<C64>) -> Result<Self> {
        if breakpoints.len() < 2 || values.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidPotential(format!(
                "need n+1 breakpoints for n >= 1 values, got {} and {}",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidPotential(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        if breakpoints.iter().any(|x| !x.is_finite())
            || values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::InvalidPotential("non-finite entry".into()));
        }
        Ok(Self { breakpoints, values })
    }

    /// Zero potential (empty step list). Support degenerates to a point.
    pub fn zero() -> Self {
        Self {
            breakpoints: vec![0.0, 1.0],
            values: vec![C64::new(0.0, 0.0)],
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, C64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(w, &v)| (w[0], w[1], v))
    }

    pub fn eval(&self, x: f64) -> C64 {
        let n = self.values.len();
        if x < self.breakpoints[0] || x >= self.breakpoints[n] {
            return C64::new(0.0, 0.0);
        }
        // partition_point returns the count of breakpoints <= x.
        let idx = self.breakpoints.partition_point(|b| *b <= x);
        self.values[idx - 1]
    }

    pub fn support(&self) -> (f64, f64) {
        (self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    /// ∫ |V|^p dx in closed form.
    pub fn lp_power_integral(&self, p: f64) -> Result<f64> {
        check_power(p)?;
        let mut acc = crate::util::KahanSum::new();
        for (a, b, v) in self.pieces() {
            acc.add(v.norm().powf(p) * (b - a));
        }
        Ok(acc.value())
    }

    /// ∫ V_-^p dx with V_- = max(0, -V); requires a real-valued potential.
    pub fn negative_part_integral(&self, p: f64) -> Result<f64> {
        check_power(p)?;
        self.require_real()?;
        let mut acc = crate::util::KahanSum::new();
        for (a, b, v) in self.pieces() {
            let neg = (-v.re).max(0.0);
            if neg > 0.0 {
                acc.add(neg.powf(p) * (b - a));
            }
        }
        Ok(acc.value())
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im.abs() < REAL_TOL)
    }

    fn require_real(&self) -> Result<()> {
        if self.is_real() {
            Ok(())
        } else {
            Err(Error::InvalidPotential(
                "operation requires a real-valued potential".into(),
            ))
        }
    }

    /// Pointwise complex-conjugated potential.
    pub fn conj(&self) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    /// Potential translated by `t`: x ↦ V(x - t).
    pub fn shifted(&self, t: f64) -> Self {
        Self {
            breakpoints: self.breakpoints.iter().map(|x| x + t).collect(),
            values: self.values.clone(),
        }
    }

    /// Potential with values multiplied by `c`.
    pub fn scaled(&self, c: C64) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Argument dilation x ↦ V(a·x) for a > 0; breakpoints shrink by 1/a.
    pub fn dilated_argument(&self, a: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::InvalidPotential("dilation factor must be > 0".into()));
        }
        Ok(Self {
            breakpoints: self.breakpoints.iter().map(|x| x / a).collect(),
            values: self.values.clone(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Exact mean of the potential over [a, b].
    pub fn average_over(&self, a: f64, b: f64) -> C64 {
        if !(a < b) {
            return self.eval(a);
        }
        let mut acc = C64::new(0.0, 0.0);
        for (lo, hi, v) in self.pieces() {
            let overlap = hi.min(b) - lo.max(a);
            if overlap > 0.0 {
                acc += v * overlap;
            }
        }
        acc / (b - a)
    }

    /// True when every breakpoint is an integer multiple of 1/q for some
    /// q in {1, 2, 4, ..., 64}; returns that q. Grid solvers use this to
    /// align mesh nodes with the discontinuities, which keeps the h² error
    /// coefficient stable across refinement levels.
    pub fn lattice_denominator(&self) -> Option<u32> {
        lattice_denominator_of(&self.breakpoints)
    }
}

/// Potential sampled on a uniform grid over `[left, right]`, evaluated by
/// linear interpolation, zero outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledPotential {
    left: f64,
    right: f64,
    samples: Vec<C64>,
}

impl SampledPotential {
    pub fn new(left: f64, right: f64, samples: Vec<C64>) -> Result<Self> {
        if !(left < right) {
            return Err(Error::InvalidPotential("need left < right".into()));
        }
        if samples.len() < 2 {
            return Err(Error::InvalidPotential("need at least 2 samples".into()));
        }
        if samples.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidPotential("non-finite sample".into()));
        }
        Ok(Self { left, right, samples })
    }

    /// Sample a function on a uniform grid.
    pub fn from_fn(left: f64, right: f64, n: usize, f: impl Fn(f64) -> C64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidPotential("need at least 2 samples".into()));
        }
        let h = (right - left) / (n - 1) as f64;
        let samples = (0..n).map(|i| f(left + i as f64 * h)).collect();
        Self::new(left, right, samples)
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.left, self.right)
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn eval(&self, x: f64) -> C64 {
        if x < self.left || x > self.right {
            return C64::new(0.0, 0.0);
        }
        let n = self.samples.len();
        let h = (self.right - self.left) / (n - 1) as f64;
        let t = (x - self.left) / h;
        let i = (t.floor() as usize).min(n - 2);
        let frac = t - i as f64;
        self.samples[i] * (1.0 - frac) + self.samples[i + 1] * frac
    }

    pub fn support(&self) -> (f64, f64) {
        (self.left, self.right)
    }

    fn grid(&self) -> Vec<f64> {
        let n = self.samples.len();
        let h = (self.right - self.left) / (n - 1) as f64;
        (0..n).map(|i| self.left + i as f64 * h).collect()
    }

    /// ∫ |V|^p dx by adaptive quadrature (relative tolerance 1e-10),
    /// pre-split at the sample nodes.
    pub fn lp_power_integral(&self, p: f64) -> Result<f64> {
        check_power(p)?;
        quad::adaptive(
            |x| self.eval(x).norm().powf(p),
            self.left,
            self.right,
            &self.grid(),
            1e-10,
            1e-300,
        )
    }

    pub fn negative_part_integral(&self, p: f64) -> Result<f64> {
        check_power(p)?;
        if !self.is_real() {
            return Err(Error::InvalidPotential(
                "operation requires a real-valued potential".into(),
            ));
        }
        quad::adaptive(
            |x| (-self.eval(x).re).max(0.0).powf(p),
            self.left,
            self.right,
            &self.grid(),
            1e-10,
            1e-300,
        )
    }

    pub fn is_real(&self) -> bool {
        self.samples.iter().all(|v| v.im.abs() < REAL_TOL)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Lattice denominator of the support endpoints, where the interpolant
    /// may jump to zero; see [`StepPotential::lattice_denominator`].
    pub fn lattice_denominator(&self) -> Option<u32> {
        lattice_denominator_of(&[self.left, self.right])
    }

    /// Exact mean of the interpolant over [a, b] (zero outside support).
    pub fn average_over(&self, a: f64, b: f64) -> C64 {
        if !(a < b) {
            return self.eval(a);
        }
        let lo = a.max(self.left);
        let hi = b.min(self.right);
        if !(lo < hi) {
            return C64::new(0.0, 0.0);
        }
        let n = self.samples.len();
        let hs = (self.right - self.left) / (n - 1) as f64;
        // walk the sample intervals overlapping [lo, hi]; the interpolant
        // is linear on each, so the clipped trapezoid is exact
        let first = (((lo - self.left) / hs).floor() as usize).min(n - 2);
        let mut acc = C64::new(0.0, 0.0);
        let mut seg_lo = lo;
        let mut idx = first;
        while seg_lo < hi {
            let cell_end = self.left + (idx + 1) as f64 * hs;
            let seg_hi = hi.min(cell_end);
            if seg_hi > seg_lo {
                acc += (self.eval(seg_lo) + self.eval(seg_hi)) * (0.5 * (seg_hi - seg_lo));
            }
            if seg_hi >= hi {
                break;
            }
            seg_lo = seg_hi;
            idx = (idx + 1).min(n - 2);
        }
        acc / (b - a)
    }
}

fn lattice_denominator_of(points: &[f64]) -> Option<u32> {
    for q in [1u32, 2, 4, 8, 16, 32, 64] {
        let ok = points.iter().all(|x| {
            let scaled = x * q as f64;
            (scaled - scaled.round()).abs() < 1e-12
        });
        if ok {
            return Some(q);
        }
    }
    None
}

/// Radial potential V(|x|) in dimension `d ≥ 2`: a sampled profile on
/// `[0, R]` plus the number of angular-momentum channels to resolve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialPotential {
    pub dimension: u32,
    pub profile: SampledPotential,
    pub l_max: u32,
}

impl RadialPotential {
    pub fn new(dimension: u32, profile: SampledPotential, l_max: u32) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::InvalidPotential("radial potentials need d >= 2".into()));
        }
        if profile.bounds().0 < 0.0 {
            return Err(Error::InvalidPotential("radial profile must start at r >= 0".into()));
        }
        Ok(Self { dimension, profile, l_max })
    }

    pub fn radius(&self) -> f64 {
        self.profile.bounds().1
    }

    /// ∫_{R^d} |V(|x|)|^p dx reduced to the radial integral.
    pub fn lp_power_integral(&self, p: f64) -> Result<f64> {
        check_power(p)?;
        let d = self.dimension;
        let (lo, hi) = self.profile.bounds();
        let radial = quad::adaptive(
            |r: f64| self.profile.eval(r).norm().powf(p) * r.powi(d as i32 - 1),
            lo,
            hi,
            &self.profile.grid(),
            1e-10,
            1e-300,
        )?;
        Ok(sphere_surface_area(d) * radial)
    }
}

/// Surface area of the unit sphere S^{d-1} via Γ(d/2) recursion.
pub fn sphere_surface_area(d: u32) -> f64 {
    let half_d = d as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(half_d) / gamma_half_integer(d)
}

/// Γ(d/2) for integer d ≥ 1, by the recursion from Γ(1/2) = √π and Γ(1) = 1.
pub fn gamma_half_integer(d: u32) -> f64 {
    let mut val = if d % 2 == 0 { 1.0 } else { std::f64::consts::PI.sqrt() };
    let mut k = if d % 2 == 0 { 2 } else { 1 };
    while k + 2 <= d {
        val *= k as f64 / 2.0;
        k += 2;
    }
    val
}

fn check_power(p: f64) -> Result<()> {
    if p > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidFunctional(format!("power must be > 0, got {p}")))
    }
}

/// Either flavor of line potential, for code paths that accept both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Potential {
    Step(StepPotential),
    Sampled(SampledPotential),
}

impl Potential {
    pub fn eval(&self, x: f64) -> C64 {
        match self {
            Potential::Step(p) => p.eval(x),
            Potential::Sampled(p) => p.eval(x),
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            Potential::Step(p) => p.support(),
            Potential::Sampled(p) => p.support(),
        }
    }

    pub fn lp_power_integral(&self, p: f64) -> Result<f64> {
        match self {
            Potential::Step(s) => s.lp_power_integral(p),
            Potential::Sampled(s) => s.lp_power_integral(p),
        }
    }

    pub fn negative_part_integral(&self, p: f64) -> Result<f64> {
        match self {
            Potential::Step(s) => s.negative_part_integral(p),
            Potential::Sampled(s) => s.negative_part_integral(p),
        }
    }

    pub fn is_real(&self) -> bool {
        match self {
            Potential::Step(p) => p.is_real(),
            Potential::Sampled(p) => p.is_real(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        match self {
            Potential::Step(p) => p.max_abs(),
            Potential::Sampled(p) => p.max_abs(),
        }
    }

    pub fn as_step(&self) -> Option<&StepPotential> {
        match self {
            Potential::Step(p) => Some(p),
            Potential::Sampled(_) => None,
        }
    }

    pub fn lattice_denominator(&self) -> Option<u32> {
        match self {
            Potential::Step(p) => p.lattice_denominator(),
            Potential::Sampled(p) => p.lattice_denominator(),
        }
    }

    pub fn average_over(&self, a: f64, b: f64) -> C64 {
        match self {
            Potential::Step(p) => p.average_over(a, b),
            Potential::Sampled(p) => p.average_over(a, b),
        }
    }
}

impl From<StepPotential> for Potential {
    fn from(p: StepPotential) -> Self {
        Potential::Step(p)
    }
}

impl From<SampledPotential> for Potential {
    fn from(p: SampledPotential) -> Self {
        Potential::Sampled(p)
    }
}

/// Purely imaginary barrier `coupling · i · χ_[0, width]`.
pub fn bogli_stampach(coupling: f64, width: f64) -> Result<StepPotential> {
    if !(width > 0.0) {
        return Err(Error::InvalidPotential("width must be > 0".into()));
    }
    StepPotential::new(vec![0.0, width], vec![C64::new(0.0, coupling)])
}

/// Attractive square well `-depth · χ_[0, width]`.
pub fn square_well(depth: f64, width: f64) -> Result<StepPotential> {
    if !(width > 0.0) {
        return Err(Error::InvalidPotential("width must be > 0".into()));
    }
    StepPotential::new(vec![0.0, width], vec![C64::new(-depth, 0.0)])
}

/// Construct a builtin potential by name. Parameter counts:
/// `bogli_stampach(coupling, width)`, `square_well(depth, width)`.
pub fn builtin(name: &str, params: &[f64]) -> Result<StepPotential> {
    match name {
        "bogli_stampach" => {
            let [c, w] = expect_params(name, params)?;
            bogli_stampach(c, w)
        }
        "square_well" => {
            let [d, w] = expect_params(name, params)?;
            square_well(d, w)
        }
        _ => Err(Error::UnknownBuiltin(name.to_string())),
    }
}

fn expect_params(name: &str, params: &[f64]) -> Result<[f64; 2]> {
    if params.len() != 2 {
        return Err(Error::InvalidPotential(format!(
            "{name} takes 2 parameters, got {}",
            params.len()
        )));
    }
    Ok([params[0], params[1]])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i() -> C64 {
        C64::new(0.0, 1.0)
    }

    #[test]
    fn eval_step_inside_outside_and_at_right_edge() {
        let p = StepPotential::new(vec![0.0, 1.0], vec![i()]).unwrap();
        assert_eq!(p.eval(0.5), i());
        assert_eq!(p.eval(2.0), C64::new(0.0, 0.0));
        // right-open convention
        assert_eq!(p.eval(1.0), C64::new(0.0, 0.0));
        // left-closed convention
        assert_eq!(p.eval(0.0), i());
    }

    #[test]
    fn eval_interior_breakpoint_takes_right_piece() {
        let p = StepPotential::new(vec![0.0, 1.0, 2.0], vec![i(), C64::new(-1.0, 0.0)]).unwrap();
        assert_eq!(p.eval(1.0), C64::new(-1.0, 0.0));
    }

    #[test]
    fn lp_integral_of_imaginary_characteristic_fn() {
        let p = bogli_stampach(1.0, 1.0).unwrap();
        assert!((p.lp_power_integral(1.5).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lp_integral_two_units_wide() {
        let p = StepPotential::new(vec![0.0, 3.0], vec![C64::new(-2.0, 0.0)]).unwrap();
        assert!((p.lp_power_integral(1.0).unwrap() - 6.0).abs() < 1e-15);
    }

    #[test]
    fn lp_rejects_nonpositive_power() {
        let p = square_well(1.0, 1.0).unwrap();
        assert!(p.lp_power_integral(0.0).is_err());
        assert!(p.lp_power_integral(-1.0).is_err());
    }

    #[test]
    fn negative_part_basics() {
        let well = square_well(1.0, 1.0).unwrap();
        assert!((well.negative_part_integral(1.5).unwrap() - 1.0).abs() < 1e-15);

        let bump = StepPotential::new(vec![0.0, 1.0], vec![C64::new(5.0, 0.0)]).unwrap();
        assert_eq!(bump.negative_part_integral(2.0).unwrap(), 0.0);

        let mixed = StepPotential::new(
            vec![0.0, 1.0, 2.0],
            vec![C64::new(-1.0, 0.0), C64::new(2.0, 0.0)],
        )
        .unwrap();
        assert!((mixed.negative_part_integral(1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn negative_part_rejects_complex() {
        let p = bogli_stampach(1.0, 1.0).unwrap();
        assert!(p.negative_part_integral(1.0).is_err());
    }

    #[test]
    fn builtin_constructors() {
        let b = builtin("bogli_stampach", &[1.0, 1.0]).unwrap();
        assert_eq!(b.values(), &[i()]);
        assert_eq!(b.breakpoints(), &[0.0, 1.0]);

        let w = builtin("square_well", &[1.0, 1.0]).unwrap();
        assert_eq!(w.values(), &[C64::new(-1.0, 0.0)]);

        assert!(builtin("no_such_potential", &[1.0, 1.0]).is_err());
    }

    #[test]
    fn step_list_constructor_is_plain_new() {
        let p = StepPotential::new(vec![0.0, 1.0, 2.0], vec![i(), C64::new(-1.0, 0.0)]).unwrap();
        assert_eq!(p.values().len(), 2);
        assert!(StepPotential::new(vec![0.0, 0.0], vec![i()]).is_err());
        assert!(StepPotential::new(vec![1.0, 0.0], vec![i()]).is_err());
    }

    #[test]
    fn sampled_matches_trapezoid_oracle() {
        // Gaussian-like bump, p = 1: compare with an independent fine-grid
        // trapezoid integration of the same interpolant.
        let n = 801;
        let p = SampledPotential::from_fn(-4.0, 4.0, n, |x| {
            C64::new((-x * x).exp(), 0.3 * (-x * x).exp())
        })
        .unwrap();
        let val = p.lp_power_integral(1.0).unwrap();

        let m = 400_001;
        let h = 8.0 / (m - 1) as f64;
        let mut acc = 0.0;
        for k in 0..m {
            let x = -4.0 + k as f64 * h;
            let w = if k == 0 || k == m - 1 { 0.5 } else { 1.0 };
            acc += w * p.eval(x).norm();
        }
        let oracle = acc * h;
        assert!((val - oracle).abs() < 1e-8, "quad {val} vs trapezoid {oracle}");
    }

    #[test]
    fn disjoint_support_additivity() {
        let a = StepPotential::new(vec![0.0, 1.0], vec![C64::new(0.0, 2.0)]).unwrap();
        let b = StepPotential::new(vec![3.0, 5.0], vec![C64::new(-1.5, 0.5)]).unwrap();
        let joined = StepPotential::new(
            vec![0.0, 1.0, 3.0, 5.0],
            vec![C64::new(0.0, 2.0), C64::new(0.0, 0.0), C64::new(-1.5, 0.5)],
        )
        .unwrap();
        for p in [0.5, 1.0, 1.5, 2.5] {
            let lhs = joined.lp_power_integral(p).unwrap();
            let rhs = a.lp_power_integral(p).unwrap() + b.lp_power_integral(p).unwrap();
            assert!((lhs - rhs).abs() < 1e-14);
        }
    }

    #[test]
    fn gamma_half_integers() {
        let pi = std::f64::consts::PI;
        assert!((gamma_half_integer(1) - pi.sqrt()).abs() < 1e-15); // Γ(1/2)
        assert!((gamma_half_integer(2) - 1.0).abs() < 1e-15); // Γ(1)
        assert!((gamma_half_integer(3) - 0.5 * pi.sqrt()).abs() < 1e-15); // Γ(3/2)
        assert!((gamma_half_integer(4) - 1.0).abs() < 1e-15); // Γ(2)
        assert!((gamma_half_integer(6) - 2.0).abs() < 1e-15); // Γ(3)
    }

    #[test]
    fn sphere_areas() {
        let pi = std::f64::consts::PI;
        assert!((sphere_surface_area(2) - 2.0 * pi).abs() < 1e-12);
        assert!((sphere_surface_area(3) - 4.0 * pi).abs() < 1e-12);
    }

    #[test]
    fn radial_lp_integral_of_ball() {
        // V = -2 on the unit ball in d = 3: ∫|V| = 2 · (4/3)π
        let profile = SampledPotential::from_fn(0.0, 1.0, 11, |_| C64::new(-2.0, 0.0)).unwrap();
        let v = RadialPotential::new(3, profile, 0).unwrap();
        let exact = 2.0 * 4.0 / 3.0 * std::f64::consts::PI;
        assert!((v.lp_power_integral(1.0).unwrap() - exact).abs() < 1e-8);
    }

    #[test]
    fn lattice_detection() {
        let p = StepPotential::new(vec![0.0, 0.25, 1.5], vec![C64::new(1.0, 0.0); 2]).unwrap();
        assert_eq!(p.lattice_denominator(), Some(4));
        let q = StepPotential::new(vec![0.0, 1.0 / 3.0], vec![C64::new(1.0, 0.0)]).unwrap();
        assert_eq!(q.lattice_denominator(), None);
    }

    #[test]
    fn cell_average_matches_closed_forms() {
        let p = StepPotential::new(vec![0.0, 1.0, 2.0], vec![i(), C64::new(-2.0, 0.0)]).unwrap();
        assert_eq!(p.average_over(0.25, 0.75), i());
        let mixed = p.average_over(0.5, 1.5);
        assert!((mixed - (i() * 0.5 + C64::new(-1.0, 0.0))).norm() < 1e-15);
        // half in support, half outside
        let edge = p.average_over(1.5, 2.5);
        assert!((edge - C64::new(-1.0, 0.0)).norm() < 1e-15);

        let s = SampledPotential::from_fn(0.0, 1.0, 101, |x| C64::new(x, -x)).unwrap();
        let avg = s.average_over(0.2, 0.6);
        assert!((avg - C64::new(0.4, -0.4)).norm() < 1e-12);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_step() -> impl Strategy<Value = StepPotential> {
            (
                proptest::collection::vec(0.01f64..2.0, 1..5),
                -3.0f64..3.0,
            )
                .prop_flat_map(|(widths, start)| {
                    let n = widths.len();
                    let mut breakpoints = vec![start];
                    for w in widths {
                        breakpoints.push(breakpoints.last().unwrap() + w);
                    }
                    proptest::collection::vec((-4.0f64..4.0, -4.0f64..4.0), n).prop_map(
                        move |vals| {
                            StepPotential::new(
                                breakpoints.clone(),
                                vals.iter().map(|&(re, im)| C64::new(re, im)).collect(),
                            )
                            .unwrap()
                        },
                    )
                })
        }

        proptest! {
            #[test]
            fn lp_scales_multiplicatively(
                v in arb_step(),
                p in 0.3f64..3.0,
                re in -2.0f64..2.0,
                im in -2.0f64..2.0,
            ) {
                let scale = C64::new(re, im);
                let lhs = v.scaled(scale).lp_power_integral(p).unwrap();
                let rhs = scale.norm().powf(p) * v.lp_power_integral(p).unwrap();
                prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0));
            }

            #[test]
            fn negative_part_bounded_by_lp(v in arb_step(), p in 0.3f64..3.0) {
                // compare on the real part of the potential
                let real = StepPotential::new(
                    v.breakpoints().to_vec(),
                    v.values().iter().map(|z| C64::new(z.re, 0.0)).collect(),
                ).unwrap();
                let neg = real.negative_part_integral(p).unwrap();
                let lp = real.lp_power_integral(p).unwrap();
                prop_assert!(neg <= lp * (1.0 + 1e-12) + 1e-12);
            }

            #[test]
            fn eval_zero_outside_support(v in arb_step(), x in -20.0f64..20.0) {
                let (a, b) = v.support();
                if x < a || x >= b {
                    prop_assert_eq!(v.eval(x), C64::new(0.0, 0.0));
                }
            }

            #[test]
            fn cell_average_interpolates_eval(v in arb_step(), x in -5.0f64..5.0) {
                // averaging over a degenerate interval falls back to eval
                prop_assert_eq!(v.average_over(x, x), v.eval(x));
            }
        }
    }
}
