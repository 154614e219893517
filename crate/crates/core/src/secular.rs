//! Exact eigenvalue solver for piecewise-constant potentials.
//!
//! On each constant piece of the potential the Schrödinger equation has
//! solutions `exp(±κx)` with `κ = sqrt(v - E)/ħ`. Propagating the solution
//! pair `(ψ, ψ')` across the support with 2×2 transfer matrices and matching
//! against the decaying branches on both sides yields a Wronskian-type
//! determinant `W(E)`, analytic on ℂ∖[0,∞), whose zeros are exactly the
//! eigenvalues of `-ħ²Δ + V` (with multiplicity equal to the zero order).
//!
//! Zeros are located by argument-principle winding counts over rectangles
//! (adaptive Gauss–Kronrod on `W'/W` with certified integer rounding),
//! adaptive rectangle bisection down to single zeros, and Newton
//! refinement. Very crowded regions are first pared down with cheap
//! uncertified winding probes; certified counts take over once a
//! rectangle holds few enough zeros for the 0.25 integer margin to be
//! trustworthy.

use crate::eigen::{EigenSet, Eigenvalue, SolverTag, EPS_AXIS};
use crate::error::{Error, Result};
use crate::potentials::StepPotential;
use crate::quad::gk15_panel;
use crate::util::SplitMix64;
use crate::C64;
use serde::{Deserialize, Serialize};

/// Rectangle in the complex energy plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchRegion {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl SearchRegion {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        if !(re_min < re_max && im_min < im_max) {
            return Err(Error::InvalidRegion(format!(
                "degenerate rectangle [{re_min}, {re_max}] × [{im_min}, {im_max}]"
            )));
        }
        Ok(Self { re_min, re_max, im_min, im_max })
    }

    pub fn center(&self) -> C64 {
        C64::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn contains(&self, z: C64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    fn corners(&self) -> [C64; 4] {
        [
            C64::new(self.re_min, self.im_min),
            C64::new(self.re_max, self.im_min),
            C64::new(self.re_max, self.im_max),
            C64::new(self.re_min, self.im_max),
        ]
    }

    /// Largest coordinate magnitude on the rectangle, as a length scale.
    fn scale(&self) -> f64 {
        self.corners().iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn intersects_cut(&self) -> bool {
        self.re_max > 0.0 && self.im_min < 0.0 && self.im_max > 0.0
    }

    /// Split into sub-rectangles that avoid a guard strip of half-width
    /// `eps` around [0, ∞). Anything within the strip is dropped; by the
    /// reporting invariant no eigenvalue may live there anyway.
    pub fn split_around_cut(&self, eps: f64) -> Vec<SearchRegion> {
        self.split_around_cut_masked(eps).into_iter().map(|(r, _)| r).collect()
    }

    /// As [`split_around_cut`], also reporting which edges of each part
    /// border the guard strip or a sibling part. Those edges must stay
    /// frozen under retry dilation, or a contour could cross the cut or
    /// double-count a sibling's zeros.
    fn split_around_cut_masked(&self, eps: f64) -> Vec<(SearchRegion, EdgeMask)> {
        if !self.intersects_cut() {
            return vec![(*self, EdgeMask::default())];
        }
        let mut parts = Vec::new();
        // Left of the branch point, full height.
        if self.re_min < -eps {
            parts.push((
                SearchRegion { re_max: -eps, ..*self },
                EdgeMask { right: true, ..EdgeMask::default() },
            ));
        }
        let re_min = self.re_min.max(-eps);
        let left_frozen = self.re_min < -eps;
        // Above and below the strip.
        if self.im_max > eps {
            parts.push((
                SearchRegion { re_min, im_min: eps, ..*self },
                EdgeMask { bottom: true, left: left_frozen, ..EdgeMask::default() },
            ));
        }
        if self.im_min < -eps {
            parts.push((
                SearchRegion { re_min, im_max: -eps, ..*self },
                EdgeMask { top: true, left: left_frozen, ..EdgeMask::default() },
            ));
        }
        parts
    }

    fn dilate(&self, factor: f64, frozen: EdgeMask) -> SearchRegion {
        let c = self.center();
        let mut r = *self;
        if !frozen.left {
            r.re_min = c.re + (self.re_min - c.re) * factor;
        }
        if !frozen.right {
            r.re_max = c.re + (self.re_max - c.re) * factor;
        }
        if !frozen.bottom {
            r.im_min = c.im + (self.im_min - c.im) * factor;
        }
        if !frozen.top {
            r.im_max = c.im + (self.im_max - c.im) * factor;
        }
        r
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct EdgeMask {
    left: bool,
    right: bool,
    bottom: bool,
    top: bool,
}

/// Dilate for a retry without ever entering the guard strip around the
/// cut: frozen edges stay put and the remaining ones are clamped so the
/// rectangle cannot cross [0, ∞).
fn dilate_safely(rect: &SearchRegion, factor: f64, frozen: EdgeMask, eps: f64) -> SearchRegion {
    let mut out = rect.dilate(factor, frozen);
    if out.re_max > -eps {
        if rect.im_min >= eps {
            out.im_min = out.im_min.max(eps);
        }
        if rect.im_max <= -eps {
            out.im_max = out.im_max.min(-eps);
        }
        if rect.re_max <= -eps {
            out.re_max = out.re_max.min(-eps);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Transfer-matrix evaluation of the matching determinant
// ---------------------------------------------------------------------------

/// cosh(√z), sinh(√z)/√z and d/dz of the latter, analytic in z.
/// Series branch keeps everything smooth through z = 0.
fn cosh_family(z: C64) -> (C64, C64, C64) {
    if z.norm() < 0.25 {
        let mut c = C64::new(1.0, 0.0);
        let mut s = C64::new(1.0, 0.0);
        let mut sp = C64::new(0.0, 0.0);
        let mut zk = C64::new(1.0, 0.0);
        let mut fact_2k = 1.0;
        for k in 1..=12u32 {
            let k = k as f64;
            fact_2k *= (2.0 * k - 1.0) * (2.0 * k);
            let prev_zk = zk;
            zk *= z;
            c += zk / fact_2k;
            let s_coeff = fact_2k * (2.0 * k + 1.0);
            s += zk / s_coeff;
            sp += prev_zk * (k / s_coeff);
        }
        (c, s, sp)
    } else {
        let sq = z.sqrt();
        let c = sq.cosh();
        let s = sq.sinh() / sq;
        let sp = (c - s) / (2.0 * z);
        (c, s, sp)
    }
}

/// Same quantities premultiplied by `exp(-Re √z)` to avoid overflow.
/// The scale is a positive real factor, harmless for zero locations and
/// logarithmic derivatives as long as value and derivative share it.
fn cosh_family_scaled(z: C64) -> (C64, C64, C64, f64) {
    if z.norm() < 400.0 {
        let (c, s, sp) = cosh_family(z);
        let scale = (-z.sqrt().re).exp();
        (c * scale, s * scale, sp * scale, scale)
    } else {
        let sq = z.sqrt();
        let a = sq.re; // >= 0 for principal sqrt
        let b = sq.im;
        let eib = C64::new(0.0, b).exp();
        let small = (C64::new(-2.0 * a, -b)).exp();
        let cosh_s = 0.5 * (eib + small);
        let sinh_s = 0.5 * (eib - small);
        let s = sinh_s / sq;
        let sp = (cosh_s - s) / (2.0 * z);
        (cosh_s, s, sp, (-a).exp())
    }
}

/// Scaled matching determinant and its energy derivative at `e`.
///
/// Both outputs carry the same positive rescaling factor, so `W'/W` and
/// Newton steps are exact while the magnitude stays bounded for small ħ.
pub fn matching_with_derivative(
    potential: &StepPotential,
    hbar: f64,
    e: C64,
) -> Result<(C64, C64)> {
    if e.im == 0.0 && e.re >= 0.0 {
        return Err(Error::OnBranchCut(e));
    }
    if !(hbar > 0.0) {
        return Err(Error::InvalidPotential("ħ must be > 0".into()));
    }
    let h2 = hbar * hbar;
    // Decaying branch outside the support: Re κ0 > 0 because -e avoids
    // (-∞, 0] exactly when e avoids [0, ∞).
    let kappa0 = (-e).sqrt() / hbar;
    let dkappa0 = -1.0 / (2.0 * h2 * kappa0);

    // u = (ψ, ψ'), du = ∂u/∂E, both times a cumulative positive scale.
    let mut u = [C64::new(1.0, 0.0), kappa0];
    let mut du = [C64::new(0.0, 0.0), dkappa0];

    for (a, b, v) in potential.pieces() {
        let w = b - a;
        let z = (v - e) * (w * w / h2);
        let dz = -(w * w) / h2;
        let (c, s, sp, _) = cosh_family_scaled(z);
        // M = [[c, w s], [(z/w) s, c]], all entries scaled alike.
        let m00 = c;
        let m01 = s * w;
        let m10 = s * (z / w);
        let m11 = c;
        // dM/dE with the same scale: dc/dE = (s/2)·dz, etc.
        let d00 = s * (0.5 * dz);
        let d01 = sp * (w * dz);
        let d10 = (s + z * sp) * (dz / w);
        let d11 = d00;

        let nu = [m00 * u[0] + m01 * u[1], m10 * u[0] + m11 * u[1]];
        let ndu = [
            m00 * du[0] + m01 * du[1] + d00 * u[0] + d01 * u[1],
            m10 * du[0] + m11 * du[1] + d10 * u[0] + d11 * u[1],
        ];
        u = nu;
        du = ndu;

        // Renormalize jointly to dodge under/overflow across many pieces.
        let mag = u[0].norm().max(u[1].norm());
        if mag > 1e100 || (mag < 1e-100 && mag > 0.0) {
            let inv = 1.0 / mag;
            u = [u[0] * inv, u[1] * inv];
            du = [du[0] * inv, du[1] * inv];
        }
    }

    // Match against the right-decaying branch (ψ, ψ') = (1, -κ0).
    let w_val = -kappa0 * u[0] - u[1];
    let w_der = -dkappa0 * u[0] - kappa0 * du[0] - du[1];
    Ok((w_val, w_der))
}

/// Matching determinant `W(E)` (up to a positive rescaling); zero exactly
/// at the eigenvalues of `-ħ²Δ + V`.
pub fn matching_function(potential: &StepPotential, hbar: f64, e: C64) -> Result<C64> {
    matching_with_derivative(potential, hbar, e).map(|(w, _)| w)
}

// ---------------------------------------------------------------------------
// Argument-principle winding counts
// ---------------------------------------------------------------------------

/// Analytic function handle for the winding engine: value and derivative.
pub type AnalyticFn<'a> = dyn FnMut(C64) -> (C64, C64) + 'a;

struct WindingOutcome {
    /// Raw (1/2πi)·∮ f'/f, before integer rounding.
    raw: C64,
    /// Smallest |f/f'| seen at any quadrature node: a distance estimate
    /// from the contour to the nearest zero.
    min_zero_distance: f64,
}

const PER_EDGE_TOL: f64 = 0.3; // on the raw ∮ scale; total winding error stays < 0.25·2π
const MAX_PANEL_DEPTH: u32 = 52;

fn integrate_edge(
    f: &mut AnalyticFn,
    z0: C64,
    z1: C64,
    tol: f64,
    min_dist: &mut f64,
) -> Result<C64> {
    let dz = z1 - z0;
    let mut g = |t: f64| {
        let z = z0 + dz * t;
        let (w, dw) = f(z);
        let wn = w.norm();
        let dist = wn / (dw.norm() + 1e-300);
        if dist < *min_dist {
            *min_dist = dist;
        }
        (dw / w) * dz
    };

    let (v0, e0) = gk15_panel(&mut g, 0.0, 1.0);
    let mut stack = vec![(0.0f64, 1.0f64, v0, e0, 0u32)];
    let mut total = C64::new(0.0, 0.0);
    // Panels accept on a proportional share of the edge budget, on a small
    // absolute floor (the branch-point corner produces noise-level panels
    // whose width-proportional share underflows), or at relative accuracy.
    while let Some((lo, hi, val, err, depth)) = stack.pop() {
        if err <= tol * (hi - lo) || err <= 1e-4 * tol || err <= 1e-12 * val.norm() {
            total += val;
            continue;
        }
        if depth >= MAX_PANEL_DEPTH {
            return Err(Error::ContourNearZero { retries: 0 });
        }
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15_panel(&mut g, lo, mid);
        let (v2, e2) = gk15_panel(&mut g, mid, hi);
        stack.push((lo, mid, v1, e1, depth + 1));
        stack.push((mid, hi, v2, e2, depth + 1));
    }
    Ok(total)
}

fn winding_raw(f: &mut AnalyticFn, rect: &SearchRegion, tol: f64) -> Result<WindingOutcome> {
    let corners = rect.corners();
    let mut min_dist = f64::INFINITY;
    let mut total = C64::new(0.0, 0.0);
    for k in 0..4 {
        total += integrate_edge(f, corners[k], corners[(k + 1) % 4], tol, &mut min_dist)?;
    }
    Ok(WindingOutcome { raw: total / C64::new(0.0, 2.0 * std::f64::consts::PI), min_zero_distance: min_dist })
}

/// Winding number of `f` around `rect`, rounded to an exact integer.
/// Errors if a zero sits essentially on the contour or the integral
/// refuses to settle within 0.25 of an integer.
fn winding_number(f: &mut AnalyticFn, rect: &SearchRegion) -> Result<u32> {
    let proximity_floor = 1e-12 * (1.0 + rect.scale());
    let mut tol = PER_EDGE_TOL;
    let mut tightened_for_count = false;
    let mut attempts = 0;
    while attempts < 6 {
        attempts += 1;
        let out = winding_raw(f, rect, tol)?;
        if out.min_zero_distance < proximity_floor {
            return Err(Error::ContourNearZero { retries: 0 });
        }
        let n = out.raw.re;
        let rounded = n.round();
        // For large counts the absolute 0.25 margin demands proportionally
        // better relative accuracy than the base tolerance delivers; rerun
        // once with a count-scaled tolerance before trusting the integer.
        if !tightened_for_count && rounded > 40.0 {
            tightened_for_count = true;
            tol = (tol * 40.0 / rounded).min(tol);
            continue;
        }
        if (n - rounded).abs() < 0.25 && out.raw.im.abs() < 0.25 && rounded >= -0.1 {
            return Ok(rounded as u32);
        }
        tol *= 0.1;
    }
    let out = winding_raw(f, rect, tol)?;
    Err(Error::WindingNotInteger { value: out.raw.re })
}

/// Count zeros (with multiplicity) of an arbitrary analytic function inside
/// a rectangle. The rectangle is used as given; callers must keep zeros off
/// the contour or accept the dilation retries of [`count_zeros`].
pub fn count_zeros_of(f: &mut AnalyticFn, region: SearchRegion) -> Result<u32> {
    winding_number(f, &region)
}

fn winding_with_retries(
    f: &mut AnalyticFn,
    rect: SearchRegion,
    frozen: EdgeMask,
    rng: &mut SplitMix64,
) -> Result<u32> {
    let mut current = rect;
    for _ in 0..10 {
        match winding_number(f, &current) {
            Ok(n) => return Ok(n),
            Err(Error::ContourNearZero { .. }) | Err(Error::WindingNotInteger { .. }) => {
                let factor = rng.uniform(1.01, 1.05);
                current = dilate_safely(&current, factor, frozen, EPS_AXIS);
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::ContourNearZero { retries: 10 })
}

/// Number of eigenvalues of `-ħ²Δ + V` inside `region`, counted with
/// algebraic multiplicity via the argument principle. Regions touching
/// [0, ∞) are split around a guard strip automatically.
pub fn count_zeros(potential: &StepPotential, hbar: f64, region: SearchRegion) -> Result<u32> {
    let mut rng = SplitMix64::new(0x5ec0_0147_c001_0001);
    let mut f = wronskian_fn(potential, hbar);
    let mut total = 0u32;
    for (part, frozen) in region.split_around_cut_masked(EPS_AXIS) {
        total += winding_with_retries(&mut f, part, frozen, &mut rng)?;
    }
    Ok(total)
}

fn wronskian_fn(potential: &StepPotential, hbar: f64) -> impl FnMut(C64) -> (C64, C64) + '_ {
    move |e| matching_with_derivative(potential, hbar, e).expect("contour avoids the branch cut")
}

// ---------------------------------------------------------------------------
// Eigenvalue search: bisection + Newton
// ---------------------------------------------------------------------------

const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: u32 = 64;
/// Rectangles smaller than this with count >= 2 are reported as one
/// numerically inseparable zero of that multiplicity.
const CLUSTER_DIAMETER: f64 = 1e-11;
const MAX_SPLIT_DEPTH: u32 = 200;

/// Largest zero count a rectangle may hold before the searcher stops
/// demanding certified integer windings and subdivides on cheap probes
/// instead. Certified counts at huge multiplicity would need the winding
/// integral to 0.25 absolute out of thousands, which adaptive quadrature
/// cannot guarantee against its own error estimator.
const ANCHOR_MAX_COUNT: f64 = 35.5;

struct Search<'a> {
    f: Box<AnalyticFn<'a>>,
    rng: SplitMix64,
    found: Vec<Eigenvalue>,
}

impl<'a> Search<'a> {
    /// Cheap uncertified winding estimate; None when even the loose pass
    /// hits a pole on the contour.
    fn probe(&mut self, rect: &SearchRegion) -> Option<f64> {
        match winding_raw(&mut self.f, rect, 1.0) {
            Ok(out) => {
                let floor = 1e-12 * (1.0 + rect.scale());
                (out.min_zero_distance >= floor).then_some(out.raw.re)
            }
            Err(_) => None,
        }
    }

    /// True when no zero sits suspiciously close to the segment; sampled
    /// via the Newton-step distance estimate |W/W'|.
    fn line_clear(&mut self, z0: C64, z1: C64) -> bool {
        let floor = 1e-9 * (1.0 + z0.norm().max(z1.norm()));
        let samples = 33;
        for k in 0..=samples {
            let t = k as f64 / samples as f64;
            let z = z0 + (z1 - z0) * t;
            let (w, dw) = (self.f)(z);
            if w.norm() / (dw.norm() + 1e-300) < floor {
                return false;
            }
        }
        true
    }

    /// Probe-guided exploration: certify and anchor small regions, split
    /// big ones along jittered clear lines without certification.
    fn explore_free(&mut self, rect: SearchRegion, depth: u32) -> Result<()> {
        let probe = self.probe(&rect);
        if let Some(est) = probe {
            if est < ANCHOR_MAX_COUNT {
                match winding_number(&mut self.f, &rect) {
                    Ok(0) => return Ok(()),
                    Ok(n) => return self.explore(rect, n, depth),
                    Err(Error::ContourNearZero { .. }) | Err(Error::WindingNotInteger { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
        }
        if depth >= MAX_SPLIT_DEPTH {
            return Err(Error::ContourNearZero { retries: depth });
        }
        let (r1, r2) = self.split_uncertified(&rect)?;
        self.explore_free(r1, depth + 1)?;
        self.explore_free(r2, depth + 1)
    }

    fn split_uncertified(&mut self, rect: &SearchRegion) -> Result<(SearchRegion, SearchRegion)> {
        for _ in 0..16 {
            let frac = self.rng.uniform(0.4, 0.6);
            let (r1, r2, line) = if rect.width() >= rect.height() {
                let cut = rect.re_min + frac * rect.width();
                (
                    SearchRegion { re_max: cut, ..*rect },
                    SearchRegion { re_min: cut, ..*rect },
                    (C64::new(cut, rect.im_min), C64::new(cut, rect.im_max)),
                )
            } else {
                let cut = rect.im_min + frac * rect.height();
                (
                    SearchRegion { im_max: cut, ..*rect },
                    SearchRegion { im_min: cut, ..*rect },
                    (C64::new(rect.re_min, cut), C64::new(rect.re_max, cut)),
                )
            };
            if self.line_clear(line.0, line.1) {
                return Ok((r1, r2));
            }
        }
        Err(Error::ContourNearZero { retries: 16 })
    }
    fn newton(&mut self, rect: &SearchRegion) -> Option<(C64, f64)> {
        let c = rect.center();
        let quarter = [
            c,
            C64::new(c.re - 0.25 * rect.width(), c.im - 0.25 * rect.height()),
            C64::new(c.re + 0.25 * rect.width(), c.im - 0.25 * rect.height()),
            C64::new(c.re - 0.25 * rect.width(), c.im + 0.25 * rect.height()),
            C64::new(c.re + 0.25 * rect.width(), c.im + 0.25 * rect.height()),
        ];
        let loose = rect.dilate(1.5, EdgeMask::default());
        for start in quarter {
            let mut z = start;
            for _ in 0..NEWTON_MAX_ITER {
                if z.im == 0.0 && z.re >= 0.0 {
                    break; // stepped onto the cut; restart elsewhere
                }
                let (w, dw) = (self.f)(z);
                if dw.norm() == 0.0 {
                    break;
                }
                let step = w / dw;
                z -= step;
                if !loose.contains(z) {
                    break;
                }
                if step.norm() <= NEWTON_TOL * (1.0 + z.norm()) {
                    if rect.contains(z) {
                        return Some((z, step.norm().max(f64::MIN_POSITIVE)));
                    }
                    break;
                }
            }
        }
        None
    }

    /// Split `rect` across its longer side at a jittered fraction; the cut
    /// line is retried until no zero sits on it and child counts add up.
    /// If two independent split geometries agree on a total that differs
    /// from `count`, the parent count was off (error budgets blur at very
    /// high counts); the agreed children win.
    fn split(&mut self, rect: &SearchRegion, count: u32) -> Result<(SearchRegion, u32, SearchRegion, u32)> {
        let mut disagreements: Vec<(u32, SearchRegion, u32, SearchRegion, u32)> = Vec::new();
        for _ in 0..12 {
            let frac = self.rng.uniform(0.4, 0.6);
            let (r1, r2) = if rect.width() >= rect.height() {
                let cut = rect.re_min + frac * rect.width();
                (SearchRegion { re_max: cut, ..*rect }, SearchRegion { re_min: cut, ..*rect })
            } else {
                let cut = rect.im_min + frac * rect.height();
                (SearchRegion { im_max: cut, ..*rect }, SearchRegion { im_min: cut, ..*rect })
            };
            let n1 = match winding_number(&mut self.f, &r1) {
                Ok(n) => n,
                Err(Error::ContourNearZero { .. }) | Err(Error::WindingNotInteger { .. }) => continue,
                Err(e) => return Err(e),
            };
            let n2 = match winding_number(&mut self.f, &r2) {
                Ok(n) => n,
                Err(Error::ContourNearZero { .. }) | Err(Error::WindingNotInteger { .. }) => continue,
                Err(e) => return Err(e),
            };
            if n1 + n2 == count {
                return Ok((r1, n1, r2, n2));
            }
            if let Some(prev) = disagreements.iter().find(|d| d.0 == n1 + n2) {
                return Ok((prev.1, prev.2, prev.3, prev.4));
            }
            disagreements.push((n1 + n2, r1, n1, r2, n2));
        }
        Err(Error::ContourNearZero { retries: 12 })
    }

    fn explore(&mut self, rect: SearchRegion, count: u32, depth: u32) -> Result<()> {
        if count == 0 {
            return Ok(());
        }
        let cluster_limit = CLUSTER_DIAMETER.max(64.0 * f64::EPSILON * rect.scale());
        if count >= 2 && (rect.diameter() < cluster_limit || depth >= MAX_SPLIT_DEPTH) {
            self.found.push(Eigenvalue {
                energy: rect.center(),
                multiplicity: count,
                error_estimate: rect.diameter(),
            });
            return Ok(());
        }
        if count == 1 {
            if let Some((z, err)) = self.newton(&rect) {
                self.found.push(Eigenvalue { energy: z, multiplicity: 1, error_estimate: err });
                return Ok(());
            }
            // Newton failed; keep bisecting and retry on the smaller box,
            // or give up at the resolution limit with an honest estimate.
            if rect.diameter() < cluster_limit || depth >= MAX_SPLIT_DEPTH {
                self.found.push(Eigenvalue {
                    energy: rect.center(),
                    multiplicity: 1,
                    error_estimate: rect.diameter(),
                });
                return Ok(());
            }
        }
        let (r1, n1, r2, n2) = self.split(&rect, count)?;
        self.explore(r1, n1, depth + 1)?;
        self.explore(r2, n2, depth + 1)
    }
}

/// Locate all eigenvalues of `-ħ²Δ + V` in `region` by adaptive rectangle
/// bisection and Newton refinement. The sum of reported multiplicities
/// equals the winding count of the full region.
pub fn find_eigenvalues(
    potential: &StepPotential,
    hbar: f64,
    region: SearchRegion,
) -> Result<EigenSet> {
    let label = potential_label(potential);
    let mut search = Search {
        f: Box::new(wronskian_fn(potential, hbar)),
        rng: SplitMix64::new(0x51ea_4c4e_11b5_eed5),
        found: Vec::new(),
    };
    for (part, _frozen) in region.split_around_cut_masked(EPS_AXIS) {
        search.explore_free(part, 0)?;
    }
    Ok(EigenSet::new(search.found, hbar, SolverTag::Secular, label))
}

/// Heuristic search rectangle from the 1-D eigenvalue localization bound
/// `|E|^{1/2} ≤ C ħ⁻¹ ∫|V|`, with C = 0.6 (literature constant 1/2 plus a
/// 20% margin). Returns `None` for a potential with vanishing L¹ norm
/// (no eigenvalues to find).
pub fn default_region(potential: &StepPotential, hbar: f64) -> Result<Option<SearchRegion>> {
    let l1 = potential.lp_power_integral(1.0)?;
    let radius = (0.6 * l1 / hbar).powi(2);
    if radius <= EPS_AXIS {
        return Ok(None);
    }
    Ok(Some(SearchRegion::new(-radius, radius, -radius, radius)?))
}

/// `find_eigenvalues` over the default search region.
pub fn find_eigenvalues_default(potential: &StepPotential, hbar: f64) -> Result<EigenSet> {
    match default_region(potential, hbar)? {
        Some(region) => find_eigenvalues(potential, hbar, region),
        None => Ok(EigenSet::empty(hbar, SolverTag::Secular, potential_label(potential))),
    }
}

fn potential_label(potential: &StepPotential) -> String {
    let json = serde_json::to_string(potential).unwrap_or_default();
    format!("step:{:016x}", crate::util::fnv1a64(json.as_bytes()))
}
