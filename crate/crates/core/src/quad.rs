//! Adaptive Gauss–Kronrod quadrature.
//!
//! One 7/15 panel rule plus a stack-based adaptive driver, generic over real
//! and complex integrands. The secular module reuses the raw panel rule for
//! its winding-number contour integrals.

use crate::error::{Error, Result};
use crate::C64;

/// Kronrod-15 abscissae on [0, 1] side (symmetric about 0).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_17,
    0.207_784_955_007_898_27,
    0.0,
];

/// Kronrod-15 weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// Gauss-7 weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

/// Output scalar of an integrand: f64 or Complex64.
pub trait QuadScalar: Copy {
    const ZERO: Self;
    fn acc(self, other: Self, w: f64) -> Self;
    fn sub(self, other: Self) -> Self;
    fn scale(self, s: f64) -> Self;
    fn norm(self) -> f64;
}

impl QuadScalar for f64 {
    const ZERO: Self = 0.0;
    fn acc(self, other: Self, w: f64) -> Self {
        self + other * w
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn norm(self) -> f64 {
        self.abs()
    }
}

impl QuadScalar for C64 {
    const ZERO: Self = C64::new(0.0, 0.0);
    fn acc(self, other: Self, w: f64) -> Self {
        self + other * w
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn norm(self) -> f64 {
        num_complex::Complex::norm(self)
    }
}

/// One Gauss–Kronrod 7/15 panel on [a, b].
/// Returns (kronrod estimate, |kronrod - gauss| error estimate).
pub fn gk15_panel<T: QuadScalar>(f: &mut impl FnMut(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);

    let fc = f(mid);
    let mut kronrod = T::ZERO.acc(fc, WGK[7]);
    let mut gauss = T::ZERO.acc(fc, WG[3]);

    for (i, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        let fl = f(mid - dx);
        let fr = f(mid + dx);
        kronrod = kronrod.acc(fl, WGK[i]).acc(fr, WGK[i]);
        if i % 2 == 1 {
            let wg = WG[i / 2];
            gauss = gauss.acc(fl, wg).acc(fr, wg);
        }
    }

    let kronrod = kronrod.scale(half);
    let gauss = gauss.scale(half);
    (kronrod, kronrod.sub(gauss).norm())
}

/// Adaptive quadrature of `f` over `[a, b]` to relative tolerance `rel_tol`
/// (with an absolute floor `abs_tol`). `seeds` optionally pre-splits the
/// interval at known kinks or breakpoints.
pub fn adaptive<T: QuadScalar>(
    mut f: impl FnMut(f64) -> T,
    a: f64,
    b: f64,
    seeds: &[f64],
    rel_tol: f64,
    abs_tol: f64,
) -> Result<T> {
    if !(a < b) {
        return Ok(T::ZERO);
    }
    let mut cuts: Vec<f64> = Vec::with_capacity(seeds.len() + 2);
    cuts.push(a);
    cuts.extend(seeds.iter().copied().filter(|x| *x > a && *x < b));
    cuts.push(b);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();

    // (lo, hi, estimate, err, depth)
    let mut stack: Vec<(f64, f64, T, f64, u32)> = Vec::new();
    for w in cuts.windows(2) {
        let (val, err) = gk15_panel(&mut f, w[0], w[1]);
        stack.push((w[0], w[1], val, err, 0));
    }

    const MAX_DEPTH: u32 = 48;
    let mut total = T::ZERO;
    let mut total_err = 0.0;
    let mut done: Vec<(T, f64)> = Vec::new();

    // Iterate until every panel is accepted against the running tolerance.
    loop {
        let global: f64 = {
            let mut g = total.norm();
            for (_, _, v, _, _) in &stack {
                g += v.norm();
            }
            g
        };
        let tol = (rel_tol * global).max(abs_tol);
        let Some((lo, hi, val, err, depth)) = stack.pop() else {
            break;
        };
        let local_tol = tol * (hi - lo) / (b - a);
        if err <= local_tol.max(abs_tol * (hi - lo) / (b - a)) || depth >= MAX_DEPTH {
            if depth >= MAX_DEPTH && err > 1e3 * local_tol.max(1e-300) {
                return Err(Error::Quadrature(format!(
                    "panel [{lo}, {hi}] stuck at error {err:.3e}"
                )));
            }
            total = total.acc(val, 1.0);
            total_err += err;
            done.push((val, err));
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15_panel(&mut f, lo, mid);
        let (v2, e2) = gk15_panel(&mut f, mid, hi);
        stack.push((lo, mid, v1, e1, depth + 1));
        stack.push((mid, hi, v2, e2, depth + 1));
    }

    let _ = total_err;
    Ok(total)
}
