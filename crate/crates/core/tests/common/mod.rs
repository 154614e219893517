//! Independent oracles shared by the integration and acceptance suites.
//!
//! Everything here deliberately avoids the library's own solution paths:
//! textbook transcendental equations solved by bisection, a dense complex
//! Hessenberg QR (unitary rotations, unlike the library's complex
//! orthogonal QL), a characteristic-polynomial companion route, and a
//! banded LDLᵀ inertia count for the 3-D cube.

#![allow(dead_code)]

use num_complex::Complex64 as C64;

// ---------------------------------------------------------------------------
// Square-well bound states from the textbook transcendental equations
// ---------------------------------------------------------------------------

fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Option<f64> {
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Some(lo);
    }
    if flo * fhi > 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if flo * fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Bound-state energies of `-ħ²ψ'' - V₀ χ_[0,w] ψ = Eψ`, ascending.
///
/// With u = k·w/2, R = √V₀·w/(2ħ): even states solve u tan u = √(R²-u²)
/// on [nπ, nπ+π/2), odd states solve -u cot u = √(R²-u²) on
/// (nπ+π/2, (n+1)π). E = (2ħu/w)² - V₀.
pub fn well_levels_1d(depth: f64, width: f64, hbar: f64) -> Vec<f64> {
    let r = depth.sqrt() * width / (2.0 * hbar);
    let mut roots: Vec<f64> = Vec::new();
    let pi = std::f64::consts::PI;
    let guard: f64 = 1e-12;

    let even = |u: f64| u * u.tan() - (r * r - u * u).max(0.0).sqrt();
    let odd = |u: f64| -u / u.tan() - (r * r - u * u).max(0.0).sqrt();

    let mut n = 0;
    loop {
        let lo = n as f64 * pi;
        if lo >= r {
            break;
        }
        let hi = (lo + pi / 2.0).min(r);
        if let Some(u) = bisect(&even, lo + guard.max(1e-9 * lo), hi - guard) {
            roots.push(u);
        }
        let lo2 = lo + pi / 2.0;
        if lo2 < r {
            let hi2 = (lo + pi).min(r);
            if let Some(u) = bisect(&odd, lo2 + guard, hi2 - guard) {
                roots.push(u);
            }
        }
        n += 1;
    }
    let mut levels: Vec<f64> = roots
        .into_iter()
        .map(|u| (2.0 * hbar * u / width).powi(2) - depth)
        .collect();
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
    levels
}

/// ℓ = 0 bound states of the d = 3 well `-V₀ χ_{|x|<R}`: u(r) = sin(kr)
/// inside matching a decaying exponential, i.e. k cot(kR) = -κ.
pub fn well_levels_3d_l0(depth: f64, radius: f64, hbar: f64) -> Vec<f64> {
    let r = depth.sqrt() * radius / hbar;
    let pi = std::f64::consts::PI;
    let odd = |u: f64| -u / u.tan() - (r * r - u * u).max(0.0).sqrt();
    let mut levels: Vec<f64> = Vec::new();
    let mut n = 0;
    loop {
        let lo = n as f64 * pi + pi / 2.0;
        if lo >= r {
            break;
        }
        let hi = ((n + 1) as f64 * pi).min(r);
        if let Some(u) = bisect(&odd, lo + 1e-12, hi - 1e-12) {
            levels.push((hbar * u / radius).powi(2) - depth);
        }
        n += 1;
    }
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
    levels
}

// ---------------------------------------------------------------------------
// Dense complex Hessenberg QR (test-only eigenvalue oracle)
// ---------------------------------------------------------------------------

/// Parlett–Reinsch balancing with powers of two; preserves Hessenberg
/// structure and eigenvalues exactly.
fn balance(a: &mut [Vec<C64>]) {
    let n = a.len();
    let radix = 2.0f64;
    for _ in 0..20 {
        let mut converged = true;
        for i in 0..n {
            let mut row = 0.0;
            let mut col = 0.0;
            for j in 0..n {
                if j != i {
                    row += a[i][j].norm();
                    col += a[j][i].norm();
                }
            }
            if row == 0.0 || col == 0.0 {
                continue;
            }
            let mut f = 1.0;
            let s = row + col;
            let mut c = col;
            while c < row / radix {
                c *= radix * radix;
                f *= radix;
            }
            while c > row * radix {
                c /= radix * radix;
                f /= radix;
            }
            if (c + row / f) < 0.95 * s && f != 1.0 {
                converged = false;
                for j in 0..n {
                    a[i][j] /= f;
                }
                for j in 0..n {
                    a[j][i] *= f;
                }
            }
        }
        if converged {
            break;
        }
    }
}

/// All eigenvalues of an upper Hessenberg complex matrix by explicit
/// single-shift QR with unitary Givens rotations.
pub fn hessenberg_eigenvalues(mut h: Vec<Vec<C64>>) -> Vec<C64> {
    let n = h.len();
    balance(&mut h);
    let mut eigs: Vec<C64> = Vec::with_capacity(n);
    let mut hi = n; // active block is 0..hi
    let mut iter_guard = 0u32;
    while hi > 0 {
        iter_guard += 1;
        assert!(iter_guard < 200 * n as u32, "QR oracle failed to converge");
        if hi == 1 {
            eigs.push(h[0][0]);
            hi = 0;
            continue;
        }
        // deflate converged subdiagonals from the bottom
        let mut deflated = false;
        for i in (0..hi - 1).rev() {
            let scale = h[i][i].norm() + h[i + 1][i + 1].norm();
            if h[i + 1][i].norm() <= f64::EPSILON * scale.max(1e-300) {
                if i + 1 == hi - 1 {
                    eigs.push(h[hi - 1][hi - 1]);
                    hi -= 1;
                    deflated = true;
                    break;
                }
            }
        }
        if deflated {
            continue;
        }
        // find the start of the active block
        let mut lo = 0;
        for i in (0..hi - 1).rev() {
            let scale = h[i][i].norm() + h[i + 1][i + 1].norm();
            if h[i + 1][i].norm() <= f64::EPSILON * scale.max(1e-300) {
                lo = i + 1;
                break;
            }
        }
        // Wilkinson shift from the trailing 2x2 of the active block
        let (a, b, c, d) = (
            h[hi - 2][hi - 2],
            h[hi - 2][hi - 1],
            h[hi - 1][hi - 2],
            h[hi - 1][hi - 1],
        );
        let tr_half = 0.5 * (a + d);
        let disc = (0.5 * (a - d) * (0.5 * (a - d)) + b * c).sqrt();
        let mu = if (tr_half + disc - d).norm() < (tr_half - disc - d).norm() {
            tr_half + disc
        } else {
            tr_half - disc
        };
        let mu = if iter_guard % 17 == 0 {
            // exceptional shift to break cycles
            d + C64::new(h[hi - 1][hi - 2].norm(), 0.5 * h[hi - 1][hi - 2].norm())
        } else {
            mu
        };

        for i in lo..hi {
            h[i][i] -= mu;
        }
        // QR factor with Givens G = [[c, s], [-s̄, c]] (c real) acting on
        // rows (i, i+1); store rotations for the RQ product.
        let mut rotations: Vec<(usize, f64, C64)> = Vec::new();
        for i in lo..hi - 1 {
            let f = h[i][i];
            let g = h[i + 1][i];
            let (c_r, s_r) = givens(f, g);
            rotations.push((i, c_r, s_r));
            for j in i..hi {
                let x = h[i][j];
                let y = h[i + 1][j];
                h[i][j] = c_r * x + s_r * y;
                h[i + 1][j] = -s_r.conj() * x + c_r * y;
            }
        }
        // multiply R by G^H on the right: columns (i, i+1)
        for &(i, c_r, s_r) in &rotations {
            for row in lo..(i + 2).min(hi) {
                let x = h[row][i];
                let y = h[row][i + 1];
                h[row][i] = x * c_r + y * s_r.conj();
                h[row][i + 1] = -x * s_r + y * c_r;
            }
        }
        for i in lo..hi {
            h[i][i] += mu;
        }
    }
    eigs.sort_by(|x, y| (x.re, x.im).partial_cmp(&(y.re, y.im)).unwrap());
    eigs
}

/// Unitary Givens pair (c real ≥ 0, s complex) with
/// [[c, s], [-s̄, c]]·[f; g] = [r; 0].
fn givens(f: C64, g: C64) -> (f64, C64) {
    let fn_ = f.norm();
    let gn = g.norm();
    if gn == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if fn_ == 0.0 {
        return (0.0, g.conj() / gn);
    }
    let r = fn_.hypot(gn);
    let c = fn_ / r;
    let s = (f / fn_) * (g.conj() / r);
    (c, s)
}

/// Dense copy of a complex symmetric tridiagonal (Hessenberg by shape).
pub fn tridiag_to_dense(diag: &[C64], off: &[C64]) -> Vec<Vec<C64>> {
    let n = diag.len();
    let mut a = vec![vec![C64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        a[i][i] = diag[i];
        if i + 1 < n {
            a[i][i + 1] = off[i];
            a[i + 1][i] = off[i];
        }
    }
    a
}

/// Newton ratio p(λ)/p'(λ) of the characteristic polynomial, evaluated by
/// the scaled three-term determinant recurrence (stable at a point).
fn det_newton_ratio(diag: &[C64], off: &[C64], lambda: C64) -> C64 {
    let n = diag.len();
    let mut p_prev = C64::new(1.0, 0.0);
    let mut dp_prev = C64::new(0.0, 0.0);
    let mut p = diag[0] - lambda;
    let mut dp = C64::new(-1.0, 0.0);
    for k in 1..n {
        let esq = off[k - 1] * off[k - 1];
        let a = diag[k] - lambda;
        let p_next = a * p - esq * p_prev;
        let dp_next = a * dp - p - esq * dp_prev;
        p_prev = p;
        dp_prev = dp;
        p = p_next;
        dp = dp_next;
        let scale = p.norm().max(p_prev.norm());
        if scale > 1e120 {
            let inv = 1.0 / scale;
            p *= inv;
            p_prev *= inv;
            dp *= inv;
            dp_prev *= inv;
        }
    }
    p / dp
}

/// Characteristic polynomial of the tridiagonal via the three-term
/// recurrence, then eigenvalues as the companion-matrix spectrum, polished
/// by Newton on the determinant recurrence.
pub fn companion_eigenvalues(diag: &[C64], off: &[C64]) -> Vec<C64> {
    let n = diag.len();
    // p_k(λ), coefficient vectors in ascending powers
    let mut p_prev: Vec<C64> = vec![C64::new(1.0, 0.0)]; // p_0
    let mut p: Vec<C64> = vec![diag[0], C64::new(-1.0, 0.0)]; // p_1 = d0 - λ
    for k in 1..n {
        // p_{k+1} = (d_k - λ) p_k - e_{k-1}² p_{k-1}
        let mut next = vec![C64::new(0.0, 0.0); k + 2];
        for (j, &c) in p.iter().enumerate() {
            next[j] += diag[k] * c;
            next[j + 1] -= c;
        }
        let esq = off[k - 1] * off[k - 1];
        for (j, &c) in p_prev.iter().enumerate() {
            next[j] -= esq * c;
        }
        p_prev = std::mem::replace(&mut p, next);
    }
    // monic polynomial q(λ) = λ^n + Σ b_j λ^j
    let lead = p[n];
    let b: Vec<C64> = p[..n].iter().map(|c| c / lead).collect();
    // companion matrix (Hessenberg): subdiagonal ones, last column -b
    let mut comp = vec![vec![C64::new(0.0, 0.0); n]; n];
    for i in 1..n {
        comp[i][i - 1] = C64::new(1.0, 0.0);
    }
    for i in 0..n {
        comp[i][n - 1] = -b[i];
    }
    let mut eigs = hessenberg_eigenvalues(comp);
    for e in &mut eigs {
        for _ in 0..40 {
            let step = det_newton_ratio(diag, off, *e);
            *e -= step;
            if step.norm() <= 1e-15 * (1.0 + e.norm()) {
                break;
            }
        }
    }
    eigs.sort_by(|x, y| (x.re, x.im).partial_cmp(&(y.re, y.im)).unwrap());
    eigs
}

// ---------------------------------------------------------------------------
// 3-D cube inertia oracle
// ---------------------------------------------------------------------------

/// Count the eigenvalues below `tau` of the 7-point finite-difference
/// discretization of `-ħ²Δ - V₀ χ_{|x|<radius}` on the cube [-l, l]³ with
/// Dirichlet walls and n interior points per side, using the inertia of a
/// banded LDLᵀ factorization of A - τI.
pub fn cube_count_below(
    depth: f64,
    radius: f64,
    hbar: f64,
    l: f64,
    n_side: usize,
    tau: f64,
) -> usize {
    let n = n_side;
    let dim = n * n * n;
    let band = n * n; // off-diagonal reach of the z-neighbor
    let h = 2.0 * l / (n + 1) as f64;
    let kin = hbar * hbar / (h * h);

    let coord = |i: usize| -l + (i + 1) as f64 * h;
    let diag_at = |idx: usize| -> f64 {
        let x = coord(idx % n);
        let y = coord((idx / n) % n);
        let z = coord(idx / (n * n));
        let v = if (x * x + y * y + z * z).sqrt() < radius { -depth } else { 0.0 };
        6.0 * kin + v - tau
    };
    // neighbor offsets: -1 (x), -n (y), -n² (z), value -kin, with x/y wraps
    // masked at the box faces
    let off_at = |idx: usize, offset: usize| -> f64 {
        match offset {
            1 => {
                if idx % n == 0 {
                    0.0
                } else {
                    -kin
                }
            }
            o if o == n => {
                if (idx / n) % n == 0 {
                    0.0
                } else {
                    -kin
                }
            }
            o if o == n * n => -kin,
            _ => 0.0,
        }
    };

    // Banded LDLᵀ: row i keeps columns [i-band, i].
    let width = band + 1;
    let mut rows: Vec<f64> = vec![0.0; dim * width];
    let mut d: Vec<f64> = vec![0.0; dim];
    let mut negatives = 0usize;

    for i in 0..dim {
        let base = i * width;
        // load raw row entries a[i][j] for j in [i-band, i]
        for k in 0..width {
            let j = i + k;
            if j < band {
                rows[base + k] = 0.0;
                continue;
            }
            let j = j - band; // column index
            let val = if j == i {
                diag_at(i)
            } else {
                off_at(i, i - j)
            };
            rows[base + k] = val;
        }
        // eliminate against previous rows
        let j_lo = i.saturating_sub(band);
        for j in j_lo..i {
            // l_ij = (a_ij - Σ_{k<j} l_ik d_k l_jk) / d_j
            let mut acc = rows[base + (j + band - i)];
            let k_lo = j.saturating_sub(band).max(j_lo);
            for k in k_lo..j {
                let lik = rows[base + (k + band - i)];
                let ljk = rows[j * width + (k + band - j)];
                acc -= lik * d[k] * ljk;
            }
            rows[base + (j + band - i)] = acc / d[j];
        }
        let mut di = rows[base + band];
        for k in j_lo..i {
            let lik = rows[base + (k + band - i)];
            di -= lik * lik * d[k];
        }
        d[i] = di;
        if di < 0.0 {
            negatives += 1;
        }
    }
    negatives
}

// ---------------------------------------------------------------------------
// Matching helpers
// ---------------------------------------------------------------------------

/// Greatest distance from each element of `a` to its nearest match in `b`
/// (both consumed greedily); panics on length mismatch.
pub fn max_pair_distance(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len(), "sets differ in size: {} vs {}", a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for &x in a {
        let mut best = f64::INFINITY;
        let mut best_j = usize::MAX;
        for (j, &y) in b.iter().enumerate() {
            if !used[j] {
                let dist = (x - y).norm();
                if dist < best {
                    best = dist;
                    best_j = j;
                }
            }
        }
        used[best_j] = true;
        worst = worst.max(best);
    }
    worst
}
