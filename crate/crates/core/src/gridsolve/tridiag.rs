//! Eigenvalues of complex symmetric tridiagonal matrices.
//!
//! Implicit-shift QL iteration with complex orthogonal (not unitary)
//! rotations, the structure-exploiting analogue of the classic real
//! tridiagonal QL. Complex orthogonal rotations can break down when
//! `f² + g² ≈ 0` with `f, g` not small; the sweep is then restarted with an
//! exceptional shift.

use crate::error::{Error, Result};
use crate::C64;
use serde::{Deserialize, Serialize};

/// Complex symmetric tridiagonal matrix: `diagonal[i]` on the diagonal and
/// `off_diagonal[i]` at both `(i, i+1)` and `(i+1, i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalComplexMatrix {
    pub diagonal: Vec<C64>,
    pub off_diagonal: Vec<C64>,
}

impl TridiagonalComplexMatrix {
    pub fn new(diagonal: Vec<C64>, off_diagonal: Vec<C64>) -> Result<Self> {
        if diagonal.is_empty() || off_diagonal.len() + 1 != diagonal.len() {
            return Err(Error::InvalidPotential(format!(
                "tridiagonal dimensions inconsistent: {} diagonal, {} off-diagonal",
                diagonal.len(),
                off_diagonal.len()
            )));
        }
        Ok(Self { diagonal, off_diagonal })
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }
}

/// All eigenvalues of a complex symmetric tridiagonal matrix, sorted by
/// (re, im). No eigenvectors are computed.
pub fn eig_all(matrix: &TridiagonalComplexMatrix) -> Result<Vec<C64>> {
    let n = matrix.dim();
    let mut d = matrix.diagonal.clone();
    let mut e = matrix.off_diagonal.clone();
    e.push(C64::new(0.0, 0.0));

    let eps = f64::EPSILON;
    for l in 0..n {
        let mut iter = 0u32;
        let mut exceptional = 0u32;
        loop {
            // Locate the first negligible off-diagonal at or after l.
            let mut m = l;
            while m + 1 < n {
                let scale = d[m].norm() + d[m + 1].norm();
                if e[m].norm() <= eps * scale {
                    break;
                }
                m += 1;
            }
            if m == l {
                break; // d[l] has converged
            }
            iter += 1;
            if iter > 80 {
                return Err(Error::EigNonConvergence { index: l });
            }

            // Shift from the 2x2 at the active block's low end, biased by
            // previous breakdowns.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = (g * g + 1.0).sqrt();
            if (g + r).norm() < (g - r).norm() {
                r = -r;
            }
            let mut shift = d[m] - d[l] + e[l] / (g + r);
            if exceptional > 0 {
                let bump = 1.0 + 0.05 * exceptional as f64;
                shift += C64::new(bump * e[l].norm(), 0.37 * bump * e[l].norm());
            }
            g = shift;

            let mut s = C64::new(1.0, 0.0);
            let mut c = C64::new(1.0, 0.0);
            let mut p = C64::new(0.0, 0.0);
            let mut broke_down = false;
            // Snapshot the active block; a breakdown mid-sweep must not
            // leave a half-rotated matrix behind.
            let d_saved: Vec<C64> = d[l..=m].to_vec();
            let e_saved: Vec<C64> = e[l..=m].to_vec();

            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                let r = (f * f + g * g).sqrt();
                e[i + 1] = r;
                let magnitude = f.norm().hypot(g.norm());
                if r.norm() <= 1e-8 * magnitude || r.norm() == 0.0 {
                    // Complex orthogonal breakdown: f ≈ ±i g. Restore the
                    // block and retry the sweep with a perturbed shift.
                    broke_down = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                let t = (d[i] - g) * s + 2.0 * c * b;
                p = s * t;
                d[i + 1] = g + p;
                g = c * t - b;
            }
            if broke_down {
                d[l..=m].copy_from_slice(&d_saved);
                e[l..=m].copy_from_slice(&e_saved);
                exceptional += 1;
                if exceptional > 8 {
                    return Err(Error::EigNonConvergence { index: l });
                }
                continue;
            }
            exceptional = 0;
            d[l] -= p;
            e[l] = g;
            e[m] = C64::new(0.0, 0.0);
        }
    }

    d.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    Ok(d)
}
