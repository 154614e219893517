//! Eigenvalue containers shared by the secular and grid solvers.

use crate::C64;
use serde::{Deserialize, Serialize};

/// Half-width of the guard strip around the essential spectrum [0, ∞):
/// energies closer than this are never reported as eigenvalues.
pub const EPS_AXIS: f64 = 1e-10;

/// Distance from `e` to the half-line [0, ∞).
pub fn axis_distance(e: C64) -> f64 {
    if e.re <= 0.0 {
        e.norm()
    } else {
        e.im.abs()
    }
}

/// Which solver produced an eigenvalue set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverTag {
    Secular,
    Grid,
    Radial,
}

impl std::fmt::Display for SolverTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolverTag::Secular => write!(f, "secular"),
            SolverTag::Grid => write!(f, "grid"),
            SolverTag::Radial => write!(f, "radial"),
        }
    }
}

/// Serialize complex numbers as [re, im] pairs in result files.
pub mod complex_pair {
    use crate::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(c: &C64, s: S) -> Result<S::Ok, S::Error> {
        (c.re, c.im).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        let (re, im) = <(f64, f64)>::deserialize(d)?;
        Ok(C64::new(re, im))
    }
}

/// One eigenvalue with its algebraic multiplicity and an error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    #[serde(with = "complex_pair")]
    pub energy: C64,
    pub multiplicity: u32,
    pub error_estimate: f64,
}

/// Eigenvalues of `-ħ²Δ + V`, sorted by (re, im) for determinism.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSet {
    eigs: Vec<Eigenvalue>,
    pub hbar: f64,
    pub solver: SolverTag,
    /// Short description of the potential the set belongs to.
    pub potential: String,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl EigenSet {
    /// Build a set, sorting entries and dropping anything inside the axis
    /// guard strip. Multiplicities must be >= 1.
    pub fn new(mut eigs: Vec<Eigenvalue>, hbar: f64, solver: SolverTag, potential: String) -> Self {
        eigs.retain(|e| axis_distance(e.energy) > EPS_AXIS);
        debug_assert!(eigs.iter().all(|e| e.multiplicity >= 1));
        eigs.sort_by(|a, b| {
            (a.energy.re, a.energy.im)
                .partial_cmp(&(b.energy.re, b.energy.im))
                .unwrap()
        });
        Self { eigs, hbar, solver, potential, warnings: Vec::new() }
    }

    pub fn empty(hbar: f64, solver: SolverTag, potential: String) -> Self {
        Self::new(Vec::new(), hbar, solver, potential)
    }

    pub fn eigenvalues(&self) -> &[Eigenvalue] {
        &self.eigs
    }

    pub fn len(&self) -> usize {
        self.eigs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigs.is_empty()
    }

    pub fn total_multiplicity(&self) -> u32 {
        self.eigs.iter().map(|e| e.multiplicity).sum()
    }

    /// Iterate energies repeated by multiplicity.
    pub fn iter_with_multiplicity(&self) -> impl Iterator<Item = C64> + '_ {
        self.eigs
            .iter()
            .flat_map(|e| std::iter::repeat(e.energy).take(e.multiplicity as usize))
    }

    pub fn push_warning(&mut self, w: String) {
        self.warnings.push(w);
    }

    /// Conjugated set (the spectrum of the conjugated potential).
    pub fn conj(&self) -> Self {
        let eigs = self
            .eigs
            .iter()
            .map(|e| Eigenvalue { energy: e.energy.conj(), ..*e })
            .collect();
        Self::new(eigs, self.hbar, self.solver, self.potential.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_distance_cases() {
        assert_eq!(axis_distance(C64::new(-1.0, 0.0)), 1.0);
        assert_eq!(axis_distance(C64::new(1.0, 1.0)), 1.0);
        assert_eq!(axis_distance(C64::new(-3.0, 4.0)), 5.0);
    }

    #[test]
    fn eigenset_sorts_and_filters() {
        let eigs = vec![
            Eigenvalue { energy: C64::new(-1.0, 0.5), multiplicity: 1, error_estimate: 0.0 },
            Eigenvalue { energy: C64::new(-2.0, 0.0), multiplicity: 2, error_estimate: 0.0 },
            // inside the guard strip: dropped
            Eigenvalue { energy: C64::new(5.0, 1e-12), multiplicity: 1, error_estimate: 0.0 },
        ];
        let set = EigenSet::new(eigs, 1.0, SolverTag::Secular, "test".into());
        assert_eq!(set.len(), 2);
        assert_eq!(set.eigenvalues()[0].energy, C64::new(-2.0, 0.0));
        assert_eq!(set.total_multiplicity(), 3);
        assert_eq!(set.iter_with_multiplicity().count(), 3);
    }
}
