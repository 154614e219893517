//! Eigenvalue-sum functionals and semiclassical constants.
//!
//! All sums run over eigenvalues repeated by algebraic multiplicity and
//! accumulate in compensated arithmetic. Functionals never trigger an
//! eigenvalue computation; they evaluate stored [`EigenSet`] values only.

use crate::eigen::{axis_distance, EigenSet};
use crate::error::{Error, Result};
use crate::potentials::{Potential, RadialPotential};
use crate::quad;
use crate::util::KahanSum;
use crate::C64;
use serde::{Deserialize, Serialize};

/// Distance from an energy to the half-line [0, ∞):
/// |E| for Re E ≤ 0, |Im E| otherwise.
pub fn delta(e: C64) -> f64 {
    axis_distance(e)
}

/// Riesz mean Σ m_j |E_j|^γ; γ = 0 counts eigenvalues with multiplicity.
pub fn riesz_mean(eigs: &EigenSet, gamma: f64) -> Result<f64> {
    if gamma < 0.0 {
        return Err(Error::InvalidFunctional(format!("gamma must be >= 0, got {gamma}")));
    }
    let mut acc = KahanSum::new();
    for (e, m) in with_mult(eigs) {
        acc.add(m * e.norm().powf(gamma));
    }
    Ok(acc.value())
}

/// Σ m_j |E_j|^{-σ} δ(E_j)^{γ+σ}.
pub fn dhk_sum(eigs: &EigenSet, gamma: f64, sigma: f64) -> Result<f64> {
    let mut acc = KahanSum::new();
    for (e, m) in with_mult(eigs) {
        let modulus = e.norm();
        if modulus == 0.0 {
            return Err(Error::InvalidFunctional("eigenvalue with |E| = 0".into()));
        }
        acc.add(m * modulus.powf(-sigma) * delta(e).powf(gamma + sigma));
    }
    Ok(acc.value())
}

/// Σ |E_j|^γ over eigenvalues outside the cone |Im E| < κ Re E.
/// Everything with Re E ≤ 0 is automatically included.
pub fn cone_sum(eigs: &EigenSet, gamma: f64, kappa: f64) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(Error::InvalidFunctional(format!("kappa must be > 0, got {kappa}")));
    }
    let mut acc = KahanSum::new();
    for (e, m) in with_mult(eigs) {
        if e.im.abs() >= kappa * e.re {
            acc.add(m * e.norm().powf(gamma));
        }
    }
    Ok(acc.value())
}

/// Which eigenvalues a truncated scale-invariant sum keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    #[default]
    None,
    /// Keep small eigenvalues (threshold test ≤ T).
    Below,
    /// Keep large eigenvalues (threshold test ≥ T).
    Above,
}

/// Threshold comparison form: |E|^γ against T, or plain |E| against T.
/// Both appear in the truncated-bound family; which one a case uses is
/// encoded in [`case_table`], and either can be selected explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdForm {
    #[default]
    PowerGamma,
    Plain,
}

/// Σ m_j |E_j|^α (δ(E_j)/|E_j|)^β, optionally truncated at
/// `threshold_t` (normally ħ^{-d} ∫|V|^{γ+d/2}).
pub fn fs_sum(
    eigs: &EigenSet,
    alpha: f64,
    beta: f64,
    truncation: Truncation,
    form: ThresholdForm,
    gamma: f64,
    threshold_t: f64,
) -> Result<f64> {
    if truncation != Truncation::None && !(threshold_t > 0.0) {
        return Err(Error::InvalidFunctional(format!(
            "truncated sum needs threshold T > 0, got {threshold_t}"
        )));
    }
    let mut acc = KahanSum::new();
    for (e, m) in with_mult(eigs) {
        let modulus = e.norm();
        if modulus == 0.0 {
            return Err(Error::InvalidFunctional("eigenvalue with |E| = 0".into()));
        }
        let test = match form {
            ThresholdForm::PowerGamma => modulus.powf(gamma),
            ThresholdForm::Plain => modulus,
        };
        let keep = match truncation {
            Truncation::None => true,
            Truncation::Below => test <= threshold_t,
            Truncation::Above => test >= threshold_t,
        };
        if keep {
            acc.add(m * modulus.powf(alpha) * (delta(e) / modulus).powf(beta));
        }
    }
    Ok(acc.value())
}

/// Which eigenvalue-sum functional to evaluate; the config-facing type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionalSpec {
    Riesz { gamma: f64 },
    Dhk { gamma: f64, sigma: f64 },
    Cone { gamma: f64, kappa: f64 },
    Fs {
        alpha: f64,
        beta: f64,
        gamma: f64,
        #[serde(default)]
        truncation: Truncation,
        #[serde(default)]
        threshold_form: ThresholdForm,
    },
}

impl FunctionalSpec {
    /// Evaluate against an eigenvalue set. `threshold_t` feeds truncated
    /// sums and is ignored otherwise.
    pub fn evaluate(&self, eigs: &EigenSet, threshold_t: f64) -> Result<f64> {
        match *self {
            FunctionalSpec::Riesz { gamma } => riesz_mean(eigs, gamma),
            FunctionalSpec::Dhk { gamma, sigma } => dhk_sum(eigs, gamma, sigma),
            FunctionalSpec::Cone { gamma, kappa } => cone_sum(eigs, gamma, kappa),
            FunctionalSpec::Fs { alpha, beta, gamma, truncation, threshold_form } => {
                fs_sum(eigs, alpha, beta, truncation, threshold_form, gamma, threshold_t)
            }
        }
    }

    /// Power of the potential integral this functional is normalized
    /// against: γ + d/2.
    pub fn gamma(&self) -> f64 {
        match *self {
            FunctionalSpec::Riesz { gamma }
            | FunctionalSpec::Dhk { gamma, .. }
            | FunctionalSpec::Cone { gamma, .. }
            | FunctionalSpec::Fs { gamma, .. } => gamma,
        }
    }

    pub fn needs_threshold(&self) -> bool {
        matches!(self, FunctionalSpec::Fs { truncation, .. } if *truncation != Truncation::None)
    }

    /// Stable short label, used for CSV column names and plot files.
    pub fn label(&self) -> String {
        match *self {
            FunctionalSpec::Riesz { gamma } => format!("riesz_g{gamma}"),
            FunctionalSpec::Dhk { gamma, sigma } => format!("dhk_g{gamma}_s{sigma}"),
            FunctionalSpec::Cone { gamma, kappa } => format!("cone_g{gamma}_k{kappa}"),
            FunctionalSpec::Fs { alpha, beta, truncation, threshold_form, .. } => {
                let t = match truncation {
                    Truncation::None => "none".to_string(),
                    Truncation::Below => match threshold_form {
                        ThresholdForm::PowerGamma => "below".to_string(),
                        ThresholdForm::Plain => "below_plain".to_string(),
                    },
                    Truncation::Above => match threshold_form {
                        ThresholdForm::PowerGamma => "above".to_string(),
                        ThresholdForm::Plain => "above_plain".to_string(),
                    },
                };
                format!("fs_a{alpha}_b{beta}_{t}")
            }
        }
    }
}

/// The published parameter cases of the truncated scale-invariant bounds.
/// Where a case leaves α free in an open range, the returned spec picks a
/// canonical representative (5% inside an infimum, midpoint of an interval).
pub fn case_table(case: char, d: u32, gamma: f64) -> Result<FunctionalSpec> {
    let fail = |constraint: &str| -> Error {
        Error::CaseOutOfRange { case, constraint: constraint.to_string() }
    };
    if d < 1 {
        return Err(fail("d >= 1"));
    }
    let df = d as f64;
    match case {
        'a' => {
            if d < 2 {
                return Err(fail("d >= 2"));
            }
            let upper = df / (2.0 * (2.0 * df - 1.0));
            if !(gamma > 0.0 && gamma < upper) {
                return Err(fail(&format!("0 < γ < d/(2(2d-1)) = {upper}")));
            }
            Ok(FunctionalSpec::Fs {
                alpha: 0.5,
                beta: 1.0,
                gamma,
                truncation: Truncation::None,
                threshold_form: ThresholdForm::PowerGamma,
            })
        }
        'b' => {
            if d < 2 {
                return Err(fail("d >= 2"));
            }
            let lower = df / (2.0 * (2.0 * df - 1.0));
            if !(gamma >= lower && gamma <= 0.5) {
                return Err(fail(&format!("d/(2(2d-1)) = {lower} <= γ <= 1/2")));
            }
            let alpha_inf = (df - 1.0) * gamma / (df / 2.0 - gamma);
            Ok(FunctionalSpec::Fs {
                alpha: 1.05 * alpha_inf,
                beta: 1.0,
                gamma,
                truncation: Truncation::None,
                threshold_form: ThresholdForm::PowerGamma,
            })
        }
        'c' => {
            if !(gamma > 0.5) {
                return Err(fail("γ > 1/2"));
            }
            Ok(FunctionalSpec::Fs {
                alpha: 2.1 * gamma,
                beta: 2.1 * gamma,
                gamma,
                truncation: Truncation::Below,
                threshold_form: ThresholdForm::PowerGamma,
            })
        }
        'd' => {
            if !(gamma > 0.5) {
                return Err(fail("γ > 1/2"));
            }
            Ok(FunctionalSpec::Fs {
                alpha: 0.5 * gamma * (gamma + df / 2.0),
                beta: 2.1 * gamma,
                gamma,
                truncation: Truncation::Above,
                threshold_form: ThresholdForm::PowerGamma,
            })
        }
        'e' | 'f' => {
            let in_range = if d == 1 { gamma >= 0.5 } else { gamma > 0.0 };
            if !in_range {
                return Err(fail(if d == 1 { "γ >= 1/2 for d = 1" } else { "γ > 0 for d >= 2" }));
            }
            if case == 'e' {
                Ok(FunctionalSpec::Fs {
                    alpha: gamma + df / 2.0,
                    beta: gamma + df / 2.0,
                    gamma,
                    truncation: Truncation::Below,
                    threshold_form: ThresholdForm::PowerGamma,
                })
            } else {
                Ok(FunctionalSpec::Fs {
                    alpha: 1.05 * gamma,
                    beta: gamma + df / 2.0,
                    gamma,
                    truncation: Truncation::Above,
                    threshold_form: ThresholdForm::Plain,
                })
            }
        }
        _ => Err(fail("case must be one of a..f")),
    }
}

/// Semiclassical phase-space constant
/// `(2π)^{-d} ∫ (|ξ|² - 1)_-^γ dξ`, reduced by radial symmetry to a 1-D
/// integral and evaluated by adaptive quadrature (relative tolerance 1e-10).
pub fn semiclassical_constant(gamma: f64, d: u32) -> Result<f64> {
    if gamma < 0.0 {
        return Err(Error::InvalidFunctional(format!("gamma must be >= 0, got {gamma}")));
    }
    if d < 1 {
        return Err(Error::InvalidFunctional("d must be >= 1".into()));
    }
    let area = crate::potentials::sphere_surface_area(d);
    let radial = quad::adaptive(
        |r: f64| (1.0 - r * r).max(0.0).powf(gamma) * r.powi(d as i32 - 1),
        0.0,
        1.0,
        &[],
        1e-10,
        1e-300,
    )?;
    Ok(area * radial / (2.0 * std::f64::consts::PI).powi(d as i32))
}

/// `ħ^d · Σ|E_j|^γ / (L^cl_{γ,d} ∫ V_-^{γ+d/2})` for a real potential on
/// the line (d = 1); approaches 1 in the semiclassical limit.
pub fn weyl_ratio(eigs: &EigenSet, potential: &Potential, gamma: f64, hbar: f64) -> Result<f64> {
    let denom = potential.negative_part_integral(gamma + 0.5)?;
    weyl_ratio_from_parts(eigs, denom, gamma, hbar, 1)
}

/// Radial version of [`weyl_ratio`] for d ≥ 2.
pub fn weyl_ratio_radial(
    eigs: &EigenSet,
    potential: &RadialPotential,
    gamma: f64,
    hbar: f64,
) -> Result<f64> {
    let d = potential.dimension;
    let p = gamma + d as f64 / 2.0;
    if !potential.profile.is_real() {
        return Err(Error::InvalidPotential("operation requires a real-valued potential".into()));
    }
    let (lo, hi) = potential.profile.bounds();
    let radial = quad::adaptive(
        |r: f64| (-potential.profile.eval(r).re).max(0.0).powf(p) * r.powi(d as i32 - 1),
        lo,
        hi,
        &[],
        1e-10,
        1e-300,
    )?;
    let denom = crate::potentials::sphere_surface_area(d) * radial;
    weyl_ratio_from_parts(eigs, denom, gamma, hbar, d)
}

fn weyl_ratio_from_parts(
    eigs: &EigenSet,
    neg_integral: f64,
    gamma: f64,
    hbar: f64,
    d: u32,
) -> Result<f64> {
    if neg_integral <= 0.0 {
        return Err(Error::ZeroDenominator(
            "potential has no negative part; Weyl ratio undefined".into(),
        ));
    }
    let lcl = semiclassical_constant(gamma, d)?;
    Ok(hbar.powi(d as i32) * riesz_mean(eigs, gamma)? / (lcl * neg_integral))
}

fn with_mult(eigs: &EigenSet) -> impl Iterator<Item = (C64, f64)> + '_ {
    eigs.eigenvalues().iter().map(|e| (e.energy, e.multiplicity as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{Eigenvalue, SolverTag};
    use std::f64::consts::PI;

    fn set(entries: &[(f64, f64, u32)]) -> EigenSet {
        let eigs = entries
            .iter()
            .map(|&(re, im, m)| Eigenvalue {
                energy: C64::new(re, im),
                multiplicity: m,
                error_estimate: 0.0,
            })
            .collect();
        EigenSet::new(eigs, 1.0, SolverTag::Secular, "test".into())
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(C64::new(-1.0, 0.0)), 1.0);
        assert_eq!(delta(C64::new(1.0, 1.0)), 1.0);
        assert_eq!(delta(C64::new(-3.0, 4.0)), 5.0);
    }

    #[test]
    fn riesz_examples() {
        let empty = set(&[]);
        assert_eq!(riesz_mean(&empty, 1.0).unwrap(), 0.0);
        let s = set(&[(-4.0, 0.0, 2)]);
        assert_eq!(riesz_mean(&s, 1.0).unwrap(), 8.0);
        let one = set(&[(-4.0, 0.0, 1)]);
        assert_eq!(riesz_mean(&one, 0.0).unwrap(), 1.0);
        assert!(riesz_mean(&one, -0.5).is_err());
    }

    #[test]
    fn dhk_examples() {
        // {-4}: |E|^{-1/2} δ^{3/2} = 4^{-1/2}·4^{3/2} = 4^1 = 4 (= the Riesz
        // mean at γ = 1, as the real-potential reduction demands).
        let s = set(&[(-4.0, 0.0, 1)]);
        assert!((dhk_sum(&s, 1.0, 0.5).unwrap() - 4.0).abs() < 1e-14);
        let t = set(&[(1.0, 1.0, 1)]);
        let expect = 2.0f64.powf(-0.5);
        assert!((dhk_sum(&t, 1.0, 1.0).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn dhk_reduces_to_riesz_for_real_negative_sets() {
        let s = set(&[(-1.0, 0.0, 1), (-2.5, 0.0, 2), (-0.3, 0.0, 1)]);
        for sigma in [0.0, 0.5, 1.0, 2.0] {
            for gamma in [0.0, 0.5, 1.0] {
                let lhs = dhk_sum(&s, gamma, sigma).unwrap();
                let rhs = riesz_mean(&s, gamma).unwrap();
                assert!((lhs - rhs).abs() < 1e-12 * rhs.max(1.0), "γ={gamma} σ={sigma}");
            }
        }
    }

    #[test]
    fn cone_examples() {
        let inside = set(&[(1.0, 1.0, 1)]);
        assert!((cone_sum(&inside, 2.0, 1.0).unwrap() - 2.0).abs() < 1e-14);
        let outside = set(&[(2.0, 1.0, 1)]);
        assert_eq!(cone_sum(&outside, 2.0, 1.0).unwrap(), 0.0);
        let negative = set(&[(-1.0, 0.0, 1)]);
        for kappa in [0.1, 1.0, 10.0] {
            assert!((cone_sum(&negative, 1.0, kappa).unwrap() - 1.0).abs() < 1e-14);
        }
        assert!(cone_sum(&negative, 1.0, 0.0).is_err());
    }

    #[test]
    fn fs_examples() {
        let s = set(&[(-1.0, 0.0, 1)]);
        let v = fs_sum(&s, 1.0, 1.0, Truncation::None, ThresholdForm::PowerGamma, 1.0, 0.0)
            .unwrap();
        assert!((v - 1.0).abs() < 1e-14);

        let t = set(&[(1.0, 1.0, 1)]);
        let v = fs_sum(&t, 0.5, 1.0, Truncation::None, ThresholdForm::PowerGamma, 1.0, 0.0)
            .unwrap();
        assert!((v - 2.0f64.powf(-0.25)).abs() < 1e-14);

        // truncation below with T smaller than every |E|^γ keeps nothing
        let v = fs_sum(&t, 0.5, 1.0, Truncation::Below, ThresholdForm::PowerGamma, 1.0, 1e-6)
            .unwrap();
        assert_eq!(v, 0.0);
        assert!(fs_sum(&t, 0.5, 1.0, Truncation::Below, ThresholdForm::PowerGamma, 1.0, 0.0)
            .is_err());
    }

    #[test]
    fn fs_below_above_partition() {
        let s = set(&[(-0.5, 0.2, 1), (-2.0, 0.0, 2), (1.0, 3.0, 1), (-4.0, -1.0, 1)]);
        for form in [ThresholdForm::PowerGamma, ThresholdForm::Plain] {
            for t in [0.3, 1.0, 2.5, 10.0] {
                let below = fs_sum(&s, 1.0, 1.5, Truncation::Below, form, 0.8, t).unwrap();
                let above = fs_sum(&s, 1.0, 1.5, Truncation::Above, form, 0.8, t).unwrap();
                let none = fs_sum(&s, 1.0, 1.5, Truncation::None, form, 0.8, t).unwrap();
                assert!(below + above >= none - 1e-12);
                // no eigenvalue sits exactly at these thresholds
                assert!((below + above - none).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn case_table_spec_points() {
        let a = case_table('a', 2, 0.1).unwrap();
        match a {
            FunctionalSpec::Fs { alpha, beta, truncation, .. } => {
                assert_eq!(alpha, 0.5);
                assert_eq!(beta, 1.0);
                assert_eq!(truncation, Truncation::None);
            }
            _ => panic!("expected fs spec"),
        }

        let e = case_table('e', 1, 1.0).unwrap();
        match e {
            FunctionalSpec::Fs { alpha, beta, truncation, .. } => {
                assert_eq!(alpha, 1.5);
                assert_eq!(beta, 1.5);
                assert_eq!(truncation, Truncation::Below);
            }
            _ => panic!("expected fs spec"),
        }

        let err = case_table('a', 2, 0.5).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("d/(2(2d-1))"), "message should name the constraint: {msg}");

        assert!(case_table('a', 1, 0.1).is_err()); // d >= 2
        assert!(case_table('c', 1, 0.5).is_err()); // boundary γ = 1/2 rejected
        assert!(case_table('f', 1, 0.49).is_err());
        assert!(case_table('f', 2, 0.2).is_ok());
        assert!(case_table('z', 1, 1.0).is_err());

        let f = case_table('f', 1, 1.0).unwrap();
        match f {
            FunctionalSpec::Fs { beta, truncation, threshold_form, .. } => {
                assert_eq!(beta, 1.5);
                assert_eq!(truncation, Truncation::Above);
                assert_eq!(threshold_form, ThresholdForm::Plain);
            }
            _ => panic!("expected fs spec"),
        }
    }

    #[test]
    fn semiclassical_constant_closed_forms() {
        assert!((semiclassical_constant(1.0, 1).unwrap() - 2.0 / (3.0 * PI)).abs() < 1e-12);
        assert!((semiclassical_constant(0.0, 1).unwrap() - 1.0 / PI).abs() < 1e-12);
        // Γ-function closed form at d = 3, γ = 1:
        // Γ(2) / (2³ π^{3/2} Γ(7/2)) = 1/(8 π^{3/2} · 15√π/8) = 1/(15 π²)
        let expect = 1.0 / (15.0 * PI * PI);
        assert!((semiclassical_constant(1.0, 3).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn semiclassical_constant_decreases_in_gamma() {
        for d in [1u32, 2, 3] {
            let vals: Vec<f64> = [0.0, 0.5, 1.0, 2.0]
                .iter()
                .map(|&g| semiclassical_constant(g, d).unwrap())
                .collect();
            for w in vals.windows(2) {
                assert!(w[1] < w[0], "L^cl should decrease in γ (d={d}): {vals:?}");
            }
        }
    }

    #[test]
    fn weyl_ratio_rejects_nonnegative_potential() {
        let bump = crate::potentials::StepPotential::new(
            vec![0.0, 1.0],
            vec![C64::new(2.0, 0.0)],
        )
        .unwrap();
        let eigs = set(&[]);
        assert!(weyl_ratio(&eigs, &Potential::Step(bump), 1.0, 1.0).is_err());
    }

    #[test]
    fn multiplicity_scales_all_functionals() {
        let single = set(&[(-2.0, 0.5, 1), (1.0, 2.0, 1)]);
        let double = set(&[(-2.0, 0.5, 2), (1.0, 2.0, 2)]);
        let checks: Vec<(f64, f64)> = vec![
            (riesz_mean(&single, 1.5).unwrap(), riesz_mean(&double, 1.5).unwrap()),
            (dhk_sum(&single, 1.0, 0.5).unwrap(), dhk_sum(&double, 1.0, 0.5).unwrap()),
            (cone_sum(&single, 1.0, 0.7).unwrap(), cone_sum(&double, 1.0, 0.7).unwrap()),
            (
                fs_sum(&single, 1.0, 1.0, Truncation::None, ThresholdForm::PowerGamma, 1.0, 0.0)
                    .unwrap(),
                fs_sum(&double, 1.0, 1.0, Truncation::None, ThresholdForm::PowerGamma, 1.0, 0.0)
                    .unwrap(),
            ),
        ];
        for (x, y) in checks {
            assert!((y - 2.0 * x).abs() < 1e-12 * y.abs().max(1.0));
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_eigenset() -> impl Strategy<Value = EigenSet> {
            proptest::collection::vec(
                (
                    (-10.0f64..10.0, -5.0f64..5.0).prop_filter("off axis", |(re, im)| {
                        axis_distance(C64::new(*re, *im)) > 1e-3
                    }),
                    1u32..4,
                ),
                0..12,
            )
            .prop_map(|entries| {
                let eigs = entries
                    .into_iter()
                    .map(|((re, im), m)| Eigenvalue {
                        energy: C64::new(re, im),
                        multiplicity: m,
                        error_estimate: 0.0,
                    })
                    .collect();
                EigenSet::new(eigs, 0.5, SolverTag::Secular, "prop".into())
            })
        }

        proptest! {
            #[test]
            fn dhk_nonincreasing_in_sigma(set in arb_eigenset(), gamma in 0.0f64..3.0) {
                let sigmas = [0.0, 0.25, 0.5, 1.0, 2.0];
                let vals: Vec<f64> = sigmas
                    .iter()
                    .map(|&s| dhk_sum(&set, gamma, s).unwrap())
                    .collect();
                for w in vals.windows(2) {
                    prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-12);
                }
            }

            #[test]
            fn cone_nonincreasing_in_kappa(set in arb_eigenset(), gamma in 0.0f64..3.0) {
                let kappas = [0.1, 0.5, 1.0, 5.0, 50.0];
                let vals: Vec<f64> = kappas
                    .iter()
                    .map(|&k| cone_sum(&set, gamma, k).unwrap())
                    .collect();
                for w in vals.windows(2) {
                    prop_assert!(w[1] <= w[0] + 1e-12);
                }
            }

            #[test]
            fn fs_partition_superadditive(
                set in arb_eigenset(),
                t in 0.01f64..50.0,
                alpha in 0.1f64..2.0,
                beta in 0.1f64..2.0,
            ) {
                let below = fs_sum(&set, alpha, beta, Truncation::Below,
                    ThresholdForm::Plain, 1.0, t).unwrap();
                let above = fs_sum(&set, alpha, beta, Truncation::Above,
                    ThresholdForm::Plain, 1.0, t).unwrap();
                let none = fs_sum(&set, alpha, beta, Truncation::None,
                    ThresholdForm::Plain, 1.0, t).unwrap();
                prop_assert!(below + above >= none - 1e-9 * none.abs().max(1.0));
            }
        }
    }
}
