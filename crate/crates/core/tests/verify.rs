use std::collections::HashSet;

use beltrami::demo::{DemoMu, Manufactured};
use beltrami::grid::{ComplexField, DerivativeMode, GridSpec};
use beltrami::hodge::BeltramiCoefficient;
use beltrami::solution::QCMapSolution;
use beltrami::solver::{SolveParams, SolverRegistry};
use beltrami::verify::{
    beltrami_residual, coercivity_check, cross_solver_check, full_suite, holder_lemma_check, isothermal_check,
    jacobian_check, FullSuiteInput, HolderCheckConfig, Thresholds, MAX_RESIDUAL,
};
use beltrami::Complex64 as C;

fn spec(n: usize) -> GridSpec {
    GridSpec::new(n, 2.0).unwrap()
}

fn from_phi(s: GridSpec, f: impl Fn(C) -> C) -> QCMapSolution {
    QCMapSolution::from_phi(ComplexField::from_fn(s, f), DerivativeMode::Central).unwrap()
}

#[test]
fn identity_and_affine_maps() {
    let s = spec(32);
    let mu = BeltramiCoefficient::zero(s);
    let id = from_phi(s, |z| z);
    assert!(beltrami_residual(&id, &mu, DerivativeMode::Central).unwrap() <= 1e-14);
    let j = jacobian_check(&id, &mu);
    assert_eq!((j.min_j, j.formula_defect), (1.0, 0.0));
    assert_eq!(isothermal_check(&id, &mu, DerivativeMode::Central).unwrap(), 0.0);
    let affine = from_phi(s, |z| C::new(2.0, -1.0) * z + C::new(0.5, 3.0));
    assert!(isothermal_check(&affine, &mu, DerivativeMode::Central).unwrap() <= 1e-14);
}

#[test]
fn conjugation_is_flagged() {
    let s = spec(32);
    let mu = BeltramiCoefficient::zero(s);
    let c = from_phi(s, |z| z.conj());
    assert_eq!(beltrami_residual(&c, &mu, DerivativeMode::Central).unwrap(), MAX_RESIDUAL);
    assert_eq!(jacobian_check(&c, &mu).min_j, -1.0);
}

#[test]
fn manufactured_pair_has_discretization_sized_residual() {
    let m = Manufactured::new(0.3).unwrap();
    let r: Vec<f64> = [64, 128]
        .iter()
        .map(|&n| {
            let s = spec(n);
            let mu = BeltramiCoefficient::new(ComplexField::from_fn(s, |z| m.mu(z))).unwrap();
            beltrami_residual(&from_phi(s, |z| m.phi(z)), &mu, DerivativeMode::Central).unwrap()
        })
        .collect();
    assert!(r[0] < 1e-2 && r[0] / r[1] > 3.5, "{r:?}");
}

#[test]
fn holder_lemma_cases() {
    let cfg = HolderCheckConfig::default();
    let zero = holder_lemma_check(&BeltramiCoefficient::zero(spec(64)), 0.5, &cfg).unwrap();
    assert_eq!((zero.lhs, zero.rhs), (0.0, 0.0));
    assert!(zero.pass);
    let mu = DemoMu::standard().coefficient(spec(128)).unwrap();
    for alpha in [0.5, 0.9] {
        let h = holder_lemma_check(&mu, alpha, &cfg).unwrap();
        assert!(h.pass && h.lhs < 0.5 * h.rhs, "{alpha}: {h:?}");
    }
}

#[test]
fn coercivity_holds_on_random_fields() {
    let mu = DemoMu::radial_bump(0.9, 1.0).coefficient(spec(64)).unwrap();
    let c = coercivity_check(&mu, 20, 5, 1e-10, DerivativeMode::Central).unwrap();
    assert_eq!(c.violations, 0);
    assert!(c.min_margin >= -1e-10);
}

#[test]
fn cross_solver_levels() {
    let reg = SolverRegistry::with_defaults();
    let p = SolveParams::default();
    let zero = |s: GridSpec| Ok(BeltramiCoefficient::zero(s));
    let r = cross_solver_check(&zero, 2.0, &[32, 64], 1e-12, &reg, "neumann", "variational", &p).unwrap();
    assert!(r.passed());
    assert!(r.entries.iter().filter(|e| e.id.starts_with("cross_solver_n")).all(|e| e.measured == 0.0));

    let demo = |s: GridSpec| DemoMu::standard().coefficient(s);
    let r = cross_solver_check(&demo, 2.0, &[64, 128, 256], 2e-2, &reg, "neumann", "variational", &p).unwrap();
    assert!(r.passed(), "{r}");
    assert!(r.get("cross_solver_decrease").unwrap().measured < 0.5);
}

#[test]
fn full_report_ids_are_unique_and_carry_thresholds() {
    let s = spec(64);
    let mu = DemoMu::standard().coefficient(s).unwrap();
    let reg = SolverRegistry::with_defaults();
    let input = FullSuiteInput {
        mu: &mu,
        make_mu: None,
        registry: &reg,
        method: "neumann",
        params: SolveParams::default(),
        thresholds: Thresholds::default(),
    };
    let r = full_suite(&input).unwrap();
    let ids: HashSet<&str> = r.entries.iter().map(|e| e.id.as_str()).collect();
    assert_eq!(ids.len(), r.entries.len());
    assert!(r.entries.iter().all(|e| e.threshold.is_finite() && e.measured.is_finite()));
    let text = r.to_string();
    assert_eq!(text.lines().filter(|l| l.starts_with("check ")).count(), r.entries.len());
    assert!(text.trim_end().lines().last().unwrap().contains("thresholds=v1"));
}
