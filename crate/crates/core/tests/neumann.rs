use beltrami::demo::DemoMu;
use beltrami::grid::{ComplexField, DerivativeMode, GridSpec};
use beltrami::hodge::BeltramiCoefficient;
use beltrami::neumann::{assemble_map, holder_constant, neumann_series, radius_predicate};
use beltrami::operators::OperatorConfig;
use beltrami::verify::beltrami_residual;

fn spec(n: usize) -> GridSpec {
    GridSpec::new(n, 2.0).unwrap()
}

#[test]
fn zero_coefficient_needs_no_iterations() {
    let s = spec(64);
    let mu = BeltramiCoefficient::zero(s);
    let cfg = OperatorConfig::default();
    let (h, rep) = neumann_series(&mu, &cfg, 1e-10, 100).unwrap();
    assert_eq!(rep.iterations, 0);
    assert_eq!(h.sup_norm(), 0.0);
    let sol = assemble_map(&mu, &h, &cfg).unwrap();
    assert_eq!(sol.phi, ComplexField::from_fn(s, |z| z));
    assert!(sol.jacobian.as_slice().iter().all(|j| *j == 1.0));
}

#[test]
fn demo_contracts_at_rate_k() {
    let mu = DemoMu::standard().coefficient(spec(128)).unwrap();
    let (_, rep) = neumann_series(&mu, &OperatorConfig::default(), 1e-10, 200).unwrap();
    assert!(rep.contraction_estimates.iter().all(|r| *r <= 0.55), "{:?}", rep.contraction_estimates);
    assert!(rep.increment_norms.windows(2).skip(1).all(|w| w[1] < w[0]));
}

#[test]
fn strong_coefficient_iteration_count() {
    let tol: f64 = 1e-8;
    let predicted = tol.ln() / 0.9f64.ln();
    let s = spec(128);
    let rotating = DemoMu::RotatingBump { k: 0.9, radius: 1.0 }.coefficient(s).unwrap();
    let (_, rep) = neumann_series(&rotating, &OperatorConfig::default(), tol, 1000).unwrap();
    let ratio = rep.iterations as f64 / predicted;
    assert!((0.5..=2.0).contains(&ratio), "{} vs {predicted}", rep.iterations);
    // A real radial profile contracts much faster than k.
    let radial = DemoMu::radial_bump(0.9, 1.0).coefficient(s).unwrap();
    let (_, rep) = neumann_series(&radial, &OperatorConfig::default(), tol, 1000).unwrap();
    assert!((rep.iterations as f64) < predicted);
}

#[test]
fn residual_is_bounded_by_fixed_point_residual() {
    let s = spec(256);
    let mu = DemoMu::standard().coefficient(s).unwrap();
    let cfg = OperatorConfig::default();
    let (h, rep) = neumann_series(&mu, &cfg, 1e-12, 200).unwrap();
    let sol = assemble_map(&mu, &h, &cfg).unwrap();
    // Φ_z̄ and Φ_z are assembled from h, so the pointwise Beltrami equation
    // holds up to the fixed-point residual; recomputed derivatives add the
    // differencing error on top.
    let stored = (&sol.phi_zbar - &(mu.field() * &sol.phi_z)).sup_norm();
    assert!(stored <= 1e-12);
    let r = beltrami_residual(&sol, &mu, DerivativeMode::Central).unwrap();
    assert!(r < 1e-3, "{r} {}", rep.fixed_point_residual);
}

#[test]
fn holder_constant_and_radius() {
    let c = holder_constant(0.5).unwrap();
    let want = 2.0 * 2f64.sqrt() + 2.0 * 3f64.sqrt() + 2f64.sqrt() + 1.0;
    assert!((c - want).abs() < 1e-12);
    assert!(holder_constant(0.99).unwrap() > holder_constant(0.9).unwrap());
    let r_star = c.powi(-2);
    assert!(radius_predicate(0.5, 1.0, 0.99 * r_star).unwrap());
    assert!(!radius_predicate(0.5, 1.0, 1.01 * r_star).unwrap());
    assert!(!radius_predicate(0.5, 1.0, 0.05).unwrap());
    assert!(radius_predicate(0.5, 0.0, 1e6).unwrap());
}

