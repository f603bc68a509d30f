use beltrami::demo::Manufactured;
use beltrami::grid::{l2_norm, ComplexField, DerivativeMode, GridSpec, OneForm};
use beltrami::hodge::BeltramiCoefficient;
use beltrami::kernel::bump;
use beltrami::solution::{normalize, QCMapSolution};
use beltrami::variational::{
    build_psi, build_psi_general, conjugate_field, far_field_fit, integrate_phi, solve_weak_with,
    BoxNaturalWeakSolver, FreeSpaceWeakSolver, VariationalConfig, WeakSolver,
};
use beltrami::{Complex64 as C, Error};

fn spec(n: usize) -> GridSpec {
    GridSpec::new(n, 2.0).unwrap()
}

fn backends() -> Vec<Box<dyn WeakSolver>> {
    vec![Box::new(FreeSpaceWeakSolver::new()), Box::new(BoxNaturalWeakSolver)]
}

fn demeaned(f: &ComplexField) -> ComplexField {
    let m = f.mean();
    f.map(|c| c - m)
}

fn rel(a: &ComplexField, b: &ComplexField) -> f64 {
    l2_norm(&(a - b)) / l2_norm(b)
}

fn smooth_phi(s: GridSpec) -> (ComplexField, ComplexField) {
    // φ = (1 − |z − c|²)⁴ (1 + 0.5 i x), with φ_z by hand.
    let c = C::new(0.1, -0.2);
    let phi = |z: C| {
        let t = 1.0 - (z - c).norm_sqr();
        if t <= 0.0 {
            C::new(0.0, 0.0)
        } else {
            t.powi(4) * C::new(1.0, 0.5 * z.re)
        }
    };
    let phi_z = |z: C| {
        let t = 1.0 - (z - c).norm_sqr();
        if t <= 0.0 {
            C::new(0.0, 0.0)
        } else {
            // ∂z t = −conj(z − c); ∂z x = ½
            -4.0 * t.powi(3) * (z - c).conj() * C::new(1.0, 0.5 * z.re) + t.powi(4) * C::new(0.0, 0.25)
        }
    };
    (ComplexField::from_fn(s, phi), ComplexField::from_fn(s, phi_z))
}

#[test]
fn zero_eta_gives_zero_potential() {
    let s = spec(64);
    let mu = bump(s, C::new(0.0, 0.0), 1.0, 4).map(|c| 0.4 * c);
    let mu = BeltramiCoefficient::new(mu).unwrap();
    for b in backends() {
        let w = solve_weak_with(b.as_ref(), &mu, &OneForm::zeros(s), 1e-10, 500).unwrap();
        assert_eq!(w.f.sup_norm(), 0.0, "{}", b.name());
    }
}

#[test]
fn flat_metric_recovers_potential_of_exact_gradient() {
    // μ = 0 and η = 2φ_z dz: f_z = φ_z solves the weak equation, so f = φ.
    let mu0 = |s| BeltramiCoefficient::zero(s);
    for b in backends() {
        let mut err = Vec::new();
        for n in [64, 128] {
            let s = spec(n);
            let (phi, phi_z) = smooth_phi(s);
            let eta = OneForm::new(phi_z.scale(C::new(2.0, 0.0)), ComplexField::zeros(s)).unwrap();
            let w = solve_weak_with(b.as_ref(), &mu0(s), &eta, 1e-10, 1000).unwrap();
            err.push(rel(&w.f, &demeaned(&phi)));
        }
        assert!(err[1] < 2e-3 && err[0] / err[1] > 3.5, "{}: {err:?}", b.name());
    }
}

#[test]
fn conjugate_of_real_part_is_imaginary_part() {
    let m = Manufactured::new(0.3).unwrap();
    let s = spec(128);
    let mu = BeltramiCoefficient::new(ComplexField::from_fn(s, |z| m.mu(z))).unwrap();
    let f = ComplexField::from_fn(s, |z| C::new(m.phi(z).re, 0.0));
    let c = conjugate_field(&f, &mu, &OneForm::zeros(s), 0.25, DerivativeMode::Central).unwrap();
    let want = demeaned(&ComplexField::from_fn(s, |z| C::new(0.0, m.phi(z).im)));
    let e = rel(&c.g, &want);
    assert!(e < 1e-3, "{e:e}");
    assert!(c.closedness < 1e-2, "{}", c.closedness);
}

#[test]
fn flat_conjugate_is_harmonic_partner() {
    let s = spec(64);
    let f = ComplexField::from_fn(s, |z| C::new((z * z).re, 0.0));
    let c = conjugate_field(&f, &BeltramiCoefficient::zero(s), &OneForm::zeros(s), 0.25, DerivativeMode::Central)
        .unwrap();
    let want = demeaned(&ComplexField::from_fn(s, |z| C::new(0.0, (z * z).im)));
    assert!((&c.g - &want).sup_norm() < 1e-10);
}

#[test]
fn psi_vanishes_for_zero_coefficient() {
    let s = spec(64);
    let cfg = VariationalConfig::default();
    for b in backends() {
        let p = build_psi(&BeltramiCoefficient::zero(s), &cfg, b.as_ref()).unwrap();
        assert_eq!(p.psi.sup_norm(), 0.0);
    }
}

#[test]
fn manufactured_psi_through_general_eta() {
    let s = spec(128);
    let mu = bump(s, C::new(0.0, 0.1), 1.0, 4).map(|c| C::new(0.3, 0.2) * c);
    let mu = BeltramiCoefficient::new(mu).unwrap();
    let (psi, psi_z) = smooth_phi(s);
    let psi_zbar = ComplexField::from_fn(s, |z| {
        let c = C::new(0.1, -0.2);
        let t = 1.0 - (z - c).norm_sqr();
        if t <= 0.0 {
            C::new(0.0, 0.0)
        } else {
            -4.0 * t.powi(3) * (z - c) * C::new(1.0, 0.5 * z.re) + t.powi(4) * C::new(0.0, 0.25)
        }
    });
    let f_tilde = psi_zbar.zip_map(&(mu.field() * &psi_z), |a, b| a - b);
    let eta = OneForm::new(ComplexField::zeros(s), f_tilde.map(|c| -c)).unwrap();
    let cfg = VariationalConfig::default();
    let p = build_psi_general(&mu, &eta, &cfg, &FreeSpaceWeakSolver::new()).unwrap();
    let e = rel(&demeaned(&p.psi), &demeaned(&psi));
    assert!(e <= 5e-2, "{e:e}");
    // On the box Ψ is only determined up to a homogeneous solution; the
    // equation itself must still hold.
    let p = build_psi_general(&mu, &eta, &cfg, &BoxNaturalWeakSolver).unwrap();
    assert!(p.inhomogeneous_residual <= 2e-2, "{}", p.inhomogeneous_residual);
}

#[test]
fn flat_integration_is_identity() {
    let s = spec(32);
    let sol = integrate_phi(&ComplexField::zeros(s), &BeltramiCoefficient::zero(s), 0.25, DerivativeMode::Central)
        .unwrap();
    let sol = normalize(&sol).unwrap();
    let id = ComplexField::from_fn(s, |z| z);
    assert!((&sol.phi - &id).sup_norm() < 1e-12);
}

#[test]
fn normalize_pins_zero_and_one() {
    let s = spec(64);
    let phi = ComplexField::from_fn(s, |z| C::new(2.0, 1.0) * z + C::new(0.3, -0.7) + 0.1 * z * z);
    let sol = QCMapSolution::from_phi(phi, DerivativeMode::Central).unwrap();
    let n1 = normalize(&sol).unwrap();
    assert!(n1.phi.interpolate(C::new(0.0, 0.0)).unwrap().norm() < 1e-12);
    assert!((n1.phi.interpolate(C::new(1.0, 0.0)).unwrap() - 1.0).norm() < 1e-12);
    let n2 = normalize(&n1).unwrap();
    assert!((&n2.phi - &n1.phi).sup_norm() < 1e-12);

    let flat = QCMapSolution::from_phi(ComplexField::constant(s, C::new(1.0, 1.0)), DerivativeMode::Central).unwrap();
    assert!(matches!(normalize(&flat), Err(Error::DegenerateNormalization)));
}

#[test]
fn identity_has_trivial_far_field() {
    let s = spec(64);
    let sol = QCMapSolution::from_phi(ComplexField::from_fn(s, |z| z), DerivativeMode::Central).unwrap();
    let ff = far_field_fit(&sol, &BeltramiCoefficient::zero(s)).unwrap();
    assert!(ff.b.norm() < 1e-12 && (ff.lambda - 1.0).norm() < 1e-12 && ff.decay_defect < 1e-10);
}

#[test]
fn rejects_bad_inputs() {
    let s = spec(32);
    let mu = BeltramiCoefficient::zero(s);
    let wide = OneForm::new(ComplexField::constant(s, C::new(1.0, 0.0)), ComplexField::zeros(s)).unwrap();
    let b = FreeSpaceWeakSolver::new();
    assert!(matches!(solve_weak_with(&b, &mu, &wide, 1e-8, 10), Err(Error::InvalidEta)));
    assert!(matches!(
        solve_weak_with(&b, &mu, &OneForm::zeros(s), 0.0, 10),
        Err(Error::DomainError(_))
    ));
    let other = OneForm::zeros(spec(16));
    assert!(matches!(solve_weak_with(&b, &mu, &other, 1e-8, 10), Err(Error::ShapeMismatch)));
}

