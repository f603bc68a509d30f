use beltrami::demo::{DemoMu, Manufactured};
use beltrami::grid::{holder_seminorm, read_cgrid, write_cgrid, ComplexField, DerivativeMode, GridSpec, OneForm};
use beltrami::hodge::{
    energy_seminorm_sq, hodge_star_1form, metric_coefficients, mu_inner_product, BeltramiCoefficient,
};
use beltrami::kernel::{adjointness_defect, bump, kernel_s, kernel_sample};
use beltrami::operators::{h_op, t_op};
use beltrami::solution::{normalize, QCMapSolution};
use beltrami::verify::beltrami_residual;
use beltrami::Complex64 as C;
use proptest::prelude::*;

fn cplx(r: f64) -> impl Strategy<Value = C> {
    (-r..r, -r..r).prop_map(|(a, b)| C::new(a, b))
}

fn in_disk(k: f64) -> impl Strategy<Value = C> {
    (0.0..k, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| C::from_polar(r, t))
}

fn spec16() -> GridSpec {
    GridSpec::new(16, 1.0).unwrap()
}

fn random_field(s: GridSpec, vals: &[(f64, f64)]) -> ComplexField {
    ComplexField::new(s, vals.iter().map(|&(a, b)| C::new(a, b)).collect()).unwrap()
}

/// `m` times a fixed bump, so the collar stays zero.
fn scaled_mu(s: GridSpec, m: C) -> BeltramiCoefficient {
    BeltramiCoefficient::new(bump(s, C::new(0.0, 0.0), 0.7 * s.half_width(), 2).map(|c| m * c)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metric_identities(m in in_disk(0.99)) {
        let mu = scaled_mu(spec16(), m);
        let mc = metric_coefficients(&mu);
        let (d1, d2) = mc.identity_defects(&mu);
        prop_assert!(d1 <= 1e-9 && d2 <= 1e-12, "{d1} {d2}");
        prop_assert!(mc.a.as_slice().iter().all(|a| *a >= 1.0));
    }

    #[test]
    fn star_is_an_involution_up_to_sign(m in in_disk(0.95), p in cplx(3.0), q in cplx(3.0)) {
        let s = spec16();
        let mc = metric_coefficients(&scaled_mu(s, m));
        let w = OneForm::new(ComplexField::constant(s, p), ComplexField::constant(s, q)).unwrap();
        let ss = hodge_star_1form(&hodge_star_1form(&w, &mc).unwrap(), &mc).unwrap();
        let scale = 1.0 + p.norm() + q.norm();
        prop_assert!((&ss.p + &w.p).sup_norm() <= 1e-9 * scale);
        prop_assert!((&ss.q + &w.q).sup_norm() <= 1e-9 * scale);
    }

    #[test]
    fn kernel_obeys_frozen_bound(w in cplx(2.0), z in cplx(2.0), m in in_disk(0.9)) {
        prop_assume!((w - z).norm() > 1e-9);
        let k = kernel_sample(w, z, m, 0.9).unwrap();
        prop_assert!(k.bound_ratio <= 1.0 + 1e-12);
        // Reduction to μ = 0 by the affine change ζ ↦ ζ + μζ̄.
        let d = w - z;
        let direct = kernel_s(d + m * d.conj(), C::new(0.0, 0.0), C::new(0.0, 0.0)).unwrap();
        prop_assert!((direct - k.value).norm() <= 1e-12 * k.value.norm());
    }

    #[test]
    fn cgrid_round_trip(vals in prop::collection::vec((-1e6..1e6f64, -1e-6..1e-6f64), 256), l in 0.1..10.0f64) {
        let s = GridSpec::new(16, l).unwrap();
        let f = random_field(s, &vals);
        let mut buf = Vec::new();
        write_cgrid(&f, &mut buf).unwrap();
        let g = read_cgrid(&buf[..]).unwrap();
        prop_assert_eq!(g.spec(), f.spec());
        prop_assert_eq!(g.as_slice(), f.as_slice());
    }

    #[test]
    fn holder_estimate_grows_with_pairs(vals in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 256), seed in 0u64..1000, alpha in 0.05..0.95f64) {
        let f = random_field(spec16(), &vals);
        let a = holder_seminorm(&f, alpha, 50, seed).unwrap();
        let b = holder_seminorm(&f, alpha, 500, seed).unwrap();
        prop_assert!(b >= a);
        let c = holder_seminorm(&f.scale(C::new(0.0, 3.0)), alpha, 50, seed).unwrap();
        prop_assert!((c - 3.0 * a).abs() <= 1e-12 * c);
    }

    #[test]
    fn coercivity_of_the_metric_form(m in in_disk(0.9), c1 in cplx(1.0), c2 in cplx(1.0)) {
        let s = spec16();
        let mu = scaled_mu(s, m);
        let mc = metric_coefficients(&mu);
        let u = ComplexField::from_fn(s, |z| c1 * z * z + c2 * z.conj() + z * z.conj());
        let mode = DerivativeMode::Central;
        let e = mu_inner_product(&u, &u, &mc, mode).unwrap();
        let k = mu.k();
        let lower = (1.0 - k) / (1.0 + k) * energy_seminorm_sq(&u, mode).unwrap();
        prop_assert!(e.im.abs() <= 1e-10 * e.re.abs());
        prop_assert!(e.re >= lower * (1.0 - 1e-10));
    }

    #[test]
    fn operators_are_linear(a in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 256), b in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 256), s in cplx(2.0)) {
        let f = random_field(spec16(), &a);
        let g = random_field(spec16(), &b);
        let lhs = t_op(&(&f.scale(s) + &g));
        let rhs = &t_op(&f).scale(s) + &t_op(&g);
        prop_assert!((&lhs - &rhs).sup_norm() <= 1e-12 * (1.0 + rhs.sup_norm()));
        let lhs = h_op(&(&f.scale(s) + &g));
        let rhs = &h_op(&f).scale(s) + &h_op(&g);
        prop_assert!((&lhs - &rhs).sup_norm() <= 1e-12 * (1.0 + rhs.sup_norm()));
    }

    #[test]
    fn residual_is_normalization_invariant(c in 0.05..0.4f64, a in cplx(3.0), b in cplx(3.0)) {
        prop_assume!(a.norm() > 0.1);
        let m = Manufactured::new(c).unwrap();
        let s = GridSpec::new(32, 2.0).unwrap();
        let mu = BeltramiCoefficient::new(ComplexField::from_fn(s, |z| m.mu(z))).unwrap();
        let sol = QCMapSolution::from_phi(ComplexField::from_fn(s, |z| a * m.phi(z) + b), DerivativeMode::Central).unwrap();
        let r0 = beltrami_residual(&sol, &mu, DerivativeMode::Central).unwrap();
        let r1 = beltrami_residual(&normalize(&sol).unwrap(), &mu, DerivativeMode::Central).unwrap();
        prop_assert!((r0 - r1).abs() <= 1e-12, "{r0} {r1}");
    }

    #[test]
    fn demo_spec_round_trip(k in 0.0..0.99f64, r in 0.1..2.0f64, c in cplx(0.5), which in 0usize..4) {
        let d = match which {
            0 => DemoMu::Zero,
            1 => DemoMu::RadialBump { k, radius: r, center: c },
            2 => DemoMu::RotatingBump { k, radius: r },
            _ => DemoMu::Manufactured(Manufactured::new(0.4 * k).unwrap()),
        };
        let back: DemoMu = d.to_string().parse().unwrap();
        prop_assert_eq!(back, d);
    }

    #[test]
    fn twisted_derivatives_are_adjoint(m in in_disk(0.8), c1 in cplx(0.3), c2 in cplx(0.3)) {
        let s = GridSpec::new(64, 2.0).unwrap();
        let mu = scaled_mu(s, m);
        let f = bump(s, c1, 1.2, 4);
        let g = bump(s, c2, 1.0, 4).map(|v| C::new(0.5, 1.0) * v);
        let d = adjointness_defect(&f, &g, &mu, DerivativeMode::Central).unwrap();
        prop_assert!(d <= 1e-3, "{d}");
    }
}
