use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ComplexField;
use crate::error::{Error, Result};

/// `sqrt(Σ|f|² h²)`, summed in index order.
pub fn l2_norm(f: &ComplexField) -> f64 {
    let s: f64 = f.as_slice().iter().map(|c| c.norm_sqr()).sum();
    (s * f.spec().cell_area()).sqrt()
}

pub fn sup_norm(f: &ComplexField) -> f64 {
    f.as_slice().iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Empirical Hölder seminorm: the largest quotient `|f(z₁) − f(z₂)| / |z₁ − z₂|^α`
/// over all nearest-neighbour pairs plus `num_pairs` seeded random pairs.
///
/// The random pairs for a given seed are a prefix of one fixed stream, so
/// increasing `num_pairs` can only increase the estimate.
pub fn holder_seminorm(f: &ComplexField, alpha: f64, num_pairs: usize, seed: u64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::DomainError(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if num_pairs == 0 {
        return Err(Error::DomainError("num_pairs must be at least 1".into()));
    }
    let spec = f.spec();
    let n = spec.n();
    let data = f.as_slice();
    let quotient = |i1: usize, i2: usize| -> f64 {
        let d = (spec.point_at(i1) - spec.point_at(i2)).norm();
        (data[i1] - data[i2]).norm() / d.powf(alpha)
    };

    let mut best = 0.0f64;
    let neighbour = spec.spacing().powf(alpha);
    for k in 0..n {
        for j in 0..n {
            let i = spec.index(j, k);
            if j + 1 < n {
                best = best.max((data[i] - data[i + 1]).norm() / neighbour);
            }
            if k + 1 < n {
                best = best.max((data[i] - data[i + n]).norm() / neighbour);
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = spec.len();
    for _ in 0..num_pairs {
        let i1 = rng.gen_range(0..len);
        let i2 = rng.gen_range(0..len);
        if i1 != i2 {
            best = best.max(quotient(i1, i2));
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use num_complex::Complex64;

    #[test]
    fn constant_norms() {
        for n in [16, 32, 64] {
            let s = GridSpec::new(n, 1.0).unwrap();
            let f = ComplexField::constant(s, Complex64::new(1.0, 0.0));
            assert!((l2_norm(&f) - 2.0).abs() < 1e-12);
            assert_eq!(sup_norm(&f), 1.0);
        }
    }

    #[test]
    fn disk_indicator_area() {
        let s = GridSpec::new(256, 2.0).unwrap();
        let f = ComplexField::from_fn(s, |z| {
            Complex64::new(if z.norm() < 1.0 { 1.0 } else { 0.0 }, 0.0)
        });
        let rel = (l2_norm(&f) - std::f64::consts::PI.sqrt()).abs() / std::f64::consts::PI.sqrt();
        assert!(rel < 0.02, "{rel}");
    }

    #[test]
    fn holder_of_identity_bounded_by_diameter() {
        let s = GridSpec::new(16, 1.0).unwrap();
        let f = ComplexField::from_fn(s, |z| z);
        let q = holder_seminorm(&f, 0.5, 20_000, 7).unwrap();
        assert!(q <= (2.0 * 2f64.sqrt()).sqrt() + 1e-12);
        assert!(q > 1.0);
        assert!(holder_seminorm(&f, 1.0, 10, 0).is_err());
        assert!(holder_seminorm(&f, 0.5, 0, 0).is_err());
    }
}
