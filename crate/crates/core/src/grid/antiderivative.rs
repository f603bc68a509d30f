use num_complex::Complex64;

use super::{l2_norm, wirtinger_dz, wirtinger_dzbar, ComplexField, DerivativeMode, OneForm, NORM_FLOOR};
use crate::error::{Error, Result};

/// Potential of a closed one-form together with its self-check.
#[derive(Clone, Debug)]
pub struct Antiderivative {
    pub field: ComplexField,
    pub curl_residual: f64,
    /// `‖∂z g − p‖₂ / (‖p‖₂ + ‖q‖₂)`.
    pub dz_defect: f64,
    /// `‖∂z̄ g − q‖₂ / (‖p‖₂ + ‖q‖₂)`.
    pub dzbar_defect: f64,
}

/// `‖∂z̄p − ∂z q‖₂ / (‖p‖₂ + ‖q‖₂)`.
pub fn curl_residual(omega: &OneForm, mode: DerivativeMode) -> Result<f64> {
    let a = wirtinger_dzbar(&omega.p, mode)?;
    let b = wirtinger_dz(&omega.q, mode)?;
    Ok(l2_norm(&(&a - &b)) / (l2_norm(&omega.p) + l2_norm(&omega.q) + NORM_FLOOR))
}

/// Trapezoidal integration of `ω` from the origin cell: along its row first,
/// then up and down every column. No closedness check.
pub fn integrate_paths(omega: &OneForm) -> ComplexField {
    let spec = *omega.spec();
    let n = spec.n();
    let h = spec.spacing();
    let (j0, k0) = spec.origin_cell();
    let i = Complex64::new(0.0, 1.0);
    let p = omega.p.as_slice();
    let q = omega.q.as_slice();
    // dg = g_x dx + g_y dy with g_x = p + q, g_y = i(p − q)
    let gx = |idx: usize| p[idx] + q[idx];
    let gy = |idx: usize| i * (p[idx] - q[idx]);

    let mut g = vec![Complex64::new(0.0, 0.0); n * n];
    let row = k0 * n;
    for j in j0 + 1..n {
        g[row + j] = g[row + j - 1] + 0.5 * h * (gx(row + j - 1) + gx(row + j));
    }
    for j in (0..j0).rev() {
        g[row + j] = g[row + j + 1] - 0.5 * h * (gx(row + j + 1) + gx(row + j));
    }
    for k in k0 + 1..n {
        for j in 0..n {
            let (a, b) = ((k - 1) * n + j, k * n + j);
            g[b] = g[a] + 0.5 * h * (gy(a) + gy(b));
        }
    }
    for k in (0..k0).rev() {
        for j in 0..n {
            let (a, b) = ((k + 1) * n + j, k * n + j);
            g[b] = g[a] - 0.5 * h * (gy(a) + gy(b));
        }
    }
    ComplexField::from_raw(spec, g)
}

/// Solves `dg = ω` with `g = 0` at the origin cell, provided `ω` is closed
/// to within `tol_closed`.
pub fn antiderivative(omega: &OneForm, tol_closed: f64, mode: DerivativeMode) -> Result<Antiderivative> {
    omega.p.ensure_finite()?;
    omega.q.ensure_finite()?;
    let curl = curl_residual(omega, mode)?;
    if !(curl <= tol_closed) {
        return Err(Error::NotClosed {
            residual: curl,
            tol: tol_closed,
        });
    }
    let field = integrate_paths(omega);
    let scale = l2_norm(&omega.p) + l2_norm(&omega.q) + NORM_FLOOR;
    let dz_defect = l2_norm(&(&wirtinger_dz(&field, mode)? - &omega.p)) / scale;
    let dzbar_defect = l2_norm(&(&wirtinger_dzbar(&field, mode)? - &omega.q)) / scale;
    Ok(Antiderivative {
        field,
        curl_residual: curl,
        dz_defect,
        dzbar_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn dz_integrates_to_shifted_identity() {
        let s = GridSpec::new(32, 1.0).unwrap();
        let omega = OneForm::new(
            ComplexField::constant(s, Complex64::new(1.0, 0.0)),
            ComplexField::zeros(s),
        )
        .unwrap();
        let g = antiderivative(&omega, 1e-12, DerivativeMode::Central).unwrap();
        let (j0, k0) = s.origin_cell();
        let z0 = s.point(j0, k0);
        for i in 0..s.len() {
            assert!((g.field.as_slice()[i] - (s.point_at(i) - z0)).norm() < 1e-13);
        }
    }

    #[test]
    fn modulus_squared_potential() {
        let s = GridSpec::new(32, 1.0).unwrap();
        let omega = OneForm::new(
            ComplexField::from_fn(s, |z| z.conj()),
            ComplexField::from_fn(s, |z| z),
        )
        .unwrap();
        assert!(curl_residual(&omega, DerivativeMode::Central).unwrap() <= 1e-12);
        let g = antiderivative(&omega, 1e-12, DerivativeMode::Central).unwrap();
        let (j0, k0) = s.origin_cell();
        let r0 = s.point(j0, k0).norm_sqr();
        for i in 0..s.len() {
            let want = s.point_at(i).norm_sqr() - r0;
            assert!((g.field.as_slice()[i] - want).norm() < 1e-13);
        }
    }

    #[test]
    fn non_closed_form_rejected() {
        let s = GridSpec::new(64, 2.0).unwrap();
        let disk = ComplexField::from_fn(s, |z| {
            Complex64::new(if z.norm() < 1.0 { 1.0 } else { 0.0 }, 0.0)
        });
        let omega = OneForm::new(ComplexField::zeros(s), disk).unwrap();
        let r = curl_residual(&omega, DerivativeMode::Central).unwrap();
        assert!(r > 0.1);
        assert!(matches!(
            antiderivative(&omega, 1e-3, DerivativeMode::Central),
            Err(Error::NotClosed { .. })
        ));
    }
}
