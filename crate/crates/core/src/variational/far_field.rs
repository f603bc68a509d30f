use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hodge::BeltramiCoefficient;
use crate::solution::QCMapSolution;

/// Negative powers kept in the Laurent fit.
pub const FAR_FIELD_TERMS: usize = 12;

#[derive(Clone, Copy, Debug)]
pub struct FarField {
    /// Constant term of `Φ/λ` after translating `Φ(0)` to `0`.
    pub b: Complex64,
    /// Leading coefficient `λ` of `Φ ≈ λz + λb`.
    pub lambda: Complex64,
    /// `max |Φ/λ − z − b| · |z|` over the fitting ring.
    pub decay_defect: f64,
    pub ring_cells: usize,
}

/// Fits `Φ − Φ(0) ≈ λz + β + Σ_{m=1}^{M} c_m z^{−m}` by least squares on the
/// outer collar of cells (width `n/16`, inside the zero set of `μ`) and
/// reports `b = β/λ`.
pub fn far_field_fit(sol: &QCMapSolution, mu: &BeltramiCoefficient) -> Result<FarField> {
    let spec = *sol.phi.spec();
    let n = spec.n();
    if mu.spec() != &spec {
        return Err(Error::ShapeMismatch);
    }
    if mu.support_margin() < n / 8 {
        return Err(Error::InvalidBeltrami("support margin below n/8".into()));
    }
    let width = (n / 16).max(2);
    let p0 = sol.phi.interpolate(Complex64::new(0.0, 0.0))?;
    let l = spec.half_width();

    let mut pts = Vec::new();
    for k in 0..n {
        for j in 0..n {
            if spec.ring_depth(j, k) < width {
                pts.push((spec.point(j, k), sol.phi.get(j, k) - p0));
            }
        }
    }
    let cols = FAR_FIELD_TERMS + 2;
    let a = DMatrix::from_fn(pts.len(), cols, |r, c| {
        let w = pts[r].0 / l;
        match c {
            0 => w,
            1 => Complex64::new(1.0, 0.0),
            m => w.powi(-((m - 1) as i32)),
        }
    });
    let rhs = DVector::from_iterator(pts.len(), pts.iter().map(|p| p.1));
    let coef = a
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::DomainError(format!("far-field fit failed: {e}")))?;
    let lambda = coef[0] / l;
    if lambda.norm() == 0.0 {
        return Err(Error::DegenerateNormalization);
    }
    let b = coef[1] / lambda;
    let decay_defect = pts
        .iter()
        .map(|(z, v)| (v / lambda - z - b).norm() * z.norm())
        .fold(0.0, f64::max);
    Ok(FarField {
        b,
        lambda,
        decay_defect,
        ring_cells: pts.len(),
    })
}
