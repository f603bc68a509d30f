use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{wirtinger_dz, wirtinger_dzbar, ComplexField, DerivativeMode, RealField};

/// Provenance and convergence data attached to a solved map.
#[derive(Clone, Debug, Default)]
pub struct SolverMeta {
    pub method: String,
    pub iterations: usize,
    /// Solver-specific final residual (fixed-point or Krylov).
    pub solver_residual: f64,
    /// Named diagnostics in insertion order.
    pub diagnostics: Vec<(String, f64)>,
}

impl SolverMeta {
    pub fn new(method: impl Into<String>) -> Self {
        Self {
            method: method.into(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, name: impl Into<String>, value: f64) {
        self.diagnostics.push((name.into(), value));
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.diagnostics.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

/// A map `Φ` with its Wirtinger derivatives as produced by a solver.
#[derive(Clone, Debug)]
pub struct QCMapSolution {
    pub phi: ComplexField,
    pub phi_z: ComplexField,
    pub phi_zbar: ComplexField,
    /// `|Φ_z|² − |Φ_z̄|²`.
    pub jacobian: RealField,
    pub meta: SolverMeta,
}

fn jacobian(pz: &ComplexField, pzb: &ComplexField) -> RealField {
    RealField::from_raw(
        *pz.spec(),
        pz.as_slice()
            .iter()
            .zip(pzb.as_slice())
            .map(|(a, b)| a.norm_sqr() - b.norm_sqr())
            .collect(),
    )
}

impl QCMapSolution {
    pub fn from_parts(
        phi: ComplexField,
        phi_z: ComplexField,
        phi_zbar: ComplexField,
        meta: SolverMeta,
    ) -> Self {
        let jacobian = jacobian(&phi_z, &phi_zbar);
        Self {
            phi,
            phi_z,
            phi_zbar,
            jacobian,
            meta,
        }
    }

    /// Wraps a bare map, differentiating it numerically.
    pub fn from_phi(phi: ComplexField, mode: DerivativeMode) -> Result<Self> {
        let pz = wirtinger_dz(&phi, mode)?;
        let pzb = wirtinger_dzbar(&phi, mode)?;
        Ok(Self::from_parts(phi, pz, pzb, SolverMeta::new("external")))
    }

    pub fn min_jacobian(&self) -> f64 {
        self.jacobian.min()
    }
}

/// Post-composes with the affine map sending `Φ(0) ↦ 0` and `Φ(1) ↦ 1`.
/// Values at `0` and `1` are bilinear interpolants.
pub fn normalize(sol: &QCMapSolution) -> Result<QCMapSolution> {
    let p0 = sol.phi.interpolate(Complex64::new(0.0, 0.0))?;
    let p1 = sol.phi.interpolate(Complex64::new(1.0, 0.0))?;
    let d = p1 - p0;
    if d.norm() <= f64::EPSILON * (p0.norm() + p1.norm()) {
        return Err(Error::DegenerateNormalization);
    }
    let s = 1.0 / d;
    let mut out = QCMapSolution::from_parts(
        sol.phi.map(|c| (c - p0) * s),
        sol.phi_z.scale(s),
        sol.phi_zbar.scale(s),
        sol.meta.clone(),
    );
    out.meta.push("normalization_scale", d.norm());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn identity_err(phi: ComplexField) -> f64 {
        let sol = QCMapSolution::from_phi(phi, DerivativeMode::Central).unwrap();
        let n = normalize(&sol).unwrap();
        let id = ComplexField::from_fn(*n.phi.spec(), |z| z);
        (&n.phi - &id).sup_norm()
    }

    #[test]
    fn affine_maps_normalize_to_identity() {
        let s = GridSpec::new(32, 2.0).unwrap();
        assert!(identity_err(ComplexField::from_fn(s, |z| 2.0 * z + 1.0)) < 1e-14);
        assert!(identity_err(ComplexField::from_fn(s, |z| Complex64::new(0.0, 1.0) * z)) < 1e-14);
    }

    #[test]
    fn constant_map_is_degenerate() {
        let s = GridSpec::new(32, 2.0).unwrap();
        let sol = QCMapSolution::from_phi(ComplexField::constant(s, Complex64::new(3.0, 0.0)), DerivativeMode::Central).unwrap();
        assert!(matches!(normalize(&sol), Err(Error::DegenerateNormalization)));
    }

    #[test]
    fn quotient_invariant_under_normalization() {
        let s = GridSpec::new(32, 2.0).unwrap();
        let phi = ComplexField::from_fn(s, |z| z + 0.2 * z.conj() * z + 0.1 * z.conj());
        let sol = QCMapSolution::from_phi(phi, DerivativeMode::Central).unwrap();
        let n = normalize(&sol).unwrap();
        for i in 0..s.len() {
            let a = sol.phi_zbar.as_slice()[i] / sol.phi_z.as_slice()[i];
            let b = n.phi_zbar.as_slice()[i] / n.phi_z.as_slice()[i];
            assert!((a - b).norm() < 1e-12);
        }
    }
}
