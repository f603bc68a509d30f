//! Singular-integral construction: `h = Hμ + H(μh)` by fixed-point
//! iteration, then `Φ = z + T(μ(1 + h))`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{l2_norm, ComplexField};
use crate::hodge::BeltramiCoefficient;
use crate::operators::{beurling_transform, cauchy_transform, OperatorConfig};
use crate::solution::{QCMapSolution, SolverMeta};

#[derive(Clone, Debug, Default)]
pub struct NeumannReport {
    pub iterations: usize,
    /// `‖h_{m+1} − h_m‖₂` for each update.
    pub increment_norms: Vec<f64>,
    /// Ratios of consecutive increments.
    pub contraction_estimates: Vec<f64>,
    /// `‖h − H(μh) − Hμ‖₂ / ‖Hμ‖₂`.
    pub fixed_point_residual: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct NeumannConfig {
    pub operator: OperatorConfig,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NeumannConfig {
    fn default() -> Self {
        Self {
            operator: OperatorConfig::default(),
            tol: 1e-10,
            max_iter: 1000,
        }
    }
}

fn beurling(f: &ComplexField, cfg: &OperatorConfig) -> Result<ComplexField> {
    Ok(beurling_transform(f, cfg)?.field)
}

/// Iterates `h_{m+1} = H(μ h_m) + Hμ` from `h₀ = 0` until the increment
/// drops below `tol · ‖Hμ‖₂`.
pub fn neumann_series(
    mu: &BeltramiCoefficient,
    cfg: &OperatorConfig,
    tol: f64,
    max_iter: usize,
) -> Result<(ComplexField, NeumannReport)> {
    let spec = *mu.spec();
    if mu.is_zero() {
        return Ok((ComplexField::zeros(spec), NeumannReport::default()));
    }
    let m = mu.field();
    let hmu = beurling(m, cfg)?;
    let scale = l2_norm(&hmu);
    let mut h = ComplexField::zeros(spec);
    let mut report = NeumannReport::default();
    loop {
        if report.iterations >= max_iter {
            let last = report.increment_norms.last().copied().unwrap_or(f64::INFINITY);
            return Err(Error::NoConvergence {
                max_iter,
                residual: last / scale,
            });
        }
        let next = &beurling(&(m * &h), cfg)? + &hmu;
        next.ensure_finite()?;
        let inc = l2_norm(&(&next - &h));
        if let Some(&prev) = report.increment_norms.last() {
            report.contraction_estimates.push(inc / prev);
        }
        report.increment_norms.push(inc);
        report.iterations += 1;
        h = next;
        if inc <= tol * scale {
            break;
        }
    }
    let resid = &(&h - &beurling(&(m * &h), cfg)?) - &hmu;
    report.fixed_point_residual = l2_norm(&resid) / scale;
    Ok((h, report))
}

/// `Φ = z + T(μ(1 + h))`, `Φ_z = 1 + H(μ(1 + h))`, `Φ_z̄ = μ(1 + h)`.
pub fn assemble_map(
    mu: &BeltramiCoefficient,
    h: &ComplexField,
    cfg: &OperatorConfig,
) -> Result<QCMapSolution> {
    let spec = *mu.spec();
    let z = ComplexField::from_fn(spec, |z| z);
    let one = Complex64::new(1.0, 0.0);
    let mut meta = SolverMeta::new("neumann");
    if mu.is_zero() {
        let sol = QCMapSolution::from_parts(
            z,
            ComplexField::constant(spec, one),
            ComplexField::zeros(spec),
            meta,
        );
        return Ok(sol);
    }
    let g = mu.field().zip_map(h, |m, h| m * (1.0 + h));
    let phi = &z + &cauchy_transform(&g, cfg)?.field;
    let phi_z = beurling(&g, cfg)?.map(|c| c + one);
    let mut num = 0.0;
    for i in 0..spec.len() {
        num += (g.as_slice()[i] - mu.field().as_slice()[i] * phi_z.as_slice()[i]).norm_sqr();
    }
    let beltrami = (num * spec.cell_area()).sqrt() / l2_norm(&phi_z);
    meta.push("stored_beltrami_residual", beltrami);
    Ok(QCMapSolution::from_parts(phi, phi_z, g, meta))
}

/// Full pipeline `μ ↦ Φ` (not normalized).
pub fn neumann_map(mu: &BeltramiCoefficient, cfg: &NeumannConfig) -> Result<QCMapSolution> {
    let (h, report) = neumann_series(mu, &cfg.operator, cfg.tol, cfg.max_iter)?;
    let mut sol = assemble_map(mu, &h, &cfg.operator)?;
    sol.meta.iterations = report.iterations;
    sol.meta.solver_residual = report.fixed_point_residual;
    if let Some(max) = report.contraction_estimates.iter().copied().reduce(f64::max) {
        sol.meta.push("max_contraction", max);
    }
    Ok(sol)
}

/// `C_α = 2^α/α + 3^α/α + 2^{α−1}/(1−α) + 1`.
pub fn holder_constant(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::DomainError(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(2f64.powf(alpha) / alpha + 3f64.powf(alpha) / alpha + 2f64.powf(alpha - 1.0) / (1.0 - alpha) + 1.0)
}

/// `C_α · A · R^α < 1`: sufficient for uniform convergence of the series on
/// the disk of radius `R`.
pub fn radius_predicate(alpha: f64, a: f64, r: f64) -> Result<bool> {
    let c = holder_constant(alpha)?;
    if !(a >= 0.0) {
        return Err(Error::DomainError(format!("A must be non-negative, got {a}")));
    }
    if !(r > 0.0) {
        return Err(Error::DomainError(format!("R must be positive, got {r}")));
    }
    Ok(c * a * r.powf(alpha) < 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn holder_constant_at_one_half() {
        let c = holder_constant(0.5).unwrap();
        let closed = 3.0 * 2f64.sqrt() + 2.0 * 3f64.sqrt() + 1.0;
        assert!((c - closed).abs() < 1e-12);
        assert!((c - 8.7068).abs() < 1e-4);
        assert!(holder_constant(0.0).is_err() && holder_constant(1.0).is_err());
    }

    #[test]
    fn holder_constant_blows_up_at_ends() {
        let (a, b) = (holder_constant(0.9).unwrap(), holder_constant(0.99).unwrap());
        assert!(b > a && b * 0.01 > 1.0);
        let small = holder_constant(1e-4).unwrap();
        assert!((small * 1e-4 - 2.0).abs() < 1e-3);
    }

    #[test]
    fn radius_threshold() {
        assert!(radius_predicate(0.5, 0.0, 1e6).unwrap());
        let c = holder_constant(0.5).unwrap();
        let r_star = c.powi(-2);
        assert!((r_star - 0.01319).abs() < 1e-5);
        assert!(radius_predicate(0.5, 1.0, 0.99 * r_star).unwrap());
        assert!(!radius_predicate(0.5, 1.0, 1.01 * r_star).unwrap());
        assert!(!radius_predicate(0.5, 1.0, 0.05).unwrap());
    }

    #[test]
    fn zero_mu_short_circuits_to_identity() {
        let s = GridSpec::new(64, 2.0).unwrap();
        let mu = BeltramiCoefficient::zero(s);
        let (h, rep) = neumann_series(&mu, &OperatorConfig::default(), 1e-10, 10).unwrap();
        assert_eq!(rep.iterations, 0);
        assert_eq!(h.sup_norm(), 0.0);
        let sol = assemble_map(&mu, &h, &OperatorConfig::default()).unwrap();
        assert_eq!(sol.phi, ComplexField::from_fn(s, |z| z));
        assert_eq!(sol.jacobian.min(), 1.0);
        assert_eq!(sol.jacobian.max(), 1.0);
    }
}
