//! Weak Hodge-star construction.
//!
//! For `η = G dz − F dz̄` the weak equation `id(*_μ df) = dη` is solved for
//! `f`; then `ω = i *_μ df − η` is closed, `dg = ω`, and `Ψ = f + g`
//! satisfies `Ψ_z̄ − μ Ψ_z = μG + F`. With `G = 0, F = ∂zμ` the field `e^Ψ`
//! is `Φ_z` for the normalized solution `Φ`, recovered by integrating
//! `α = e^Ψ dz + μ e^Ψ dz̄`.

mod box_natural;
mod far_field;
mod free_space;
pub mod krylov;

pub use box_natural::BoxNaturalWeakSolver;
pub use far_field::{far_field_fit, FarField};
pub use free_space::FreeSpaceWeakSolver;

use crate::error::{Error, Result};
use crate::grid::{
    antiderivative, gradient, l2_norm, wirtinger_dz, ComplexField, DerivativeMode, OneForm,
    NORM_FLOOR,
};
use crate::hodge::{metric_coefficients, BeltramiCoefficient, MetricCoefficients};
use crate::solution::{QCMapSolution, SolverMeta};

#[derive(Clone, Debug)]
pub struct WeakSolveReport {
    pub iterations: usize,
    /// Relative algebraic residual of the linear solve.
    pub final_residual: f64,
    /// `(1 − k)/(1 + k)`.
    pub coercivity_used: f64,
    pub backend: &'static str,
}

#[derive(Clone, Debug)]
pub struct WeakSolution {
    /// Mean-zero potential.
    pub f: ComplexField,
    /// `(f_z, f_z̄)` as represented by the backend.
    pub gradient: OneForm,
    pub report: WeakSolveReport,
}

/// A discretization of the weak equation `D*(M Df − (G, F)) = 0`.
pub trait WeakSolver: Send + Sync {
    fn name(&self) -> &'static str;

    fn solve(
        &self,
        mu: &BeltramiCoefficient,
        mc: &MetricCoefficients,
        eta: &OneForm,
        tol: f64,
        max_iter: usize,
    ) -> Result<WeakSolution>;
}

#[derive(Clone, Copy, Debug)]
pub struct VariationalConfig {
    pub tol: f64,
    pub max_iter: usize,
    /// Largest accepted relative curl of `ω` and `α`.
    pub tol_closed: f64,
    pub mode: DerivativeMode,
}

impl Default for VariationalConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 2000,
            tol_closed: 0.25,
            mode: DerivativeMode::Central,
        }
    }
}

/// `(G, F)` from `η = G dz − F dz̄`.
pub(crate) fn split_eta(eta: &OneForm) -> (ComplexField, ComplexField) {
    (eta.p.clone(), eta.q.map(|c| -c))
}

fn check_eta(eta: &OneForm) -> Result<()> {
    for part in [&eta.p, &eta.q] {
        part.ensure_finite()?;
        if part.boundary_sup(2) > 1e-12 * part.sup_norm() {
            return Err(Error::InvalidEta);
        }
    }
    Ok(())
}

/// `η = −(∂zμ) dz̄`, i.e. `G = 0`, `F = ∂zμ`.
pub fn beltrami_eta(mu: &BeltramiCoefficient, mode: DerivativeMode) -> Result<OneForm> {
    let muz = wirtinger_dz(mu.field(), mode)?;
    Ok(OneForm {
        p: ComplexField::zeros(*mu.spec()),
        q: muz.map(|c| -c),
    })
}

/// Solves the weak equation with the free-space backend.
pub fn solve_weak(
    mu: &BeltramiCoefficient,
    eta: &OneForm,
    tol: f64,
    max_iter: usize,
) -> Result<(ComplexField, WeakSolveReport)> {
    let sol = solve_weak_with(&FreeSpaceWeakSolver::new(), mu, eta, tol, max_iter)?;
    Ok((sol.f, sol.report))
}

pub fn solve_weak_with(
    solver: &dyn WeakSolver,
    mu: &BeltramiCoefficient,
    eta: &OneForm,
    tol: f64,
    max_iter: usize,
) -> Result<WeakSolution> {
    if !(tol > 0.0) {
        return Err(Error::DomainError(format!("tolerance must be positive, got {tol}")));
    }
    if eta.spec() != mu.spec() {
        return Err(Error::ShapeMismatch);
    }
    check_eta(eta)?;
    let mc = metric_coefficients(mu);
    solver.solve(mu, &mc, eta, tol, max_iter)
}

#[derive(Clone, Debug)]
pub struct Conjugate {
    /// Mean-zero potential of `ω`.
    pub g: ComplexField,
    /// Relative curl of `ω`.
    pub closedness: f64,
}

fn omega_from_gradient(df: &OneForm, mc: &MetricCoefficients, eta: &OneForm) -> OneForm {
    let (x, y) = mc.apply_m(&df.p, &df.q);
    OneForm {
        p: &x - &eta.p,
        q: y.zip_map(&eta.q, |a, b| -a - b),
    }
}

fn conjugate_of(
    df: &OneForm,
    mc: &MetricCoefficients,
    eta: &OneForm,
    tol_closed: f64,
    mode: DerivativeMode,
) -> Result<Conjugate> {
    let omega = omega_from_gradient(df, mc, eta);
    let anti = antiderivative(&omega, tol_closed, mode)?;
    let mut g = anti.field;
    let mean = g.mean();
    g.as_mut_slice().iter_mut().for_each(|c| *c -= mean);
    Ok(Conjugate {
        g,
        closedness: anti.curl_residual,
    })
}

/// `g` with `dg = i *_μ df − η`, differentiating `f` numerically.
pub fn conjugate_field(
    f: &ComplexField,
    mu: &BeltramiCoefficient,
    eta: &OneForm,
    tol_closed: f64,
    mode: DerivativeMode,
) -> Result<Conjugate> {
    let mc = metric_coefficients(mu);
    conjugate_of(&gradient(f, mode)?, &mc, eta, tol_closed, mode)
}

#[derive(Clone, Debug)]
pub struct PsiResult {
    pub psi: ComplexField,
    pub f: ComplexField,
    pub g: ComplexField,
    pub weak: WeakSolveReport,
    pub closedness: f64,
    /// `‖Ψ_z̄ − μΨ_z − (μG + F)‖₂ / ‖μG + F‖₂`.
    pub inhomogeneous_residual: f64,
}

/// `Ψ = f + g` for an arbitrary compactly supported `η`.
pub fn build_psi_general(
    mu: &BeltramiCoefficient,
    eta: &OneForm,
    cfg: &VariationalConfig,
    solver: &dyn WeakSolver,
) -> Result<PsiResult> {
    let weak = solve_weak_with(solver, mu, eta, cfg.tol, cfg.max_iter)?;
    let mc = metric_coefficients(mu);
    let conj = conjugate_of(&weak.gradient, &mc, eta, cfg.tol_closed, cfg.mode)?;
    let psi = &weak.f + &conj.g;

    let (g, f) = split_eta(eta);
    let target = mu.field().zip_map(&g, |m, g| m * g);
    let target = &target + &f;
    let dpsi = gradient(&psi, cfg.mode)?;
    let mut resid = Vec::with_capacity(psi.spec().len());
    for i in 0..psi.spec().len() {
        let m = mu.field().as_slice()[i];
        resid.push(dpsi.q.as_slice()[i] - m * dpsi.p.as_slice()[i] - target.as_slice()[i]);
    }
    let resid = ComplexField::from_raw(*psi.spec(), resid);
    let inhomogeneous_residual = l2_norm(&resid) / (l2_norm(&target) + NORM_FLOOR);

    Ok(PsiResult {
        psi,
        f: weak.f,
        g: conj.g,
        weak: weak.report,
        closedness: conj.closedness,
        inhomogeneous_residual,
    })
}

/// `Ψ` solving `Ψ_z̄ − μΨ_z = ∂zμ`.
pub fn build_psi(
    mu: &BeltramiCoefficient,
    cfg: &VariationalConfig,
    solver: &dyn WeakSolver,
) -> Result<PsiResult> {
    let eta = beltrami_eta(mu, cfg.mode)?;
    build_psi_general(mu, &eta, cfg, solver)
}

/// Integrates `α = e^Ψ dz + μ e^Ψ dz̄`.
pub fn integrate_phi(
    psi: &ComplexField,
    mu: &BeltramiCoefficient,
    tol_closed: f64,
    mode: DerivativeMode,
) -> Result<QCMapSolution> {
    let e = psi.map(|c| c.exp());
    e.ensure_finite()?;
    let me = &e * mu.field();
    let alpha = OneForm::new(e.clone(), me.clone())?;
    let anti = antiderivative(&alpha, tol_closed, mode)?;
    let mut meta = SolverMeta::new("variational");
    meta.push("alpha_curl", anti.curl_residual);
    meta.push("alpha_dz_defect", anti.dz_defect);
    meta.push("alpha_dzbar_defect", anti.dzbar_defect);
    let sol = QCMapSolution::from_parts(anti.field, e, me, meta);
    let min = sol.min_jacobian();
    if !(min > 0.0) {
        return Err(Error::NonPositiveJacobian { min });
    }
    Ok(sol)
}

/// Full pipeline `μ ↦ Φ` (not normalized).
pub fn variational_map(
    mu: &BeltramiCoefficient,
    cfg: &VariationalConfig,
    solver: &dyn WeakSolver,
) -> Result<QCMapSolution> {
    let psi = build_psi(mu, cfg, solver)?;
    let mut sol = integrate_phi(&psi.psi, mu, cfg.tol_closed, cfg.mode)?;
    sol.meta.method = format!("variational/{}", psi.weak.backend);
    sol.meta.iterations = psi.weak.iterations;
    sol.meta.solver_residual = psi.weak.final_residual;
    sol.meta.push("omega_curl", psi.closedness);
    sol.meta.push("psi_residual", psi.inhomogeneous_residual);
    sol.meta.push("coercivity", psi.weak.coercivity_used);
    Ok(sol)
}
