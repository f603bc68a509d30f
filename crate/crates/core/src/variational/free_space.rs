use num_complex::Complex64;

use super::krylov::gmres;
use super::{split_eta, WeakSolution, WeakSolveReport, WeakSolver};
use crate::error::{Error, Result};
use crate::grid::{ComplexField, OneForm};
use crate::hodge::{BeltramiCoefficient, MetricCoefficients};
use crate::operators::{h_adjoint_op, h_op, t_bar_op, t_op};

/// Weak solve on the whole plane.
///
/// Writing `c = (G, F) − (M − I) Df` turns `D*(M Df − (G, F)) = 0` into the
/// second-kind equation `(I + (M − I) P) c = (G, F)`, where
/// `P(c₁, c₂) = ½(c₁ + H c₂, H* c₁ + c₂)` projects onto gradients. The
/// potential is recovered as `f = ½ T̄ c₁ + ½ T c₂`.
#[derive(Clone, Copy, Debug, Default)]
pub struct FreeSpaceWeakSolver {
    /// GMRES restart length.
    pub restart: usize,
}

impl FreeSpaceWeakSolver {
    pub fn new() -> Self {
        Self { restart: 40 }
    }
}

fn project(c1: &ComplexField, c2: &ComplexField) -> (ComplexField, ComplexField) {
    let h2 = h_op(c2);
    let hs1 = h_adjoint_op(c1);
    (
        c1.zip_map(&h2, |a, b| 0.5 * (a + b)),
        hs1.zip_map(c2, |a, b| 0.5 * (a + b)),
    )
}

impl WeakSolver for FreeSpaceWeakSolver {
    fn name(&self) -> &'static str {
        "free-space"
    }

    fn solve(
        &self,
        mu: &BeltramiCoefficient,
        mc: &MetricCoefficients,
        eta: &OneForm,
        tol: f64,
        max_iter: usize,
    ) -> Result<WeakSolution> {
        let spec = *mu.spec();
        let len = spec.len();
        let (g, f) = split_eta(eta);
        let mut rhs = g.as_slice().to_vec();
        rhs.extend_from_slice(f.as_slice());
        let unflatten = |x: &[Complex64]| {
            (
                ComplexField::from_raw(spec, x[..len].to_vec()),
                ComplexField::from_raw(spec, x[len..].to_vec()),
            )
        };
        let apply = |x: &[Complex64]| {
            let (c1, c2) = unflatten(x);
            let (u1, u2) = project(&c1, &c2);
            let (e1, e2) = mc.apply_m_minus_identity(&u1, &u2);
            let mut out = Vec::with_capacity(2 * len);
            out.extend(x[..len].iter().zip(e1.as_slice()).map(|(a, b)| a + b));
            out.extend(x[len..].iter().zip(e2.as_slice()).map(|(a, b)| a + b));
            out
        };
        let restart = if self.restart == 0 { 40 } else { self.restart };
        let out = gmres(apply, &rhs, tol, restart, max_iter);
        if !out.converged {
            return Err(Error::NoConvergence {
                max_iter,
                residual: out.residual,
            });
        }
        let (c1, c2) = unflatten(&out.x);
        let (u1, u2) = project(&c1, &c2);
        let pot = &t_bar_op(&c1) + &t_op(&c2);
        let mut pot = pot.scale(Complex64::new(0.5, 0.0));
        let mean = pot.mean();
        pot.as_mut_slice().iter_mut().for_each(|c| *c -= mean);
        Ok(WeakSolution {
            f: pot,
            gradient: OneForm { p: u1, q: u2 },
            report: WeakSolveReport {
                iterations: out.iterations,
                final_residual: out.residual,
                coercivity_used: (1.0 - mu.k()) / (1.0 + mu.k()),
                backend: self.name(),
            },
        })
    }
}
