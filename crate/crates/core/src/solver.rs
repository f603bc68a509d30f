//! Named solution strategies, selectable at runtime.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::DerivativeMode;
use crate::hodge::BeltramiCoefficient;
use crate::neumann::{neumann_map, NeumannConfig};
use crate::operators::OperatorConfig;
use crate::solution::{normalize, QCMapSolution};
use crate::variational::{variational_map, BoxNaturalWeakSolver, FreeSpaceWeakSolver, VariationalConfig, WeakSolver};

#[derive(Clone, Copy, Debug)]
pub struct SolveParams {
    pub tol: f64,
    pub max_iter: usize,
    pub mode: DerivativeMode,
    pub operator: OperatorConfig,
    /// Largest accepted relative curl for forms that are integrated.
    pub tol_closed: f64,
}

impl Default for SolveParams {
    fn default() -> Self {
        let v = VariationalConfig::default();
        Self {
            tol: 1e-10,
            max_iter: 2000,
            mode: v.mode,
            operator: OperatorConfig::default(),
            tol_closed: v.tol_closed,
        }
    }
}

/// Produces the normalized solution `Φ(0) = 0`, `Φ(1) = 1`.
pub trait BeltramiSolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, mu: &BeltramiCoefficient, params: &SolveParams) -> Result<QCMapSolution>;
}

pub struct NeumannSolver;

impl BeltramiSolver for NeumannSolver {
    fn name(&self) -> &'static str {
        "neumann"
    }

    fn solve(&self, mu: &BeltramiCoefficient, params: &SolveParams) -> Result<QCMapSolution> {
        let cfg = NeumannConfig {
            operator: params.operator,
            tol: params.tol,
            max_iter: params.max_iter,
        };
        normalize(&neumann_map(mu, &cfg)?)
    }
}

/// The weak Hodge-star pipeline over a pluggable weak-equation backend.
pub struct VariationalSolver {
    name: &'static str,
    backend: Box<dyn WeakSolver>,
}

impl VariationalSolver {
    pub fn new(name: &'static str, backend: Box<dyn WeakSolver>) -> Self {
        Self { name, backend }
    }
}

impl BeltramiSolver for VariationalSolver {
    fn name(&self) -> &'static str {
        self.name
    }

    fn solve(&self, mu: &BeltramiCoefficient, params: &SolveParams) -> Result<QCMapSolution> {
        let cfg = VariationalConfig {
            tol: params.tol,
            max_iter: params.max_iter,
            tol_closed: params.tol_closed,
            mode: params.mode,
        };
        normalize(&variational_map(mu, &cfg, self.backend.as_ref())?)
    }
}

#[derive(Clone)]
pub struct SolverRegistry {
    solvers: BTreeMap<&'static str, Arc<dyn BeltramiSolver>>,
}

impl SolverRegistry {
    pub fn empty() -> Self {
        Self {
            solvers: BTreeMap::new(),
        }
    }

    /// `neumann`, `variational` (free-space backend) and `variational-box`.
    pub fn with_defaults() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(NeumannSolver));
        r.register(Arc::new(VariationalSolver::new("variational", Box::new(FreeSpaceWeakSolver::new()))));
        r.register(Arc::new(VariationalSolver::new("variational-box", Box::new(BoxNaturalWeakSolver))));
        r
    }

    /// Replaces any solver registered under the same name.
    pub fn register(&mut self, solver: Arc<dyn BeltramiSolver>) {
        self.solvers.insert(solver.name(), solver);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.solvers.keys().copied().collect()
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn BeltramiSolver>> {
        self.solvers.get(name).cloned().ok_or_else(|| Error::UnknownStrategy {
            name: name.to_string(),
            available: self.names().join(", "),
        })
    }

    pub fn solve(&self, name: &str, mu: &BeltramiCoefficient, params: &SolveParams) -> Result<QCMapSolution> {
        self.get(name)?.solve(mu, params)
    }
}

impl Default for SolverRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}
