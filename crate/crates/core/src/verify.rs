//! Independent checks on solved maps and the report they are collected in.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{holder_seminorm, l2_norm, wirtinger_dz, wirtinger_dzbar, ComplexField, DerivativeMode, GridSpec};
use crate::hodge::{energy_seminorm_sq, metric_coefficients, mu_inner_product, BeltramiCoefficient};
use crate::kernel::{bump, green_identity_residual, sample_kernel_bound};
use crate::neumann::holder_constant;
use crate::operators::{beurling_transform, operator_isometry_defect, OperatorConfig};
use crate::solution::QCMapSolution;
use crate::solver::{SolveParams, SolverRegistry};

/// Returned by [`beltrami_residual`] when `∂zΦ` vanishes identically.
pub const MAX_RESIDUAL: f64 = f64::MAX;

/// Relative size below which `|Φ_z|` counts as degenerate.
const DERIVATIVE_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    AtMost,
    Below,
    Above,
}

impl Relation {
    fn holds(self, measured: f64, threshold: f64) -> bool {
        match self {
            Self::AtMost => measured <= threshold,
            Self::Below => measured < threshold,
            Self::Above => measured > threshold,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckEntry {
    pub id: String,
    pub measured: f64,
    pub threshold: f64,
    pub relation: Relation,
    pub pass: bool,
    /// Grid size the check ran on.
    pub n: usize,
}

#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub entries: Vec<CheckEntry>,
    pub thresholds_version: &'static str,
}

impl VerifyReport {
    pub fn new(thresholds: &Thresholds) -> Self {
        Self {
            entries: Vec::new(),
            thresholds_version: thresholds.version,
        }
    }

    pub fn push(&mut self, id: impl Into<String>, measured: f64, threshold: f64, relation: Relation, n: usize) {
        self.entries.push(CheckEntry {
            id: id.into(),
            measured,
            threshold,
            relation,
            pass: relation.holds(measured, threshold),
            n,
        });
    }

    pub fn extend(&mut self, other: VerifyReport) {
        self.entries.extend(other.entries);
    }

    pub fn get(&self, id: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn failures(&self) -> usize {
        self.entries.iter().filter(|e| !e.pass).count()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(
                f,
                "check {} measured={:e} threshold={:e} pass={}",
                e.id, e.measured, e.threshold, e.pass as u8
            )?;
        }
        let grids: Vec<String> = {
            let mut ns: Vec<usize> = self.entries.iter().map(|e| e.n).collect();
            ns.sort_unstable();
            ns.dedup();
            ns.iter().map(|n| n.to_string()).collect()
        };
        writeln!(
            f,
            "summary checks={} failed={} pass={} grids={} thresholds=v{}",
            self.entries.len(),
            self.failures(),
            self.passed() as u8,
            if grids.is_empty() { "-".to_string() } else { grids.join(",") },
            self.thresholds_version
        )
    }
}

/// Default thresholds. Grid-dependent values are calibrated for `n ≥ 64`
/// with the central derivative mode.
#[derive(Clone, Copy, Debug)]
pub struct Thresholds {
    pub version: &'static str,
    pub beltrami_residual: f64,
    /// `formula_defect ≤ factor · beltrami_residual + 1e−12`.
    pub jacobian_formula_factor: f64,
    pub isothermal: f64,
    pub holder_slack: f64,
    pub holder_pairs: usize,
    pub kernel_samples: usize,
    /// `|Green residual| / ‖φ‖∞`.
    pub green_identity: f64,
    pub coercivity_slack: f64,
    pub coercivity_samples: usize,
    pub isometry: f64,
    pub cross_solver: f64,
    pub seed: u64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            version: "1",
            beltrami_residual: 1e-2,
            jacobian_formula_factor: 5.0,
            isothermal: 0.1,
            holder_slack: 1.05,
            holder_pairs: 20_000,
            kernel_samples: 100_000,
            green_identity: 2e-2,
            coercivity_slack: 1e-10,
            coercivity_samples: 20,
            isometry: 5e-2,
            cross_solver: 2e-2,
            seed: 20,
        }
    }
}

/// `‖∂z̄Φ − μ∂zΦ‖₂ / ‖∂zΦ‖₂` with both derivatives recomputed from `Φ`.
pub fn beltrami_residual(sol: &QCMapSolution, mu: &BeltramiCoefficient, mode: DerivativeMode) -> Result<f64> {
    let pz = wirtinger_dz(&sol.phi, mode)?;
    let pzb = wirtinger_dzbar(&sol.phi, mode)?;
    let denom = l2_norm(&pz);
    let num = l2_norm(&(&pzb - &(mu.field() * &pz)));
    if denom <= DERIVATIVE_FLOOR * num || denom == 0.0 {
        return Ok(if num == 0.0 { 0.0 } else { MAX_RESIDUAL });
    }
    Ok(num / denom)
}

#[derive(Clone, Copy, Debug)]
pub struct JacobianCheck {
    pub min_j: f64,
    /// `max |J − |Φ_z|²(1 − |μ|²)| / max(max J, floor)` on the stored derivatives.
    pub formula_defect: f64,
}

pub fn jacobian_check(sol: &QCMapSolution, mu: &BeltramiCoefficient) -> JacobianCheck {
    let j = sol.jacobian.as_slice();
    let pz = sol.phi_z.as_slice();
    let m = mu.field().as_slice();
    let scale = j.iter().copied().fold(0.0, f64::max).max(1e-300);
    let defect = j
        .iter()
        .zip(pz)
        .zip(m)
        .map(|((j, p), m)| (j - p.norm_sqr() * (1.0 - m.norm_sqr())).abs())
        .fold(0.0, f64::max);
    JacobianCheck {
        min_j: sol.min_jacobian(),
        formula_defect: defect / scale,
    }
}

/// `sup |Φ_z̄/Φ_z − μ|` with recomputed derivatives.
pub fn isothermal_check(sol: &QCMapSolution, mu: &BeltramiCoefficient, mode: DerivativeMode) -> Result<f64> {
    let pz = wirtinger_dz(&sol.phi, mode)?;
    let pzb = wirtinger_dzbar(&sol.phi, mode)?;
    let floor = DERIVATIVE_FLOOR * pz.sup_norm().max(pzb.sup_norm());
    let count = pz.as_slice().iter().filter(|c| !(c.norm() > floor)).count();
    if count > 0 {
        return Err(Error::DegenerateDerivative { count });
    }
    Ok(pz
        .as_slice()
        .iter()
        .zip(pzb.as_slice())
        .zip(mu.field().as_slice())
        .map(|((a, b), m)| (b / a - m).norm())
        .fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug)]
pub struct HolderCheckConfig {
    pub pairs: usize,
    pub seed: u64,
    pub slack: f64,
    pub operator: OperatorConfig,
}

impl Default for HolderCheckConfig {
    fn default() -> Self {
        let t = Thresholds::default();
        Self {
            pairs: t.holder_pairs,
            seed: t.seed,
            slack: t.holder_slack,
            operator: OperatorConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct HolderLemma {
    /// Measured seminorm of `Hμ`.
    pub lhs: f64,
    /// `C_α · A`, `A` the measured seminorm of `μ`.
    pub rhs: f64,
    pub pass: bool,
}

pub fn holder_lemma_check(mu: &BeltramiCoefficient, alpha: f64, cfg: &HolderCheckConfig) -> Result<HolderLemma> {
    let c = holder_constant(alpha)?;
    let a = holder_seminorm(mu.field(), alpha, cfg.pairs, cfg.seed)?;
    let hmu = beurling_transform(mu.field(), &cfg.operator)?.field;
    let lhs = holder_seminorm(&hmu, alpha, cfg.pairs, cfg.seed)?;
    let rhs = c * a;
    Ok(HolderLemma {
        lhs,
        rhs,
        pass: lhs <= rhs * cfg.slack,
    })
}

/// Sum of 1 to 4 seeded bumps with random complex amplitudes, centers in
/// `|z| < 0.6` and radii in `[0.3, 0.8)`.
pub fn random_smooth_compact(spec: GridSpec, rng: &mut impl Rng) -> ComplexField {
    let count = rng.gen_range(1..=4);
    let mut u = ComplexField::zeros(spec);
    for _ in 0..count {
        let c = Complex64::from_polar(0.6 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
        let r = rng.gen_range(0.3..0.8);
        let amp = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        u = &u + &bump(spec, c, r, 4).scale(amp);
    }
    u
}

#[derive(Clone, Copy, Debug)]
pub struct CoercivityStats {
    pub samples: usize,
    /// `min (B(u,u) / ‖du‖² − (1−k)/(1+k))`.
    pub min_margin: f64,
    pub violations: usize,
}

/// Samples `B(u, u) ≥ ((1−k)/(1+k) − slack) · ‖du‖²` on random smooth `u`.
pub fn coercivity_check(
    mu: &BeltramiCoefficient,
    samples: usize,
    seed: u64,
    slack: f64,
    mode: DerivativeMode,
) -> Result<CoercivityStats> {
    let spec = *mu.spec();
    let mc = metric_coefficients(mu);
    let bound = (1.0 - mu.k()) / (1.0 + mu.k());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = CoercivityStats {
        samples,
        min_margin: f64::INFINITY,
        violations: 0,
    };
    for _ in 0..samples {
        let u = random_smooth_compact(spec, &mut rng);
        let semi = energy_seminorm_sq(&u, mode)?;
        let form = mu_inner_product(&u, &u, &mc, mode)?.re;
        stats.min_margin = stats.min_margin.min(form / semi - bound);
        if form < (bound - slack) * semi {
            stats.violations += 1;
        }
    }
    Ok(stats)
}

/// `sup |Φ_a − Φ_b|` between two normalized solutions on the same grid.
pub fn solution_disagreement(a: &QCMapSolution, b: &QCMapSolution) -> Result<f64> {
    if a.phi.spec() != b.phi.spec() {
        return Err(Error::ShapeMismatch);
    }
    Ok((&a.phi - &b.phi).sup_norm())
}

/// Solves with `first` and `second` at each level and records their
/// normalized disagreement plus the largest ratio between successive levels.
#[allow(clippy::too_many_arguments)]
pub fn cross_solver_check(
    make_mu: &dyn Fn(GridSpec) -> Result<BeltramiCoefficient>,
    half_width: f64,
    levels: &[usize],
    tol: f64,
    registry: &SolverRegistry,
    first: &str,
    second: &str,
    params: &SolveParams,
) -> Result<VerifyReport> {
    let thresholds = Thresholds::default();
    let mut report = VerifyReport::new(&thresholds);
    let mut values = Vec::with_capacity(levels.len());
    for &n in levels {
        let spec = GridSpec::new(n, half_width)?;
        let mu = make_mu(spec)?;
        let a = registry.solve(first, &mu, params)?;
        let b = registry.solve(second, &mu, params)?;
        let d = solution_disagreement(&a, &b)?;
        report.push(format!("cross_solver_n{n}"), d, tol, Relation::AtMost, n);
        values.push((n, d));
    }
    if values.len() > 1 {
        let ratio = values
            .windows(2)
            .map(|w| if w[0].1 <= 1e-14 && w[1].1 <= 1e-14 { 0.0 } else { w[1].1 / w[0].1 })
            .fold(0.0, f64::max);
        report.push("cross_solver_decrease", ratio, 1.0, Relation::Below, values.last().unwrap().0);
    }
    Ok(report)
}

/// Checks on a single solved map: Beltrami residual, Jacobian sign and
/// formula, isothermal defect.
pub fn core_suite(
    sol: &QCMapSolution,
    mu: &BeltramiCoefficient,
    mode: DerivativeMode,
    thresholds: &Thresholds,
) -> Result<VerifyReport> {
    let n = mu.spec().n();
    let mut r = VerifyReport::new(thresholds);
    let res = beltrami_residual(sol, mu, mode)?;
    r.push("beltrami_residual", res, thresholds.beltrami_residual, Relation::AtMost, n);
    let jac = jacobian_check(sol, mu);
    r.push("min_jacobian", jac.min_j, 0.0, Relation::Above, n);
    r.push(
        "jacobian_formula_defect",
        jac.formula_defect,
        thresholds.jacobian_formula_factor * res.min(1.0) + 1e-12,
        Relation::AtMost,
        n,
    );
    match isothermal_check(sol, mu, mode) {
        Ok(v) => r.push("isothermal", v, thresholds.isothermal, Relation::AtMost, n),
        Err(Error::DegenerateDerivative { count }) => {
            r.push("isothermal_degenerate_cells", count as f64, 0.0, Relation::AtMost, n)
        }
        Err(e) => return Err(e),
    }
    Ok(r)
}

/// Inputs for [`full_suite`]. `make_mu` resamples the coefficient on other
/// grids for the cross-solver levels; with `None` only `spec` is used.
pub struct FullSuiteInput<'a> {
    pub mu: &'a BeltramiCoefficient,
    pub make_mu: Option<&'a dyn Fn(GridSpec) -> Result<BeltramiCoefficient>>,
    pub registry: &'a SolverRegistry,
    pub method: &'a str,
    pub params: SolveParams,
    pub thresholds: Thresholds,
}

/// Core checks on both solvers plus the Green identity, kernel bound,
/// Hölder lemma, coercivity, isometry and cross-solver agreement.
pub fn full_suite(input: &FullSuiteInput<'_>) -> Result<VerifyReport> {
    let mu = input.mu;
    let t = &input.thresholds;
    let spec = *mu.spec();
    let n = spec.n();
    let mode = input.params.mode;
    let mut r = VerifyReport::new(t);

    let sol = input.registry.solve(input.method, mu, &input.params)?;
    r.extend(core_suite(&sol, mu, mode, t)?);

    let phi = bump(spec, Complex64::new(0.1, 0.05), 0.6, 4);
    let green = green_identity_residual(&phi, mu, Complex64::new(0.2, 0.1))?.norm() / phi.sup_norm();
    r.push("green_identity", green, t.green_identity, Relation::AtMost, n);

    let k = mu.k().max(0.5).min(0.99);
    let kb = sample_kernel_bound(k, t.kernel_samples, t.seed)?;
    r.push("kernel_bound_violations", kb.violations as f64, 0.0, Relation::AtMost, n);
    r.push("kernel_bound_max_ratio", kb.max_ratio, 1.0 + 1e-12, Relation::AtMost, n);

    let hcfg = HolderCheckConfig {
        pairs: t.holder_pairs,
        seed: t.seed,
        slack: t.holder_slack,
        operator: input.params.operator,
    };
    for alpha in [0.3, 0.5, 0.7] {
        let h = holder_lemma_check(mu, alpha, &hcfg)?;
        r.push(format!("holder_lemma_a{alpha}"), h.lhs, h.rhs * t.holder_slack, Relation::AtMost, n);
    }

    let co = coercivity_check(mu, t.coercivity_samples, t.seed, t.coercivity_slack, mode)?;
    r.push("coercivity_violations", co.violations as f64, 0.0, Relation::AtMost, n);

    if !mu.is_zero() {
        let iso = operator_isometry_defect(mu.field(), &input.params.operator)?;
        r.push("isometry_defect", iso, t.isometry, Relation::AtMost, n);
    } else {
        let probe = bump(spec, Complex64::new(0.0, 0.0), 1.0, 4);
        let iso = operator_isometry_defect(&probe, &input.params.operator)?;
        r.push("isometry_defect", iso, t.isometry, Relation::AtMost, n);
    }

    let others: Vec<&str> = input
        .registry
        .names()
        .into_iter()
        .filter(|name| *name != input.method && *name != "variational-box")
        .collect();
    let second = others.first().copied().unwrap_or(input.method);
    let fixed = |s: GridSpec| -> Result<BeltramiCoefficient> {
        if s == spec {
            Ok(mu.clone())
        } else {
            Err(Error::ShapeMismatch)
        }
    };
    let levels: Vec<usize> = match input.make_mu {
        Some(_) if n >= 128 => vec![n / 2, n],
        _ => vec![n],
    };
    let make: &dyn Fn(GridSpec) -> Result<BeltramiCoefficient> = match input.make_mu {
        Some(f) => f,
        None => &fixed,
    };
    r.extend(cross_solver_check(
        make,
        spec.half_width(),
        &levels,
        t.cross_solver,
        input.registry,
        input.method,
        second,
        &input.params,
    )?);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solution::SolverMeta;

    #[test]
    fn report_format() {
        let t = Thresholds::default();
        let mut r = VerifyReport::new(&t);
        r.push("a", 0.5, 1.0, Relation::AtMost, 64);
        r.push("b", 2.0, 1.0, Relation::AtMost, 64);
        let s = r.to_string();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "check a measured=5e-1 threshold=1e0 pass=1");
        assert_eq!(lines[1], "check b measured=2e0 threshold=1e0 pass=0");
        assert_eq!(lines[2], "summary checks=2 failed=1 pass=0 grids=64 thresholds=v1");
    }

    #[test]
    fn anti_conformal_map_is_rejected() {
        let s = GridSpec::new(32, 2.0).unwrap();
        let mu = BeltramiCoefficient::zero(s);
        let conj = QCMapSolution::from_phi(ComplexField::from_fn(s, |z| z.conj()), DerivativeMode::Central).unwrap();
        assert_eq!(beltrami_residual(&conj, &mu, DerivativeMode::Central).unwrap(), MAX_RESIDUAL);
        assert_eq!(jacobian_check(&conj, &mu).min_j, -1.0);
        assert!(matches!(
            isothermal_check(&conj, &mu, DerivativeMode::Central),
            Err(Error::DegenerateDerivative { .. })
        ));
    }

    #[test]
    fn identity_passes_core() {
        let s = GridSpec::new(32, 2.0).unwrap();
        let mu = BeltramiCoefficient::zero(s);
        let id = QCMapSolution::from_parts(
            ComplexField::from_fn(s, |z| z),
            ComplexField::constant(s, Complex64::new(1.0, 0.0)),
            ComplexField::zeros(s),
            SolverMeta::new("identity"),
        );
        let r = core_suite(&id, &mu, DerivativeMode::Central, &Thresholds::default()).unwrap();
        assert!(r.passed(), "{r}");
        assert!(r.entries.iter().filter(|e| e.id != "min_jacobian").all(|e| e.measured <= 1e-14));
    }
}
