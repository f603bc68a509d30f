//! The frozen-coefficient kernel `S(w, z) = 1/(π(w − z + μ(w)(w̄ − z̄)))`,
//! the twisted derivatives, and quadratures for the identities built on them.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{wirtinger_dz, wirtinger_dzbar, ComplexField, DerivativeMode, GridSpec, NORM_FLOOR};
use crate::hodge::BeltramiCoefficient;

type C = Complex64;

/// `∫∫ 1/|ζ|` over a centered square of side `h` equals `h · RIESZ_CELL`.
/// From `F(x, y) = x asinh(y/|x|) + y asinh(x/|y|)`, an antiderivative of
/// `1/|ζ|` in both variables: `4 F(½, ½) = 4 asinh(1) = 4 ln(1 + √2)`.
pub const RIESZ_CELL: f64 = 3.525_494_348_078_172;

/// Radius of the probe ring used by [`frozen_coefficient_residual`].
pub const PROBE_RADIUS: f64 = 0.5;
const PROBE_COUNT: usize = 16;

#[derive(Clone, Copy, Debug)]
pub struct KernelSample {
    pub w: C,
    pub z: C,
    pub value: C,
    /// `|S| · π(1 − k) · |w − z|`.
    pub bound_ratio: f64,
}

fn check_mu(mu_w: C) -> Result<()> {
    if !(mu_w.norm() < 1.0) {
        return Err(Error::InvalidBeltrami(format!("|mu(w)| = {} is not below 1", mu_w.norm())));
    }
    Ok(())
}

#[inline]
fn s_raw(w: C, z: C, mu_w: C) -> C {
    let d = w - z;
    1.0 / (PI * (d + mu_w * d.conj()))
}

pub fn kernel_s(w: C, z: C, mu_w: C) -> Result<C> {
    if w == z {
        return Err(Error::CoincidentPoints);
    }
    check_mu(mu_w)?;
    Ok(s_raw(w, z, mu_w))
}

/// Evaluates `S` and its bound ratio for a global `k ≥ |μ(w)|`.
pub fn kernel_sample(w: C, z: C, mu_w: C, k: f64) -> Result<KernelSample> {
    let value = kernel_s(w, z, mu_w)?;
    if !(k >= mu_w.norm() && k < 1.0) {
        return Err(Error::DomainError(format!("k = {k} must satisfy |mu(w)| <= k < 1")));
    }
    Ok(KernelSample {
        w,
        z,
        value,
        bound_ratio: value.norm() * PI * (1.0 - k) * (w - z).norm(),
    })
}

#[derive(Clone, Copy, Debug)]
pub struct BoundStats {
    pub samples: usize,
    pub max_ratio: f64,
    pub violations: usize,
}

/// Draws `(w, z)` uniformly in `[−2, 2]²` and `μ(w)` uniformly in the disk of
/// radius `k`, counting samples with `bound_ratio > 1 + 1e−12`.
pub fn sample_kernel_bound(k: f64, samples: usize, seed: u64) -> Result<BoundStats> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = BoundStats {
        samples,
        max_ratio: 0.0,
        violations: 0,
    };
    let point = |rng: &mut ChaCha8Rng| C::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    for _ in 0..samples {
        let w = point(&mut rng);
        let z = point(&mut rng);
        let r = k * rng.gen::<f64>().sqrt();
        let mu_w = C::from_polar(r, rng.gen_range(0.0..2.0 * PI));
        let s = kernel_sample(w, z, mu_w, k)?;
        stats.max_ratio = stats.max_ratio.max(s.bound_ratio);
        if s.bound_ratio > 1.0 + 1e-12 {
            stats.violations += 1;
        }
    }
    Ok(stats)
}

/// `∂z̄f − μ ∂zf`.
pub fn dbar_mu(f: &ComplexField, mu: &BeltramiCoefficient, mode: DerivativeMode) -> Result<ComplexField> {
    let fz = wirtinger_dz(f, mode)?;
    let fzb = wirtinger_dzbar(f, mode)?;
    let mfz = mu.field() * &fz;
    Ok(&fzb - &mfz)
}

/// `∂z̄f − ∂z(μ f)`.
pub fn dbar_mu_star(f: &ComplexField, mu: &BeltramiCoefficient, mode: DerivativeMode) -> Result<ComplexField> {
    let fzb = wirtinger_dzbar(f, mode)?;
    let dmf = wirtinger_dz(&(mu.field() * f), mode)?;
    Ok(&fzb - &dmf)
}

/// `|∫(∂^μ f)g + ∫ f(∂^{μ*} g)| / (‖∂^μ f‖₂‖g‖₂ + ‖f‖₂‖∂^{μ*}g‖₂)`.
///
/// Integration by parts moves the derivative with a sign flip, so the two
/// pairings cancel for compactly supported `f`, `g`.
pub fn adjointness_defect(
    f: &ComplexField,
    g: &ComplexField,
    mu: &BeltramiCoefficient,
    mode: DerivativeMode,
) -> Result<f64> {
    let df = dbar_mu(f, mu, mode)?;
    let dg = dbar_mu_star(g, mu, mode)?;
    let area = f.spec().cell_area();
    let pair = |a: &ComplexField, b: &ComplexField| -> C {
        a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x * y).sum::<C>() * area
    };
    let lhs = pair(&df, g) + pair(f, &dg);
    let scale = df.l2_norm() * g.l2_norm() + f.l2_norm() * dg.l2_norm();
    Ok(lhs.norm() / (scale + NORM_FLOOR))
}

fn ring(w: C) -> impl Iterator<Item = C> {
    (0..PROBE_COUNT).map(move |i| w + C::from_polar(PROBE_RADIUS, 2.0 * PI * (i as f64 + 0.5) / PROBE_COUNT as f64))
}

/// Central differences in `z` of `∂z̄S − μ(w)∂zS` on a ring of radius
/// [`PROBE_RADIUS`] around `w`; returns `max |residual| · |w − z|²`.
pub fn frozen_coefficient_residual(w: C, mu_w: C, probe_spacing: f64) -> Result<f64> {
    check_mu(mu_w)?;
    if !(probe_spacing > 0.0 && 10.0 * probe_spacing <= PROBE_RADIUS) {
        return Err(Error::DomainError(format!(
            "probe spacing must lie in (0, {}], got {probe_spacing}",
            PROBE_RADIUS / 10.0
        )));
    }
    let e = probe_spacing;
    let i = C::new(0.0, 1.0);
    let s = |z: C| s_raw(w, z, mu_w);
    Ok(ring(w)
        .map(|z| {
            let sx = (s(z + e) - s(z - e)) / (2.0 * e);
            let sy = (s(z + i * e) - s(z - i * e)) / (2.0 * e);
            let sz = 0.5 * (sx - i * sy);
            let szb = 0.5 * (sx + i * sy);
            (szb - mu_w * sz).norm() * (w - z).norm_sqr()
        })
        .fold(0.0, f64::max))
}

/// As [`frozen_coefficient_residual`] with `∂zS = πS²`, `∂z̄S = μ(w)πS²`.
pub fn frozen_coefficient_residual_exact(w: C, mu_w: C) -> Result<f64> {
    check_mu(mu_w)?;
    Ok(ring(w)
        .map(|z| {
            let s = s_raw(w, z, mu_w);
            let sz = PI * s * s;
            let szb = mu_w * PI * s * s;
            (szb - mu_w * sz).norm() * (w - z).norm_sqr()
        })
        .fold(0.0, f64::max))
}

/// Cell containing `z` with all four neighbours inside the grid.
fn interior_cell(spec: &GridSpec, z: C) -> Result<(usize, usize)> {
    let n = spec.n();
    match spec.cell_of(z) {
        Some((j, k)) if j > 0 && k > 0 && j + 1 < n && k + 1 < n => Ok((j, k)),
        _ => Err(Error::PointOutsideGrid(format!("{z} has no interior cell"))),
    }
}

// Parallel maps are collected in index order before summing so results do
// not depend on thread scheduling.

/// `h² Σ_{w ≠ skip} weight(w) · S(w, ζ)` with `μ` taken at `w`.
fn potential(phi: &[C], mu: &[C], spec: &GridSpec, zeta: C, skip: usize) -> C {
    let area = spec.cell_area();
    (0..spec.len())
        .into_par_iter()
        .filter(|&i| i != skip && phi[i] != C::new(0.0, 0.0))
        .map(|i| phi[i] * s_raw(spec.point_at(i), zeta, mu[i]))
        .collect::<Vec<C>>()
        .into_iter()
        .sum::<C>()
        * area
}

/// `∫ φ(w) ∂^{μ*}_z S(w, z) dw − φ(z) − ∂^{μ*}_z ∫ φ(w) S(w, z) dw`.
///
/// `z` is snapped to its cell center. The left side is a midpoint sum that
/// skips the cell of `z`; the right side differentiates the potential by
/// central differences on the grid stencil around `z`.
pub fn green_identity_residual(phi: &ComplexField, mu: &BeltramiCoefficient, z: C) -> Result<C> {
    let spec = *phi.spec();
    if mu.spec() != &spec {
        return Err(Error::ShapeMismatch);
    }
    let (j, k) = interior_cell(&spec, z)?;
    let z = spec.point(j, k);
    let zi = spec.index(j, k);
    let m = mu.field().as_slice();
    let p = phi.as_slice();
    let h = spec.spacing();
    let muz = wirtinger_dz(mu.field(), DerivativeMode::Central)?.as_slice()[zi];
    let mz = m[zi];

    let lhs = (0..spec.len())
        .into_par_iter()
        .filter(|&i| i != zi && p[i] != C::new(0.0, 0.0))
        .map(|i| {
            let s = s_raw(spec.point_at(i), z, m[i]);
            p[i] * ((m[i] - mz) * PI * s * s - muz * s)
        })
        .collect::<Vec<C>>()
        .into_iter()
        .sum::<C>()
        * spec.cell_area();

    let pot = |jj: usize, kk: usize| potential(p, m, &spec, spec.point(jj, kk), spec.index(jj, kk));
    let mpot = |jj: usize, kk: usize| m[spec.index(jj, kk)] * pot(jj, kk);
    let i = C::new(0.0, 1.0);
    let wirt = |e: C, w: C, n: C, s: C| -> (C, C) {
        let dx = (e - w) / (2.0 * h);
        let dy = (n - s) / (2.0 * h);
        (0.5 * (dx - i * dy), 0.5 * (dx + i * dy))
    };
    let (_, vzb) = wirt(pot(j + 1, k), pot(j - 1, k), pot(j, k + 1), pot(j, k - 1));
    let (mvz, _) = wirt(mpot(j + 1, k), mpot(j - 1, k), mpot(j, k + 1), mpot(j, k - 1));
    let rhs = p[zi] + vzb - mvz;
    Ok(lhs - rhs)
}

/// `∫ g ∂^{μ*}_z(ρ S(w, ·)) + ∫ F ρ S(w, ·)` at the cell center nearest `w`.
///
/// Fails unless `‖ρ(∂^μ g − F)‖₂ ≤ precondition_tol · ‖ρ F‖₂` (or `‖F‖`
/// vanishes and the residual is below `precondition_tol`).
pub fn representation_reconstruct(
    g: &ComplexField,
    f: &ComplexField,
    mu: &BeltramiCoefficient,
    rho: &ComplexField,
    w: C,
    precondition_tol: f64,
) -> Result<C> {
    let spec = *g.spec();
    if f.spec() != &spec || rho.spec() != &spec || mu.spec() != &spec {
        return Err(Error::ShapeMismatch);
    }
    let (jw, kw) = interior_cell(&spec, w)?;
    let wi = spec.index(jw, kw);
    let w = spec.point(jw, kw);

    let dg = dbar_mu(g, mu, DerivativeMode::Central)?;
    let defect = (&dg - f).zip_map(rho, |d, r| d * r).l2_norm();
    let scale = f.zip_map(rho, |a, r| a * r).l2_norm();
    let residual = if scale > NORM_FLOOR { defect / scale } else { defect };
    if residual > precondition_tol {
        return Err(Error::PreconditionResidualTooLarge {
            residual,
            tol: precondition_tol,
        });
    }

    let m = mu.field().as_slice();
    let muz = wirtinger_dz(mu.field(), DerivativeMode::Central)?;
    let rz = wirtinger_dz(rho, DerivativeMode::Central)?;
    let rzb = wirtinger_dzbar(rho, DerivativeMode::Central)?;
    let mu_w = m[wi];
    let (gs, fs, rs) = (g.as_slice(), f.as_slice(), rho.as_slice());
    let (muz, rz, rzb) = (muz.as_slice(), rz.as_slice(), rzb.as_slice());
    let total = (0..spec.len())
        .into_par_iter()
        .filter(|&i| i != wi)
        .map(|i| {
            let s = s_raw(w, spec.point_at(i), mu_w);
            let kern = rs[i] * ((mu_w - m[i]) * PI * s * s - muz[i] * s) + s * (rzb[i] - m[i] * rz[i]);
            gs[i] * kern + fs[i] * rs[i] * s
        })
        .collect::<Vec<C>>()
        .into_iter()
        .sum::<C>();
    Ok(total * spec.cell_area())
}

fn riesz_antiderivative(x: f64, y: f64) -> f64 {
    let term = |a: f64, b: f64| if a == 0.0 { 0.0 } else { a * (b / a.abs()).asinh() };
    term(x, y) + term(y, x)
}

/// Exact `∫∫ 1/|ζ − w|` over the axis-aligned cell centered at `c`.
fn riesz_cell(c: C, w: C, h: f64) -> f64 {
    let (x1, x2) = (c.re - w.re - 0.5 * h, c.re - w.re + 0.5 * h);
    let (y1, y2) = (c.im - w.im - 0.5 * h, c.im - w.im + 0.5 * h);
    riesz_antiderivative(x2, y2) - riesz_antiderivative(x1, y2) - riesz_antiderivative(x2, y1)
        + riesz_antiderivative(x1, y1)
}

/// Fraction of the cell centered at `c` lying in `B(0, R)`.
fn coverage(c: C, h: f64, r: f64) -> f64 {
    let half = 0.5 * h * std::f64::consts::SQRT_2;
    let d = c.norm();
    if d + half <= r {
        return 1.0;
    }
    if d - half >= r {
        return 0.0;
    }
    const SUB: usize = 16;
    let mut inside = 0;
    for a in 0..SUB {
        for b in 0..SUB {
            let p = c + C::new(
                ((a as f64 + 0.5) / SUB as f64 - 0.5) * h,
                ((b as f64 + 0.5) / SUB as f64 - 0.5) * h,
            );
            if p.norm() < r {
                inside += 1;
            }
        }
    }
    inside as f64 / (SUB * SUB) as f64
}

/// `∫_{B(0,R)} |u(z)| / |w − z| dz`.
///
/// Midpoint rule weighted by each cell's coverage of the ball; cells within
/// two cells of `w` use the exact integral of `1/|ζ − w|` over the square.
pub fn riesz_potential(u: &ComplexField, r: f64, w: C) -> Result<f64> {
    let spec = *u.spec();
    if !(r > 0.0) || r > spec.half_width() {
        return Err(Error::BallOutsideGrid { radius: r });
    }
    let h = spec.spacing();
    let us = u.as_slice();
    let total = (0..spec.len())
        .into_par_iter()
        .map(|i| {
            let c = spec.point_at(i);
            let cov = coverage(c, h, r);
            if cov == 0.0 || us[i].norm() == 0.0 {
                return 0.0;
            }
            let d = c - w;
            let near = d.re.abs() < 2.5 * h && d.im.abs() < 2.5 * h;
            let cell = if near { riesz_cell(c, w, h) } else { h * h / d.norm() };
            cov * us[i].norm() * cell
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .sum::<f64>();
    Ok(total)
}

/// `(1 − |z − c|²/R²)^m` inside the disk, `0` outside.
pub fn bump(spec: GridSpec, center: C, radius: f64, power: i32) -> ComplexField {
    ComplexField::from_fn(spec, |z| {
        let s2 = (z - center).norm_sqr() / (radius * radius);
        C::new(if s2 < 1.0 { (1.0 - s2).powi(power) } else { 0.0 }, 0.0)
    })
}

/// `C¹` cutoff: `1` on `|z| ≤ r1`, `0` on `|z| ≥ r2`, smoothstep between.
pub fn smoothstep_cutoff(spec: GridSpec, r1: f64, r2: f64) -> ComplexField {
    ComplexField::from_fn(spec, |z| {
        let t = ((z.norm() - r1) / (r2 - r1)).clamp(0.0, 1.0);
        C::new(1.0 - t * t * (3.0 - 2.0 * t), 0.0)
    })
}
