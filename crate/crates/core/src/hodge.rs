//! Metric algebra of the conformal structure `|dz + μ dz̄|²`.
//!
//! With `a = (1+|μ|²)/(1−|μ|²)` and `b = 2μ/(1−|μ|²)` the Hodge star acts on
//! the coefficients of `p dz + q dz̄` as
//! `(p, q) ↦ (−i a p + i b̄ q, −i b p + i a q)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{
    gradient, wirtinger_dz, wirtinger_dzbar, ComplexField, DerivativeMode, GridSpec, OneForm,
    RealField,
};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// A coefficient field with `‖μ‖∞ < 1` vanishing on a boundary collar of at
/// least `n/8` cells.
#[derive(Clone, Debug)]
pub struct BeltramiCoefficient {
    mu: ComplexField,
    k: f64,
    support_margin: usize,
}

impl BeltramiCoefficient {
    pub fn new(mu: ComplexField) -> Result<Self> {
        mu.ensure_finite()?;
        let spec = *mu.spec();
        let n = spec.n();
        let k = mu.sup_norm();
        if k >= 1.0 {
            return Err(Error::InvalidBeltrami(format!("sup |mu| = {k} is not below 1")));
        }
        let mut margin = n / 2;
        for kk in 0..n {
            for j in 0..n {
                if mu.get(j, kk) != Complex64::new(0.0, 0.0) {
                    margin = margin.min(spec.ring_depth(j, kk));
                }
            }
        }
        if margin < n / 8 {
            return Err(Error::InvalidBeltrami(format!(
                "support reaches within {margin} cells of the boundary (need {})",
                n / 8
            )));
        }
        Ok(Self {
            mu,
            k,
            support_margin: margin,
        })
    }

    pub fn zero(spec: GridSpec) -> Self {
        Self {
            mu: ComplexField::zeros(spec),
            k: 0.0,
            support_margin: spec.n() / 2,
        }
    }

    pub fn field(&self) -> &ComplexField {
        &self.mu
    }

    pub fn spec(&self) -> &GridSpec {
        self.mu.spec()
    }

    /// Measured `‖μ‖∞`.
    pub fn k(&self) -> f64 {
        self.k
    }

    /// Number of all-zero rings at the boundary.
    pub fn support_margin(&self) -> usize {
        self.support_margin
    }

    pub fn is_zero(&self) -> bool {
        self.k == 0.0
    }
}

#[derive(Clone, Debug)]
pub struct MetricCoefficients {
    pub a: RealField,
    pub b: ComplexField,
    pub k: f64,
}

impl MetricCoefficients {
    /// Pointwise maxima of `|a² − |b|² − 1|` and
    /// `|a − |b| − (1−|μ|)/(1+|μ|)|`.
    pub fn identity_defects(&self, mu: &BeltramiCoefficient) -> (f64, f64) {
        let mut d1 = 0.0f64;
        let mut d2 = 0.0f64;
        for ((&a, b), m) in self
            .a
            .as_slice()
            .iter()
            .zip(self.b.as_slice())
            .zip(mu.field().as_slice())
        {
            let m = m.norm();
            d1 = d1.max((a * a - b.norm_sqr() - 1.0).abs());
            d2 = d2.max((a - b.norm() - (1.0 - m) / (1.0 + m)).abs());
        }
        (d1, d2)
    }

    /// `M (u1, u2) = (a u1 − b̄ u2, −b u1 + a u2)`, so that
    /// `i *_μ (p dz + q dz̄) = M₁ dz − M₂ dz̄`.
    pub fn apply_m(&self, u1: &ComplexField, u2: &ComplexField) -> (ComplexField, ComplexField) {
        self.apply_matrix(u1, u2, 0.0)
    }

    /// `(M − I)(u1, u2)`.
    pub fn apply_m_minus_identity(
        &self,
        u1: &ComplexField,
        u2: &ComplexField,
    ) -> (ComplexField, ComplexField) {
        self.apply_matrix(u1, u2, 1.0)
    }

    fn apply_matrix(
        &self,
        u1: &ComplexField,
        u2: &ComplexField,
        shift: f64,
    ) -> (ComplexField, ComplexField) {
        let spec = *u1.spec();
        let len = spec.len();
        let mut o1 = Vec::with_capacity(len);
        let mut o2 = Vec::with_capacity(len);
        let (a, b) = (self.a.as_slice(), self.b.as_slice());
        let (x, y) = (u1.as_slice(), u2.as_slice());
        for i in 0..len {
            let ai = a[i] - shift;
            o1.push(ai * x[i] - b[i].conj() * y[i]);
            o2.push(-b[i] * x[i] + ai * y[i]);
        }
        (
            ComplexField::from_raw(spec, o1),
            ComplexField::from_raw(spec, o2),
        )
    }
}

pub fn metric_coefficients(mu: &BeltramiCoefficient) -> MetricCoefficients {
    let spec = *mu.spec();
    let mut a = Vec::with_capacity(spec.len());
    let mut b = Vec::with_capacity(spec.len());
    for &m in mu.field().as_slice() {
        let d = 1.0 - m.norm_sqr();
        a.push((1.0 + m.norm_sqr()) / d);
        b.push(2.0 * m / d);
    }
    MetricCoefficients {
        a: RealField::from_raw(spec, a),
        b: ComplexField::from_raw(spec, b),
        k: mu.k(),
    }
}

/// Volume-form density `1 − |μ|²` (up to the constant `i/2 dz∧dz̄`).
pub fn volume_density(mu: &BeltramiCoefficient) -> RealField {
    let spec = *mu.spec();
    RealField::from_raw(
        spec,
        mu.field().as_slice().iter().map(|m| 1.0 - m.norm_sqr()).collect(),
    )
}

pub fn hodge_star_1form(omega: &OneForm, mc: &MetricCoefficients) -> Result<OneForm> {
    if omega.spec() != mc.b.spec() {
        return Err(Error::ShapeMismatch);
    }
    let spec = *omega.spec();
    let len = spec.len();
    let (a, b) = (mc.a.as_slice(), mc.b.as_slice());
    let (p, q) = (omega.p.as_slice(), omega.q.as_slice());
    let mut sp = Vec::with_capacity(len);
    let mut sq = Vec::with_capacity(len);
    for i in 0..len {
        sp.push(-I * a[i] * p[i] + I * b[i].conj() * q[i]);
        sq.push(-I * b[i] * p[i] + I * a[i] * q[i]);
    }
    Ok(OneForm {
        p: ComplexField::from_raw(spec, sp),
        q: ComplexField::from_raw(spec, sq),
    })
}

/// `d_μ f = ½(1 − i *_μ) df`.
pub fn d_mu(f: &ComplexField, mc: &MetricCoefficients, mode: DerivativeMode) -> Result<OneForm> {
    let df = gradient(f, mode)?;
    let spec = *f.spec();
    let len = spec.len();
    let (a, b) = (mc.a.as_slice(), mc.b.as_slice());
    let (fz, fzb) = (df.p.as_slice(), df.q.as_slice());
    let mut p = Vec::with_capacity(len);
    let mut q = Vec::with_capacity(len);
    for i in 0..len {
        p.push(0.5 * ((1.0 - a[i]) * fz[i] + b[i].conj() * fzb[i]));
        q.push(0.5 * ((1.0 + a[i]) * fzb[i] - b[i] * fz[i]));
    }
    Ok(OneForm {
        p: ComplexField::from_raw(spec, p),
        q: ComplexField::from_raw(spec, q),
    })
}

/// `Δ_μ f = −*_μ d *_μ df` in divergence form. Reduces to `−(∂x² + ∂y²)` at
/// `μ = 0`.
pub fn laplace_beltrami(
    f: &ComplexField,
    mc: &MetricCoefficients,
    mode: DerivativeMode,
) -> Result<ComplexField> {
    let df = gradient(f, mode)?;
    let (x, y) = mc.apply_m(&df.p, &df.q);
    // i a f_z − i b̄ f_z̄ = i x and −i b f_z + i a f_z̄ = i y
    let div = &wirtinger_dzbar(&x, mode)? + &wirtinger_dz(&y, mode)?;
    let spec = *f.spec();
    // 2 / (1 − |μ|²) = a + 1
    let out = div
        .as_slice()
        .iter()
        .zip(mc.a.as_slice())
        .map(|(&d, &a)| -(a + 1.0) * d)
        .collect();
    Ok(ComplexField::from_raw(spec, out))
}

/// `B(u, v) = Σ h² [a(u_z v̄_z + u_z̄ v̄_z̄) − b u_z v̄_z̄ − b̄ u_z̄ v̄_z]`,
/// conjugate-linear in `v`. Its diagonal is the energy
/// `∫ a(|u_z|² + |u_z̄|²) − 2 Re(b u_z ū_z̄)`.
pub fn mu_inner_product(
    u: &ComplexField,
    v: &ComplexField,
    mc: &MetricCoefficients,
    mode: DerivativeMode,
) -> Result<Complex64> {
    let du = gradient(u, mode)?;
    let dv = gradient(v, mode)?;
    Ok(inner_product_of_gradients(&du, &dv, mc))
}

pub(crate) fn inner_product_of_gradients(
    du: &OneForm,
    dv: &OneForm,
    mc: &MetricCoefficients,
) -> Complex64 {
    let w = du.spec().cell_area();
    let (a, b) = (mc.a.as_slice(), mc.b.as_slice());
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.len() {
        let (uz, uzb) = (du.p.as_slice()[i], du.q.as_slice()[i]);
        let (vz, vzb) = (dv.p.as_slice()[i].conj(), dv.q.as_slice()[i].conj());
        acc += a[i] * (uz * vz + uzb * vzb) - b[i] * uz * vzb - b[i].conj() * uzb * vz;
    }
    acc * w
}

/// `∫ dv ∧ *_μ dū`, assembled from the star and the wedge product with
/// `dz ∧ dz̄ = −2i dA`. Equals `2 B(v, u)`.
pub fn wedge_star_pairing(
    v: &ComplexField,
    u: &ComplexField,
    mc: &MetricCoefficients,
    mode: DerivativeMode,
) -> Result<Complex64> {
    let dv = gradient(v, mode)?;
    let dubar = gradient(&u.conj(), mode)?;
    let star = hodge_star_1form(&dubar, mc)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..v.spec().len() {
        acc += dv.p.as_slice()[i] * star.q.as_slice()[i] - dv.q.as_slice()[i] * star.p.as_slice()[i];
    }
    Ok(acc * Complex64::new(0.0, -2.0) * v.spec().cell_area())
}

/// `‖u_z‖₂² + ‖u_z̄‖₂²`.
pub fn energy_seminorm_sq(u: &ComplexField, mode: DerivativeMode) -> Result<f64> {
    let du = gradient(u, mode)?;
    let w = u.spec().cell_area();
    Ok(du
        .p
        .as_slice()
        .iter()
        .chain(du.q.as_slice())
        .map(|c| c.norm_sqr())
        .sum::<f64>()
        * w)
}
