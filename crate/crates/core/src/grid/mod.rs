//! Cell-centered uniform grids on the square `[-L, L]²` and the complex
//! fields that live on them.
//!
//! Sample `(j, k)` sits at `(-L + (j + ½)h) + i(-L + (k + ½)h)` with
//! `h = 2L / n`; storage is row-major with `j` (the real axis) fastest.
//! No sample ever lands on `0` or on the box boundary.

mod antiderivative;
mod cgrid;
mod derivative;
mod norms;

pub use antiderivative::{antiderivative, curl_residual, integrate_paths, Antiderivative};
pub use cgrid::{load_cgrid, read_cgrid, save_cgrid, write_cgrid};
pub use derivative::{
    gradient, partial_x, partial_y, wirtinger_dz, wirtinger_dzbar, DerivativeMode,
};
pub use norms::{holder_seminorm, l2_norm, sup_norm};

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Floor added to denominators of relative residuals.
pub const NORM_FLOOR: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    n: usize,
    half_width: f64,
}

impl GridSpec {
    pub fn new(n: usize, half_width: f64) -> Result<Self> {
        if n < 16 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "n must be even and at least 16 (got {n})"
            )));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half-width must be positive (got {half_width})"
            )));
        }
        Ok(Self { n, half_width })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    #[inline]
    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, j: usize, k: usize) -> usize {
        k * self.n + j
    }

    #[inline]
    pub fn coord(&self, j: usize) -> f64 {
        -self.half_width + (j as f64 + 0.5) * self.spacing()
    }

    #[inline]
    pub fn point(&self, j: usize, k: usize) -> Complex64 {
        Complex64::new(self.coord(j), self.coord(k))
    }

    pub fn point_at(&self, index: usize) -> Complex64 {
        self.point(index % self.n, index / self.n)
    }

    /// The cell whose center is closest to `0`. With `n` even the four
    /// central cells tie; the one in the first quadrant is used.
    pub fn origin_cell(&self) -> (usize, usize) {
        (self.n / 2, self.n / 2)
    }

    /// Cell containing `z`, or `None` outside the box.
    pub fn cell_of(&self, z: Complex64) -> Option<(usize, usize)> {
        let h = self.spacing();
        let x = (z.re + self.half_width) / h;
        let y = (z.im + self.half_width) / h;
        if !(x >= 0.0 && y >= 0.0 && x < self.n as f64 && y < self.n as f64) {
            return None;
        }
        Some((x as usize, y as usize))
    }

    /// Index of the outer ring of width `width` that contains cell `(j, k)`,
    /// counted from 0 at the boundary.
    pub fn ring_depth(&self, j: usize, k: usize) -> usize {
        let n = self.n - 1;
        j.min(k).min(n - j).min(n - k)
    }
}

/// Complex samples on a [`GridSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField {
    spec: GridSpec,
    data: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(spec: GridSpec, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != spec.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} samples, got {}",
                spec.len(),
                data.len()
            )));
        }
        let field = Self { spec, data };
        field.ensure_finite()?;
        Ok(field)
    }

    pub(crate) fn from_raw(spec: GridSpec, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), spec.len());
        Self { spec, data }
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self::constant(spec, Complex64::new(0.0, 0.0))
    }

    pub fn constant(spec: GridSpec, value: Complex64) -> Self {
        Self {
            spec,
            data: vec![value; spec.len()],
        }
    }

    /// Samples `f` at every cell center.
    pub fn from_fn(spec: GridSpec, f: impl Fn(Complex64) -> Complex64) -> Self {
        let n = spec.n();
        let data = (0..spec.len())
            .map(|i| f(spec.point(i % n, i / n)))
            .collect();
        Self { spec, data }
    }

    pub fn ensure_finite(&self) -> Result<()> {
        if self.data.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite)
        }
    }

    #[inline]
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    #[inline]
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.data[self.spec.index(j, k)]
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            spec: self.spec,
            data: self.data.iter().map(|&c| f(c)).collect(),
        }
    }

    /// Pointwise combination. Panics if the grids differ.
    pub fn zip_map(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!(self.spec, other.spec, "grid mismatch");
        Self {
            spec: self.spec,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn conj(&self) -> Self {
        self.map(|c| c.conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|c| c * s)
    }

    pub fn l2_norm(&self) -> f64 {
        l2_norm(self)
    }

    pub fn sup_norm(&self) -> f64 {
        sup_norm(self)
    }

    pub fn mean(&self) -> Complex64 {
        let sum: Complex64 = self.data.iter().sum();
        sum / self.data.len() as f64
    }

    /// Bilinear interpolation between cell centers. Points in the outer
    /// half-cell are extrapolated from the nearest interior stencil.
    pub fn interpolate(&self, z: Complex64) -> Result<Complex64> {
        let l = self.spec.half_width();
        if !(z.re.abs() <= l && z.im.abs() <= l) {
            return Err(Error::PointOutsideGrid(format!("{z}")));
        }
        let h = self.spec.spacing();
        let n = self.spec.n();
        let x = (z.re + l) / h - 0.5;
        let y = (z.im + l) / h - 0.5;
        let j = (x.floor().max(0.0) as usize).min(n - 2);
        let k = (y.floor().max(0.0) as usize).min(n - 2);
        let tx = x - j as f64;
        let ty = y - k as f64;
        Ok(self.get(j, k) * ((1.0 - tx) * (1.0 - ty))
            + self.get(j + 1, k) * (tx * (1.0 - ty))
            + self.get(j, k + 1) * ((1.0 - tx) * ty)
            + self.get(j + 1, k + 1) * (tx * ty))
    }

    /// Maximum modulus over the `width` outermost rings.
    pub fn boundary_sup(&self, width: usize) -> f64 {
        let n = self.spec.n();
        let mut m = 0.0f64;
        for k in 0..n {
            for j in 0..n {
                if self.spec.ring_depth(j, k) < width {
                    m = m.max(self.get(j, k).norm());
                }
            }
        }
        m
    }

    /// Embeds the field at the center of a grid with `factor` times as many
    /// cells per side and the same spacing, padding with zeros.
    pub fn embed_centered(&self, factor: usize) -> Result<Self> {
        let n = self.spec.n();
        let big = GridSpec::new(n * factor, self.spec.half_width() * factor as f64)?;
        let offset = (n * factor - n) / 2;
        let mut data = vec![Complex64::new(0.0, 0.0); big.len()];
        for k in 0..n {
            let dst = big.index(offset, k + offset);
            data[dst..dst + n].copy_from_slice(&self.data[k * n..(k + 1) * n]);
        }
        Ok(Self::from_raw(big, data))
    }
}

impl Add for &ComplexField {
    type Output = ComplexField;
    fn add(self, rhs: Self) -> ComplexField {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl Sub for &ComplexField {
    type Output = ComplexField;
    fn sub(self, rhs: Self) -> ComplexField {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl Mul for &ComplexField {
    type Output = ComplexField;
    fn mul(self, rhs: Self) -> ComplexField {
        self.zip_map(rhs, |a, b| a * b)
    }
}

/// Real samples on a [`GridSpec`] (metric coefficient `a`, Jacobians).
#[derive(Clone, Debug, PartialEq)]
pub struct RealField {
    spec: GridSpec,
    data: Vec<f64>,
}

impl RealField {
    pub fn new(spec: GridSpec, data: Vec<f64>) -> Result<Self> {
        if data.len() != spec.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} samples, got {}",
                spec.len(),
                data.len()
            )));
        }
        Ok(Self { spec, data })
    }

    pub(crate) fn from_raw(spec: GridSpec, data: Vec<f64>) -> Self {
        Self { spec, data }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.data[self.spec.index(j, k)]
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn to_complex(&self) -> ComplexField {
        ComplexField::from_raw(
            self.spec,
            self.data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }
}

/// `p dz + q dz̄` sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct OneForm {
    pub p: ComplexField,
    pub q: ComplexField,
}

impl OneForm {
    pub fn new(p: ComplexField, q: ComplexField) -> Result<Self> {
        if p.spec() != q.spec() {
            return Err(Error::ShapeMismatch);
        }
        Ok(Self { p, q })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self {
            p: ComplexField::zeros(spec),
            q: ComplexField::zeros(spec),
        }
    }

    pub fn spec(&self) -> &GridSpec {
        self.p.spec()
    }

    pub fn sup_norm(&self) -> f64 {
        self.p.sup_norm().max(self.q.sup_norm())
    }
}
