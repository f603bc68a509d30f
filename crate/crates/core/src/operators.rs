//! Cauchy transform `Tf(z) = (1/π)∫ f(w)/(z − w) dA(w)` and Beurling transform
//! `Hf(z) = −(1/π) PV∫ f(w)/(z − w)² dA(w)` on a grid.
//!
//! Both are midpoint-rule sums over cell centers with the singular cell
//! dropped. The fast path evaluates the sum as a linear convolution via a
//! zero-padded `(2n)²` FFT; the direct path loops over all pairs.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{l2_norm, wirtinger_dz, wirtinger_dzbar, ComplexField, DerivativeMode, GridSpec};

/// Largest grid accepted by [`Method::DirectQuadrature`].
pub const DIRECT_MAX_N: usize = 64;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Method {
    #[default]
    FftFreeSpace,
    DirectQuadrature,
}

/// Treatment of the cell containing the singularity.
///
/// `Zero` drops it: the kernels alone average to zero over a centered square.
/// `AnalyticCorrection` integrates the kernel exactly against the local Taylor
/// model of `f` over that cell, which for `T` adds `−(h²/π) f_z(z)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SingularCell {
    #[default]
    AnalyticCorrection,
    Zero,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OperatorConfig {
    pub method: Method,
    pub singular_cell: SingularCell,
}

impl OperatorConfig {
    pub fn direct() -> Self {
        Self {
            method: Method::DirectQuadrature,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Kind {
    Cauchy,
    Beurling,
}

impl Kind {
    #[inline]
    fn eval(self, zeta: Complex64) -> Complex64 {
        match self {
            Kind::Cauchy => 1.0 / (PI * zeta),
            Kind::Beurling => -1.0 / (PI * zeta * zeta),
        }
    }
}

/// Operator output plus the support diagnostic.
#[derive(Clone, Debug)]
pub struct Transformed {
    pub field: ComplexField,
    /// Input was not negligible on the two outermost rings, so the
    /// truncation to the box is visible in the result.
    pub support_warning: bool,
}

pub fn support_warning(f: &ComplexField) -> bool {
    f.boundary_sup(2) > 1e-12 * f.sup_norm()
}

type KernelKey = (usize, u64, Kind);

fn kernel_spectrum(spec: &GridSpec, kind: Kind) -> Arc<Vec<Complex64>> {
    static CACHE: OnceLock<Mutex<HashMap<KernelKey, Arc<Vec<Complex64>>>>> = OnceLock::new();
    let n = spec.n();
    let h = spec.spacing();
    let key = (n, h.to_bits(), kind);
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(k) = cache.lock().expect("kernel cache poisoned").get(&key) {
        return k.clone();
    }
    let m = 2 * n;
    let offset = |a: usize| -> Option<f64> {
        match a {
            a if a < n => Some(a as f64),
            a if a > n => Some(a as f64 - m as f64),
            _ => None,
        }
    };
    let w = h * h;
    let mut data = vec![Complex64::new(0.0, 0.0); m * m];
    for k in 0..m {
        for j in 0..m {
            if let (Some(dx), Some(dy)) = (offset(j), offset(k)) {
                if dx != 0.0 || dy != 0.0 {
                    data[k * m + j] = kind.eval(Complex64::new(dx * h, dy * h)) * w;
                }
            }
        }
    }
    fft::forward(&mut data, m);
    let arc = Arc::new(data);
    cache
        .lock()
        .expect("kernel cache poisoned")
        .insert(key, arc.clone());
    arc
}

fn convolve_fft(f: &ComplexField, kind: Kind) -> ComplexField {
    let spec = *f.spec();
    let n = spec.n();
    let m = 2 * n;
    let kernel = kernel_spectrum(&spec, kind);
    let mut buf = vec![Complex64::new(0.0, 0.0); m * m];
    for (k, row) in f.as_slice().chunks(n).enumerate() {
        buf[k * m..k * m + n].copy_from_slice(row);
    }
    fft::forward(&mut buf, m);
    buf.par_iter_mut()
        .zip(kernel.par_iter())
        .for_each(|(b, k)| *b *= k);
    fft::inverse(&mut buf, m);
    let mut out = Vec::with_capacity(n * n);
    for k in 0..n {
        out.extend_from_slice(&buf[k * m..k * m + n]);
    }
    ComplexField::from_raw(spec, out)
}

fn convolve_direct(f: &ComplexField, kind: Kind) -> Result<ComplexField> {
    let spec = *f.spec();
    if spec.n() > DIRECT_MAX_N {
        return Err(Error::DirectQuadratureTooLarge { n: spec.n() });
    }
    let w = spec.cell_area();
    let src = f.as_slice();
    let out = (0..spec.len())
        .into_par_iter()
        .map(|i| {
            let z = spec.point_at(i);
            let mut acc = Complex64::new(0.0, 0.0);
            for (i2, &v) in src.iter().enumerate() {
                if i2 != i {
                    acc += v * kind.eval(z - spec.point_at(i2));
                }
            }
            acc * w
        })
        .collect();
    Ok(ComplexField::from_raw(spec, out))
}

/// Regularized punctured lattice sum `Σ' (m̄/m)²` over `ℤ²`, the `h²` error
/// constant of the midpoint rule for the degree-zero part of the `H` kernel.
pub const LATTICE_C4: f64 = 1.596_423;

fn singular_cell_term(f: &ComplexField, kind: Kind) -> Result<ComplexField> {
    let w = f.spec().cell_area() / PI;
    let mode = DerivativeMode::Central;
    match kind {
        Kind::Cauchy => Ok(wirtinger_dz(f, mode)?.map(|v| -w * v)),
        Kind::Beurling => {
            let fzz = wirtinger_dz(&wirtinger_dz(f, mode)?, mode)?;
            let fbb = wirtinger_dzbar(&wirtinger_dzbar(f, mode)?, mode)?;
            Ok(fzz.zip_map(&fbb, |a, b| -0.5 * w * (a - LATTICE_C4 * b)))
        }
    }
}

fn apply(f: &ComplexField, cfg: &OperatorConfig, kind: Kind) -> Result<Transformed> {
    f.ensure_finite()?;
    let mut field = match cfg.method {
        Method::FftFreeSpace => convolve_fft(f, kind),
        Method::DirectQuadrature => convolve_direct(f, kind)?,
    };
    if cfg.singular_cell == SingularCell::AnalyticCorrection {
        field = &field + &singular_cell_term(f, kind)?;
    }
    Ok(Transformed {
        field,
        support_warning: support_warning(f),
    })
}

/// Discrete Cauchy transform `T`.
pub fn cauchy_transform(f: &ComplexField, cfg: &OperatorConfig) -> Result<Transformed> {
    apply(f, cfg, Kind::Cauchy)
}

/// Discrete Beurling transform `H`.
pub fn beurling_transform(f: &ComplexField, cfg: &OperatorConfig) -> Result<Transformed> {
    apply(f, cfg, Kind::Beurling)
}

/// Fast `T` without diagnostics.
pub fn t_op(f: &ComplexField) -> ComplexField {
    convolve_fft(f, Kind::Cauchy)
}

/// Fast `H` without diagnostics.
pub fn h_op(f: &ComplexField) -> ComplexField {
    convolve_fft(f, Kind::Beurling)
}

/// `T̄f = conj(T conj f)`, the Cauchy transform for `∂z`.
pub fn t_bar_op(f: &ComplexField) -> ComplexField {
    t_op(&f.conj()).conj()
}

/// `H*f = conj(H conj f)`, the adjoint of `H` (even kernel).
pub fn h_adjoint_op(f: &ComplexField) -> ComplexField {
    h_op(&f.conj()).conj()
}

/// `| ‖Hf‖₂ / ‖f‖₂ − 1 |` with `Hf` evaluated on a doubled box so the tail
/// outside the original grid is included.
pub fn operator_isometry_defect(f: &ComplexField, cfg: &OperatorConfig) -> Result<f64> {
    let norm = l2_norm(f);
    if norm == 0.0 {
        return Err(Error::ZeroInput);
    }
    let big = f.embed_centered(2)?;
    let hf = beurling_transform(&big, cfg)?;
    Ok((l2_norm(&hf.field) / norm - 1.0).abs())
}

/// Relative discrepancy between the FFT and direct evaluations.
#[derive(Clone, Copy, Debug)]
pub struct CrossValidation {
    pub cauchy: f64,
    pub beurling: f64,
}

pub fn cross_validate_operators(f: &ComplexField) -> Result<CrossValidation> {
    let fast = OperatorConfig::default();
    let slow = OperatorConfig::direct();
    let rel = |a: &ComplexField, b: &ComplexField| {
        let d = l2_norm(&(a - b));
        let s = l2_norm(b);
        if s == 0.0 {
            d
        } else {
            d / s
        }
    };
    let tc = rel(&cauchy_transform(f, &fast)?.field, &cauchy_transform(f, &slow)?.field);
    let hc = rel(&beurling_transform(f, &fast)?.field, &beurling_transform(f, &slow)?.field);
    Ok(CrossValidation {
        cauchy: tc,
        beurling: hc,
    })
}
