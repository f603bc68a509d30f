use std::f64::consts::PI;

use num_complex::Complex64;

use super::{ComplexField, OneForm};
use crate::error::Result;
use crate::fft;

/// Discrete derivative scheme.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum DerivativeMode {
    /// Periodic Fourier multiplier; the Nyquist mode is dropped.
    Spectral,
    /// Second-order centered differences, one-sided second-order at the edges.
    #[default]
    Central,
    /// Fourth-order centered differences, one-sided fourth-order at the edges.
    Central4,
}

impl std::str::FromStr for DerivativeMode {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" => Ok(Self::Spectral),
            "central" => Ok(Self::Central),
            "central4" => Ok(Self::Central4),
            other => Err(crate::Error::Parse(format!("unknown derivative mode `{other}`"))),
        }
    }
}

fn diff_line(src: &[Complex64], dst: &mut [Complex64], h: f64, order4: bool) {
    let n = src.len();
    if !order4 {
        let s = 1.0 / (2.0 * h);
        dst[0] = (-3.0 * src[0] + 4.0 * src[1] - src[2]) * s;
        for j in 1..n - 1 {
            dst[j] = (src[j + 1] - src[j - 1]) * s;
        }
        dst[n - 1] = (3.0 * src[n - 1] - 4.0 * src[n - 2] + src[n - 3]) * s;
    } else {
        let s = 1.0 / (12.0 * h);
        let f = src;
        dst[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * s;
        dst[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * s;
        for j in 2..n - 2 {
            dst[j] = (f[j - 2] - 8.0 * f[j - 1] + 8.0 * f[j + 1] - f[j + 2]) * s;
        }
        let m = n - 1;
        dst[m] = (25.0 * f[m] - 48.0 * f[m - 1] + 36.0 * f[m - 2] - 16.0 * f[m - 3] + 3.0 * f[m - 4]) * s;
        dst[m - 1] = (3.0 * f[m] + 10.0 * f[m - 1] - 18.0 * f[m - 2] + 6.0 * f[m - 3] - f[m - 4]) * s;
    }
}

fn fd_x(f: &ComplexField, order4: bool) -> ComplexField {
    let n = f.spec().n();
    let h = f.spec().spacing();
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for (src, dst) in f.as_slice().chunks(n).zip(out.chunks_mut(n)) {
        diff_line(src, dst, h, order4);
    }
    ComplexField::from_raw(*f.spec(), out)
}

fn fd_y(f: &ComplexField, order4: bool) -> ComplexField {
    let n = f.spec().n();
    let mut t = f.as_slice().to_vec();
    fft::transpose(&mut t, n);
    let mut d = fd_x(&ComplexField::from_raw(*f.spec(), t), order4).into_vec();
    fft::transpose(&mut d, n);
    ComplexField::from_raw(*f.spec(), d)
}

fn wavenumber(m: usize, n: usize, l: f64) -> f64 {
    // Nyquist mode has no odd-symmetric partner; drop it.
    if m == n / 2 {
        return 0.0;
    }
    let s = if m < n / 2 { m as f64 } else { m as f64 - n as f64 };
    PI * s / l
}

/// Applies the Fourier multiplier `sx·ikx + sy·iky` to `f`.
fn spectral(f: &ComplexField, sx: Complex64, sy: Complex64) -> ComplexField {
    let spec = *f.spec();
    let n = spec.n();
    let l = spec.half_width();
    let mut data = f.as_slice().to_vec();
    fft::forward(&mut data, n);
    let i = Complex64::new(0.0, 1.0);
    for k in 0..n {
        let ky = wavenumber(k, n, l);
        for j in 0..n {
            let kx = wavenumber(j, n, l);
            data[k * n + j] *= i * (sx * kx + sy * ky);
        }
    }
    fft::inverse(&mut data, n);
    ComplexField::from_raw(spec, data)
}

pub fn partial_x(f: &ComplexField, mode: DerivativeMode) -> ComplexField {
    match mode {
        DerivativeMode::Spectral => spectral(f, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
        DerivativeMode::Central => fd_x(f, false),
        DerivativeMode::Central4 => fd_x(f, true),
    }
}

pub fn partial_y(f: &ComplexField, mode: DerivativeMode) -> ComplexField {
    match mode {
        DerivativeMode::Spectral => spectral(f, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
        DerivativeMode::Central => fd_y(f, false),
        DerivativeMode::Central4 => fd_y(f, true),
    }
}

fn wirtinger(f: &ComplexField, mode: DerivativeMode, sign: f64) -> Result<ComplexField> {
    f.ensure_finite()?;
    let half = Complex64::new(0.5, 0.0);
    if mode == DerivativeMode::Spectral {
        return Ok(spectral(f, half, Complex64::new(0.0, 0.5 * sign)));
    }
    let fx = partial_x(f, mode);
    let fy = partial_y(f, mode);
    let iy = Complex64::new(0.0, sign);
    Ok(fx.zip_map(&fy, |a, b| half * (a + iy * b)))
}

/// `∂z f = ½(∂x − i∂y) f`.
pub fn wirtinger_dz(f: &ComplexField, mode: DerivativeMode) -> Result<ComplexField> {
    wirtinger(f, mode, -1.0)
}

/// `∂z̄ f = ½(∂x + i∂y) f`.
pub fn wirtinger_dzbar(f: &ComplexField, mode: DerivativeMode) -> Result<ComplexField> {
    wirtinger(f, mode, 1.0)
}

/// `df = f_z dz + f_z̄ dz̄`.
pub fn gradient(f: &ComplexField, mode: DerivativeMode) -> Result<OneForm> {
    Ok(OneForm {
        p: wirtinger_dz(f, mode)?,
        q: wirtinger_dzbar(f, mode)?,
    })
}
