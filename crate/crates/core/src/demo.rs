//! Library of Beltrami coefficients with known properties, and the
//! manufactured pair `Φ* = z + cB`, `μ* = Φ*_z̄ / Φ*_z`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{ComplexField, GridSpec};
use crate::hodge::BeltramiCoefficient;

/// `max s²(1 − s²)⁴` on `[0, 1]`, attained at `s² = 1/5`.
const ROTATING_PEAK: f64 = 0.08192;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DemoMu {
    Zero,
    /// `k (1 − s²)⁴` with `s = |z − center| / R`.
    RadialBump { k: f64, radius: f64, center: Complex64 },
    /// `k (z/R)² (1 − s²)⁴ / 0.08192` with `s = |z| / R`; `‖μ‖∞ = k`.
    RotatingBump { k: f64, radius: f64 },
    Manufactured(Manufactured),
}

impl DemoMu {
    pub fn radial_bump(k: f64, radius: f64) -> Self {
        Self::RadialBump {
            k,
            radius,
            center: Complex64::new(0.0, 0.0),
        }
    }

    /// The default test coefficient: a centered radial bump with `k = 0.5`, `R = 1`.
    pub fn standard() -> Self {
        Self::radial_bump(0.5, 1.0)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        match *self {
            Self::Zero => zero,
            Self::RadialBump { k, radius, center } => {
                let s2 = (z - center).norm_sqr() / (radius * radius);
                if s2 < 1.0 {
                    Complex64::new(k * (1.0 - s2).powi(4), 0.0)
                } else {
                    zero
                }
            }
            Self::RotatingBump { k, radius } => {
                let w = z / radius;
                let s2 = w.norm_sqr();
                if s2 < 1.0 {
                    k * w * w * (1.0 - s2).powi(4) / ROTATING_PEAK
                } else {
                    zero
                }
            }
            Self::Manufactured(m) => m.mu(z),
        }
    }

    pub fn field(&self, spec: GridSpec) -> ComplexField {
        ComplexField::from_fn(spec, |z| self.eval(z))
    }

    pub fn coefficient(&self, spec: GridSpec) -> Result<BeltramiCoefficient> {
        BeltramiCoefficient::new(self.field(spec))
    }

    pub fn manufactured(&self) -> Option<&Manufactured> {
        match self {
            Self::Manufactured(m) => Some(m),
            _ => None,
        }
    }
}

impl fmt::Display for DemoMu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => write!(f, "demo:zero"),
            Self::RadialBump { k, radius, center } if *center == Complex64::new(0.0, 0.0) => {
                write!(f, "demo:radial_bump:{k}:{radius}")
            }
            Self::RadialBump { k, radius, center } => {
                write!(f, "demo:radial_bump:{k}:{radius}:{}:{}", center.re, center.im)
            }
            Self::RotatingBump { k, radius } => write!(f, "demo:rotating_bump:{k}:{radius}"),
            Self::Manufactured(m) => write!(f, "demo:manufactured:{}", m.c),
        }
    }
}

impl FromStr for DemoMu {
    type Err = Error;

    /// Parses `demo:<name>[:<param>...]`.
    fn from_str(s: &str) -> Result<Self> {
        let rest = s
            .strip_prefix("demo:")
            .ok_or_else(|| Error::Parse(format!("`{s}` is not a demo spec")))?;
        let mut parts = rest.split(':');
        let name = parts.next().unwrap_or_default();
        let params: Vec<f64> = parts
            .map(|p| {
                p.parse()
                    .map_err(|_| Error::Parse(format!("bad parameter `{p}` in `{s}`")))
            })
            .collect::<Result<_>>()?;
        let arity = |lo: usize, hi: usize| -> Result<()> {
            if params.len() < lo || params.len() > hi {
                Err(Error::Parse(format!(
                    "`{name}` takes {lo}..={hi} parameters, got {}",
                    params.len()
                )))
            } else {
                Ok(())
            }
        };
        let demo = match name {
            "zero" => {
                arity(0, 0)?;
                Self::Zero
            }
            "radial_bump" => {
                arity(0, 4)?;
                let k = params.first().copied().unwrap_or(0.5);
                let radius = params.get(1).copied().unwrap_or(1.0);
                let cx = params.get(2).copied().unwrap_or(0.0);
                let cy = params.get(3).copied().unwrap_or(0.0);
                Self::RadialBump {
                    k,
                    radius,
                    center: Complex64::new(cx, cy),
                }
            }
            "rotating_bump" => {
                arity(0, 2)?;
                Self::RotatingBump {
                    k: params.first().copied().unwrap_or(0.5),
                    radius: params.get(1).copied().unwrap_or(1.0),
                }
            }
            "manufactured" => {
                arity(0, 1)?;
                Self::Manufactured(Manufactured::new(params.first().copied().unwrap_or(0.3))?)
            }
            other => return Err(Error::Parse(format!("unknown demo `{other}`"))),
        };
        if let Self::RadialBump { k, radius, .. } | Self::RotatingBump { k, radius } = demo {
            if !(0.0..1.0).contains(&k) || !(radius > 0.0) {
                return Err(Error::Parse(format!("need 0 <= k < 1 and R > 0 in `{s}`")));
            }
        }
        Ok(demo)
    }
}

/// `Φ*(z) = z + c·B(z)` with `B = (1 − |z|²)⁴` on the unit disk.
/// `Φ*(0) = c` and `Φ*(1) = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Manufactured {
    pub c: f64,
}

impl Manufactured {
    /// `|∂zB| ≤ 4·|z|(1−|z|²)³` peaks at `4·(1/√7)(6/7)³ ≈ 0.952`, so
    /// `|c| < 1` keeps `Φ*_z` away from zero.
    pub fn new(c: f64) -> Result<Self> {
        if !(c.abs() < 1.0) {
            return Err(Error::Parse(format!("manufactured amplitude must satisfy |c| < 1, got {c}")));
        }
        Ok(Self { c })
    }

    fn cubic(z: Complex64) -> Option<f64> {
        let r2 = z.norm_sqr();
        (r2 < 1.0).then(|| (1.0 - r2).powi(3))
    }

    pub fn phi(&self, z: Complex64) -> Complex64 {
        let r2 = z.norm_sqr();
        if r2 < 1.0 {
            z + self.c * (1.0 - r2).powi(4)
        } else {
            z
        }
    }

    /// `1 − 4c z̄ (1 − |z|²)³`.
    pub fn phi_z(&self, z: Complex64) -> Complex64 {
        match Self::cubic(z) {
            Some(t) => 1.0 - 4.0 * self.c * z.conj() * t,
            None => Complex64::new(1.0, 0.0),
        }
    }

    /// `−4c z (1 − |z|²)³`.
    pub fn phi_zbar(&self, z: Complex64) -> Complex64 {
        match Self::cubic(z) {
            Some(t) => -4.0 * self.c * z * t,
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn mu(&self, z: Complex64) -> Complex64 {
        self.phi_zbar(z) / self.phi_z(z)
    }

    /// `log Φ*_z` (principal branch; `Re Φ*_z > 0` throughout).
    pub fn psi(&self, z: Complex64) -> Complex64 {
        self.phi_z(z).ln()
    }

    /// `Φ*` normalized so that `0 ↦ 0` and `1 ↦ 1`.
    pub fn phi_normalized(&self, z: Complex64) -> Complex64 {
        (self.phi(z) - self.c) / (1.0 - self.c)
    }
}
