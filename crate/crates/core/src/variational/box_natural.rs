use num_complex::Complex64;

use super::krylov::pcg;
use super::{split_eta, WeakSolution, WeakSolveReport, WeakSolver};
use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{gradient, ComplexField, DerivativeMode, GridSpec, OneForm};
use crate::hodge::{BeltramiCoefficient, MetricCoefficients};

type C = Complex64;

/// Weak solve on the box with natural boundary conditions.
///
/// Linear elements on the cell-center nodes; each square of four nodes is cut
/// along its rising diagonal. Coefficients are vertex averages per triangle.
/// The Hermitian system is solved by CG preconditioned with the inverse of
/// the `μ = 0` operator, approximated by the uniform-weight grid-graph
/// Laplacian and applied through a 2-D DCT.
#[derive(Clone, Copy, Debug, Default)]
pub struct BoxNaturalWeakSolver;

/// Per-triangle data: vertex indices and the `(a, b)` coefficients.
struct Mesh {
    spec: GridSpec,
    tris: Vec<[usize; 3]>,
    a: Vec<f64>,
    b: Vec<C>,
}

impl Mesh {
    fn new(mu: &BeltramiCoefficient) -> Self {
        let spec = *mu.spec();
        let n = spec.n();
        let m = mu.field().as_slice();
        let mut tris = Vec::with_capacity(2 * (n - 1) * (n - 1));
        for k in 0..n - 1 {
            for j in 0..n - 1 {
                let i00 = spec.index(j, k);
                let i10 = spec.index(j + 1, k);
                let i11 = spec.index(j + 1, k + 1);
                let i01 = spec.index(j, k + 1);
                tris.push([i00, i10, i11]);
                tris.push([i00, i11, i01]);
            }
        }
        let mut a = Vec::with_capacity(tris.len());
        let mut b = Vec::with_capacity(tris.len());
        for t in &tris {
            let mt = (m[t[0]] + m[t[1]] + m[t[2]]) / 3.0;
            let d = 1.0 - mt.norm_sqr();
            a.push((1.0 + mt.norm_sqr()) / d);
            b.push(2.0 * mt / d);
        }
        Self { spec, tris, a, b }
    }

    /// `(f_x, f_y)` on triangle `t`; even triangles are lower-right, odd
    /// upper-left.
    #[inline]
    fn grad_xy(&self, t: usize, f: &[C]) -> (C, C) {
        let h = self.spec.spacing();
        let [v0, v1, v2] = self.tris[t];
        if t % 2 == 0 {
            ((f[v1] - f[v0]) / h, (f[v2] - f[v1]) / h)
        } else {
            ((f[v1] - f[v2]) / h, (f[v2] - f[v0]) / h)
        }
    }

    #[inline]
    fn scatter_xy(&self, t: usize, gx: C, gy: C, out: &mut [C]) {
        let h = self.spec.spacing();
        let [v0, v1, v2] = self.tris[t];
        if t % 2 == 0 {
            out[v1] += gx / h;
            out[v0] -= gx / h;
            out[v2] += gy / h;
            out[v1] -= gy / h;
        } else {
            out[v1] += gx / h;
            out[v2] -= gx / h;
            out[v2] += gy / h;
            out[v0] -= gy / h;
        }
    }

    /// `D^H (p, q)` where `D f = (f_z, f_z̄)` per triangle.
    fn scatter(&self, p: C, q: C, t: usize, out: &mut [C]) {
        let i = C::new(0.0, 1.0);
        self.scatter_xy(t, 0.5 * (p + q), 0.5 * i * (p - q), out);
    }

    fn apply(&self, f: &[C]) -> Vec<C> {
        let area = 0.5 * self.spec.cell_area();
        let i = C::new(0.0, 1.0);
        let mut out = vec![C::new(0.0, 0.0); f.len()];
        for t in 0..self.tris.len() {
            let (fx, fy) = self.grad_xy(t, f);
            let fz = 0.5 * (fx - i * fy);
            let fzb = 0.5 * (fx + i * fy);
            let (a, b) = (self.a[t], self.b[t]);
            let p = area * (a * fz - b.conj() * fzb);
            let q = area * (-b * fz + a * fzb);
            self.scatter(p, q, t, &mut out);
        }
        out
    }

    fn rhs(&self, g: &[C], f: &[C]) -> Vec<C> {
        let area = 0.5 * self.spec.cell_area();
        let mut out = vec![C::new(0.0, 0.0); g.len()];
        for (t, tri) in self.tris.iter().enumerate() {
            let gt = (g[tri[0]] + g[tri[1]] + g[tri[2]]) / 3.0;
            let ft = (f[tri[0]] + f[tri[1]] + f[tri[2]]) / 3.0;
            self.scatter(area * gt, area * ft, t, &mut out);
        }
        out
    }
}

fn remove_mean(x: &mut [C]) {
    let mean: C = x.iter().sum::<C>() / x.len() as f64;
    x.iter_mut().for_each(|c| *c -= mean);
}

/// Inverse of `½ L` with `L` the grid-graph Laplacian, on mean-zero data.
fn precondition(r: &[C], n: usize, eig: &[f64]) -> Vec<C> {
    let mut re: Vec<f64> = r.iter().map(|c| c.re).collect();
    let mut im: Vec<f64> = r.iter().map(|c| c.im).collect();
    for part in [&mut re, &mut im] {
        fft::dct2d(part, n, false);
        for (v, &e) in part.iter_mut().zip(eig) {
            *v = if e == 0.0 { 0.0 } else { *v / e };
        }
        fft::dct2d(part, n, true);
    }
    let mut out: Vec<C> = re.into_iter().zip(im).map(|(a, b)| C::new(a, b)).collect();
    remove_mean(&mut out);
    out
}

impl WeakSolver for BoxNaturalWeakSolver {
    fn name(&self) -> &'static str {
        "box-natural"
    }

    fn solve(
        &self,
        mu: &BeltramiCoefficient,
        _mc: &MetricCoefficients,
        eta: &OneForm,
        tol: f64,
        max_iter: usize,
    ) -> Result<WeakSolution> {
        let spec = *mu.spec();
        let n = spec.n();
        let mesh = Mesh::new(mu);
        let (g, f) = split_eta(eta);
        let rhs = mesh.rhs(g.as_slice(), f.as_slice());

        let lam: Vec<f64> = (0..n)
            .map(|p| 2.0 - 2.0 * (std::f64::consts::PI * p as f64 / n as f64).cos())
            .collect();
        let mut eig = vec![0.0; n * n];
        for q in 0..n {
            for p in 0..n {
                eig[q * n + p] = 0.5 * (lam[p] + lam[q]);
            }
        }

        let out = pcg(
            |x| mesh.apply(x),
            |r| precondition(r, n, &eig),
            &rhs,
            tol,
            max_iter,
        );
        if !out.converged {
            return Err(Error::NoConvergence {
                max_iter,
                residual: out.residual,
            });
        }
        let mut x = out.x;
        remove_mean(&mut x);
        let pot = ComplexField::from_raw(spec, x);
        let grad = gradient(&pot, DerivativeMode::Central)?;
        Ok(WeakSolution {
            f: pot,
            gradient: grad,
            report: WeakSolveReport {
                iterations: out.iterations,
                final_residual: out.residual,
                coercivity_used: (1.0 - mu.k()) / (1.0 + mu.k()),
                backend: self.name(),
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_is_hermitian_and_kills_constants() {
        let spec = GridSpec::new(16, 1.0).unwrap();
        let mu = BeltramiCoefficient::new(ComplexField::from_fn(spec, |z| {
            if z.norm() < 0.5 {
                C::new(0.3, 0.2) * (1.0 - 4.0 * z.norm_sqr())
            } else {
                C::new(0.0, 0.0)
            }
        }))
        .unwrap();
        let mesh = Mesh::new(&mu);
        let u: Vec<C> = (0..spec.len()).map(|i| C::new((i as f64).sin(), (i as f64 * 0.7).cos())).collect();
        let v: Vec<C> = (0..spec.len()).map(|i| C::new((i as f64 * 1.3).cos(), (i as f64 * 0.2).sin())).collect();
        let au = mesh.apply(&u);
        let av = mesh.apply(&v);
        let vau: C = v.iter().zip(&au).map(|(a, b)| a.conj() * b).sum();
        let uav: C = u.iter().zip(&av).map(|(a, b)| a.conj() * b).sum();
        assert!((vau - uav.conj()).norm() < 1e-10 * vau.norm());
        let ones = vec![C::new(1.0, 0.0); spec.len()];
        assert!(mesh.apply(&ones).iter().all(|c| c.norm() < 1e-12));
    }
}
