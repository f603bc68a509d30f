//! Matrix-free Krylov solvers on flat complex vectors.

use num_complex::Complex64;

type C = Complex64;

#[derive(Clone, Debug)]
pub struct KrylovOutcome {
    pub x: Vec<C>,
    /// Operator applications.
    pub iterations: usize,
    /// `‖b − Ax‖ / ‖b‖`.
    pub residual: f64,
    pub converged: bool,
}

fn dot(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C]) -> f64 {
    a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(y: &mut [C], alpha: C, x: &[C]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Restarted GMRES with modified Gram–Schmidt and Givens rotations,
/// starting from `x = 0`.
pub fn gmres(
    mut apply: impl FnMut(&[C]) -> Vec<C>,
    b: &[C],
    tol: f64,
    restart: usize,
    max_iter: usize,
) -> KrylovOutcome {
    let n = b.len();
    let bnorm = norm(b);
    let mut x = vec![C::new(0.0, 0.0); n];
    if bnorm == 0.0 {
        return KrylovOutcome {
            x,
            iterations: 0,
            residual: 0.0,
            converged: true,
        };
    }
    let mut iterations = 0;
    let mut r = b.to_vec();
    let mut rel = 1.0;
    while iterations < max_iter {
        let beta = norm(&r);
        rel = beta / bnorm;
        if rel <= tol {
            break;
        }
        let m = restart.min(max_iter - iterations);
        let mut basis: Vec<Vec<C>> = Vec::with_capacity(m + 1);
        basis.push(r.iter().map(|c| c / beta).collect());
        let mut hess = vec![vec![C::new(0.0, 0.0); m]; m + 1];
        let mut cs = vec![0.0f64; m];
        let mut sn = vec![C::new(0.0, 0.0); m];
        let mut g = vec![C::new(0.0, 0.0); m + 1];
        g[0] = C::new(beta, 0.0);
        let mut used = 0;
        for j in 0..m {
            let mut w = apply(&basis[j]);
            iterations += 1;
            for (i, v) in basis.iter().enumerate() {
                let hij = dot(v, &w);
                hess[i][j] = hij;
                axpy(&mut w, -hij, v);
            }
            let wn = norm(&w);
            hess[j + 1][j] = C::new(wn, 0.0);
            for i in 0..j {
                let (a, bb) = (hess[i][j], hess[i + 1][j]);
                hess[i][j] = cs[i] * a + sn[i] * bb;
                hess[i + 1][j] = -sn[i].conj() * a + cs[i] * bb;
            }
            let (a, bb) = (hess[j][j], hess[j + 1][j]);
            let denom = (a.norm_sqr() + bb.norm_sqr()).sqrt();
            if denom == 0.0 {
                cs[j] = 1.0;
                sn[j] = C::new(0.0, 0.0);
            } else {
                cs[j] = a.norm() / denom;
                let phase = if a.norm() == 0.0 { C::new(1.0, 0.0) } else { a / a.norm() };
                sn[j] = phase * bb.conj() / denom;
            }
            hess[j][j] = cs[j] * a + sn[j] * bb;
            hess[j + 1][j] = C::new(0.0, 0.0);
            g[j + 1] = -sn[j].conj() * g[j];
            g[j] *= cs[j];
            used = j + 1;
            rel = g[j + 1].norm() / bnorm;
            if rel <= tol || wn == 0.0 {
                break;
            }
            basis.push(w.iter().map(|c| c / wn).collect());
        }
        let mut y = vec![C::new(0.0, 0.0); used];
        for i in (0..used).rev() {
            let mut s = g[i];
            for k in i + 1..used {
                s -= hess[i][k] * y[k];
            }
            y[i] = s / hess[i][i];
        }
        for (i, yi) in y.iter().enumerate() {
            axpy(&mut x, *yi, &basis[i]);
        }
        let ax = apply(&x);
        iterations += 1;
        r = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        rel = norm(&r) / bnorm;
        if rel <= tol {
            break;
        }
    }
    KrylovOutcome {
        x,
        iterations,
        residual: rel,
        converged: rel <= tol,
    }
}

/// Preconditioned conjugate gradients for a Hermitian positive
/// semidefinite operator, starting from `x = 0`. `b` must lie in the range.
pub fn pcg(
    mut apply: impl FnMut(&[C]) -> Vec<C>,
    mut precond: impl FnMut(&[C]) -> Vec<C>,
    b: &[C],
    tol: f64,
    max_iter: usize,
) -> KrylovOutcome {
    let n = b.len();
    let bnorm = norm(b);
    let mut x = vec![C::new(0.0, 0.0); n];
    if bnorm == 0.0 {
        return KrylovOutcome {
            x,
            iterations: 0,
            residual: 0.0,
            converged: true,
        };
    }
    let mut r = b.to_vec();
    let mut z = precond(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z).re;
    let mut rel = 1.0;
    let mut iterations = 0;
    while iterations < max_iter {
        rel = norm(&r) / bnorm;
        if rel <= tol {
            break;
        }
        let ap = apply(&p);
        iterations += 1;
        let alpha = rz / dot(&p, &ap).re;
        axpy(&mut x, C::new(alpha, 0.0), &p);
        axpy(&mut r, C::new(-alpha, 0.0), &ap);
        z = precond(&r);
        let rz_new = dot(&r, &z).re;
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    rel = rel.min(norm(&r) / bnorm);
    KrylovOutcome {
        x,
        iterations,
        residual: rel,
        converged: rel <= tol,
    }
}
