//! Restarted GMRES for complex linear systems given only operator access.

use num_complex::Complex;

use crate::real::{czero, Real};

/// Matrix-free linear operator `y = A x`.
pub trait LinearOperator<T: Real>: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[Complex<T>], y: &mut [Complex<T>]);
}

#[derive(Debug, Clone, Copy)]
pub struct GmresConfig<T> {
    /// Relative residual target `||b - Ax|| / ||b||`.
    pub tol: T,
    /// Cap on the total number of Arnoldi steps.
    pub max_iter: usize,
    /// Krylov dimension per cycle.
    pub restart: usize,
}

#[derive(Debug, Clone)]
pub struct GmresOutcome<T> {
    pub x: Vec<Complex<T>>,
    pub iterations: usize,
    /// True relative residual of the returned iterate.
    pub residual: T,
    pub converged: bool,
}

fn norm<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

/// `<a, b> = sum conj(a_i) b_i`
fn dot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).fold(czero(), |acc, (x, y)| acc + x.conj() * y)
}

fn residual<T: Real, A: LinearOperator<T> + ?Sized>(
    op: &A,
    b: &[Complex<T>],
    x: &[Complex<T>],
    r: &mut [Complex<T>],
) {
    op.apply(x, r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = *bi - *ri;
    }
}

/// Solves `A x = b` from `x0` (zero when `None`).
pub fn gmres<T: Real, A: LinearOperator<T> + ?Sized>(
    op: &A,
    b: &[Complex<T>],
    x0: Option<&[Complex<T>]>,
    cfg: &GmresConfig<T>,
) -> GmresOutcome<T> {
    let n = op.dim();
    assert_eq!(b.len(), n, "right-hand side has the wrong length");
    let mut x = x0.map_or_else(|| vec![czero(); n], <[_]>::to_vec);
    let b_norm = norm(b);
    if b_norm == T::zero() {
        return GmresOutcome {
            x: vec![czero(); n],
            iterations: 0,
            residual: T::zero(),
            converged: true,
        };
    }
    let m = cfg.restart.max(1).min(n);
    let mut r = vec![czero(); n];
    let mut iterations = 0;
    let mut best = (T::infinity(), x.clone());

    loop {
        residual(op, b, &x, &mut r);
        let beta = norm(&r);
        let rel = beta / b_norm;
        if rel < best.0 {
            best = (rel, x.clone());
        }
        if rel <= cfg.tol {
            return GmresOutcome {
                x,
                iterations,
                residual: rel,
                converged: true,
            };
        }
        if iterations >= cfg.max_iter {
            return GmresOutcome {
                x: best.1,
                iterations,
                residual: best.0,
                converged: false,
            };
        }

        let mut basis: Vec<Vec<Complex<T>>> = Vec::with_capacity(m + 1);
        basis.push(r.iter().map(|&v| v / beta).collect());
        // Hessenberg columns, rotated in place
        let mut hess: Vec<Vec<Complex<T>>> = Vec::with_capacity(m);
        let mut cs: Vec<T> = Vec::with_capacity(m);
        let mut sn: Vec<Complex<T>> = Vec::with_capacity(m);
        let mut g = vec![czero::<T>(); m + 1];
        g[0] = Complex::new(beta, T::zero());
        let mut steps = 0;

        while steps < m && iterations < cfg.max_iter {
            iterations += 1;
            let mut w = vec![czero(); n];
            op.apply(&basis[steps], &mut w);
            let mut col = vec![czero::<T>(); steps + 2];
            for (i, v) in basis.iter().enumerate() {
                let hij = dot(v, &w);
                col[i] = hij;
                for (wk, vk) in w.iter_mut().zip(v) {
                    *wk = *wk - hij * vk;
                }
            }
            let w_norm = norm(&w);
            col[steps + 1] = Complex::new(w_norm, T::zero());

            for i in 0..steps {
                let (c, s) = (cs[i], sn[i]);
                let a = col[i];
                let bb = col[i + 1];
                col[i] = a * c + s * bb;
                col[i + 1] = -s.conj() * a + bb * c;
            }
            // rotation zeroing col[steps + 1]
            let a = col[steps];
            let bb = col[steps + 1];
            let denom = (a.norm_sqr() + bb.norm_sqr()).sqrt();
            let (c, s) = if denom == T::zero() {
                (T::one(), czero())
            } else if a.norm() == T::zero() {
                (T::zero(), bb.conj() / bb.norm())
            } else {
                let c = a.norm() / denom;
                let s = (a / a.norm()) * bb.conj() / denom;
                (c, s)
            };
            col[steps] = a * c + s * bb;
            col[steps + 1] = czero();
            g[steps + 1] = -s.conj() * g[steps];
            g[steps] = g[steps] * c;
            cs.push(c);
            sn.push(s);
            hess.push(col);
            steps += 1;

            let estimate = g[steps].norm() / b_norm;
            if w_norm == T::zero() || estimate <= cfg.tol * lit_half() {
                break;
            }
            basis.push(w.iter().map(|&v| v / w_norm).collect());
        }

        // back substitution for the cycle's coefficients
        let mut y = vec![czero::<T>(); steps];
        for i in (0..steps).rev() {
            let mut acc = g[i];
            for j in (i + 1)..steps {
                acc = acc - hess[j][i] * y[j];
            }
            y[i] = acc / hess[i][i];
        }
        for (j, yj) in y.iter().enumerate() {
            for (xk, vk) in x.iter_mut().zip(&basis[j]) {
                *xk = *xk + *yj * vk;
            }
        }
    }
}

fn lit_half<T: Real>() -> T {
    crate::real::lit(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Dense(Vec<Vec<Complex<f64>>>);

    impl LinearOperator<f64> for Dense {
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn apply(&self, x: &[Complex<f64>], y: &mut [Complex<f64>]) {
            for (row, yi) in self.0.iter().zip(y.iter_mut()) {
                *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
            }
        }
    }

    fn test_matrix(n: usize) -> Dense {
        Dense(
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let v = ((i * 7 + j * 3) % 11) as f64 / 11.0 - 0.5;
                            let w = ((i * 5 + j * 13) % 17) as f64 / 17.0 - 0.5;
                            let diag = if i == j { 4.0 } else { 0.0 };
                            Complex::new(diag + v, w)
                        })
                        .collect()
                })
                .collect(),
        )
    }

    #[test]
    fn solves_small_dense_system() {
        let a = test_matrix(40);
        let truth: Vec<Complex<f64>> = (0..40).map(|i| Complex::new(i as f64, -(i as f64) / 3.0)).collect();
        let mut b = vec![Complex::new(0.0, 0.0); 40];
        a.apply(&truth, &mut b);
        let cfg = GmresConfig {
            tol: 1e-12,
            max_iter: 500,
            restart: 10,
        };
        let out = gmres(&a, &b, None, &cfg);
        assert!(out.converged);
        assert!(out.residual <= 1e-12);
        let err: f64 = out.x.iter().zip(&truth).map(|(x, t)| (x - t).norm()).fold(0.0, f64::max);
        assert!(err < 1e-9);
    }

    #[test]
    fn zero_rhs_needs_no_iterations() {
        let a = test_matrix(5);
        let out = gmres(
            &a,
            &vec![Complex::new(0.0, 0.0); 5],
            None,
            &GmresConfig {
                tol: 1e-10,
                max_iter: 10,
                restart: 5,
            },
        );
        assert_eq!(out.iterations, 0);
        assert!(out.x.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn reports_non_convergence_with_best_residual() {
        let a = test_matrix(60);
        let b: Vec<Complex<f64>> = (0..60).map(|i| Complex::new(1.0, i as f64)).collect();
        let out = gmres(
            &a,
            &b,
            None,
            &GmresConfig {
                tol: 1e-14,
                max_iter: 3,
                restart: 3,
            },
        );
        assert!(!out.converged);
        assert_eq!(out.iterations, 3);
        assert!(out.residual < 1.0);
    }
}
