//! Lippmann-Schwinger operator with the x2-periodized quasi-periodic kernel,
//! applied diagonally in the double Fourier basis `e^{i alpha_j x1 + i pi m x2 / R}`.
//!
//! Truncating `e^{i beta_j |t|}` to `|t| <= R` and extending it `2R`-periodically
//! leaves the kernel exact for `|x2 - y2| <= R`, which covers every pair of
//! points in the slab `|x2| < h` once `R >= 2h`. The Fourier coefficient of the
//! periodized profile is
//!
//! ```text
//! c_{j,m} = (1/2R) int_{-R}^{R} e^{i beta_j |t|} e^{-i gamma_m t} dt
//!         = i beta_j ((-1)^m e^{i beta_j R} - 1) / (R (gamma_m^2 - beta_j^2)),   gamma_m = pi m / R,
//! ```
//!
//! and the convolution symbol on the `2pi x 2R` cell is
//! `(i / (4 pi beta_j)) * 4 pi R * c_{j,m} = (1 - (-1)^m e^{i beta_j R}) / (gamma_m^2 - beta_j^2)`.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::gmres::LinearOperator;
use crate::error::{Error, Result};
use crate::grid::Grid2D;
use crate::medium::MediumParams;
use crate::real::{ci, from_i64, from_usize, lit, to_f64, Real};

/// Signed frequency of FFT bin `i` out of `n`.
pub fn fft_frequency(i: usize, n: usize) -> i64 {
    if i < n.div_ceil(2) {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Fourier coefficient `c_{j,m}` of the `2R`-periodized `e^{i beta |t|}`.
pub fn periodized_profile_coefficient<T: Real>(beta: Complex<T>, m: i64, r: T) -> Complex<T> {
    let gamma = T::PI() * from_i64::<T>(m) / r;
    let sign = if m % 2 == 0 { T::one() } else { -T::one() };
    let edge = (ci::<T>() * beta * r).exp() * sign;
    ci::<T>() * beta * (edge - T::one()) / ((beta * beta - gamma * gamma) * (-r))
}

/// Convolution symbol `(1 - (-1)^m e^{i beta R}) / (gamma_m^2 - beta^2)`.
pub fn kernel_multiplier<T: Real>(beta: Complex<T>, m: i64, r: T) -> Complex<T> {
    let gamma = T::PI() * from_i64::<T>(m) / r;
    let sign = if m % 2 == 0 { T::one() } else { -T::one() };
    let edge = (ci::<T>() * beta * r).exp() * sign;
    (Complex::new(T::one(), T::zero()) - edge) / (Complex::new(gamma * gamma, T::zero()) - beta * beta)
}

/// `v -> v - k^2 e^{-i alpha x1} Conv_R(q e^{i alpha x1} v)` on a cell-centred
/// grid over `(-pi, pi) x (-R, R)`; unknowns are the periodic factor `v = e^{-i alpha x1} u`.
pub struct LsOperator<T: Real> {
    n1: usize,
    n2: usize,
    k2: T,
    contrast: Vec<Complex<T>>,
    /// Symbol in transposed layout `[i1 * n2 + i2]`, pre-scaled by `1/(n1 n2)`.
    symbol: Vec<Complex<T>>,
    row_fwd: Arc<dyn Fft<T>>,
    row_inv: Arc<dyn Fft<T>>,
    col_fwd: Arc<dyn Fft<T>>,
    col_inv: Arc<dyn Fft<T>>,
}

/// Distance below which `gamma_m^2 + alpha_j^2 = k^2` is treated as resonant.
pub const RESONANCE_TOL: f64 = 1e-9;

impl<T: Real> LsOperator<T> {
    pub fn new(params: &MediumParams<T>, grid: &Grid2D<T>, contrast: Vec<Complex<T>>) -> Result<Self> {
        let (n1, n2) = (grid.n1, grid.n2);
        assert_eq!(contrast.len(), n1 * n2);
        let r = grid.x2_max;
        let k2 = params.k() * params.k();
        let scale = T::one() / from_usize::<T>(n1 * n2);
        let mut symbol = Vec::with_capacity(n1 * n2);
        for i1 in 0..n1 {
            let j = fft_frequency(i1, n1);
            let beta = params.beta(j);
            let aj = params.alpha_j(j);
            for i2 in 0..n2 {
                let m = fft_frequency(i2, n2);
                let gamma = T::PI() * from_i64::<T>(m) / r;
                if (gamma * gamma + aj * aj - k2).abs() < lit(RESONANCE_TOL) {
                    return Err(Error::ResonantDiscretization {
                        j,
                        m,
                        suggested_r: to_f64(r) + 0.01,
                    });
                }
                symbol.push(kernel_multiplier(beta, m, r) * scale);
            }
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            n1,
            n2,
            k2,
            contrast,
            symbol,
            row_fwd: planner.plan_fft_forward(n1),
            row_inv: planner.plan_fft_inverse(n1),
            col_fwd: planner.plan_fft_forward(n2),
            col_inv: planner.plan_fft_inverse(n2),
        })
    }

    /// In-place periodized convolution of `f` (x2-major layout).
    pub fn convolve(&self, f: &mut [Complex<T>]) {
        let (n1, n2) = (self.n1, self.n2);
        let mut t = vec![Complex::new(T::zero(), T::zero()); n1 * n2];
        self.row_fwd.process(f);
        transpose(f, &mut t, n2, n1);
        self.col_fwd.process(&mut t);
        for (v, s) in t.iter_mut().zip(&self.symbol) {
            *v = *v * s;
        }
        self.col_inv.process(&mut t);
        transpose(&t, f, n1, n2);
        self.row_inv.process(f);
    }

    pub fn contrast(&self) -> &[Complex<T>] {
        &self.contrast
    }
}

/// `dst[c * rows + r] = src[r * cols + c]` for a `rows x cols` source.
fn transpose<T: Copy>(src: &[T], dst: &mut [T], rows: usize, cols: usize) {
    const B: usize = 32;
    for rb in (0..rows).step_by(B) {
        for cb in (0..cols).step_by(B) {
            for r in rb..(rb + B).min(rows) {
                for c in cb..(cb + B).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

impl<T: Real> LinearOperator<T> for LsOperator<T> {
    fn dim(&self) -> usize {
        self.n1 * self.n2
    }

    fn apply(&self, x: &[Complex<T>], y: &mut [Complex<T>]) {
        for ((yi, xi), qi) in y.iter_mut().zip(x).zip(&self.contrast) {
            *yi = *xi * qi;
        }
        self.convolve(y);
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = *xi - *yi * self.k2;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greens::{green_modal, GreensEvalOptions};
    use std::f64::consts::PI;

    /// Composite Simpson rule on `[a, b]` with `n` (even) panels.
    fn simpson(f: impl Fn(f64) -> Complex<f64>, a: f64, b: f64, n: usize) -> Complex<f64> {
        let h = (b - a) / n as f64;
        let mut acc = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += f(a + i as f64 * h) * w;
        }
        acc * (h / 3.0)
    }

    #[test]
    fn profile_coefficient_matches_quadrature() {
        let r = 2.25;
        for beta in [
            Complex::new(2.0 * PI, 0.0),
            Complex::new(1.865, 0.0),
            Complex::new(0.0, 3.0857),
            Complex::new(0.0, 11.0),
        ] {
            for m in [-7i64, -1, 0, 1, 2, 5, 40] {
                let gamma = PI * m as f64 / r;
                // integrate each half separately so the kink at 0 is a panel edge
                let f = |t: f64| (Complex::new(0.0, 1.0) * beta * t.abs()).exp() * cis(-gamma * t);
                let q = (simpson(f, -r, 0.0, 20_000) + simpson(f, 0.0, r, 20_000)) / (2.0 * r);
                let c = periodized_profile_coefficient(beta, m, r);
                assert!((q - c).norm() < 1e-10, "beta={beta} m={m}: {q} vs {c}");
            }
        }
    }

    fn cis(t: f64) -> Complex<f64> {
        Complex::new(t.cos(), t.sin())
    }

    #[test]
    fn multiplier_is_scaled_coefficient() {
        let r = 2.25;
        let beta = Complex::new(3.1, 0.0);
        for m in [-3i64, 0, 4] {
            let full = kernel_multiplier(beta, m, r);
            let from_c = Complex::new(0.0, 1.0) / (beta * 4.0 * PI)
                * (4.0 * PI * r)
                * periodized_profile_coefficient(beta, m, r);
            assert!((full - from_c).norm() < 1e-13);
        }
    }

    #[test]
    fn discrete_convolution_reproduces_green_function() {
        // Convolving a smooth bump with the FFT symbol must match direct
        // quadrature of G against the same bump.
        let params = MediumParams::new(2.0 * PI, PI / 3.0, 1.0, 2.0).unwrap();
        let r = 2.25;
        let grid = Grid2D::new(-PI, PI, -r, r, 256, 256).unwrap();
        let bump = |p: [f64; 2]| {
            let d2 = (p[0] - 0.2).powi(2) + (p[1] + 0.1).powi(2);
            if d2 < 0.36 {
                (-1.0 / (1.0 - d2 / 0.36)).exp()
            } else {
                0.0
            }
        };
        let op = LsOperator::new(&params, &grid, vec![Complex::new(1.0, 0.0); grid.len()]).unwrap();
        let mut f: Vec<Complex<f64>> = grid.points().map(|p| Complex::new(bump(p), 0.0)).collect();
        op.convolve(&mut f);
        // evaluate at a point with |x2 - y2| bounded away from 0 for the whole bump
        let x = [-1.0, 0.9];
        let (i1, i2) = grid.locate(x).unwrap();
        let xn = [grid.x1(i1), grid.x2(i2)];
        let fine = Grid2D::new(-PI, PI, -r, r, 384, 384).unwrap();
        let opts = GreensEvalOptions::default();
        let mut direct = Complex::new(0.0, 0.0);
        for p in fine.points() {
            let b = bump(p);
            if b > 0.0 {
                // periodic factor: v = e^{-i alpha x1} conv(e^{i alpha y1} f)
                direct += green_modal(xn, p, &params, &opts).unwrap().value * cis(params.alpha() * p[0]) * b;
            }
        }
        direct *= fine.cell_area() * cis(-params.alpha() * xn[0]);
        let got = f[grid.index(i1, i2)];
        assert!((got - direct).norm() < 1e-6 * direct.norm().max(1e-3), "{got} vs {direct}");
    }

    #[test]
    fn resonant_grid_is_rejected() {
        // gamma_1 = pi / R = k when R = pi / k and alpha = 0
        let params = MediumParams::new(2.0 * PI, 0.0, 0.2, 0.5).unwrap();
        let r = 0.5;
        let grid = Grid2D::new(-PI, PI, -r, r, 8, 8).unwrap();
        let res = LsOperator::new(&params, &grid, vec![Complex::new(0.0, 0.0); 64]);
        assert!(matches!(res, Err(Error::ResonantDiscretization { j: 0, .. })));
    }

    #[test]
    fn fft_frequencies() {
        let f: Vec<i64> = (0..6).map(|i| fft_frequency(i, 6)).collect();
        assert_eq!(f, vec![0, 1, 2, -3, -2, -1]);
        let f: Vec<i64> = (0..5).map(|i| fft_frequency(i, 5)).collect();
        assert_eq!(f, vec![0, 1, 2, -2, -1]);
    }
}
