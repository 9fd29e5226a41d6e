//! The alpha-quasiperiodic Helmholtz Green's function and the imaging kernel.
//!
//! Two representations are provided:
//!
//! * the modal (Rayleigh) series `G = (i/4pi) sum_j beta_j^{-1} e^{i alpha_j (x1-y1) + i beta_j |x2-y2|}`,
//!   exponentially convergent away from `x2 = y2`;
//! * the spatial image series `G = (i/4) sum_j e^{-i 2pi j alpha} H0(k r_j)`, only
//!   conditionally convergent, summed with a smooth taper window.
//!
//! The imaging kernel `F(z, y) = (G(z,y) - conj G(y,z)) / 2i` has the finite
//! modal form over propagating modes and the image form `(1/4) sum_j e^{-i2pi j alpha} J0(k r_j)`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::Grid2D;
use crate::medium::MediumParams;
use crate::real::{ci, cis, czero, from_i64, from_usize, lit, to_f64, Point, Real};
use crate::special::{bessel_j0, hankel1_0};

/// Summation scheme for the conditionally convergent image series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageSummation {
    /// Weights `w(|j|/N)`: one up to `N/2`, then a C-infinity step down to zero at `N`.
    SmoothTaper,
    /// Repeated Cesaro means of the symmetric partial sums `S_0..S_N`.
    Cesaro { order: usize },
    /// Plain symmetric partial sum `S_N`.
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreensEvalOptions<T> {
    /// Largest `|j|` of the modal series; `None` extends past the storage
    /// window until the dropped terms are below machine precision.
    pub modal_trunc: Option<usize>,
    pub image_trunc: usize,
    pub accel: ImageSummation,
    /// Minimum `|x2 - y2|` accepted by the modal series.
    pub x2_switch: T,
}

impl<T: Real> Default for GreensEvalOptions<T> {
    fn default() -> Self {
        Self {
            modal_trunc: None,
            image_trunc: 500,
            accel: ImageSummation::SmoothTaper,
            x2_switch: lit(1e-3),
        }
    }
}

/// Series value with an error indicator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue<T> {
    pub value: Complex<T>,
    /// Modal series: magnitude of the first dropped terms. Image series:
    /// difference between the accelerated sums at `N` and `3N/4`.
    pub error_estimate: T,
}

/// Hard cap on adaptive modal truncation.
const MAX_ADAPTIVE_MODES: usize = 200_000;

fn modal_term<T: Real>(params: &MediumParams<T>, j: i64, dx1: T, dx2: T) -> Complex<T> {
    let beta = params.beta(j);
    let phase = ci::<T>() * (Complex::new(params.alpha_j(j) * dx1, T::zero()) + beta * dx2);
    ci::<T>() / (beta * (lit::<T>(4.0) * T::PI())) * phase.exp()
}

/// Modal series of `G(x, y)`.
pub fn green_modal<T: Real>(
    x: Point<T>,
    y: Point<T>,
    params: &MediumParams<T>,
    opts: &GreensEvalOptions<T>,
) -> Result<SeriesValue<T>> {
    let dx1 = x[0] - y[0];
    let dx2 = (x[1] - y[1]).abs();
    if dx2 < opts.x2_switch {
        return Err(Error::TooCloseVertically {
            separation: to_f64(dx2),
            switch: to_f64(opts.x2_switch),
        });
    }
    let min_extent = params.storage_extent();
    let fixed = opts.modal_trunc;
    let scale = T::one() / (lit::<T>(4.0) * T::PI() * params.k());
    let mut sum = modal_term(params, 0, dx1, dx2);
    let mut n = 1usize;
    loop {
        let jn = n as i64;
        let plus = modal_term(params, jn, dx1, dx2);
        let minus = modal_term(params, -jn, dx1, dx2);
        let stop = match fixed {
            Some(cap) => n > cap,
            None => {
                n > min_extent
                    && params.beta(jn).im > T::zero()
                    && params.beta(-jn).im > T::zero()
                    && plus.norm() + minus.norm() <= T::epsilon() * lit(0.1) * (sum.norm() + scale)
                    || n > MAX_ADAPTIVE_MODES
            }
        };
        if stop {
            return Ok(SeriesValue {
                value: sum,
                error_estimate: plus.norm() + minus.norm(),
            });
        }
        sum = sum + plus + minus;
        n += 1;
    }
}

/// Smooth step: 1 on `[0, 1/2]`, 0 on `[1, inf)`, C-infinity in between.
fn taper<T: Real>(t: T) -> T {
    let half = lit::<T>(0.5);
    if t <= half {
        return T::one();
    }
    if t >= T::one() {
        return T::zero();
    }
    let s = (t - half) / half;
    let f = |u: T| {
        if u > T::zero() {
            (-T::one() / u).exp()
        } else {
            T::zero()
        }
    };
    let a = f(T::one() - s);
    a / (a + f(s))
}

/// Accelerated symmetric sum of `term(j)` over `|j| <= n_max`.
fn sum_images<T: Real>(
    n_max: usize,
    accel: ImageSummation,
    term: impl Fn(i64) -> Complex<T>,
) -> SeriesValue<T> {
    // paired[n] = t_n + t_{-n} (paired[0] = t_0)
    let paired: Vec<Complex<T>> = (0..=n_max)
        .map(|n| {
            if n == 0 {
                term(0)
            } else {
                term(n as i64) + term(-(n as i64))
            }
        })
        .collect();
    match accel {
        ImageSummation::SmoothTaper => {
            let weighted = |cut: usize| {
                let cut_t = from_usize::<T>(cut.max(1));
                paired
                    .iter()
                    .take(cut + 1)
                    .enumerate()
                    .fold(czero::<T>(), |acc, (n, &t)| {
                        acc + t * taper(from_usize::<T>(n) / cut_t)
                    })
            };
            let full = weighted(n_max);
            let short = weighted((3 * n_max) / 4);
            SeriesValue {
                value: full,
                error_estimate: (full - short).norm(),
            }
        }
        ImageSummation::Cesaro { order } => {
            let mut seq: Vec<Complex<T>> = paired
                .iter()
                .scan(czero::<T>(), |acc, &t| {
                    *acc = *acc + t;
                    Some(*acc)
                })
                .collect();
            for _ in 0..order {
                let mut running = czero::<T>();
                seq = seq
                    .iter()
                    .enumerate()
                    .map(|(n, &s)| {
                        running = running + s;
                        running / from_usize::<T>(n + 1)
                    })
                    .collect();
            }
            last_two(&seq)
        }
        ImageSummation::Plain => {
            let seq: Vec<Complex<T>> = paired
                .iter()
                .scan(czero::<T>(), |acc, &t| {
                    *acc = *acc + t;
                    Some(*acc)
                })
                .collect();
            last_two(&seq)
        }
    }
}

fn last_two<T: Real>(seq: &[Complex<T>]) -> SeriesValue<T> {
    let last = seq[seq.len() - 1];
    let prev = if seq.len() > 1 { seq[seq.len() - 2] } else { last };
    SeriesValue {
        value: last,
        error_estimate: (last - prev).norm(),
    }
}

fn image_distance<T: Real>(dx1: T, dx2: T, j: i64) -> T {
    let shifted = dx1 + T::TAU() * from_i64(j);
    (shifted * shifted + dx2 * dx2).sqrt()
}

/// Spatial image series of `G(x, y)`.
pub fn green_spatial<T: Real>(
    x: Point<T>,
    y: Point<T>,
    params: &MediumParams<T>,
    opts: &GreensEvalOptions<T>,
) -> Result<SeriesValue<T>> {
    let dx1 = x[0] - y[0];
    let dx2 = x[1] - y[1];
    let n = opts.image_trunc.max(1);
    let tiny = T::epsilon() * lit(16.0);
    for j in -(n as i64)..=(n as i64) {
        let scale = T::one() + T::TAU() * from_i64::<T>(j).abs();
        if image_distance(dx1, dx2, j) <= tiny * scale {
            return Err(Error::SingularPoint { image: j });
        }
    }
    let k = params.k();
    let alpha = params.alpha();
    let quarter_i = Complex::new(T::zero(), lit(0.25));
    Ok(sum_images(n, opts.accel, |j| {
        let phase = cis(-T::TAU() * from_i64::<T>(j) * alpha);
        quarter_i * phase * hankel1_0(k * image_distance(dx1, dx2, j))
    }))
}

/// Rayleigh coefficients `(g_j^+(z), g_j^-(z))` of `G(., z)` on `Gamma_{+-h}`.
pub fn g_coeffs<T: Real>(z: Point<T>, j: i64, params: &MediumParams<T>) -> (Complex<T>, Complex<T>) {
    let beta = params.beta(j);
    let h = params.h();
    let pref = ci::<T>() / (beta * (lit::<T>(4.0) * T::PI()));
    let lateral = Complex::new(T::zero(), -params.alpha_j(j) * z[0]);
    let plus = pref * (lateral - ci::<T>() * beta * (z[1] - h)).exp();
    let minus = pref * (lateral + ci::<T>() * beta * (z[1] + h)).exp();
    (plus, minus)
}

/// Finite modal form `F(zt, zs) = 2pi sum_{prop} beta_j (conj g_j^+(zt) g_j^+(zs) + conj g_j^-(zt) g_j^-(zs))`.
pub fn kernel_f_modal<T: Real>(zt: Point<T>, zs: Point<T>, params: &MediumParams<T>) -> Complex<T> {
    let sum = params
        .propagating_set()
        .into_iter()
        .fold(czero::<T>(), |acc, j| {
            let (tp, tm) = g_coeffs(zt, j, params);
            let (sp, sm) = g_coeffs(zs, j, params);
            acc + (tp.conj() * sp + tm.conj() * sm) * params.beta(j).re
        });
    sum * T::TAU()
}

/// Image form `F(z, y) = (1/4) [J0(k|z-y|) + w_alpha(z, y)]`.
pub fn kernel_f_spatial<T: Real>(
    z: Point<T>,
    y: Point<T>,
    params: &MediumParams<T>,
    opts: &GreensEvalOptions<T>,
) -> SeriesValue<T> {
    let dx1 = z[0] - y[0];
    let dx2 = z[1] - y[1];
    let k = params.k();
    let alpha = params.alpha();
    let quarter = lit::<T>(0.25);
    sum_images(opts.image_trunc.max(1), opts.accel, |j| {
        cis(-T::TAU() * from_i64::<T>(j) * alpha) * (quarter * bessel_j0(k * image_distance(dx1, dx2, j)))
    })
}

/// The two panels of the kernel figure for source point `y = 0`:
/// `|J0(k|z|)|` and `|J0(k|z|) + w_alpha(z, 0)|` on `grid`, x2-major.
pub fn kernel_heatmaps<T: Real>(
    params: &MediumParams<T>,
    grid: &Grid2D<T>,
    opts: &GreensEvalOptions<T>,
) -> (Vec<T>, Vec<T>) {
    use rayon::prelude::*;
    let origin = [T::zero(), T::zero()];
    (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let z = grid.point(idx);
            let r = (z[0] * z[0] + z[1] * z[1]).sqrt();
            let free = bessel_j0(params.k() * r).abs();
            let periodic = kernel_f_spatial(z, origin, params, opts).value.norm() * lit(4.0);
            (free, periodic)
        })
        .unzip()
}
