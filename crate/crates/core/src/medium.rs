//! Physical parameters of the periodic medium and the Rayleigh mode arithmetic.

use std::ops::RangeInclusive;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::real::{from_i64, lit, to_f64, Real};

/// Default relative Wood-anomaly guard: `min_j |k^2 - alpha_j^2| >= WOOD_TOL * k^2`.
pub const DEFAULT_WOOD_TOL: f64 = 1e-6;

/// Wave number, quasi-periodicity and slab geometry. The period is fixed at `2 pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumParams<T> {
    k: T,
    alpha: T,
    h: T,
    r_meas: T,
    wood_tol: T,
}

/// One Rayleigh mode `(j, alpha_j, beta_j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode<T> {
    pub j: i64,
    pub alpha_j: T,
    pub beta_j: Complex<T>,
}

impl<T: Real> Mode<T> {
    /// `beta_j` real and positive.
    pub fn is_propagating(&self) -> bool {
        self.beta_j.im == T::zero()
    }
}

impl<T: Real> MediumParams<T> {
    pub fn new(k: T, alpha: T, h: T, r_meas: T) -> Result<Self> {
        Self::with_wood_tol(k, alpha, h, r_meas, lit(DEFAULT_WOOD_TOL))
    }

    pub fn with_wood_tol(k: T, alpha: T, h: T, r_meas: T, wood_tol: T) -> Result<Self> {
        if !(k > T::zero()) || !k.is_finite() {
            return Err(Error::NonPositiveWaveNumber(to_f64(k)));
        }
        if !alpha.is_finite() {
            return Err(Error::BadGeometry(format!("alpha must be finite, got {alpha}")));
        }
        if !(h > T::zero()) || !h.is_finite() {
            return Err(Error::BadGeometry(format!("h must be positive, got {h}")));
        }
        if !(r_meas >= h) || !r_meas.is_finite() {
            return Err(Error::BadGeometry(format!(
                "measurement height r_meas={r_meas} must be at least h={h}"
            )));
        }
        if !(wood_tol >= T::zero()) {
            return Err(Error::BadGeometry(format!("wood_tol must be non-negative, got {wood_tol}")));
        }
        let params = Self {
            k,
            alpha,
            h,
            r_meas,
            wood_tol,
        };
        let tol = wood_tol * k * k;
        // only modes with alpha_j near +-k can violate the guard
        let lo = (-k - alpha).floor().to_i64().unwrap_or(0) - 1;
        let hi = (k - alpha).ceil().to_i64().unwrap_or(0) + 1;
        for j in lo..=hi {
            let aj = alpha + from_i64(j);
            let gap = (k * k - aj * aj).abs();
            if gap < tol || gap == T::zero() {
                return Err(Error::WoodAnomalyProximity {
                    j,
                    gap: to_f64(gap),
                    tol: to_f64(tol),
                });
            }
        }
        Ok(params)
    }

    pub fn k(&self) -> T {
        self.k
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn h(&self) -> T {
        self.h
    }

    pub fn r_meas(&self) -> T {
        self.r_meas
    }

    pub fn wood_tol(&self) -> T {
        self.wood_tol
    }

    pub fn period(&self) -> T {
        T::TAU()
    }

    /// Same medium with a different measurement height.
    pub fn with_r_meas(&self, r_meas: T) -> Result<Self> {
        Self::with_wood_tol(self.k, self.alpha, self.h, r_meas, self.wood_tol)
    }

    pub fn alpha_j(&self, j: i64) -> T {
        self.alpha + from_i64(j)
    }

    /// `beta_j = sqrt(k^2 - alpha_j^2)` or `i sqrt(alpha_j^2 - k^2)`.
    pub fn beta(&self, j: i64) -> Complex<T> {
        let aj = self.alpha_j(j);
        let d = self.k * self.k - aj * aj;
        if d >= T::zero() {
            Complex::new(d.sqrt(), T::zero())
        } else {
            Complex::new(T::zero(), (-d).sqrt())
        }
    }

    pub fn mode(&self, j: i64) -> Mode<T> {
        Mode {
            j,
            alpha_j: self.alpha_j(j),
            beta_j: self.beta(j),
        }
    }

    /// Propagating indices `{ j : k^2 > alpha_j^2 }`, ascending.
    pub fn propagating_set(&self) -> Vec<i64> {
        let lo = (-self.k - self.alpha).floor().to_i64().unwrap_or(0);
        let hi = (self.k - self.alpha).ceil().to_i64().unwrap_or(0);
        (lo..=hi)
            .filter(|&j| {
                let aj = self.alpha_j(j);
                self.k * self.k > aj * aj
            })
            .collect()
    }

    /// Stored mode window: all `j` with `|alpha_j| <= k + 8/h`.
    pub fn storage_window(&self) -> RangeInclusive<i64> {
        let reach = self.k + lit::<T>(8.0) / self.h;
        let lo = (-reach - self.alpha).ceil().to_i64().unwrap_or(0);
        let hi = (reach - self.alpha).floor().to_i64().unwrap_or(0);
        lo..=hi
    }

    /// Largest `|j|` in the storage window.
    pub fn storage_extent(&self) -> usize {
        let w = self.storage_window();
        w.start().unsigned_abs().max(w.end().unsigned_abs()) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn brute_force(k: f64, alpha: f64) -> Vec<i64> {
        (-100..=100)
            .filter(|&j| {
                let a = alpha + j as f64;
                k * k > a * a
            })
            .collect()
    }

    #[test]
    fn reference_parameters_are_valid() {
        assert!(MediumParams::new(2.0 * PI, 0.0, 1.0, 2.0).is_ok());
        assert!(MediumParams::new(2.0 * PI, PI / 3.0, 1.0, 2.0).is_ok());
    }

    #[test]
    fn wood_anomaly_is_rejected() {
        match MediumParams::new(1.0, 0.0, 1.0, 2.0) {
            Err(Error::WoodAnomalyProximity { j, .. }) => assert_eq!(j.abs(), 1),
            other => panic!("expected Wood anomaly, got {other:?}"),
        }
    }

    #[test]
    fn bad_inputs() {
        assert!(matches!(
            MediumParams::new(0.0, 0.0, 1.0, 2.0),
            Err(Error::NonPositiveWaveNumber(_))
        ));
        assert!(matches!(
            MediumParams::new(-1.5, 0.0, 1.0, 2.0),
            Err(Error::NonPositiveWaveNumber(_))
        ));
        assert!(matches!(
            MediumParams::new(2.0 * PI, 0.0, 1.0, 0.5),
            Err(Error::BadGeometry(_))
        ));
        assert!(matches!(
            MediumParams::new(2.0 * PI, 0.0, 0.0, 1.0),
            Err(Error::BadGeometry(_))
        ));
    }

    #[test]
    fn beta_examples() {
        let p = MediumParams::new(2.0 * PI, 0.0, 1.0, 2.0).unwrap();
        assert_eq!(p.beta(0), Complex::new(2.0 * PI, 0.0));
        // mpmath: sqrt(4 pi^2 - 36), sqrt(49 - 4 pi^2)
        let b6 = p.beta(6);
        assert!((b6.re - 1.865_051_635_842_138).abs() < 1e-12 && b6.im == 0.0);
        let b7 = p.beta(7);
        assert!(b7.re == 0.0 && (b7.im - 3.085_706_142_140_331).abs() < 1e-12);
        assert!(p.mode(6).is_propagating());
        assert!(!p.mode(7).is_propagating());
    }

    #[test]
    fn propagating_set_examples() {
        let p = MediumParams::new(2.0 * PI, 0.0, 1.0, 2.0).unwrap();
        assert_eq!(p.propagating_set(), (-6..=6).collect::<Vec<_>>());
        let p = MediumParams::new(PI, 0.0, 1.0, 2.0).unwrap();
        assert_eq!(p.propagating_set(), (-3..=3).collect::<Vec<_>>());
        let p = MediumParams::new(0.5, 0.0, 1.0, 2.0).unwrap();
        assert_eq!(p.propagating_set(), vec![0]);
    }

    #[test]
    fn storage_window_covers_propagating_set() {
        let p = MediumParams::new(2.0 * PI, PI / 3.0, 1.0, 2.0).unwrap();
        let w = p.storage_window();
        for j in p.propagating_set() {
            assert!(w.contains(&j));
        }
        // |alpha_j| <= k + 8
        for j in w.clone() {
            assert!(p.alpha_j(j).abs() <= 2.0 * PI + 8.0);
        }
        assert!(p.alpha_j(w.start() - 1).abs() > 2.0 * PI + 8.0);
        assert!(p.alpha_j(w.end() + 1).abs() > 2.0 * PI + 8.0);
    }

    #[test]
    fn generic_over_f32() {
        let p = MediumParams::<f32>::new(std::f32::consts::TAU, 0.0, 1.0, 2.0).unwrap();
        assert_eq!(p.propagating_set().len(), 13);
    }

    proptest! {
        #[test]
        fn beta_branch_structure(k in 0.1f64..30.0, alpha in -0.5f64..0.5, j in -60i64..60) {
            if let Ok(p) = MediumParams::new(k, alpha, 1.0, 2.0) {
                let b = p.beta(j);
                prop_assert_eq!(b.re * b.im, 0.0);
                prop_assert!(b.re >= 0.0 && b.im >= 0.0);
                let aj = alpha + j as f64;
                let want = (k * k - aj * aj).abs();
                prop_assert!((b.norm_sqr() - want).abs() <= 1e-12 * want.max(1.0));
                prop_assert!((p.mode(j).alpha_j - alpha - j as f64).abs() <= 1e-13 * (j.abs() as f64 + 1.0));
            }
        }

        #[test]
        fn propagating_set_matches_brute_force(k in 0.1f64..40.0, alpha in -3.0f64..3.0) {
            if let Ok(p) = MediumParams::new(k, alpha, 1.0, 2.0) {
                prop_assert_eq!(p.propagating_set(), brute_force(k, alpha));
            }
        }
    }
}
