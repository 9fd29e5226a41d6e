//! Multiplicative uniform-disc noise on propagating Rayleigh coefficients.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::data::RayleighData;
use crate::error::{Error, Result};
use crate::real::{lit, to_f64, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec<T> {
    delta: T,
    seed: u64,
}

impl<T: Real> NoiseSpec<T> {
    /// `delta` must lie in `[0, 1)`.
    pub fn new(delta: T, seed: u64) -> Result<Self> {
        if !(delta >= T::zero() && delta < T::one()) {
            return Err(Error::InvalidNoiseLevel(to_f64(delta)));
        }
        Ok(Self { delta, seed })
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Generator for one source: ChaCha20 keyed by the global seed, with the
/// source id as stream number, so draws do not depend on source order.
fn source_rng(seed: u64, source_id: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(source_id as u64);
    rng
}

/// Uniform sample of the closed unit disc.
fn unit_disc<T: Real>(rng: &mut ChaCha20Rng) -> Complex<T> {
    let u: f64 = rng.gen();
    let v: f64 = rng.gen();
    let r = u.sqrt();
    let theta = std::f64::consts::TAU * v;
    Complex::new(lit(r * theta.cos()), lit(r * theta.sin()))
}

/// `c -> c (1 + delta zeta)` on every propagating coefficient; evanescent
/// slots pass through. Also returns the realized aggregate level
/// `sum_l ||Delta u_l|| / sum_l ||u_l||` in the `L^2(Gamma_{+-h})` norm.
pub fn perturb<T: Real>(data: &RayleighData<T>, spec: &NoiseSpec<T>) -> (RayleighData<T>, T) {
    let mut out = data.clone();
    if spec.delta == T::zero() {
        return (out, T::zero());
    }
    let prop = data.prop_set();
    let start = *data.window().start();
    let tau = T::TAU();
    let (mut num, mut den) = (T::zero(), T::zero());
    for l in 0..data.n_sources() {
        let mut rng = source_rng(spec.seed, data.sources()[l].id);
        let coeffs = out.source_coeffs_mut(l);
        let (mut dn, mut dd) = (T::zero(), T::zero());
        for &j in &prop {
            let pair = &mut coeffs[(j - start) as usize];
            for c in pair.iter_mut() {
                let zeta = unit_disc::<T>(&mut rng);
                let delta = *c * zeta * spec.delta;
                dn = dn + delta.norm_sqr();
                dd = dd + c.norm_sqr();
                *c = *c + delta;
            }
        }
        num = num + (tau * dn).sqrt();
        den = den + (tau * dd).sqrt();
    }
    let achieved = if den > T::zero() { num / den } else { T::zero() };
    (out, achieved)
}
