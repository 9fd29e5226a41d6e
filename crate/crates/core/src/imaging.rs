//! Sampling indicators over propagating Rayleigh data, indicator maps and
//! reconstruction metrics.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::RayleighData;
use crate::error::{Error, Result};
use crate::greens::g_coeffs;
use crate::grid::Grid2D;
use crate::real::{czero, from_usize, lit, to_f64, Point, Real};
use crate::scatterers::Scene;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Propagating modes weighted by `beta_j`.
    Proposed,
    /// Orthogonality sampling: unweighted propagating modes.
    Osm,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Proposed => "proposed",
            Method::Osm => "osm",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proposed" => Ok(Method::Proposed),
            "osm" => Ok(Method::Osm),
            other => Err(Error::InvalidConfig(format!(
                "unknown method '{other}', expected proposed or osm"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImagingConfig<T> {
    pub p: u32,
    pub grid: Grid2D<T>,
    pub method: Method,
}

impl<T: Real> Default for ImagingConfig<T> {
    fn default() -> Self {
        Self {
            p: 4,
            grid: Grid2D::new(-T::PI(), T::PI(), -T::one(), T::one(), 128, 96).expect("static grid"),
            method: Method::Proposed,
        }
    }
}

impl<T: Real> ImagingConfig<T> {
    /// Exponent at least 1 and sampling rows inside `|x2| <= h`.
    pub fn validate(&self, h: T) -> Result<()> {
        if self.p < 1 {
            return Err(Error::InvalidConfig("exponent p must be at least 1".into()));
        }
        if self.grid.x2_min < -h || self.grid.x2_max > h {
            return Err(Error::InvalidConfig(format!(
                "sampling grid x2 in [{}, {}] leaves the slab |x2| <= {h}",
                self.grid.x2_min, self.grid.x2_max
            )));
        }
        Ok(())
    }
}

/// Per-mode weight and the conjugated `g_j^+-(z)` for every propagating `j`.
fn probe<T: Real>(data: &RayleighData<T>, z: Point<T>, method: Method) -> Vec<(usize, Complex<T>, Complex<T>)> {
    let params = data.params();
    let start = *data.window().start();
    data.prop_set()
        .into_iter()
        .map(|j| {
            let (gp, gm) = g_coeffs(z, j, params);
            let w = match method {
                Method::Proposed => params.beta(j).re,
                Method::Osm => T::one(),
            };
            ((j - start) as usize, gp.conj() * w, gm.conj() * w)
        })
        .collect()
}

fn inner<T: Real>(coeffs: &[[Complex<T>; 2]], probe: &[(usize, Complex<T>, Complex<T>)]) -> Complex<T> {
    probe
        .iter()
        .fold(czero(), |acc, &(slot, gp, gm)| acc + coeffs[slot][0] * gp + coeffs[slot][1] * gm)
}

/// `S_l(z) = sum_prop w_j (u_j^+(l) conj g_j^+(z) + u_j^-(l) conj g_j^-(z))`.
pub fn inner_sum<T: Real>(data: &RayleighData<T>, l: usize, z: Point<T>, method: Method) -> Complex<T> {
    inner(data.source_coeffs(l), &probe(data, z, method))
}

fn indicator_with<T: Real>(data: &RayleighData<T>, z: Point<T>, p: u32, method: Method) -> T {
    let pr = probe(data, z, method);
    (0..data.n_sources()).fold(T::zero(), |acc, l| acc + inner(data.source_coeffs(l), &pr).norm().powi(p as i32))
}

/// `I(z) = sum_l |S_l(z)|^p` with `beta_j` weights.
pub fn indicator_point<T: Real>(data: &RayleighData<T>, z: Point<T>, p: u32) -> T {
    indicator_with(data, z, p, Method::Proposed)
}

/// Same double sum without the `beta_j` weights.
pub fn indicator_osm_point<T: Real>(data: &RayleighData<T>, z: Point<T>, p: u32) -> T {
    indicator_with(data, z, p, Method::Osm)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorMap<T> {
    pub grid: Grid2D<T>,
    /// Raw indicator values, x2-major.
    pub values: Vec<T>,
    pub max: T,
    pub method: Method,
    pub p: u32,
}

impl<T: Real> IndicatorMap<T> {
    /// Values divided by the maximum; all zeros when the map vanishes.
    pub fn normalized(&self) -> Vec<T> {
        if self.max > T::zero() {
            self.values.iter().map(|&v| v / self.max).collect()
        } else {
            vec![T::zero(); self.values.len()]
        }
    }

    /// Flat index of the first maximal value.
    pub fn argmax(&self) -> usize {
        self.values
            .iter()
            .enumerate()
            .fold(0, |best, (i, &v)| if v > self.values[best] { i } else { best })
    }
}

/// Indicator over every node of `cfg.grid`.
pub fn indicator_map<T: Real>(data: &RayleighData<T>, cfg: &ImagingConfig<T>) -> Result<IndicatorMap<T>> {
    cfg.validate(data.params().h())?;
    let grid = cfg.grid;
    let values: Vec<T> = (0..grid.len())
        .into_par_iter()
        .map(|idx| indicator_with(data, grid.point(idx), cfg.p, cfg.method))
        .collect();
    let max = values.iter().copied().fold(T::zero(), T::max);
    Ok(IndicatorMap {
        grid,
        values,
        max,
        method: cfg.method,
        p: cfg.p,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub argmax_error: f64,
    pub jaccard: f64,
    pub contrast_ratio: f64,
    pub max_raw: f64,
}

/// Dilation radius around the support for the contrast ratio.
pub const DILATION: f64 = 0.2;
/// Default level for the thresholded support.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

fn wrap<T: Real>(x1: T) -> T {
    let tau = T::TAU();
    x1 - tau * ((x1 + T::PI()) / tau).floor()
}

/// Whether `z` lies within `radius` of the support, sampled on rings.
fn near_support<T: Real>(scene: &Scene<T>, z: Point<T>, radius: T) -> bool {
    const RINGS: usize = 8;
    const SPOKES: usize = 48;
    let inside = |p: Point<T>| scene.contrast_at([wrap(p[0]), p[1]]) != czero();
    if inside(z) {
        return true;
    }
    (1..=RINGS).any(|ri| {
        let rho = radius * from_usize::<T>(ri) / from_usize::<T>(RINGS);
        (0..SPOKES).any(|s| {
            let th = T::TAU() * from_usize::<T>(s) / from_usize::<T>(SPOKES);
            inside([z[0] + rho * th.cos(), z[1] + rho * th.sin()])
        })
    })
}

/// Distance from `z` to the nearest support point, periodic in `x1`,
/// resolved on a fine raster of the slab.
fn distance_to_support<T: Real>(scene: &Scene<T>, z: Point<T>) -> T {
    if scene.contrast_at([wrap(z[0]), z[1]]) != czero() {
        return T::zero();
    }
    let h = scene.params.h();
    let raster = Grid2D::new(-T::PI(), T::PI(), -h, h, 1024, 512).expect("static grid");
    let tau = T::TAU();
    (0..raster.len())
        .filter_map(|idx| {
            let y = raster.point(idx);
            if scene.contrast_at(y) == czero() {
                return None;
            }
            let d1 = (z[0] - y[0]).abs() % tau;
            let d1 = d1.min(tau - d1);
            let d2 = z[1] - y[1];
            Some((d1 * d1 + d2 * d2).sqrt())
        })
        .fold(None, |acc: Option<T>, d| Some(acc.map_or(d, |a| a.min(d))))
        .unwrap_or(T::infinity())
}

/// Argmax distance to the support, Jaccard index of the thresholded map
/// against the rasterized support, and the mean normalized value inside the
/// support over the mean outside its `0.2`-dilation. A map with no mass
/// outside the dilation and none inside has ratio 1.
pub fn metrics<T: Real>(map: &IndicatorMap<T>, scene: &Scene<T>, threshold_frac: T) -> Result<Metrics> {
    if scene.is_empty() {
        return Err(Error::EmptyScene);
    }
    if !(threshold_frac > T::zero() && threshold_frac < T::one()) {
        return Err(Error::InvalidConfig(format!(
            "threshold fraction must lie in (0, 1), got {threshold_frac}"
        )));
    }
    let grid = map.grid;
    let norm = map.normalized();
    let support: Vec<bool> = (0..grid.len())
        .map(|idx| scene.contrast_at(grid.point(idx)) != czero())
        .collect();

    let argmax_error = distance_to_support(scene, grid.point(map.argmax()));

    let (mut inter, mut union) = (0usize, 0usize);
    for (&v, &s) in norm.iter().zip(&support) {
        let sel = v >= threshold_frac;
        inter += (sel && s) as usize;
        union += (sel || s) as usize;
    }
    let jaccard = if union == 0 { 0.0 } else { inter as f64 / union as f64 };

    let dil: T = lit(DILATION);
    let (mut sum_in, mut n_in, mut sum_out, mut n_out) = (0.0, 0usize, 0.0, 0usize);
    for (idx, (&v, &s)) in norm.iter().zip(&support).enumerate() {
        if s {
            sum_in += to_f64(v);
            n_in += 1;
        } else if !near_support(scene, grid.point(idx), dil) {
            sum_out += to_f64(v);
            n_out += 1;
        }
    }
    let mean_in = if n_in > 0 { sum_in / n_in as f64 } else { 0.0 };
    let mean_out = if n_out > 0 { sum_out / n_out as f64 } else { 0.0 };
    let contrast_ratio = if mean_out > 0.0 {
        mean_in / mean_out
    } else if mean_in > 0.0 {
        f64::INFINITY
    } else {
        1.0
    };
    Ok(Metrics {
        argmax_error: to_f64(argmax_error),
        jaccard,
        contrast_ratio,
        max_raw: to_f64(map.max),
    })
}
