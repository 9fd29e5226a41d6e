//! Rayleigh coefficients from the volume and from traces, trace synthesis,
//! and the energy-balance check.

use num_complex::Complex;

use super::{Direction, ForwardSolution, IncidentSpec};
use crate::data::{DataOrigin, RayleighData, SourceRecord};
use crate::error::{Error, Result};
use crate::greens::{green_modal, GreensEvalOptions};
use crate::medium::MediumParams;
use crate::real::{ci, cis, czero, from_usize, lit, Point, Real};
use crate::scatterers::Scene;

/// Samples per measurement line.
pub const DEFAULT_TRACE_POINTS: usize = 64;

/// Scattered field on `x2 = r` (`upper`) and `x2 = -r` (`lower`) at the
/// cell-centred nodes `x1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace<T> {
    pub r: T,
    pub x1: Vec<T>,
    pub upper: Vec<Complex<T>>,
    pub lower: Vec<Complex<T>>,
}

/// `x1_n = -pi + (n + 1/2) 2 pi / m`.
fn trace_nodes<T: Real>(m: usize) -> Vec<T> {
    let step = lit::<T>(2.0) * T::PI() / from_usize(m);
    (0..m)
        .map(|n| -T::PI() + (from_usize::<T>(n) + lit(0.5)) * step)
        .collect()
}

/// `u_j^+- = k^2 int g_j^+-(y) q(y) u(y) dy` by the trapezoidal rule on the
/// solver grid, for every `j` in the storage window.
pub fn rayleigh_from_volume<T: Real>(sol: &ForwardSolution<T>, scene: &Scene<T>) -> Result<RayleighData<T>> {
    let params = &scene.params;
    let grid = sol.grid();
    let q = scene.rasterize(grid).values;
    let window = params.storage_window();
    let modes: Vec<i64> = window.clone().collect();
    let (n1, n2) = (grid.n1, grid.n2);

    // phases[i1 * nm + m] = e^{-i alpha_j y1}
    let nm = modes.len();
    let mut phases = Vec::with_capacity(n1 * nm);
    for i1 in 0..n1 {
        let y1 = grid.x1(i1);
        phases.extend(modes.iter().map(|&j| cis(-params.alpha_j(j) * y1)));
    }
    let betas: Vec<Complex<T>> = modes.iter().map(|&j| params.beta(j)).collect();
    let h = params.h();
    let mut plus = vec![czero::<T>(); nm];
    let mut minus = vec![czero::<T>(); nm];
    let mut row_sum = vec![czero::<T>(); nm];
    for i2 in 0..n2 {
        let base = i2 * n1;
        if q[base..base + n1].iter().all(|c| *c == czero()) {
            continue;
        }
        row_sum.iter_mut().for_each(|s| *s = czero());
        for i1 in 0..n1 {
            let qu = q[base + i1] * sol.total_field.values[base + i1];
            if qu == czero() {
                continue;
            }
            for (s, &e) in row_sum.iter_mut().zip(&phases[i1 * nm..(i1 + 1) * nm]) {
                *s = *s + e * qu;
            }
        }
        let y2 = grid.x2(i2);
        for m in 0..nm {
            let b = betas[m];
            plus[m] = plus[m] + row_sum[m] * (-ci::<T>() * b * (y2 - h)).exp();
            minus[m] = minus[m] + row_sum[m] * (ci::<T>() * b * (y2 + h)).exp();
        }
    }
    let k2w = params.k() * params.k() * grid.cell_area();
    let coeffs = (0..nm)
        .map(|m| {
            let f = ci::<T>() / (betas[m] * (lit::<T>(4.0) * T::PI())) * k2w;
            [plus[m] * f, minus[m] * f]
        })
        .collect();
    let mut data = RayleighData::new(*params, window, DataOrigin::Volume)?;
    data.push_source(
        SourceRecord {
            id: 0,
            incident: Some(sol.incident),
        },
        coeffs,
    )?;
    Ok(data)
}

/// Scattered field on `x2 = +-r` at `m` points, summed over every stored mode
/// of source slot `l`.
pub fn synthesize_trace<T: Real>(data: &RayleighData<T>, l: usize, r: T, m: usize) -> Result<Trace<T>> {
    let params = data.params();
    if !(r >= params.h()) {
        return Err(Error::BadGeometry(format!(
            "trace height r={r} must be at least h={}",
            params.h()
        )));
    }
    let x1 = trace_nodes::<T>(m);
    let mut upper = vec![czero::<T>(); m];
    let mut lower = vec![czero::<T>(); m];
    let lift = r - params.h();
    for j in data.window() {
        let [cp, cm] = data.coeff(l, j);
        let decay = (ci::<T>() * params.beta(j) * lift).exp();
        let (cp, cm) = (cp * decay, cm * decay);
        let aj = params.alpha_j(j);
        for (n, &x) in x1.iter().enumerate() {
            let e = cis(aj * x);
            upper[n] = upper[n] + cp * e;
            lower[n] = lower[n] + cm * e;
        }
    }
    Ok(Trace { r, x1, upper, lower })
}

/// Scattered trace of one solution on `x2 = +-r` at the default sample count.
pub fn scattered_trace<T: Real>(sol: &ForwardSolution<T>, scene: &Scene<T>, r: T) -> Result<Trace<T>> {
    synthesize_trace(&rayleigh_from_volume(sol, scene)?, 0, r, DEFAULT_TRACE_POINTS)
}

/// Propagating coefficients recovered from a trace by discrete Fourier
/// projection and the shift `e^{-i beta_j (r - h)}` back to `x2 = +-h`.
/// Evanescent slots of the returned window are left at zero.
pub fn rayleigh_from_trace<T: Real>(trace: &Trace<T>, params: &MediumParams<T>) -> Result<RayleighData<T>> {
    let m = trace.x1.len();
    if m == 0 || trace.upper.len() != m || trace.lower.len() != m {
        return Err(Error::Format("trace sample arrays have inconsistent lengths".into()));
    }
    let prop = params.propagating_set();
    let (lo, hi) = (-((m / 2) as i64), ((m - 1) / 2) as i64);
    if let Some(&j) = prop.iter().find(|&&j| j < lo || j > hi) {
        return Err(Error::AliasedMode { j, points: m });
    }
    let window = match (prop.first(), prop.last()) {
        (Some(&a), Some(&b)) => a..=b,
        _ => 0..=0,
    };
    let lift = trace.r - params.h();
    let inv_m = T::one() / from_usize::<T>(m);
    let coeffs = window
        .clone()
        .map(|j| {
            let beta = params.beta(j);
            if beta.im != T::zero() {
                return [czero(), czero()];
            }
            let aj = params.alpha_j(j);
            let (mut up, mut dn) = (czero::<T>(), czero::<T>());
            for n in 0..m {
                let e = cis(-aj * trace.x1[n]);
                up = up + trace.upper[n] * e;
                dn = dn + trace.lower[n] * e;
            }
            let back = (-ci::<T>() * beta * lift).exp() * inv_m;
            [up * back, dn * back]
        })
        .collect();
    let mut data = RayleighData::new(*params, window, DataOrigin::Trace { r: trace.r })?;
    data.push_source(SourceRecord { id: 0, incident: None }, coeffs)?;
    Ok(data)
}

/// `|1 - sum_prop (beta_j / beta_0)(|R_j|^2 + |T_j|^2)|` for a downward plane
/// wave, with `R_j = u_j^+` and `T_j = u_j^- + delta_{j0} e^{i beta_0 h}`.
pub fn energy_balance<T: Real>(data: &RayleighData<T>, l: usize, scene: &Scene<T>) -> Result<T> {
    if !scene.is_lossless() {
        return Err(Error::LossyScene);
    }
    match data.sources().get(l).and_then(|s| s.incident) {
        Some(IncidentSpec::PlaneWave {
            direction: Direction::Down,
        }) => {}
        _ => return Err(Error::NotPlaneWave),
    }
    let params = data.params();
    let beta0 = params.beta(0);
    if beta0.im != T::zero() {
        return Err(Error::EvanescentPlaneWave);
    }
    let mut flux = T::zero();
    for j in params.propagating_set() {
        let [r, mut t] = data.coeff(l, j);
        if j == 0 {
            t = t + cis(beta0.re * params.h());
        }
        flux = flux + params.beta(j).re / beta0.re * (r.norm_sqr() + t.norm_sqr());
    }
    Ok((T::one() - flux).abs())
}

/// `u_sc(x) = k^2 int G(x, y) q(y) u(y) dy` with the modal Green's function,
/// for `x` outside the support rows.
pub fn scattered_field_at<T: Real>(sol: &ForwardSolution<T>, scene: &Scene<T>, x: Point<T>) -> Result<Complex<T>> {
    let grid = sol.grid();
    let q = scene.rasterize(grid).values;
    let opts = GreensEvalOptions::default();
    let mut acc = czero::<T>();
    for (idx, &qi) in q.iter().enumerate() {
        if qi == czero() {
            continue;
        }
        let g = green_modal(x, grid.point(idx), &scene.params, &opts)?.value;
        acc = acc + g * qi * sol.total_field.values[idx];
    }
    Ok(acc * (scene.params.k() * scene.params.k() * grid.cell_area()))
}
