//! Measurement protocol: source layout and synthetic data generation.

use rayon::prelude::*;

use crate::data::{RayleighData, SourceRecord};
use crate::error::{Error, Result};
use crate::forward::{
    rayleigh_from_trace, rayleigh_from_volume, synthesize_trace, ForwardSolver, IncidentSpec, SolverConfig, Trace,
    DEFAULT_TRACE_POINTS,
};
use crate::real::{from_usize, lit, Point, Real};
use crate::scatterers::Scene;

/// Height of the two source lines `x2 = +-3`.
pub const SOURCE_HEIGHT: f64 = 3.0;

/// `n/2` cell-centred points on `x2 = +3`, then `n/2` on `x2 = -3`.
pub fn source_layout<T: Real>(n: usize) -> Result<Vec<Point<T>>> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidConfig(format!(
            "source count must be even and at least 2, got {n}"
        )));
    }
    let half = n / 2;
    let step = T::TAU() / from_usize(half);
    let xs: Vec<T> = (0..half)
        .map(|i| -T::PI() + (from_usize::<T>(i) + lit(0.5)) * step)
        .collect();
    let height: T = lit(SOURCE_HEIGHT);
    Ok(xs
        .iter()
        .map(|&x| [x, height])
        .chain(xs.iter().map(|&x| [x, -height]))
        .collect())
}

/// How coefficients are extracted from each solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataRoute {
    /// Volume quadrature on the solver grid (all stored modes).
    Volume,
    /// Traces on `x2 = +-r_meas` with this many samples, projected back
    /// (propagating modes only).
    Trace { points: usize },
}

impl Default for DataRoute {
    fn default() -> Self {
        DataRoute::Trace {
            points: DEFAULT_TRACE_POINTS,
        }
    }
}

/// Solves one point-source problem per layout position and collects the
/// coefficients. Solves run in parallel; results keep layout order.
pub fn generate_data<T: Real>(
    scene: &Scene<T>,
    n_sources: usize,
    cfg: SolverConfig<T>,
    route: DataRoute,
) -> Result<RayleighData<T>> {
    generate_data_with_progress(scene, n_sources, cfg, route, &|_| {})
}

/// [`generate_data`] with a callback invoked with the source id after each solve.
pub fn generate_data_with_progress<T: Real>(
    scene: &Scene<T>,
    n_sources: usize,
    cfg: SolverConfig<T>,
    route: DataRoute,
    progress: &(dyn Fn(usize) + Sync),
) -> Result<RayleighData<T>> {
    Ok(generate_with_traces(scene, n_sources, cfg, route, progress)?.0)
}

/// Data plus, per source id, the scattered trace on `x2 = +-r_meas`
/// synthesized from every stored mode at the default sample count.
pub fn generate_with_traces<T: Real>(
    scene: &Scene<T>,
    n_sources: usize,
    cfg: SolverConfig<T>,
    route: DataRoute,
    progress: &(dyn Fn(usize) + Sync),
) -> Result<(RayleighData<T>, Vec<(usize, Trace<T>)>)> {
    let layout = source_layout::<T>(n_sources)?;
    let solver = ForwardSolver::new(scene, cfg)?;
    let r = scene.params.r_meas();
    let parts = layout
        .par_iter()
        .enumerate()
        .map(|(id, &position)| {
            let incident = IncidentSpec::PointSource { position };
            let sol = solver.solve(incident)?;
            let vol = rayleigh_from_volume(&sol, scene)?;
            let full = synthesize_trace(&vol, 0, r, DEFAULT_TRACE_POINTS)?;
            let mut data = match route {
                DataRoute::Volume => vol,
                DataRoute::Trace { points } if points == DEFAULT_TRACE_POINTS => rayleigh_from_trace(&full, &scene.params)?,
                DataRoute::Trace { points } => {
                    rayleigh_from_trace(&synthesize_trace(&vol, 0, r, points)?, &scene.params)?
                }
            };
            data.set_source_record(
                0,
                SourceRecord {
                    id,
                    incident: Some(incident),
                },
            );
            progress(id);
            Ok((data, (id, full)))
        })
        .collect::<Result<Vec<_>>>()?;
    let (data, traces): (Vec<_>, Vec<_>) = parts.into_iter().unzip();
    Ok((RayleighData::merge(data)?, traces))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::medium::MediumParams;
    use num_complex::Complex;
    use std::f64::consts::PI;

    #[test]
    fn layout_is_cell_centred_on_both_lines() {
        let s = source_layout::<f64>(8).unwrap();
        assert_eq!(s.len(), 8);
        assert_eq!(s[0], [-PI + PI / 4.0, 3.0]);
        assert!((s[3][0] - (PI - PI / 4.0)).abs() < 1e-15);
        assert_eq!(s[4], [-PI + PI / 4.0, -3.0]);
        assert!(source_layout::<f64>(3).is_err());
        assert!(source_layout::<f64>(0).is_err());
    }

    #[test]
    fn empty_scene_gives_zero_data() {
        let p = MediumParams::new(2.0 * PI, 0.0, 1.0, 2.0).unwrap();
        let d = generate_data(&Scene::empty(p), 2, SolverConfig::with_grid(16, 16), DataRoute::default()).unwrap();
        assert_eq!(d.n_sources(), 2);
        assert_eq!(d.window(), -6..=6);
        assert!(d.source_coeffs(1).iter().flatten().all(|c| *c == Complex::new(0.0, 0.0)));
        assert_eq!(d.sources()[1].id, 1);
    }
}
