//! Direct scattering: Lippmann-Schwinger solve on a periodized box, and the
//! Rayleigh data extracted from it.

mod expansion;
pub mod gmres;
pub mod operator;

use num_complex::Complex;

pub use expansion::{
    energy_balance, rayleigh_from_trace, rayleigh_from_volume, scattered_field_at, scattered_trace,
    synthesize_trace, Trace, DEFAULT_TRACE_POINTS,
};
use gmres::{gmres, GmresConfig};
use operator::LsOperator;

use crate::error::{Error, Result};
use crate::grid::{ComplexField, Grid2D};
use crate::medium::MediumParams;
use crate::real::{ci, cis, czero, from_i64, lit, to_f64, Point, Real};
use crate::scatterers::Scene;

/// Propagation direction of a plane wave along `x2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
}

/// Incident field: the quasi-periodic point source `G(., s)` or the plane
/// wave `e^{i(alpha x1 -+ beta_0 x2)}` (minus sign for `Down`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IncidentSpec<T> {
    PointSource { position: Point<T> },
    PlaneWave { direction: Direction },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T> {
    pub n1: usize,
    pub n2: usize,
    /// Relative residual target.
    pub tol: T,
    pub max_iter: usize,
    pub restart: usize,
    /// Box half-height is `2h + margin`.
    pub margin: T,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            n1: 256,
            n2: 256,
            tol: lit(1e-10),
            max_iter: 2000,
            restart: 200,
            margin: lit(0.25),
        }
    }
}

impl<T: Real> SolverConfig<T> {
    pub fn with_grid(n1: usize, n2: usize) -> Self {
        Self {
            n1,
            n2,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForwardSolution<T> {
    /// Total field `u = u_in + u_sc` on the solver grid.
    pub total_field: ComplexField<T>,
    pub incident: IncidentSpec<T>,
    /// Achieved relative residual.
    pub residual: T,
    pub iterations: usize,
}

impl<T: Real> ForwardSolution<T> {
    pub fn grid(&self) -> &Grid2D<T> {
        &self.total_field.grid
    }
}

/// Cell-centred grid over `(-pi, pi) x (-R, R)` with `R = 2h + margin`.
pub fn solver_grid<T: Real>(params: &MediumParams<T>, cfg: &SolverConfig<T>) -> Result<Grid2D<T>> {
    let r = lit::<T>(2.0) * params.h() + cfg.margin;
    Grid2D::new(-T::PI(), T::PI(), -r, r, cfg.n1, cfg.n2)
}

/// Samples of the incident field on `grid`.
pub fn incident_field<T: Real>(spec: &IncidentSpec<T>, grid: &Grid2D<T>, params: &MediumParams<T>) -> Result<ComplexField<T>> {
    let v = incident_periodic(spec, grid, params)?;
    let alpha = params.alpha();
    let values = v
        .iter()
        .enumerate()
        .map(|(idx, &vi)| vi * cis(alpha * grid.point(idx)[0]))
        .collect();
    ComplexField::new(*grid, values)
}

/// Minimum vertical distance between a point source and the grid rows.
const SOURCE_ROW_CLEARANCE: f64 = 1e-3;

/// `e^{-i alpha x1} u_in`, which is `2 pi`-periodic in `x1`.
fn incident_periodic<T: Real>(spec: &IncidentSpec<T>, grid: &Grid2D<T>, params: &MediumParams<T>) -> Result<Vec<Complex<T>>> {
    let (n1, n2) = (grid.n1, grid.n2);
    match *spec {
        IncidentSpec::PlaneWave { direction } => {
            let beta0 = params.beta(0);
            if beta0.im != T::zero() {
                return Err(Error::EvanescentPlaneWave);
            }
            let s = match direction {
                Direction::Up => T::one(),
                Direction::Down => -T::one(),
            };
            let mut out = Vec::with_capacity(n1 * n2);
            for i2 in 0..n2 {
                let row = cis(s * beta0.re * grid.x2(i2));
                out.extend(std::iter::repeat(row).take(n1));
            }
            Ok(out)
        }
        IncidentSpec::PointSource { position: [s1, s2] } => {
            if s2.abs() <= params.h() {
                return Err(Error::SourceInsideSlab {
                    x2: to_f64(s2),
                    h: to_f64(params.h()),
                });
            }
            let gap = (0..n2).map(|i2| (grid.x2(i2) - s2).abs()).fold(T::infinity(), T::min);
            if gap < lit(SOURCE_ROW_CLEARANCE) {
                return Err(Error::TooCloseVertically {
                    separation: to_f64(gap),
                    switch: SOURCE_ROW_CLEARANCE,
                });
            }
            // evanescent terms decay like e^{-|beta_j| gap}; stop below e^{-40}
            let reach = (params.k() * params.k() + (lit::<T>(40.0) / gap).powi(2)).sqrt();
            let lo = (-reach - params.alpha()).floor().to_i64().unwrap_or(0);
            let hi = (reach - params.alpha()).ceil().to_i64().unwrap_or(0);
            let modes: Vec<(T, Complex<T>, Complex<T>)> = (lo..=hi)
                .map(|j| {
                    let beta = params.beta(j);
                    let aj = params.alpha_j(j);
                    let amp = ci::<T>() / (beta * (lit::<T>(4.0) * T::PI())) * cis(-aj * s1);
                    (from_i64::<T>(j), beta, amp)
                })
                .collect();
            // phases[i1 * nm + m] = e^{i j_m x1}
            let nm = modes.len();
            let mut phases = Vec::with_capacity(n1 * nm);
            for i1 in 0..n1 {
                let x1 = grid.x1(i1);
                phases.extend(modes.iter().map(|&(j, _, _)| cis(j * x1)));
            }
            let mut out = vec![czero(); n1 * n2];
            let mut row_amp = vec![czero::<T>(); modes.len()];
            for i2 in 0..n2 {
                let d = (grid.x2(i2) - s2).abs();
                for (a, &(_, beta, amp)) in row_amp.iter_mut().zip(&modes) {
                    *a = amp * (ci::<T>() * beta * d).exp();
                }
                let row = &mut out[i2 * n1..(i2 + 1) * n1];
                for (v, ph) in row.iter_mut().zip(phases.chunks_exact(nm)) {
                    *v = row_amp.iter().zip(ph).fold(czero(), |acc, (&a, &e)| acc + a * e);
                }
            }
            Ok(out)
        }
    }
}

/// Solver bound to one scene: operator and grid are built once and reused
/// for every incident field.
pub struct ForwardSolver<T: Real> {
    params: MediumParams<T>,
    grid: Grid2D<T>,
    cfg: SolverConfig<T>,
    op: LsOperator<T>,
    empty: bool,
}

impl<T: Real> ForwardSolver<T> {
    pub fn new(scene: &Scene<T>, cfg: SolverConfig<T>) -> Result<Self> {
        let grid = solver_grid(&scene.params, &cfg)?;
        let q = scene.rasterize(&grid).values;
        let empty = q.iter().all(|c| *c == czero());
        let op = LsOperator::new(&scene.params, &grid, q)?;
        Ok(Self {
            params: scene.params,
            grid,
            cfg,
            op,
            empty,
        })
    }

    pub fn grid(&self) -> &Grid2D<T> {
        &self.grid
    }

    pub fn params(&self) -> &MediumParams<T> {
        &self.params
    }

    /// Rasterized contrast on the solver grid.
    pub fn contrast(&self) -> &[Complex<T>] {
        self.op.contrast()
    }

    pub fn solve(&self, spec: IncidentSpec<T>) -> Result<ForwardSolution<T>> {
        let rhs = incident_periodic(&spec, &self.grid, &self.params)?;
        let (v, residual, iterations) = if self.empty {
            (rhs, T::zero(), 0)
        } else {
            let out = gmres(
                &self.op,
                &rhs,
                None,
                &GmresConfig {
                    tol: self.cfg.tol,
                    max_iter: self.cfg.max_iter,
                    restart: self.cfg.restart,
                },
            );
            if !out.converged {
                return Err(Error::SolverDiverged {
                    iterations: out.iterations,
                    residual: to_f64(out.residual),
                });
            }
            (out.x, out.residual, out.iterations)
        };
        let alpha = self.params.alpha();
        let values = v
            .into_iter()
            .enumerate()
            .map(|(idx, vi)| vi * cis(alpha * self.grid.point(idx)[0]))
            .collect();
        Ok(ForwardSolution {
            total_field: ComplexField::new(self.grid, values)?,
            incident: spec,
            residual,
            iterations,
        })
    }
}

/// One-shot solve; prefer [`ForwardSolver`] when several incident fields share a scene.
pub fn solve_total_field<T: Real>(scene: &Scene<T>, spec: IncidentSpec<T>, cfg: SolverConfig<T>) -> Result<ForwardSolution<T>> {
    ForwardSolver::new(scene, cfg)?.solve(spec)
}
