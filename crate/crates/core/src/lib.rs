//! Time-harmonic scattering of quasi-periodic waves by `2pi`-periodic
//! penetrable media in two dimensions, and reconstruction of the scatterer
//! support from propagating Rayleigh coefficients with a sampling indicator.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below are what the file formats and the command-line tool use.

pub mod config;
pub mod data;
pub mod error;
pub mod forward;
pub mod greens;
pub mod grid;
pub mod imaging;
pub mod io;
pub mod medium;
pub mod noise;
pub mod protocol;
pub mod real;
pub mod scatterers;
pub mod special;
pub mod verify;

pub use config::parse_scene;
pub use data::{DataOrigin, RayleighData, SourceRecord};
pub use error::{Error, Result};
pub use forward::{
    energy_balance, incident_field, rayleigh_from_trace, rayleigh_from_volume, scattered_trace,
    solve_total_field, Direction, ForwardSolution, ForwardSolver, IncidentSpec, SolverConfig, Trace,
};
pub use greens::{
    g_coeffs, green_modal, green_spatial, kernel_f_modal, kernel_f_spatial, kernel_heatmaps,
    GreensEvalOptions, ImageSummation, SeriesValue,
};
pub use grid::{ComplexField, Grid2D};
pub use imaging::{
    indicator_map, indicator_osm_point, indicator_point, metrics, ImagingConfig, IndicatorMap, Method, Metrics,
};
pub use noise::{perturb, NoiseSpec};
pub use protocol::{generate_data, generate_with_traces, source_layout, DataRoute};
pub use medium::{MediumParams, Mode, DEFAULT_WOOD_TOL};
pub use real::{Point, Real};

pub type MediumParams64 = MediumParams<f64>;
pub type MediumParams32 = MediumParams<f32>;
pub type Grid2D64 = Grid2D<f64>;
pub type ComplexField64 = ComplexField<f64>;
pub type GreensEvalOptions64 = GreensEvalOptions<f64>;
pub use scatterers::{Scene, Shape};
pub type Scene64 = Scene<f64>;
pub type Shape64 = Shape<f64>;
pub type RayleighData64 = RayleighData<f64>;
pub type SolverConfig64 = SolverConfig<f64>;
pub type ForwardSolution64 = ForwardSolution<f64>;
pub type ImagingConfig64 = ImagingConfig<f64>;
pub type IndicatorMap64 = IndicatorMap<f64>;
pub type NoiseSpec64 = NoiseSpec<f64>;
