use std::path::Path;

use serde::{Deserialize, Serialize};

/// Everything needed to re-run a pipeline stage; written next to its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub scene_path: Option<String>,
    pub n_sources: Option<usize>,
    pub source_layout: Option<String>,
    pub sources: Vec<[f64; 2]>,
    pub solver_grid: Option<[usize; 2]>,
    pub data_route: Option<String>,
    pub delta: Option<f64>,
    pub seed: Option<u64>,
    pub method: Option<String>,
    pub p: Option<u32>,
    pub imaging_grid: Option<[usize; 2]>,
    pub k: Option<f64>,
    pub alpha: Option<f64>,
    pub output_dir: String,
}

impl RunManifest {
    pub fn new(command: &str, out: &Path) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            scene_path: None,
            n_sources: None,
            source_layout: None,
            sources: Vec::new(),
            solver_grid: None,
            data_route: None,
            delta: None,
            seed: None,
            method: None,
            p: None,
            imaging_grid: None,
            k: None,
            alpha: None,
            output_dir: out.display().to_string(),
        }
    }
}

pub const LAYOUT: &str = "n/2 cell-centred points on x2 = +3, then n/2 on x2 = -3, uniform in x1 over (-pi, pi)";
