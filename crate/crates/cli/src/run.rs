use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use qpscat::imaging::{indicator_map, metrics, ImagingConfig, Method, DEFAULT_THRESHOLD};
use qpscat::io::{self, atomic_write};
use qpscat::verify::{run_suite, Suite};
use qpscat::{
    generate_with_traces, kernel_heatmaps, parse_scene, perturb, source_layout, DataRoute, Error, Grid2D,
    GreensEvalOptions, MediumParams, NoiseSpec, RayleighData, Scene, SolverConfig,
};
use serde_json::{json, Value};

use crate::manifest::{RunManifest, LAYOUT};
use crate::{ForwardArgs, ImageArgs, KernelArgs, NoiseArgs, PipelineArgs, VerifyArgs};

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Missing { path: PathBuf, message: String },
    VerifyFailed,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(Error::Json(e))
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn kind(e: &Error) -> &'static str {
    match e {
        Error::NonPositiveWaveNumber(_) => "NonPositiveWaveNumber",
        Error::WoodAnomalyProximity { .. } => "WoodAnomalyProximity",
        Error::BadGeometry(_) => "BadGeometry",
        Error::TooCloseVertically { .. } => "TooCloseVertically",
        Error::SingularPoint { .. } => "SingularPoint",
        Error::Parse { .. } => "ParseError",
        Error::Validation { .. } => "ValidationError",
        Error::SourceInsideSlab { .. } => "SourceInsideSlab",
        Error::EvanescentPlaneWave => "EvanescentPlaneWave",
        Error::SolverDiverged { .. } => "SolverDiverged",
        Error::ResonantDiscretization { .. } => "ResonantDiscretization",
        Error::AliasedMode { .. } => "AliasedMode",
        Error::LossyScene => "LossyScene",
        Error::NotPlaneWave => "NotPlaneWave",
        Error::EmptyScene => "EmptyScene",
        Error::InvalidNoiseLevel(_) => "InvalidNoiseLevel",
        Error::InvalidConfig(_) => "InvalidConfig",
        Error::Format(_) => "FormatError",
        Error::Io(_) => "IoError",
        Error::Json(_) => "JsonError",
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::VerifyFailed => 1,
            CliError::Missing { .. } => 3,
            CliError::Core(e) => match e {
                Error::Parse { .. }
                | Error::Validation { .. }
                | Error::InvalidConfig(_)
                | Error::InvalidNoiseLevel(_)
                | Error::NonPositiveWaveNumber(_)
                | Error::WoodAnomalyProximity { .. }
                | Error::BadGeometry(_)
                | Error::SourceInsideSlab { .. }
                | Error::ResonantDiscretization { .. }
                | Error::AliasedMode { .. }
                | Error::Format(_) => 2,
                _ => 1,
            },
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            CliError::VerifyFailed => json!({ "error": "VerifyFailed", "message": "verification failed" }),
            CliError::Missing { path, message } => json!({
                "error": "MissingInput",
                "message": message,
                "path": path.display().to_string(),
            }),
            CliError::Core(e) => {
                let mut v = json!({ "error": kind(e), "message": e.to_string() });
                match e {
                    Error::Parse { line, column, .. } => {
                        v["line"] = json!(line);
                        v["column"] = json!(column);
                    }
                    Error::Validation { cause: Some(c), .. } => {
                        v["cause"] = json!({ "error": kind(c), "message": c.to_string() });
                    }
                    _ => {}
                }
                v
            }
        }
    }
}

fn read_input(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::Missing {
        path: path.to_path_buf(),
        message: format!("cannot read {}: {e}", path.display()),
    })
}

fn read_scene(path: &Path) -> Result<Scene<f64>> {
    Ok(parse_scene(&read_input(path)?)?)
}

fn read_data(dir: &Path) -> Result<RayleighData<f64>> {
    Ok(io::rayleigh_from_csv(&read_input(&dir.join("rayleigh.csv"))?)?)
}

fn read_manifest(dir: &Path) -> Option<RunManifest> {
    let text = fs::read_to_string(dir.join("manifest.json")).ok()?;
    serde_json::from_str(&text).ok()
}

fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(Error::from)?;
    Ok(())
}

fn write(dir: &Path, name: &str, bytes: impl AsRef<[u8]>) -> Result<PathBuf> {
    let path = dir.join(name);
    atomic_write(&path, bytes.as_ref())?;
    Ok(path)
}

fn write_json(dir: &Path, name: &str, value: &impl serde::Serialize) -> Result<PathBuf> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write(dir, name, text)
}

fn absolute(path: &Path) -> String {
    fs::canonicalize(path)
        .unwrap_or_else(|_| path.to_path_buf())
        .display()
        .to_string()
}

fn report(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

pub fn forward(a: &ForwardArgs) -> Result<()> {
    let scene = read_scene(&a.config)?;
    let cfg = SolverConfig::with_grid(a.grid[0], a.grid[1]);
    let route = if a.volume_data {
        DataRoute::Volume
    } else {
        DataRoute::default()
    };
    let sources = source_layout::<f64>(a.n_sources)?;
    let done = AtomicUsize::new(0);
    let n = a.n_sources;
    let (data, traces) = generate_with_traces(&scene, n, cfg, route, &|id| {
        let k = done.fetch_add(1, Ordering::Relaxed) + 1;
        eprintln!("[forward] source {id} solved ({k}/{n})");
    })?;

    let mut m = RunManifest::new("forward", &a.out);
    m.scene_path = Some(absolute(&a.config));
    m.n_sources = Some(n);
    m.source_layout = Some(LAYOUT.to_string());
    m.sources = sources;
    m.solver_grid = Some(a.grid);
    m.data_route = Some(if a.volume_data { "volume" } else { "trace64" }.to_string());
    m.k = Some(scene.params.k());
    m.alpha = Some(scene.params.alpha());

    prepare_dir(&a.out)?;
    report(&[
        write(&a.out, "rayleigh.csv", io::rayleigh_to_csv(&data))?,
        write(&a.out, "traces.csv", io::traces_to_csv(&traces))?,
        write_json(&a.out, "manifest.json", &m)?,
    ]);
    Ok(())
}

pub fn noise(a: &NoiseArgs) -> Result<()> {
    let spec = NoiseSpec::new(a.delta, a.seed)?;
    let data = read_data(&a.data)?;
    let (noisy, achieved) = perturb(&data, &spec);
    let mut m = read_manifest(&a.data).unwrap_or_else(|| RunManifest::new("noise", &a.out));
    m.command = "noise".into();
    m.output_dir = a.out.display().to_string();
    m.delta = Some(a.delta);
    m.seed = Some(a.seed);
    let meta = json!({ "delta": a.delta, "seed": a.seed, "achieved_delta": achieved });
    prepare_dir(&a.out)?;
    report(&[
        write(&a.out, "rayleigh.csv", io::rayleigh_to_csv(&noisy))?,
        write_json(&a.out, "noise_meta.json", &meta)?,
        write_json(&a.out, "manifest.json", &m)?,
    ]);
    eprintln!("[noise] delta {} seed {} achieved {achieved:.6}", a.delta, a.seed);
    Ok(())
}

pub fn image(a: &ImageArgs) -> Result<()> {
    let method: Method = a.method.parse()?;
    let grid = Grid2D::new(-std::f64::consts::PI, std::f64::consts::PI, -1.0, 1.0, a.grid[0], a.grid[1])?;
    let cfg = ImagingConfig {
        p: a.p,
        grid,
        method,
    };
    cfg.validate(1.0)?;
    let data = read_data(&a.data)?;
    let upstream = read_manifest(&a.data);
    let scene_path = a
        .config
        .clone()
        .or_else(|| upstream.as_ref().and_then(|m| m.scene_path.clone()).map(PathBuf::from));
    let scene = scene_path.as_deref().map(read_scene).transpose()?;

    let map = indicator_map(&data, &cfg)?;
    let stats = match &scene {
        Some(s) if !s.is_empty() => Some(metrics(&map, s, DEFAULT_THRESHOLD)?),
        _ => None,
    };
    let metrics_json = match stats {
        Some(s) => json!({
            "argmax_error": s.argmax_error,
            "jaccard": s.jaccard,
            "contrast_ratio": s.contrast_ratio,
            "max_raw": s.max_raw,
        }),
        None => json!({
            "argmax_error": null,
            "jaccard": null,
            "contrast_ratio": null,
            "max_raw": map.max,
        }),
    };

    let mut m = upstream.unwrap_or_else(|| RunManifest::new("image", &a.out));
    m.command = "image".into();
    m.output_dir = a.out.display().to_string();
    if let Some(p) = &scene_path {
        m.scene_path = Some(absolute(p));
    }
    m.method = Some(method.to_string());
    m.p = Some(a.p);
    m.imaging_grid = Some(a.grid);

    prepare_dir(&a.out)?;
    let norm = map.normalized();
    report(&[
        write(&a.out, &format!("indicator_{method}.csv"), io::indicator_to_csv(&map))?,
        write(&a.out, &format!("indicator_{method}.pgm"), io::pgm16(grid.n1, grid.n2, &norm))?,
        write_json(&a.out, &format!("metrics_{method}.json"), &metrics_json)?,
        write_json(&a.out, "manifest.json", &m)?,
    ]);
    Ok(())
}

pub fn kernel(a: &KernelArgs) -> Result<()> {
    let params = MediumParams::new(a.k, a.alpha, 1.0, 3.0)?;
    let grid = Grid2D::new(-std::f64::consts::PI, std::f64::consts::PI, -3.0, 3.0, a.grid[0], a.grid[1])?;
    let (free, periodic) = kernel_heatmaps(&params, &grid, &GreensEvalOptions::default());
    let normalize = |v: &[f64]| {
        let max = v.iter().copied().fold(0.0, f64::max);
        v.iter().map(|x| if max > 0.0 { x / max } else { 0.0 }).collect::<Vec<_>>()
    };
    let (fn_, pn) = (normalize(&free), normalize(&periodic));
    let mut m = RunManifest::new("kernel", &a.out);
    m.k = Some(a.k);
    m.alpha = Some(a.alpha);
    m.imaging_grid = Some(a.grid);
    prepare_dir(&a.out)?;
    report(&[
        write(&a.out, "kernel_j0.csv", io::grid_values_to_csv(&grid, &free))?,
        write(&a.out, "kernel_j0.pgm", io::pgm16(grid.n1, grid.n2, &fn_))?,
        write(&a.out, "kernel_periodic.csv", io::grid_values_to_csv(&grid, &periodic))?,
        write(&a.out, "kernel_periodic.pgm", io::pgm16(grid.n1, grid.n2, &pn))?,
        write_json(&a.out, "manifest.json", &m)?,
    ]);
    Ok(())
}

pub fn verify(a: &VerifyArgs) -> Result<()> {
    let suites: Vec<Suite> = if a.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![a.suite.parse()?]
    };
    let mut reports = Vec::new();
    for s in suites {
        eprintln!("[verify] running {s}");
        reports.push(run_suite(s)?);
    }
    let passed = reports.iter().all(|r| r.passed);
    let out = json!({ "passed": passed, "suites": reports });
    let text = serde_json::to_string_pretty(&out)?;
    println!("{text}");
    if let Some(path) = &a.out {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            prepare_dir(dir)?;
        }
        atomic_write(path, format!("{text}\n").as_bytes())?;
    }
    if passed {
        Ok(())
    } else {
        Err(CliError::VerifyFailed)
    }
}

pub fn pipeline(a: &PipelineArgs) -> Result<()> {
    // validate cheap inputs before the expensive solves
    NoiseSpec::new(a.delta, a.seed)?;
    let _: Method = a.method.parse()?;
    let (fwd, noisy, img) = (a.out.join("forward"), a.out.join("noise"), a.out.join("image"));
    forward(&ForwardArgs {
        config: a.config.clone(),
        n_sources: a.n_sources,
        grid: a.grid,
        volume_data: false,
        out: fwd.clone(),
    })?;
    noise(&NoiseArgs {
        data: fwd,
        delta: a.delta,
        seed: a.seed,
        out: noisy.clone(),
    })?;
    image(&ImageArgs {
        data: noisy,
        config: Some(a.config.clone()),
        method: a.method.clone(),
        p: a.p,
        grid: [128, 96],
        out: img,
    })?;
    let mut m = RunManifest::new("pipeline", &a.out);
    m.scene_path = Some(absolute(&a.config));
    m.n_sources = Some(a.n_sources);
    m.source_layout = Some(LAYOUT.to_string());
    m.sources = source_layout(a.n_sources)?;
    m.solver_grid = Some(a.grid);
    m.data_route = Some("trace64".into());
    m.delta = Some(a.delta);
    m.seed = Some(a.seed);
    m.method = Some(a.method.clone());
    m.p = Some(a.p);
    m.imaging_grid = Some([128, 96]);
    report(&[write_json(&a.out, "manifest.json", &m)?]);
    Ok(())
}
