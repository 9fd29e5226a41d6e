//! `qpscat`: forward data, noise, indicator images, kernel panels and
//! verification batteries from the command line.

mod manifest;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use run::CliError;

#[derive(Parser, Debug)]
#[command(name = "qpscat", version, about = "Quasi-periodic scattering simulation and sampling-based imaging")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one scattering problem per source and write Rayleigh data.
    Forward(ForwardArgs),
    /// Perturb Rayleigh data with multiplicative uniform-disc noise.
    Noise(NoiseArgs),
    /// Evaluate an indicator map and write CSV, PGM and metrics.
    Image(ImageArgs),
    /// Write the free-space and quasi-periodic kernel panels.
    Kernel(KernelArgs),
    /// Run a verification suite and print a JSON report.
    Verify(VerifyArgs),
    /// forward, noise and image in one go.
    Pipeline(PipelineArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ForwardArgs {
    /// Scene description file.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value_t = 128)]
    pub n_sources: usize,
    /// Solver grid `N1xN2`.
    #[arg(long, default_value = "256x256", value_parser = parse_grid)]
    pub grid: [usize; 2],
    /// Extract coefficients from the volume instead of 64-point traces.
    #[arg(long)]
    pub volume_data: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct NoiseArgs {
    /// Directory holding `rayleigh.csv`.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct ImageArgs {
    /// Directory holding `rayleigh.csv`.
    #[arg(long)]
    pub data: PathBuf,
    /// Scene file for the metrics; defaults to the one named in the data manifest.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "proposed")]
    pub method: String,
    #[arg(long, default_value_t = 4)]
    pub p: u32,
    /// Sampling grid `N1xN2` over `(-pi, pi) x (-1, 1)`.
    #[arg(long, default_value = "128x96", value_parser = parse_grid)]
    pub grid: [usize; 2],
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct KernelArgs {
    #[arg(long, default_value_t = std::f64::consts::TAU)]
    pub k: f64,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Panel grid `N1xN2` over `(-pi, pi) x (-3, 3)`; odd sizes put a node at the origin.
    #[arg(long, default_value = "257x245", value_parser = parse_grid)]
    pub grid: [usize; 2],
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// modes, greens, data_kernel, stability, energy, consistency or all.
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Also write the report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct PipelineArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value_t = 128)]
    pub n_sources: usize,
    #[arg(long, default_value = "256x256", value_parser = parse_grid)]
    pub grid: [usize; 2],
    #[arg(long, default_value_t = 0.2)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "proposed")]
    pub method: String,
    #[arg(long, default_value_t = 4)]
    pub p: u32,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_grid(s: &str) -> Result<[usize; 2], String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected N1xN2, got '{s}'"))?;
    let n1: usize = a.trim().parse().map_err(|_| format!("bad grid size '{a}'"))?;
    let n2: usize = b.trim().parse().map_err(|_| format!("bad grid size '{b}'"))?;
    if n1 < 2 || n2 < 2 {
        return Err(format!("grid sizes must be at least 2, got {n1}x{n2}"));
    }
    Ok([n1, n2])
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.render().to_string();
            eprintln!("{}", json!({ "error": "Usage", "message": msg.trim() }));
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Forward(a) => run::forward(&a),
        Command::Noise(a) => run::noise(&a),
        Command::Image(a) => run::image(&a),
        Command::Kernel(a) => run::kernel(&a),
        Command::Verify(a) => run::verify(&a),
        Command::Pipeline(a) => run::pipeline(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::VerifyFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("256x128"), Ok([256, 128]));
        assert_eq!(parse_grid("64X32"), Ok([64, 32]));
        assert!(parse_grid("64").is_err());
        assert!(parse_grid("1x64").is_err());
        assert!(parse_grid("ax4").is_err());
    }

    #[test]
    fn exit_codes() {
        use qpscat::Error;
        assert_eq!(CliError::VerifyFailed.exit_code(), 1);
        let missing = CliError::Missing { path: "x".into(), message: "gone".into() };
        assert_eq!(missing.exit_code(), 3);
        assert_eq!(CliError::Core(Error::InvalidNoiseLevel(2.0)).exit_code(), 2);
        let diverged = Error::SolverDiverged { iterations: 10, residual: 1.0 };
        assert_eq!(CliError::Core(diverged).exit_code(), 1);
        assert_eq!(CliError::VerifyFailed.to_json()["error"], "VerifyFailed");
    }
}
