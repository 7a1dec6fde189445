//! `conf`: verify, factor, decompose, fit and plot conformal maps of
//! semi-Euclidean spaces from the command line.

mod commands;
mod job;
mod report;
mod svg;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use commands::{usage_report, EXIT_USAGE};
use job::{JobFlags, JobSpec};

#[derive(Parser)]
#[command(
    name = "conf",
    version,
    about = "Conformal-map verification for semi-Euclidean spaces",
    long_about = "Reads a map of R^n_nu (expressions per coordinate), runs conformality \
                  pipelines and emits JSON reports or SVG null-grid figures. Exit codes: \
                  0 = all checks passed, 1 = a numerical check failed, 2 = the job never \
                  produced a complete verdict (bad input or evaluation error)."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct JobArgs {
    /// Job file (JSON); flags override its fields
    #[arg(long)]
    job: Option<PathBuf>,
    /// Signature as N,NU (e.g. 2,1)
    #[arg(long, value_name = "N,NU")]
    sig: Option<String>,
    /// Coordinate frame: cartesian or null (2D Minkowski only)
    #[arg(long)]
    frame: Option<String>,
    /// One component expression per coordinate (repeat)
    #[arg(long = "comp", value_name = "EXPR", allow_hyphen_values = true)]
    comp: Vec<String>,
    /// Region bounds, one LO:HI per coordinate (repeat)
    #[arg(long = "region", value_name = "LO:HI", allow_hyphen_values = true)]
    region: Vec<String>,
    /// Samples per axis (default 17)
    #[arg(long)]
    grid: Option<usize>,
    /// Numerical tolerance (default 1e-8)
    #[arg(long)]
    tol: Option<f64>,
    /// Named preset (compactification)
    #[arg(long)]
    preset: Option<String>,
    /// Samples file for `fit` (JSON [{"x": [...], "y": [...]}, ...])
    #[arg(long)]
    samples: Option<PathBuf>,
    /// Output path (grid writes SVG here instead of stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

impl JobArgs {
    fn flags(&self) -> JobFlags {
        JobFlags {
            job: self.job.clone(),
            sig: self.sig.clone(),
            frame: self.frame.clone(),
            comp: self.comp.clone(),
            region: self.region.clone(),
            grid: self.grid,
            tol: self.tol,
            preset: self.preset.clone(),
            samples: self.samples.clone(),
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Conformality verdicts: Jacobian criterion, harmonic probes,
    /// gradient condition, null-line preservation
    Check(JobArgs),
    /// Factor a conformal null-frame map into its monotone pair
    Factor(JobArgs),
    /// Split a wave-equation solution X(x, t) into f(x+t) + g(x-t)
    Decompose(JobArgs),
    /// Fit samples to the affine model y = alpha*A*x + b with A
    /// eta-orthogonal
    Fit(JobArgs),
    /// Render the image of a null-coordinate grid as SVG
    Grid(JobArgs),
}

type CmdFn = fn(JobSpec, Option<PathBuf>) -> Result<(String, i32), job::UsageError>;

fn main() {
    let cli = Cli::parse();
    let (args, run): (&JobArgs, CmdFn) = match &cli.cmd {
        Cmd::Check(a) => (a, |j, _| commands::cmd_check(j)),
        Cmd::Factor(a) => (a, |j, _| commands::cmd_factor(j)),
        Cmd::Decompose(a) => (a, |j, _| commands::cmd_decompose(j)),
        Cmd::Fit(a) => (a, |j, _| commands::cmd_fit(j)),
        Cmd::Grid(a) => (a, commands::cmd_grid),
    };

    let job = match JobSpec::resolve(&args.flags()) {
        Ok(job) => job,
        Err(e) => {
            println!("{}", usage_report(None, &e.to_string()));
            std::process::exit(EXIT_USAGE);
        }
    };

    match run(job.clone(), args.out.clone()) {
        Ok((text, code)) => {
            if !text.is_empty() {
                println!("{text}");
            }
            std::process::exit(code);
        }
        Err(e) => {
            println!("{}", usage_report(Some(job), &e.to_string()));
            std::process::exit(EXIT_USAGE);
        }
    }
}
