//! Command line driver: mesh export, single solves, convergence studies and
//! pairwise comparisons.
//!
//! Exit status is 0 on success, 2 for invalid input and 3 when the
//! eigensolver fails.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lsmaxwell::bench::{render_report, render_spectrum, run_study, solve_mesh, ReportFormat, StudyConfig};
use lsmaxwell::mesh::{Diagonal, Domain};
use lsmaxwell::Error;

#[derive(Parser)]
#[command(name = "lsmaxwell", version, about = "Least-squares finite elements for Maxwell eigenvalues")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a benchmark mesh in the plain text format.
    Mesh {
        /// square, lshape, slit or cube
        domain: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "right")]
        diagonal: String,
        /// Interior vertex displacement, relative to the local edge length.
        #[arg(long)]
        perturb: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve one mesh of a study configuration.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 10)]
        nev: usize,
        /// Mesh parameter; defaults to the only entry of `n_list`.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a convergence study; the output extension (.csv or .md) picks the format.
    Study {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare two formulations on the meshes they share.
    Compare {
        #[arg(long)]
        config_a: PathBuf,
        #[arg(long)]
        config_b: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read_config(path: &Path) -> Result<StudyConfig, Error> {
    let text = std::fs::read_to_string(path)?;
    StudyConfig::parse(&text)
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Mesh { domain, n, diagonal, perturb, seed, out } => {
            let domain = Domain::parse(&domain).ok_or_else(|| Error::Invalid(format!("unknown domain `{domain}`")))?;
            let diagonal =
                Diagonal::parse(&diagonal).ok_or_else(|| Error::Invalid(format!("unknown diagonal `{diagonal}`")))?;
            let mut mesh = domain.build(n, diagonal)?;
            if let Some(a) = perturb {
                mesh = mesh.perturb_interior(a, seed)?;
            }
            std::fs::write(&out, mesh.to_text())?;
            eprintln!("{} vertices, {} cells", mesh.num_vertices(), mesh.num_cells());
        }
        Command::Solve { config, nev, n, out } => {
            let cfg = read_config(&config)?;
            let n = match (n, cfg.n_list.as_slice()) {
                (Some(n), _) => n,
                (None, [n]) => *n,
                (None, _) => return Err(Error::Invalid("n_list has several entries; pick one with --n".into())),
            };
            if nev == 0 {
                return Err(Error::Invalid("--nev must be at least 1".into()));
            }
            let sol = solve_mesh(&cfg, n, nev)?;
            std::fs::write(&out, render_spectrum(&sol))?;
        }
        Command::Study { config, out } => {
            let format = ReportFormat::from_path(&out)
                .ok_or_else(|| Error::Invalid("output must end in .csv or .md".into()))?;
            let cfg = read_config(&config)?;
            let report = run_study(&cfg)?;
            std::fs::write(&out, render_report(&report, format))?;
            for (n, t) in report.ns.iter().zip(&report.wall_times) {
                eprintln!("n = {n}: {t:.2} s");
            }
        }
        Command::Compare { config_a, config_b, out } => {
            let format = ReportFormat::from_path(&out).unwrap_or(ReportFormat::Csv);
            let a = read_config(&config_a)?;
            let b = read_config(&config_b)?;
            let report = run_study(&a.compared_with(&b)?)?;
            std::fs::write(&out, render_report(&report, format))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_solver_failure() { 3 } else { 2 })
        }
    }
}
