use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use bodyplate::assembly::assemble_block_system;
use bodyplate::decomposition::dd_solve;
use bodyplate::mesh::Diagonal;
use bodyplate::solvers::solve_monolithic;
use bodyplate::verification::norms::relative_combined_difference;
use bodyplate::verification::study::{format_sci, solve_with, ConvergenceReport};
use bodyplate::verification::{run_convergence_study, ManufacturedCase, MeshPair, Method, Settings, StudyConfig};
use bodyplate::Error;

/// Coupled elastic body and plate: mixed and displacement solvers,
/// convergence studies and an interface domain decomposition.
///
/// CSV columns of `solve` and `convergence`:
/// level, body_n, plate_n, h_alpha, h_beta, dofs, then for each of
/// sigma_l2, u_alpha_l2, u_star_h1, u_star_l2, u3_h2, u3_h1, u3_l2 the error
/// and its rate against the previous level (empty on the first level).
/// `dd-solve` writes `iter,res_rel` rows.
#[derive(Parser)]
#[command(name = "bodyplate", version, arg_required_else_help = true)]
struct Cli {
    /// `key = value` file overriding material parameters, quadrature
    /// degrees and solver tolerances.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    MixedNc,
    Displacement,
}

#[derive(Clone, Copy, ValueEnum)]
enum DiagonalArg {
    Same,
    Flipped,
}

#[derive(Clone, Copy, ValueEnum)]
enum YesNo {
    Yes,
    No,
}

#[derive(Subcommand)]
enum Command {
    /// Solve once on a given mesh pair and report the errors.
    Solve {
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Body subdivisions per unit length.
        #[arg(long)]
        body_level: usize,
        /// Plate subdivisions per side of (-1, 1)^2; a multiple of 4.
        #[arg(long)]
        plate_level: usize,
        #[arg(long, value_enum, default_value = "same")]
        diagonal: DiagonalArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Uniform refinement study with rates.
    Convergence {
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long)]
        levels: usize,
        #[arg(long, value_enum)]
        matching: YesNo,
        #[arg(long)]
        out: PathBuf,
    },
    /// Conjugate gradients on the interface problem.
    DdSolve {
        #[arg(long)]
        body_level: usize,
        #[arg(long)]
        plate_level: usize,
        #[arg(long, value_enum, default_value = "same")]
        diagonal: DiagonalArg,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_it: Option<usize>,
        /// Also solve monolithically and report the relative difference.
        #[arg(long)]
        compare: bool,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } | Error::MeshParameter(_) | Error::NonMatching(_) | Error::UnknownField(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

fn method(m: MethodArg) -> Method {
    match m {
        MethodArg::MixedNc => Method::MixedNc,
        MethodArg::Displacement => Method::Displacement,
    }
}

fn diagonal(d: DiagonalArg) -> Diagonal {
    match d {
        DiagonalArg::Same => Diagonal::SameAsBody,
        DiagonalArg::Flipped => Diagonal::Flipped,
    }
}

fn write_out(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut settings = Settings::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        settings = settings.apply_config(&text)?;
    }
    let case = ManufacturedCase::benchmark(settings.params);
    match cli.command {
        Command::Solve { method: m, body_level, plate_level, diagonal: d, out } => {
            let pair = MeshPair { body_n: body_level, plate_n: plate_level, diagonal: diagonal(d) };
            let outcome = solve_with(method(m), pair, &settings, &case)?;
            let report = ConvergenceReport { method: method(m), matching: true, settings, rows: vec![(1, outcome)] };
            write_out(&out, &report.to_csv())?;
            print!("{}", report.to_table());
        }
        Command::Convergence { method: m, levels, matching, out } => {
            let config = StudyConfig { method: method(m), levels, matching: matches!(matching, YesNo::Yes), settings };
            let report = run_convergence_study(&config, &case)?;
            write_out(&out, &report.to_csv())?;
            print!("{}", report.to_table());
        }
        Command::DdSolve { body_level, plate_level, diagonal: d, tol, max_it, compare, out } => {
            let pair = MeshPair { body_n: body_level, plate_n: plate_level, diagonal: diagonal(d) };
            let disc = pair.discretization(&settings)?;
            let tol = tol.unwrap_or(settings.cg_tol);
            let result = dd_solve(&disc, &settings.params, &case, tol, max_it.unwrap_or(settings.cg_max_it))?;
            let mut csv = String::from("iter,res_rel\n");
            for (i, r) in result.cg.history.iter().enumerate() {
                let _ = writeln!(csv, "{i},{}", format_sci(*r));
            }
            write_out(&out, &csv)?;
            println!("interface dofs {}", result.n_interface);
            println!("{:>4} {:>14} {:>14}", "iter", "res_rel (U)", "res_rel (l2)");
            for (i, (u, e)) in result.cg.history.iter().zip(&result.cg.euclidean_history).enumerate() {
                println!("{i:>4} {:>14} {:>14}", format!("{u:.3e}"), format!("{e:.3e}"));
            }
            println!("iterations {}  rho_avg {:.4}  seconds {:.2}", result.cg.iterations, result.cg.rho_avg, result.seconds);
            if compare {
                let blocks = assemble_block_system(&disc, &settings.params, &case)?;
                let (mono, _) = solve_monolithic(&blocks.monolithic(), settings.residual_tol)?;
                let rel = relative_combined_difference(&disc.body, &disc.plate, &result.fields, &mono, settings.degrees.error)?;
                println!("relative combined L2 difference to monolithic {rel:.3e}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(1)
        }
    }
}
