//! `p1nc`: dimension checks, solves and studies for the P1-nonconforming
//! element on periodic grids.
//!
//! Exit codes: 0 success, 1 failed check or runtime error, 2 usage error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use p1nc_core::analysis::Example;
use p1nc_core::{BoundaryCondition, Error as CoreError, SchemeConfig, SolverConfig};

#[derive(Parser, Debug)]
#[command(name = "p1nc", version, about, args_override_self = true)]
#[command(
    after_help = "Any flag may also be given in a key-value file passed with --config FILE; flags on the command line win."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Space and kernel dimensions by formula, optionally checked by rank computations.
    Dims(DimsArgs),
    /// Solve one manufactured problem and export the solution.
    Solve(SolveArgs),
    /// Error table over a sequence of meshes.
    Convergence(ConvergenceArgs),
    /// Nullity of the 3D node-based stiffness matrix.
    Rankdef(RankdefArgs),
    /// Compare the four 2D options on one problem.
    Equivalence(EquivalenceArgs),
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    /// Directory for written files.
    #[arg(long, env = config::OUTPUT_DIR_ENV, default_value = "out")]
    output_dir: PathBuf,
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    /// Relative residual target.
    #[arg(long, default_value = "1e-10")]
    tolerance: f64,
    /// Iteration cap; defaults to ten times the number of unknowns.
    #[arg(long)]
    max_iter: Option<usize>,
    /// GMRES restart length.
    #[arg(long, default_value_t = 20)]
    restart: usize,
    /// Gauss points per axis for load vectors.
    #[arg(long, default_value_t = SchemeConfig::default().quadrature_order)]
    quadrature: usize,
    /// Gauss points per axis for error norms.
    #[arg(long, default_value_t = SchemeConfig::default().error_quadrature_order)]
    error_quadrature: usize,
}

impl SolverArgs {
    fn scheme_config(&self) -> SchemeConfig {
        SchemeConfig {
            solver: SolverConfig { tolerance: self.tolerance, max_iter: self.max_iter, restart: self.restart },
            quadrature_order: self.quadrature,
            error_quadrature_order: self.error_quadrature,
            ..SchemeConfig::default()
        }
    }

    fn pairs(&self) -> Vec<(&'static str, String)> {
        vec![
            ("tolerance", format!("{:e}", self.tolerance)),
            ("max-iter", self.max_iter.map_or("auto".into(), |m| m.to_string())),
            ("restart", self.restart.to_string()),
            ("quadrature", self.quadrature.to_string()),
            ("error-quadrature", self.error_quadrature.to_string()),
        ]
    }
}

#[derive(Args, Debug)]
struct DimsArgs {
    /// 2D cell counts.
    #[arg(long = "2d", num_args = 2, value_names = ["NX", "NY"], conflicts_with_all = ["three_d", "sweep_2d", "sweep_3d"])]
    two_d: Option<Vec<usize>>,
    /// 3D cell counts.
    #[arg(long = "3d", num_args = 3, value_names = ["NX", "NY", "NZ"], conflicts_with_all = ["sweep_2d", "sweep_3d"])]
    three_d: Option<Vec<usize>>,
    /// All 2D grids with counts 1..=MAX.
    #[arg(long, value_name = "MAX", conflicts_with = "sweep_3d")]
    sweep_2d: Option<usize>,
    /// All 3D grids with counts 1..=MAX.
    #[arg(long, value_name = "MAX")]
    sweep_3d: Option<usize>,
    /// Boundary condition, or `all`.
    #[arg(long, default_value = "periodic")]
    bc: String,
    /// Recompute every dimension by rank computations and compare.
    #[arg(long)]
    verify: bool,
    /// Also write the table to the output directory.
    #[arg(long)]
    save: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// ex1, ex2 (2D) or ex3 (3D).
    #[arg(long)]
    example: Example,
    /// Mesh size `1/N`.
    #[arg(long)]
    h: String,
    /// Solution option 1-4.
    #[arg(long, default_value = "4")]
    option: p1nc_core::SchemeOption,
    /// Also write the assembled matrix in Matrix Market format.
    #[arg(long)]
    save_matrix: bool,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct ConvergenceArgs {
    /// ex1, ex2 (2D) or ex3 (3D).
    #[arg(long)]
    example: Example,
    /// Option 1-4, or `all`.
    #[arg(long, default_value = "4")]
    option: String,
    /// Mesh sizes `1/A:1/B`, halving from coarse to fine.
    #[arg(long, default_value = "1/8:1/64")]
    h: String,
    /// Compare with the published table.
    #[arg(long = "check-paper")]
    check_published: bool,
    /// Relative tolerance for the comparison.
    #[arg(long, default_value_t = 0.02)]
    rel_tol: f64,
    /// Absolute tolerance on the final orders.
    #[arg(long, default_value_t = 0.05)]
    order_tol: f64,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct RankdefArgs {
    /// Largest cell count per axis.
    #[arg(long, default_value_t = 8)]
    max: usize,
    /// Compare with the published table.
    #[arg(long = "check-paper")]
    check_published: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct EquivalenceArgs {
    /// ex1, ex2 (2D) or ex3 (3D).
    #[arg(long)]
    example: Example,
    /// Mesh sizes `1/A:1/B`.
    #[arg(long, default_value = "1/8:1/64")]
    h: String,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
}

/// Outcome of a command that ran to completion.
pub enum Status {
    Ok,
    CheckFailed,
}

fn is_usage_error(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        matches!(
            c.downcast_ref::<CoreError>(),
            Some(
                CoreError::InvalidSpec(_)
                    | CoreError::Parse(_)
                    | CoreError::Unsupported(_)
                    | CoreError::UnsupportedDimension { .. }
                    | CoreError::TooLarge { .. }
            )
        ) || c.downcast_ref::<commands::UsageError>().is_some()
    })
}

fn parse_bcs(s: &str) -> anyhow::Result<Vec<BoundaryCondition>> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(BoundaryCondition::ALL.to_vec());
    }
    Ok(vec![s.parse::<BoundaryCondition>()?])
}

fn run(cli: Cli) -> anyhow::Result<Status> {
    match cli.command {
        Command::Dims(a) => commands::dims(&a),
        Command::Solve(a) => commands::solve(&a),
        Command::Convergence(a) => commands::convergence(&a),
        Command::Rankdef(a) => commands::rankdef(&a),
        Command::Equivalence(a) => commands::equivalence(&a),
    }
}

fn main() -> ExitCode {
    let argv = match config::expand_args(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_usage_error(&e) { 2 } else { 1 })
        }
    }
}
