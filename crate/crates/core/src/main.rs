use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use monotone_elliptic::app::{
    cmd_check, cmd_mesh_info, cmd_solve, cmd_spectrum, AppError, SolveOverrides, EXIT_FAILURE, EXIT_INPUT,
    EXIT_SUCCESS,
};

#[derive(Parser)]
#[command(version, about = "Monotone iteration between lower and upper solutions of Δu + a u = f F(u) + h H(u)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check growth bounds, sign conditions and the bracket.
    Check {
        scenario: PathBuf,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run the iteration and write solution, trace and summary files.
    Solve {
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Step-change tolerance; the linear tolerance becomes tol/100.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_steps: Option<usize>,
    },
    /// Smallest eigenvalues of the discrete Laplacian.
    Spectrum {
        scenario: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Vertex count, total mass and mesh quality.
    MeshInfo { scenario: PathBuf },
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes")
}

fn run(cli: Cli) -> Result<i32, AppError> {
    match cli.command {
        Command::Check { scenario, json } => {
            let report = cmd_check(scenario)?;
            if json {
                println!("{}", to_json(&report));
            } else {
                println!("{report}");
            }
            Ok(if report.passed { EXIT_SUCCESS } else { EXIT_FAILURE })
        }
        Command::Solve { scenario, out, tol, max_steps } => {
            let summary = cmd_solve(scenario, &out, SolveOverrides { tol, max_steps })?;
            println!("{}", to_json(&summary));
            eprintln!("wall time: {:.3} s", summary.wall_time.as_secs_f64());
            if summary.converged {
                Ok(EXIT_SUCCESS)
            } else {
                eprintln!("iteration did not converge within the step limit");
                Ok(EXIT_FAILURE)
            }
        }
        Command::Spectrum { scenario, k } => {
            println!("{}", to_json(&cmd_spectrum(scenario, k)?));
            Ok(EXIT_SUCCESS)
        }
        Command::MeshInfo { scenario } => {
            println!("{}", to_json(&cmd_mesh_info(scenario)?));
            Ok(EXIT_SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_SUCCESS };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = run(cli).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
