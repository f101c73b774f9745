use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nlyoung_cli::commands::{self, BoundsArgs, FracArgs, Global, HolderArgs, IndefiniteArgs, IntegrateArgs, IterateArgs, YoungArgs};
use nlyoung_cli::Output;

/// Nonlinear Young integrals by fractional calculus and by sewing.
///
/// Exit codes: 0 success, 1 failed tolerance or runtime error, 2 invalid input,
/// 3 nonconvergence.
#[derive(Parser, Debug)]
#[command(name = "nlyoung", version)]
struct Cli {
    /// write reports into this directory instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// cells (or nodes) of the fractional quadrature
    #[arg(long, global = true)]
    quad: Option<usize>,
    /// relative quadrature tolerance; 1e-8 for integrate, run and bounds, 1e-6 elsewhere
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// leave clock fields out of the reports
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// worker threads
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// integral of a field along a path
    Integrate(IntegrateArgs),
    /// classical Young integral `∫ f dg`
    Young(YoungArgs),
    /// bound ratios over shrinking intervals, as CSV
    Bounds(BoundsArgs),
    /// indefinite integral and its Hölder regression
    Indefinite(IndefiniteArgs),
    /// iterated integrals and the growth check
    Iterate(IterateArgs),
    /// a named suite: reduction, alpha, convergence, bounds, iterated
    Suite { name: String },
    /// Hölder seminorm of a path
    Holder(HolderArgs),
    /// fractional integrals and derivatives of one function
    Frac(FracArgs),
    /// an experiment spec file
    Run {
        #[arg(long)]
        spec: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let g = Global { out: Output::new(cli.out.clone(), !cli.no_timestamp), quad: cli.quad, tol: cli.tol };
    let result = match &cli.cmd {
        Cmd::Integrate(a) => commands::integrate(a, &g),
        Cmd::Young(a) => commands::young(a, &g),
        Cmd::Bounds(a) => commands::bounds(a, &g),
        Cmd::Indefinite(a) => commands::indefinite(a, &g),
        Cmd::Iterate(a) => commands::iterate(a, &g),
        Cmd::Suite { name } => commands::run_suite(name, &g),
        Cmd::Holder(a) => commands::holder(a, &g),
        Cmd::Frac(a) => commands::frac(a, &g),
        Cmd::Run { spec } => commands::run_spec(spec, &g),
    };
    match result {
        Ok(status) => {
            match status.exit_code() {
                3 => eprintln!("warning: a computation did not converge"),
                1 => eprintln!("a declared tolerance failed"),
                _ => {}
            }
            ExitCode::from(status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
