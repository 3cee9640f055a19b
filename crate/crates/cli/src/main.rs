use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use logman_cli::app::{self, AppError, Loaded, Overrides, Source, EXIT_CONFIG};
use logman_cli::scenario::Command;

#[derive(Parser)]
#[command(name = "logman", version, about = "Logistic-type equations on model manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Scenario file.
    #[arg(long, required_unless_present = "builtin", conflicts_with = "builtin")]
    config: Option<PathBuf>,
    /// Name of a built-in scenario (see `logman list`).
    #[arg(long)]
    builtin: Option<String>,
    /// Existing output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Interior grid nodes (overrides solver.mesh).
    #[arg(long)]
    mesh: Option<usize>,
    /// Iteration increment tolerance (overrides solver.tol).
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Clone)]
struct NonexistArgs {
    #[command(flatten)]
    common: Common,
    /// One of 3.2, 3.3, 3.2prime, cor3.17, cor3.2pp, lemma3.1, ab.
    #[arg(long)]
    theorem: Option<String>,
}

#[derive(Args, Clone)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Scalar field to vary, e.g. `lambda` or `solver.R_max`.
    #[arg(long)]
    param: String,
    /// Comma-separated values; empty for none.
    #[arg(long, allow_hyphen_values = true)]
    values: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Principal eigenvalues over a radius schedule.
    Eigen(Common),
    /// Limit of the principal eigenvalues with its upper bound.
    LambdaStar(Common),
    /// lambda* against the sign change of the spectral bottom in mu.
    Duality(Common),
    /// Dirichlet problem by monotone iteration.
    Solve(Common),
    /// Large-boundary-data limit on a ball.
    Blowup(Common),
    /// Maximal solution by exhaustion.
    Maximal(Common),
    /// Sub-solution construction.
    Subsolution(Common),
    /// Sufficient existence conditions over a radius scan.
    Exists(Common),
    /// Non-existence certificates.
    Nonexist(NonexistArgs),
    /// Ordering of two Dirichlet solutions.
    Compare(Common),
    /// Radial Green kernel samples.
    Green(Common),
    /// Poisson solve and logarithmic substitution.
    Poisson(Common),
    /// Runs the scenario's command over values of one parameter.
    Sweep(SweepArgs),
    /// Lists the built-in scenarios.
    List,
}

fn loaded(common: &Common, theorem: Option<String>) -> Result<Loaded, AppError> {
    let source = match (&common.config, &common.builtin) {
        (Some(p), _) => Source::File(p.clone()),
        (None, Some(n)) => Source::Builtin(n.clone()),
        (None, None) => return Err(AppError::Usage("either --config or --builtin is required".into())),
    };
    let overrides = Overrides {
        mesh: common.mesh,
        tol: common.tol,
        theorem,
    };
    app::load(&source, &overrides)
}

fn execute(cmd: Cmd) -> Result<(), AppError> {
    app::configure_threads()?;
    let (command, common, theorem) = match cmd {
        Cmd::List => {
            for (name, _) in app::BUILTINS {
                println!("{name}");
            }
            return Ok(());
        }
        Cmd::Sweep(args) => {
            let values = app::parse_values(&args.values)?;
            let input = loaded(&args.common, None)?;
            let rows = app::sweep(&input, &args.param, &values, &args.common.out)?;
            let failed = rows.iter().filter(|(s, _)| s != "ok").count();
            println!(
                "sweep: {} rows, {failed} failed; wrote {}",
                rows.len(),
                args.common.out.join("sweep.csv").display()
            );
            return Ok(());
        }
        Cmd::Eigen(c) => (Command::Eigen, c, None),
        Cmd::LambdaStar(c) => (Command::LambdaStar, c, None),
        Cmd::Duality(c) => (Command::Duality, c, None),
        Cmd::Solve(c) => (Command::Solve, c, None),
        Cmd::Blowup(c) => (Command::Blowup, c, None),
        Cmd::Maximal(c) => (Command::Maximal, c, None),
        Cmd::Subsolution(c) => (Command::Subsolution, c, None),
        Cmd::Exists(c) => (Command::Exists, c, None),
        Cmd::Nonexist(a) => (Command::Nonexist, a.common, a.theorem),
        Cmd::Compare(c) => (Command::Compare, c, None),
        Cmd::Green(c) => (Command::Green, c, None),
        Cmd::Poisson(c) => (Command::Poisson, c, None),
    };
    let input = loaded(&common, theorem)?;
    let outcome = app::run_scenario(&input, command, &common.out)?;
    print!("{}", outcome.report);
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
