use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ergokde::cli::{self, Formula};
use ergokde::config::{parse_config, ExperimentConfig};
use ergokde::Error;

/// Kernel invariant-density estimation for ergodic diffusions with jumps.
#[derive(Parser)]
#[command(name = "ergokde", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Overrides `simulation.seed`.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one path and write `t,x1,...,xd`.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Estimate the invariant density on the configured grid.
    Estimate {
        #[command(flatten)]
        common: Common,
        /// Path CSV to estimate from instead of simulating.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Run data-driven bandwidth selection and write its trace.
    Adapt {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Sup-norm and pointwise risk over `experiment.t_list`.
    Rates {
        #[command(flatten)]
        common: Common,
    },
    /// Variance of occupation times against cube volume.
    Variance {
        #[command(flatten)]
        common: Common,
    },
    /// Tabulate a closed-form expression.
    Formulas {
        #[command(flatten)]
        common: Common,
        #[arg(long = "fn", value_enum)]
        function: FormulaArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormulaArg {
    Psi,
    Sigma,
    Upsilon,
    Phi,
    #[value(name = "psi_rate")]
    PsiRate,
    Bandwidth,
}

impl From<FormulaArg> for Formula {
    fn from(f: FormulaArg) -> Self {
        match f {
            FormulaArg::Psi => Formula::Psi,
            FormulaArg::Sigma => Formula::Sigma,
            FormulaArg::Upsilon => Formula::Upsilon,
            FormulaArg::Phi => Formula::Phi,
            FormulaArg::PsiRate => Formula::PsiRate,
            FormulaArg::Bandwidth => Formula::Bandwidth,
        }
    }
}

fn load(common: &Common) -> Result<ExperimentConfig, Error> {
    let text = std::fs::read_to_string(&common.config)?;
    let mut cfg = parse_config(&text)?;
    if let Some(seed) = common.seed {
        cfg.simulation.seed = seed;
    }
    std::fs::write(cli::sibling(&common.out, "resolved.toml"), cfg.to_toml()?)?;
    Ok(cfg)
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Simulate { common } => cli::simulate(&load(&common)?, &common.out),
        Command::Estimate { common, input } => {
            let h = cli::estimate(&load(&common)?, &common.out, input.as_deref())?;
            println!("h={h}");
            Ok(())
        }
        Command::Adapt { common, input } => {
            let h = cli::adapt(&load(&common)?, &common.out, input.as_deref())?;
            println!("selected_h={h}");
            Ok(())
        }
        Command::Rates { common } => {
            let s = cli::rates(&load(&common)?, &common.out)?;
            println!(
                "sup_slope={} residual_rms={} pt_slope={}",
                s.sup_slope, s.sup_residual_rms, s.pt_slope
            );
            Ok(())
        }
        Command::Variance { common } => {
            let (slope, theory) = cli::variance(&load(&common)?, &common.out)?;
            match slope {
                Some(s) => println!("slope={s} theoretical={theory}"),
                None => println!("slope=NaN theoretical={theory}"),
            }
            Ok(())
        }
        Command::Formulas { common, function } => cli::formulas(&load(&common)?, &common.out, function.into()),
    }
}

fn init_threads() -> Result<(), Error> {
    let Ok(v) = std::env::var("ERGOKDE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Validation(format!("ERGOKDE_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Validation(e.to_string()))
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            eprintln!("error: kind=usage msg={}", one_line(&e.to_string()));
            return ExitCode::from(1);
        }
    };
    match init_threads().and_then(|_| run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = match &e {
                Error::Config { key, msg } => format!("key={key} {msg}"),
                other => other.to_string(),
            };
            eprintln!("error: kind={} msg={}", e.kind(), one_line(&msg));
            ExitCode::from(if matches!(e, Error::EmptyGrid { .. }) { 2 } else { 1 })
        }
    }
}
