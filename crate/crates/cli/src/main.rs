use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use orgswarm_core::{
    load_config, run_experiment, write_outputs, CliOverrides, RunError, TraceLevel,
};

#[derive(Parser)]
#[command(
    name = "orgswarm",
    version,
    about = "Swarm simulation of self-organizing groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every arm of an experiment and write CSV outputs.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        replicates: Option<u32>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, value_enum)]
        trace: Option<Trace>,
    },
    /// Check a config file and list the arms it expands to.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Trace {
    None,
    Group,
    Full,
}

impl From<Trace> for TraceLevel {
    fn from(t: Trace) -> Self {
        match t {
            Trace::None => TraceLevel::None,
            Trace::Group => TraceLevel::Group,
            Trace::Full => TraceLevel::Full,
        }
    }
}

fn run(command: Command) -> Result<(), RunError> {
    match command {
        Command::Run {
            config,
            out,
            seed,
            replicates,
            workers,
            trace,
        } => {
            let overrides = CliOverrides {
                master_seed: seed,
                replicate_count: replicates,
                output_dir: out,
                trace: trace.map(Into::into),
                workers,
            };
            let spec = load_config(&config)?.resolve(&overrides)?;
            let started = Instant::now();
            let outcome = run_experiment(&spec)?;
            let files = write_outputs(&outcome, &spec.output_dir)?;
            for arm in &outcome.arms {
                let g = &arm.summary.group_convergence;
                let median = g
                    .median
                    .map_or_else(|| "never".to_string(), |m| m.to_string());
                eprintln!(
                    "{:<28} n={:<5} success={:<6.3} median_group_convergence={}",
                    arm.label, g.n, g.success_rate, median
                );
            }
            eprintln!(
                "wrote {} files to {} in {:.2?}",
                files.len(),
                spec.output_dir.display(),
                started.elapsed()
            );
            Ok(())
        }
        Command::Validate { config } => {
            let spec = load_config(&config)?.resolve(&CliOverrides::default())?;
            for arm in &spec.arms {
                let c = &arm.config;
                println!(
                    "{}: design={:?} tendency={} D={} N={} T={} replicates={} seed={}",
                    arm.label,
                    c.design,
                    c.tendency,
                    c.dim,
                    c.agent_count,
                    c.max_iterations,
                    c.replicate_count,
                    c.master_seed
                );
            }
            println!("ok: {} arms", spec.arms.len());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
