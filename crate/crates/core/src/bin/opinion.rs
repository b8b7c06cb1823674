use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use discrete_opinion::cli::{self, Config, TheoryQuery};
use discrete_opinion::graphgen::write_edge_list;
use discrete_opinion::harness::write_csv;

#[derive(Parser)]
#[command(
    name = "opinion",
    version,
    about = "Discrete opinion dynamics under media recommendations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for trial execution (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Args)]
struct Source {
    /// TOML config with one or more [[experiment]] tables.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Bundled config, e.g. fig4-desk (see `opinion presets`).
    #[arg(long)]
    preset: Option<String>,
    /// Base seed overriding the config (configs default to 0).
    #[arg(long)]
    seed: Option<u64>,
}

impl Source {
    fn load(&self) -> Result<Config> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(path), _) => Config::load(path)?,
            (None, Some(name)) => Config::preset(name)?,
            (None, None) => bail!("pass --config <file> or --preset <name>"),
        };
        if let Some(seed) = self.seed {
            cfg.override_seed(seed);
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run trial 0 of the first experiment and write its trace.
    Simulate {
        #[command(flatten)]
        source: Source,
        /// Trace file (`step,mover,phi,opinions...`); stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Threshold table and, with --x-left/--x-right/--b-tilde, the regime.
    Theory {
        #[arg(long)]
        h: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        #[arg(long, allow_hyphen_values = true, requires_all = ["x_right", "b_tilde"])]
        x_left: Option<f64>,
        #[arg(long, allow_hyphen_values = true, requires_all = ["x_left", "b_tilde"])]
        x_right: Option<f64>,
        #[arg(long, requires_all = ["x_left", "x_right"])]
        b_tilde: Option<f64>,
    },
    /// Run every experiment's sweep and write the CSV.
    Sweep {
        #[command(flatten)]
        source: Source,
        /// CSV file; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify the exponential schedule on a chain of n gadgets.
    Gadget {
        #[arg(long)]
        n: usize,
        /// Weight ratio between consecutive gadgets (must exceed 9).
        #[arg(long, default_value_t = 10.0)]
        ratio: f64,
        /// Media weight as a fraction of the last gadget's scale.
        #[arg(long, default_value_t = 0.5)]
        eps_prime: f64,
    },
    /// Kernighan-Lin bipartition of an edge list with its homophily.
    Partition {
        /// Edge list (`u v` or `u v w` per line, `#` comments).
        edge_list: PathBuf,
        /// Side labels (`id L|R` per line); stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate the network of trial 0 of the first experiment.
    Gen {
        #[command(flatten)]
        source: Source,
        /// Weighted edge list; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the bundled presets.
    Presets,
}

fn run(args: Cli) -> Result<bool> {
    if let Some(jobs) = args.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("configuring the worker pool")?;
    }
    match args.command {
        Command::Simulate { source, out } => {
            let cfg = source.load()?;
            let report = cli::simulate(&cfg.experiment[0])?;
            let to_stdout = out.is_none();
            let mut w = cli::output(out.as_ref())?;
            report.trajectory.write_trace(&report.grid, &mut w)?;
            w.flush()?;
            drop(w);
            if to_stdout {
                eprintln!("{report}");
            } else {
                writeln!(std::io::stdout(), "{report}")?;
            }
        }
        Command::Theory {
            h,
            delta,
            lambda,
            x_left,
            x_right,
            b_tilde,
        } => {
            let instance = match (x_left, x_right, b_tilde) {
                (Some(l), Some(r), Some(b)) => Some((l, r, b)),
                _ => None,
            };
            write!(
                std::io::stdout(),
                "{}",
                cli::theory_report(&TheoryQuery {
                    h,
                    delta,
                    lambda,
                    instance
                })?
            )?;
        }
        Command::Sweep { source, out } => {
            let cfg = source.load()?;
            let rows = cli::sweep_config(&cfg)?;
            write_csv(&rows, cli::output(out.as_ref())?)?;
            if let Some(path) = out {
                eprintln!("wrote {} rows to {}", rows.len(), path.display());
            }
        }
        Command::Gadget {
            n,
            ratio,
            eps_prime,
        } => {
            let summary = cli::gadget_check(n, ratio, eps_prime)?;
            writeln!(std::io::stdout(), "{summary}")?;
            return Ok(summary.passed());
        }
        Command::Partition { edge_list, out } => {
            let result = cli::partition_file(&edge_list)?;
            let mut w = cli::output(out.as_ref())?;
            result.write_sides(&mut w)?;
            w.flush()?;
            eprintln!("{result}");
        }
        Command::Gen { source, out } => {
            let cfg = source.load()?;
            let (graph, _, h) = cli::generate(&cfg.experiment[0])?;
            let mut w = cli::output(out.as_ref())?;
            write_edge_list(&graph, &mut w, true)?;
            w.flush()?;
            eprintln!(
                "nodes: {}, edges: {}, h = {}",
                graph.node_count(),
                graph.edge_count(),
                h.map_or("undefined".to_string(), |v| v.to_string())
            );
        }
        Command::Presets => {
            for (name, _) in cli::PRESETS {
                writeln!(std::io::stdout(), "{name}")?;
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let level = match args.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        // A closed downstream pipe (e.g. `| head`) is not an error.
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|cause| {
        let io = cause.downcast_ref::<std::io::Error>().or_else(|| {
            cause
                .downcast_ref::<csv::Error>()
                .and_then(|c| match c.kind() {
                    csv::ErrorKind::Io(io) => Some(io),
                    _ => None,
                })
        });
        io.is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
    })
}
