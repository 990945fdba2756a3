//! Argument parsing and dispatch of the `greedy-widths` binary.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use greedy_widths_core::verify::LogBase;

use crate::commands::{self, CommandOutput};
use crate::config::{Format, RunConfig};
use crate::error::{CliError, Result, EXIT_OK, EXIT_VIOLATION};
use crate::formats::{json_document, write_file};
use crate::plots::emit_plots;
use crate::suites::{run_suite, Suite};

#[derive(Debug, Parser)]
#[command(
    name = "greedy-widths",
    version = crate::formats::BUILD_ID,
    about = "Greedy subspace selection, widths and bound verification in finite-dimensional normed spaces"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LogBaseArg {
    #[value(name = "e")]
    E,
    #[value(name = "2")]
    Two,
}

impl From<LogBaseArg> for LogBase {
    fn from(b: LogBaseArg) -> Self {
        match b {
            LogBaseArg::E => LogBase::E,
            LogBaseArg::Two => LogBase::Two,
        }
    }
}

/// Flags shared by every subcommand; they override the config file.
#[derive(Debug, Default, Args)]
pub struct GlobalArgs {
    /// Run configuration (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed of every random choice.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Relative tolerance of the bound comparisons.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output directory (verify, plot) or file (other subcommands).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Base of the logarithm in the power-law bound.
    #[arg(long, global = true, value_enum)]
    pub log_base: Option<LogBaseArg>,
    /// Print errors as JSON on stderr.
    #[arg(long, global = true)]
    pub json_errors: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the greedy algorithm on a set file.
    Greedy {
        #[arg(long)]
        set: PathBuf,
        /// Greedy steps.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Kolmogorov and Gelfand widths d_0..d_n of an operator file.
    Widths {
        #[arg(long)]
        op: PathBuf,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Grothendieck numbers Γ_1..Γ_n of an operator file.
    Gamma {
        #[arg(long)]
        op: PathBuf,
        #[arg(long)]
        n: Option<usize>,
    },
    /// John-ellipsoid bound on the Banach–Mazur distance of a subspace to ℓ₂^k.
    BmBound {
        #[arg(long)]
        subspace: PathBuf,
    },
    /// Run verification suites and write one report tree.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        /// Single α for the example and thm31 suites.
        #[arg(long)]
        alpha: Option<f64>,
        /// Single q for the example and thm31 suites.
        #[arg(long)]
        q: Option<f64>,
        /// Ambient dimension of the example and thm31 suites.
        #[arg(long)]
        m: Option<usize>,
    },
    /// Render the series of a report tree as SVG plots with CSV data.
    Plot {
        #[arg(long, default_value = "reports")]
        reports: PathBuf,
    },
}

/// The config file (or defaults) with the command-line flags applied.
pub fn resolve_config(global: &GlobalArgs) -> Result<RunConfig> {
    let mut cfg = match &global.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = global.seed {
        cfg.seed = seed;
    }
    if let Some(threads) = global.threads {
        cfg.threads = Some(threads);
    }
    if let Some(tol) = global.tol {
        cfg.tol = tol;
    }
    if let Some(out) = &global.out {
        cfg.out = Some(out.clone());
    }
    if let Some(format) = global.format {
        cfg.format = format;
    }
    if let Some(base) = global.log_base {
        cfg.log_base = base.into();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn apply_instance_flags(
    cfg: &mut RunConfig,
    alpha: Option<f64>,
    q: Option<f64>,
    m: Option<usize>,
) -> Result<()> {
    if let Some(alpha) = alpha {
        cfg.example.alphas = vec![alpha];
        cfg.thm31.alphas = vec![alpha];
    }
    if let Some(q) = q {
        cfg.example.qs = vec![q];
        cfg.thm31.qs = vec![q];
    }
    if let Some(m) = m {
        cfg.example.m = m;
        cfg.example.n_max = cfg.example.n_max.map(|n| n.min(m));
        cfg.thm31.m = m;
        cfg.thm31.n_max = cfg.thm31.n_max.min(m.saturating_sub(1));
        cfg.thm31.n_min = cfg.thm31.n_min.min(cfg.thm31.n_max);
    }
    cfg.validate()
}

fn thread_pool(cfg: &RunConfig) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        builder = builder.num_threads(t);
    }
    builder
        .build()
        .map_err(|e| CliError::config(format!("cannot start the worker pool: {e}")))
}

/// Runs the suites and writes `out/<suite>/…` plus `out/run.json`; returns the exit code.
pub fn verify(
    cfg: &RunConfig,
    suite: Suite,
    out: &Path,
    log: &mut dyn std::io::Write,
) -> Result<i32> {
    let pool = thread_pool(cfg)?;
    let mut violations = 0;
    write_file(
        &out.join("run.json"),
        &json_document("run_config", &cfg.recorded()),
    )?;
    for s in suite.expand() {
        let run = pool.install(|| run_suite(s, cfg))?;
        run.write(out, cfg.format)?;
        violations += run.violations();
        let _ = writeln!(log, "{}", run.summary_line());
        for f in &run.failures {
            let _ = writeln!(log, "  failure: {f}");
        }
        for r in run.reports.iter().filter(|r| r.report.is_violation()) {
            let _ = writeln!(
                log,
                "  violated: {} (lhs {}, rhs {})",
                r.name, r.report.lhs, r.report.rhs
            );
        }
    }
    Ok(if violations > 0 {
        EXIT_VIOLATION
    } else {
        EXIT_OK
    })
}

fn emit(output: CommandOutput, cfg: &RunConfig) -> Result<i32> {
    let text = match cfg.format {
        Format::Json => json_document(output.kind, &output.data),
        Format::Csv => output.table.to_csv(),
    };
    match &cfg.out {
        Some(path) => write_file(path, &text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::io("<stdout>", e))?;
        }
    }
    Ok(output.exit_code)
}

/// Executes a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> Result<i32> {
    let mut cfg = resolve_config(&cli.global)?;
    match &cli.command {
        Command::Greedy { set, n } => emit(commands::greedy(set, *n, &cfg)?, &cfg),
        Command::Widths { op, n } => emit(commands::widths(op, *n, &cfg)?, &cfg),
        Command::Gamma { op, n } => emit(commands::gamma(op, *n, &cfg)?, &cfg),
        Command::BmBound { subspace } => emit(commands::bm_bound(subspace, &cfg)?, &cfg),
        Command::Verify { suite, alpha, q, m } => {
            apply_instance_flags(&mut cfg, *alpha, *q, *m)?;
            let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("reports"));
            verify(&cfg, *suite, &out, &mut std::io::stdout())
        }
        Command::Plot { reports } => {
            let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("plots"));
            let outcome = emit_plots(reports, &out)?;
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            for f in &outcome.files {
                println!("{}", f.display());
            }
            Ok(EXIT_OK)
        }
    }
}
