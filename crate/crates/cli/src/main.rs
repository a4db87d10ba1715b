use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

mod commands;
mod formats;

#[derive(Parser)]
#[command(name = "hoalg", version, about = "Exact homotopical algebra at truncated scale")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Weight cap (or bracket-length cap for free algebras).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    cap: Option<u64>,
    /// Highest arity of transferred or checked operations.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    arity_cap: Option<u64>,
    /// Cap on polynomial degree (t-degree for ODEs).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    degree_cap: Option<u64>,
    /// Seed for built-in fixtures.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// `json` (default) or `text` on stdout, or a file path for the JSON report.
    #[arg(long, global = true, default_value = "json")]
    out: String,
}

impl Common {
    pub fn cap_or(&self, default: usize) -> usize {
        self.cap.map_or(default, |v| v as usize)
    }
    pub fn arity_cap_or(&self, default: usize) -> usize {
        self.arity_cap.map_or(default, |v| v as usize)
    }
    pub fn degree_cap_or(&self, default: usize) -> usize {
        self.degree_cap.map_or(default, |v| v as usize)
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum Model {
    Mc1,
    Mcinf1,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum DeformCheck {
    Mc,
    Cocycle,
}

#[derive(Subcommand)]
enum Command {
    /// log(e^λ e^μ) in the free Lie algebra on λ, μ.
    Bch,
    /// The Lawrence–Sullivan interval algebra.
    LsAlgebra,
    /// Gauge action by integrating the gauge flow for unit time.
    GaugeFlow {
        /// `{"algebra": …, "gauge": {id: "p/q"}, "start": {id: "p/q"}}`; a seeded fixture if absent.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Homotopy transfer of an sL∞ structure along a contraction.
    Transfer {
        #[arg(long)]
        input: PathBuf,
        /// Contraction data; the harmonic contraction onto homology if absent.
        #[arg(long)]
        contraction: Option<PathBuf>,
    },
    /// Dupont contraction identities on the polynomial forms of Δ^n.
    DupontVerify {
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Composites showing that convolution is not a bifunctor.
    Counterexample,
    /// Rectification of a Maurer–Cartan path.
    Rectify {
        #[arg(long, default_value_t = 1)]
        level: usize,
        #[arg(long, requires = "homotopy")]
        algebra: Option<PathBuf>,
        #[arg(long, requires = "algebra")]
        homotopy: Option<PathBuf>,
    },
    /// Presentations of the cellular Maurer–Cartan models.
    McModel {
        #[arg(long, value_enum)]
        which: Model,
    },
    /// Formal ODE solved by recursion and by tree sums.
    SolveOde {
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Formal fixed-point equation solved by iteration and weight by weight.
    SolveFp {
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Associative deformation checks.
    Deform {
        #[arg(long)]
        algebra: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "mc")]
        check: DeformCheck,
    },
    /// Relation checker for a tabulated sL∞ algebra.
    CheckLinfty {
        #[arg(long)]
        input: PathBuf,
    },
    /// Runs the acceptance suite.
    Acceptance {
        /// Run only this criterion.
        #[arg(long)]
        only: Option<usize>,
    },
}

/// A command's result: the JSON report, a text rendering, and the verdict.
pub struct Report {
    pub json: Value,
    pub text: String,
    pub pass: bool,
}

fn dispatch(cli: &Cli) -> anyhow::Result<Report> {
    let c = &cli.common;
    match &cli.command {
        Command::Bch => commands::bch(c),
        Command::LsAlgebra => commands::ls_algebra(c),
        Command::GaugeFlow { input } => commands::gauge_flow(c, input.as_deref()),
        Command::Transfer { input, contraction } => commands::transfer(c, input, contraction.as_deref()),
        Command::DupontVerify { n } => commands::dupont_verify(c, *n),
        Command::Counterexample => commands::counterexample(),
        Command::Rectify { level, algebra, homotopy } => commands::rectify(c, *level, algebra.as_deref().zip(homotopy.as_deref())),
        Command::McModel { which } => commands::mc_model(c, *which),
        Command::SolveOde { input } => commands::solve_ode(c, input.as_deref()),
        Command::SolveFp { input } => commands::solve_fp(c, input.as_deref()),
        Command::Deform { algebra, check } => commands::deform(c, algebra.as_deref(), *check),
        Command::CheckLinfty { input } => commands::check_linfty(c, input),
        Command::Acceptance { only } => commands::acceptance(*only),
    }
}

fn emit(out: &str, report: &Report) -> anyhow::Result<()> {
    let rendered = serde_json::to_string_pretty(&report.json)?;
    match out {
        "json" | "-" => println!("{rendered}"),
        "text" => println!("{}", report.text),
        path => std::fs::write(path, rendered + "\n").with_context(|| format!("writing {path}"))?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli).and_then(|r| emit(&cli.common.out, &r).map(|_| r.pass)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("hoalg: check failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("hoalg: {e:#}");
            ExitCode::from(1)
        }
    }
}
