//! Library side of the `dsfuse` command. [`run`] parses arguments, executes
//! one command and returns the process exit code.

pub mod docs;
pub mod render;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use dsfuse::{
    build_report, classify_sources, fuse_scenario, load_scenario, rank_sources, CombinationRule,
    ImpactThresholds, ScenarioConfig, ScenarioError, ThresholdChoice,
};

use docs::{ClassifyDoc, FuseDoc, ReportDoc, VbsaDoc};
use render::OutputFormat;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "dsfuse",
    version,
    about = "Dempster-Shafer evidence fusion and uncertainty ranking for scenario files"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Table, global = true)]
    pub format: OutputFormat,

    /// Combination rule used to fuse sources.
    #[arg(long, value_parser = parse_rule, default_value = "yager", global = true)]
    pub rule: CombinationRule,

    /// Write the output to this file instead of stdout.
    #[arg(long, value_name = "PATH", global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a scenario file and list every problem found.
    Validate { scenario: PathBuf },
    /// Fuse all sources at their assigned states.
    Fuse { scenario: PathBuf },
    /// Classify each source as Low, Moderate or High impact.
    Classify {
        scenario: PathBuf,
        #[command(flatten)]
        thresholds: ThresholdArgs,
    },
    /// Rank sources by the variance of belief and plausibility over their states.
    Vbsa {
        scenario: PathBuf,
        /// Also write per-outcome variances as CSV to this path.
        #[arg(long, value_name = "PATH")]
        plot_data: Option<PathBuf>,
    },
    /// Fusion, classification and sensitivity ranking in one document.
    Report {
        scenario: PathBuf,
        #[command(flatten)]
        thresholds: ThresholdArgs,
    },
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    /// Upper bound of the Low band.
    #[arg(long, conflicts_with = "derive_thresholds")]
    pub tau1: Option<f64>,
    /// Lower bound of the High band.
    #[arg(long, conflicts_with = "derive_thresholds")]
    pub tau2: Option<f64>,
    /// Use the quartiles of the sources' maximum uncertainties as thresholds.
    #[arg(long)]
    pub derive_thresholds: bool,
}

impl ThresholdArgs {
    fn choice(&self) -> Result<ThresholdChoice, String> {
        if self.derive_thresholds {
            return Ok(ThresholdChoice::Derive);
        }
        let tau1 = self.tau1.unwrap_or(ImpactThresholds::DEFAULT.tau1);
        let tau2 = self.tau2.unwrap_or(ImpactThresholds::DEFAULT.tau2);
        ImpactThresholds::new(tau1, tau2)
            .map(ThresholdChoice::Fixed)
            .map_err(|e| e.to_string())
    }
}

fn parse_rule(s: &str) -> Result<CombinationRule, String> {
    s.parse()
}

/// A failed command: exit code plus the message for stderr.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_RUNTIME,
            message: message.into(),
        }
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        let mut message = e.to_string();
        if let ScenarioError::Validation(findings) = &e {
            for f in findings {
                message.push_str(&format!("\n  {f}"));
            }
        }
        Self {
            code: EXIT_INVALID,
            message,
        }
    }
}

impl From<dsfuse::Error> for Failure {
    fn from(e: dsfuse::Error) -> Self {
        Self::runtime(e.to_string())
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn load(path: &Path) -> Result<ScenarioConfig, Failure> {
    Ok(load_scenario(path)?)
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), Failure> {
    let rule = cli.rule;
    let output = match &cli.command {
        Command::Validate { scenario } => {
            let cfg = load(scenario)?;
            format!(
                "scenario valid: {} sources, {} outcomes, {} edges\n",
                cfg.source_count(),
                cfg.frame().len(),
                cfg.graph().edges().len()
            )
        }
        Command::Fuse { scenario } => {
            let cfg = load(scenario)?;
            let fused = fuse_scenario(&cfg, rule)?;
            render::fuse(&FuseDoc::new(&cfg, rule, &fused), cli.format)
        }
        Command::Classify {
            scenario,
            thresholds,
        } => {
            let choice = thresholds.choice().map_err(Failure::usage)?;
            let cfg = load(scenario)?;
            let (thresholds, sources) = classify_sources(&cfg, rule, choice)?;
            let doc = ClassifyDoc {
                rule,
                thresholds,
                thresholds_derived: matches!(choice, ThresholdChoice::Derive),
                sources,
            };
            render::classify(&doc, cli.format)
        }
        Command::Vbsa {
            scenario,
            plot_data,
        } => {
            let cfg = load(scenario)?;
            let ranking = rank_sources(&cfg, rule)?;
            if let Some(path) = plot_data {
                write_file(path, &render::plot_data(&ranking))?;
            }
            render::vbsa(&VbsaDoc { rule, ranking }, cli.format)
        }
        Command::Report {
            scenario,
            thresholds,
        } => {
            let choice = thresholds.choice().map_err(Failure::usage)?;
            let cfg = load(scenario)?;
            let report = build_report(&cfg, rule, choice)?;
            render::report(&ReportDoc::new(&cfg, report), cli.format)
        }
    };
    match &cli.out {
        Some(path) => write_file(path, &output),
        None => stdout
            .write_all(output.as_bytes())
            .map_err(|e| Failure::runtime(format!("cannot write output: {e}"))),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents)
        .map_err(|e| Failure::runtime(format!("cannot write {}: {e}", path.display())))
}
