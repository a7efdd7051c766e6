use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use kirwan_core::blowdown::{analyze, Analysis};
use kirwan_core::scenario::{builtin, Scenario, BUILTIN_NAMES};
use kirwan_core::strata::semistable_series;

use crate::config::{load_scenario, ConfigError};
use crate::report::{self, CheckKind, Format};

pub mod exit {
    pub const OK: u8 = 0;
    pub const CHECK_FAILED: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const CONFIG: u8 = 3;
    pub const NOT_POLYNOMIAL: u8 = 4;
    pub const FIBER_NOT_CLOSED: u8 = 5;
    pub const NEEDS_OVERRIDE: u8 = 6;
    pub const UNSUPPORTED: u8 = 7;
    pub const ENGINE: u8 = 8;
}

#[derive(Debug, Parser)]
#[command(name = "kirwan", version, about = "Exact Betti numbers of torus-by-finite GIT quotients")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the unstable strata.
    Strata(Options),
    /// Equivariant Poincaré series of the semistable locus.
    Semistable(Options),
    /// Betti numbers of the partial desingularization.
    Blowup(Options),
    /// Intersection Betti numbers of the quotient.
    Intersection(Options),
    /// Everything, plus invariant checks and assumptions.
    Report(Options),
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false)]
pub struct Source {
    /// Built-in scenario name.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Path to a JSON scenario file.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Options {
    #[command(flatten)]
    pub source: Source,
    /// Print truncations modulo t^N.
    #[arg(long = "mod-t", value_name = "N", value_parser = clap::value_parser!(u32).range(1..))]
    pub mod_t: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Comma-separated invariant checks; failure sets exit status 1.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub check: Vec<CheckKind>,
}

impl Command {
    fn options(&self) -> &Options {
        match self {
            Command::Strata(o) | Command::Semistable(o) | Command::Blowup(o) | Command::Intersection(o) | Command::Report(o) => o,
        }
    }
}

#[derive(Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn fail(code: u8, message: impl std::fmt::Display) -> Self {
        Self { code, stdout: String::new(), stderr: format!("kirwan: {message}\n") }
    }
}

pub fn engine_exit_code(e: &kirwan_core::Error) -> u8 {
    use kirwan_core::Error as E;
    match e {
        E::NotPolynomial => exit::NOT_POLYNOMIAL,
        E::FiberNotClosed { .. } => exit::FIBER_NOT_CLOSED,
        E::NeedsOverride { .. } => exit::NEEDS_OVERRIDE,
        E::UnsupportedStages(_) => exit::UNSUPPORTED,
        E::BadMatrix(_)
        | E::NotInvertible(_)
        | E::NotClosed { .. }
        | E::NotInvariant(_)
        | E::InnerProductNotInvariant(_)
        | E::EmptyDiagram
        | E::ZeroMultiplicity(_)
        | E::RankMismatch { .. } => exit::CONFIG,
        E::ZeroDenominatorExponent | E::EmptyRange { .. } => exit::ENGINE,
    }
}

fn resolve(source: &Source) -> Result<Scenario, Outcome> {
    match (&source.scenario, &source.config) {
        (Some(name), _) => builtin(name).ok_or_else(|| {
            Outcome::fail(exit::USAGE, format!("unknown builtin scenario `{name}` (available: {})", BUILTIN_NAMES.join(", ")))
        }),
        (None, Some(path)) => load_scenario(path).map_err(|e| match e {
            ConfigError::Io { .. } => Outcome::fail(exit::CONFIG, e),
            ConfigError::Engine(inner) => Outcome::fail(engine_exit_code(&inner), format!("{}: {inner}", path.display())),
            ConfigError::Parse(_) => Outcome::fail(exit::CONFIG, format!("{}: {e}", path.display())),
        }),
        (None, None) => Err(Outcome::fail(exit::USAGE, "one of --scenario or --config is required")),
    }
}

fn render<T: serde::Serialize>(format: Format, doc: &T, table: impl FnOnce(&T) -> String, csv: impl FnOnce(&T) -> String) -> String {
    match format {
        Format::Table => table(doc),
        Format::Json => report::json(doc),
        Format::Csv => csv(doc),
    }
}

fn execute(command: &Command, s: &Scenario) -> Result<(String, bool), kirwan_core::Error> {
    let o = command.options();
    let order = o.mod_t.unwrap_or_else(|| s.truncation());
    let mut checks = o.check.clone();
    checks.sort();
    checks.dedup();
    let analysis = |needed: bool| -> Result<Option<Analysis>, kirwan_core::Error> {
        if needed || !checks.is_empty() {
            analyze(s).map(Some)
        } else {
            Ok(None)
        }
    };
    let passed = |a: &Option<Analysis>| a.as_ref().is_none_or(|a| checks.iter().all(|k| k.outcome(&a.checks())));
    let check_lines = |a: &Option<Analysis>| -> String {
        match (a, o.format) {
            (Some(a), Format::Table) => report::check_docs(&checks, &a.checks())
                .iter()
                .map(|c| format!("check {}: {}\n", c.name, if c.passed { "pass" } else { "FAIL" }))
                .collect(),
            _ => String::new(),
        }
    };
    let out = match command {
        Command::Strata(_) => {
            let a = analysis(false)?;
            let rows = report::strata_rows(s);
            let body = render(o.format, &rows, |r| report::strata_table(r), |r| report::strata_csv(r));
            (body + &check_lines(&a), passed(&a))
        }
        Command::Semistable(_) => {
            let a = analysis(false)?;
            let doc = report::SemistableDoc::new(&semistable_series(s), order);
            let body = render(o.format, &doc, report::semistable_table, |d| report::series_csv(&d.truncated));
            (body + &check_lines(&a), passed(&a))
        }
        Command::Blowup(_) => {
            let a = analysis(true)?;
            let full = a.as_ref().expect("requested");
            let doc = report::blowup_doc(full, order, &checks);
            (render(o.format, &doc, report::blowup_table, |d| report::series_csv(&d.kirwan)), passed(&a))
        }
        Command::Intersection(_) => {
            let a = analysis(true)?;
            let full = a.as_ref().expect("requested");
            let doc = report::intersection_doc(full, order, &checks);
            (render(o.format, &doc, report::intersection_table, |d| report::series_csv(&d.intersection)), passed(&a))
        }
        Command::Report(_) => {
            let a = analysis(true)?;
            let doc = report::full_report(a.as_ref().expect("requested"), order);
            (render(o.format, &doc, report::report_table, report::report_csv), passed(&a))
        }
    };
    Ok(out)
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: exit::USAGE, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: exit::OK, stdout: text, stderr: String::new() }
            };
        }
    };
    let o = cli.command.options();
    let mut s = match resolve(&o.source) {
        Ok(s) => s,
        Err(out) => return out,
    };
    if let Some(n) = o.mod_t {
        s = s.with_truncation_order(Some(n));
    }
    match execute(&cli.command, &s) {
        Ok((stdout, true)) => Outcome { code: exit::OK, stdout, stderr: String::new() },
        Ok((stdout, false)) => Outcome { code: exit::CHECK_FAILED, stdout, stderr: "kirwan: a requested check failed\n".into() },
        Err(e) => Outcome::fail(engine_exit_code(&e), e),
    }
}
