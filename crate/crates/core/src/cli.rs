//! The `weyl-uncert` command line.
//!
//! Exit codes: 0 on success, 1 when an invariant fails or output cannot be
//! written, 2 for usage errors (bad flags, unparsable family specs, values
//! outside a family's window).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{figure_config, find_extremum, scan, ExtremumKind, Functional, Spacing, Sweep};
use crate::error::Error;
use crate::families::{FamilySpec, Truncation};
use crate::output::{csv_string, write_atomic, OutputEnvelope};
use crate::spin::{qubit_report, BlochVector};
use crate::verify::{self, Suite};

const FAMILY_HELP: &str = "Family spec: TAG[:key=value,...] with no spaces. Tags and keys: \
number:n | phase-coherent:xi,arg | gaussian:nbar,a|var,b | bessel:lambda | \
intermediate:alpha2,n,xi,arg,alpha_arg,beta_arg. Missing keys take defaults.";

#[derive(Debug, Parser)]
#[command(name = "weyl-uncert", version, about = "Phase-number certainty relations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the randomized invariant suites.
    Verify(VerifyArgs),
    /// Sweep one family parameter and tabulate U, U', U'', V.
    Scan(ScanArgs),
    /// Write the dataset behind one of the four figures.
    Figure(FigureArgs),
    /// Locate the minimum or maximum of a functional along one parameter.
    Extremum(ExtremumArgs),
    /// Characteristic functions of a qubit given its Bloch vector.
    Qubit(QubitArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SuiteArg {
    Spin,
    Fock,
    Families,
    All,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FunctionalArg {
    #[value(name = "U")]
    U,
    #[value(name = "Uprime")]
    Uprime,
    #[value(name = "Udoubleprime")]
    Udoubleprime,
    #[value(name = "V")]
    V,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Min,
    Max,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: SuiteArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random states per randomized check (at least 1).
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ScanArgs {
    #[arg(long, help = FAMILY_HELP)]
    pub family: String,
    #[arg(long)]
    pub param: String,
    #[arg(long, allow_negative_numbers = true)]
    pub from: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub to: f64,
    #[arg(long)]
    pub steps: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// phi in units of pi; defaults to 1/K so that K phi = pi.
    #[arg(long, allow_negative_numbers = true)]
    pub phi_over_pi: Option<f64>,
    /// Log-spaced grid (needs FROM > 0).
    #[arg(long)]
    pub log: bool,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args, Serialize)]
pub struct FigureArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    pub id: u8,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ExtremumArgs {
    #[arg(long, help = FAMILY_HELP)]
    pub family: String,
    #[arg(long)]
    pub param: String,
    #[arg(long, value_enum)]
    pub functional: FunctionalArg,
    #[arg(long, value_enum)]
    pub kind: KindArg,
    #[arg(long, allow_negative_numbers = true)]
    pub from: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub to: f64,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, allow_negative_numbers = true)]
    pub phi_over_pi: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct QubitArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub sx: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub sy: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub sz: f64,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub k: i64,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub ell: i64,
}

/// Outcome of a subcommand, before it is turned into an exit code.
enum Failure {
    Usage(String),
    Invariant(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::NotNormalized { .. } => Failure::Runtime(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type CmdResult = std::result::Result<(), Failure>;

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = out.write_all(text.as_bytes());
            } else {
                let _ = err.write_all(text.as_bytes());
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Scan(a) => cmd_scan(&a, out),
        Command::Figure(a) => cmd_figure(&a, out),
        Command::Extremum(a) => cmd_extremum(&a, out),
        Command::Qubit(a) => cmd_qubit(&a, out),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
        Err(Failure::Invariant(m)) => {
            let _ = writeln!(err, "invariant violated: {m}");
            1
        }
        Err(Failure::Runtime(m)) => {
            let _ = writeln!(err, "error: {m}");
            1
        }
    }
}

fn io_fail(e: std::io::Error) -> Failure {
    Failure::Runtime(e.to_string())
}

fn emit(out: &mut dyn Write, path: Option<&PathBuf>, contents: &str) -> CmdResult {
    match path {
        Some(p) => write_atomic(p, contents.as_bytes()).map_err(Failure::from),
        None => out.write_all(contents.as_bytes()).map_err(io_fail),
    }
}

fn phi_from(k: usize, phi_over_pi: Option<f64>) -> f64 {
    std::f64::consts::PI * phi_over_pi.unwrap_or(1.0 / k as f64)
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> CmdResult {
    if a.samples == 0 {
        return Err(Failure::Usage("--samples must be at least 1".into()));
    }
    let suite = match a.suite {
        SuiteArg::Spin => Suite::Spin,
        SuiteArg::Fock => Suite::Fock,
        SuiteArg::Families => Suite::Families,
        SuiteArg::All => Suite::All,
    };
    let report = verify::run(suite, a.seed, a.samples)?;
    writeln!(out, "verify suite={suite} seed={} samples={}", a.seed, a.samples).map_err(io_fail)?;
    for c in &report.checks {
        writeln!(out, "{c}").map_err(io_fail)?;
    }
    let failed = report.failures().count();
    writeln!(
        out,
        "{} of {} checks passed",
        report.checks.len() - failed,
        report.checks.len()
    )
    .map_err(io_fail)?;
    if failed > 0 {
        return Err(Failure::Invariant(format!("{failed} check(s) failed")));
    }
    Ok(())
}

fn table_output(
    command: &str,
    params: &impl Serialize,
    table: &crate::analysis::ScanTable,
    format: Format,
    notes: Vec<String>,
) -> std::result::Result<String, Failure> {
    Ok(match format {
        Format::Csv => csv_string(table),
        Format::Json => OutputEnvelope::new(command, params, table, notes)?.to_json()?,
    })
}

fn check_table(table: &crate::analysis::ScanTable) -> CmdResult {
    let v = table.bound_violations();
    if let Some((x, m)) = v.first() {
        return Err(Failure::Invariant(format!(
            "{} row(s) break the bounds, first at param = {x}: {m}",
            v.len()
        )));
    }
    Ok(())
}

fn cmd_scan(a: &ScanArgs, out: &mut dyn Write) -> CmdResult {
    let family: FamilySpec = a.family.parse()?;
    let trunc = Truncation::from_env()?;
    let sweep = Sweep {
        param: a.param.clone(),
        lo: a.from,
        hi: a.to,
        steps: a.steps,
        spacing: if a.log { Spacing::Log } else { Spacing::Linear },
    };
    let table = scan(&family, &sweep, a.k, phi_from(a.k, a.phi_over_pi), &trunc)?;
    let text = table_output("scan", a, &table, a.format, Vec::new())?;
    emit(out, a.out.as_ref(), &text)?;
    check_table(&table)
}

fn cmd_figure(a: &FigureArgs, out: &mut dyn Write) -> CmdResult {
    let cfg = figure_config(a.id)?;
    let trunc = Truncation::from_env()?;
    let table = scan(&cfg.template, &cfg.sweep, cfg.k, cfg.phi, &trunc)?;
    let notes = vec![cfg.note.to_string(), format!("columns of interest: {}", cfg.columns.join(", "))];
    let text = table_output("figure", a, &table, a.format, notes)?;
    emit(out, a.out.as_ref(), &text)?;
    check_table(&table)
}

#[derive(Serialize)]
struct ExtremumParams<'a> {
    family: &'a str,
    param: &'a str,
    functional: String,
    kind: ExtremumKind,
    from: f64,
    to: f64,
    k: usize,
    phi: f64,
}

fn cmd_extremum(a: &ExtremumArgs, out: &mut dyn Write) -> CmdResult {
    let family: FamilySpec = a.family.parse()?;
    let trunc = Truncation::from_env()?;
    let functional = match a.functional {
        FunctionalArg::U => Functional::U,
        FunctionalArg::Uprime => Functional::Uprime,
        FunctionalArg::Udoubleprime => Functional::Udoubleprime,
        FunctionalArg::V => Functional::V,
    };
    let kind = match a.kind {
        KindArg::Min => ExtremumKind::Min,
        KindArg::Max => ExtremumKind::Max,
    };
    let phi = phi_from(a.k, a.phi_over_pi);
    let result = find_extremum(&family, &a.param, functional, kind, (a.from, a.to), a.k, phi, &trunc)?;
    let params = ExtremumParams {
        family: &a.family,
        param: &a.param,
        functional: functional.to_string(),
        kind,
        from: a.from,
        to: a.to,
        k: a.k,
        phi,
    };
    let mut notes = Vec::new();
    if result.at_boundary {
        notes.push("extremum lies on the bracket boundary".to_string());
    }
    let text = OutputEnvelope::new("extremum", &params, &result, notes)?.to_json()?;
    out.write_all(text.as_bytes()).map_err(io_fail)
}

fn cmd_qubit(a: &QubitArgs, out: &mut dyn Write) -> CmdResult {
    let s = BlochVector::new(a.sx, a.sy, a.sz)?;
    let report = qubit_report(&s, a.k, a.ell)?;
    let notes = report.notes.clone();
    let text = OutputEnvelope::new("qubit", a, &report, notes)?.to_json()?;
    out.write_all(text.as_bytes()).map_err(io_fail)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("weyl-uncert").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(call(&["verify", "--samples", "0"]).0, 2);
        assert_eq!(call(&["bogus"]).0, 2);
        assert_eq!(call(&["qubit", "--sx", "1", "--sy", "1", "--sz", "0"]).0, 2);
        let (code, _, err) = call(&[
            "scan", "--family", "bessel:lambda=x", "--param", "lambda", "--from", "0.1", "--to", "1", "--steps", "3",
        ]);
        assert_eq!(code, 2);
        assert!(err.contains("byte 14"), "{err}");
        assert_eq!(call(&["figure", "--id", "5"]).0, 2);
    }

    #[test]
    fn qubit_example() {
        let (code, out, _) = call(&["qubit", "--sx", "0.7071", "--sy", "0", "--sz", "0.7071"]);
        assert_eq!(code, 0);
        let env = OutputEnvelope::from_json(&out).unwrap();
        assert!((env.payload["u"].as_f64().unwrap() - 1.0).abs() < 1e-3);
        assert!((env.payload["v"].as_f64().unwrap() - 0.5).abs() < 1e-3);
        assert_eq!(env.notes.len(), 1);
    }

    #[test]
    fn number_scan_to_stdout() {
        let (code, out, _) = call(&[
            "scan", "--family", "number", "--param", "n", "--from", "0", "--to", "5", "--steps", "6",
        ]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 7);
    }

    #[test]
    fn negative_bracket_accepted() {
        let (code, out, err) = call(&[
            "scan", "--family", "gaussian:nbar=100,var=10", "--param", "b", "--from", "-0.5", "--to", "0.5",
            "--steps", "3", "--format", "json",
        ]);
        assert_eq!(code, 0, "{err}");
        assert!(OutputEnvelope::from_json(&out).is_ok());
    }
}
