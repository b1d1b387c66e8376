//! Argument parsing and the five subcommands.

use std::fmt;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use infowell_core::exact::parse_big_rational;
use infowell_core::{BigRational, Space, WellState};
use serde::Serialize;

use crate::eval::{self, Evaluated, Quantity, Request};
use crate::json::{MeasureJson, ReportJson};

#[derive(Debug, Parser)]
#[command(name = "infowell", version, about = "Exact integrals and information measures of the infinite square well")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a single value
    Compute(CommonArgs),
    /// Tabulate a quantity over n and k ranges
    Table(CommonArgs),
    /// Check closed forms against the quadrature oracle
    Verify(CommonArgs),
    /// Compare I(n,k) with its leading large-n term
    Asymptote(CommonArgs),
    /// Sample a probability density on a uniform grid
    Density(CommonArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Exact,
    Decimal,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SpaceArg {
    Position,
    Momentum,
}

impl From<SpaceArg> for Space {
    fn from(s: SpaceArg) -> Space {
        match s {
            SpaceArg::Position => Space::Position,
            SpaceArg::Momentum => Space::Momentum,
        }
    }
}

#[derive(Clone, Debug, Args)]
pub struct CommonArgs {
    #[arg(long, value_enum, default_value_t = Quantity::Ink)]
    pub quantity: Quantity,
    /// Quantum number (compute, density)
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub n: Option<u32>,
    /// Order (compute); also the first order of the joint measures
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub k: Option<u32>,
    /// Momentum order of usum/uquot/uprod [default: k]
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub l: Option<u32>,
    /// Well width as an integer or p/q
    #[arg(long, default_value = "1", value_parser = parse_width)]
    pub a: BigRational,
    /// Inclusive range like 1..8
    #[arg(long, value_parser = parse_range)]
    pub n_range: Option<RangeInclusive<u32>>,
    #[arg(long, value_parser = parse_range)]
    pub k_range: Option<RangeInclusive<u32>>,
    /// Significant digits [default: 25, verify: 30]
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub digits: Option<u32>,
    #[arg(long, default_value_t = 1e-8, value_parser = parse_tol)]
    pub tol: f64,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SpaceArg::Momentum)]
    pub space: SpaceArg,
    /// Grid size for density
    #[arg(long, default_value_t = 201, value_parser = clap::value_parser!(u64).range(2..))]
    pub points: u64,
    /// Half-width of the momentum grid [default: 4πn/a]
    #[arg(long)]
    pub p_max: Option<f64>,
}

fn parse_width(s: &str) -> Result<BigRational, String> {
    let a = parse_big_rational(s).map_err(|e| e.to_string())?;
    if a <= BigRational::from_integer(0.into()) {
        return Err("width must be positive".into());
    }
    Ok(a)
}

fn parse_tol(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
        _ => Err("tolerance must be a positive number".into()),
    }
}

/// `a..b` and `a..=b` are both inclusive; a bare integer is a one-element range.
pub fn parse_range(s: &str) -> Result<RangeInclusive<u32>, String> {
    let num = |t: &str| t.trim().parse::<u32>().map_err(|_| format!("bad range bound `{t}`"));
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (num(lo)?, num(hi.strip_prefix('=').unwrap_or(hi))?),
        None => {
            let v = num(s)?;
            (v, v)
        }
    };
    if lo == 0 || hi < lo {
        return Err(format!("range `{s}` must be non-empty and start at 1 or more"));
    }
    Ok(lo..=hi)
}

#[derive(Debug)]
pub enum CliError {
    /// Exit code 2.
    Usage(String),
    /// Exit code 1.
    Compute(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Compute(m) => f.write_str(m),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) => 1,
        }
    }
}

impl From<infowell_core::Error> for CliError {
    fn from(e: infowell_core::Error) -> Self {
        CliError::Compute(e.to_string())
    }
}

/// Rendered output plus whether every cell succeeded (and passed, for verify).
pub struct Output {
    pub text: String,
    pub ok: bool,
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Compute(a) => compute(a),
        Command::Table(a) => table(a),
        Command::Verify(a) => verify(a),
        Command::Asymptote(a) => asymptote(a),
        Command::Density(a) => density(a),
    }
}

/// Runs and writes to `--output` or stdout; returns the process exit code.
pub fn execute(cli: &Cli) -> u8 {
    let out = match run(cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let args = match &cli.command {
        Command::Compute(a) | Command::Table(a) | Command::Verify(a) | Command::Asymptote(a) | Command::Density(a) => a,
    };
    let written = match &args.output {
        Some(path) => std::fs::write(path, &out.text),
        None => std::io::stdout().lock().write_all(out.text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return 1;
    }
    if out.ok {
        0
    } else {
        1
    }
}

fn request(a: &CommonArgs, n: u32, k: u32, digits: u32) -> Request {
    Request { quantity: a.quantity, n, k, l: a.l, a: a.a.clone(), space: a.space.into(), digits }
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn json_text<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn exact_string(v: &Evaluated) -> String {
    v.exact.as_ref().map(|p| p.to_string()).unwrap_or_default()
}

fn compute(a: &CommonArgs) -> Result<Output, CliError> {
    if a.n_range.is_some() || a.k_range.is_some() {
        return Err(CliError::Usage("compute takes --n and --k; use `table` for ranges".into()));
    }
    let r = request(a, a.n.unwrap_or(1), a.k.unwrap_or(1), a.digits.unwrap_or(25));
    let v = eval::evaluate(&r)?;
    let text = match a.format {
        None => match &v.exact {
            Some(p) => format!("{p}\n"),
            None => format!("{}\n", v.decimal),
        },
        Some(Format::Exact) => match &v.exact {
            Some(p) => format!("{p}\n"),
            None => {
                return Err(CliError::Compute(format!(
                    "{} has no exact closed form here; use --format decimal",
                    v.kind
                )))
            }
        },
        Some(Format::Decimal) => format!("{}\n", v.decimal),
        Some(Format::Json) => json_text(&MeasureJson::from(&v)),
        Some(Format::Csv) => csv_text(
            &["n", "k", "exact", "decimal"],
            [vec![r.n.to_string(), r.k.to_string(), exact_string(&v), v.decimal.to_string()]],
        ),
    };
    Ok(Output { text, ok: true })
}

fn ranges(a: &CommonArgs, default_n: u32, default_k: u32) -> (RangeInclusive<u32>, RangeInclusive<u32>) {
    let n = a.n_range.clone().or(a.n.map(|n| n..=n)).unwrap_or(1..=default_n);
    let k = a.k_range.clone().or(a.k.map(|k| k..=k)).unwrap_or(1..=default_k);
    (n, k)
}

fn tabular_format(a: &CommonArgs, cmd: &str) -> Result<Format, CliError> {
    match a.format.unwrap_or(Format::Csv) {
        f @ (Format::Csv | Format::Json) => Ok(f),
        f => Err(CliError::Usage(format!("{cmd} writes csv or json, not {f:?}"))),
    }
}

#[derive(Serialize)]
struct TableRowJson {
    n: u32,
    k: u32,
    value: Option<MeasureJson>,
    error: Option<String>,
}

fn table(a: &CommonArgs) -> Result<Output, CliError> {
    let format = tabular_format(a, "table")?;
    let (ns, ks) = ranges(a, 8, 5);
    let rows = eval::table(&request(a, 1, 1, a.digits.unwrap_or(25)), ns, ks);
    let ok = rows.iter().all(|(_, _, r)| r.is_ok());
    let text = match format {
        Format::Json => {
            let rows: Vec<TableRowJson> = rows
                .iter()
                .map(|(n, k, r)| TableRowJson {
                    n: *n,
                    k: *k,
                    value: r.as_ref().ok().map(MeasureJson::from),
                    error: r.as_ref().err().map(|e| e.to_string()),
                })
                .collect();
            json_text(&rows)
        }
        _ => csv_text(
            &["n", "k", "exact", "decimal"],
            rows.iter().map(|(n, k, r)| match r {
                Ok(v) => vec![n.to_string(), k.to_string(), exact_string(v), v.decimal.to_string()],
                Err(e) => vec![n.to_string(), k.to_string(), String::new(), format!("ERROR: {e}")],
            }),
        ),
    };
    Ok(Output { text, ok })
}

fn verify(a: &CommonArgs) -> Result<Output, CliError> {
    let format = tabular_format(a, "verify")?;
    let (ns, ks) = ranges(a, 8, 5);
    let report = eval::verify_parallel(ns, ks, a.tol, a.digits.unwrap_or(30))?;
    let json = ReportJson::from(&report);
    let text = match format {
        Format::Json => json_text(&json),
        _ => csv_text(
            &["quantity", "n", "k", "closed_form", "oracle", "rel_diff", "pass"],
            json.entries.iter().map(|e| {
                let oracle = match (&e.oracle, &e.error) {
                    (Some(q), _) => q.value.clone(),
                    (None, Some(err)) => format!("ERROR: {err}"),
                    (None, None) => String::new(),
                };
                vec![
                    e.quantity.clone(),
                    e.n.to_string(),
                    e.k.to_string(),
                    e.closed_form.clone(),
                    oracle,
                    e.rel_diff.map(|d| format!("{d:e}")).unwrap_or_default(),
                    e.pass.to_string(),
                ]
            }),
        ),
    };
    Ok(Output { text, ok: json.all_pass })
}

#[derive(Serialize)]
struct AsymptoteJson {
    n: u32,
    k: u32,
    exact: String,
    asymptotic: String,
    ratio: String,
}

fn asymptote(a: &CommonArgs) -> Result<Output, CliError> {
    let format = tabular_format(a, "asymptote")?;
    let (ns, ks) = ranges(a, 8, 5);
    let digits = a.digits.unwrap_or(25);
    let mut rows = Vec::new();
    for n in ns {
        for k in ks.clone() {
            let r = eval::asymptote_row(n, k, digits)?;
            rows.push(AsymptoteJson {
                n,
                k,
                exact: r.exact.to_string(),
                asymptotic: r.asymptotic.to_string(),
                ratio: r.ratio.to_string(),
            });
        }
    }
    let text = match format {
        Format::Json => json_text(&rows),
        _ => csv_text(
            &["n", "k", "exact", "asymptotic", "ratio"],
            rows.into_iter().map(|r| vec![r.n.to_string(), r.k.to_string(), r.exact, r.asymptotic, r.ratio]),
        ),
    };
    Ok(Output { text, ok: true })
}

fn density(a: &CommonArgs) -> Result<Output, CliError> {
    if !matches!(a.format, None | Some(Format::Csv)) {
        return Err(CliError::Usage("density writes csv only".into()));
    }
    let s = WellState::new(a.n.unwrap_or(1), a.a.clone())?;
    let space: Space = a.space.into();
    let samples = eval::density_samples(&s, space, a.points as usize, a.p_max)?;
    let axis = if space == Space::Position { "x" } else { "p" };
    let text = csv_text(&[axis, "density"], samples.into_iter().map(|(x, d)| vec![x.to_string(), d.to_string()]));
    Ok(Output { text, ok: true })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_parse() {
        assert_eq!(parse_range("1..8").unwrap(), 1..=8);
        assert_eq!(parse_range("2..=3").unwrap(), 2..=3);
        assert_eq!(parse_range("4").unwrap(), 4..=4);
        assert!(parse_range("3..2").is_err());
        assert!(parse_range("0..2").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn widths_parse() {
        assert_eq!(parse_width("3/6").unwrap().to_string(), "1/2");
        assert!(parse_width("0").is_err());
        assert!(parse_width("-1/2").is_err());
    }

    #[test]
    fn compute_renders_exact_first() {
        let cli = Cli::parse_from(["infowell", "compute", "--quantity", "ink", "--n", "2", "--k", "2"]);
        assert_eq!(run(&cli).unwrap().text, "1/12*pi^-3 + 5/32*pi^-5\n");
    }
}
