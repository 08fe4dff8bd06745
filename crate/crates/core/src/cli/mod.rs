//! The `cswiretap` command line: figure datasets, verification suites and
//! channel simulation.
//!
//! Exit codes: 0 success, 1 failed check or runtime/I-O error, 2 usage or
//! parameter error.

mod output;
mod suites;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

pub use output::{format_g9, Cell, Meta, Table};

use crate::bounds::{lb2_expected, lb3, lb3_left_limit, ub2, ub3, AsymptoticRatios, ChannelDims};
use crate::channel::DEFAULT_DECODE_TOL;
use crate::error::Error;
use crate::specfun::QuadratureSpec;
use crate::verify::rows_for;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "cswiretap",
    version,
    about = "Secrecy-capacity bounds and checks for the multiplicative Gaussian wiretap channel"
)]
pub struct Cli {
    /// Base seed for every random stream.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Trial count (each command has its own default).
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format. Tables default to csv, reports to json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads. Results do not depend on it.
    #[arg(long, global = true, env = "CSWIRETAP_WORKERS")]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// LB3, UB2 and UB3 over a grid of rho_e.
    BoundsAsymptotic(AsymptoticArgs),
    /// LB2 curves in m_e for several p, plus the LB3 asymptote.
    BoundsFiniteLb2(Lb2Args),
    /// Secrecy capacity with identity-row matrices.
    IdentityFigure(IdentityArgs),
    /// Run a verification suite and report pass/fail per check.
    Verify {
        #[command(subcommand)]
        suite: Suite,
    },
    /// Decode random messages over a Gaussian channel instance.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct AsymptoticArgs {
    #[arg(long, default_value_t = 0.2)]
    pub rho_b: f64,
    /// `start:step:stop` or a comma list; default `0:0.01:rho_b`.
    #[arg(long, value_parser = parse_grid)]
    pub rho_e_grid: Option<Grid>,
    /// Absolute tolerance of the UB3 quadrature.
    #[arg(long, default_value_t = 1e-9)]
    pub quad_tol: f64,
}

#[derive(Debug, Args)]
pub struct Lb2Args {
    #[arg(long, default_value_t = 0.2)]
    pub rho_b: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [50usize, 100, 250, 1000])]
    pub p_list: Vec<usize>,
    /// Points of the uniform grid of m_e/p over [0, rho_b).
    #[arg(long, default_value_t = 20)]
    pub me_grid_points: usize,
}

#[derive(Debug, Args)]
pub struct IdentityArgs {
    #[arg(long, default_value_t = 0.2)]
    pub rho_b: f64,
    #[arg(long, value_parser = parse_grid)]
    pub rho_e_grid: Option<Grid>,
}

#[derive(Debug, Subcommand)]
pub enum Suite {
    /// Chi-square upper tails against exp(-(3/16) d eps^2).
    Chisq {
        #[arg(long, value_delimiter = ',', default_values_t = [50usize, 100, 400])]
        d_list: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.05, 0.1, 0.2, 0.4])]
        eps_list: Vec<f64>,
    },
    /// Wishart log-determinant means against the digamma formula.
    Wishart {
        /// `m x n` pairs.
        #[arg(long, value_delimiter = ',', value_parser = parse_pair, default_value = "5x10,20x40,50x100,100x100")]
        pairs: Vec<(usize, usize)>,
    },
    /// Negative Wishart moment E[det(W)^-r] against exp(-M(r)).
    Negmoment {
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
    },
    /// Largest normalised column norm trend in p.
    Colnorm {
        #[arg(long, value_delimiter = ',', default_values_t = [250usize, 500, 1000, 2000])]
        p_list: Vec<usize>,
        #[arg(long, default_value_t = 0.2)]
        rho_b: f64,
    },
    /// Sampled support-minimised log-determinant trend in p.
    Detmin {
        #[arg(long, value_delimiter = ',', default_values_t = [200usize, 400, 800])]
        p_list: Vec<usize>,
        #[arg(long, default_value_t = 0.2)]
        rho_b: f64,
        #[arg(long, default_value_t = 0.5)]
        kappa: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Interference-variance concentration of the eavesdropper estimator.
    Hxz {
        #[arg(long, value_delimiter = ',', default_values_t = [250usize, 500, 1000, 2000])]
        p_list: Vec<usize>,
        #[arg(long, default_value_t = 0.1)]
        rho_e: f64,
        #[arg(long, default_value_t = 0.15)]
        kappa: f64,
    },
    /// Exhaustive decoder on Gaussian and identity-row matrices.
    Decoder {
        #[arg(long, default_value_t = 12)]
        p: usize,
        #[arg(long, default_value_t = 4)]
        m_b: usize,
        #[arg(long, default_value_t = DEFAULT_DECODE_TOL)]
        tol: f64,
    },
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Input dimension
    #[arg(long, default_value_t = 12)]
    pub p: usize,
    /// Legitimate receiver rows; supports have weight m_b - 1
    #[arg(long, default_value_t = 4)]
    pub m_b: usize,
    /// Eavesdropper rows
    #[arg(long, default_value_t = 2)]
    pub m_e: usize,
    /// Relative residual below which a support counts as consistent
    #[arg(long, default_value_t = DEFAULT_DECODE_TOL)]
    pub tol: f64,
}

/// A parsed grid of reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

/// `""` is empty, `a:h:b` is `a, a+h, ..., b` (endpoint included when
/// reached within rounding), anything else a comma list.
pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Grid(Vec::new()));
    }
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad number {t:?}: {e}"));
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, h, b] = parts[..] else {
            return Err(format!("range must be start:step:stop, got {s:?}"));
        };
        let (a, h, b) = (num(a)?, num(h)?, num(b)?);
        if !(h > 0.0) || b < a {
            return Err(format!("range needs step > 0 and stop >= start, got {s:?}"));
        }
        let n = ((b - a) / h + 1e-9).floor() as usize;
        let mut v: Vec<f64> = (0..=n).map(|i| a + i as f64 * h).collect();
        // land exactly on the stop value when it is a grid point
        if let Some(last) = v.last_mut() {
            if (*last - b).abs() < 1e-9 * h {
                *last = b;
            }
        }
        return Ok(Grid(v));
    }
    s.split(',').map(num).collect::<Result<_, _>>().map(Grid)
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (m, n) = s.split_once('x').ok_or_else(|| format!("expected MxN, got {s:?}"))?;
    let m = m.trim().parse().map_err(|e| format!("{s:?}: {e}"))?;
    let n = n.trim().parse().map_err(|e| format!("{s:?}: {e}"))?;
    Ok((m, n))
}

/// What went wrong while running a command.
#[derive(Debug)]
pub(crate) enum Failure {
    Usage(String),
    Lib(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) | Failure::Lib(Error::Domain(_)) | Failure::Lib(Error::DimensionMismatch(_)) => {
                EXIT_USAGE
            }
            _ => EXIT_FAILURE,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Lib(e) => e.to_string(),
            Failure::Io(e) => format!("i/o error: {e}"),
        }
    }
}

pub(crate) type CmdResult = Result<bool, Failure>;

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("error: --workers must be positive");
            return EXIT_USAGE;
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match execute(&cli) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILURE,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.exit_code()
        }
    }
}

fn base_meta(cli: &Cli, command: &str) -> Meta {
    let mut meta = Meta::default();
    meta.push("tool", format!("cswiretap {}", crate::VERSION));
    meta.push("command", command);
    meta.push("seed", cli.seed);
    meta
}

fn join_g9(v: &[f64]) -> String {
    v.iter().map(|&x| format_g9(x)).collect::<Vec<_>>().join(" ")
}

fn open_out(cli: &Cli) -> io::Result<Box<dyn Write>> {
    Ok(match &cli.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_table(cli: &Cli, table: &Table, meta: &Meta) -> CmdResult {
    let mut out = open_out(cli)?;
    match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => table.write_csv(meta, &mut out)?,
        Format::Json => output::write_json(&table.to_json(meta), &mut out)?,
    }
    out.flush()?;
    Ok(true)
}

pub(crate) fn emit_report(cli: &Cli, report: &serde_json::Value) -> Result<(), Failure> {
    if cli.format == Some(Format::Csv) {
        return Err(Failure::Usage("this command writes JSON only".into()));
    }
    let mut out = open_out(cli)?;
    output::write_json(report, &mut out)?;
    out.flush()?;
    Ok(())
}

fn execute(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::BoundsAsymptotic(a) => bounds_asymptotic(cli, a),
        Command::BoundsFiniteLb2(a) => bounds_finite_lb2(cli, a),
        Command::IdentityFigure(a) => identity_figure(cli, a),
        Command::Verify { suite } => suites::run_suite(cli, suite),
        Command::Simulate(a) => suites::simulate(cli, a),
    }
}

fn default_grid(rho_b: f64) -> Vec<f64> {
    // 0, 0.01, ... up to rho_b
    parse_grid(&format!("0:0.01:{rho_b}")).map(|g| g.0).unwrap_or_default()
}

fn bounds_asymptotic(cli: &Cli, a: &AsymptoticArgs) -> CmdResult {
    let grid = a.rho_e_grid.clone().map_or_else(|| default_grid(a.rho_b), |g| g.0);
    let quad = QuadratureSpec { abs_tolerance: a.quad_tol, ..QuadratureSpec::default() };
    quad.validate()?;
    AsymptoticRatios::new(a.rho_b, 0.0)?;
    let mut table = Table::new(vec!["rho_e", "lb3_bits", "ub2_bits", "ub3_bits"]);
    for &re in &grid {
        let r = AsymptoticRatios::new(a.rho_b, re)?;
        let lb = if re == a.rho_b { lb3_left_limit(a.rho_b)? } else { lb3(&r)?.bits_per_dim };
        table.push(vec![
            Cell::Num(re),
            Cell::Num(lb),
            Cell::Num(ub2(&r)?.bits_per_dim),
            Cell::Num(ub3(&r, &quad)?.bits_per_dim),
        ]);
    }
    let mut meta = base_meta(cli, "bounds-asymptotic");
    meta.push("rho_b", format_g9(a.rho_b));
    meta.push("rho_e_grid", join_g9(&grid));
    meta.push("quad_abs_tolerance", format_g9(a.quad_tol));
    meta.push("note", "lb3 at rho_e = rho_b is its left limit; ub3 at rho_e = 0 equals ub2");
    emit_table(cli, &table, &meta)
}

fn bounds_finite_lb2(cli: &Cli, a: &Lb2Args) -> CmdResult {
    if a.me_grid_points == 0 {
        return Err(Failure::Usage("--me-grid-points must be positive".into()));
    }
    AsymptoticRatios::new(a.rho_b, 0.0)?;
    let xs: Vec<f64> = (0..a.me_grid_points).map(|i| a.rho_b * i as f64 / a.me_grid_points as f64).collect();
    let mut table = Table::new(vec!["p", "m_e_over_p", "lb2_bits"]);
    for &p in &a.p_list {
        let m_b = rows_for(a.rho_b, p);
        let mut last = None;
        for &x in &xs {
            let m_e = rows_for(x, p);
            if m_e >= m_b || last == Some(m_e) {
                continue;
            }
            last = Some(m_e);
            let dims = ChannelDims::new(p, m_b, m_e)?;
            table.push(vec![
                Cell::Int(p as u64),
                Cell::Num(m_e as f64 / p as f64),
                Cell::Num(lb2_expected(&dims)?.bits_per_dim),
            ]);
        }
    }
    for &x in &xs {
        let v = lb3(&AsymptoticRatios::new(a.rho_b, x)?)?.bits_per_dim;
        table.push(vec![Cell::Text("inf".into()), Cell::Num(x), Cell::Num(v)]);
    }
    let mut meta = base_meta(cli, "bounds-finite-lb2");
    meta.push("rho_b", format_g9(a.rho_b));
    meta.push("p_list", a.p_list.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" "));
    meta.push("me_grid_points", a.me_grid_points);
    meta.push("m_b", "round(rho_b * p)");
    meta.push("note", "rows with p = inf are the asymptotic lower bound lb3");
    emit_table(cli, &table, &meta)
}

fn identity_figure(cli: &Cli, a: &IdentityArgs) -> CmdResult {
    if !(a.rho_b > 0.0 && a.rho_b <= 0.5) {
        return Err(Error::Domain(format!("rho_b must lie in (0, 1/2], got {}", a.rho_b)).into());
    }
    let grid = a.rho_e_grid.clone().map_or_else(|| default_grid(a.rho_b), |g| g.0);
    let mut table = Table::new(vec!["rho_e", "cs_bits"]);
    for &re in &grid {
        if !(0.0..=1.0).contains(&re) {
            return Err(Error::Domain(format!("rho_e must lie in [0, 1], got {re}")).into());
        }
        table.push(vec![Cell::Num(re), Cell::Num((a.rho_b - re).max(0.0))]);
    }
    let mut meta = base_meta(cli, "identity-figure");
    meta.push("rho_b", format_g9(a.rho_b));
    meta.push("rho_e_grid", join_g9(&grid));
    emit_table(cli, &table, &meta)
}

pub(crate) fn report_json(meta: &Meta, body: serde_json::Value) -> serde_json::Value {
    let mut v = json!({ "meta": meta.to_json() });
    if let (Some(dst), serde_json::Value::Object(src)) = (v.as_object_mut(), body) {
        dst.extend(src);
    }
    v
}
