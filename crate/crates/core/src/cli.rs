//! Command implementations behind the `polybound` binary.
//!
//! Every command produces one or more [`OutputTable`]s, serialized as CSV
//! with a header row and numbers at 12 significant digits. Human-readable
//! diagnostics go to standard error so that standard output stays a clean
//! table.
//!
//! Exit status: 0 on success, 2 for invalid arguments, 3 when a computation
//! misses its tolerance or a Monte Carlo guard trips, 4 for I/O failures.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bounds::{self, EnsembleKind};
use crate::kac::{self, KacEstimate};
use crate::montecarlo::{self, EmpiricalSummary, Histogram, SimConfig};
use crate::{Error, Result};

/// Significant digits used for every number written to CSV.
pub const SIGNIFICANT_DIGITS: usize = 12;
pub const DEFAULT_SEED: u64 = 20240101;
pub const DEFAULT_TRIALS: usize = 100_000;
/// Largest `|P(radius) - p|` accepted by `bound`.
pub const ROUND_TRIP_TOL: f64 = 1e-9;

const FIGURE_DEGREE: usize = 5;
const CLOUD_DEGREE: usize = 1000;
const CLOUD_DRAWS: usize = 20;
const SWEEP_DEGREES: RangeInclusive<usize> = 1..=20;

/// Formats `x` like C's `%.12g`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp) as usize;
        trim_fraction(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_fraction(mantissa.to_string()), exp.abs())
    }
}

fn trim_fraction(mut s: String) -> String {
    if s.contains('.') {
        let keep = s.trim_end_matches('0').trim_end_matches('.').len();
        s.truncate(keep);
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Column {
    pub name: &'static str,
    pub unit: &'static str,
}

/// A named table of numbers with a fixed column schema.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputTable {
    name: String,
    columns: Vec<Column>,
    rows: Vec<Vec<f64>>,
    /// Diagnostics for standard error; not part of the CSV.
    pub notes: Vec<String>,
}

impl OutputTable {
    pub fn new(name: impl Into<String>, columns: &[(&'static str, &'static str)]) -> Self {
        OutputTable {
            name: name.into(),
            columns: columns.iter().map(|&(name, unit)| Column { name, unit }).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Appends a row.
    ///
    /// # Panics
    /// If the row length differs from the number of columns.
    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row arity does not match table {}",
            self.name
        );
        self.rows.push(row);
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Value in the first row under column `name`.
    pub fn value(&self, name: &str) -> Option<f64> {
        self.column(name).and_then(|c| c.first().copied())
    }

    /// All values under column `name`.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c.name == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<&str> = self.columns.iter().map(|c| c.name).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| format_number(v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Ensemble {
    /// Leading coefficient 1, others standard normal.
    Monic,
    /// All coefficients standard normal.
    General,
}

impl From<Ensemble> for EnsembleKind {
    fn from(e: Ensemble) -> Self {
        match e {
            Ensemble::Monic => EnsembleKind::MonicNormal,
            Ensemble::General => EnsembleKind::GeneralNormal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Integral,
    Asymptotic,
    Mc,
}

#[derive(Debug, Parser)]
#[command(name = "polybound", version, about = "Probabilistic root bounds for random polynomials")]
pub struct Cli {
    /// Worker threads for Monte Carlo trials [default: all cores]. Output does not depend on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Radius containing all roots with at least probability p
    Bound(BoundArgs),
    /// Probability bounds for all roots lying in |z| <= c
    Prob(ProbArgs),
    /// Expected number of real zeros of a general-ensemble polynomial
    Kac(KacArgs),
    /// Monte Carlo experiments; writes one CSV table
    Simulate(SimulateArgs),
    /// Writes fig1.csv ... fig8.csv and manifest.json
    Figures(FiguresArgs),
}

#[derive(Debug, Clone, Args)]
pub struct BoundArgs {
    #[arg(long, value_enum)]
    pub ensemble: Ensemble,
    /// Degree
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    /// Target probability, strictly between 0 and 1
    #[arg(long, value_parser = open_unit)]
    pub p: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ProbArgs {
    #[arg(long, value_enum)]
    pub ensemble: Ensemble,
    /// Degree
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    /// Radius
    #[arg(long, allow_hyphen_values = true)]
    pub c: f64,
}

#[derive(Debug, Clone, Args)]
pub struct KacArgs {
    /// Degree
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long, value_enum, default_value = "integral")]
    pub method: Method,
    /// Monte Carlo trials (method mc)
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,
    /// Monte Carlo seed (method mc)
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Absolute quadrature tolerance (method integral)
    #[arg(long, default_value_t = kac::DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct SimMode {
    /// Comma-separated, strictly increasing radii: empirical P(max|z| <= c) per radius
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub c_grid: Option<Vec<f64>>,
    /// 64-bin histogram of the maximum root modulus
    #[arg(long)]
    pub max_dist: bool,
    /// Every root of every draw (general ensemble)
    #[arg(long)]
    pub root_cloud: bool,
    /// Mean max modulus and Cauchy bound per degree, LO..HI (general ensemble)
    #[arg(long, value_parser = degree_range, value_name = "LO..HI")]
    pub degree_sweep: Option<RangeInclusive<usize>>,
    /// Mean number of roots inside and outside the unit circle (general ensemble)
    #[arg(long)]
    pub unit_disk: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub ensemble: Ensemble,
    /// Degree (not used with --degree-sweep)
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub mode: SimMode,
    /// Output file [default: standard output]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct FiguresArgs {
    /// Output directory, created if missing
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Trials per Monte Carlo figure and per degree of the sweep
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,
}

fn open_unit(s: &str) -> std::result::Result<f64, String> {
    let p: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if p > 0.0 && p < 1.0 {
        Ok(p)
    } else {
        Err(format!("{p} is not strictly between 0 and 1"))
    }
}

fn degree_range(s: &str) -> std::result::Result<RangeInclusive<usize>, String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected LO..HI, got {s}"))?;
    let lo: usize = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: usize = hi.trim().parse().map_err(|e| format!("{e}"))?;
    if lo < 1 || hi < lo || hi > montecarlo::SWEEP_MAX_DEGREE {
        return Err(format!(
            "need 1 <= LO <= HI <= {}",
            montecarlo::SWEEP_MAX_DEGREE
        ));
    }
    Ok(lo..=hi)
}

pub fn cmd_bound(args: &BoundArgs) -> Result<OutputTable> {
    let kind = EnsembleKind::from(args.ensemble);
    let radius = bounds::bound_for_prob(args.p, args.n, kind)?;
    let achieved = bounds::lower_prob(radius, args.n, kind)?.value();
    if (achieved - args.p).abs() > ROUND_TRIP_TOL {
        return Err(Error::RoundTrip {
            radius,
            requested: args.p,
            achieved,
        });
    }
    let mut table = OutputTable::new(
        "bound",
        &[
            ("degree", "1"),
            ("p", "probability"),
            ("radius", "modulus"),
            ("p_at_radius", "probability"),
        ],
    );
    table.push(vec![args.n as f64, args.p, radius, achieved]);
    table.notes.push(format!(
        "{} n={}: all roots lie in |z| <= {} with probability at least {}",
        kind.name(),
        args.n,
        format_number(radius),
        format_number(achieved)
    ));
    Ok(table)
}

pub fn cmd_prob(args: &ProbArgs) -> Result<OutputTable> {
    let kind = EnsembleKind::from(args.ensemble);
    let cert = bounds::certificate(args.c, args.n, kind)?;
    let mut columns = vec![("degree", "1"), ("c", "modulus"), ("p_lower", "probability")];
    if cert.p_upper.is_some() {
        columns.push(("p_upper", "probability"));
    }
    let mut table = OutputTable::new("prob", &columns);
    let mut row = vec![args.n as f64, args.c, cert.p_lower.value()];
    row.extend(cert.p_upper.map(f64::from));
    table.push(row);
    let range = match cert.p_upper {
        Some(u) => format!(
            "between {} and {}",
            format_number(cert.p_lower.value()),
            format_number(u.value())
        ),
        None => format!("at least {}", format_number(cert.p_lower.value())),
    };
    table.notes.push(format!(
        "{} n={}: P(all roots in |z| <= {}) is {range}",
        kind.name(),
        args.n,
        format_number(args.c)
    ));
    Ok(table)
}

pub fn cmd_kac(args: &KacArgs) -> Result<OutputTable> {
    let est: KacEstimate = match args.method {
        Method::Integral => kac::kac_integral(args.n, args.tol)?,
        Method::Asymptotic => kac::kac_asymptotic(args.n)?,
        Method::Mc => kac::mc_real_roots(args.n, args.trials, args.seed)?,
    };
    let mut table = OutputTable::new(
        format!("kac-{}", est.method.name()),
        &[
            ("degree", "1"),
            ("expected_real_zeros", "count"),
            ("error_indicator", "count"),
        ],
    );
    table.push(vec![est.degree as f64, est.value, est.error_indicator]);
    let indicator = match args.method {
        Method::Integral => "quadrature error estimate",
        Method::Asymptotic => "remainder bound",
        Method::Mc => "standard error",
    };
    table.notes.push(format!(
        "n={} ({}): E[real zeros] = {} ({indicator} {})",
        est.degree,
        est.method.name(),
        format_number(est.value),
        format_number(est.error_indicator)
    ));
    Ok(table)
}

fn summary_notes(table: &mut OutputTable, s: &EmpiricalSummary) {
    let deciles: Vec<String> = s.deciles.iter().map(|&d| format_number(d)).collect();
    table.notes.push(format!(
        "max modulus: mean {} median {} deciles [{}]",
        format_number(s.mean),
        format_number(s.median),
        deciles.join(", ")
    ));
    table.notes.push(format!(
        "{} failed trials, {} leading-coefficient redraws",
        s.trial_failures, s.redraws
    ));
}

fn probability_table(name: &str, s: &EmpiricalSummary) -> OutputTable {
    let mut table = OutputTable::new(
        name,
        &[
            ("c", "modulus"),
            ("probability", "probability"),
            ("se", "probability"),
            ("ci_low", "probability"),
            ("ci_high", "probability"),
        ],
    );
    for r in &s.rows {
        table.push(vec![r.c, r.probability, r.se, r.ci_low, r.ci_high]);
    }
    summary_notes(&mut table, s);
    table
}

fn histogram_table(name: &str, h: &Histogram, trials: usize) -> OutputTable {
    let mut table = OutputTable::new(
        name,
        &[
            ("bin_low", "modulus"),
            ("bin_high", "modulus"),
            ("count", "1"),
            ("density", "1/modulus"),
        ],
    );
    for (k, &count) in h.counts.iter().enumerate() {
        let (lo, hi) = (h.edges[k], h.edges[k + 1]);
        let width = hi - lo;
        let density = if width > 0.0 {
            count as f64 / (trials as f64 * width)
        } else {
            0.0
        };
        table.push(vec![lo, hi, count as f64, density]);
    }
    table
        .notes
        .push(format!("{} samples above the last bin edge", h.overflow));
    table
}

fn cloud_table(name: &str, roots: &[crate::Complex64], reference_circle: bool) -> OutputTable {
    let mut columns = vec![("re", "1"), ("im", "1"), ("modulus", "1")];
    if reference_circle {
        columns.extend([("unit_circle_re", "1"), ("unit_circle_im", "1")]);
    }
    let mut table = OutputTable::new(name, &columns);
    let m = roots.len() as f64;
    for (k, z) in roots.iter().enumerate() {
        let mut row = vec![z.re, z.im, z.norm()];
        if reference_circle {
            let theta = std::f64::consts::TAU * k as f64 / m;
            row.extend([theta.cos(), theta.sin()]);
        }
        table.push(row);
    }
    let near = roots
        .iter()
        .filter(|z| (0.8..=1.25).contains(&z.norm()))
        .count();
    table.notes.push(format!(
        "{} roots, {} with modulus in [0.8, 1.25]",
        roots.len(),
        near
    ));
    table
}

fn sweep_table(name: &str, degrees: RangeInclusive<usize>, trials: usize, seed: u64) -> Result<OutputTable> {
    let rows = montecarlo::degree_sweep(degrees, trials, seed)?;
    let mut table = OutputTable::new(
        name,
        &[
            ("degree", "1"),
            ("mean_max_modulus", "modulus"),
            ("se_max_modulus", "modulus"),
            ("mean_cauchy_bound", "modulus"),
            ("se_cauchy_bound", "modulus"),
        ],
    );
    for r in rows {
        table.push(vec![
            r.degree as f64,
            r.mean_max_modulus,
            r.se_max_modulus,
            r.mean_cauchy_bound,
            r.se_cauchy_bound,
        ]);
    }
    Ok(table)
}

fn require_general(kind: EnsembleKind, flag: &str) -> Result<()> {
    if kind != EnsembleKind::GeneralNormal {
        return Err(Error::Domain(format!("{flag} needs --ensemble general")));
    }
    Ok(())
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<OutputTable> {
    let kind = EnsembleKind::from(args.ensemble);
    if let Some(range) = &args.mode.degree_sweep {
        require_general(kind, "--degree-sweep")?;
        if args.n.is_some() {
            return Err(Error::Domain("--n is not used with --degree-sweep".into()));
        }
        return sweep_table("degree-sweep", range.clone(), args.trials, args.seed);
    }
    let n = args
        .n
        .ok_or_else(|| Error::Domain("--n is required".into()))? as usize;
    let config = SimConfig {
        ensemble: kind,
        degree: n,
        trials: args.trials,
        seed: args.seed,
        c_grid: args.mode.c_grid.clone().unwrap_or_default(),
    };
    if args.mode.c_grid.is_some() {
        let s = montecarlo::estimate_bound_probability(&config)?;
        Ok(probability_table("bound-probability", &s))
    } else if args.mode.max_dist {
        let s = montecarlo::max_modulus_distribution(&config)?;
        let h = s.histogram.as_ref().expect("distribution carries a histogram");
        let mut table = histogram_table("max-modulus", h, args.trials);
        summary_notes(&mut table, &s);
        Ok(table)
    } else if args.mode.root_cloud {
        require_general(kind, "--root-cloud")?;
        let roots = montecarlo::root_cloud(n, args.trials, args.seed)?;
        Ok(cloud_table("root-cloud", &roots, false))
    } else {
        require_general(kind, "--unit-disk")?;
        let u = montecarlo::unit_disk_count(n, args.trials, args.seed)?;
        let mut table = OutputTable::new(
            "unit-disk",
            &[
                ("degree", "1"),
                ("mean_inside", "count"),
                ("se_inside", "count"),
                ("mean_outside", "count"),
                ("se_outside", "count"),
            ],
        );
        table.push(vec![
            n as f64,
            u.mean_inside,
            u.se_inside,
            u.mean_outside,
            u.se_outside,
        ]);
        table.notes.push(format!(
            "n={n}: {} roots inside the unit circle on average (se {}), {} failed trials",
            format_number(u.mean_inside),
            format_number(u.se_inside),
            u.trial_failures
        ));
        Ok(table)
    }
}

#[derive(Debug, Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    seed: u64,
    trials: usize,
    degree: usize,
    root_cloud_degree: usize,
    root_cloud_draws: usize,
    sweep_degrees: [usize; 2],
    files: Vec<String>,
}

/// The radii `1, 1.05, …, 10` used by the probability figures.
pub fn figure_grid() -> Vec<f64> {
    (0..=180).map(|k| 1.0 + k as f64 / 20.0).collect()
}

fn lower_bound_curve(name: &str, kind: EnsembleKind, grid: &[f64]) -> Result<OutputTable> {
    let mut table = OutputTable::new(name, &[("c", "modulus"), ("p_lower", "probability")]);
    for &c in grid {
        table.push(vec![c, bounds::lower_prob(c, FIGURE_DEGREE as u64, kind)?.value()]);
    }
    Ok(table)
}

/// Builds every figure table in file order.
pub fn figure_tables(seed: u64, trials: usize) -> Result<Vec<OutputTable>> {
    if trials < 100 {
        return Err(Error::Domain("figures need at least 100 trials".into()));
    }
    let grid = figure_grid();
    let distribution = |kind| {
        montecarlo::max_modulus_distribution(&SimConfig {
            ensemble: kind,
            degree: FIGURE_DEGREE,
            trials,
            seed,
            c_grid: grid.clone(),
        })
    };
    let monic = distribution(EnsembleKind::MonicNormal)?;
    let general = distribution(EnsembleKind::GeneralNormal)?;
    let hist = |s: &EmpiricalSummary| s.histogram.clone().expect("distribution carries a histogram");
    let cloud = montecarlo::root_cloud(CLOUD_DEGREE, CLOUD_DRAWS, seed)?;
    Ok(vec![
        lower_bound_curve("fig1", EnsembleKind::MonicNormal, &grid)?,
        probability_table("fig2", &monic),
        lower_bound_curve("fig3", EnsembleKind::GeneralNormal, &grid)?,
        probability_table("fig4", &general),
        histogram_table("fig5", &hist(&monic), trials),
        histogram_table("fig6", &hist(&general), trials),
        cloud_table("fig7", &cloud, true),
        sweep_table("fig8", SWEEP_DEGREES, trials, seed)?,
    ])
}

/// Writes `fig1.csv` … `fig8.csv` and `manifest.json` into `args.out`.
pub fn cmd_figures(args: &FiguresArgs) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(&args.out)?;
    let tables = figure_tables(args.seed, args.trials)?;
    let mut written = Vec::new();
    for table in &tables {
        let path = args.out.join(format!("{}.csv", table.name()));
        fs::write(&path, table.to_csv())?;
        written.push(path);
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        seed: args.seed,
        trials: args.trials,
        degree: FIGURE_DEGREE,
        root_cloud_degree: CLOUD_DEGREE,
        root_cloud_draws: CLOUD_DRAWS,
        sweep_degrees: [*SWEEP_DEGREES.start(), *SWEEP_DEGREES.end()],
        files: tables.iter().map(|t| format!("{}.csv", t.name())).collect(),
    };
    let path = args.out.join("manifest.json");
    let mut json = serde_json::to_string_pretty(&manifest).map_err(io::Error::from)?;
    json.push('\n');
    fs::write(&path, json)?;
    written.push(path);
    Ok(written)
}

/// Exit status for a failed command.
pub fn exit_status(err: &Error) -> u8 {
    match err {
        Error::Domain(_) => 2,
        Error::Io(_) => 4,
        _ => 3,
    }
}

fn emit(table: &OutputTable, out: Option<&Path>) -> Result<()> {
    for note in &table.notes {
        eprintln!("{note}");
    }
    match out {
        Some(path) => fs::write(path, table.to_csv())?,
        None => io::stdout().lock().write_all(table.to_csv().as_bytes())?,
    }
    Ok(())
}

fn execute(command: &Command) -> Result<()> {
    match command {
        Command::Bound(args) => emit(&cmd_bound(args)?, None),
        Command::Prob(args) => emit(&cmd_prob(args)?, None),
        Command::Kac(args) => emit(&cmd_kac(args)?, None),
        Command::Simulate(args) => emit(&cmd_simulate(args)?, args.out.as_deref()),
        Command::Figures(args) => {
            for path in cmd_figures(args)? {
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit status.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code() as u8;
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads as usize)
            .build_global()
        {
            eprintln!("warning: {e}");
        }
    }
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_status(&e)
        }
    }
}
