use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use univalent_core::loewner::{loewner_solve_sampled, DrivingFunction, LoewnerChain};
use univalent_core::schlicht::from_registry;
use univalent_core::verify::{emit_table, run_suite, Format, SuiteConfig, TableKind, TableParams};
use univalent_core::weinstein::{
    lambda_fourier_oracle, lambda_series, legendre_route_check, milin_decomposition_check, DecompositionParams,
};
use univalent_core::{Complex, Error};

const OUT_DIR_VAR: &str = "UNIVALENT_OUT_DIR";
const ORACLE_TOL: f64 = 1e-8;

#[derive(Parser)]
#[command(name = "univalent", version, about = "Verification suites, tables and traces for univalent functions")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and write its report.
    Verify(VerifyArgs),
    /// Integrate the Loewner ODE.
    #[command(subcommand)]
    Loewner(LoewnerCmd),
    /// Λ tables and the coefficient decomposition.
    #[command(subcommand)]
    Weinstein(WeinsteinCmd),
    /// Emit a deterministic table.
    Table(TableArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// TOML file with any `SuiteConfig` fields; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    function: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Comma-separated radius ladder.
    #[arg(long, value_delimiter = ',')]
    radius: Option<Vec<f64>>,
    #[arg(long)]
    quad: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long = "T")]
    horizon: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    format: Option<FormatArg>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Subcommand)]
enum LoewnerCmd {
    /// Trajectories `f_t(z)` on a polar grid, as CSV.
    Trace {
        /// `const:-1`, `const:i`, `angle:θ` or `steps:t0:θ0,t1:θ1,...`
        #[arg(long, allow_hyphen_values = true)]
        kappa: String,
        #[arg(long = "T", default_value_t = 8.0)]
        horizon: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        /// `polar:RxS`: R rings up to radius 0.9, S spokes each.
        #[arg(long, default_value = "polar:8x8")]
        grid: String,
        /// Keep every stride-th step (the final time is always kept).
        #[arg(long, default_value_t = 100)]
        stride: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum WeinsteinCmd {
    /// Λ_k^n(t) for n <= N, optionally against both oracles.
    Lambda {
        #[arg(long)]
        t: f64,
        #[arg(long)]
        k: usize,
        #[arg(long = "N")]
        n: usize,
        #[arg(long, value_enum, default_value = "series")]
        oracle: Oracle,
        #[arg(long)]
        format: Option<FormatArg>,
        /// Output file; `json` or `csv` alone selects the format on stdout.
        #[arg(long)]
        out: Option<String>,
    },
    /// Compare the Milin form with the integral of g_n.
    Decompose {
        #[arg(long, default_value = "koebe")]
        function: String,
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long = "T", default_value_t = 8.0)]
        horizon: f64,
        #[arg(long, default_value_t = 0.99)]
        radius: f64,
        #[arg(long, default_value_t = 1024)]
        quad: usize,
        #[arg(long, default_value_t = 0.02)]
        dt: f64,
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Oracle {
    Series,
    Fourier,
    Legendre,
    All,
}

#[derive(Args)]
struct TableArgs {
    #[arg(value_enum)]
    kind: KindArg,
    #[arg(long, default_value_t = 5)]
    n: usize,
    #[arg(long, default_value_t = 0.0)]
    t: f64,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value = "koebe")]
    function: String,
    #[arg(long, default_value = "csv")]
    format: FormatArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Legendre,
    Lambda,
    Coefficients,
}

enum Failure {
    Checks,
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Command::Verify(a) => verify(a),
        Command::Loewner(LoewnerCmd::Trace { kappa, horizon, step, grid, stride, out }) => {
            trace(&kappa, horizon, step, &grid, stride, out.as_deref())
        }
        Command::Weinstein(WeinsteinCmd::Lambda { t, k, n, oracle, format, out }) => lambda(t, k, n, oracle, format, out),
        Command::Weinstein(WeinsteinCmd::Decompose { function, n, horizon, radius, quad, dt, tol, out }) => {
            let p = DecompositionParams { n, horizon, radius, quad, dt };
            decompose(&function, &p, tol, out.as_deref())
        }
        Command::Table(a) => table(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 3 })
        }
    }
}

fn resolve(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_VAR) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn write_out(out: Option<&Path>, body: &str) -> Result<(), Error> {
    match out {
        Some(p) => {
            let p = resolve(p);
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(&p, body)?;
            Ok(())
        }
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn verify(a: VerifyArgs) -> Result<(), Failure> {
    let mut cfg = match &a.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(Error::from)?;
            toml::from_str::<SuiteConfig>(&text).map_err(|e| Error::ParamOutOfRange(format!("config: {e}")))?
        }
        None => SuiteConfig::default(),
    };
    macro_rules! set {
        ($($field:ident <- $v:expr),*) => { $(if let Some(v) = $v { cfg.$field = v.into(); })* };
    }
    set!(suite <- a.suite, function <- a.function, order <- a.order, tol <- a.tol, radius <- a.radius,
         quad <- a.quad, seed <- a.seed, horizon <- a.horizon, step <- a.step, format <- a.format);
    if a.n.is_some() {
        cfg.n = a.n;
    }
    if a.t.is_some() {
        cfg.t = a.t;
    }
    let report = run_suite(&cfg)?;
    write_out(a.out.as_deref(), &report.render(cfg.format))?;
    for c in report.failures() {
        eprintln!("FAIL {}: {:e} > {:e}", c.id, c.lhs, c.rhs);
    }
    if report.all_pass() {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn parse_grid(spec: &str) -> Result<Vec<Complex>, Error> {
    let bad = || Error::ParamOutOfRange(format!("grid must look like polar:RxS, got {spec}"));
    let dims = spec.strip_prefix("polar:").ok_or_else(bad)?;
    let (r, s) = dims.split_once('x').ok_or_else(bad)?;
    let rings: usize = r.parse().map_err(|_| bad())?;
    let spokes: usize = s.parse().map_err(|_| bad())?;
    if rings == 0 || spokes == 0 {
        return Err(bad());
    }
    let mut g = Vec::with_capacity(rings * spokes);
    for i in 1..=rings {
        let rad = 0.9 * i as f64 / rings as f64;
        for j in 0..spokes {
            g.push(Complex::from_polar(rad, 2.0 * PI * j as f64 / spokes as f64));
        }
    }
    Ok(g)
}

fn trace(kappa: &str, horizon: f64, step: f64, grid: &str, stride: usize, out: Option<&Path>) -> Result<(), Failure> {
    let driving = DrivingFunction::parse(kappa)?;
    let grid = parse_grid(grid)?;
    let ev = loewner_solve_sampled(&driving, &grid, horizon, step, stride.max(1))?;
    let mut s = String::from("t,z_re,z_im,f_re,f_im,etf_re,etf_im\n");
    for (i, &t) in ev.times.iter().enumerate() {
        let e = t.exp();
        for (z, f) in ev.grid.iter().zip(&ev.states[i]) {
            let g = f * e;
            let _ = writeln!(s, "{t},{},{},{},{},{},{}", z.re, z.im, f.re, f.im, g.re, g.im);
        }
    }
    write_out(out, &s)?;
    Ok(())
}

#[derive(Serialize)]
struct LambdaRow {
    n: usize,
    series: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    fourier: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    legendre: Option<f64>,
}

#[derive(Serialize)]
struct LambdaReport {
    t: f64,
    k: usize,
    max_n: usize,
    max_gap: f64,
    min_value: f64,
    rows: Vec<LambdaRow>,
}

fn lambda(t: f64, k: usize, max_n: usize, oracle: Oracle, format: Option<FormatArg>, out: Option<String>) -> Result<(), Failure> {
    let (format, path) = match out.as_deref() {
        Some("json") => (Format::Json, None),
        Some("csv") => (Format::Csv, None),
        Some(p) => (format.map(Format::from).unwrap_or(Format::Json), Some(PathBuf::from(p))),
        None => (format.map(Format::from).unwrap_or(Format::Json), None),
    };
    let series = lambda_series(t, k, max_n)?;
    let mut rows = Vec::new();
    let mut max_gap: f64 = 0.0;
    for n in k..=max_n {
        let fourier = match oracle {
            Oracle::Fourier | Oracle::All => Some(lambda_fourier_oracle(t, k, n, 1024)?),
            _ => None,
        };
        let legendre = match oracle {
            Oracle::Legendre | Oracle::All if n <= 12 => Some(legendre_route_check(t, n, k)?.value),
            _ => None,
        };
        for v in [fourier, legendre].into_iter().flatten() {
            max_gap = max_gap.max((v - series[n]).abs());
        }
        rows.push(LambdaRow { n, series: series[n], fourier, legendre });
    }
    let min_value = rows.iter().map(|r| r.series).fold(f64::INFINITY, f64::min);
    let report = LambdaReport { t, k, max_n, max_gap, min_value, rows };
    let body = match format {
        Format::Json => serde_json::to_string_pretty(&report).expect("plain data") + "\n",
        Format::Csv => {
            let mut s = String::from("t,k,n,series,fourier,legendre\n");
            let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            for r in &report.rows {
                let _ = writeln!(s, "{t},{k},{},{},{},{}", r.n, r.series, opt(r.fourier), opt(r.legendre));
            }
            s
        }
    };
    write_out(path.as_deref(), &body)?;
    if max_gap < ORACLE_TOL {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn decompose(function: &str, p: &DecompositionParams, tol: f64, out: Option<&Path>) -> Result<(), Failure> {
    let f = from_registry(function, 8)?;
    let chain = LoewnerChain::for_function(&f)?;
    let case = milin_decomposition_check(&chain, p, tol)?;
    write_out(out, &(serde_json::to_string_pretty(&case).expect("plain data") + "\n"))?;
    if case.report.all_pass() {
        Ok(())
    } else {
        for c in case.report.failures() {
            eprintln!("FAIL {}: {:e} > {:e}", c.id, c.lhs, c.rhs);
        }
        Err(Failure::Checks)
    }
}

fn table(a: TableArgs) -> Result<(), Failure> {
    let kind = match a.kind {
        KindArg::Legendre => TableKind::Legendre,
        KindArg::Lambda => TableKind::Lambda,
        KindArg::Coefficients => TableKind::Coefficients,
    };
    let p = TableParams { n: a.n, t: a.t, k: a.k, function: a.function, format: a.format.into() };
    write_out(a.out.as_deref(), &emit_table(kind, &p)?)?;
    Ok(())
}
