// `!(x >= lo)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use rhokit::determinants;
use rhokit::explore::{self, ExploreConfig};
use rhokit::harnack;
use rhokit::io::{fmt_sig, read_matrix};
use rhokit::kernel::{self, DiscGrid};
use rhokit::linalg;
use rhokit::radius::{self, RadiusResult, DEFAULT_SHIFT_TOL};
use rhokit::shifts::{make_shift, normalized_shift};
use rhokit::verify::{self, Tamper, VerifyConfig};
use rhokit::{CMatrix, Error};

const EXIT_VERIFY: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(name = "rhokit", version, about = "rho-numerical radii, rho-kernels and Harnack equivalence for truncated shifts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// rho-numerical radius of a truncated shift or a matrix
    Radius(RadiusArgs),
    /// Eigenvalues of the rho-kernel at one point, ascending
    Kernel(KernelArgs),
    /// Orthonormal basis of the rho-kernel null space at a point
    Nullspace(NullspaceArgs),
    /// Harnack equivalence test between two matrices
    Harnack(HarnackArgs),
    /// Determinant recurrences against LU determinants
    Detcheck(DetcheckArgs),
    /// The angle omega(rho) of the normalized shift, as CSV
    OmegaCurve(OmegaCurveArgs),
    /// Run the reproduction suite
    Verify(VerifyArgs),
    /// Non-normative sweeps around open questions
    Explore(ExploreArgs),
}

#[derive(Args)]
#[command(group(ArgGroup::new("source").required(true).args(["shift", "matrix"])))]
struct Source {
    /// Truncated shift of size n+1
    #[arg(long, value_name = "N")]
    shift: Option<usize>,
    /// Matrix JSON document
    #[arg(long, value_name = "FILE")]
    matrix: Option<PathBuf>,
    /// Scale the shift so that w_rho = 1
    #[arg(long, requires = "shift")]
    normalized: bool,
    /// Superdiagonal weight of the shift
    #[arg(long, requires = "shift", conflicts_with = "normalized", value_name = "B")]
    weight: Option<f64>,
}

impl Source {
    fn load(&self, rho: f64) -> rhokit::Result<CMatrix> {
        match (&self.matrix, self.shift) {
            (Some(path), _) => Ok(read_matrix(path)?.0),
            (None, Some(n)) if self.normalized => normalized_shift(n, rho),
            (None, Some(n)) => Ok(make_shift(n, self.weight.unwrap_or(1.0))),
            (None, None) => Err(Error::InvalidInput("one of --shift or --matrix is required".into())),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Auto,
    Bisect,
    Omega,
    Det,
}

#[derive(Args)]
#[command(group(ArgGroup::new("source").required(true).args(["shift", "matrix"])))]
struct RadiusArgs {
    #[arg(long, value_name = "N")]
    shift: Option<usize>,
    #[arg(long, value_name = "FILE")]
    matrix: Option<PathBuf>,
    #[arg(long)]
    rho: f64,
    #[arg(long, value_enum, default_value = "auto")]
    method: Method,
    /// Bracket width for bisection
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct KernelArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    rho: f64,
    /// Point of the closed disc as `re,im`
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0,0")]
    z: Complex64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct NullspaceArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    rho: f64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "1,0")]
    z: Complex64,
    /// Relative eigenvalue threshold for the null space
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct HarnackArgs {
    #[arg(long, value_name = "FILE")]
    t1: PathBuf,
    #[arg(long, value_name = "FILE")]
    t0: PathBuf,
    #[arg(long)]
    rho: f64,
    /// Interior radii, comma separated
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    grid_radii: Option<Vec<f64>>,
    /// Angles per interior radius
    #[arg(long, default_value_t = 64)]
    angles: usize,
    /// Unit-circle samples
    #[arg(long, default_value_t = harnack::TORUS_ANGLES)]
    torus: usize,
}

#[derive(Args)]
struct DetcheckArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    rho: f64,
    /// Largest index m
    #[arg(long, default_value_t = 8)]
    m: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct OmegaCurveArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 16)]
    samples: usize,
    /// Smallest rho (default 1.05)
    #[arg(long)]
    lo: Option<f64>,
    /// Largest rho (default n+1.95)
    #[arg(long)]
    hi: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 10)]
    n_max: usize,
    /// Also write the JSON report here
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override one tolerance, `ID=TOL`; exercises the failure path
    #[arg(long, hide = true, value_parser = parse_tamper)]
    tamper: Option<Tamper>,
}

#[derive(Args)]
struct ExploreArgs {
    /// Shift parameters n, comma separated
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3, 4])]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [1.5, 3.0, 5.0])]
    rho: Vec<f64>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected re,im, got {s:?}"))?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok(Complex64::new(parse(re)?, parse(im)?))
}

fn parse_tamper(s: &str) -> Result<Tamper, String> {
    let (id, tol) = s.split_once('=').ok_or_else(|| format!("expected ID=TOL, got {s:?}"))?;
    Ok(Tamper {
        id: id.to_string(),
        tolerance: tol.parse().map_err(|e| format!("{tol:?}: {e}"))?,
    })
}

/// Failure of a subcommand, carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self {
            code: if e.is_numeric() { EXIT_NUMERIC } else { EXIT_USAGE },
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type CmdResult = Result<u8, Failure>;

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports always serialize")
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn fmt_complex(z: Complex64) -> String {
    format!("{},{}", fmt_sig(z.re), fmt_sig(z.im))
}

fn cmd_radius(args: &RadiusArgs, out: &mut impl Write) -> CmdResult {
    let shift_tol = args.tol.min(DEFAULT_SHIFT_TOL);
    let result: RadiusResult = match (args.shift, &args.matrix, args.method) {
        (Some(n), _, Method::Auto) => radius::shift_radius(n, args.rho, shift_tol)?,
        (Some(n), _, Method::Omega) => radius::omega_radius(n, args.rho, shift_tol)?,
        (Some(n), _, Method::Det) => radius::determinant_radius(n, args.rho, shift_tol)?,
        (Some(n), _, Method::Bisect) => radius::radius_bisect(&make_shift(n, 1.0), args.rho, &DiscGrid::default(), args.tol)?,
        (None, Some(path), Method::Auto | Method::Bisect) => {
            radius::radius_bisect(&read_matrix(path)?.0, args.rho, &DiscGrid::default(), args.tol)?
        }
        (None, Some(_), _) => return Err(usage("--method omega and det apply only to --shift")),
        (None, None, _) => return Err(usage("one of --shift or --matrix is required")),
    };
    if args.json {
        writeln!(out, "{}", to_json(&result)).ok();
    } else {
        let omega = result.omega.map_or("-".to_string(), fmt_sig);
        writeln!(
            out,
            "value={} method={} omega={} residual={} bracket=[{}, {}] iterations={}",
            fmt_sig(result.value),
            serde_json::to_value(result.method).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            omega,
            fmt_sig(result.residual),
            fmt_sig(result.bracket.0),
            fmt_sig(result.bracket.1),
            result.iterations
        )
        .ok();
    }
    Ok(0)
}

fn cmd_kernel(args: &KernelArgs, out: &mut impl Write) -> CmdResult {
    let t = args.source.load(args.rho)?;
    let spectrum = kernel::kernel_spectrum(&t, args.z, args.rho)?;
    if args.json {
        #[derive(Serialize)]
        struct Doc {
            z: [f64; 2],
            rho: f64,
            eigenvalues: Vec<f64>,
        }
        let doc = Doc {
            z: [args.z.re, args.z.im],
            rho: args.rho,
            eigenvalues: spectrum,
        };
        writeln!(out, "{}", to_json(&doc)).ok();
    } else {
        writeln!(out, "index,eigenvalue").ok();
        for (i, e) in spectrum.iter().enumerate() {
            writeln!(out, "{i},{}", fmt_sig(*e)).ok();
        }
    }
    Ok(0)
}

fn cmd_nullspace(args: &NullspaceArgs, out: &mut impl Write) -> CmdResult {
    let t = args.source.load(args.rho)?;
    let basis = kernel::torus_nullspace(&t, args.rho, args.z, args.tol)?;
    if args.json {
        let doc: Vec<Vec<[f64; 2]>> = basis.iter().map(|v| v.iter().map(|z| [z.re, z.im]).collect()).collect();
        writeln!(out, "{}", to_json(&doc)).ok();
    } else {
        writeln!(out, "nullity {}", basis.len()).ok();
        for (k, v) in basis.iter().enumerate() {
            let coords: Vec<String> = v.iter().map(|&z| fmt_complex(z)).collect();
            writeln!(out, "v{k} {}", coords.join(" ")).ok();
        }
    }
    Ok(0)
}

fn cmd_harnack(args: &HarnackArgs, out: &mut impl Write) -> CmdResult {
    let t1 = read_matrix(&args.t1)?.0;
    let t0 = read_matrix(&args.t0)?.0;
    let grid = match &args.grid_radii {
        Some(radii) => DiscGrid::new(radii.clone(), args.angles, args.torus)?,
        None => DiscGrid::new(DiscGrid::default().radii().to_vec(), args.angles, args.torus)?,
    };
    let verdict = harnack::are_harnack_equivalent(&t1, &t0, args.rho, &grid)?;
    writeln!(out, "{}", to_json(&verdict)).ok();
    Ok(0)
}

fn cmd_detcheck(args: &DetcheckArgs, out: &mut impl Write) -> CmdResult {
    if !(args.rho >= 1.0) || !args.a.is_finite() {
        return Err(usage("need finite a and rho >= 1"));
    }
    #[derive(Serialize)]
    struct Row {
        m: usize,
        dtilde: f64,
        dtilde_lu: f64,
        dbold: f64,
        dbold_lu: f64,
        mixed_residual: Option<f64>,
    }
    let toeplitz = |m: usize, last_one: bool| {
        CMatrix::from_fn(m + 1, |i, j| {
            let v = if i != j {
                args.a.powi(i.abs_diff(j) as i32)
            } else if last_one && i == m {
                1.0
            } else {
                args.rho
            };
            Complex64::new(v, 0.0)
        })
    };
    let mut rows = Vec::new();
    for m in 0..=args.m {
        rows.push(Row {
            m,
            dtilde: determinants::dtilde(m, args.a, args.rho),
            dtilde_lu: linalg::determinant(&toeplitz(m, true)).re,
            dbold: determinants::dbold(m, args.a, args.rho),
            dbold_lu: linalg::determinant(&toeplitz(m, false)).re,
            mixed_residual: if m >= 2 {
                Some(determinants::mixed_identity_check(m, args.a, args.rho)?)
            } else {
                None
            },
        });
    }
    let roots = determinants::characteristic_roots(args.a, args.rho);
    let disc = determinants::discriminant(args.a, args.rho);
    match args.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                a: f64,
                rho: f64,
                discriminant: f64,
                roots: determinants::CharacteristicRoots,
                rows: &'a [Row],
            }
            let doc = Doc {
                a: args.a,
                rho: args.rho,
                discriminant: disc,
                roots,
                rows: &rows,
            };
            writeln!(out, "{}", to_json(&doc)).ok();
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &rows {
                w.serialize(r).map_err(|e| usage(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| usage(e.to_string()))?;
            out.write_all(&bytes).ok();
        }
        Format::Text => {
            writeln!(out, "discriminant {} roots {roots:?}", fmt_sig(disc)).ok();
            writeln!(out, "m dtilde dtilde_lu dbold dbold_lu mixed_residual").ok();
            for r in &rows {
                writeln!(
                    out,
                    "{} {} {} {} {} {}",
                    r.m,
                    fmt_sig(r.dtilde),
                    fmt_sig(r.dtilde_lu),
                    fmt_sig(r.dbold),
                    fmt_sig(r.dbold_lu),
                    r.mixed_residual.map_or("-".to_string(), fmt_sig)
                )
                .ok();
            }
        }
    }
    Ok(0)
}

fn cmd_omega_curve(args: &OmegaCurveArgs, out: &mut impl Write) -> CmdResult {
    let lo = args.lo.unwrap_or(1.05);
    let hi = args.hi.unwrap_or(args.n as f64 + 1.95);
    if args.samples < 2 || !(lo < hi) {
        return Err(usage("need at least two samples and lo < hi"));
    }
    let samples: Vec<f64> = (0..args.samples)
        .map(|k| lo + (hi - lo) * k as f64 / (args.samples - 1) as f64)
        .collect();
    let curve = radius::omega_of_rho_curve(args.n, &samples)?;
    writeln!(out, "rho,omega").ok();
    for (rho, omega) in curve {
        writeln!(out, "{},{}", fmt_sig(rho), fmt_sig(omega)).ok();
    }
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs, out: &mut impl Write) -> CmdResult {
    let config = VerifyConfig {
        n_max: args.n_max,
        seed: args.seed,
        tamper: args.tamper.clone(),
    };
    let report = verify::run(&config);
    if let Some(path) = &args.out {
        write_file(path, &to_json(&report))?;
    }
    match args.format {
        Format::Json => {
            writeln!(out, "{}", to_json(&report)).ok();
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for c in &report.checks {
                w.serialize(c).map_err(|e| usage(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| usage(e.to_string()))?;
            out.write_all(&bytes).ok();
        }
        Format::Text => {
            for c in &report.checks {
                writeln!(out, "{}", c.line()).ok();
            }
            let failed = report.failed_ids();
            writeln!(
                out,
                "{} checks, {} passed, {} failed{}",
                report.summary.total,
                report.summary.passed,
                report.summary.failed,
                if failed.is_empty() { String::new() } else { format!(": {}", failed.join(", ")) }
            )
            .ok();
        }
    }
    Ok(if report.all_pass() { 0 } else { EXIT_VERIFY })
}

fn cmd_explore(args: &ExploreArgs, out: &mut impl Write) -> CmdResult {
    let config = ExploreConfig {
        n_values: args.n.clone(),
        rhos: args.rho.clone(),
        ..ExploreConfig::default()
    };
    let report = explore::run(&config)?;
    let json = to_json(&report);
    if let Some(path) = &args.out {
        write_file(path, &json)?;
    }
    writeln!(out, "{json}").ok();
    Ok(0)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("RHO_TOOLKIT_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| usage(format!("RHO_TOOLKIT_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            e.print().ok();
            return ExitCode::from(code);
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Radius(a) => cmd_radius(a, &mut out),
        Command::Kernel(a) => cmd_kernel(a, &mut out),
        Command::Nullspace(a) => cmd_nullspace(a, &mut out),
        Command::Harnack(a) => cmd_harnack(a, &mut out),
        Command::Detcheck(a) => cmd_detcheck(a, &mut out),
        Command::OmegaCurve(a) => cmd_omega_curve(a, &mut out),
        Command::Verify(a) => cmd_verify(a, &mut out),
        Command::Explore(a) => cmd_explore(a, &mut out),
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
