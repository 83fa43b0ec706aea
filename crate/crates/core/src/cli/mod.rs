//! Command-line front end: argument parsing into a [`JobSpec`] and dispatch.

pub mod expr;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::json;

use crate::algebra::field::is_prime;
use crate::algebra::{FieldCtx, FqElem};
use crate::automaton::{build_forward_dfao, build_reverse_dfao, Convention, Dfao};
use crate::complexity::{algebraize, bounds_report, default_caps};
use crate::error::{Error, ErrorKind, Result};
use crate::function_field::PlaneCurve;
use crate::kernel::{
    enumerate_kernel, extract_representation, kernel_truncated, Kernel, Representation, DEFAULT_MAX_STATES,
};
use crate::rational_sweep::{classify_bounded, prime_sweep, sweep_table, RationalSeriesQ};
use crate::series::{hensel_expand, simple_roots_at_origin, TruncSeries, DEFAULT_PRECISION};

/// Smallest accepted `--precision`.
pub const MIN_PRECISION: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Dot,
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Print the first N coefficients of the branch.
    Expand,
    /// Dump the kernel table.
    Kernel,
    /// Emit the minimal automaton (DOT or JSON).
    Automaton,
    /// Compare state counts with the known upper bounds.
    Complexity,
    /// Recover an annihilating polynomial from the automaton.
    Algebraize,
    /// State counts of a rational series over Q reduced modulo primes.
    Sweep,
    /// Re-derive an automaton and compare it with a JSON file.
    Verify,
}

#[derive(Debug, Parser)]
#[command(name = "christol", version, about = "Automata for algebraic power series over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Characteristic.
    #[arg(long, global = true)]
    p: Option<u32>,
    /// Extension degree; q = p^r.
    #[arg(long, global = true, default_value_t = 1)]
    r: u32,
    /// Modulus of F_q over F_p, coefficients low degree first, comma separated.
    #[arg(long, global = true)]
    modulus: Option<String>,
    /// Curve as an expression in x and T.
    #[arg(long, global = true)]
    curve: Option<String>,
    /// Curve as a coefficient table file (`x_exp T_exp code` per line).
    #[arg(long, global = true)]
    curve_file: Option<PathBuf>,
    /// Constant term of the branch, as an element code.
    #[arg(long, global = true)]
    a0: Option<u64>,
    /// Leading branch coefficients (codes, comma separated), or `@path`.
    #[arg(long, global = true)]
    branch_coeffs: Option<String>,
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION)]
    precision: usize,
    #[arg(long, global = true, default_value_t = Convention::Reverse)]
    convention: Convention,
    /// Genus of the curve, if known.
    #[arg(long, global = true)]
    genus: Option<u64>,
    /// Primes for `sweep`: `a..b` (inclusive) or a comma separated list.
    #[arg(long, global = true)]
    primes: Option<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Accepted for reproducible invocations; no subcommand is randomized.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the artifact here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Automaton JSON file for `verify`.
    #[arg(long, global = true)]
    automaton: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_STATES)]
    max_states: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CurveSource {
    Expr(String),
    File(PathBuf),
}

/// A validated invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JobSpec {
    pub command: Command,
    pub p: Option<u32>,
    pub r: u32,
    pub modulus: Option<Vec<u32>>,
    pub curve: Option<CurveSource>,
    pub a0: Option<u64>,
    pub branch_coeffs: Option<String>,
    pub precision: usize,
    pub convention: Convention,
    pub genus: Option<u64>,
    pub primes: Option<String>,
    pub format: Option<Format>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub automaton: Option<PathBuf>,
    pub max_states: usize,
}

fn parse_u32_list(text: &str, what: &str) -> Result<Vec<u32>> {
    text.split(',')
        .map(|s| s.trim().parse().map_err(|_| Error::InvalidInput(format!("{what}: {s:?} is not a non-negative integer"))))
        .collect()
}

/// `a..b` (the primes in that inclusive range), or a comma separated list
/// kept as given.
pub fn parse_primes(text: &str) -> Result<Vec<u64>> {
    let bad = || Error::InvalidInput(format!("--primes: cannot read {text:?}"));
    if let Some((a, b)) = text.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        if a > b || b - a > 100_000 {
            return Err(bad());
        }
        return Ok((a..=b).filter(|&n| is_prime(n)).collect());
    }
    text.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
}

impl JobSpec {
    /// Parses command-line arguments (including the program name).
    pub fn from_args<I, T>(args: I) -> std::result::Result<JobSpec, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        let cli = Cli::try_parse_from(args)?;
        let curve = match (cli.curve, cli.curve_file) {
            (Some(e), None) => Some(CurveSource::Expr(e)),
            (None, Some(p)) => Some(CurveSource::File(p)),
            (None, None) => None,
            (Some(_), Some(_)) => {
                return Err(clap::Error::raw(
                    clap::error::ErrorKind::ArgumentConflict,
                    "--curve and --curve-file are mutually exclusive\n",
                ))
            }
        };
        let modulus = match cli.modulus {
            Some(m) => Some(
                parse_u32_list(&m, "--modulus")
                    .map_err(|e| clap::Error::raw(clap::error::ErrorKind::ValueValidation, format!("{e}\n")))?,
            ),
            None => None,
        };
        Ok(JobSpec {
            command: cli.command,
            p: cli.p,
            r: cli.r,
            modulus,
            curve,
            a0: cli.a0,
            branch_coeffs: cli.branch_coeffs,
            precision: cli.precision,
            convention: cli.convention,
            genus: cli.genus,
            primes: cli.primes,
            format: cli.format,
            seed: cli.seed,
            out: cli.out,
            automaton: cli.automaton,
            max_states: cli.max_states,
        })
    }

    /// Checks the invariants that do not depend on the subcommand's inputs.
    pub fn validate(&self) -> Result<()> {
        if self.precision < MIN_PRECISION {
            return Err(Error::InvalidInput(format!("--precision must be at least {MIN_PRECISION}")));
        }
        if self.command != Command::Sweep && self.curve.is_none() && self.branch_coeffs.is_none() {
            return Err(Error::InvalidInput("give --curve, --curve-file or --branch-coeffs".into()));
        }
        Ok(())
    }

    fn field(&self) -> Result<FieldCtx> {
        let p = self.p.ok_or_else(|| Error::InvalidInput("--p is required".into()))?;
        FieldCtx::new(p, self.r, self.modulus.as_deref())
    }
}

/// The sequence a job works on.
enum Source {
    Curve { curve: Box<PlaneCurve>, branch: TruncSeries },
    Series(TruncSeries),
}

fn read_file(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn load_curve(job: &JobSpec, f: &FieldCtx) -> Result<Option<PlaneCurve>> {
    let terms = match &job.curve {
        None => return Ok(None),
        Some(CurveSource::Expr(text)) => expr::parse_curve_expr(text, f)?,
        Some(CurveSource::File(path)) => expr::parse_table_file(&read_file(path)?, f)?,
    };
    PlaneCurve::from_terms(f.clone(), &terms).map(Some)
}

fn branch_coeffs(job: &JobSpec, f: &FieldCtx) -> Result<Option<TruncSeries>> {
    let Some(text) = &job.branch_coeffs else { return Ok(None) };
    let text = match text.strip_prefix('@') {
        Some(path) => read_file(&PathBuf::from(path))?,
        None => text.clone(),
    };
    TruncSeries::parse_csv(text.trim(), f).map(Some)
}

fn load_source(job: &JobSpec, f: &FieldCtx) -> Result<Source> {
    let given = branch_coeffs(job, f)?;
    let Some(curve) = load_curve(job, f)? else {
        let s = given.expect("validated: some source is present");
        return Ok(Source::Series(s.truncate(s.precision().min(job.precision))));
    };
    let a0 = match (job.a0, &given) {
        (Some(code), _) => f
            .try_elem(code)
            .ok_or_else(|| Error::InvalidInput(format!("--a0 {code} is not an element code of F_{}", f.q())))?,
        (None, Some(s)) => s.coeff(0),
        (None, None) => {
            let roots = simple_roots_at_origin(&curve);
            match roots.as_slice() {
                [a] => *a,
                [] => return Err(Error::RamifiedBranch("no simple root at the origin; give --a0".into())),
                _ => {
                    let codes: Vec<String> = roots.iter().map(|a| a.code().to_string()).collect();
                    return Err(Error::InvalidInput(format!(
                        "several simple roots at the origin ({}); give --a0",
                        codes.join(", ")
                    )));
                }
            }
        }
    };
    let branch = hensel_expand(&curve, a0, job.precision)?;
    if let Some(s) = given {
        let n = s.precision().min(branch.precision());
        if s.coeffs()[..n] != branch.coeffs()[..n] {
            return Err(Error::InvalidInput("--branch-coeffs disagree with the branch through a0".into()));
        }
    }
    Ok(Source::Curve { curve: Box::new(curve), branch })
}

fn require_curve(src: &Source) -> Result<(&PlaneCurve, &TruncSeries)> {
    match src {
        Source::Curve { curve, branch } => Ok((curve, branch)),
        Source::Series(_) => Err(Error::InvalidInput("this subcommand needs a curve".into())),
    }
}

/// Kernel transitions and outputs, plus the linear representation.
fn kernel_and_rep(src: &Source, f: &FieldCtx, max_states: usize) -> Result<(Kernel<String>, Representation)> {
    match src {
        Source::Curve { curve, branch } => {
            let k = enumerate_kernel(curve, &curve.y(), branch, max_states)?;
            let rep = extract_representation(curve, &k)?;
            Ok((k.map_states(|u| curve.show_elem(u)), rep))
        }
        Source::Series(s) => {
            let t = kernel_truncated(s, f, max_states)?;
            Ok((t.kernel.map_states(show_prefix), t.representation))
        }
    }
}

fn show_prefix(s: &TruncSeries) -> String {
    let head: Vec<String> = s.coeffs().iter().take(16).map(|c| c.code().to_string()).collect();
    let tail = if s.precision() > 16 { ",..." } else { "" };
    format!("{}{tail} (N = {})", head.join(","), s.precision())
}

fn automaton(src: &Source, f: &FieldCtx, convention: Convention, max_states: usize) -> Result<Dfao> {
    let (k, rep) = kernel_and_rep(src, f, max_states)?;
    Ok(match convention {
        Convention::Reverse => build_reverse_dfao(&k).minimize(),
        Convention::Forward => build_forward_dfao(&rep, f, max_states)?.minimize(),
    })
}

fn render_automaton(d: &Dfao, format: Format) -> Result<String> {
    match format {
        Format::Dot => Ok(d.to_dot()),
        Format::Json => Ok(d.to_json()),
        Format::Text => Err(Error::InvalidInput("automaton output is dot or json".into())),
    }
}

fn codes(v: &[FqElem]) -> Vec<u32> {
    v.iter().map(|c| c.code()).collect()
}

fn pretty(v: serde_json::Value) -> String {
    serde_json::to_string_pretty(&v).expect("plain data serializes") + "\n"
}

fn run_sweep(job: &JobSpec) -> Result<String> {
    let text = match &job.curve {
        Some(CurveSource::Expr(t)) => t,
        _ => return Err(Error::InvalidInput("sweep needs --curve den*T - num with integer coefficients".into())),
    };
    let table = expr::parse_int_table(text)?;
    if table.keys().any(|&(_, j)| j > 1) || !table.keys().any(|&(_, j)| j == 1) {
        return Err(Error::InvalidInput("sweep needs a curve of T-degree 1".into()));
    }
    let column = |j: usize, sign: i32| -> Vec<BigInt> {
        let deg = table.keys().filter(|k| k.1 == j).map(|k| k.0).max().unwrap_or(0);
        (0..=deg)
            .map(|i| {
                let c = table.get(&(i, j)).cloned().unwrap_or_default();
                if sign < 0 { -c } else { c }
            })
            .collect()
    };
    let y = RationalSeriesQ::new(column(0, -1), column(1, 1))?;
    let primes = parse_primes(job.primes.as_deref().unwrap_or("2..50"))?;
    let rows = prime_sweep(&y, &primes, job.max_states)?;
    let class = classify_bounded(&y);
    Ok(match job.format.unwrap_or(Format::Text) {
        Format::Json => pretty(json!({ "field": "Q", "classification": class, "rows": rows })),
        Format::Text => format!("{}classification: {class:?}\n", sweep_table(&rows)),
        Format::Dot => return Err(Error::InvalidInput("sweep output is text or json".into())),
    })
}

/// Runs a job and returns the artifact text.
pub fn run(job: &JobSpec) -> Result<String> {
    job.validate()?;
    if job.command == Command::Sweep {
        return run_sweep(job);
    }
    let f = job.field()?;
    let src = load_source(job, &f)?;
    match job.command {
        Command::Expand => {
            let s = match &src {
                Source::Curve { branch, .. } => branch,
                Source::Series(s) => s,
            };
            Ok(match job.format.unwrap_or(Format::Text) {
                Format::Json => pretty(json!({ "q": f.q(), "coeffs": codes(s.coeffs()) })),
                _ => s.to_csv() + "\n",
            })
        }
        Command::Kernel => {
            let (k, _) = kernel_and_rep(&src, &f, job.max_states)?;
            Ok(match job.format.unwrap_or(Format::Text) {
                Format::Json => pretty(json!({
                    "q": k.q(),
                    "n_states": k.len(),
                    "transitions": k.transitions(),
                    "outputs": codes(k.outputs()),
                    "states": k.states(),
                })),
                _ => k.dump(String::clone),
            })
        }
        Command::Automaton => {
            let d = automaton(&src, &f, job.convention, job.max_states)?;
            render_automaton(&d, job.format.unwrap_or(Format::Json))
        }
        Command::Complexity => {
            let (curve, _) = require_curve(&src)?;
            let n_rev = automaton(&src, &f, Convention::Reverse, job.max_states)?.n_states();
            let n_fwd = automaton(&src, &f, Convention::Forward, job.max_states)?.n_states();
            let report = bounds_report(&f, curve.degree(), curve.height(), job.genus, n_rev, n_fwd);
            Ok(match job.format.unwrap_or(Format::Text) {
                Format::Json => report.to_json(),
                _ => report.to_text(),
            })
        }
        Command::Algebraize => {
            let (k, rep) = kernel_and_rep(&src, &f, job.max_states)?;
            let (dt, dx) = default_caps(f.q() as usize, k.len());
            let rel = algebraize(&rep, &f, dt, dx)?;
            Ok(match job.format.unwrap_or(Format::Text) {
                Format::Json => pretty(json!({
                    "q": f.q(),
                    "deg_t": rel.deg_t(),
                    "deg_x": rel.deg_x(),
                    "relation": rel.show(&f),
                    "coeffs": rel.coeffs.iter().map(|c| codes(c.coeffs())).collect::<Vec<_>>(),
                })),
                _ => rel.show(&f) + "\n",
            })
        }
        Command::Verify => {
            let path = job
                .automaton
                .as_ref()
                .ok_or_else(|| Error::InvalidInput("verify needs --automaton".into()))?;
            let given = Dfao::from_json(&read_file(path)?, &f)?;
            let derived = automaton(&src, &f, given.convention(), job.max_states)?;
            if given.canonical().to_json() == derived.canonical().to_json() {
                Ok(format!("match: {} states, {}\n", derived.n_states(), derived.convention()))
            } else {
                Err(Error::InvalidInput(format!(
                    "automaton does not match: file has {} states, derived {}",
                    given.n_states(),
                    derived.n_states()
                )))
            }
        }
        Command::Sweep => unreachable!("handled above"),
    }
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e.kind() {
        ErrorKind::User => 1,
        ErrorKind::Refusal => 2,
        ErrorKind::Internal => 3,
    }
}

/// Parses `args`, runs the job, writes the artifact and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let job = match JobSpec::from_args(args) {
        Ok(job) => job,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let text = match std::panic::catch_unwind(|| run(&job)) {
        Ok(Ok(text)) => text,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
        Err(_) => {
            eprintln!("error: internal invariant violated");
            return 3;
        }
    };
    match &job.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: {}: {e}", path.display());
                return 1;
            }
        }
        None => print!("{text}"),
    }
    0
}
