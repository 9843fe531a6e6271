//! Command-line front end. [`run`] is pure apart from `--out <path>`: it
//! returns the exit code and both output streams.
//!
//! Exit codes: 0 success, 2 parse error, 3 precondition violation,
//! 4 precision exhaustion.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand};

use crate::algebraic::{
    hensel_lift_exact, hensel_lift_numeric, theorem1_consistency, write_exact_lift, AlgebraError, ConsistencyConfig,
    ConsistencyRow, GaussRat, RatFunc, UPoly,
};
use crate::diophantine::{factoradic_expand, witness_gaps, witness_search, DiophantineError};
use crate::hartogs::{
    counterexample_series, divergence_certificate, format_number, lower_f64, rational_termination, scan_grid, write_csv,
    ExactPoint, GridSpec, HartogsError, DEFAULT_WINDOW,
};
use crate::numeric::{BallComplex, ExactError, PrecisionBudget};
use crate::parse::{parse_bivar, parse_complex, parse_poly, parse_real, ParseError, PolyError};
use crate::theta::{log_abs_theta, theta11_direct, ThetaContext, ThetaError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_PRECISION: i32 = 4;

/// Exit code and captured output of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandResult {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "hartogs", version, about = "Hartogs series experiments: theta counterexample, factoradic witnesses, algebraic branches")]
struct Cli {
    #[command(subcommand)]
    cmd: Top,
}

#[derive(Subcommand, Debug)]
enum Top {
    /// Theta function evaluation.
    Theta {
        #[command(subcommand)]
        cmd: ThetaCmd,
    },
    /// Nearest-integer dynamics of n! x.
    Dioph {
        #[command(subcommand)]
        cmd: DiophCmd,
    },
    /// The theta-quotient counterexample series.
    Cex {
        #[command(subcommand)]
        cmd: CexCmd,
    },
    /// Algebraic relations Phi(z, w, X) = 0.
    Alg {
        #[command(subcommand)]
        cmd: AlgCmd,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Working precision in bits.
    #[arg(long, default_value_t = 128)]
    prec: u32,
    /// Output file, or `-` for standard output.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug)]
struct Tau {
    /// Lattice parameter with positive imaginary part.
    #[arg(long, default_value = "0+1i", allow_hyphen_values = true)]
    tau0: String,
}

#[derive(Subcommand, Debug)]
enum ThetaCmd {
    /// theta_11(z | tau0) and log|theta_11|, at `--at` or at `x*tau0 + y`.
    Eval {
        #[command(flatten)]
        tau: Tau,
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        y: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand, Debug)]
enum DiophCmd {
    /// Digits a_k and remainders d(k! x) of the factoradic expansion.
    Factoradic {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 20)]
        terms: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Indices n <= max-n with |d(n! x)| >= 1/(2(n+1)).
    Witnesses {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 50)]
        max_n: u32,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand, Debug)]
enum CexCmd {
    /// Radius verdicts on a grid of points x*tau0 + y.
    Scan {
        #[command(flatten)]
        tau: Tau,
        /// `x0:x1:y0:y1:res`.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long, default_value_t = 25)]
        terms: u32,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Certified divergence chain at every witness n <= max-n.
    Certify {
        #[command(flatten)]
        tau: Tau,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long, default_value_t = 15)]
        max_n: u32,
        #[command(flatten)]
        common: Common,
    },
    /// First index from which all coefficients vanish, at a rational point.
    Terminate {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand, Debug)]
enum AlgCmd {
    /// Lift a branch: exactly in z with `--seed`, or numerically at `--at`.
    Lift {
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
        /// F(z, 0): a polynomial in z (exact mode) or a complex number (at a point).
        #[arg(long, allow_hyphen_values = true)]
        seed: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        #[arg(long, default_value_t = 8)]
        terms: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Estimated radius of the lifted branch against the discriminant distance.
    Radius {
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[arg(long, default_value_t = 512)]
        terms: usize,
        #[arg(long, allow_hyphen_values = true)]
        seed: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// The radius comparison at several points (default 1, 2, 4).
    CheckTheorem1 {
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
        #[arg(long, allow_hyphen_values = true)]
        at: Vec<String>,
        #[arg(long, default_value_t = 512)]
        terms: usize,
        #[command(flatten)]
        common: Common,
    },
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

fn arg_err(flag: &str, e: ParseError) -> Failure {
    Failure::new(EXIT_PARSE, format!("--{flag}: {e}"))
}

fn dioph_code(e: &DiophantineError) -> i32 {
    match e {
        DiophantineError::TieStraddle | DiophantineError::PrecisionExhausted { .. } => EXIT_PRECISION,
        _ => EXIT_PRECONDITION,
    }
}

fn theta_code(e: &ThetaError) -> i32 {
    match e {
        ThetaError::NonpositiveImTau => EXIT_PRECONDITION,
        _ => EXIT_PRECISION,
    }
}

fn hartogs_code(e: &HartogsError) -> i32 {
    match e {
        HartogsError::Diophantine(d) => dioph_code(d),
        HartogsError::Theta(t) => theta_code(t),
        HartogsError::CertificationFailed(_) => EXIT_PRECISION,
        _ => EXIT_PRECONDITION,
    }
}

fn algebra_code(e: &AlgebraError) -> i32 {
    match e {
        AlgebraError::Hartogs(h) => hartogs_code(h),
        e if e.wants_precision() => EXIT_PRECISION,
        _ => EXIT_PRECONDITION,
    }
}

impl From<HartogsError> for Failure {
    fn from(e: HartogsError) -> Self {
        Failure::new(hartogs_code(&e), e.to_string())
    }
}

impl From<DiophantineError> for Failure {
    fn from(e: DiophantineError) -> Self {
        Failure::new(dioph_code(&e), e.to_string())
    }
}

impl From<ThetaError> for Failure {
    fn from(e: ThetaError) -> Self {
        Failure::new(theta_code(&e), e.to_string())
    }
}

impl From<AlgebraError> for Failure {
    fn from(e: AlgebraError) -> Self {
        Failure::new(algebra_code(&e), e.to_string())
    }
}

impl From<ExactError> for Failure {
    fn from(e: ExactError) -> Self {
        Failure::new(EXIT_PRECONDITION, e.to_string())
    }
}

fn budget(c: &Common) -> Result<PrecisionBudget, Failure> {
    PrecisionBudget::try_new(c.prec, PrecisionBudget::default().max_restarts())
        .ok_or_else(|| Failure::new(EXIT_PRECONDITION, format!("--prec must be at least {}", PrecisionBudget::MIN_BITS)))
}

fn context(tau: &Tau, b: PrecisionBudget) -> Result<ThetaContext, Failure> {
    let t = parse_complex(&tau.tau0).map_err(|e| arg_err("tau0", e))?;
    Ok(ThetaContext::new(t.re, t.im, b)?)
}

fn real_arg(flag: &str, src: &str) -> Result<crate::numeric::ExactReal, Failure> {
    parse_real(src).map_err(|e| arg_err(flag, e))
}

fn point_args(x: &str, y: &str) -> Result<ExactPoint, Failure> {
    Ok(ExactPoint::new(real_arg("x", x)?, real_arg("y", y)?))
}

fn phi_arg(src: &str) -> Result<crate::algebraic::XPoly, Failure> {
    parse_poly(src).map_err(|e| match e {
        PolyError::Parse(p) => arg_err("phi", p),
        PolyError::Relation(r) => Failure::new(EXIT_PRECONDITION, format!("--phi: {r}")),
    })
}

fn complex_arg(flag: &str, src: &str) -> Result<GaussRat, Failure> {
    parse_complex(src).map_err(|e| arg_err(flag, e))
}

fn num(v: f64) -> String {
    format_number(v)
}

fn theta_eval(tau: &Tau, at: Option<&str>, x: Option<&str>, y: Option<&str>, c: &Common) -> Result<String, Failure> {
    let ctx = context(tau, budget(c)?)?;
    let prec = ctx.bits();
    let z = match (at, x, y) {
        (Some(a), None, None) => complex_arg("at", a)?.to_ball(prec),
        (None, Some(x), Some(y)) => point_args(x, y)?.to_ball(&ctx, prec),
        _ => return Err(Failure::new(EXIT_PRECONDITION, "give either --at or both --x and --y")),
    };
    let log = log_abs_theta(&z, &ctx)?;
    let (re, im) = match theta11_direct(&z, &ctx.tau(prec), prec) {
        Ok(v) => (num(v.re.to_f64()), num(v.im.to_f64())),
        Err(ThetaError::CutoffOverflow) => (String::new(), String::new()),
        Err(e) => return Err(e.into()),
    };
    Ok(format!("re,im,log_abs\n{re},{im},{}\n", num(log.to_f64())))
}

fn factoradic(x: &str, terms: u32, c: &Common) -> Result<String, Failure> {
    let x = real_arg("x", x)?;
    let f = factoradic_expand(&x, terms, &budget(c)?)?;
    let mut out = String::from("k,a_k,d_k\n");
    for s in f.states() {
        writeln!(out, "{},{},{}", s.k, s.a, num(s.b.to_f64())).expect("string write");
    }
    Ok(out)
}

fn witnesses(x: &str, max_n: u32, c: &Common) -> Result<String, Failure> {
    let x = real_arg("x", x)?;
    let ws = witness_search(&x, max_n, &budget(c)?)?;
    let gaps = witness_gaps(&ws);
    let mut out = String::from("n,abs_d_lower,threshold,gap\n");
    for (i, w) in ws.iter().enumerate() {
        let gap = if i == 0 { String::new() } else { gaps[i - 1].to_string() };
        writeln!(out, "{},{},{},{gap}", w.n, num(lower_f64(&w.d_bound)), num(w.threshold.to_f64())).expect("string write");
    }
    Ok(out)
}

fn grid_arg(src: &str) -> Result<GridSpec, Failure> {
    let parts: Vec<&str> = src.split(':').collect();
    if parts.len() != 5 {
        return Err(Failure::new(EXIT_PARSE, "--grid: expected x0:x1:y0:y1:res"));
    }
    let mut offset = 0;
    let mut reals = Vec::new();
    for p in &parts[..4] {
        let r = parse_real(p).map_err(|e| arg_err("grid", ParseError { offset: e.offset + offset, message: e.message }))?;
        reals.push(r);
        offset += p.len() + 1;
    }
    let resolution = parts[4]
        .trim()
        .parse()
        .map_err(|_| arg_err("grid", ParseError { offset, message: "expected a resolution".into() }))?;
    let mut it = reals.into_iter();
    let mut next = || it.next().expect("four reals");
    Ok(GridSpec { x0: next(), x1: next(), y0: next(), y1: next(), resolution })
}

fn scan(tau: &Tau, grid: &str, terms: u32, window: u32, c: &Common) -> Result<String, Failure> {
    let ctx = context(tau, budget(c)?)?;
    let grid = grid_arg(grid)?;
    let rows = scan_grid(&counterexample_series(ctx), &grid, terms, window)?;
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).expect("in-memory write");
    Ok(String::from_utf8(buf).expect("ascii"))
}

fn certify(tau: &Tau, x: &str, y: &str, max_n: u32, c: &Common) -> Result<String, Failure> {
    let ctx = context(tau, budget(c)?)?;
    let alpha = point_args(x, y)?;
    let cert = divergence_certificate(&counterexample_series(ctx), &alpha, max_n)?;
    let mut out = String::from("n,coordinate,abs_d,threshold,link1,link2,link3,link4,bound,log_fn,certified\n");
    for w in &cert.witnesses {
        let links: Vec<String> = w.links.iter().map(|l| num(lower_f64(&l.margin))).collect();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            w.n,
            match w.coordinate {
                crate::hartogs::Coordinate::X => "x",
                crate::hartogs::Coordinate::Y => "y",
            },
            num(lower_f64(&w.d_coord)),
            num(w.threshold.to_f64()),
            links.join(","),
            num(w.bound.upper().to_f64()),
            num(lower_f64(&w.log_fn)),
            w.all_certified()
        )
        .expect("string write");
    }
    Ok(out)
}

fn terminate(x: &str, y: &str) -> Result<String, Failure> {
    let alpha = point_args(x, y)?;
    let n0 = rational_termination(&alpha)?;
    Ok(format!("x,y,n0\n{},{},{n0}\n", alpha.x, alpha.y))
}

fn lift(phi: &str, seed: Option<&str>, at: Option<&str>, terms: usize, c: &Common) -> Result<String, Failure> {
    let phi = phi_arg(phi)?;
    let Some(at) = at else {
        let seed = seed.ok_or_else(|| Failure::new(EXIT_PRECONDITION, "exact lifting needs --seed"))?;
        let s = parse_bivar(seed).map_err(|e| arg_err("seed", e))?;
        if s.degree_w().is_some_and(|d| d > 0) {
            return Err(Failure::new(EXIT_PRECONDITION, "--seed must not depend on w"));
        }
        let poly = s.by_w().into_iter().next().unwrap_or_else(UPoly::zero);
        let f = hensel_lift_exact(&phi, &RatFunc::from_poly(poly), terms)?;
        let mut buf = Vec::new();
        write_exact_lift(&f, &mut buf).expect("in-memory write");
        return Ok(String::from_utf8(buf).expect("ascii"));
    };
    let b = budget(c)?;
    let z0 = complex_arg("at", at)?.to_ball(b.bits());
    let x0 = match seed {
        Some(s) => complex_arg("seed", s)?.to_ball(b.bits()),
        None => first_simple_root(&phi, &z0)?,
    };
    let l = hensel_lift_numeric(&phi, &z0, &x0, terms, &b)?;
    let mut out = String::from("n,re,im,radius\n");
    for (n, f) in l.series.coeffs().iter().enumerate() {
        writeln!(out, "{n},{},{},{}", num(f.re.to_f64()), num(f.im.to_f64()), num(f.radius_upper().to_f64()))
            .expect("string write");
    }
    Ok(out)
}

fn first_simple_root(phi: &crate::algebraic::XPoly, z0: &BallComplex) -> Result<BallComplex, Failure> {
    let at_zero: Vec<BallComplex> = phi
        .coeffs()
        .iter()
        .rev()
        .map(|c| c.specialize_z(z0).into_iter().next().unwrap_or_else(|| BallComplex::zero(z0.prec())))
        .collect();
    crate::algebraic::roots_univar(&at_zero, true)?
        .into_iter()
        .find(|c| c.multiplicity == 1)
        .map(|c| c.enclosure.center())
        .ok_or_else(|| AlgebraError::SingularInitialRoot.into())
}

const RADIUS_HEADER: &str = "z0,verdict,radius_estimate,discriminant_radius,ratio,pass";

fn radius_row(r: &ConsistencyRow) -> String {
    let est = match &r.estimate.verdict {
        crate::hartogs::RadiusVerdict::Finite(b) => num(b.to_f64()),
        crate::hartogs::RadiusVerdict::Infinite => "inf".into(),
        crate::hartogs::RadiusVerdict::Zero => num(0.0),
        crate::hartogs::RadiusVerdict::Inconclusive => String::new(),
    };
    let ratio = r.ratio.map(num).unwrap_or_default();
    format!("{},{},{est},{},{ratio},{}", r.z0, r.estimate.verdict.label(), num(r.singular.to_f64()), r.pass)
}

fn consistency(phi: &str, at: &[String], seed: Option<&str>, terms: usize, c: &Common) -> Result<String, Failure> {
    let phi = phi_arg(phi)?;
    let samples = if at.is_empty() {
        vec![GaussRat::from_i64(1), GaussRat::from_i64(2), GaussRat::from_i64(4)]
    } else {
        at.iter().map(|a| complex_arg("at", a)).collect::<Result<_, _>>()?
    };
    let seed = seed.map(|s| complex_arg("seed", s)).transpose()?;
    let window = ((terms / 8).max(1)) as u32;
    let cfg = ConsistencyConfig { order: terms, window, budget: budget(c)?, seed };
    let rows = theorem1_consistency(&phi, &samples, &cfg)?;
    let mut out = format!("{RADIUS_HEADER}\n");
    for r in &rows {
        writeln!(out, "{}", radius_row(r)).expect("string write");
    }
    Ok(out)
}

fn dispatch(cli: Cli) -> Result<(String, Option<String>), Failure> {
    let (payload, out) = match cli.cmd {
        Top::Theta { cmd: ThetaCmd::Eval { tau, at, x, y, common } } => {
            (theta_eval(&tau, at.as_deref(), x.as_deref(), y.as_deref(), &common)?, common.out)
        }
        Top::Dioph { cmd: DiophCmd::Factoradic { x, terms, common } } => (factoradic(&x, terms, &common)?, common.out),
        Top::Dioph { cmd: DiophCmd::Witnesses { x, max_n, common } } => (witnesses(&x, max_n, &common)?, common.out),
        Top::Cex { cmd: CexCmd::Scan { tau, grid, terms, window, common } } => {
            (scan(&tau, &grid, terms, window, &common)?, common.out)
        }
        Top::Cex { cmd: CexCmd::Certify { tau, x, y, max_n, common } } => {
            (certify(&tau, &x, &y, max_n, &common)?, common.out)
        }
        Top::Cex { cmd: CexCmd::Terminate { x, y, common } } => (terminate(&x, &y)?, common.out),
        Top::Alg { cmd: AlgCmd::Lift { phi, seed, at, terms, common } } => {
            (lift(&phi, seed.as_deref(), at.as_deref(), terms, &common)?, common.out)
        }
        Top::Alg { cmd: AlgCmd::Radius { phi, at, terms, seed, common } } => {
            (consistency(&phi, &[at], seed.as_deref(), terms, &common)?, common.out)
        }
        Top::Alg { cmd: AlgCmd::CheckTheorem1 { phi, at, terms, common } } => {
            (consistency(&phi, &at, None, terms, &common)?, common.out)
        }
    };
    Ok((payload, out))
}

/// Runs one invocation; `argv[0]` is the program name.
pub fn run<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CommandResult { code: EXIT_PARSE, stdout: String::new(), stderr: text }
            } else {
                CommandResult { code: EXIT_OK, stdout: text, stderr: String::new() }
            };
        }
    };
    match dispatch(cli) {
        Ok((payload, Some(path))) if path != "-" => match std::fs::write(&path, &payload) {
            Ok(()) => CommandResult { code: EXIT_OK, stdout: String::new(), stderr: String::new() },
            Err(e) => CommandResult {
                code: EXIT_PRECONDITION,
                stdout: String::new(),
                stderr: format!("cannot write {path}: {e}\n"),
            },
        },
        Ok((payload, _)) => CommandResult { code: EXIT_OK, stdout: payload, stderr: String::new() },
        Err(f) => CommandResult { code: f.code, stdout: String::new(), stderr: format!("error: {}\n", f.message) },
    }
}
