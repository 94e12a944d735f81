//! Batch experiment runner for `dioph-core`.
//!
//! `run` merges an optional flat config file with the command-line flags,
//! dispatches to one subcommand, and writes a CSV body (to `--csv` or
//! standard output) plus an optional JSON result file (`--json`).
//! Exit codes: 0 success, 1 invalid input or failed check, 2 budget or
//! precision exhausted (partial results are still written).

pub mod config;
pub mod grid;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use dioph_core::approx::{
    count_approximants, enumerate_algebraic, enumerate_rationals, fit_log_log, loja_estimate, parse_box,
    parse_rational, reproduce_example, ApproxQuery, ExampleParams, SetSpec, EXAMPLES,
};
use dioph_core::auxpoly::{build_aux_polynomials, AuxParams, BuildOptions, CubeSelection};
use dioph_core::heights::{height_algebraic, height_rational, HeightValue, RealAlgebraic};
use dioph_core::lattice::SiegelMode;
use dioph_core::poly::IntPoly;
use dioph_core::rootsum::{
    below_threshold, is_zero_exact, liouville_floor_check, min_sum, subsum_analysis, Coeff, MinSumOptions, RootSumInstance,
};
use dioph_core::{expr, Error, Integer, Rational};

use config::RunConfig;
use grid::parse_grid;
use output::{fmt_f64, render_csv, render_json, Sinks, Status, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_EXHAUSTED: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "dioph", version, about = "Experiments in Diophantine approximation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// CSV output path; standard output when absent.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// JSON result path.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Append a `seconds` column.
    #[arg(long)]
    timing: bool,
    /// Flat `key = value` file mirroring the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Heights of rationals and of the real roots of integer polynomials.
    Heights(HeightsArgs),
    /// Points of bounded height and degree.
    Enumerate(EnumerateArgs),
    /// Auxiliary polynomials small on a parametrized set.
    Auxpoly(AuxpolyArgs),
    /// Counts of approximants over a grid of heights.
    Count(CountArgs),
    /// Log-log slope of two CSV columns.
    Fit(FitArgs),
    /// Empirical Łojasiewicz exponent.
    Loja(LojaArgs),
    /// Least nonzero sums of roots of unity.
    Rootsum(RootsumArgs),
    /// Scripted reproductions of the worked examples.
    Examples(ExamplesArgs),
}

#[derive(Args, Debug)]
struct HeightsArgs {
    /// Comma-separated rationals.
    #[arg(long)]
    rationals: Option<String>,
    /// Integer coefficients, leading first; every real root is reported.
    #[arg(long)]
    poly: Option<String>,
    #[arg(long, default_value_t = 64)]
    prec: u32,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    #[arg(long = "T")]
    t: String,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    e: u32,
    /// Window such as `[0, 1]` or `[0, 1] x [-1, 1]`.
    #[arg(long = "box")]
    window: Option<String>,
    #[arg(long, default_value_t = 10_000_000)]
    max_points: u128,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct AuxpolyArgs {
    /// Map components separated by `;`.
    #[arg(long)]
    map: Option<String>,
    /// Set file whose map is used.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    e: u32,
    #[arg(long)]
    d: Option<u32>,
    #[arg(long)]
    b: Option<u32>,
    /// With `--epsilon`, parameters are chosen for polynomials in `r+1`
    /// variables.
    #[arg(long)]
    r: Option<u32>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long = "T")]
    t: String,
    #[arg(long = "c-prime", default_value = "1")]
    c_prime: String,
    /// `all`, or `containing:` followed by parameter points `x,y|x,y`.
    #[arg(long, default_value = "all")]
    select: String,
    /// `exact` or `reduced`.
    #[arg(long, default_value = "exact")]
    siegel: String,
    #[arg(long, default_value_t = 2_000_000)]
    budget: u64,
    #[arg(long, default_value_t = 192)]
    prec: u32,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct CountArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long = "T")]
    t: String,
    #[arg(long)]
    lambda: String,
    #[arg(long, default_value_t = 1)]
    e: u32,
    /// Exclusion exponent θ around the declared locus.
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    witnesses: bool,
    #[arg(long, default_value_t = 2_000_000)]
    max_candidates: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct FitArgs {
    /// CSV produced by another subcommand.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "T")]
    x: String,
    #[arg(long, default_value = "N")]
    y: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct LojaArgs {
    #[arg(long)]
    f: String,
    #[arg(long = "box")]
    window: String,
    /// Set file describing the zero set.
    #[arg(long)]
    zero: Option<PathBuf>,
    /// Zero set given as points `x,y|x,y`.
    #[arg(long)]
    zero_points: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct RootsumArgs {
    /// `a_0, a_1, …, a_n`: rationals or real enclosures `c±r`.
    #[arg(long)]
    coeffs: String,
    #[arg(long = "N")]
    modulus: String,
    /// Disable pruning (brute force).
    #[arg(long = "no-prune")]
    no_prune: bool,
    #[arg(long, default_value_t = 2_000_000_000)]
    budget: u128,
    #[arg(long, default_value_t = 128)]
    prec: u32,
    /// With `--c`: flag values below `c^{-1} N^{-λ}`.
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    c: Option<String>,
    /// Exponents `k_1,…,k_n` to test for vanishing (single `N`).
    #[arg(long)]
    tuple: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct ExamplesArgs {
    #[arg(long)]
    name: String,
    #[arg(long = "T")]
    t: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    m_max: Option<u32>,
    #[arg(long)]
    witnesses: bool,
    #[command(flatten)]
    common: Common,
}

/// Outcome of a subcommand before writing.
struct Outcome {
    table: Table,
    results: Value,
    status: Status,
    /// A reported check failed.
    failed: bool,
}

impl Outcome {
    fn done(table: Table, results: Value) -> Self {
        Outcome {
            table,
            results,
            status: Status::Complete,
            failed: false,
        }
    }
}

enum Fail {
    Invalid(String),
    Exhausted(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        if e.is_exhaustion() {
            Fail::Exhausted(e.to_string())
        } else {
            Fail::Invalid(e.to_string())
        }
    }
}

fn invalid(s: impl Into<String>) -> Fail {
    Fail::Invalid(s.into())
}

fn rational(s: &str) -> Result<Rational, Fail> {
    parse_rational(s).map_err(Fail::from)
}

fn points(s: &str) -> Result<Vec<Vec<Rational>>, Fail> {
    s.split('|')
        .map(|p| p.split(',').map(rational).collect())
        .collect()
}

fn read(path: &PathBuf) -> Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))
}

fn read_spec(path: &PathBuf) -> Result<SetSpec, Fail> {
    Ok(SetSpec::parse(&read(path)?)?)
}

fn timed_columns(base: &[&str], timing: bool) -> Table {
    let mut cols = base.to_vec();
    if timing {
        cols.push("seconds");
    }
    Table::new(&cols)
}

fn height_cells(h: &HeightValue) -> [String; 3] {
    [
        h.exact.as_ref().map(|p| p.to_string()).unwrap_or_default(),
        fmt_f64(h.enclosure.lo_f64()),
        fmt_f64(h.enclosure.hi_f64()),
    ]
}

fn heights(a: &HeightsArgs) -> Result<Outcome, Fail> {
    let mut table = Table::new(&["value", "degree", "height_exact", "height_lo", "height_hi"]);
    let mut res = Vec::new();
    if a.rationals.is_none() && a.poly.is_none() {
        return Err(invalid("give --rationals or --poly"));
    }
    if let Some(rs) = &a.rationals {
        for s in rs.split(',') {
            let q = rational(s)?;
            let h = height_rational(&q);
            let [ex, lo, hi] = height_cells(&h);
            table.push(vec![q.to_string(), "1".into(), ex, lo, hi]);
            res.push(json!({"value": q.to_string(), "height": h}));
        }
    }
    if let Some(ps) = &a.poly {
        let mut c: Vec<Integer> = ps
            .split(',')
            .map(|s| s.trim().parse::<Integer>().map_err(|_| invalid(format!("`{s}` is not an integer"))))
            .collect::<Result<_, _>>()?;
        c.reverse();
        let p = IntPoly::new(c);
        if p.deg() == 0 {
            return Err(invalid("polynomial must be nonconstant"));
        }
        for x in RealAlgebraic::real_roots(&p) {
            let h = height_algebraic(&x, a.prec)?;
            let [ex, lo, hi] = height_cells(&h);
            table.push(vec![x.to_string(), x.degree().to_string(), ex, lo, hi]);
            res.push(json!({"value": x, "approx": x.to_f64(), "height": h}));
        }
    }
    Ok(Outcome::done(table, Value::Array(res)))
}

fn enumerate(a: &EnumerateArgs) -> Result<Outcome, Fail> {
    let window = a.window.as_deref().map(parse_box).transpose()?;
    if a.e == 1 {
        let t: u64 = a.t.trim().parse().map_err(|_| invalid("--T must be an integer when e = 1"))?;
        let grid = enumerate_rationals(t, a.n, window.as_ref())?;
        let total = grid.total();
        if total > a.max_points {
            return Err(Fail::Exhausted(format!("{total} points exceed --max-points {}", a.max_points)));
        }
        let mut table = Table::new(&["point"]);
        for p in grid {
            let s: Vec<String> = p.iter().map(|q| q.to_string()).collect();
            table.push(vec![s.join(";")]);
        }
        return Ok(Outcome::done(table, json!({"count": total.to_string()})));
    }
    if a.n != 1 {
        return Err(invalid("algebraic enumeration is one-dimensional"));
    }
    let t = rational(&a.t)?;
    let (lo, hi) = match &window {
        Some(w) if w.dim() == 1 => (w.lo()[0].clone(), w.hi()[0].clone()),
        Some(_) => return Err(invalid("window dimension must be 1")),
        None => (-t.clone(), t.clone()),
    };
    let xs = enumerate_algebraic(&t, a.e, &lo, &hi)?;
    let mut table = Table::new(&["approx", "degree", "minpoly"]);
    for x in &xs {
        let c: Vec<String> = x.minpoly().coeffs().iter().rev().map(|c| c.to_string()).collect();
        table.push(vec![format!("{:.17e}", x.to_f64()), x.degree().to_string(), c.join(" ")]);
    }
    Ok(Outcome::done(table, json!({"count": xs.len(), "points": xs})))
}

fn auxpoly(a: &AuxpolyArgs) -> Result<Outcome, Fail> {
    let phi: Vec<dioph_core::Expr> = match (&a.map, &a.spec) {
        (Some(m), None) => m.split(';').map(expr::parse).collect::<Result<_, _>>()?,
        (None, Some(p)) => read_spec(p)?.phi,
        _ => return Err(invalid("give exactly one of --map and --spec")),
    };
    if phi.is_empty() {
        return Err(invalid("empty map"));
    }
    let k = phi.iter().map(|f| f.arity()).max().unwrap_or(0).max(1) as u32;
    let n = phi.len() as u32;
    let t = rational(&a.t)?;
    let c_prime = rational(&a.c_prime)?;
    let params = match (a.d, a.b, a.r, &a.epsilon) {
        (Some(d), Some(b), None, None) => AuxParams::unconstrained(k, n, a.e, d, b, &t, &c_prime)?,
        (None, None, Some(r), Some(eps)) => AuxParams::constrained(k, r, n, a.e, &rational(eps)?, &t, &c_prime)?,
        _ => return Err(invalid("give either --d and --b, or --r and --epsilon")),
    };
    let mut opts = BuildOptions {
        prec: a.prec,
        ..Default::default()
    };
    opts.siegel.mode = match a.siegel.as_str() {
        "exact" => SiegelMode::Exact,
        "reduced" => SiegelMode::Reduced,
        s => return Err(invalid(format!("unknown Siegel mode `{s}`"))),
    };
    opts.siegel.budget = a.budget;
    opts.selection = match a.select.trim() {
        "all" => CubeSelection::All,
        s => match s.strip_prefix("containing:") {
            Some(p) => CubeSelection::Containing(points(p)?),
            None => return Err(invalid(format!("unknown selection `{s}`"))),
        },
    };
    let build = build_aux_polynomials(&phi, &params, &opts)?;
    let mut table = Table::new(&["cube", "height", "sup_bound", "threshold", "pieces", "siegel_mode", "siegel_bounds_hold"]);
    for f in &build.polynomials {
        let idx: Vec<String> = f.index.iter().map(|i| i.to_string()).collect();
        table.push(vec![
            idx.join(" "),
            f.height.to_string(),
            fmt_f64(f.sup_bound.to_f64()),
            fmt_f64(build.constants.threshold),
            f.pieces.to_string(),
            format!("{:?}", f.siegel_mode).to_lowercase(),
            f.siegel_bounds_hold.to_string(),
        ]);
    }
    let results = serde_json::to_value(&build).map_err(|e| invalid(e.to_string()))?;
    Ok(Outcome::done(table, results))
}

fn count(a: &CountArgs) -> Result<Outcome, Fail> {
    let spec = read_spec(&a.spec)?;
    let grid = parse_grid(&a.t).map_err(invalid)?;
    let lambda = rational(&a.lambda)?;
    let theta = a.theta.as_deref().map(rational).transpose()?;
    let mut table = timed_columns(&["T", "lambda", "e", "N", "undecided"], a.common.timing);
    let mut records = Vec::new();
    let mut status = Status::Complete;
    for &t in &grid.values {
        let mut q = ApproxQuery::new(t, a.e, lambda.clone());
        q.exclusion_theta = theta.clone();
        q.keep_witnesses = a.witnesses;
        q.max_candidates = a.max_candidates;
        let start = Instant::now();
        let r = match count_approximants(&spec, &q) {
            Ok(r) => r,
            Err(e) if e.is_exhaustion() => {
                status = Status::Partial(format!("T = {t}: {e}"));
                break;
            }
            Err(e) => return Err(e.into()),
        };
        let mut row = vec![t.to_string(), lambda.to_string(), a.e.to_string(), r.n.to_string(), r.undecided.to_string()];
        if a.common.timing {
            row.push(format!("{:.3}", start.elapsed().as_secs_f64()));
        }
        table.push(row);
        records.push(r);
    }
    Ok(Outcome {
        table,
        results: json!({"records": records}),
        status,
        failed: false,
    })
}

fn csv_columns(text: &str, x: &str, y: &str) -> Result<Vec<(f64, f64)>, Fail> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    let header: Vec<&str> = lines.next().ok_or_else(|| invalid("empty CSV"))?.split(',').collect();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| invalid(format!("no column `{name}`")))
    };
    let (ix, iy) = (col(x)?, col(y)?);
    let mut out = Vec::new();
    for l in lines {
        let f: Vec<&str> = l.split(',').collect();
        let get = |i: usize| -> Result<f64, Fail> {
            let s = f.get(i).ok_or_else(|| invalid(format!("short row `{l}`")))?;
            s.trim().parse::<f64>().map_err(|_| invalid(format!("`{s}` is not a number")))
        };
        out.push((get(ix)?, get(iy)?));
    }
    Ok(out)
}

fn fit(a: &FitArgs) -> Result<Outcome, Fail> {
    let data = csv_columns(&read(&a.input)?, &a.x, &a.y)?;
    let pts: Vec<(f64, f64)> = data
        .into_iter()
        .filter(|&(x, y)| x > 0.0 && y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let f = fit_log_log(&pts)?;
    let mut table = Table::new(&["slope", "intercept", "stderr", "band_lo", "band_hi", "points"]);
    table.push(vec![
        format!("{:.6}", f.slope),
        format!("{:.6}", f.intercept),
        format!("{:.6}", f.stderr),
        format!("{:.6}", f.band.0),
        format!("{:.6}", f.band.1),
        f.points.to_string(),
    ]);
    Ok(Outcome::done(table, serde_json::to_value(&f).expect("plain data")))
}

fn loja(a: &LojaArgs) -> Result<Outcome, Fail> {
    let f = expr::parse(&a.f)?;
    let bx = parse_box(&a.window)?;
    let zero = match (&a.zero, &a.zero_points) {
        (Some(p), None) => read_spec(p)?,
        (None, Some(s)) => {
            let pts = points(s)?;
            SetSpec::empty(bx.dim()).with_points(pts)?
        }
        _ => return Err(invalid("give exactly one of --zero and --zero-points")),
    };
    let start = Instant::now();
    let est = loja_estimate(&f, &bx, &zero, a.samples, a.common.seed)?;
    let mut table = timed_columns(&["samples", "fit_points", "delta", "c", "violations"], a.common.timing);
    let mut row = vec![
        est.samples.to_string(),
        est.fit_points.to_string(),
        format!("{:.6}", est.delta),
        fmt_f64(est.c),
        est.violations.to_string(),
    ];
    if a.common.timing {
        row.push(format!("{:.3}", start.elapsed().as_secs_f64()));
    }
    table.push(row);
    Ok(Outcome::done(table, serde_json::to_value(&est).expect("plain data")))
}

fn parse_coeffs(s: &str) -> Result<Vec<Coeff>, Fail> {
    s.split(',').map(|c| Coeff::parse(c).map_err(Fail::from)).collect()
}

fn join_u64(v: &[u64]) -> String {
    v.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" ")
}

fn rootsum(a: &RootsumArgs) -> Result<Outcome, Fail> {
    let coeffs = parse_coeffs(&a.coeffs)?;
    let grid = parse_grid(&a.modulus).map_err(invalid)?;
    let opts = MinSumOptions {
        prune: !a.no_prune,
        budget: a.budget,
        prec: a.prec,
    };
    if let Some(tuple) = &a.tuple {
        let [modulus] = grid.values[..] else {
            return Err(invalid("--tuple needs a single N"));
        };
        let ks: Vec<u64> = tuple
            .split(',')
            .map(|s| s.trim().parse().map_err(|_| invalid(format!("`{s}` is not an exponent"))))
            .collect::<Result<_, _>>()?;
        let inst = RootSumInstance::new(modulus, coeffs)?;
        let zero = is_zero_exact(&inst, &ks)?;
        let subs = subsum_analysis(&inst, &ks)?;
        let mut table = Table::new(&["indices", "contains_a0"]);
        for s in &subs {
            let idx: Vec<String> = s.indices.iter().map(|i| i.to_string()).collect();
            table.push(vec![idx.join(" "), s.contains_a0.to_string()]);
        }
        return Ok(Outcome::done(table, json!({"vanishes": zero, "vanishing_subsums": subs})));
    }
    let threshold = match (&a.lambda, &a.c) {
        (Some(l), Some(c)) => Some((rational(l)?, rational(c)?)),
        (None, None) => None,
        _ => return Err(invalid("--lambda and --c go together")),
    };
    let first = if grid.primes { "p" } else { "N" };
    let mut cols = vec![first, "n", "value_lo", "value_hi", "argmin", "zeros_found"];
    if threshold.is_some() {
        cols.push("qualifies");
    }
    let mut table = timed_columns(&cols, a.common.timing);
    let mut results = Vec::new();
    let mut status = Status::Complete;
    let all_ones = coeffs.iter().all(|c| matches!(c, Coeff::Rational(q) if *q == 1));
    for &modulus in &grid.values {
        let inst = RootSumInstance::new(modulus, coeffs.clone())?;
        let start = Instant::now();
        let r = match min_sum(&inst, &opts) {
            Ok(r) => r,
            Err(Error::SearchExhausted(_)) => continue,
            Err(e) if e.is_exhaustion() => {
                status = Status::Partial(format!("N = {modulus}: {e}"));
                break;
            }
            Err(e) => return Err(e.into()),
        };
        let mut row = vec![
            modulus.to_string(),
            inst.n().to_string(),
            fmt_f64(r.value_lo()),
            fmt_f64(r.value_hi()),
            join_u64(&r.argmin),
            r.zeros_found.to_string(),
        ];
        let mut extra = json!({});
        if let Some((lambda, c)) = &threshold {
            let verdict = match below_threshold(&inst, &r, lambda, c, a.prec)? {
                Some(true) => "yes",
                Some(false) => "no",
                None => "undecided",
            };
            row.push(verdict.into());
            extra = json!({"qualifies": verdict});
        }
        if a.common.timing {
            row.push(format!("{:.3}", start.elapsed().as_secs_f64()));
        }
        table.push(row);
        let floor = if all_ones { Some(liouville_floor_check(&inst, &r)?) } else { None };
        results.push(json!({"result": r, "above_liouville_floor": floor, "scan": extra}));
    }
    Ok(Outcome {
        table,
        results: Value::Array(results),
        status,
        failed: false,
    })
}

fn examples(a: &ExamplesArgs) -> Result<Outcome, Fail> {
    if !EXAMPLES.contains(&a.name.as_str()) {
        return Err(invalid(format!("unknown example `{}`; known: {}", a.name, EXAMPLES.join(", "))));
    }
    let mut params = ExampleParams::default_for(&a.name);
    if let Some(t) = &a.t {
        params.t_grid = parse_grid(t).map_err(invalid)?.values;
    }
    if let Some(l) = &a.lambda {
        params.lambda = rational(l)?;
    }
    if let Some(m) = a.m_max {
        params.m_max = m;
    }
    params.keep_witnesses = a.witnesses;
    let rep = reproduce_example(&a.name, &params)?;
    let mut table = Table::new(&["T", "lambda", "e", "N", "undecided"]);
    for r in &rep.records {
        table.push(vec![r.t.to_string(), r.lambda.to_string(), r.e.to_string(), r.n.to_string(), r.undecided.to_string()]);
    }
    for c in &rep.checks {
        eprintln!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let failed = !rep.all_passed();
    let results = serde_json::to_value(&rep).map_err(|e| invalid(e.to_string()))?;
    Ok(Outcome {
        table,
        results,
        status: Status::Complete,
        failed,
    })
}

fn common(c: &Command) -> &Common {
    match c {
        Command::Heights(a) => &a.common,
        Command::Enumerate(a) => &a.common,
        Command::Auxpoly(a) => &a.common,
        Command::Count(a) => &a.common,
        Command::Fit(a) => &a.common,
        Command::Loja(a) => &a.common,
        Command::Rootsum(a) => &a.common,
        Command::Examples(a) => &a.common,
    }
}

fn dispatch(c: &Command) -> Result<Outcome, Fail> {
    match c {
        Command::Heights(a) => heights(a),
        Command::Enumerate(a) => enumerate(a),
        Command::Auxpoly(a) => auxpoly(a),
        Command::Count(a) => count(a),
        Command::Fit(a) => fit(a),
        Command::Loja(a) => loja(a),
        Command::Rootsum(a) => rootsum(a),
        Command::Examples(a) => examples(a),
    }
}

/// Runs one invocation and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cfg = match config::merge(&argv) {
        Ok(Some(cfg)) => cfg,
        Ok(None) => {
            return match Cli::try_parse_from(&argv) {
                Ok(_) => EXIT_OK,
                Err(e) => {
                    let _ = e.print();
                    if e.use_stderr() {
                        EXIT_INVALID
                    } else {
                        EXIT_OK
                    }
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    let cli = match Cli::try_parse_from(cfg.to_args("dioph")) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_INVALID;
        }
    };
    execute(&cfg, &cli.command)
}

fn execute(cfg: &RunConfig, cmd: &Command) -> i32 {
    let com = common(cmd);
    let sinks = Sinks {
        csv: com.csv.clone(),
        json: com.json.clone(),
    };
    let work = || dispatch(cmd);
    let outcome = match com.workers {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(work),
            Err(e) => Err(invalid(format!("cannot start {n} workers: {e}"))),
        },
        None => work(),
    };
    let (outcome, code) = match outcome {
        Ok(o) => {
            let code = match (&o.status, o.failed) {
                (Status::Partial(why), _) => {
                    eprintln!("error: {why}");
                    EXIT_EXHAUSTED
                }
                (_, true) => EXIT_INVALID,
                _ => EXIT_OK,
            };
            (o, code)
        }
        Err(Fail::Invalid(e)) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
        Err(Fail::Exhausted(e)) => {
            eprintln!("error: {e}");
            let o = Outcome {
                table: Table::new(&[]),
                results: Value::Null,
                status: Status::Partial(e),
                failed: false,
            };
            (o, EXIT_EXHAUSTED)
        }
    };
    log::debug!("{} finished with exit code {code}", cfg.subcommand);
    let csv = render_csv(cfg, &outcome.status, &outcome.table);
    let json = render_json(cfg, &outcome.status, outcome.results);
    if let Err(e) = sinks.write(&csv, &json) {
        eprintln!("error: cannot write output: {e}");
        return EXIT_INVALID;
    }
    code
}
