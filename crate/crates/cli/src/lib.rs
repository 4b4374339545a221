//! Command-line front end for `pqcalc`.
//!
//! [`run_command`] takes an argv (without the program name) and returns the
//! exit code and both output streams, so the binary and the tests share one
//! code path.

mod record;
pub mod suites;

use clap::{Args, Parser, Subcommand};
use pqcalc::calculus::{pq_derivative_iterated, pq_integral_finite_eval, pq_integral_improper_eval};
use pqcalc::laplace::{table_entries, transform_numeric_with, transform_table};
use pqcalc::solver::{
    first_order_transform, oscillator_transform, solve_first_order, solve_oscillator, verify_solution,
    PQCauchyProblem,
};
use pqcalc::special::{exp_big_eval, exp_small_eval, gamma_first_eval, gamma_second_eval, trig_eval_detailed, TrigKind};
use pqcalc::{Error, Evaluated, FunctionExpr, GridConfig, PqBase, SeriesTruncation, TransformKind};
use rayon::prelude::*;
use serde_json::Value;
use std::collections::BTreeMap;

pub use record::{num, Diagnostics, Format, Record};

/// Sample points used by `solve` for the residual report.
pub const RESIDUAL_POINTS: [f64; 4] = [0.1, 0.25, 0.5, 1.0];
pub const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "pqcalc", version, about = "(p,q)-calculus evaluator, transform checker and solver")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    #[arg(long, global = true, allow_hyphen_values = true)]
    p: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    q: Option<f64>,
    /// Series term cap.
    #[arg(long = "max-terms", global = true)]
    max_terms: Option<usize>,
    /// Relative series tolerance and grid smallness tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    jmin: Option<i32>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    jmax: Option<i32>,
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true)]
    csv: bool,
    #[arg(long, global = true)]
    text: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a special function: e, E, cos, sin, Cos, Sin, cosh, sinh, Cosh, Sinh.
    Eval {
        function: String,
        #[arg(long, allow_hyphen_values = true)]
        z: f64,
    },
    /// n-th (p,q)-derivative of an expression at x.
    Derivative {
        #[arg(long = "fn")]
        function: String,
        #[arg(long)]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
    },
    /// Grid integral over [0, upper] or [0, ∞).
    Integrate {
        #[arg(long = "fn")]
        function: String,
        #[arg(long, allow_hyphen_values = true, conflicts_with = "improper")]
        upper: Option<f64>,
        #[arg(long)]
        improper: bool,
    },
    /// Transform of an expression, numerically, by table, or both.
    Transform {
        #[arg(long = "fn")]
        function: String,
        #[arg(long, allow_hyphen_values = true)]
        s: f64,
        #[arg(long, default_value = "first")]
        kind: String,
        #[arg(long, default_value = "numeric")]
        mode: String,
    },
    /// Gamma function of the first or second kind.
    Gamma {
        #[arg(long)]
        kind: String,
        #[arg(long, allow_hyphen_values = true)]
        z: f64,
    },
    /// Run an identity suite.
    IdentityCheck {
        #[arg(long)]
        suite: String,
    },
    /// Solve a dilation equation by transforms and report residuals.
    Solve {
        #[arg(long)]
        problem: String,
        /// Comma-separated `key=value` pairs.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        params: String,
    },
    /// Print the closed-form transform table.
    Table {
        #[arg(long)]
        kind: String,
    },
    /// Transform values on a uniform grid of s.
    Sweep {
        #[arg(long = "fn")]
        function: String,
        #[arg(long = "s-from", allow_hyphen_values = true)]
        s_from: f64,
        #[arg(long = "s-to", allow_hyphen_values = true)]
        s_to: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value = "first")]
        kind: String,
    },
}

/// Failures carry the exit code they map to.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_non_convergence() {
            Failure {
                code: 2,
                message: format!("non-convergence: {e}\n{}", diagnostics_of(&e)),
            }
        } else {
            Failure {
                code: 1,
                message: format!("error: {e}"),
            }
        }
    }
}

fn diagnostics_of(e: &Error) -> String {
    match e {
        Error::Truncation {
            terms, partial, last_term, ..
        } => format!("terms_used = {terms}\npartial = {partial:e}\nlast_term = {last_term:e}"),
        Error::GridTail {
            tail,
            partial,
            last_term,
        } => format!("tail = {tail}\npartial = {partial:e}\nlast_term = {last_term:e}"),
        Error::TransformDivergence { tail, last_term } => format!("tail = {tail}\nlast_term = {last_term:e}"),
        Error::Divergence { terms, last_term } => format!("terms_used = {terms}\nlast_term = {last_term:e}"),
        _ => String::new(),
    }
}

fn domain(msg: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: format!("error: {}", msg.into()),
    }
}

type Res<T> = std::result::Result<T, Failure>;

/// Runs one invocation. `argv` excludes the program name.
pub fn run_command<S: AsRef<str>>(argv: &[S]) -> Outcome {
    let full = std::iter::once("pqcalc").chain(argv.iter().map(|s| s.as_ref()));
    let cli = match Cli::try_parse_from(full) {
        Ok(c) => c,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: rendered,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: 1,
                    stdout: String::new(),
                    stderr: rendered,
                },
            };
        }
    };
    match execute(&cli) {
        Ok((record, format, code)) => Outcome {
            code,
            stdout: record.render(format),
            stderr: String::new(),
        },
        Err(f) => Outcome {
            code: f.code,
            stdout: String::new(),
            stderr: format!("{}\n", f.message.trim_end()),
        },
    }
}

struct Ctx {
    base: Option<PqBase>,
    trunc: SeriesTruncation,
    grid: GridConfig,
    inputs: BTreeMap<String, Value>,
}

impl Ctx {
    fn base(&self) -> Res<PqBase> {
        self.base.ok_or_else(|| domain("--p and --q are required"))
    }

    fn grid_base(&self) -> Res<PqBase> {
        let b = self.base()?;
        b.require_grid()?;
        Ok(b)
    }

    fn put(&mut self, key: &str, v: Value) {
        self.inputs.insert(key.to_string(), v);
    }

    fn record(&self, command: &str, value: Value, diagnostics: Option<Diagnostics>, text: String) -> Record {
        Record {
            command: command.to_string(),
            inputs: self.inputs.clone(),
            value,
            diagnostics,
            rows: None,
            text,
        }
    }
}

fn format_of(g: &Global) -> Res<Format> {
    match (g.json, g.csv, g.text) {
        (false, false, _) => Ok(Format::Text),
        (true, false, false) => Ok(Format::Json),
        (false, true, false) => Ok(Format::Csv),
        _ => Err(domain("choose at most one of --json, --csv, --text")),
    }
}

fn context(g: &Global) -> Res<Ctx> {
    let mut inputs = BTreeMap::new();
    let base = match (g.p, g.q) {
        (Some(p), Some(q)) => {
            inputs.insert("p".into(), num(p));
            inputs.insert("q".into(), num(q));
            Some(PqBase::new(p, q)?)
        }
        (None, None) => None,
        _ => return Err(domain("--p and --q must be given together")),
    };
    let mut trunc = SeriesTruncation::default();
    let mut grid = GridConfig::default();
    if let Some(m) = g.max_terms {
        trunc.max_terms = m;
        inputs.insert("max-terms".into(), Value::from(m));
    }
    if let Some(t) = g.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(domain(format!("--tol must be positive, got {t}")));
        }
        trunc.rel_tol = t;
        grid.abs_tol = t;
        inputs.insert("tol".into(), num(t));
    }
    if let Some(j) = g.jmin {
        grid.j_min = j;
        inputs.insert("jmin".into(), Value::from(j));
    }
    if let Some(j) = g.jmax {
        grid.j_max = j;
        inputs.insert("jmax".into(), Value::from(j));
    }
    trunc.validate()?;
    grid.validate()?;
    Ok(Ctx {
        base,
        trunc,
        grid,
        inputs,
    })
}

fn parse_kind(s: &str) -> Res<TransformKind> {
    Ok(s.parse::<TransformKind>()?)
}

fn kind_name(k: TransformKind) -> &'static str {
    match k {
        TransformKind::FirstKind => "first",
        TransformKind::SecondKind => "second",
    }
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn execute(cli: &Cli) -> Res<(Record, Format, i32)> {
    let format = format_of(&cli.global)?;
    let mut ctx = context(&cli.global)?;
    let mut code = 0;
    let record = match &cli.command {
        Command::Eval { function, z } => {
            ctx.put("fn", Value::String(function.clone()));
            ctx.put("z", num(*z));
            let base = ctx.base()?;
            let ev = eval_special(function, &base, *z, &ctx.trunc)?;
            let text = format!("{function}({}) = {}\n", z, fmt17(ev.value));
            ctx.record("eval", num(ev.value), Some((&ev).into()), text)
        }
        Command::Derivative { function, n, x } => {
            ctx.put("fn", Value::String(function.clone()));
            ctx.put("n", Value::from(*n));
            ctx.put("x", num(*x));
            let base = ctx.base()?;
            let e: FunctionExpr = function.parse()?;
            let v = pq_derivative_iterated(&e.bind(base, ctx.trunc), &base, *n, *x)?;
            let text = format!("D^{n} [{e}] at x = {x}: {}\n", fmt17(v));
            ctx.record("derivative", num(v), Some(Diagnostics::closed(*n as usize + 1)), text)
        }
        Command::Integrate {
            function,
            upper,
            improper,
        } => {
            ctx.put("fn", Value::String(function.clone()));
            let base = ctx.grid_base()?;
            let e: FunctionExpr = function.parse()?;
            let f = e.bind(base, ctx.trunc);
            let (ev, range) = match (upper, improper) {
                (Some(a), false) => {
                    ctx.put("upper", num(*a));
                    (pq_integral_finite_eval(&f, &base, *a, &ctx.grid)?, format!("[0, {a}]"))
                }
                (None, true) => {
                    ctx.put("improper", Value::Bool(true));
                    (pq_integral_improper_eval(&f, &base, &ctx.grid)?, "[0, inf)".to_string())
                }
                _ => return Err(domain("give exactly one of --upper or --improper")),
            };
            let text = format!("integral of {e} over {range} = {}\n", fmt17(ev.value));
            ctx.record("integrate", num(ev.value), Some((&ev).into()), text)
        }
        Command::Transform {
            function,
            s,
            kind,
            mode,
        } => {
            ctx.put("fn", Value::String(function.clone()));
            ctx.put("s", num(*s));
            let k = parse_kind(kind)?;
            ctx.put("kind", Value::String(kind_name(k).into()));
            ctx.put("mode", Value::String(mode.clone()));
            let base = ctx.base()?;
            let e: FunctionExpr = function.parse()?;
            transform_record(&ctx, &e, &base, *s, k, mode)?
        }
        Command::Gamma { kind, z } => {
            let k = parse_kind(kind)?;
            ctx.put("kind", Value::String(kind_name(k).into()));
            ctx.put("z", num(*z));
            let base = ctx.grid_base()?;
            let ev = match k {
                TransformKind::FirstKind => gamma_first_eval(&base, *z, &ctx.grid, &ctx.trunc)?,
                TransformKind::SecondKind => gamma_second_eval(&base, *z, &ctx.grid, &ctx.trunc)?,
            };
            let name = if k == TransformKind::FirstKind { "Gamma" } else { "gamma" };
            let text = format!("{name}({z}) = {}\n", fmt17(ev.value));
            ctx.record("gamma", num(ev.value), Some((&ev).into()), text)
        }
        Command::IdentityCheck { suite } => {
            ctx.put("suite", Value::String(suite.clone()));
            let base = ctx.base()?;
            let rep = suites::run(suite, &base, &ctx.grid, &ctx.trunc)?;
            if !rep.passed() {
                code = 1;
            }
            let mut m = serde_json::Map::new();
            m.insert("checks".into(), Value::from(rep.checks));
            m.insert("failures".into(), Value::from(rep.failures));
            m.insert("max_deviation".into(), num(rep.max_deviation));
            m.insert("passed".into(), Value::Bool(rep.passed()));
            m.insert("tolerance".into(), num(rep.tolerance));
            m.insert("worst_ratio".into(), num(rep.worst_ratio));
            let text = format!(
                "suite {suite}: {} ({} checks, {} failures)\nmax deviation = {:e} (tolerance {:e})\n",
                if rep.passed() { "PASS" } else { "FAIL" },
                rep.checks,
                rep.failures,
                rep.max_deviation,
                rep.tolerance
            );
            ctx.record("identity-check", Value::Object(m), None, text)
        }
        Command::Solve { problem, params } => {
            ctx.put("problem", Value::String(problem.clone()));
            ctx.put("params", Value::String(params.clone()));
            let base = ctx.base()?;
            let (rec, ok) = solve_record(&ctx, problem, params, &base)?;
            if !ok {
                code = 1;
            }
            rec
        }
        Command::Table { kind } => {
            let k = parse_kind(kind)?;
            ctx.put("kind", Value::String(kind_name(k).into()));
            let entries = table_entries(k);
            let mut text = format!("{} kind transform table\n", kind_name(k));
            let mut rows = vec![vec!["function".to_string(), "transform".into(), "validity".into()]];
            let mut arr = Vec::new();
            for e in &entries {
                text.push_str(&format!("  {:<12} -> {:<56} for {}\n", e.function, e.transform, e.validity));
                rows.push(vec![e.function.into(), e.transform.into(), e.validity.into()]);
                let mut m = serde_json::Map::new();
                m.insert("function".into(), Value::String(e.function.into()));
                m.insert("transform".into(), Value::String(e.transform.into()));
                m.insert("validity".into(), Value::String(e.validity.into()));
                arr.push(Value::Object(m));
            }
            let mut r = ctx.record("table", Value::Array(arr), None, text);
            r.rows = Some(rows);
            r
        }
        Command::Sweep {
            function,
            s_from,
            s_to,
            steps,
            kind,
        } => {
            ctx.put("fn", Value::String(function.clone()));
            ctx.put("s-from", num(*s_from));
            ctx.put("s-to", num(*s_to));
            ctx.put("steps", Value::from(*steps));
            let k = parse_kind(kind)?;
            ctx.put("kind", Value::String(kind_name(k).into()));
            let base = ctx.grid_base()?;
            let e: FunctionExpr = function.parse()?;
            sweep_record(&ctx, &e, &base, k, *s_from, *s_to, *steps)?
        }
    };
    Ok((record, format, code))
}

fn eval_special(name: &str, base: &PqBase, z: f64, trunc: &SeriesTruncation) -> Res<Evaluated<f64>> {
    let trig = |k| trig_eval_detailed(k, base, z, trunc);
    Ok(match name {
        "e" => exp_small_eval(base, z, trunc)?,
        "E" => exp_big_eval(base, z, trunc)?,
        "cos" => trig(TrigKind::CosSmall)?,
        "sin" => trig(TrigKind::SinSmall)?,
        "Cos" => trig(TrigKind::CosBig)?,
        "Sin" => trig(TrigKind::SinBig)?,
        "cosh" => trig(TrigKind::CoshSmall)?,
        "sinh" => trig(TrigKind::SinhSmall)?,
        "Cosh" => trig(TrigKind::CoshBig)?,
        "Sinh" => trig(TrigKind::SinhBig)?,
        other => {
            return Err(domain(format!(
                "unknown function '{other}' (expected e, E, cos, sin, Cos, Sin, cosh, sinh, Cosh, Sinh)"
            )))
        }
    })
}

fn transform_record(ctx: &Ctx, e: &FunctionExpr, base: &PqBase, s: f64, k: TransformKind, mode: &str) -> Res<Record> {
    let numeric = || -> Res<Evaluated<f64>> {
        base.require_grid()?;
        Ok(transform_numeric_with(&e.bind(*base, ctx.trunc), base, s, k, &ctx.grid, &ctx.trunc)?)
    };
    let table = || -> Res<(String, f64)> {
        let closed = transform_table(e, base, k)?;
        let v = closed.eval_with(base, s, &ctx.trunc)?;
        Ok((closed.to_string(), v))
    };
    match mode {
        "numeric" => {
            let ev = numeric()?;
            let text = format!("L_{}{{{e}}}({s}) = {} (numeric)\n", kind_name(k), fmt17(ev.value));
            Ok(ctx.record("transform", num(ev.value), Some((&ev).into()), text))
        }
        "table" => {
            let (form, v) = table()?;
            let text = format!("L_{}{{{e}}}(s) = {form}\nat s = {s}: {} (table)\n", kind_name(k), fmt17(v));
            Ok(ctx.record("transform", num(v), Some(Diagnostics::closed(0)), text))
        }
        "both" => {
            let (form, t) = table()?;
            let ev = numeric()?;
            let gap = (ev.value - t).abs() / t.abs();
            let mut m = serde_json::Map::new();
            m.insert("gap".into(), num(gap));
            m.insert("numeric".into(), num(ev.value));
            m.insert("table".into(), num(t));
            let text = format!(
                "L_{}{{{e}}}(s) = {form}\ntable   = {}\nnumeric = {}\ngap     = {:e}\n",
                kind_name(k),
                fmt17(t),
                fmt17(ev.value),
                gap
            );
            Ok(ctx.record("transform", Value::Object(m), Some((&ev).into()), text))
        }
        other => Err(domain(format!("unknown mode '{other}' (expected numeric, table or both)"))),
    }
}

fn parse_params(params: &str) -> Res<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for item in params.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| domain(format!("parameter '{item}' is not key=value")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| domain(format!("parameter '{}' has non-numeric value '{}'", k.trim(), v.trim())))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

fn take(params: &mut BTreeMap<String, f64>, key: &str, default: Option<f64>) -> Res<f64> {
    match params.remove(key).or(default) {
        Some(v) => Ok(v),
        None => Err(domain(format!("missing parameter '{key}'"))),
    }
}

fn solve_record(ctx: &Ctx, problem: &str, params: &str, base: &PqBase) -> Res<(Record, bool)> {
    let mut kv = parse_params(params)?;
    let (cauchy, transform, solution) = match problem {
        "first-order" => {
            let c = take(&mut kv, "c", None)?;
            let f0 = take(&mut kv, "f0", Some(1.0))?;
            let pr = PQCauchyProblem::homogeneous(c, f0);
            (pr.clone(), first_order_transform(&pr, base)?, solve_first_order(&pr, base)?)
        }
        "resonant" => {
            let lambda = take(&mut kv, "lambda", None)?;
            let h0 = take(&mut kv, "h0", Some(0.0))?;
            let pr = PQCauchyProblem::resonant(lambda, h0, base);
            (pr.clone(), first_order_transform(&pr, base)?, solve_first_order(&pr, base)?)
        }
        "oscillator" => {
            let omega = take(&mut kv, "omega", None)?;
            let a = take(&mut kv, "A", None)?;
            let b = take(&mut kv, "B", None)?;
            (
                PQCauchyProblem::oscillator(omega, a, b),
                oscillator_transform(omega, a, b, base)?,
                solve_oscillator(omega, a, b, base)?,
            )
        }
        other => {
            return Err(domain(format!(
                "unknown problem '{other}' (expected first-order, resonant or oscillator)"
            )))
        }
    };
    if let Some(extra) = kv.keys().next() {
        return Err(domain(format!("unexpected parameter '{extra}' for {problem}")));
    }
    let report = verify_solution(&cauchy, &solution, base, &RESIDUAL_POINTS, RESIDUAL_TOL)?;
    let mut res = serde_json::Map::new();
    res.insert("initial_value_error".into(), num(report.initial_value_error));
    if let Some(d) = report.initial_derivative_error {
        res.insert("initial_derivative_error".into(), num(d));
    }
    res.insert("max_abs_residual".into(), num(report.max_abs_residual));
    res.insert("passed".into(), Value::Bool(report.passed));
    res.insert("per_point".into(), Value::Array(report.per_point.iter().map(|v| num(*v)).collect()));
    res.insert(
        "points".into(),
        Value::Array(report.sample_points.iter().map(|v| num(*v)).collect()),
    );
    let mut m = serde_json::Map::new();
    m.insert("residual".into(), Value::Object(res));
    m.insert("solution".into(), Value::String(solution.to_string()));
    m.insert("transform".into(), Value::String(transform.to_string()));
    let mut text = format!("F(s) = {transform}\nf(t) = {solution}\nresiduals:\n");
    for (t, r) in report.sample_points.iter().zip(&report.per_point) {
        text.push_str(&format!("  t = {t}: {r:e}\n"));
    }
    text.push_str(&format!(
        "max |residual| = {:e} ({})\n",
        report.max_abs_residual,
        if report.passed { "PASS" } else { "FAIL" }
    ));
    Ok((ctx.record("solve", Value::Object(m), None, text), report.passed))
}

fn sweep_record(
    ctx: &Ctx,
    e: &FunctionExpr,
    base: &PqBase,
    k: TransformKind,
    from: f64,
    to: f64,
    steps: usize,
) -> Res<Record> {
    if steps == 0 {
        return Err(domain("--steps must be at least 1"));
    }
    let points: Vec<f64> = if steps == 1 {
        vec![from]
    } else {
        (0..steps)
            .map(|i| from + (to - from) * i as f64 / (steps - 1) as f64)
            .collect()
    };
    let f = e.bind(*base, ctx.trunc);
    // rayon's collect keeps input order
    let results: Vec<Evaluated<f64>> = points
        .par_iter()
        .map(|&s| transform_numeric_with(&f, base, s, k, &ctx.grid, &ctx.trunc))
        .collect::<pqcalc::Result<_>>()?;
    let mut rows = vec![vec![
        "s".to_string(),
        "value".into(),
        "terms_used".into(),
        "tail_estimate".into(),
    ]];
    let mut arr = Vec::new();
    let mut text = format!("{:>24} {:>24} {:>10} {:>24}\n", "s", "value", "terms_used", "tail_estimate");
    for (s, ev) in points.iter().zip(&results) {
        rows.push(vec![fmt17(*s), fmt17(ev.value), ev.terms.to_string(), fmt17(ev.tail)]);
        text.push_str(&format!(
            "{:>24} {:>24} {:>10} {:>24}\n",
            fmt17(*s),
            fmt17(ev.value),
            ev.terms,
            fmt17(ev.tail)
        ));
        let mut m = serde_json::Map::new();
        m.insert("s".into(), num(*s));
        m.insert("tail_estimate".into(), num(ev.tail));
        m.insert("terms_used".into(), Value::from(ev.terms));
        m.insert("value".into(), num(ev.value));
        arr.push(Value::Object(m));
    }
    let mut r = ctx.record("sweep", Value::Array(arr), None, text);
    r.rows = Some(rows);
    Ok(r)
}

/// Rebuilds an argv from a JSON record's `command` and `inputs`, so that
/// running it again reproduces the record.
pub fn argv_from_record(record: &Value) -> Option<Vec<String>> {
    let command = record.get("command")?.as_str()?.to_string();
    let inputs = record.get("inputs")?.as_object()?;
    let mut argv = vec![command.clone()];
    for (key, v) in inputs {
        if command == "eval" && key == "fn" {
            argv.insert(1, v.as_str()?.to_string());
            continue;
        }
        match v {
            Value::Bool(true) => argv.push(format!("--{key}")),
            Value::Bool(false) => {}
            Value::String(s) => {
                argv.push(format!("--{key}"));
                argv.push(s.clone());
            }
            Value::Number(n) => {
                argv.push(format!("--{key}"));
                argv.push(n.to_string());
            }
            _ => return None,
        }
    }
    argv.push("--json".into());
    Some(argv)
}
