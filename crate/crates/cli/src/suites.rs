//! Identity suites for `identity-check`.

use pqcalc::arith::pq_factorial;
use pqcalc::calculus::pq_derivative;
use pqcalc::laplace::{transform_numeric_with, transform_table};
use pqcalc::special::{exp_big, exp_radius, exp_small, gamma_first, gamma_second, gamma_step, trig_eval, TrigKind};
use pqcalc::{Error, FunctionExpr, GridConfig, PqBase, Result, SeriesTruncation, TransformKind};

pub const SUITES: [&str; 6] = [
    "exp-reciprocal",
    "trig",
    "hyperbolic",
    "gamma-recurrence",
    "product-rules",
    "transform-oracle",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub checks: usize,
    pub failures: usize,
    /// Largest deviation divided by its own tolerance.
    pub worst_ratio: f64,
    pub max_deviation: f64,
    /// The loosest tolerance used.
    pub tolerance: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.checks > 0
    }
}

#[derive(Default)]
struct Acc {
    checks: usize,
    failures: usize,
    worst_ratio: f64,
    max_deviation: f64,
    tolerance: f64,
}

impl Acc {
    fn check(&mut self, deviation: f64, tol: f64) {
        self.checks += 1;
        // NaN counts as a failure
        if !(deviation <= tol) {
            self.failures += 1;
        }
        let d = if deviation.is_nan() { f64::INFINITY } else { deviation };
        self.max_deviation = self.max_deviation.max(d);
        self.worst_ratio = self.worst_ratio.max(d / tol);
        self.tolerance = self.tolerance.max(tol);
    }

    fn finish(self) -> SuiteReport {
        SuiteReport {
            checks: self.checks,
            failures: self.failures,
            worst_ratio: self.worst_ratio,
            max_deviation: self.max_deviation,
            tolerance: self.tolerance,
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Points of `[-2, 2]` at spacing `step` inside the small-exponential disc.
fn sample_points(base: &PqBase, step: f64) -> Vec<f64> {
    let radius = exp_radius(base, false);
    let n = (4.0 / step).round() as i32;
    (0..=n)
        .map(|i| -2.0 + step * i as f64)
        .filter(|z| z.abs() < 0.95 * radius)
        .collect()
}

pub fn run(name: &str, base: &PqBase, grid: &GridConfig, trunc: &SeriesTruncation) -> Result<SuiteReport> {
    let mut acc = Acc::default();
    match name {
        "exp-reciprocal" => {
            for z in sample_points(base, 0.05) {
                let v = exp_small(base, z, trunc)? * exp_big(base, -z, trunc)?;
                acc.check((v - 1.0).abs(), 1e-10);
            }
        }
        "trig" | "hyperbolic" => {
            use TrigKind::*;
            let (c, s, cb, sb, sign) = if name == "trig" {
                (CosSmall, SinSmall, CosBig, SinBig, 1.0)
            } else {
                (CoshSmall, SinhSmall, CoshBig, SinhBig, -1.0)
            };
            for z in sample_points(base, 0.1) {
                let t = |k| trig_eval(k, base, z, trunc);
                let (c, s, cb, sb) = (t(c)?, t(s)?, t(cb)?, t(sb)?);
                acc.check((c * cb + sign * s * sb - 1.0).abs(), 1e-10);
                acc.check((s * cb - c * sb).abs(), 1e-10);
            }
        }
        "gamma-recurrence" => {
            base.require_grid()?;
            for n in 0..=6u32 {
                let g = gamma_first(base, n as f64 + 1.0, grid, trunc)?;
                acc.check(rel(g, pq_factorial(base, n)?), 1e-7);
            }
            for z in [0.5, 1.5, 2.5] {
                let step = gamma_step(base, z)?;
                let lhs = gamma_first(base, z + 1.0, grid, trunc)?;
                acc.check(rel(lhs, step * gamma_first(base, z, grid, trunc)?), 1e-6);
                let lhs = gamma_second(base, z + 1.0, grid, trunc)?;
                acc.check(rel(lhs, step * gamma_second(base, z, grid, trunc)?), 1e-6);
            }
        }
        "product-rules" => {
            let (p, q) = (base.p(), base.q());
            let f = |x: f64| x * x + 1.0;
            let g = |x: f64| 2.0 * x * x * x - x + 0.5;
            let fg = |x: f64| f(x) * g(x);
            let quot = |x: f64| f(x) / g(x);
            for x in [0.3, 0.7, 1.1, 1.9] {
                let (df, dg) = (pq_derivative(&f, base, x)?, pq_derivative(&g, base, x)?);
                let d = pq_derivative(&fg, base, x)?;
                acc.check(rel(f(p * x) * dg + g(q * x) * df, d), 1e-12);
                acc.check(rel(f(q * x) * dg + g(p * x) * df, d), 1e-12);
                let dq = pq_derivative(&quot, base, x)?;
                let rule = (g(q * x) * df - f(q * x) * dg) / (g(p * x) * g(q * x));
                acc.check(rel(rule, dq), 1e-12);
            }
        }
        "transform-oracle" => {
            base.require_grid()?;
            let first = [
                "1", "t", "t^3", "t^6", "t^0.5", "e(0.3t)", "E(0.5t)", "cos(0.5t)", "sin(0.3t)", "cosh(0.3t)",
                "sinh(0.5t)", "t^2*e(0.3t)",
            ];
            let second = [
                "1", "t", "t^3", "t^6", "t^1.5", "E(0.3t)", "Cos(0.5t)", "Sin(0.3t)", "Cosh(0.3t)", "Sinh(0.5t)",
                "t^2*E(0.3t)",
            ];
            for (kind, list) in [(TransformKind::FirstKind, &first[..]), (TransformKind::SecondKind, &second[..])] {
                for src in list {
                    let e: FunctionExpr = src.parse()?;
                    let closed = transform_table(&e, base, kind)?;
                    let threshold = closed.s_min(base);
                    let s = if threshold > 0.0 { 2.0 * threshold } else { 1.5 };
                    let t = closed.eval_with(base, s, trunc)?;
                    let n = transform_numeric_with(&e.bind(*base, *trunc), base, s, kind, grid, trunc)?.value;
                    let tol = if matches!(e, FunctionExpr::Power(_)) { 1e-6 } else { 1e-7 };
                    acc.check(rel(n, t), tol);
                }
            }
        }
        other => {
            return Err(Error::Domain(format!(
                "unknown suite '{other}' (expected one of {})",
                SUITES.join(", ")
            )))
        }
    }
    Ok(acc.finish())
}
