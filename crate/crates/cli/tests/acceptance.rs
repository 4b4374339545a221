//! One pass/fail line per acceptance criterion. Run with `--nocapture` to
//! see the report.

use pqcalc::arith::{pochhammer_inf, pq_factorial, pq_number};
use pqcalc::calculus::{
    deriv_reciprocal_closed, pq_derivative, pq_derivative_iterated, pq_integral_finite, pq_integral_improper,
    pq_integral_interval,
};
use pqcalc::laplace::{
    derivative_of_transform, monomial_transform_from_derivative_rule, scaling_apply, transform_numeric,
    transform_of_derivative, transform_table, LinearFactor, PqMonomial, RationalExpr, TransformExpr,
};
use pqcalc::solver::{first_order_transform, solve_first_order, solve_oscillator, verify_solution, PQCauchyProblem};
use pqcalc::special::{
    exp_big, exp_small, first_kind_moment, gamma_first, gamma_first_integral, gamma_second, gamma_step,
    hypergeom_phi, HypergeomSpec,
};
use pqcalc::{Fallible, FunctionExpr, GridConfig, PqBase, SeriesTruncation, TransformKind};
use pqcalc_cli::{argv_from_record, run_command, suites};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use serde_json::Value;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;

use FunctionExpr::*;
use TransformKind::*;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn tr() -> SeriesTruncation {
    SeriesTruncation::default()
}

fn grid() -> GridConfig {
    GridConfig::default()
}

fn bases() -> Vec<PqBase> {
    [1.1, 1.2, 1.5].iter().map(|&p| PqBase::new(p, 0.6 * p).unwrap()).collect()
}

fn numeric(e: &FunctionExpr, base: &PqBase, s: f64, kind: TransformKind) -> Result<f64, String> {
    transform_numeric(&e.bind(*base, tr()), base, s, kind, &grid()).map_err(|err| format!("{kind} {e} s={s}: {err}"))
}

fn table(e: &FunctionExpr, base: &PqBase, s: f64, kind: TransformKind) -> Result<f64, String> {
    transform_table(e, base, kind)
        .and_then(|f| f.eval(base, s))
        .map_err(|err| format!("{kind} {e} s={s}: {err}"))
}

fn oracle_cases(kind: TransformKind, base: &PqBase) -> Vec<(FunctionExpr, f64, f64)> {
    let (p, q) = (base.p(), base.q());
    let mut out = Vec::new();
    let unbounded = |out: &mut Vec<_>, e: FunctionExpr, tol: f64| {
        for s in [1.5, 2.0] {
            out.push((e.clone(), s, tol));
        }
    };
    unbounded(&mut out, Const(1.0), 1e-7);
    for n in 1..=6 {
        unbounded(&mut out, Monomial(n), 1e-7);
    }
    for alpha in [0.5, 1.5] {
        unbounded(&mut out, Power(alpha), 1e-6);
    }
    for a in [0.3, 0.5] {
        match kind {
            FirstKind => {
                unbounded(&mut out, ExpBig(a), 1e-7);
                let s = 2.0 * a / p;
                for e in [ExpSmall(a), Cos(a), Sin(a), Cosh(a), Sinh(a)] {
                    out.push((e, s, 1e-7));
                }
                for n in 1..=6 {
                    out.push((MonomialTimesExpSmall(n, a), s, 1e-7));
                }
            }
            SecondKind => {
                let s = 1.5 * a / q;
                for e in [ExpBig(a), BigCos(a), BigSin(a), BigCosh(a), BigSinh(a)] {
                    out.push((e, s, 1e-7));
                }
                for n in 1..=6 {
                    let threshold = a * p.powi(n as i32) / q.powi(n as i32 + 1);
                    out.push((MonomialTimesExpBig(n, a), 1.5 * threshold, 1e-7));
                }
            }
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let mut count = 0;
    let mut worst: f64 = 0.0;
    for base in bases() {
        for kind in [FirstKind, SecondKind] {
            for (e, s, tol) in oracle_cases(kind, &base) {
                let t = table(&e, &base, s, kind)?;
                let n = numeric(&e, &base, s, kind)?;
                let d = rel(n, t);
                ensure(d < tol, || format!("p={} {kind} {e} s={s}: rel {d:e} >= {tol:e}", base.p()))?;
                worst = worst.max(d);
                count += 1;
            }
        }
    }
    ensure(count >= 150, || format!("only {count} pairs"))?;
    Ok(format!("{count} (expr, s) pairs, max rel err {worst:.1e}"))
}

fn criterion_2() -> Outcome {
    let g = grid();
    let mut worst: f64 = 0.0;
    for base in bases() {
        for n in 0..=6u32 {
            let f = pq_factorial(&base, n).map_err(|e| e.to_string())?;
            let z = n as f64 + 1.0;
            let integral = gamma_first_integral(&base, z, &g, &tr()).map_err(|e| e.to_string())?.value;
            let d = rel(integral, f);
            ensure(d < 1e-7, || format!("integral route p={} n={n}: {d:e}", base.p()))?;
            worst = worst.max(d);
            let product = gamma_first(&base, z, &g, &tr()).map_err(|e| e.to_string())?;
            ensure(rel(product, f) <= 4.0 * f64::EPSILON * n.max(1) as f64, || {
                format!("product route p={} n={n}: {product} vs {f}", base.p())
            })?;
        }
        for z in [0.5, 1.5, 2.5] {
            let step = gamma_step(&base, z).map_err(|e| e.to_string())?;
            let first = gamma_first(&base, z + 1.0, &g, &tr()).unwrap() / gamma_first(&base, z, &g, &tr()).unwrap();
            let second = gamma_second(&base, z + 1.0, &g, &tr()).unwrap() / gamma_second(&base, z, &g, &tr()).unwrap();
            for (name, ratio) in [("Gamma", first), ("gamma", second)] {
                let d = rel(ratio, step);
                ensure(d < 1e-6, || format!("{name} recurrence p={} z={z}: {d:e}", base.p()))?;
                worst = worst.max(d);
            }
        }
    }
    // dropping the p^{z(z-1)/2} prefactor: off by p^{n-1}
    let base = PqBase::new(1.2, 0.8).unwrap();
    let p = base.p();
    let uncorrected = |n: f64| p.powf((n - 1.0) * (n - 2.0) / 2.0) * first_kind_moment(&base, n, &g, &tr()).unwrap().value;
    for n in 2..=6u32 {
        let expected = pq_factorial(&base, n - 1).unwrap();
        let got = uncorrected(n as f64);
        ensure(rel(got * p.powi(n as i32 - 1), expected) < 1e-7, || format!("regression n={n}"))?;
        ensure((got / expected - 1.0).abs() > 0.1, || format!("uncorrected form agrees at n={n}"))?;
        let ratio = uncorrected(n as f64 + 1.0) / (pq_number(&base, n) * got);
        ensure(rel(ratio, 1.0 / p) < 1e-7, || format!("regression ratio n={n}"))?;
    }
    Ok(format!("factorials, recurrences and prefactor regression, max rel err {worst:.1e}"))
}

fn criterion_3() -> Outcome {
    let base = PqBase::new(1.2, 0.8).unwrap();
    let (p, q) = (base.p(), base.q());
    let g = grid();
    let mut parts = Vec::new();
    for name in ["exp-reciprocal", "trig", "hyperbolic", "product-rules"] {
        let rep = suites::run(name, &base, &g, &tr()).map_err(|e| format!("{name}: {e}"))?;
        ensure(rep.passed(), || format!("{name}: {rep:?}"))?;
        parts.push(format!("{name} {:.0e}", rep.max_deviation));
    }
    // integration by parts on [0, 1]
    let f = |t: f64| t;
    let h = |t: f64| t * t;
    let lhs = pq_integral_interval(&|x: f64| f(p * x) * pq_derivative(&h, &base, x).unwrap(), &base, 0.0, 1.0, &g).unwrap();
    let rest = pq_integral_interval(&|x: f64| h(q * x) * pq_derivative(&f, &base, x).unwrap(), &base, 0.0, 1.0, &g).unwrap();
    let rhs = f(1.0) * h(1.0) - rest;
    ensure((lhs - rhs).abs() < 1e-9, || format!("by parts: {lhs} vs {rhs}"))?;
    // change of variable
    let small = |t: f64| exp_small(&base, -p * t, &tr()).unwrap();
    let whole = pq_integral_improper(&small, &base, &g).unwrap();
    let upper = p / (p - q);
    let big = |t: f64| exp_big(&base, -q * t, &tr()).unwrap();
    let whole_big = pq_integral_finite(&big, &base, upper, &g).unwrap();
    for alpha in [0.5, 2.0] {
        let scaled = pq_integral_improper(&|t: f64| small(alpha * t), &base, &g).unwrap();
        ensure(rel(scaled, whole / alpha) < 1e-9, || format!("change of variable alpha={alpha}"))?;
        let scaled = pq_integral_finite(&|t: f64| big(alpha * t), &base, upper / alpha, &g).unwrap();
        ensure(rel(scaled, whole_big / alpha) < 1e-9, || format!("change of variable (E) alpha={alpha}"))?;
    }
    parts.push("parts/change-of-variable ok".into());
    // binomial theorem and its product corollary
    let phi = |a: f64, c: f64, z: f64| hypergeom_phi(&HypergeomSpec::new(vec![(a, c)], vec![]), &base, z, &tr()).unwrap();
    let z = 0.4;
    let product: f64 = pochhammer_inf(base.r(), 0.5 * z / p, &tr()).unwrap() / pochhammer_inf::<f64>(base.r(), z / p, &tr()).unwrap();
    ensure(rel(phi(1.0, 0.5, z), product) < 1e-10, || "binomial theorem".into())?;
    let lhs = phi(1.0, 0.6, 0.3) * phi(0.6, 0.2, 0.3);
    ensure(rel(lhs, phi(1.0, 0.2, 0.3)) < 1e-10, || "binomial corollary".into())?;
    parts.push("binomial ok".into());
    Ok(parts.join(", "))
}

fn criterion_4() -> Outcome {
    let mut worst: f64 = 0.0;
    for base in [PqBase::new(1.2, 0.8).unwrap(), PqBase::new(1.5, 0.9).unwrap()] {
        for a in [1.0, 2.0] {
            for b in [0.0, 1.0] {
                for x in [0.5, 1.0, 2.0] {
                    let f = move |t: f64| 1.0 / (a * t + b);
                    for n in 0..=6 {
                        let d = rel(
                            pq_derivative_iterated(&f, &base, n, x).unwrap(),
                            deriv_reciprocal_closed(&base, a, b, n, x).unwrap(),
                        );
                        ensure(d < 1e-10, || format!("1/({a}x+{b}) n={n} x={x}: {d:e}"))?;
                        worst = worst.max(d);
                    }
                }
            }
        }
    }
    let base = PqBase::new(1.2, 0.8).unwrap();
    let (p, q) = (base.p(), base.q());
    for lambda in [0.5, -1.3] {
        for x in [0.3, 0.7] {
            let small = |t: f64| exp_small(&base, lambda * t, &tr()).unwrap();
            let big = |t: f64| exp_big(&base, lambda * t, &tr()).unwrap();
            for n in 0..=4u32 {
                let c2 = (n * n.saturating_sub(1) / 2) as i32;
                let ln = lambda.powi(n as i32);
                let d = rel(
                    pq_derivative_iterated(&small, &base, n, x).unwrap(),
                    ln * p.powi(c2) * small(p.powi(n as i32) * x),
                );
                ensure(d < 1e-9, || format!("e ladder lambda={lambda} n={n}: {d:e}"))?;
                worst = worst.max(d);
                let d = rel(
                    pq_derivative_iterated(&big, &base, n, x).unwrap(),
                    ln * q.powi(c2) * big(q.powi(n as i32) * x),
                );
                ensure(d < 1e-9, || format!("E ladder lambda={lambda} n={n}: {d:e}"))?;
                worst = worst.max(d);
            }
        }
    }
    Ok(format!("reciprocal n<=6 and exponential ladders n<=4, max rel err {worst:.1e}"))
}

fn criterion_5() -> Outcome {
    // derivative of the transform against the transform of t^n f
    for base in [PqBase::new(1.2, 0.72).unwrap(), PqBase::new(1.5, 0.9).unwrap()] {
        for kind in [FirstKind, SecondKind] {
            let exp = if kind == FirstKind { ExpSmall(0.3) } else { ExpBig(0.3) };
            for f in [Const(1.0), exp] {
                let closed = transform_table(&f, &base, kind).unwrap();
                let big_f = Fallible(|s: f64| closed.eval(&base, s));
                for n in 1..=3u32 {
                    let tnf = match &f {
                        Const(_) => Monomial(n),
                        ExpSmall(a) => MonomialTimesExpSmall(n, *a),
                        ExpBig(a) => MonomialTimesExpBig(n, *a),
                        _ => unreachable!(),
                    };
                    let s = (2.0 * transform_table(&tnf, &base, kind).unwrap().s_min(&base)).max(1.5);
                    let via = derivative_of_transform(&big_f, &base, n, s, kind).map_err(|e| e.to_string())?;
                    let direct = numeric(&tnf, &base, s, kind)?;
                    ensure(rel(via, direct) < 1e-7, || format!("d/ds rule {kind} {f} n={n}"))?;
                }
            }
        }
    }
    // transform of derivatives
    let base = PqBase::new(1.2, 0.8).unwrap();
    let (p, q) = (base.p(), base.q());
    for kind in [FirstKind, SecondKind] {
        let closed = transform_table(&Monomial(2), &base, kind).unwrap();
        let big_f = Fallible(|s: f64| closed.eval(&base, s));
        for s in [0.7, 1.5, 3.0] {
            let second = transform_of_derivative(&big_f, &[0.0, 0.0], &base, 2, s, kind).unwrap();
            ensure(rel(second, numeric(&Const(p + q), &base, s, kind)?) < 1e-8, || format!("D^2 t^2 {kind}"))?;
            let first = transform_of_derivative(&big_f, &[0.0], &base, 1, s, kind).unwrap();
            let direct = numeric(&Sum(vec![(p + q, Monomial(1))]), &base, s, kind)?;
            ensure(rel(first, direct) < 1e-8, || format!("D t^2 {kind}"))?;
        }
    }
    let a: f64 = 0.3;
    let closed = transform_table(&ExpSmall(a), &base, FirstKind).unwrap();
    let big_f = Fallible(|s: f64| closed.eval(&base, s));
    for n in 1..=3u32 {
        let c2 = |k: u32| (k * k.saturating_sub(1) / 2) as i32;
        let init: Vec<f64> = (0..n).map(|k| a.powi(k as i32) * p.powi(c2(k))).collect();
        let rate = a * p.powi(n as i32);
        let s = 3.0 * rate / p;
        let via = transform_of_derivative(&big_f, &init, &base, n, s, FirstKind).unwrap();
        let direct = a.powi(n as i32) * p.powi(c2(n)) * numeric(&ExpSmall(rate), &base, s, FirstKind)?;
        ensure(rel(via, direct) < 1e-8, || format!("D^{n} e(at)"))?;
    }
    // scaling theorem, numeric instance
    let v = numeric(&ExpSmall(2.0), &base, 4.0, FirstKind)?;
    ensure(rel(v, 0.5 * p / (2.0 * p - 1.0)) < 1e-9, || format!("scaling instance {v}"))?;
    let scaled = scaling_apply(&transform_table(&Cos(0.3), &base, FirstKind).unwrap(), 2.0).unwrap();
    let direct = numeric(&Cos(0.6), &base, 2.0, FirstKind)?;
    ensure(rel(scaled.eval(&base, 2.0).unwrap(), direct) < 1e-9, || "scaling cos".into())?;
    // L{t^n} rederived symbolically
    for base in bases() {
        for kind in [FirstKind, SecondKind] {
            for n in 1..=6 {
                let derived = monomial_transform_from_derivative_rule(&base, n, kind).map_err(|e| e.to_string())?;
                let entry = transform_table(&Monomial(n), &base, kind).unwrap().canonical();
                ensure(TransformExpr::Rational(derived) == entry, || format!("symbolic t^{n} {kind}"))?;
            }
        }
    }
    Ok("d/ds rule, derivative rule, scaling, symbolic t^n (both kinds)".into())
}

fn criterion_6() -> Outcome {
    const POINTS: [f64; 4] = [0.1, 0.25, 0.5, 1.0];
    let mut worst: f64 = 0.0;
    for p in [1.1, 1.2] {
        let base = PqBase::new(p, 0.6 * p).unwrap();
        let pr = PQCauchyProblem::homogeneous(0.7, 1.0);
        let f = solve_first_order(&pr, &base).map_err(|e| e.to_string())?;
        ensure(f == ExpSmall(-0.7), || format!("homogeneous solution {f}"))?;
        let rep = verify_solution(&pr, &f, &base, &POINTS, 1e-8).unwrap();
        ensure(rep.passed, || format!("homogeneous residual {}", rep.max_abs_residual))?;
        worst = worst.max(rep.max_abs_residual);

        let lambda = 0.5;
        let pr = PQCauchyProblem::resonant(lambda, 0.0, &base);
        let expected = TransformExpr::Rational(
            RationalExpr {
                numerator: PqMonomial::new(1.0, 2, 0),
                factors: vec![
                    LinearFactor::new((1, 0), lambda, (0, 0)),
                    LinearFactor::new((2, 0), lambda, (0, 1)),
                ],
            }
            .canonical(),
        );
        let inter = first_order_transform(&pr, &base).unwrap();
        ensure(inter == expected, || format!("resonant intermediate {inter}"))?;
        let h = solve_first_order(&pr, &base).unwrap();
        ensure(h == MonomialTimesExpSmall(1, lambda), || format!("resonant solution {h}"))?;
        let rep = verify_solution(&pr, &h, &base, &POINTS, 1e-8).unwrap();
        ensure(rep.passed, || format!("resonant residual {}", rep.max_abs_residual))?;
        worst = worst.max(rep.max_abs_residual);

        let (omega, a, b) = (1.0, 1.0, 2.0);
        let f = solve_oscillator(omega, a, b, &base).unwrap();
        let rate = omega / p.sqrt();
        let expected = Sum(vec![(b, Cos(rate)), (a * p.sqrt() / omega, Sin(rate))]);
        ensure(f == expected, || format!("oscillator solution {f}"))?;
        let rep = verify_solution(&PQCauchyProblem::oscillator(omega, a, b), &f, &base, &POINTS, 1e-8).unwrap();
        ensure(rep.passed, || format!("oscillator residual {}", rep.max_abs_residual))?;
        worst = worst.max(rep.max_abs_residual);
    }
    Ok(format!("three problems solved structurally, max residual {worst:.1e}"))
}

fn criterion_7() -> Outcome {
    let q = 0.5;
    let base = PqBase::new(1.0, q).unwrap();
    let mut worst: f64 = 0.0;
    for n in 1..=6u32 {
        let q_factorial: f64 = (1..=n).map(|k| (1.0 - q.powi(k as i32)) / (1.0 - q)).product();
        for s in [0.5f64, 1.0, 2.0] {
            let d = rel(numeric(&Monomial(n), &base, s, FirstKind)?, q_factorial / s.powi(n as i32 + 1));
            ensure(d < 1e-9, || format!("n={n} s={s}: {d:e}"))?;
            worst = worst.max(d);
        }
    }
    Ok(format!("t^n at p=1, q=0.5 against [n]_q!/s^(n+1), max rel err {worst:.1e}"))
}

fn json_value(out: &str) -> Result<Value, String> {
    serde_json::from_str(out.trim()).map_err(|e| format!("bad JSON {out:?}: {e}"))
}

fn as_f64(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

fn invocation() -> impl Strategy<Value = Vec<String>> {
    let base = (1.05f64..2.0, 0.2f64..0.9).prop_map(|(p, frac)| (p, p * frac));
    let eval = (
        prop::sample::select(vec!["e", "E", "cos", "sin", "Cos", "Sin", "cosh", "sinh", "Cosh", "Sinh"]),
        -1.0f64..1.0,
    )
        .prop_map(|(f, z)| vec!["eval".to_string(), f.to_string(), "--z".into(), z.to_string()]);
    let gamma = (prop::sample::select(vec!["first", "second"]), 0.5f64..4.0)
        .prop_map(|(k, z)| vec!["gamma".to_string(), "--kind".into(), k.to_string(), "--z".into(), z.to_string()]);
    let transform = (
        prop::sample::select(vec!["1", "t^2", "t^0.5", "E(0.2t)", "cosh(0.2t)", "2*t + 3"]),
        prop::sample::select(vec!["numeric", "table", "both"]),
        1.0f64..3.0,
    )
        .prop_map(|(f, m, s)| {
            ["transform", "--fn", f, "--s", &s.to_string(), "--kind", "first", "--mode", m]
                .iter()
                .map(|x| x.to_string())
                .collect()
        });
    let derivative = (1u32..4, 0.2f64..1.0).prop_map(|(n, x)| {
        ["derivative", "--fn", "t^3 + e(0.2t)", "--n", &n.to_string(), "--x", &x.to_string()]
            .iter()
            .map(|s| s.to_string())
            .collect()
    });
    (base, prop_oneof![eval, gamma, transform, derivative]).prop_map(|((p, q), mut argv)| {
        argv.extend(["--p".into(), p.to_string(), "--q".into(), q.to_string(), "--json".into()]);
        argv
    })
}

fn criterion_8() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_pqcalc");
    let run_bin = |args: &[&str]| {
        let out = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
        Ok::<_, String>((out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned()))
    };

    // example 1: t^3 table and numeric
    let args = ["transform", "--fn", "t^3", "--p", "1.2", "--q", "0.8", "--s", "1", "--kind", "first", "--mode", "both", "--json"];
    let (code, out) = run_bin(&args)?;
    ensure(code == 0, || format!("transform exit {code}"))?;
    let v = json_value(&out)?;
    let (t, n, gap) = (as_f64(&v["value"]["table"]), as_f64(&v["value"]["numeric"]), as_f64(&v["value"]["gap"]));
    ensure(rel(t, 6.08 / 2.985_984) < 1e-14, || format!("table value {t}"))?;
    ensure(gap < 1e-7, || format!("gap {gap}"))?;
    ensure(gap == (n - t).abs() / t.abs(), || "gap does not match printed values".into())?;

    // example 2: exp-reciprocal suite
    let (code, out) = run_bin(&["identity-check", "--suite", "exp-reciprocal", "--p", "1.2", "--q", "0.8", "--json"])?;
    ensure(code == 0, || format!("identity-check exit {code}"))?;
    let dev = as_f64(&json_value(&out)?["value"]["max_deviation"]);
    ensure(dev < 1e-10, || format!("max deviation {dev}"))?;

    // example 3: Gamma(4) = [3]!
    let (code, out) = run_bin(&["gamma", "--kind", "first", "--z", "4", "--p", "1.2", "--q", "0.8", "--json"])?;
    ensure(code == 0, || format!("gamma exit {code}"))?;
    let g = as_f64(&json_value(&out)?["value"]);
    ensure((g - 6.08).abs() < 1e-12, || format!("gamma {g}"))?;

    // JSON round trip
    let mut runner = TestRunner::new(Config {
        cases: 20,
        failure_persistence: None,
        ..Config::default()
    });
    let seen = std::cell::Cell::new(0);
    runner
        .run(&invocation(), |argv| {
            let first = run_command(&argv);
            prop_assert_eq!(first.code, 0, "{:?}: {}", argv, first.stderr);
            let rec: Value = serde_json::from_str(first.stdout.trim()).unwrap();
            let again = argv_from_record(&rec).expect("reconstructible record");
            let second = run_command(&again);
            prop_assert_eq!(second.code, 0);
            let rec2: Value = serde_json::from_str(second.stdout.trim()).unwrap();
            prop_assert_eq!(&rec["value"], &rec2["value"]);
            prop_assert_eq!(&first.stdout, &second.stdout);
            if let Some(gap) = rec["value"].get("gap") {
                let (t, n) = (as_f64(&rec["value"]["table"]), as_f64(&rec["value"]["numeric"]));
                prop_assert_eq!(as_f64(gap), (n - t).abs() / t.abs());
            }
            seen.set(seen.get() + 1);
            Ok(())
        })
        .map_err(|e| format!("round trip: {e}"))?;
    Ok(format!("three examples ok, {} randomized JSON round trips bit-for-bit", seen.get()))
}

#[test]
fn acceptance() {
    let criteria: [(u32, &str, fn() -> Outcome); 8] = [
        (1, "transform-table oracle", criterion_1),
        (2, "Gamma consistency", criterion_2),
        (3, "identity suites", criterion_3),
        (4, "derivative closed forms", criterion_4),
        (5, "transform-rule cross-checks", criterion_5),
        (6, "solver", criterion_6),
        (7, "q-calculus degeneration", criterion_7),
        (8, "CLI", criterion_8),
    ];
    let mut failed = Vec::new();
    for (id, name, run) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("[PASS] criterion {id}: {name}: {detail}"),
            Err(why) => {
                println!("[FAIL] criterion {id}: {name}: {why}");
                failed.push(id);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
