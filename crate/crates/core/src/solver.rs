//! Transform-method solutions of three dilation difference equations:
//!
//! - `D f(t) + c f(pt) = 0`, `f(0) = f₀`;
//! - `D h(t) − λ h(pt) = e(λqt)`, `h(0) = h₀`;
//! - `D² f(t) + ω² f(p²t) = 0`, `D f(0) = A`, `f(0) = B`.
//!
//! Each solve writes the transformed equation as an algebraic relation for
//! `F(s/pᵐ)`, solves it, substitutes `s → pᵐ s` and inverts by table.

use crate::arith::{PqBase, SeriesTruncation};
use crate::calculus::{pq_derivative_iterated, ScalarFunction};
use crate::error::{Error, Result};
use crate::laplace::{
    invert_by_table, FunctionExpr, LinearFactor, PqMonomial, QuadBase, QuadSign, RationalExpr, TransformExpr,
    TransformKind,
};
use crate::special::exp_radius;

/// `D^order f(t) + coefficient · f(p^m t) = forcing(t)` with initial data.
#[derive(Debug, Clone, PartialEq)]
pub struct PQCauchyProblem {
    pub order: u32,
    pub dilation_exponent: u32,
    pub coefficient: f64,
    pub forcing: FunctionExpr,
    pub initial_value: f64,
    /// `(Df)(0)`, order 2 only.
    pub initial_derivative: Option<f64>,
}

impl PQCauchyProblem {
    pub fn homogeneous(c: f64, f0: f64) -> Self {
        PQCauchyProblem {
            order: 1,
            dilation_exponent: 1,
            coefficient: c,
            forcing: FunctionExpr::Const(0.0),
            initial_value: f0,
            initial_derivative: None,
        }
    }

    /// `D h − λ h(pt) = e(λqt)`.
    pub fn resonant(lambda: f64, h0: f64, base: &PqBase) -> Self {
        PQCauchyProblem {
            order: 1,
            dilation_exponent: 1,
            coefficient: -lambda,
            forcing: FunctionExpr::ExpSmall(lambda * base.q()),
            initial_value: h0,
            initial_derivative: None,
        }
    }

    pub fn oscillator(omega: f64, a: f64, b: f64) -> Self {
        PQCauchyProblem {
            order: 2,
            dilation_exponent: 2,
            coefficient: omega * omega,
            forcing: FunctionExpr::Const(0.0),
            initial_value: b,
            initial_derivative: Some(a),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.order == 1 || self.order == 2) || self.dilation_exponent != self.order {
            return Err(Error::Unsupported(format!(
                "order {} with dilation p^{}",
                self.order, self.dilation_exponent
            )));
        }
        if self.order == 2 && self.initial_derivative.is_none() {
            return Err(Error::Domain("second-order problem needs (Df)(0)".into()));
        }
        self.forcing.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub max_abs_residual: f64,
    pub sample_points: Vec<f64>,
    pub per_point: Vec<f64>,
    pub initial_value_error: f64,
    pub initial_derivative_error: Option<f64>,
    pub passed: bool,
}

fn is_zero_forcing(f: &FunctionExpr) -> bool {
    matches!(f, FunctionExpr::Const(c) if *c == 0.0)
}

/// The transform `F(s)` of the solution before inversion.
///
/// Homogeneous: `(s/p)F(s/p) − f₀ + (c/p)F(s/p) = 0` gives
/// `F(s/p) = p f₀/(s + c)`, so `F(s) = p f₀/(ps + c)`.
///
/// Resonant: the right side transforms to `p/(ps − λq)`, so
/// `F(s/p) = p h₀/(s − λ) + p²/((s − λ)(ps − λq))` and
/// `F(s) = p h₀/(ps − λ) + p²/((ps − λ)(p²s − λq))`.
pub fn first_order_transform(problem: &PQCauchyProblem, base: &PqBase) -> Result<TransformExpr> {
    problem.validate()?;
    if problem.order != 1 {
        return Err(Error::Unsupported("first-order solver needs order 1".into()));
    }
    let c = problem.coefficient;
    let f0 = problem.initial_value;
    if is_zero_forcing(&problem.forcing) {
        let sol = RationalExpr {
            numerator: PqMonomial::new(f0, 1, 0),
            factors: vec![LinearFactor::new((0, 0), -c, (0, 0))],
        };
        return Ok(TransformExpr::Rational(sol.substitute_scale(1, 0)));
    }
    let lambda = -c;
    match problem.forcing {
        FunctionExpr::ExpSmall(mu) if (mu - lambda * base.q()).abs() <= 1e-12 * mu.abs().max(1.0) => {
            let pole = LinearFactor::new((0, 0), lambda, (0, 0));
            let forced = RationalExpr {
                numerator: PqMonomial::new(1.0, 2, 0),
                factors: vec![pole, LinearFactor::new((1, 0), lambda, (0, 1))],
            }
            .substitute_scale(1, 0);
            if f0 == 0.0 {
                return Ok(TransformExpr::Rational(forced));
            }
            let free = RationalExpr {
                numerator: PqMonomial::new(f0, 1, 0),
                factors: vec![pole],
            }
            .substitute_scale(1, 0);
            Ok(TransformExpr::Sum(vec![
                (1.0, TransformExpr::Rational(free)),
                (1.0, TransformExpr::Rational(forced)),
            ]))
        }
        _ => Err(Error::Unsupported(format!(
            "forcing {} is neither zero nor e(λqt) with λ = {lambda}",
            problem.forcing
        ))),
    }
}

pub fn solve_first_order(problem: &PQCauchyProblem, base: &PqBase) -> Result<FunctionExpr> {
    let f = first_order_transform(problem, base)?;
    invert_by_table(&f, base, TransformKind::FirstKind)
}

/// `F(s) = (Bp²s + Ap)/((ps)² + ω²/p)`.
pub fn oscillator_transform(omega: f64, a: f64, b: f64, base: &PqBase) -> Result<TransformExpr> {
    base.require_grid()?;
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!("oscillator frequency must be positive, got {omega}")));
    }
    let sqrt_p = base.p().sqrt();
    Ok(TransformExpr::Quadratic {
        s_coeff: PqMonomial::new(b, 2, 0),
        a_coeff: PqMonomial::new(a * sqrt_p / omega, 1, 0),
        base_param: QuadBase::P,
        a: omega / sqrt_p,
        sign: QuadSign::Plus,
    })
}

pub fn solve_oscillator(omega: f64, a: f64, b: f64, base: &PqBase) -> Result<FunctionExpr> {
    let f = oscillator_transform(omega, a, b, base)?;
    invert_by_table(&f, base, TransformKind::FirstKind)
}

/// Largest `|rate|` over the finite-radius families in `e`.
fn small_family_rate(e: &FunctionExpr) -> f64 {
    use FunctionExpr::*;
    match e {
        ExpSmall(a) | MonomialTimesExpSmall(_, a) | Cos(a) | Sin(a) | Cosh(a) | Sinh(a) => a.abs(),
        Sum(terms) => terms.iter().map(|(_, t)| small_family_rate(t)).fold(0.0, f64::max),
        _ => 0.0,
    }
}

/// Residuals of `candidate` at `points`, plus exact initial-data checks.
pub fn verify_solution(
    problem: &PQCauchyProblem,
    candidate: &FunctionExpr,
    base: &PqBase,
    points: &[f64],
    tol: f64,
) -> Result<ResidualReport> {
    problem.validate()?;
    candidate.validate()?;
    let radius = exp_radius(base, false);
    let reach = base.p().powi(problem.order.max(problem.dilation_exponent) as i32);
    let rate = small_family_rate(candidate).max(small_family_rate(&problem.forcing));
    let bad: Vec<f64> = points
        .iter()
        .copied()
        .filter(|t| !(*t > 0.0) || rate * reach * t >= radius)
        .collect();
    if !bad.is_empty() {
        return Err(Error::Domain(format!(
            "points {bad:?} leave (0, ∞) or the series radius {radius}"
        )));
    }
    let trunc = SeriesTruncation::default();
    let f = candidate.bind(*base, trunc);
    let g = problem.forcing.bind(*base, trunc);
    let dil = base.p().powi(problem.dilation_exponent as i32);
    let per_point = points
        .iter()
        .map(|&t| {
            let lhs = pq_derivative_iterated(&f, base, problem.order, t)? + problem.coefficient * f.eval(dil * t)?;
            Ok((lhs - g.eval(t)?).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    let max_abs_residual = per_point.iter().copied().fold(0.0, f64::max);
    let taylor = candidate.taylor_coefficients(base, 2)?;
    let initial_value_error = (taylor[0] - problem.initial_value).abs();
    let initial_derivative_error = problem.initial_derivative.map(|d| (taylor[1] - d).abs());
    let passed = max_abs_residual < tol
        && initial_value_error <= tol
        && initial_derivative_error.is_none_or(|e| e <= tol);
    Ok(ResidualReport {
        max_abs_residual,
        sample_points: points.to_vec(),
        per_point,
        initial_value_error,
        initial_derivative_error,
        passed,
    })
}
