//! The (p,q)-difference operator and Jackson-type integrals on geometric
//! grids.

use crate::arith::{pq_factorial, PqBase};
use crate::error::{Error, Result, Tail};
use crate::numeric::{CompensatedSum, Evaluated, Path};

/// A real function that may fail to evaluate.
pub trait ScalarFunction {
    fn eval(&self, t: f64) -> Result<f64>;

    /// `f(t)·w(t)` for a product-form exponential weight. Implementors that
    /// are themselves product forms override this to merge the two products
    /// factor by factor, which stays finite where `f` and `w` separately
    /// overflow and underflow.
    fn eval_weighted(&self, t: f64, weight: &crate::special::ExpWeight) -> Result<f64> {
        let w = weight.eval(t)?;
        if w == 0.0 {
            return Ok(0.0);
        }
        Ok(self.eval(t)? * w)
    }
}

impl<F: Fn(f64) -> f64> ScalarFunction for F {
    fn eval(&self, t: f64) -> Result<f64> {
        Ok(self(t))
    }
}

/// Adapter for closures returning [`Result`].
pub struct Fallible<F>(pub F);

impl<F: Fn(f64) -> Result<f64>> ScalarFunction for Fallible<F> {
    fn eval(&self, t: f64) -> Result<f64> {
        (self.0)(t)
    }
}

/// Window and stopping rule for grid sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub j_min: i32,
    pub j_max: i32,
    /// A term is small when `|term| ≤ abs_tol · max(1, |partial sum|)`.
    pub abs_tol: f64,
    pub consecutive_small: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            j_min: -400,
            j_max: 400,
            abs_tol: 1e-14,
            consecutive_small: 20,
        }
    }
}

impl GridConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.j_min < 0 && self.j_max > 0) {
            return Err(Error::Domain(format!(
                "grid window must straddle zero, got [{}, {}]",
                self.j_min, self.j_max
            )));
        }
        if !(self.abs_tol > 0.0) || self.consecutive_small == 0 {
            return Err(Error::Domain("grid tolerance and small-term count must be positive".into()));
        }
        Ok(())
    }

    fn is_small(&self, term: f64, sum: f64) -> bool {
        term.abs() <= self.abs_tol * sum.abs().max(1.0)
    }
}

/// `(f(px) − f(qx))/((p − q)x)`; at `x = 0` a five-point central
/// difference for `f′(0)`.
pub fn pq_derivative<F: ScalarFunction + ?Sized>(f: &F, base: &PqBase, x: f64) -> Result<f64> {
    let (p, q) = (base.p(), base.q());
    if x != 0.0 {
        return Ok((f.eval(p * x)? - f.eval(q * x)?) / ((p - q) * x));
    }
    let h = f64::EPSILON.powf(0.2);
    let num = -f.eval(2.0 * h)? + 8.0 * f.eval(h)? - 8.0 * f.eval(-h)? + f.eval(-2.0 * h)?;
    Ok(num / (12.0 * h))
}

/// `Dⁿ f(x)` from the `n + 1` values `f(pⁱ q^{n−i} x)`, reduced level by
/// level.
pub fn pq_derivative_iterated<F: ScalarFunction + ?Sized>(
    f: &F,
    base: &PqBase,
    n: u32,
    x: f64,
) -> Result<f64> {
    if n == 0 {
        return f.eval(x);
    }
    if x == 0.0 {
        if n == 1 {
            return pq_derivative(f, base, x);
        }
        return Err(Error::Domain("iterated stencil collapses at x = 0".into()));
    }
    let (p, q) = (base.p(), base.q());
    let n = n as i32;
    let mut level: Vec<f64> = (0..=n)
        .map(|a| f.eval(base.pq_pow(a, n - a) * x))
        .collect::<Result<_>>()?;
    for m in 1..=n {
        let width = n - m;
        let next: Vec<f64> = (0..=width)
            .map(|a| {
                let y = base.pq_pow(a, width - a) * x;
                (level[a as usize + 1] - level[a as usize]) / ((p - q) * y)
            })
            .collect();
        level = next;
    }
    Ok(level[0])
}

/// `Dⁿ [1/(ax + b)] = (−a)ⁿ [n]! / Π_{k=0}^{n} (a p^{n−k} qᵏ x + b)`.
pub fn deriv_reciprocal_closed(base: &PqBase, a: f64, b: f64, n: u32, x: f64) -> Result<f64> {
    let mut den = 1.0;
    for k in 0..=n as i32 {
        let lin = a * base.pq_pow(n as i32 - k, k) * x;
        let factor = lin + b;
        if factor == 0.0 || factor.abs() <= 4.0 * f64::EPSILON * (lin.abs() + b.abs()) {
            return Err(Error::Singularity { k: k as usize });
        }
        den *= factor;
    }
    Ok((-a).powi(n as i32) * pq_factorial(base, n)? / den)
}

struct TailSum {
    sum: CompensatedSum,
    terms: usize,
    last: f64,
    prev: f64,
}

impl TailSum {
    fn new() -> Self {
        TailSum {
            sum: CompensatedSum::new(),
            terms: 0,
            last: 0.0,
            prev: 0.0,
        }
    }

    fn push(&mut self, term: f64) {
        self.sum.add(term);
        self.terms += 1;
        self.prev = self.last;
        self.last = term.abs();
    }

    /// Geometric extrapolation of what lies beyond the last term.
    fn tail_estimate(&self) -> f64 {
        if self.prev > 0.0 && self.last < self.prev {
            let rho = self.last / self.prev;
            self.last * rho / (1.0 - rho)
        } else {
            self.last
        }
    }
}

/// Sums `term(j)` for `j = start, start ± 1, …` until `consecutive_small`
/// negligible terms in a row, or fails at `stop`.
fn sum_one_side(
    grid: &GridConfig,
    tail: Tail,
    offset: f64,
    mut term: impl FnMut(i32) -> Result<f64>,
) -> Result<TailSum> {
    let (start, stop, step) = match tail {
        Tail::Right => (0, grid.j_max, 1),
        Tail::Left => (-1, grid.j_min, -1),
    };
    let mut acc = TailSum::new();
    let mut small = 0usize;
    let mut j = start;
    loop {
        let t = term(j)?;
        if !t.is_finite() {
            return Err(Error::GridTail {
                tail,
                partial: acc.sum.value() + offset,
                last_term: t,
            });
        }
        acc.push(t);
        if grid.is_small(t, acc.sum.value() + offset) {
            small += 1;
            if small >= grid.consecutive_small {
                return Ok(acc);
            }
        } else {
            small = 0;
        }
        if j == stop {
            return Err(Error::GridTail {
                tail,
                partial: acc.sum.value() + offset,
                last_term: t,
            });
        }
        j += step;
    }
}

/// `∫₀ᵃ f d_{p,q}t = (p − q) a Σ_{k≥0} qᵏ/p^{k+1} f(a qᵏ/p^{k+1})`.
pub fn pq_integral_finite<F: ScalarFunction + ?Sized>(
    f: &F,
    base: &PqBase,
    a: f64,
    grid: &GridConfig,
) -> Result<f64> {
    pq_integral_finite_eval(f, base, a, grid).map(|e| e.value)
}

pub fn pq_integral_finite_eval<F: ScalarFunction + ?Sized>(
    f: &F,
    base: &PqBase,
    a: f64,
    grid: &GridConfig,
) -> Result<Evaluated<f64>> {
    base.require_grid()?;
    grid.validate()?;
    if !a.is_finite() {
        return Err(Error::Domain(format!("integration limit {a} is not finite")));
    }
    if a == 0.0 {
        return Ok(Evaluated::exact(0.0));
    }
    let (p, q, r) = (base.p(), base.q(), base.r());
    let scale = (p - q) * a / p;
    let acc = sum_one_side(grid, Tail::Right, 0.0, |k| {
        let rk = r.powi(k);
        let v = f.eval(a * rk / p)?;
        Ok(if v == 0.0 { 0.0 } else { scale * rk * v })
    })
    .map_err(|e| match e {
        Error::GridTail { partial, last_term, .. } => Error::Truncation {
            what: "finite grid integral".into(),
            terms: grid.j_max as usize + 1,
            partial,
            last_term,
        },
        other => other,
    })?;
    Ok(Evaluated {
        value: acc.sum.value(),
        terms: acc.terms,
        tail: acc.tail_estimate(),
        path: Path::Grid,
    })
}

/// `∫ₐᵇ f d_{p,q}t` as the difference of two finite integrals.
pub fn pq_integral_interval<F: ScalarFunction + ?Sized>(
    f: &F,
    base: &PqBase,
    a: f64,
    b: f64,
    grid: &GridConfig,
) -> Result<f64> {
    if a < 0.0 || b < a {
        return Err(Error::Domain(format!("interval needs 0 <= a <= b, got [{a}, {b}]")));
    }
    base.require_grid()?;
    if a == b {
        return Ok(0.0);
    }
    Ok(pq_integral_finite(f, base, b, grid)? - pq_integral_finite(f, base, a, grid)?)
}

/// `∫₀^∞ f d_{p,q}t = (p − q) Σ_{j∈ℤ} qʲ/p^{j+1} f(qʲ/p^{j+1})`, each tail
/// stopped independently.
pub fn pq_integral_improper<F: ScalarFunction + ?Sized>(
    f: &F,
    base: &PqBase,
    grid: &GridConfig,
) -> Result<f64> {
    pq_integral_improper_eval(f, base, grid).map(|e| e.value)
}

pub fn pq_integral_improper_eval<F: ScalarFunction + ?Sized>(
    f: &F,
    base: &PqBase,
    grid: &GridConfig,
) -> Result<Evaluated<f64>> {
    base.require_grid()?;
    grid.validate()?;
    let (p, q, r) = (base.p(), base.q(), base.r());
    let scale = (p - q) / p;
    let mut term = |j: i32| -> Result<f64> {
        let rj = r.powi(j);
        let v = f.eval(rj / p)?;
        Ok(if v == 0.0 { 0.0 } else { scale * rj * v })
    };
    let right = sum_one_side(grid, Tail::Right, 0.0, &mut term)?;
    let left = sum_one_side(grid, Tail::Left, right.sum.value(), &mut term)?;
    Ok(Evaluated {
        value: right.sum.value() + left.sum.value(),
        terms: right.terms + left.terms,
        tail: right.tail_estimate() + left.tail_estimate(),
        path: Path::Grid,
    })
}
