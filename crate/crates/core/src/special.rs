//! Basic hypergeometric series, the two (p,q)-exponentials, their
//! trigonometric and hyperbolic combinations, and both Gamma functions.
//!
//! Every exponential-type function is `Σ w^{C(n,2)} zⁿ/[n]!` with weight
//! `w = p` (small family) or `w = q` (big family). Writing `v` for the
//! other parameter and `ρ` for the smaller of `v/w`, `w/v`:
//!
//! - `|w| > |v|`: `1/((1 − ρ)z; ρ)_∞`, radius `|w/(w − v)|`;
//! - `|w| < |v|`: `(−(1 − ρ)z; ρ)_∞`, entire.

use crate::arith::{pochhammer_inf_eval, pq_number_real, pq_power_infinite_partial, PowerSign, PqBase, SeriesTruncation};
use crate::calculus::{pq_integral_finite_eval, pq_integral_improper_eval, Fallible, GridConfig};
use crate::error::{Error, Result};
use crate::numeric::{CompensatedSum, Evaluated, Path, Scalar, ScaledProduct};
use num_complex::Complex64;

/// Fraction of the series radius beyond which the product path is used.
pub const PATH_SWITCH: f64 = 0.75;

/// Parameters of `rΦs`: numerator pairs `(a_p, a_q)` and denominator pairs
/// `(b_p, b_q)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HypergeomSpec {
    pub numerator_pairs: Vec<(f64, f64)>,
    pub denominator_pairs: Vec<(f64, f64)>,
}

impl HypergeomSpec {
    pub fn new(numerator_pairs: Vec<(f64, f64)>, denominator_pairs: Vec<(f64, f64)>) -> Self {
        HypergeomSpec {
            numerator_pairs,
            denominator_pairs,
        }
    }

    /// `(r, s)` of `rΦs`.
    pub fn arity(&self) -> (usize, usize) {
        (self.numerator_pairs.len(), self.denominator_pairs.len())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrigKind {
    CosSmall,
    SinSmall,
    CosBig,
    SinBig,
    CoshSmall,
    SinhSmall,
    CoshBig,
    SinhBig,
}

impl TrigKind {
    pub const ALL: [TrigKind; 8] = [
        TrigKind::CosSmall,
        TrigKind::SinSmall,
        TrigKind::CosBig,
        TrigKind::SinBig,
        TrigKind::CoshSmall,
        TrigKind::SinhSmall,
        TrigKind::CoshBig,
        TrigKind::SinhBig,
    ];

    pub fn is_big(self) -> bool {
        matches!(self, TrigKind::CosBig | TrigKind::SinBig | TrigKind::CoshBig | TrigKind::SinhBig)
    }

    fn is_odd(self) -> bool {
        matches!(self, TrigKind::SinSmall | TrigKind::SinBig | TrigKind::SinhSmall | TrigKind::SinhBig)
    }

    fn alternating(self) -> bool {
        matches!(self, TrigKind::CosSmall | TrigKind::SinSmall | TrigKind::CosBig | TrigKind::SinBig)
    }
}

fn weights(base: &PqBase, big: bool) -> (f64, f64) {
    if big {
        (base.q(), base.p())
    } else {
        (base.p(), base.q())
    }
}

/// Radius of convergence of `Σ w^{C(n,2)} zⁿ/[n]!`.
pub fn exp_radius(base: &PqBase, big: bool) -> f64 {
    let (w, v) = weights(base, big);
    if w.abs() > v.abs() {
        (w / (w - v)).abs()
    } else {
        f64::INFINITY
    }
}

/// `wⁿ/[n+1]` without forming either factor.
fn weight_over_number(w: f64, v: f64, n: i32) -> f64 {
    if w.abs() >= v.abs() {
        let rho = v / w;
        (1.0 - rho) / (1.0 - rho.powi(n + 1))
    } else {
        let rho = w / v;
        rho.powi(n) * (w - v) / (v * (rho.powi(n + 1) - 1.0))
    }
}

/// Sums `next(0) + next(1) + …` under `trunc`, flagging divergence when
/// the terms grow with a non-decreasing ratio for `consecutive_small` steps.
fn sum_terms(mut next: impl FnMut(usize) -> Result<f64>, trunc: &SeriesTruncation) -> Result<Evaluated<f64>> {
    trunc.validate()?;
    let mut acc = CompensatedSum::new();
    let mut small = 0usize;
    let mut growing = 0usize;
    let mut prev = f64::NAN;
    let mut prev_ratio = f64::NAN;
    for n in 0..trunc.max_terms {
        let term = next(n)?;
        if !term.is_finite() {
            return Err(Error::Divergence { terms: n, last_term: term });
        }
        acc.add(term);
        let mag = term.abs();
        if n > 0 && prev > 0.0 {
            let ratio = mag / prev;
            if ratio > 1.0 && !(ratio < prev_ratio) {
                growing += 1;
                if growing >= trunc.consecutive_small {
                    return Err(Error::Divergence { terms: n + 1, last_term: term });
                }
            } else {
                growing = 0;
            }
            prev_ratio = ratio;
        }
        prev = mag;
        if trunc.is_small(mag, acc.value().abs()) {
            small += 1;
            if small >= trunc.consecutive_small {
                return Ok(Evaluated {
                    value: acc.value(),
                    terms: n + 1,
                    tail: mag,
                    path: Path::Series,
                });
            }
        } else {
            small = 0;
        }
    }
    Err(Error::Truncation {
        what: "power series".into(),
        terms: trunc.max_terms,
        partial: acc.value(),
        last_term: prev,
    })
}

/// `rΦs[(a_p,a_q); (b_p,b_q); z]` with term ratio
/// `Π(a_p pⁿ − a_q qⁿ) / (Π(b_p pⁿ − b_q qⁿ)(p^{n+1} − q^{n+1})) · (−rⁿ)^{1+s−r} z`.
pub fn hypergeom_phi(spec: &HypergeomSpec, base: &PqBase, z: f64, trunc: &SeriesTruncation) -> Result<f64> {
    hypergeom_phi_eval(spec, base, z, trunc).map(|e| e.value)
}

pub fn hypergeom_phi_eval(
    spec: &HypergeomSpec,
    base: &PqBase,
    z: f64,
    trunc: &SeriesTruncation,
) -> Result<Evaluated<f64>> {
    let (p, r) = (base.p(), base.r());
    if p == 0.0 {
        return Err(Error::Domain("hypergeometric series needs p != 0".into()));
    }
    let (nr, ns) = spec.arity();
    let e = 1 + ns as i32 - nr as i32;
    let sign = if e % 2 == 0 { 1.0 } else { -1.0 };
    let decay = (r / p).powi(e);
    let mut term = 1.0;
    let mut rn = 1.0;
    let mut decay_n = 1.0;
    sum_terms(
        |n| {
            if n == 0 {
                return Ok(1.0);
            }
            // advance from term n−1 to term n, using index m = n − 1
            let m = n - 1;
            let mut ratio = z / p * sign * decay_n / (1.0 - rn * r);
            for &(ap, aq) in &spec.numerator_pairs {
                ratio *= ap - aq * rn;
            }
            for &(bp, bq) in &spec.denominator_pairs {
                let d = bp - bq * rn;
                if d == 0.0 {
                    return Err(Error::Domain(format!("denominator pair vanishes at index {m}")));
                }
                ratio /= d;
            }
            term *= ratio;
            rn *= r;
            decay_n *= decay;
            Ok(term)
        },
        trunc,
    )
}

fn exp_series(base: &PqBase, big: bool, z: f64, trunc: &SeriesTruncation) -> Result<Evaluated<f64>> {
    let (w, v) = weights(base, big);
    let mut term = 1.0;
    sum_terms(
        |n| {
            if n > 0 {
                term *= weight_over_number(w, v, n as i32 - 1) * z;
            }
            Ok(term)
        },
        trunc,
    )
}

fn check_pole<T: Scalar>(c: T, rho: f64) -> Result<()> {
    let one = T::from_real(1.0);
    let mut ck = c;
    let mut k = 0usize;
    while ck.modulus() >= 0.25 {
        let f = one - ck;
        if f.modulus() <= 64.0 * f64::EPSILON * ck.modulus().max(1.0) {
            return Err(Error::Pole { k });
        }
        ck = ck.scale(rho);
        k += 1;
        if k > 100_000 {
            break;
        }
    }
    Ok(())
}

fn exp_product<T: Scalar>(base: &PqBase, big: bool, z: T, trunc: &SeriesTruncation) -> Result<Evaluated<T>> {
    let (w, v) = weights(base, big);
    if w.abs() > v.abs() {
        let rho = v / w;
        let c = z.scale(1.0 - rho);
        check_pole(c, rho)?;
        let d = pochhammer_inf_eval(rho, c, trunc)?;
        Ok(d.map(|x| T::from_real(1.0) / x))
    } else if w.abs() < v.abs() {
        let rho = w / v;
        pochhammer_inf_eval(rho, -z.scale(1.0 - rho), trunc)
    } else {
        Err(Error::Domain("no product form when |p| = |q|".into()))
    }
}

fn exp_eval(base: &PqBase, big: bool, z: f64, trunc: &SeriesTruncation) -> Result<Evaluated<f64>> {
    if z == 0.0 {
        return Ok(Evaluated::exact(1.0));
    }
    let (w, v) = weights(base, big);
    if w.abs() == v.abs() {
        return exp_series(base, big, z, trunc);
    }
    let band = PATH_SWITCH * exp_radius(base, big).min(exp_radius(base, !big));
    if z.abs() < band {
        exp_series(base, big, z, trunc)
    } else {
        exp_product(base, big, z, trunc)
    }
}

/// `e_{p,q}(z) = Σ p^{C(n,2)} zⁿ/[n]!`, switching to the product
/// continuation from `0.75·p/(p − q)` on.
pub fn exp_small(base: &PqBase, z: f64, trunc: &SeriesTruncation) -> Result<f64> {
    exp_eval(base, false, z, trunc).map(|e| e.value)
}

pub fn exp_small_eval(base: &PqBase, z: f64, trunc: &SeriesTruncation) -> Result<Evaluated<f64>> {
    exp_eval(base, false, z, trunc)
}

/// `E_{p,q}(z) = Σ q^{C(n,2)} zⁿ/[n]!`.
pub fn exp_big(base: &PqBase, z: f64, trunc: &SeriesTruncation) -> Result<f64> {
    exp_eval(base, true, z, trunc).map(|e| e.value)
}

pub fn exp_big_eval(base: &PqBase, z: f64, trunc: &SeriesTruncation) -> Result<Evaluated<f64>> {
    exp_eval(base, true, z, trunc)
}

/// Series-only evaluation, for cross-checking the two paths.
pub fn exp_series_only(base: &PqBase, big: bool, z: f64, trunc: &SeriesTruncation) -> Result<f64> {
    exp_series(base, big, z, trunc).map(|e| e.value)
}

/// Product-only evaluation; accepts complex arguments.
pub fn exp_product_only<T: Scalar>(base: &PqBase, big: bool, z: T, trunc: &SeriesTruncation) -> Result<T> {
    exp_product(base, big, z, trunc).map(|e| e.value)
}

/// Coefficients `c_m` of `z^m`, `m < count`, of a trigonometric series.
pub fn trig_series_coefficients(kind: TrigKind, base: &PqBase, count: usize) -> Vec<f64> {
    let (w, v) = weights(base, kind.is_big());
    let mut out = Vec::with_capacity(count);
    let mut c = 1.0;
    for m in 0..count {
        if m > 0 {
            c *= weight_over_number(w, v, m as i32 - 1);
        }
        let parity_ok = (m % 2 == 1) == kind.is_odd();
        let value = if !parity_ok {
            0.0
        } else if kind.alternating() && (m / 2) % 2 == 1 {
            -c
        } else {
            c
        };
        out.push(value);
    }
    out
}

fn trig_series(kind: TrigKind, base: &PqBase, z: f64, trunc: &SeriesTruncation) -> Result<Evaluated<f64>> {
    let (w, v) = weights(base, kind.is_big());
    let mut term = 1.0;
    let mut idx = 0i32;
    let sign = if kind.alternating() { -1.0 } else { 1.0 };
    sum_terms(
        |n| {
            if n == 0 {
                if kind.is_odd() {
                    term = z;
                    idx = 1;
                }
                return Ok(term);
            }
            for _ in 0..2 {
                term *= weight_over_number(w, v, idx) * z;
                idx += 1;
            }
            term *= sign;
            Ok(term)
        },
        trunc,
    )
}

/// The eight trigonometric/hyperbolic functions.
pub fn trig_eval(kind: TrigKind, base: &PqBase, z: f64, trunc: &SeriesTruncation) -> Result<f64> {
    trig_eval_detailed(kind, base, z, trunc).map(|e| e.value)
}

pub fn trig_eval_detailed(kind: TrigKind, base: &PqBase, z: f64, trunc: &SeriesTruncation) -> Result<Evaluated<f64>> {
    let big = kind.is_big();
    let radius = exp_radius(base, big);
    if z.abs() >= radius {
        return Err(Error::Domain(format!(
            "|z| = {} outside the series radius {radius}",
            z.abs()
        )));
    }
    let use_product = matches!(kind, TrigKind::CosBig | TrigKind::SinBig)
        && radius.is_infinite()
        && z.abs() >= PATH_SWITCH * exp_radius(base, false);
    if use_product {
        let e = exp_product::<Complex64>(base, true, Complex64::new(0.0, z), trunc)?;
        return Ok(e.map(|c| if kind == TrigKind::CosBig { c.re } else { c.im }));
    }
    trig_series(kind, base, z, trunc)
}

/// The same functions assembled from the exponentials: `Re/Im e(iz)`,
/// `(e(z) ± e(−z))/2`, and likewise for the big family.
pub fn trig_eval_via_exp(kind: TrigKind, base: &PqBase, z: f64, trunc: &SeriesTruncation) -> Result<f64> {
    let big = kind.is_big();
    match kind {
        TrigKind::CosSmall | TrigKind::SinSmall | TrigKind::CosBig | TrigKind::SinBig => {
            let e = exp_product::<Complex64>(base, big, Complex64::new(0.0, z), trunc)?.value;
            Ok(if matches!(kind, TrigKind::CosSmall | TrigKind::CosBig) {
                e.re
            } else {
                e.im
            })
        }
        _ => {
            let plus = exp_eval(base, big, z, trunc)?.value;
            let minus = exp_eval(base, big, -z, trunc)?.value;
            Ok(if kind.is_odd() {
                (plus - minus) / 2.0
            } else {
                (plus + minus) / 2.0
            })
        }
    }
}

/// One product-form factor sequence `(1 + c rᵏ)^{exponent}`.
pub type ProductFactor<T> = (T, i32);

/// `Π_{k≥0} Π_i (1 + c_i rᵏ)^{e_i}`, multiplying the factors of each `k`
/// together before accumulating.
pub fn joint_product<T: Scalar>(r: f64, factors: &[ProductFactor<T>], trunc: &SeriesTruncation) -> Result<T> {
    if !(r.abs() < 1.0) {
        return Err(Error::Domain("joint product ratio must satisfy |r| < 1".into()));
    }
    let tol = trunc.abs_tol.max(trunc.rel_tol);
    let one = T::from_real(1.0);
    let mut acc = ScaledProduct::<T>::one();
    let mut cs: Vec<ProductFactor<T>> = factors.to_vec();
    let mut small = 0usize;
    for k in 0..trunc.max_terms {
        let mut worst = 0.0f64;
        for (c, e) in cs.iter_mut() {
            let f = one + *c;
            if *e < 0 && f.modulus() <= 64.0 * f64::EPSILON * c.modulus().max(1.0) {
                return Err(Error::Pole { k });
            }
            for _ in 0..e.unsigned_abs() {
                if *e > 0 {
                    acc.mul(f);
                } else {
                    acc.div(f);
                }
            }
            worst = worst.max(c.modulus() * e.unsigned_abs() as f64);
            *c = c.scale(r);
        }
        if acc.is_zero() {
            return Ok(T::from_real(0.0));
        }
        if worst * r.abs() / (1.0 - r.abs()) <= tol {
            small += 1;
            if small >= trunc.consecutive_small {
                return Ok(acc.value());
            }
        } else {
            small = 0;
        }
    }
    Err(Error::Truncation {
        what: "joint product".into(),
        terms: trunc.max_terms,
        partial: acc.value().modulus(),
        last_term: cs.iter().map(|(c, _)| c.modulus()).fold(0.0, f64::max),
    })
}

/// An exponential `E(λt)` or `e(λt)` used as an integration weight.
#[derive(Debug, Clone, Copy)]
pub struct ExpWeight {
    pub base: PqBase,
    pub big: bool,
    pub lambda: f64,
    pub trunc: SeriesTruncation,
}

impl ExpWeight {
    pub fn eval(&self, t: f64) -> Result<f64> {
        let z = self.lambda * t;
        if z == 0.0 {
            return Ok(1.0);
        }
        exp_product(&self.base, self.big, z, &self.trunc).map(|e| e.value)
    }

    /// The weight at `t` as a product factor over `r = q/p`.
    pub fn factor(&self, t: f64) -> ProductFactor<f64> {
        let c = (1.0 - self.base.r()) * self.lambda * t;
        if self.big {
            (c, 1)
        } else {
            (-c, -1)
        }
    }
}

fn gamma_check(z: f64) -> Result<()> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("Gamma argument must be positive, got {z}")));
    }
    Ok(())
}

/// `∫ t^{z−1} E(−qt) d_{p,q}t` over `[0, p/(p − q)]`. The kernel vanishes at
/// `p/(p − q)` and at every grid point beyond it, so this is the whole
/// half-line integral summed on the grid anchored at that zero.
pub fn first_kind_moment(base: &PqBase, z: f64, grid: &GridConfig, trunc: &SeriesTruncation) -> Result<Evaluated<f64>> {
    gamma_check(z)?;
    base.require_grid()?;
    let (p, q) = (base.p(), base.q());
    let kernel = ExpWeight {
        base: *base,
        big: true,
        lambda: -q,
        trunc: *trunc,
    };
    let f = Fallible(|t: f64| Ok(t.powf(z - 1.0) * kernel.eval(t)?));
    pq_integral_finite_eval(&f, base, p / (p - q), grid)
}

/// `∫₀^∞ t^{z−1} e(−pt) d_{p,q}t` on the unit-anchored grid.
pub fn second_kind_moment(base: &PqBase, z: f64, grid: &GridConfig, trunc: &SeriesTruncation) -> Result<Evaluated<f64>> {
    gamma_check(z)?;
    base.require_grid()?;
    let kernel = ExpWeight {
        base: *base,
        big: false,
        lambda: -base.p(),
        trunc: *trunc,
    };
    let f = Fallible(|t: f64| {
        let w = kernel.eval(t)?;
        Ok(if w == 0.0 { 0.0 } else { t.powf(z - 1.0) * w })
    });
    pq_integral_improper_eval(&f, base, grid)
}

/// `Γ_{p,q}(z)`: products with cancelled tails at integers, the moment
/// integral with prefactor `p^{z(z−1)/2}` otherwise.
pub fn gamma_first(base: &PqBase, z: f64, grid: &GridConfig, trunc: &SeriesTruncation) -> Result<f64> {
    gamma_first_eval(base, z, grid, trunc).map(|e| e.value)
}

pub fn gamma_first_eval(base: &PqBase, z: f64, grid: &GridConfig, trunc: &SeriesTruncation) -> Result<Evaluated<f64>> {
    gamma_check(z)?;
    if z.fract() == 0.0 && z <= 10_001.0 {
        let n = z as u32 - 1;
        let (p, q) = (base.p(), base.q());
        let v = pq_power_infinite_partial(base, p, q, PowerSign::Minus, n) / (p - q).powi(n as i32);
        if !v.is_finite() {
            return Err(Error::Range(format!("Gamma({z}) overflows")));
        }
        return Ok(Evaluated {
            value: v,
            terms: n as usize,
            tail: 0.0,
            path: Path::Product,
        });
    }
    gamma_first_integral(base, z, grid, trunc)
}

/// Integral route for every `z > 0`.
pub fn gamma_first_integral(base: &PqBase, z: f64, grid: &GridConfig, trunc: &SeriesTruncation) -> Result<Evaluated<f64>> {
    let m = first_kind_moment(base, z, grid, trunc)?;
    let pre = base.p().powf(z * (z - 1.0) / 2.0);
    Ok(m.map(|v| pre * v))
}

/// `γ_{p,q}(z) = q^{z(z−1)/2} ∫₀^∞ t^{z−1} e(−pt) d_{p,q}t`.
pub fn gamma_second(base: &PqBase, z: f64, grid: &GridConfig, trunc: &SeriesTruncation) -> Result<f64> {
    gamma_second_eval(base, z, grid, trunc).map(|e| e.value)
}

pub fn gamma_second_eval(base: &PqBase, z: f64, grid: &GridConfig, trunc: &SeriesTruncation) -> Result<Evaluated<f64>> {
    let m = second_kind_moment(base, z, grid, trunc)?;
    let pre = base.q().powf(z * (z - 1.0) / 2.0);
    Ok(m.map(|v| pre * v))
}

/// `[z]` for the Gamma recurrences.
pub fn gamma_step(base: &PqBase, z: f64) -> Result<f64> {
    pq_number_real(base, z)
}
