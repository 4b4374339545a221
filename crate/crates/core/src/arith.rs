//! Twin-basic numbers, factorials, binomials and (p,q)-powers.
//!
//! - [`PqBase`] carries the deformation pair and its regime.
//! - [`pochhammer_inf`] is the one convergent infinite product; every
//!   exponential and Gamma product elsewhere is rewritten into it.

use crate::error::{Error, Result};
use crate::numeric::{Evaluated, Path, Scalar, ScaledProduct};

/// Largest index accepted by [`pq_factorial`] and [`pq_binomial`].
pub const FACTORIAL_CAP: u32 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Only series and finite products are meaningful.
    SeriesOnly,
    /// `0 < q < p`, `p ≥ 1`: geometric grids contract into `[0, a]`.
    FullGrid,
}

/// The deformation pair `(p, q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PqBase {
    p: f64,
    q: f64,
    regime: Regime,
}

impl PqBase {
    /// Validates `p ≠ q` and picks the widest regime the pair admits.
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !p.is_finite() || !q.is_finite() {
            return Err(Error::Domain(format!("non-finite base ({p}, {q})")));
        }
        if p == q {
            return Err(Error::Domain(format!("p and q must differ (both {p})")));
        }
        let regime = if q > 0.0 && q < p && p >= 1.0 {
            Regime::FullGrid
        } else {
            Regime::SeriesOnly
        };
        Ok(PqBase { p, q, regime })
    }

    /// Same validation as [`PqBase::new`] but never grants grid operators.
    pub fn series_only(p: f64, q: f64) -> Result<Self> {
        let mut b = Self::new(p, q)?;
        b.regime = Regime::SeriesOnly;
        Ok(b)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `r = q/p`.
    pub fn r(&self) -> f64 {
        self.q / self.p
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn require_grid(&self) -> Result<()> {
        match self.regime {
            Regime::FullGrid => Ok(()),
            Regime::SeriesOnly => Err(Error::Domain(format!(
                "grid operators need 0 < q < p and p >= 1, got p = {}, q = {}",
                self.p, self.q
            ))),
        }
    }

    /// The pair with roles exchanged.
    pub fn swapped(&self) -> Result<PqBase> {
        PqBase::new(self.q, self.p)
    }

    /// `p^i q^j` for integer exponents.
    pub fn pq_pow(&self, i: i32, j: i32) -> f64 {
        self.p.powi(i) * self.q.powi(j)
    }
}

/// Stopping policy for series and infinite products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTruncation {
    pub max_terms: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Number of consecutive below-tolerance terms required to stop.
    pub consecutive_small: usize,
}

impl Default for SeriesTruncation {
    fn default() -> Self {
        SeriesTruncation {
            max_terms: 10_000,
            abs_tol: 0.0,
            rel_tol: 1e-17,
            consecutive_small: 3,
        }
    }
}

impl SeriesTruncation {
    pub fn new(max_terms: usize, abs_tol: f64, rel_tol: f64, consecutive_small: usize) -> Result<Self> {
        let t = SeriesTruncation {
            max_terms,
            abs_tol,
            rel_tol,
            consecutive_small,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_terms == 0 || self.consecutive_small == 0 {
            return Err(Error::Domain("max_terms and consecutive_small must be positive".into()));
        }
        if !(self.abs_tol >= 0.0 && self.rel_tol >= 0.0) || (self.abs_tol == 0.0 && self.rel_tol == 0.0) {
            return Err(Error::Domain(
                "tolerances must be non-negative with at least one positive".into(),
            ));
        }
        Ok(())
    }

    /// Whether `term` is negligible against the running value `scale`.
    pub fn is_small(&self, term: f64, scale: f64) -> bool {
        term <= self.abs_tol || term <= self.rel_tol * scale
    }
}

/// `[n] = (pⁿ − qⁿ)/(p − q)`.
pub fn pq_number(base: &PqBase, n: u32) -> f64 {
    match n {
        0 => 0.0,
        1 => 1.0,
        _ => {
            let n = n as i32;
            (base.p.powi(n) - base.q.powi(n)) / (base.p - base.q)
        }
    }
}

/// `[x] = (p^x − q^x)/(p − q)` for real `x`; needs `p, q > 0`.
pub fn pq_number_real(base: &PqBase, x: f64) -> Result<f64> {
    if base.p <= 0.0 || base.q <= 0.0 {
        return Err(Error::Domain("real-index numbers need p, q > 0".into()));
    }
    if x == x.trunc() && x >= 0.0 && x <= i32::MAX as f64 {
        return Ok(pq_number(base, x as u32));
    }
    Ok((base.p.powf(x) - base.q.powf(x)) / (base.p - base.q))
}

/// `[n]! = [1][2]⋯[n]`.
pub fn pq_factorial(base: &PqBase, n: u32) -> Result<f64> {
    if n > FACTORIAL_CAP {
        return Err(Error::Range(format!("factorial index {n} exceeds {FACTORIAL_CAP}")));
    }
    let mut acc = 1.0;
    for k in 2..=n {
        acc *= pq_number(base, k);
    }
    if !acc.is_finite() {
        return Err(Error::Range(format!("[{n}]! overflows")));
    }
    Ok(acc)
}

/// Gaussian-type binomial `[n]!/([k]![n−k]!)`.
pub fn pq_binomial(base: &PqBase, n: u32, k: i64) -> Result<f64> {
    if n > FACTORIAL_CAP {
        return Err(Error::Range(format!("binomial index {n} exceeds {FACTORIAL_CAP}")));
    }
    if k < 0 || k > n as i64 {
        return Err(Error::Domain(format!("binomial lower index {k} outside 0..={n}")));
    }
    let k = (k as u32).min(n - k as u32);
    let mut acc = 1.0;
    for i in 1..=k {
        acc *= pq_number(base, n - k + i) / pq_number(base, i);
    }
    if !acc.is_finite() {
        return Err(Error::Range(format!("binomial ({n}, {k}) overflows")));
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerSign {
    Minus,
    Plus,
}

impl PowerSign {
    fn apply(self, x: f64, y: f64) -> f64 {
        match self {
            PowerSign::Minus => x - y,
            PowerSign::Plus => x + y,
        }
    }
}

/// `(x ⊖ a)ⁿ = Π_{k<n} (x pᵏ − a qᵏ)`, or with `+` for [`PowerSign::Plus`].
pub fn pq_power_finite(base: &PqBase, x: f64, a: f64, n: u32, sign: PowerSign) -> f64 {
    let mut acc = 1.0;
    let (mut pk, mut qk) = (1.0, 1.0);
    for _ in 0..n {
        acc *= sign.apply(x * pk, a * qk);
        pk *= base.p;
        qk *= base.q;
    }
    acc
}

/// The first `k_terms` factors of the infinite (p,q)-power,
/// `Π_{k<K} (a pᵏ ∓ b qᵏ)`. No convergence is implied.
pub fn pq_power_infinite_partial(base: &PqBase, a: f64, b: f64, sign: PowerSign, k_terms: u32) -> f64 {
    pq_power_finite(base, a, b, k_terms, sign)
}

/// `(z; r)_∞ = Π_{k≥0} (1 − z rᵏ)`.
pub fn pochhammer_inf<T: Scalar>(r: f64, z: T, trunc: &SeriesTruncation) -> Result<T> {
    pochhammer_inf_eval(r, z, trunc).map(|e| e.value)
}

/// [`pochhammer_inf`] with diagnostics. The tail estimate bounds the
/// relative contribution of the omitted factors.
pub fn pochhammer_inf_eval<T: Scalar>(r: f64, z: T, trunc: &SeriesTruncation) -> Result<Evaluated<T>> {
    if !(r.abs() < 1.0) {
        return Err(Error::Domain(format!("pochhammer ratio |r| = {} must be < 1", r.abs())));
    }
    trunc.validate()?;
    let tol = trunc.abs_tol.max(trunc.rel_tol);
    let one = T::from_real(1.0);
    let mut acc = ScaledProduct::<T>::one();
    let mut zk = z;
    let mut small = 0usize;
    for k in 0..trunc.max_terms {
        let factor = one - zk;
        acc.mul(factor);
        if acc.is_zero() {
            return Ok(Evaluated {
                value: T::from_real(0.0),
                terms: k + 1,
                tail: 0.0,
                path: Path::Product,
            });
        }
        let tail = zk.modulus() * r.abs() / (1.0 - r.abs());
        if tail <= tol {
            small += 1;
            if small >= trunc.consecutive_small {
                return Ok(Evaluated {
                    value: acc.value(),
                    terms: k + 1,
                    tail,
                    path: Path::Product,
                });
            }
        } else {
            small = 0;
        }
        zk = zk.scale(r);
    }
    let partial = acc.value().modulus();
    Err(Error::Truncation {
        what: "infinite product".into(),
        terms: trunc.max_terms,
        partial,
        last_term: zk.modulus(),
    })
}
