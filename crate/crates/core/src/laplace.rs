//! The two (p,q)-Laplace transforms.
//!
//! - [`transform_numeric`] sums the defining integral on a geometric grid.
//! - [`transform_table`] returns the closed form as a [`TransformExpr`].
//! - [`invert_by_table`] reads the table right to left.
//!
//! The first kind uses the kernel `E(−qst)`, which vanishes at every grid
//! point `r^{−i}/((1 − r)qs)`, `i ≥ 0`. On the grid anchored there the
//! half-line integral is exactly the finite integral up to
//! `p/((p − q)s)`, and that is what is summed. The second kind uses
//! `e(−pst)`, which is summed on the unit-anchored two-sided grid.

use crate::arith::{pq_factorial, PqBase, SeriesTruncation};
use crate::calculus::{
    pq_derivative_iterated, pq_integral_finite_eval, pq_integral_improper_eval, Fallible, GridConfig,
    ScalarFunction,
};
use crate::error::{Error, Result, Tail};
use crate::numeric::{choose2, CompensatedSum, Evaluated, Path};
use crate::special::{
    exp_big, exp_radius, exp_small, gamma_first_integral, gamma_second_eval, joint_product,
    trig_eval, trig_series_coefficients, ExpWeight, TrigKind,
};
use num_complex::Complex64;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    FirstKind,
    SecondKind,
}

impl TransformKind {
    /// The dilation parameter of the kind: `p` for the first, `q` for the
    /// second.
    fn own(self, base: &PqBase) -> f64 {
        match self {
            TransformKind::FirstKind => base.p(),
            TransformKind::SecondKind => base.q(),
        }
    }

    /// `p^i` or `q^i` as exponent pair.
    fn own_exps(self, i: i32) -> (i32, i32) {
        match self {
            TransformKind::FirstKind => (i, 0),
            TransformKind::SecondKind => (0, i),
        }
    }

    /// Exponent pair of the other parameter.
    fn other_exps(self, i: i32) -> (i32, i32) {
        match self {
            TransformKind::FirstKind => (0, i),
            TransformKind::SecondKind => (i, 0),
        }
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransformKind::FirstKind => "first",
            TransformKind::SecondKind => "second",
        })
    }
}

impl FromStr for TransformKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first" | "1" => Ok(TransformKind::FirstKind),
            "second" | "2" => Ok(TransformKind::SecondKind),
            _ => Err(Error::Domain(format!("unknown transform kind '{s}'"))),
        }
    }
}

/// Closed-form function families.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionExpr {
    Const(f64),
    /// `tⁿ`, `n ≥ 1`.
    Monomial(u32),
    /// `t^α`, `α > −1`.
    Power(f64),
    ExpSmall(f64),
    ExpBig(f64),
    Cos(f64),
    Sin(f64),
    BigCos(f64),
    BigSin(f64),
    Cosh(f64),
    Sinh(f64),
    BigCosh(f64),
    BigSinh(f64),
    /// `tⁿ e(at)`, `n ≥ 1`.
    MonomialTimesExpSmall(u32, f64),
    /// `tⁿ E(at)`, `n ≥ 1`.
    MonomialTimesExpBig(u32, f64),
    /// Flat linear combination.
    Sum(Vec<(f64, FunctionExpr)>),
}

impl FunctionExpr {
    /// Structural checks. Zero exponents and zero rates are rejected where
    /// they would duplicate a simpler family.
    pub fn validate(&self) -> Result<()> {
        use FunctionExpr::*;
        let rate = |a: f64| -> Result<()> {
            if a == 0.0 || !a.is_finite() {
                Err(Error::Domain(format!("exponential rate must be finite and nonzero, got {a}")))
            } else {
                Ok(())
            }
        };
        let finite = |a: f64| -> Result<()> {
            if a.is_finite() {
                Ok(())
            } else {
                Err(Error::Domain(format!("parameter {a} is not finite")))
            }
        };
        match self {
            Const(c) => finite(*c),
            Monomial(0) | MonomialTimesExpSmall(0, _) | MonomialTimesExpBig(0, _) => Err(Error::Domain(
                "exponent 0: use Const(1) or the bare exponential".into(),
            )),
            Monomial(_) => Ok(()),
            Power(alpha) => {
                if *alpha > -1.0 && alpha.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Domain(format!("t^α needs α > −1, got {alpha}")))
                }
            }
            ExpSmall(a) | ExpBig(a) | MonomialTimesExpSmall(_, a) | MonomialTimesExpBig(_, a) => rate(*a),
            Cos(a) | Sin(a) | BigCos(a) | BigSin(a) | Cosh(a) | Sinh(a) | BigCosh(a) | BigSinh(a) => finite(*a),
            Sum(terms) => {
                for (c, e) in terms {
                    finite(*c)?;
                    if matches!(e, Sum(_)) {
                        return Err(Error::Domain("sums must be flat".into()));
                    }
                    e.validate()?;
                }
                Ok(())
            }
        }
    }

    /// Attach a base so the expression can be evaluated.
    pub fn bind(&self, base: PqBase, trunc: SeriesTruncation) -> BoundExpr<'_> {
        BoundExpr {
            expr: self,
            base,
            trunc,
        }
    }

    pub fn eval(&self, base: &PqBase, t: f64, trunc: &SeriesTruncation) -> Result<f64> {
        self.bind(*base, *trunc).eval(t)
    }

    /// Power-series coefficients `c_m` of `t^m`, `m < count`.
    pub fn taylor_coefficients(&self, base: &PqBase, count: usize) -> Result<Vec<f64>> {
        use FunctionExpr::*;
        let mut out = vec![0.0; count];
        let scaled = |coeffs: Vec<f64>, a: f64, shift: usize, out: &mut Vec<f64>| {
            let mut am = 1.0;
            for (m, c) in coeffs.into_iter().enumerate() {
                if m + shift < out.len() {
                    out[m + shift] += c * am;
                }
                am *= a;
            }
        };
        match self {
            Const(c) => {
                if count > 0 {
                    out[0] = *c;
                }
            }
            Monomial(n) => {
                if (*n as usize) < count {
                    out[*n as usize] = 1.0;
                }
            }
            Power(alpha) => {
                if alpha.fract() != 0.0 || *alpha < 0.0 {
                    return Err(Error::Unsupported(format!("t^{alpha} has no power series at 0")));
                }
                let n = *alpha as usize;
                if n < count {
                    out[n] = 1.0;
                }
            }
            ExpSmall(a) => scaled(exp_coefficients(base, false, count), *a, 0, &mut out),
            ExpBig(a) => scaled(exp_coefficients(base, true, count), *a, 0, &mut out),
            MonomialTimesExpSmall(n, a) => {
                scaled(exp_coefficients(base, false, count), *a, *n as usize, &mut out)
            }
            MonomialTimesExpBig(n, a) => scaled(exp_coefficients(base, true, count), *a, *n as usize, &mut out),
            Cos(a) | Sin(a) | BigCos(a) | BigSin(a) | Cosh(a) | Sinh(a) | BigCosh(a) | BigSinh(a) => {
                let kind = trig_kind(self).expect("trig family");
                scaled(trig_series_coefficients(kind, base, count), *a, 0, &mut out)
            }
            Sum(terms) => {
                for (c, e) in terms {
                    for (o, v) in out.iter_mut().zip(e.taylor_coefficients(base, count)?) {
                        *o += c * v;
                    }
                }
            }
        }
        Ok(out)
    }
}

fn exp_coefficients(base: &PqBase, big: bool, count: usize) -> Vec<f64> {
    // cosh + sinh reassembles the exponential series
    let (even, odd) = if big {
        (TrigKind::CoshBig, TrigKind::SinhBig)
    } else {
        (TrigKind::CoshSmall, TrigKind::SinhSmall)
    };
    trig_series_coefficients(even, base, count)
        .into_iter()
        .zip(trig_series_coefficients(odd, base, count))
        .map(|(a, b)| a + b)
        .collect()
}

fn trig_kind(e: &FunctionExpr) -> Option<TrigKind> {
    use FunctionExpr::*;
    Some(match e {
        Cos(_) => TrigKind::CosSmall,
        Sin(_) => TrigKind::SinSmall,
        BigCos(_) => TrigKind::CosBig,
        BigSin(_) => TrigKind::SinBig,
        Cosh(_) => TrigKind::CoshSmall,
        Sinh(_) => TrigKind::SinhSmall,
        BigCosh(_) => TrigKind::CoshBig,
        BigSinh(_) => TrigKind::SinhBig,
        _ => return None,
    })
}

fn fmt_coeff(c: f64) -> String {
    format!("{c:?}")
}

impl fmt::Display for FunctionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use FunctionExpr::*;
        let arg = |a: &f64| format!("{}t", fmt_coeff(*a));
        match self {
            Const(c) => write!(f, "{}", fmt_coeff(*c)),
            Monomial(1) => write!(f, "t"),
            Monomial(n) => write!(f, "t^{n}"),
            Power(a) => write!(f, "t^{}", fmt_coeff(*a)),
            ExpSmall(a) => write!(f, "e({})", arg(a)),
            ExpBig(a) => write!(f, "E({})", arg(a)),
            Cos(a) => write!(f, "cos({})", arg(a)),
            Sin(a) => write!(f, "sin({})", arg(a)),
            BigCos(a) => write!(f, "Cos({})", arg(a)),
            BigSin(a) => write!(f, "Sin({})", arg(a)),
            Cosh(a) => write!(f, "cosh({})", arg(a)),
            Sinh(a) => write!(f, "sinh({})", arg(a)),
            BigCosh(a) => write!(f, "Cosh({})", arg(a)),
            BigSinh(a) => write!(f, "Sinh({})", arg(a)),
            MonomialTimesExpSmall(n, a) => write!(f, "{}*e({})", Monomial(*n), arg(a)),
            MonomialTimesExpBig(n, a) => write!(f, "{}*E({})", Monomial(*n), arg(a)),
            Sum(terms) => {
                if terms.is_empty() {
                    return write!(f, "0*1");
                }
                for (i, (c, e)) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{}*{}", fmt_coeff(*c), e)?;
                }
                Ok(())
            }
        }
    }
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Domain(format!(
            "cannot parse function at byte {}: {msg}",
            self.pos
        ))
    }

    /// An optionally signed decimal literal. `e` counts as an exponent
    /// marker only when followed by a digit or a signed digit.
    fn number(&mut self) -> Option<f64> {
        self.ws();
        let start = self.pos;
        let mut i = self.pos;
        let s = self.s;
        if i < s.len() && (s[i] == b'+' || s[i] == b'-') {
            i += 1;
        }
        let digits_start = i;
        while i < s.len() && (s[i].is_ascii_digit() || s[i] == b'.') {
            i += 1;
        }
        if i == digits_start {
            return None;
        }
        if i < s.len() && (s[i] == b'e' || s[i] == b'E') {
            let mut j = i + 1;
            if j < s.len() && (s[j] == b'+' || s[j] == b'-') {
                j += 1;
            }
            if j < s.len() && s[j].is_ascii_digit() {
                while j < s.len() && s[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        let text = std::str::from_utf8(&s[start..i]).ok()?;
        let v = text.parse::<f64>().ok()?;
        self.pos = i;
        Some(v)
    }

    fn word(&mut self) -> String {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.s[start..self.pos]).into_owned()
    }

    /// `[number ['*']] t`, or `-t`.
    fn rate(&mut self) -> Result<f64> {
        let save = self.pos;
        let a = match self.number() {
            Some(v) => {
                self.eat(b'*');
                v
            }
            None => {
                self.pos = save;
                if self.eat(b'-') {
                    -1.0
                } else {
                    1.0
                }
            }
        };
        if self.word() != "t" {
            return Err(self.err("expected an argument of the form a*t"));
        }
        Ok(a)
    }

    fn atom(&mut self) -> Result<FunctionExpr> {
        use FunctionExpr::*;
        let w = self.word();
        match w.as_str() {
            "t" => {
                let mut mono = Monomial(1);
                if self.eat(b'^') {
                    self.ws();
                    let start = self.pos;
                    let v = self.number().ok_or_else(|| self.err("expected exponent"))?;
                    let text = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
                    let integral = !text.contains(['.', 'e', 'E']) && v >= 1.0;
                    mono = if integral { Monomial(v as u32) } else { Power(v) };
                }
                if self.peek() == Some(b'*') {
                    let save = self.pos;
                    self.pos += 1;
                    let w2 = self.word();
                    if (w2 == "e" || w2 == "E") && self.eat(b'(') {
                        let a = self.rate()?;
                        self.expect(b')')?;
                        let n = match mono {
                            Monomial(n) => n,
                            _ => return Err(self.err("only integer powers multiply exponentials")),
                        };
                        return Ok(if w2 == "e" {
                            MonomialTimesExpSmall(n, a)
                        } else {
                            MonomialTimesExpBig(n, a)
                        });
                    }
                    self.pos = save;
                }
                Ok(mono)
            }
            "" => Err(self.err("expected a function")),
            name => {
                self.expect(b'(')?;
                let a = self.rate()?;
                self.expect(b')')?;
                Ok(match name {
                    "e" | "exp" => ExpSmall(a),
                    "E" | "Exp" => ExpBig(a),
                    "cos" => Cos(a),
                    "sin" => Sin(a),
                    "Cos" => BigCos(a),
                    "Sin" => BigSin(a),
                    "cosh" => Cosh(a),
                    "sinh" => Sinh(a),
                    "Cosh" => BigCosh(a),
                    "Sinh" => BigSinh(a),
                    other => return Err(self.err(&format!("unknown function '{other}'"))),
                })
            }
        }
    }

    /// Returns `(coefficient, explicit, atom)`.
    fn term(&mut self) -> Result<(f64, bool, Option<FunctionExpr>)> {
        let save = self.pos;
        if let Some(c) = self.number() {
            if self.eat(b'*') {
                if let Some(v) = self.number() {
                    return Ok((c, true, Some(FunctionExpr::Const(v))));
                }
                return Ok((c, true, Some(self.atom()?)));
            }
            if matches!(self.peek(), Some(ch) if ch.is_ascii_alphabetic()) {
                return Ok((c, true, Some(self.atom()?)));
            }
            return Ok((c, false, None));
        }
        self.pos = save;
        let sign = if self.eat(b'-') { -1.0 } else { 1.0 };
        Ok((sign, sign < 0.0, Some(self.atom()?)))
    }
}

impl FromStr for FunctionExpr {
    type Err = Error;

    /// Grammar: terms `[c[*]]atom` or `c` joined by `+`/`-`; atoms `t`,
    /// `t^n`, `t^α`, `t^n*e(at)`, `t^n*E(at)`, `e(at)`, `E(at)`, `cos`,
    /// `sin`, `Cos`, `Sin`, `cosh`, `sinh`, `Cosh`, `Sinh`.
    fn from_str(s: &str) -> Result<Self> {
        let mut cur = Cursor { s: s.as_bytes(), pos: 0 };
        let mut terms = Vec::new();
        loop {
            let (c, explicit, atom) = cur.term()?;
            terms.push((c, explicit, atom));
            match cur.peek() {
                None => break,
                Some(b'+') => {
                    cur.pos += 1;
                }
                Some(b'-') => {
                    // leave the sign for the next term
                }
                Some(_) => return Err(cur.err("unexpected trailing input")),
            }
        }
        let expr = if terms.len() == 1 {
            match terms.pop().unwrap() {
                (c, _, None) => FunctionExpr::Const(c),
                (c, explicit, Some(atom)) => {
                    if explicit {
                        FunctionExpr::Sum(vec![(c, atom)])
                    } else {
                        atom
                    }
                }
            }
        } else {
            FunctionExpr::Sum(
                terms
                    .into_iter()
                    .map(|(c, _, a)| (c, a.unwrap_or(FunctionExpr::Const(1.0))))
                    .collect(),
            )
        };
        expr.validate()?;
        Ok(expr)
    }
}

/// A [`FunctionExpr`] with its base, usable wherever a [`ScalarFunction`]
/// is expected.
#[derive(Debug, Clone, Copy)]
pub struct BoundExpr<'a> {
    pub expr: &'a FunctionExpr,
    pub base: PqBase,
    pub trunc: SeriesTruncation,
}

impl BoundExpr<'_> {
    fn child<'b>(&self, e: &'b FunctionExpr) -> BoundExpr<'b> {
        BoundExpr {
            expr: e,
            base: self.base,
            trunc: self.trunc,
        }
    }

    fn radius_check(&self, z: f64) -> Result<()> {
        let radius = exp_radius(&self.base, false);
        if z.abs() >= radius {
            return Err(Error::Domain(format!(
                "argument {z} outside the series radius {radius}"
            )));
        }
        Ok(())
    }

    /// `E(λt)·w(t)` or `e(λt)·w(t)` as one merged product; complex `λ`
    /// covers the trigonometric families.
    fn merged(&self, big: bool, lambda: Complex64, t: f64, w: &ExpWeight) -> Result<Complex64> {
        let r = self.base.r();
        let c = lambda * ((1.0 - r) * t);
        let own = if big { (c, 1) } else { (-c, -1) };
        let (wc, we) = w.factor(t);
        joint_product(r, &[own, (Complex64::new(wc, 0.0), we)], &self.trunc)
    }

    fn merged_real(&self, big: bool, lambda: f64, t: f64, w: &ExpWeight) -> Result<f64> {
        let r = self.base.r();
        let c = (1.0 - r) * lambda * t;
        let own = if big { (c, 1) } else { (-c, -1) };
        joint_product(r, &[own, w.factor(t)], &self.trunc)
    }
}

impl ScalarFunction for BoundExpr<'_> {
    fn eval(&self, t: f64) -> Result<f64> {
        use FunctionExpr::*;
        let b = &self.base;
        let tr = &self.trunc;
        match self.expr {
            Const(c) => Ok(*c),
            Monomial(n) => Ok(t.powi(*n as i32)),
            Power(alpha) => power(t, *alpha),
            ExpSmall(a) => exp_small(b, a * t, tr),
            ExpBig(a) => exp_big(b, a * t, tr),
            MonomialTimesExpSmall(n, a) => Ok(t.powi(*n as i32) * exp_small(b, a * t, tr)?),
            MonomialTimesExpBig(n, a) => Ok(t.powi(*n as i32) * exp_big(b, a * t, tr)?),
            Cos(a) | Sin(a) | BigCos(a) | BigSin(a) | Cosh(a) | Sinh(a) | BigCosh(a) | BigSinh(a) => {
                trig_eval(trig_kind(self.expr).expect("trig family"), b, a * t, tr)
            }
            Sum(terms) => {
                let mut acc = CompensatedSum::new();
                for (c, e) in terms {
                    acc.add(c * self.child(e).eval(t)?);
                }
                Ok(acc.value())
            }
        }
    }

    fn eval_weighted(&self, t: f64, w: &ExpWeight) -> Result<f64> {
        use FunctionExpr::*;
        let tn = |n: &u32| t.powi(*n as i32);
        let i = Complex64::new(0.0, 1.0);
        match self.expr {
            ExpSmall(a) => self.merged_real(false, *a, t, w),
            ExpBig(a) => self.merged_real(true, *a, t, w),
            MonomialTimesExpSmall(n, a) => Ok(tn(n) * self.merged_real(false, *a, t, w)?),
            MonomialTimesExpBig(n, a) => Ok(tn(n) * self.merged_real(true, *a, t, w)?),
            Cos(a) | Sin(a) => {
                self.radius_check(a * t)?;
                let z = self.merged(false, i * *a, t, w)?;
                Ok(if matches!(self.expr, Cos(_)) { z.re } else { z.im })
            }
            BigCos(a) => Ok(self.merged(true, i * *a, t, w)?.re),
            BigSin(a) => Ok(self.merged(true, i * *a, t, w)?.im),
            Cosh(a) | Sinh(a) => {
                self.radius_check(a * t)?;
                let plus = self.merged_real(false, *a, t, w)?;
                let minus = self.merged_real(false, -*a, t, w)?;
                Ok(if matches!(self.expr, Cosh(_)) {
                    (plus + minus) / 2.0
                } else {
                    (plus - minus) / 2.0
                })
            }
            BigCosh(a) | BigSinh(a) => {
                let plus = self.merged_real(true, *a, t, w)?;
                let minus = self.merged_real(true, -*a, t, w)?;
                Ok(if matches!(self.expr, BigCosh(_)) {
                    (plus + minus) / 2.0
                } else {
                    (plus - minus) / 2.0
                })
            }
            Sum(terms) => {
                let mut acc = CompensatedSum::new();
                for (c, e) in terms {
                    acc.add(c * self.child(e).eval_weighted(t, w)?);
                }
                Ok(acc.value())
            }
            Const(_) | Monomial(_) | Power(_) => {
                let wv = w.eval(t)?;
                if wv == 0.0 {
                    return Ok(0.0);
                }
                Ok(self.eval(t)? * wv)
            }
        }
    }
}

fn power(t: f64, alpha: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::Domain(format!("t^{alpha} at negative t = {t}")));
    }
    if t == 0.0 && alpha < 0.0 {
        return Err(Error::Domain(format!("t^{alpha} is singular at 0")));
    }
    Ok(t.powf(alpha))
}

fn kernel(base: &PqBase, s: f64, kind: TransformKind, trunc: &SeriesTruncation) -> ExpWeight {
    match kind {
        TransformKind::FirstKind => ExpWeight {
            base: *base,
            big: true,
            lambda: -base.q() * s,
            trunc: *trunc,
        },
        TransformKind::SecondKind => ExpWeight {
            base: *base,
            big: false,
            lambda: -base.p() * s,
            trunc: *trunc,
        },
    }
}

/// `L{f}(s)` by grid summation, default product truncation.
pub fn transform_numeric<F: ScalarFunction + ?Sized>(
    f: &F,
    base: &PqBase,
    s: f64,
    kind: TransformKind,
    grid: &GridConfig,
) -> Result<f64> {
    transform_numeric_with(f, base, s, kind, grid, &SeriesTruncation::default()).map(|e| e.value)
}

pub fn transform_numeric_with<F: ScalarFunction + ?Sized>(
    f: &F,
    base: &PqBase,
    s: f64,
    kind: TransformKind,
    grid: &GridConfig,
    trunc: &SeriesTruncation,
) -> Result<Evaluated<f64>> {
    base.require_grid()?;
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!("transform variable must be positive, got {s}")));
    }
    let w = kernel(base, s, kind, trunc);
    let integrand = Fallible(|t: f64| f.eval_weighted(t, &w));
    let result = match kind {
        TransformKind::FirstKind => {
            let upper = base.p() / ((base.p() - base.q()) * s);
            pq_integral_finite_eval(&integrand, base, upper, grid)
        }
        TransformKind::SecondKind => pq_integral_improper_eval(&integrand, base, grid),
    };
    result.map_err(|e| match e {
        Error::GridTail { tail, last_term, .. } => Error::TransformDivergence { tail, last_term },
        Error::Truncation { last_term, .. } => Error::TransformDivergence {
            tail: Tail::Right,
            last_term,
        },
        other => other,
    })
}

/// `coeff · p^{p_exp} q^{q_exp}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PqMonomial {
    pub coeff: f64,
    pub p_exp: i32,
    pub q_exp: i32,
}

impl PqMonomial {
    pub fn new(coeff: f64, p_exp: i32, q_exp: i32) -> Self {
        PqMonomial { coeff, p_exp, q_exp }
    }

    pub fn zero() -> Self {
        PqMonomial::new(0.0, 0, 0)
    }

    pub fn eval(&self, base: &PqBase) -> f64 {
        self.coeff * base.pq_pow(self.p_exp, self.q_exp)
    }

    pub fn times(&self, o: &PqMonomial) -> PqMonomial {
        PqMonomial::new(self.coeff * o.coeff, self.p_exp + o.p_exp, self.q_exp + o.q_exp)
    }
}

impl fmt::Display for PqMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_coeff(self.coeff))?;
        write_pq(f, self.p_exp, self.q_exp)
    }
}

fn write_pq(f: &mut fmt::Formatter<'_>, i: i32, j: i32) -> fmt::Result {
    match i {
        0 => {}
        1 => write!(f, "*p")?,
        _ => write!(f, "*p^{i}")?,
    }
    match j {
        0 => Ok(()),
        1 => write!(f, "*q"),
        _ => write!(f, "*q^{j}"),
    }
}

/// `p^{s_p} q^{s_q} s − shift · p^{shift_p} q^{shift_q}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFactor {
    pub s_p: i32,
    pub s_q: i32,
    pub shift: f64,
    pub shift_p: i32,
    pub shift_q: i32,
}

impl LinearFactor {
    /// The bare factor `s`.
    pub fn s() -> Self {
        LinearFactor::new((0, 0), 0.0, (0, 0))
    }

    pub fn new(s_pq: (i32, i32), shift: f64, shift_pq: (i32, i32)) -> Self {
        LinearFactor {
            s_p: s_pq.0,
            s_q: s_pq.1,
            shift,
            shift_p: shift_pq.0,
            shift_q: shift_pq.1,
        }
    }

    pub fn eval(&self, base: &PqBase, s: f64) -> f64 {
        base.pq_pow(self.s_p, self.s_q) * s - self.shift * base.pq_pow(self.shift_p, self.shift_q)
    }

    /// The zero of the factor in `s`.
    pub fn root(&self, base: &PqBase) -> f64 {
        self.shift * base.pq_pow(self.shift_p - self.s_p, self.shift_q - self.s_q)
    }
}

impl fmt::Display for LinearFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut lead = String::new();
        match self.s_p {
            0 => {}
            1 => lead.push_str("p*"),
            i => lead.push_str(&format!("p^{i}*")),
        }
        match self.s_q {
            0 => {}
            1 => lead.push_str("q*"),
            j => lead.push_str(&format!("q^{j}*")),
        }
        if self.shift == 0.0 {
            return write!(f, "{lead}s");
        }
        write!(f, "({lead}s - {}", fmt_coeff(self.shift))?;
        write_pq(f, self.shift_p, self.shift_q)?;
        write!(f, ")")
    }
}

/// `numerator / Π factors`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalExpr {
    pub numerator: PqMonomial,
    pub factors: Vec<LinearFactor>,
}

impl RationalExpr {
    /// `c/s`.
    pub fn over_s(c: f64) -> Self {
        RationalExpr {
            numerator: PqMonomial::new(c, 0, 0),
            factors: vec![LinearFactor::s()],
        }
    }

    /// Pulls every p/q power common to a factor's two terms into the
    /// numerator and orders factors by descending p- then q-exponent.
    pub fn canonical(&self) -> RationalExpr {
        let mut num = self.numerator;
        let mut factors: Vec<LinearFactor> = self
            .factors
            .iter()
            .map(|f| {
                let (mp, mq) = if f.shift == 0.0 {
                    (f.s_p, f.s_q)
                } else {
                    (f.s_p.min(f.shift_p), f.s_q.min(f.shift_q))
                };
                num.p_exp -= mp;
                num.q_exp -= mq;
                if f.shift == 0.0 {
                    LinearFactor::s()
                } else {
                    LinearFactor::new((f.s_p - mp, f.s_q - mq), f.shift, (f.shift_p - mp, f.shift_q - mq))
                }
            })
            .collect();
        factors.sort_by(|a, b| {
            b.s_p
                .cmp(&a.s_p)
                .then(b.s_q.cmp(&a.s_q))
                .then(a.shift.total_cmp(&b.shift))
                .then(a.shift_p.cmp(&b.shift_p))
                .then(a.shift_q.cmp(&b.shift_q))
        });
        RationalExpr {
            numerator: num,
            factors,
        }
    }

    /// `s → p^i q^j s`.
    pub fn substitute_scale(&self, i: i32, j: i32) -> RationalExpr {
        RationalExpr {
            numerator: self.numerator,
            factors: self
                .factors
                .iter()
                .map(|f| LinearFactor {
                    s_p: f.s_p + i,
                    s_q: f.s_q + j,
                    ..*f
                })
                .collect(),
        }
        .canonical()
    }

    /// Multiply by `s^k`; positive `k` cancels bare `s` factors.
    pub fn times_s_power(&self, k: i32) -> Result<RationalExpr> {
        let mut out = self.canonical();
        if k <= 0 {
            for _ in 0..(-k) {
                out.factors.push(LinearFactor::s());
            }
        } else {
            for _ in 0..k {
                let pos = out
                    .factors
                    .iter()
                    .position(|f| f.shift == 0.0)
                    .ok_or_else(|| Error::Unsupported("no factor s left to cancel".into()))?;
                out.factors.remove(pos);
            }
        }
        Ok(out.canonical())
    }

    pub fn times_monomial(&self, m: &PqMonomial) -> RationalExpr {
        RationalExpr {
            numerator: self.numerator.times(m),
            factors: self.factors.clone(),
        }
        .canonical()
    }

    pub fn times(&self, o: &RationalExpr) -> RationalExpr {
        let mut factors = self.factors.clone();
        factors.extend(o.factors.iter().copied());
        RationalExpr {
            numerator: self.numerator.times(&o.numerator),
            factors,
        }
        .canonical()
    }

    pub fn eval(&self, base: &PqBase, s: f64) -> f64 {
        let mut den = 1.0;
        for f in &self.factors {
            den *= f.eval(base, s);
        }
        self.numerator.eval(base) / den
    }

    pub fn s_min(&self, base: &PqBase) -> f64 {
        self.factors.iter().map(|f| f.root(base)).fold(0.0, f64::max)
    }
}

impl fmt::Display for RationalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} / (", self.numerator)?;
        for (i, fac) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "{fac}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadBase {
    P,
    Q,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadSign {
    Plus,
    Minus,
}

/// `Σ_{n≥0} lead · ratio^{C(n,2)} · stepⁿ · s^{−n−1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRule {
    pub lead: f64,
    pub ratio: f64,
    pub step: f64,
}

impl SeriesRule {
    pub fn coefficient(&self, n: u32) -> f64 {
        self.lead * self.ratio.powf(choose2(n as i64) as f64) * self.step.powi(n as i32)
    }

    pub fn eval(&self, s: f64, trunc: &SeriesTruncation) -> Result<Evaluated<f64>> {
        let mut acc = CompensatedSum::new();
        let x = self.step / s;
        let mut term = self.lead / s;
        let mut rk = 1.0;
        let mut small = 0usize;
        let mut growing = 0usize;
        for n in 0..trunc.max_terms {
            if n > 0 {
                let prev = term.abs();
                term *= rk * x;
                rk *= self.ratio;
                if term.abs() > prev && self.ratio.abs() >= 1.0 {
                    growing += 1;
                    if growing >= trunc.consecutive_small {
                        return Err(Error::Divergence { terms: n + 1, last_term: term });
                    }
                } else {
                    growing = 0;
                }
            }
            if !term.is_finite() {
                return Err(Error::Divergence { terms: n + 1, last_term: term });
            }
            acc.add(term);
            if trunc.is_small(term.abs(), acc.value().abs()) {
                small += 1;
                if small >= trunc.consecutive_small {
                    return Ok(Evaluated {
                        value: acc.value(),
                        terms: n + 1,
                        tail: term.abs(),
                        path: Path::Series,
                    });
                }
            } else {
                small = 0;
            }
        }
        Err(Error::Truncation {
            what: "transform series".into(),
            terms: trunc.max_terms,
            partial: acc.value(),
            last_term: term,
        })
    }

    pub fn s_min(&self) -> f64 {
        if self.ratio.abs() < 1.0 {
            0.0
        } else if self.ratio.abs() == 1.0 {
            self.step.abs()
        } else {
            f64::INFINITY
        }
    }
}

/// Transform-domain expressions.
#[derive(Debug, Clone, PartialEq)]
pub enum TransformExpr {
    Rational(RationalExpr),
    /// `(s_coeff·s + a_coeff·a) / ((βs)² ± a²)`, `β = p` or `q`.
    Quadratic {
        s_coeff: PqMonomial,
        a_coeff: PqMonomial,
        base_param: QuadBase,
        a: f64,
        sign: QuadSign,
    },
    /// `coeff / s^{α+1}`.
    PowerLaw { coeff: f64, alpha: f64 },
    Series(SeriesRule),
    /// `factor · inner(s / s_scale)`.
    Scaled {
        inner: Box<TransformExpr>,
        factor: f64,
        s_scale: f64,
    },
    Sum(Vec<(f64, TransformExpr)>),
}

impl TransformExpr {
    pub fn eval(&self, base: &PqBase, s: f64) -> Result<f64> {
        self.eval_with(base, s, &SeriesTruncation::default())
    }

    pub fn eval_with(&self, base: &PqBase, s: f64, trunc: &SeriesTruncation) -> Result<f64> {
        Ok(match self {
            TransformExpr::Rational(r) => r.eval(base, s),
            TransformExpr::Quadratic {
                s_coeff,
                a_coeff,
                base_param,
                a,
                sign,
            } => {
                let beta = match base_param {
                    QuadBase::P => base.p(),
                    QuadBase::Q => base.q(),
                };
                let bs = beta * s;
                let den = match sign {
                    QuadSign::Plus => bs * bs + a * a,
                    QuadSign::Minus => bs * bs - a * a,
                };
                (s_coeff.eval(base) * s + a_coeff.eval(base) * a) / den
            }
            TransformExpr::PowerLaw { coeff, alpha } => coeff / s.powf(alpha + 1.0),
            TransformExpr::Series(rule) => rule.eval(s, trunc)?.value,
            TransformExpr::Scaled { inner, factor, s_scale } => factor * inner.eval_with(base, s / s_scale, trunc)?,
            TransformExpr::Sum(terms) => {
                let mut acc = CompensatedSum::new();
                for (c, t) in terms {
                    acc.add(c * t.eval_with(base, s, trunc)?);
                }
                acc.value()
            }
        })
    }

    /// Lower end of the validity half-line `s > s_min`.
    pub fn s_min(&self, base: &PqBase) -> f64 {
        match self {
            TransformExpr::Rational(r) => r.s_min(base),
            TransformExpr::Quadratic { base_param, a, .. } => {
                let beta = match base_param {
                    QuadBase::P => base.p(),
                    QuadBase::Q => base.q(),
                };
                (a / beta).abs()
            }
            TransformExpr::PowerLaw { .. } => 0.0,
            TransformExpr::Series(rule) => rule.s_min(),
            TransformExpr::Scaled { inner, s_scale, .. } => inner.s_min(base) * s_scale.abs(),
            TransformExpr::Sum(terms) => terms.iter().map(|(_, t)| t.s_min(base)).fold(0.0, f64::max),
        }
    }

    /// Canonical rational factors; other shapes are unchanged.
    pub fn canonical(&self) -> TransformExpr {
        match self {
            TransformExpr::Rational(r) => TransformExpr::Rational(r.canonical()),
            TransformExpr::Scaled { inner, factor, s_scale } => TransformExpr::Scaled {
                inner: Box::new(inner.canonical()),
                factor: *factor,
                s_scale: *s_scale,
            },
            TransformExpr::Sum(terms) => {
                TransformExpr::Sum(terms.iter().map(|(c, t)| (*c, t.canonical())).collect())
            }
            other => other.clone(),
        }
    }
}

impl fmt::Display for TransformExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransformExpr::Rational(r) => write!(f, "{r}"),
            TransformExpr::Quadratic {
                s_coeff,
                a_coeff,
                base_param,
                a,
                sign,
            } => {
                let beta = match base_param {
                    QuadBase::P => "p",
                    QuadBase::Q => "q",
                };
                let sg = match sign {
                    QuadSign::Plus => "+",
                    QuadSign::Minus => "-",
                };
                let a = fmt_coeff(*a);
                write!(f, "({s_coeff}*s + {a_coeff}*{a}) / (({beta}*s)^2 {sg} {a}^2)")
            }
            TransformExpr::PowerLaw { coeff, alpha } => {
                write!(f, "{} / s^{}", fmt_coeff(*coeff), fmt_coeff(alpha + 1.0))
            }
            TransformExpr::Series(r) => write!(
                f,
                "sum_n {} * {}^C(n,2) * {}^n / s^(n+1)",
                fmt_coeff(r.lead),
                fmt_coeff(r.ratio),
                fmt_coeff(r.step)
            ),
            TransformExpr::Scaled { inner, factor, s_scale } => {
                write!(f, "{} * [{}](s/{})", fmt_coeff(*factor), inner, fmt_coeff(*s_scale))
            }
            TransformExpr::Sum(terms) => {
                for (i, (c, t)) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{}*[{}]", fmt_coeff(*c), t)?;
                }
                Ok(())
            }
        }
    }
}

/// Canonical transform of `tⁿ e(at)` (first kind) or `tⁿ E(at)` (second),
/// `n ≥ 0`: `[n]! β^{n+1} / Π_{k=0}^{n} (β^{n+1−k} s − a γ^{n−k})` with
/// `(β, γ) = (p, q)` or `(q, p)`.
fn exponential_ladder(base: &PqBase, n: u32, a: f64, kind: TransformKind) -> Result<RationalExpr> {
    let n = n as i32;
    let (np, nq) = kind.own_exps(n + 1);
    let factors = (0..=n)
        .map(|k| LinearFactor::new(kind.own_exps(n + 1 - k), a, kind.other_exps(n - k)))
        .collect();
    Ok(RationalExpr {
        numerator: PqMonomial::new(pq_factorial(base, n as u32)?, np, nq),
        factors,
    }
    .canonical())
}

/// `[n]! / (β^{C(n+1,2)} s^{n+1})`, `n ≥ 0`.
fn monomial_entry(base: &PqBase, n: u32, kind: TransformKind) -> Result<RationalExpr> {
    let (np, nq) = kind.own_exps(-(choose2(n as i64 + 1) as i32));
    Ok(RationalExpr {
        numerator: PqMonomial::new(pq_factorial(base, n)?, np, nq),
        factors: vec![LinearFactor::s(); n as usize + 1],
    })
}

fn quadratic(kind: TransformKind, a: f64, sign: QuadSign, cosine: bool) -> TransformExpr {
    let base_param = match kind {
        TransformKind::FirstKind => QuadBase::P,
        TransformKind::SecondKind => QuadBase::Q,
    };
    let (s2p, s2q) = kind.own_exps(2);
    let (ap, aq) = kind.own_exps(1);
    let (s_coeff, a_coeff) = if cosine {
        (PqMonomial::new(1.0, s2p, s2q), PqMonomial::zero())
    } else {
        (PqMonomial::zero(), PqMonomial::new(1.0, ap, aq))
    };
    TransformExpr::Quadratic {
        s_coeff,
        a_coeff,
        base_param,
        a,
        sign,
    }
}

/// `Γ(α+1)/β^{α(α+1)/2}` with the Gamma function of the matching kind.
fn power_law_coefficient(base: &PqBase, alpha: f64, kind: TransformKind) -> Result<f64> {
    let grid = GridConfig::default();
    let trunc = SeriesTruncation::default();
    let z = alpha + 1.0;
    let g = match kind {
        TransformKind::FirstKind => gamma_first_integral(base, z, &grid, &trunc)?.value,
        TransformKind::SecondKind => gamma_second_eval(base, z, &grid, &trunc)?.value,
    };
    Ok(g / kind.own(base).powf(alpha * (alpha + 1.0) / 2.0))
}

/// Closed-form transform of `expr`.
pub fn transform_table(expr: &FunctionExpr, base: &PqBase, kind: TransformKind) -> Result<TransformExpr> {
    use FunctionExpr::*;
    use TransformKind::*;
    expr.validate()?;
    let unsupported = || {
        Err(Error::Unsupported(format!(
            "no closed form for {expr} under the {kind} kind"
        )))
    };
    Ok(match (expr, kind) {
        (Const(c), _) => TransformExpr::Rational(RationalExpr::over_s(*c)),
        (Monomial(n), _) => TransformExpr::Rational(monomial_entry(base, *n, kind)?),
        (Power(alpha), _) => TransformExpr::PowerLaw {
            coeff: power_law_coefficient(base, *alpha, kind)?,
            alpha: *alpha,
        },
        (ExpSmall(a), FirstKind) | (ExpBig(a), SecondKind) => {
            TransformExpr::Rational(exponential_ladder(base, 0, *a, kind)?)
        }
        (MonomialTimesExpSmall(n, a), FirstKind) | (MonomialTimesExpBig(n, a), SecondKind) => {
            TransformExpr::Rational(exponential_ladder(base, *n, *a, kind)?)
        }
        (ExpBig(a), FirstKind) => TransformExpr::Series(SeriesRule {
            lead: 1.0,
            ratio: base.r(),
            step: a / base.p(),
        }),
        (ExpSmall(a), SecondKind) => TransformExpr::Series(SeriesRule {
            lead: 1.0,
            ratio: base.p() / base.q(),
            step: a / base.q(),
        }),
        (Cos(a), FirstKind) | (BigCos(a), SecondKind) => quadratic(kind, *a, QuadSign::Plus, true),
        (Sin(a), FirstKind) | (BigSin(a), SecondKind) => quadratic(kind, *a, QuadSign::Plus, false),
        (Cosh(a), FirstKind) | (BigCosh(a), SecondKind) => quadratic(kind, *a, QuadSign::Minus, true),
        (Sinh(a), FirstKind) | (BigSinh(a), SecondKind) => quadratic(kind, *a, QuadSign::Minus, false),
        (Sum(terms), _) => TransformExpr::Sum(
            terms
                .iter()
                .map(|(c, e)| Ok((*c, transform_table(e, base, kind)?)))
                .collect::<Result<_>>()?,
        ),
        _ => return unsupported(),
    })
}

/// `(1/a)·F(s/a)` rewritten in place.
pub fn scaling_apply(f: &TransformExpr, a: f64) -> Result<TransformExpr> {
    if a == 0.0 || !a.is_finite() {
        return Err(Error::Domain(format!("scaling factor must be finite and nonzero, got {a}")));
    }
    Ok(match f {
        TransformExpr::Rational(r) => {
            let m = r.factors.len() as i32;
            let mut num = r.numerator;
            num.coeff *= a.powi(m - 1);
            TransformExpr::Rational(
                RationalExpr {
                    numerator: num,
                    factors: r
                        .factors
                        .iter()
                        .map(|fac| LinearFactor {
                            shift: fac.shift * a,
                            ..*fac
                        })
                        .collect(),
                }
                .canonical(),
            )
        }
        TransformExpr::Quadratic {
            s_coeff,
            a_coeff,
            base_param,
            a: inner_a,
            sign,
        } => TransformExpr::Quadratic {
            s_coeff: *s_coeff,
            a_coeff: *a_coeff,
            base_param: *base_param,
            a: inner_a * a,
            sign: *sign,
        },
        TransformExpr::PowerLaw { coeff, alpha } => {
            let factor = a.powf(*alpha);
            if !factor.is_finite() {
                return Err(Error::Domain(format!("negative scaling {a} of a non-integer power")));
            }
            TransformExpr::PowerLaw {
                coeff: coeff * factor,
                alpha: *alpha,
            }
        }
        TransformExpr::Series(rule) => TransformExpr::Series(SeriesRule {
            step: rule.step * a,
            ..*rule
        }),
        TransformExpr::Scaled { inner, factor, s_scale } => TransformExpr::Scaled {
            inner: inner.clone(),
            factor: factor / a,
            s_scale: s_scale * a,
        },
        TransformExpr::Sum(terms) => TransformExpr::Sum(
            terms
                .iter()
                .map(|(c, t)| Ok((*c, scaling_apply(t, a)?)))
                .collect::<Result<_>>()?,
        ),
    })
}

/// Exact scaling by `a = p^i q^j`; only rational expressions keep their
/// integer exponents, others fall back to [`scaling_apply`].
pub fn scaling_apply_pq(f: &TransformExpr, base: &PqBase, i: i32, j: i32) -> Result<TransformExpr> {
    match f {
        TransformExpr::Rational(r) => {
            let m = r.factors.len() as i32;
            let mut num = r.numerator;
            num.p_exp += (m - 1) * i;
            num.q_exp += (m - 1) * j;
            Ok(TransformExpr::Rational(
                RationalExpr {
                    numerator: num,
                    factors: r
                        .factors
                        .iter()
                        .map(|fac| {
                            if fac.shift == 0.0 {
                                *fac
                            } else {
                                LinearFactor {
                                    shift_p: fac.shift_p + i,
                                    shift_q: fac.shift_q + j,
                                    ..*fac
                                }
                            }
                        })
                        .collect(),
                }
                .canonical(),
            ))
        }
        TransformExpr::Sum(terms) => Ok(TransformExpr::Sum(
            terms
                .iter()
                .map(|(c, t)| Ok((*c, scaling_apply_pq(t, base, i, j)?)))
                .collect::<Result<_>>()?,
        )),
        other => scaling_apply(other, base.pq_pow(i, j)),
    }
}

/// Callable form of the scaling rule.
pub fn scaling_apply_fn<F: ScalarFunction>(f: F, a: f64) -> Result<impl ScalarFunction> {
    if a == 0.0 || !a.is_finite() {
        return Err(Error::Domain(format!("scaling factor must be finite and nonzero, got {a}")));
    }
    Ok(Fallible(move |s: f64| Ok(f.eval(s / a)? / a)))
}

/// `L{tⁿ f}(s)` from `F = L{f}` by the derivative rule of each kind.
pub fn derivative_of_transform<F: ScalarFunction + ?Sized>(
    f: &F,
    base: &PqBase,
    n: u32,
    s: f64,
    kind: TransformKind,
) -> Result<f64> {
    if n == 0 {
        return f.eval(s);
    }
    let ni = n as i32;
    let (dil, pre) = match kind {
        TransformKind::FirstKind => (base.q().powi(-ni), base.q().powi(choose2(n as i64) as i32)),
        TransformKind::SecondKind => (base.p().powi(-ni), base.p().powi(choose2(n as i64) as i32)),
    };
    let g = Fallible(|sigma: f64| f.eval(dil * sigma));
    let d = pq_derivative_iterated(&g, base, n, s)?;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * pre * d)
}

/// `L{Dⁿ f}(s)` from `F = L{f}` and the initial data `(Dᵏ f)(0)`.
pub fn transform_of_derivative<F: ScalarFunction + ?Sized>(
    f: &F,
    initial_derivs: &[f64],
    base: &PqBase,
    n: u32,
    s: f64,
    kind: TransformKind,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("derivative order must be positive".into()));
    }
    if initial_derivs.len() != n as usize {
        return Err(Error::Arity {
            expected: n as usize,
            got: initial_derivs.len(),
        });
    }
    if !(s > 0.0) {
        return Err(Error::Domain(format!("transform variable must be positive, got {s}")));
    }
    let beta = kind.own(base);
    let ni = n as i32;
    let lead = s.powi(ni) / beta.powi(choose2(n as i64 + 1) as i32) * f.eval(s / beta.powi(ni))?;
    let mut acc = CompensatedSum::new();
    acc.add(lead);
    for (k, d) in initial_derivs.iter().enumerate() {
        let k = k as i32;
        acc.add(-s.powi(ni - 1 - k) / beta.powi(choose2((ni - k) as i64) as i32) * d);
    }
    Ok(acc.value())
}

/// `L{tⁿ}` derived from the derivative rule applied to `tⁿ` itself:
/// `L{Dⁿtⁿ} = L{[n]!} = [n]!/s` equals `sⁿ/β^{C(n+1,2)} F(s/βⁿ)`, so
/// `F(s/βⁿ) = β^{C(n+1,2)}[n]!/s^{n+1}`; then `s → βⁿ s`.
pub fn monomial_transform_from_derivative_rule(base: &PqBase, n: u32, kind: TransformKind) -> Result<RationalExpr> {
    let lhs = RationalExpr::over_s(pq_factorial(base, n)?);
    let (bp, bq) = kind.own_exps(choose2(n as i64 + 1) as i32);
    let dilated = lhs
        .times_monomial(&PqMonomial::new(1.0, bp, bq))
        .times_s_power(-(n as i32))?;
    let (sp, sq) = kind.own_exps(n as i32);
    Ok(dilated.substitute_scale(sp, sq))
}

fn not_invertible(f: &TransformExpr) -> Error {
    Error::NotInvertible(f.to_string())
}

/// Ratio of an actual numerator to the table's, exact when the p/q
/// exponents agree.
fn coefficient_ratio(actual: &PqMonomial, expected: &PqMonomial, base: &PqBase) -> f64 {
    if actual.p_exp == expected.p_exp && actual.q_exp == expected.q_exp {
        actual.coeff / expected.coeff
    } else {
        actual.eval(base) / expected.eval(base)
    }
}

fn invert_rational(r: &RationalExpr, base: &PqBase, kind: TransformKind) -> Result<Vec<(f64, FunctionExpr)>> {
    let r = r.canonical();
    let m = r.factors.len();
    if m == 0 {
        return Err(not_invertible(&TransformExpr::Rational(r)));
    }
    if r.factors.iter().all(|f| f.shift == 0.0) {
        let n = (m - 1) as u32;
        if n == 0 {
            return Ok(vec![(1.0, FunctionExpr::Const(r.numerator.eval(base)))]);
        }
        let expected = monomial_entry(base, n, kind)?;
        return Ok(vec![(
            coefficient_ratio(&r.numerator, &expected.numerator, base),
            FunctionExpr::Monomial(n),
        )]);
    }
    let a = r.factors[0].shift;
    if r.factors.iter().any(|f| f.shift != a) {
        return Err(not_invertible(&TransformExpr::Rational(r)));
    }
    let n = (m - 1) as u32;
    let expected = exponential_ladder(base, n, a, kind)?;
    if expected.factors != r.factors {
        return Err(not_invertible(&TransformExpr::Rational(r)));
    }
    let c = coefficient_ratio(&r.numerator, &expected.numerator, base);
    let e = match (kind, n) {
        (TransformKind::FirstKind, 0) => FunctionExpr::ExpSmall(a),
        (TransformKind::SecondKind, 0) => FunctionExpr::ExpBig(a),
        (TransformKind::FirstKind, _) => FunctionExpr::MonomialTimesExpSmall(n, a),
        (TransformKind::SecondKind, _) => FunctionExpr::MonomialTimesExpBig(n, a),
    };
    Ok(vec![(c, e)])
}

fn invert_terms(f: &TransformExpr, base: &PqBase, kind: TransformKind) -> Result<Vec<(f64, FunctionExpr)>> {
    use FunctionExpr::*;
    match f {
        TransformExpr::Rational(r) => invert_rational(r, base, kind),
        TransformExpr::Quadratic {
            s_coeff,
            a_coeff,
            base_param,
            a,
            sign,
        } => {
            let expected_param = match kind {
                TransformKind::FirstKind => QuadBase::P,
                TransformKind::SecondKind => QuadBase::Q,
            };
            if *base_param != expected_param {
                return Err(not_invertible(f));
            }
            let (cs, ca) = match (kind, sign) {
                (TransformKind::FirstKind, QuadSign::Plus) => (Cos(*a), Sin(*a)),
                (TransformKind::FirstKind, QuadSign::Minus) => (Cosh(*a), Sinh(*a)),
                (TransformKind::SecondKind, QuadSign::Plus) => (BigCos(*a), BigSin(*a)),
                (TransformKind::SecondKind, QuadSign::Minus) => (BigCosh(*a), BigSinh(*a)),
            };
            let (s2p, s2q) = kind.own_exps(2);
            let (ap, aq) = kind.own_exps(1);
            let mut out = Vec::new();
            if s_coeff.coeff != 0.0 {
                out.push((coefficient_ratio(s_coeff, &PqMonomial::new(1.0, s2p, s2q), base), cs));
            }
            if a_coeff.coeff != 0.0 {
                out.push((coefficient_ratio(a_coeff, &PqMonomial::new(1.0, ap, aq), base), ca));
            }
            Ok(out)
        }
        TransformExpr::PowerLaw { coeff, alpha } => {
            if !(*alpha > -1.0) {
                return Err(not_invertible(f));
            }
            let expected = power_law_coefficient(base, *alpha, kind)?;
            Ok(vec![(coeff / expected, Power(*alpha))])
        }
        TransformExpr::Series(_) => Err(not_invertible(f)),
        TransformExpr::Scaled { inner, factor, s_scale } => {
            let rewritten = scaling_apply(inner, *s_scale)?;
            Ok(invert_terms(&rewritten, base, kind)?
                .into_iter()
                .map(|(c, e)| (c * factor * s_scale, e))
                .collect())
        }
        TransformExpr::Sum(terms) => {
            let mut out = Vec::new();
            for (c, t) in terms {
                for (c2, e) in invert_terms(t, base, kind)? {
                    out.push((c * c2, e));
                }
            }
            Ok(out)
        }
    }
}

/// Reads the table right to left.
pub fn invert_by_table(f: &TransformExpr, base: &PqBase, kind: TransformKind) -> Result<FunctionExpr> {
    let terms = invert_terms(&f.canonical(), base, kind)?;
    if matches!(f, TransformExpr::Sum(_)) {
        return Ok(FunctionExpr::Sum(terms));
    }
    Ok(match terms.len() {
        0 => FunctionExpr::Const(0.0),
        1 => {
            let (c, e) = terms.into_iter().next().unwrap();
            match e {
                FunctionExpr::Const(v) => FunctionExpr::Const(c * v),
                e if c == 1.0 => e,
                e => FunctionExpr::Sum(vec![(c, e)]),
            }
        }
        _ => FunctionExpr::Sum(terms),
    })
}

/// One row of the printed transform table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableEntry {
    pub function: &'static str,
    pub transform: &'static str,
    pub validity: &'static str,
}

/// The closed forms available for each kind, in symbolic text.
pub fn table_entries(kind: TransformKind) -> Vec<TableEntry> {
    let e = |function, transform, validity| TableEntry {
        function,
        transform,
        validity,
    };
    match kind {
        TransformKind::FirstKind => vec![
            e("1", "1/s", "s > 0"),
            e("t^n", "[n]!/(p^C(n+1,2) s^(n+1))", "s > 0"),
            e("t^a", "Gamma(a+1)/(p^(a(a+1)/2) s^(a+1))", "s > 0, a > -1"),
            e("e(at)", "p/(p s - a)", "s > a/p"),
            e("E(at)", "(1/s) sum_n (q/p)^C(n,2) (a/(p s))^n", "s > 0"),
            e("cos(at)", "p^2 s/((p s)^2 + a^2)", "s > |a|/p"),
            e("sin(at)", "p a/((p s)^2 + a^2)", "s > |a|/p"),
            e("cosh(at)", "p^2 s/((p s)^2 - a^2)", "s > |a|/p"),
            e("sinh(at)", "p a/((p s)^2 - a^2)", "s > |a|/p"),
            e(
                "t^n e(at)",
                "[n]! p^(n+1)/prod_{k=0..n}(p^(n+1-k) s - a q^(n-k))",
                "s > a/p",
            ),
        ],
        TransformKind::SecondKind => vec![
            e("1", "1/s", "s > 0"),
            e("t^n", "[n]!/(q^C(n+1,2) s^(n+1))", "s > 0"),
            e("t^a", "gamma(a+1)/(q^(a(a+1)/2) s^(a+1))", "s > 0, a > -1"),
            e("E(at)", "q/(q s - a)", "s > a/q"),
            e("e(at)", "(1/s) sum_n (p/q)^C(n,2) (a/(q s))^n (divergent)", "none"),
            e("Cos(at)", "q^2 s/((q s)^2 + a^2)", "s > |a|/q"),
            e("Sin(at)", "q a/((q s)^2 + a^2)", "s > |a|/q"),
            e("Cosh(at)", "q^2 s/((q s)^2 - a^2)", "s > |a|/q"),
            e("Sinh(at)", "q a/((q s)^2 - a^2)", "s > |a|/q"),
            e(
                "t^n E(at)",
                "[n]! q^(n+1)/prod_{k=0..n}(q^(n+1-k) s - a p^(n-k))",
                "s > a p^n/q^(n+1)",
            ),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> PqBase {
        PqBase::new(1.2, 0.8).unwrap()
    }

    fn g() -> GridConfig {
        GridConfig::default()
    }

    #[test]
    fn numeric_examples() {
        let b = base();
        let one = FunctionExpr::Const(1.0);
        let v = transform_numeric(&one.bind(b, SeriesTruncation::default()), &b, 2.0, TransformKind::FirstKind, &g())
            .unwrap();
        assert!((v - 0.5).abs() < 1e-13);
        let t = FunctionExpr::Monomial(1);
        let w = transform_numeric(&t.bind(b, SeriesTruncation::default()), &b, 1.0, TransformKind::SecondKind, &g())
            .unwrap();
        assert!((w - 1.25).abs() < 1e-12);
        let f: FunctionExpr = "1 + 5t".parse().unwrap();
        let x = transform_numeric(&f.bind(b, SeriesTruncation::default()), &b, 1.0, TransformKind::FirstKind, &g())
            .unwrap();
        assert!((x - (1.0 + 5.0 / 1.2)).abs() < 1e-12);
    }

    #[test]
    fn table_examples() {
        let b = base();
        let m3 = transform_table(&FunctionExpr::Monomial(3), &b, TransformKind::FirstKind).unwrap();
        assert!((m3.eval(&b, 1.0).unwrap() - 6.08 / 2.985_984).abs() < 1e-13);
        let e = transform_table(&FunctionExpr::ExpSmall(0.5), &b, TransformKind::FirstKind).unwrap();
        assert!((e.eval(&b, 1.0).unwrap() - 1.2 / 0.7).abs() < 1e-14);
        let c = transform_table(&FunctionExpr::BigCos(1.0), &b, TransformKind::SecondKind).unwrap();
        assert!((c.eval(&b, 2.0).unwrap() - 1.28 / 3.56).abs() < 1e-14);
        assert!(matches!(
            transform_table(&FunctionExpr::BigCos(1.0), &b, TransformKind::FirstKind),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn scaling_examples() {
        let b = base();
        let inv_s = TransformExpr::Rational(RationalExpr::over_s(1.0));
        assert_eq!(scaling_apply(&inv_s, 3.0).unwrap(), inv_s);
        let lt = transform_table(&FunctionExpr::Monomial(1), &b, TransformKind::FirstKind).unwrap();
        let scaled = scaling_apply(&lt, 2.0).unwrap();
        assert!((scaled.eval(&b, 1.7).unwrap() - 2.0 / (1.2 * 1.7 * 1.7)).abs() < 1e-14);
        assert!(matches!(scaling_apply(&lt, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn derivative_rule_examples() {
        let b = base();
        let inv = |s: f64| 1.0 / s;
        let v = derivative_of_transform(&inv, &b, 1, 1.0, TransformKind::FirstKind).unwrap();
        assert!((v - 1.0 / 1.2).abs() < 1e-13);
        assert_eq!(derivative_of_transform(&inv, &b, 0, 1.3, TransformKind::FirstKind).unwrap(), 1.0 / 1.3);
        let w = derivative_of_transform(&inv, &b, 2, 1.0, TransformKind::SecondKind).unwrap();
        assert!((w - 3.906_25).abs() < 1e-11);
        let lt = |s: f64| 1.0 / (1.2 * s * s);
        let x = transform_of_derivative(&lt, &[0.0], &b, 1, 2.0, TransformKind::FirstKind).unwrap();
        assert!((x - 0.5).abs() < 1e-15);
        assert!(matches!(
            transform_of_derivative(&lt, &[0.0, 1.0], &b, 1, 2.0, TransformKind::FirstKind),
            Err(Error::Arity { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn inversion_examples() {
        let b = base();
        let lam = 0.5;
        let f = TransformExpr::Rational(RationalExpr {
            numerator: PqMonomial::new(1.0, 1, 0),
            factors: vec![LinearFactor::new((1, 0), lam, (0, 0))],
        });
        assert_eq!(
            invert_by_table(&f, &b, TransformKind::FirstKind).unwrap(),
            FunctionExpr::ExpSmall(lam)
        );
        let one = TransformExpr::Rational(RationalExpr::over_s(1.0));
        assert_eq!(invert_by_table(&one, &b, TransformKind::FirstKind).unwrap(), FunctionExpr::Const(1.0));
        let res = TransformExpr::Rational(RationalExpr {
            numerator: PqMonomial::new(1.0, 2, 0),
            factors: vec![
                LinearFactor::new((1, 0), lam, (0, 0)),
                LinearFactor::new((2, 0), lam, (0, 1)),
            ],
        });
        assert_eq!(
            invert_by_table(&res, &b, TransformKind::FirstKind).unwrap(),
            FunctionExpr::MonomialTimesExpSmall(1, lam)
        );
        let series = transform_table(&FunctionExpr::ExpBig(0.3), &b, TransformKind::FirstKind).unwrap();
        assert!(matches!(
            invert_by_table(&series, &b, TransformKind::FirstKind),
            Err(Error::NotInvertible(_))
        ));
    }

    #[test]
    fn parse_and_display() {
        let cases = [
            ("t^3", FunctionExpr::Monomial(3)),
            ("t", FunctionExpr::Monomial(1)),
            ("t^1.5", FunctionExpr::Power(1.5)),
            ("e(0.5t)", FunctionExpr::ExpSmall(0.5)),
            ("E(-t)", FunctionExpr::ExpBig(-1.0)),
            ("Cos(2*t)", FunctionExpr::BigCos(2.0)),
            ("t^2*e(0.3t)", FunctionExpr::MonomialTimesExpSmall(2, 0.3)),
            ("2.5", FunctionExpr::Const(2.5)),
            ("3*t", FunctionExpr::Sum(vec![(3.0, FunctionExpr::Monomial(1))])),
            (
                "1 + 5t - sin(0.2t)",
                FunctionExpr::Sum(vec![
                    (1.0, FunctionExpr::Const(1.0)),
                    (5.0, FunctionExpr::Monomial(1)),
                    (-1.0, FunctionExpr::Sin(0.2)),
                ]),
            ),
        ];
        for (text, expected) in cases {
            let parsed: FunctionExpr = text.parse().unwrap();
            assert_eq!(parsed, expected, "{text}");
            let again: FunctionExpr = parsed.to_string().parse().unwrap();
            assert_eq!(again, expected, "{}", parsed);
        }
        assert_eq!("t^0".parse::<FunctionExpr>().unwrap(), FunctionExpr::Power(0.0));
        assert!("foo(t)".parse::<FunctionExpr>().is_err());
        assert!("t^-1.5".parse::<FunctionExpr>().is_err());
    }

    #[test]
    fn taylor_coefficients_of_sum() {
        let b = base();
        let f = FunctionExpr::Sum(vec![(2.0, FunctionExpr::Cos(0.5)), (1.0, FunctionExpr::Monomial(1))]);
        let c = f.taylor_coefficients(&b, 3).unwrap();
        assert_eq!(c[0], 2.0);
        assert_eq!(c[1], 1.0);
        assert!((c[2] + 2.0 * 0.25 * 1.2 / 2.0).abs() < 1e-15);
    }
}
