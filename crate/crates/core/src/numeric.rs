//! Small numerical kernels shared by every module: compensated summation,
//! an overflow-safe running product and the evaluation record returned by
//! the series, product and grid engines.

use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// How a value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Path {
    Series,
    Product,
    Grid,
    Closed,
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Path::Series => "series",
            Path::Product => "product",
            Path::Grid => "grid",
            Path::Closed => "closed",
        })
    }
}

/// A value together with truncation diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluated<T> {
    pub value: T,
    pub terms: usize,
    /// Estimated magnitude of everything left out.
    pub tail: f64,
    pub path: Path,
}

impl<T> Evaluated<T> {
    pub fn exact(value: T) -> Self {
        Evaluated {
            value,
            terms: 0,
            tail: 0.0,
            path: Path::Closed,
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Evaluated<U> {
        Evaluated {
            value: f(self.value),
            terms: self.terms,
            tail: self.tail,
            path: self.path,
        }
    }
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Field operations needed by the product and series kernels, for real and
/// complex arguments alike.
pub trait Scalar:
    Copy
    + fmt::Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_real(x: f64) -> Self;
    fn modulus(self) -> f64;
    fn is_finite_value(self) -> bool;
    fn scale(self, k: f64) -> Self;
}

impl Scalar for f64 {
    fn from_real(x: f64) -> Self {
        x
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
}

impl Scalar for Complex64 {
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn is_finite_value(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
}

const RESCALE_HI: f64 = 1e150;
const RESCALE_LO: f64 = 1e-150;
const LOG2_STEP: i32 = 498;

/// Running product kept as `mantissa · 2^exponent` so that long products of
/// large or small factors neither overflow nor underflow before the end.
#[derive(Debug, Clone, Copy)]
pub struct ScaledProduct<T: Scalar> {
    mantissa: T,
    exponent: i64,
}

impl<T: Scalar> ScaledProduct<T> {
    pub fn one() -> Self {
        ScaledProduct {
            mantissa: T::from_real(1.0),
            exponent: 0,
        }
    }

    pub fn mul(&mut self, x: T) {
        self.mantissa = self.mantissa * x;
        self.normalize();
    }

    pub fn div(&mut self, x: T) {
        self.mantissa = self.mantissa / x;
        self.normalize();
    }

    fn normalize(&mut self) {
        loop {
            let m = self.mantissa.modulus();
            if m > RESCALE_HI && m.is_finite() {
                self.mantissa = self.mantissa.scale(2f64.powi(-LOG2_STEP));
                self.exponent += LOG2_STEP as i64;
            } else if m < RESCALE_LO && m > 0.0 {
                self.mantissa = self.mantissa.scale(2f64.powi(LOG2_STEP));
                self.exponent -= LOG2_STEP as i64;
            } else {
                break;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.modulus() == 0.0
    }

    /// Collapse to an ordinary value; saturates to 0 or ±∞ outside range.
    pub fn value(&self) -> T {
        let mut v = self.mantissa;
        let mut e = self.exponent;
        while e > 0 {
            let step = e.min(LOG2_STEP as i64);
            v = v.scale(2f64.powi(step as i32));
            e -= step;
        }
        while e < 0 {
            let step = (-e).min(LOG2_STEP as i64);
            v = v.scale(2f64.powi(-(step as i32)));
            e += step;
        }
        v
    }
}

/// Binomial coefficient C(n, 2) as an exponent.
pub fn choose2(n: i64) -> i64 {
    n * (n - 1) / 2
}
