//! Numerical and symbolic (p,q)-calculus.
//!
//! With `0 < q < p` and `r = q/p`, the crate provides twin-basic numbers
//! and factorials, the difference operator `D_{p,q}`, integrals on
//! geometric grids, the two (p,q)-exponentials with their trigonometric,
//! hyperbolic and Gamma relatives, two Laplace-type transforms, and a
//! transform-method solver for a small family of dilation equations.

pub mod arith;
pub mod calculus;
pub mod error;
pub mod laplace;
pub mod numeric;
pub mod solver;
pub mod special;

pub use arith::{PqBase, Regime, SeriesTruncation};
pub use calculus::{Fallible, GridConfig, ScalarFunction};
pub use error::{Error, Result, Tail};
pub use laplace::{FunctionExpr, TransformExpr, TransformKind};
pub use numeric::{Evaluated, Path};
