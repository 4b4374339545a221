use thiserror::Error;

/// Which end of a two-sided grid failed its smallness test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    /// j → −∞, large abscissae.
    Left,
    /// j → +∞, abscissae accumulating at zero.
    Right,
}

impl std::fmt::Display for Tail {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tail::Left => f.write_str("left (large t)"),
            Tail::Right => f.write_str("right (t near 0)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("truncation: {what} did not converge within {terms} terms (partial {partial:e}, last term {last_term:e})")]
    Truncation {
        what: String,
        terms: usize,
        partial: f64,
        last_term: f64,
    },

    #[error("grid sum did not converge on the {tail} tail (partial {partial:e}, last term {last_term:e})")]
    GridTail {
        tail: Tail,
        partial: f64,
        last_term: f64,
    },

    #[error("transform diverges: {tail} tail failed the smallness test (last term {last_term:e})")]
    TransformDivergence { tail: Tail, last_term: f64 },

    #[error("series diverges after {terms} terms (last term {last_term:e})")]
    Divergence { terms: usize, last_term: f64 },

    #[error("pole: product factor {k} vanishes")]
    Pole { k: usize },

    #[error("singularity: denominator factor {k} vanishes")]
    Singularity { k: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("not invertible by table: unmatched {0}")]
    NotInvertible(String),

    #[error("arity: expected {expected} values, got {got}")]
    Arity { expected: usize, got: usize },
}

impl Error {
    /// True for failures of a limiting process rather than of the inputs.
    pub fn is_non_convergence(&self) -> bool {
        matches!(
            self,
            Error::Truncation { .. }
                | Error::GridTail { .. }
                | Error::TransformDivergence { .. }
                | Error::Divergence { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
