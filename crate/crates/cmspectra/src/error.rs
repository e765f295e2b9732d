//! Error types shared across the engine.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SymbolError {
    #[error("argument form is the zero vector")]
    ZeroArgForm,
    #[error("argument form has {0} entries, more than the supported variable count")]
    TooManyVariables(usize),
    #[error("argument form coefficient {0} out of range")]
    ArgFormCoefficient(i64),
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("no value assigned for symbol {0}")]
    MissingAssignment(String),
    #[error("monomial exponent overflow at symbol {0}")]
    ExponentOverflow(String),
    #[error("polynomial uses {0} symbols, more than a monomial key can hold")]
    TooManySymbols(usize),
    #[error("malformed polynomial text: {0}")]
    Parse(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinAlgError {
    #[error("dimension mismatch: matrix is {rows}x{cols}, rhs has {rhs} entries")]
    DimensionMismatch { rows: usize, cols: usize, rhs: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiffOpError {
    #[error("operators act on different variable counts ({0} vs {1})")]
    NvarsMismatch(usize, usize),
    #[error("top-order coefficient at {0} is not constant: {1}")]
    NonConstantSymbol(String, String),
    #[error("placeholder {0} is not bound to an operator")]
    UnboundPlaceholder(String),
    #[error("derivative multi-index overflow")]
    IndexOverflow,
    #[error("malformed operator dump: {0}")]
    Parse(String),
}

#[derive(Debug, Error, PartialEq)]
pub enum NumError {
    #[error("series tail is not decreasing; divergence suspected at |z| = {0}")]
    DivergenceSuspected(f64),
    #[error("sample acceptance failed after {0} attempts")]
    RetryExhausted(usize),
    #[error("root configuration stayed near-degenerate after {0} resampling attempts")]
    DegenerateInstance(usize),
}

#[derive(Debug, Error, PartialEq)]
pub enum DescentError {
    #[error("symbol layer at order {order} is not in the subring generated by the candidate symbols")]
    SymbolNotInSubring { order: usize },
    #[error("coefficient at order {order}, index {index} is not constant across samples (spread {spread:.3e})")]
    NonConstantCoefficient {
        order: usize,
        index: String,
        spread: f64,
    },
    #[error("reconstructed constant failed verification at fresh samples: {0}")]
    ReconstructionUnverified(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CurveError {
    #[error("odd power of l3 survived the l2 = 0 restriction: {0}")]
    OddPowerSurvived(String),
}

/// Umbrella error for verification entry points.
#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("symbol {0} has no half-period assignment")]
    UnassignedArgument(String),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error(transparent)]
    DiffOp(#[from] DiffOpError),
    #[error(transparent)]
    Num(#[from] NumError),
    #[error(transparent)]
    Descent(#[from] DescentError),
    #[error(transparent)]
    Curve(#[from] CurveError),
}
