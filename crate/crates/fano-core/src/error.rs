use std::fmt;

/// Everything that can go wrong across the crate. One flat enum keeps the
/// signatures simple; variants carry enough context to format a useful
/// message but are also matchable for programmatic handling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// Text input violated the polynomial / functional grammar.
    SyntaxError { pos: usize, msg: String },
    /// A variable index `z_i` with `i >= nvars`.
    VariableOutOfRange { index: usize, nvars: usize },
    /// `^` not followed by a non-negative integer literal.
    NonIntegerExponent { pos: usize },
    /// Operands live over different coefficient fields.
    FieldMismatch,
    /// Operands disagree on the number of variables, or a point/tuple has
    /// the wrong length.
    ArityMismatch { expected: usize, got: usize },
    /// An index (variable, row, column, chart pivot) outside its range.
    IndexOutOfRange { index: usize, bound: usize },
    /// A polynomial that was required to be homogeneous is not.
    NotHomogeneous,
    /// A degree shift or constraint went below the allowed floor.
    NegativeDegree,
    /// A numeric argument outside its documented domain (k >= n, t < 1,
    /// empty prime list, non-prime modulus where one is required, ...).
    InvalidRange(String),
    /// A component degree outside what the operation supports.
    InvalidDegree(String),
    /// The given modulus is not prime (or not in [2, 2^31)).
    NotPrime(u64),
    /// A plane was required to lie on the variety but does not.
    NotOnFano,
    /// Every sampled count was zero, so a log-log fit is impossible.
    ZeroCount,
    /// A functional's shape (block count, degrees, variable count) does not
    /// match the matrix it is applied to.
    BasisMismatch(String),
    /// Division by zero in the coefficient field.
    DivisionByZero,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::SyntaxError { pos, msg } => write!(f, "syntax error at byte {pos}: {msg}"),
            Error::VariableOutOfRange { index, nvars } => {
                write!(f, "variable z{index} out of range (nvars = {nvars})")
            }
            Error::NonIntegerExponent { pos } => {
                write!(
                    f,
                    "exponent at byte {pos} is not a non-negative integer literal"
                )
            }
            Error::FieldMismatch => write!(f, "operands have different coefficient fields"),
            Error::ArityMismatch { expected, got } => {
                write!(f, "arity mismatch: expected {expected}, got {got}")
            }
            Error::IndexOutOfRange { index, bound } => {
                write!(f, "index {index} out of range (bound {bound})")
            }
            Error::NotHomogeneous => write!(f, "polynomial is not homogeneous"),
            Error::NegativeDegree => write!(f, "degree shift produced a negative degree"),
            Error::InvalidRange(msg) => write!(f, "invalid range: {msg}"),
            Error::InvalidDegree(msg) => write!(f, "invalid degree: {msg}"),
            Error::NotPrime(p) => write!(f, "{p} is not a prime in [2, 2^31)"),
            Error::NotOnFano => write!(f, "plane does not lie on the variety"),
            Error::ZeroCount => write!(f, "all counts are zero; cannot fit a slope"),
            Error::BasisMismatch(msg) => write!(f, "basis mismatch: {msg}"),
            Error::DivisionByZero => write!(f, "division by zero in the coefficient field"),
        }
    }
}

impl std::error::Error for Error {}
