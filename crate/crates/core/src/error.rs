use thiserror::Error;

/// Errors from the polynomial algebra layer.
#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("unsupported monomial order: {0}")]
    UnsupportedOrder(String),
    #[error("variable count mismatch: {left} vs {right}")]
    VariableCountMismatch { left: usize, right: usize },
    #[error("polynomial is not homogeneous: {0}")]
    NotHomogeneous(String),
    #[error("ideal power requires k >= 1 (use the unit ideal explicitly)")]
    ZeroPower,
    #[error("cannot parse scalar `{0}`")]
    BadScalar(String),
    #[error("cannot parse polynomial `{input}`: {reason}")]
    BadPolynomial { input: String, reason: String },
    #[error("resource cap exceeded during {what}")]
    ResourceExceeded { what: String },
    #[error("internal consistency check failed: {0}")]
    InternalCheck(String),
}

/// Errors from resolutions and the cohomology engine.
#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("resolution length {len} exceeds variable count {nvars}")]
    ResolutionTooLong { len: usize, nvars: usize },
    #[error("cohomological index {i} out of range 0..={n}")]
    IndexOutOfRange { i: usize, n: usize },
    #[error("malformed presentation: {0}")]
    BadPresentation(String),
}

/// Errors from variety constructors and point sampling.
#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("case parameters out of range: {0}")]
    BadCase(String),
    #[error("degeneracy index {i} out of range for {case}")]
    BadIndex { i: usize, case: String },
    #[error("unknown catalog label `{0}`")]
    UnknownLabel(String),
    #[error("certification failed after {tries} attempts: {what}")]
    CertificationFailed { what: String, tries: usize },
    #[error("operation requires a finite prime field (got {0})")]
    NeedsPrimeField(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Errors from the discrepancy and curve-bound calculators.
#[derive(Debug, Error)]
pub enum BoundError {
    #[error("multiplicity vector violates case constraint: {0}")]
    ConstraintViolation(String),
    #[error("divisor class mismatch: expected E-coefficient {expected}, got {got}")]
    ClassMismatch { expected: String, got: String },
    #[error("pair is not log canonical near the exceptional locus")]
    NotLogCanonical,
    #[error("need at least {r} degrees, got {got}")]
    TooFewDegrees { r: usize, got: usize },
    #[error("input out of range: {0}")]
    OutOfRange(String),
    #[error("no feasible multiplicity vector (should not happen for valid cases)")]
    Infeasible,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

/// Errors from the skew 2-form normalizer.
#[derive(Debug, Error)]
pub enum SkewError {
    #[error("skew matrix must have even dimension, got {0}")]
    OddDimension(usize),
    #[error("matrix is not skew-symmetric at t^{0}")]
    NotSkew(usize),
    #[error("truncation order {trunc} too small: {what}")]
    TruncationTooSmall { trunc: usize, what: String },
    #[error("rank bookkeeping inconsistent with generic rank: {0}")]
    RankInconsistent(String),
    #[error("special fiber (t = 0) is zero")]
    ZeroSpecialFiber,
    #[error("wedge index {r} exceeds half the generic rank {l}")]
    WedgeIndexTooLarge { r: usize, l: usize },
    #[error("malformed input: {0}")]
    Malformed(String),
}
