use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degree-{0} monomials do not all vanish")]
    PowerNotInIdeal(u32),
    #[error("parametric mode requires monomial ideal")]
    ParametricNeedsMonomialIdeal,
    #[error("ideal generator `{0}` is not a single monomial")]
    NotMonomial(String),
    #[error("ideal generator `{0}` has a nonzero constant term")]
    ConstantGenerator(String),
    #[error("malformed algebra spec: {0}")]
    MalformedSpec(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("algebra mismatch")]
    AlgebraMismatch,
    #[error("augmentation not a unit")]
    NotAUnit,
    #[error("argument not nilpotent")]
    NotNilpotent,
    #[error("substitution violates nilpotency/unit constraints: {0}")]
    BadSubstitution(String),
    #[error("mixed degrees")]
    MixedDegrees,
    #[error("homotopy requires single-nilpotent graded mode")]
    HomotopyMode,
    #[error("operation requires graded (monomial ideal) mode")]
    GradedModeRequired,
    #[error("operation requires a parameter-free algebra")]
    ParamFreeRequired,
    #[error("invalid relative spec: {0}")]
    InvalidRelative(String),
    #[error("form not relative")]
    NotRelative,
    #[error("not nested ideals")]
    NotNested,
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("truncation too shallow")]
    TooShallow,
    #[error("invalid exponents: {0}")]
    InvalidExponents(String),
    #[error("i+j < p")]
    FiltrationRange,
    #[error("origin not critical")]
    OriginNotCritical,
    #[error("isolated singularity not detected up to N = {0}")]
    NotIsolated(u32),
    #[error("de Rham cross-check failed: mu - tau = {expected}, dim H = {found}")]
    CrossCheckFailed { expected: usize, found: usize },
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("negative exponent on non-invertible variable `{0}`")]
    NegativeExponent(String),
    #[error("expression is not a linear combination of symbols")]
    NotASymbolSum,
}

pub type Result<T> = std::result::Result<T, Error>;
