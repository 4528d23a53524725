use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("no reality partner registered for `{0}`")]
    UnregisteredPartner(String),
    #[error("no derivation table entry for `{0}`")]
    MissingDerivation(String),
    #[error("division by zero polynomial")]
    DivisionByZero,
    #[error("expression is not weight-homogeneous: {0}")]
    NotHomogeneous(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
    #[error("linear system is structurally singular: rank defect {defect} for targets {targets}")]
    Singular { defect: usize, targets: String },
    #[error("pivot `{pivot}` is not justified by the nonvanishing ledger; declare an explicit assumption")]
    UnjustifiedPivot { pivot: String },
    #[error("fixture mismatch for {label}:\n{diff}")]
    FixtureMismatch { label: String, diff: String },
    #[error("assumption ledger violated: {0}")]
    LedgerViolation(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("output is not real: {0}")]
    NonReal(String),
    #[error("incomplete assignment: missing value for `{0}`")]
    Incomplete(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
