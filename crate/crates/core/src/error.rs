use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("tree has fewer than two vertices")]
    EmptyTree,
    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown index `{0}` (expected one of M1 M2 RANDIC H GA SC ABC AZ)")]
    UnknownIndex(String),
    #[error("degree pair ({0},{1}) out of range for this index")]
    DegreeOutOfRange(u32, u32),
    #[error("cannot compare an exact value with a log-space value")]
    KindMismatch,
    #[error("sign not resolved within {0} bits of precision")]
    PrecisionExceeded(u32),
    #[error("value is not positive")]
    NonPositiveValue,

    #[error("move precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("tree is not a double star")]
    NotADoubleStar,
    #[error("double star is already balanced")]
    AlreadyBalanced,

    #[error("n = {n} outside supported range {}", range_text(*lo, *hi))]
    NOutOfRange { n: usize, lo: usize, hi: usize },
    #[error("double star arms must both be at least 1 (got {0}, {1})")]
    InvalidArms(usize, usize),
    #[error("invalid arm shape: {0}")]
    InvalidShape(String),

    #[error("hill climb did not terminate within {0} moves")]
    MoveLoopDetected(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

fn range_text(lo: usize, hi: usize) -> String {
    if hi == usize::MAX {
        format!("n >= {lo}")
    } else {
        format!("{lo}..={hi}")
    }
}
