use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid set: {0}")]
    InvalidSet(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "mesh has {got} points but degree {degree} needs at least {needed}; increase the density"
    )]
    MeshTooSmall {
        got: usize,
        needed: usize,
        degree: usize,
    },

    #[error("basis size binomial({n}+{k}, {n}) overflows")]
    BasisOverflow { n: usize, k: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("configuration has {got} points but the basis has {expected} functions")]
    SizeMismatch { expected: usize, got: usize },

    #[error("rank deficiency: {0}")]
    RankDeficient(String),

    #[error("degenerate configuration: determinant vanishes")]
    Degenerate,

    #[error("brute force needs {needed} subsets, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("coincident nodes at index {0}")]
    CoincidentNodes(usize),

    #[error("empty measure")]
    EmptyMeasure,

    #[error("lemma generator violated its own hypotheses: {0}")]
    GeneratorBug(String),
}

pub type Result<T> = std::result::Result<T, Error>;
