use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Usage and contract errors. Search budgets running out is not an error;
/// it is reported as an inconclusive verdict.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("ground size {0} outside supported range 1..=24")]
    GroundSizeOutOfRange(u32),

    #[error("mask {mask:#b} is not a subset of [{k}]")]
    MaskOutOfRange { mask: u32, k: u32 },

    #[error("element {element} is not in [{k}]")]
    ElementOutOfRange { element: u32, k: u32 },

    #[error("ground size mismatch: [{left}] vs [{right}]")]
    GroundMismatch { left: u32, right: u32 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("families are not pairwise incomparable: family {left} member {superset:#b} contains family {right} member {subset:#b}")]
    NotIncomparable { left: usize, right: usize, superset: u32, subset: u32 },

    #[error("sequence is not {d}-exceeding: position {i} contains position {j}")]
    NotExceeding { d: usize, i: usize, j: usize },

    #[error("families have unequal sizes: expected {expected}, family {index} has {found}")]
    UnequalFamilySizes { expected: usize, index: usize, found: usize },

    #[error("unknown witness name {0:?}")]
    UnknownWitness(String),
}
