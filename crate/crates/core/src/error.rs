use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vectors are linearly dependent")]
    LinearlyDependent,

    #[error("vectors do not span the domain ({rank} of {dim})")]
    NotSpanning { rank: usize, dim: usize },

    #[error("lattice is not contained in the super-lattice")]
    NotSublattice,

    #[error("rank mismatch: {sub} vs {sup}")]
    RankMismatch { sub: usize, sup: usize },

    #[error("unsupported root system {0}")]
    UnsupportedSystem(String),

    #[error("reflection in the zero vector")]
    ZeroRoot,

    #[error("group too large: order {order} exceeds materialization cap {cap}")]
    GroupTooLarge { order: u128, cap: u64 },

    #[error("weight is not dominant")]
    NotDominant,

    #[error("weight is not in the weight lattice")]
    NotInWeightLattice,

    #[error("representation too large: dimension {dim} exceeds cap {cap}")]
    RepresentationTooLarge { dim: u128, cap: u64 },

    #[error("not a character: multiplicity of {weight} would become negative")]
    NotACharacter { weight: String },

    #[error("search cap of {cap} nodes exceeded")]
    SearchCapExceeded { cap: u64 },

    #[error("weights do not span the ambient space (rank {rank} of {dim}); restriction not requested")]
    WeightsNotSpanning { rank: usize, dim: usize },

    #[error("element is not in the group")]
    NotInGroup,

    #[error("inconsistent input: {0}")]
    Inconsistent(String),

    #[error("empty trace word")]
    EmptyWord,

    #[error("index {index} out of range 1..{bound}")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("resource cap exceeded: {0}")]
    CapExceeded(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
