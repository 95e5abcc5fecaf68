//! Error types shared across the crate.

use thiserror::Error;

/// Construction and domain errors for spaces, measures and events.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("a state space needs at least one element")]
    EmptySpace,
    #[error("state labels must be nonempty")]
    EmptyLabel,
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("weights must be nonnegative")]
    NegativeWeight,
    #[error("weights must sum to exactly 1")]
    WeightSum,
    #[error("weight vector length {got} does not match space size {want}")]
    WeightLength { got: usize, want: usize },
    #[error("space has no factor structure")]
    NoFactorStructure,
    #[error("conditioning on an event of probability zero")]
    ZeroProbabilityEvent,
    #[error("partition does not match the space")]
    PartitionMismatch,
    #[error("spaces do not match")]
    SpaceMismatch,
}

/// Errors from polytope operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolytopeError {
    #[error("constraint set is infeasible")]
    Infeasible,
    #[error("selection set is empty")]
    EmptySelection,
    #[error("constraint has {got} coefficients but the space has {want} states")]
    CoefficientLength { got: usize, want: usize },
    #[error("linear program did not terminate")]
    LpStuck,
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Errors from the partition machinery.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("empty constraint set")]
    EmptyConstraintSet,
    #[error("restriction round-trip failed: the partition does not preserve the set")]
    RestrictionInvalid,
    #[error("internal consistency check failed: merged partition violates the extension identity")]
    ConsistencyCheck,
    #[error("selection set lives on {got} blocks, partition has {want}")]
    BlockMismatch { got: usize, want: usize },
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Errors from selectors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SelectError {
    #[error("entropy maximizer did not converge within the iteration budget")]
    NoConvergence,
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Errors from embeddings and interpretations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbeddingError {
    #[error("images of distinct states must be disjoint")]
    OverlappingImages,
    #[error("images must cover the target space")]
    NotCovering,
    #[error("embeddings must share their source space")]
    SourceMismatch,
    #[error("formula mentions undeclared variable `{0}`")]
    UnknownVariable(String),
    #[error("at most {max} propositional variables per space (got {got})")]
    TooManyVariables { max: usize, got: usize },
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Errors from the audit harness.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AuditError {
    #[error("instance violates the principle's hypotheses: {0}")]
    HypothesisViolation(String),
    #[error(transparent)]
    Select(#[from] SelectError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Errors from the estimators.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EstimatorError {
    #[error("no samples landed within distance epsilon of the set; raise epsilon or the sample count")]
    ZeroAcceptance,
    #[error("bounds must satisfy 0 <= lo <= hi <= 1")]
    BadInterval,
    #[error("at least one lower bound must be positive")]
    AllZeroBounds,
    #[error("lower bounds must sum to at most 1")]
    BoundsExceedOne,
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}
