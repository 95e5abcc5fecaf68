//! Selection of probability measures from linearly constrained subsets of
//! finite probability simplices.
//!
//! The crate provides:
//! - exact-rational measures, events and product/conditional operations;
//! - polytope constraint sets with an exact LP toolkit (feasibility,
//!   optimization, vertex enumeration, containment, equality);
//! - the maximum-entropy and center-of-mass selection functions, plus their
//!   representation-independent variants built on the coarsest-partition
//!   construction;
//! - embeddings between state spaces and representational-variant checking;
//! - executable rationality principles with a randomized audit harness;
//! - likelihood-of-evidence estimators and a Monte-Carlo oracle for the
//!   center-of-mass selector.

pub mod audit;
pub mod embedding;
pub mod error;
pub mod estimators;
pub mod measure;
pub mod partition;
pub mod polytope;
pub mod rational;
pub mod ritransform;
mod runtime;
pub mod selectors;
pub mod space;

pub use error::{
    AuditError, DomainError, EmbeddingError, EstimatorError, PartitionError, PolytopeError,
    SelectError,
};
pub use measure::Measure;
pub use partition::{coarsest_partition, extend, pair_equivalent, pair_equivalent_oracle, restrict, Partition};
pub use polytope::{
    approx_equal_sets, equal_sets, event_interval, product_set, relativized_set, ConstraintSet,
    LinearConstraint, PolySet, Relation, SelectionSet,
};
pub use rational::Rational;
pub use selectors::{select, Selection, SelectorId};
pub use space::{Event, StateSpace};
