//! Finite-scale coarse geometry on finite metric spaces.
//!
//! Everything here works over a [`metric::FiniteMetricSpace`]: a fixed point
//! set with pairwise distances, either stored as a matrix or derived from
//! coordinates. On top of that substrate the crate provides
//!
//! * chain graphs, the hop metric `d_r`, and r-convexity checks ([`chain`]),
//! * scale-windowed versions of "alike", "bounded", and "asymptotically
//!   disjoint", where every quantifier over infinity is replaced by an
//!   explicit window ([`scale`]),
//! * cut and separator verification, minimum vertex cuts, and the two
//!   constructive partitions used by the dimension estimators ([`cuts`]),
//! * cover-based and recursive dimension estimators that emit re-checkable
//!   certificates ([`dimension`]),
//! * deterministic generators for the standard test spaces ([`gallery`]),
//! * the shared space JSON/CSV schema ([`schema`]),
//! * independent reference implementations used to cross-check the fast
//!   paths ([`oracles`]) and seeded property campaigns built on them
//!   ([`props`]).
//!
//! All analyses are pure functions over immutable inputs and are safe to run
//! concurrently. Estimates produced by [`dimension`] are upper-bound
//! heuristics over the tested pairs, never claims about the true asymptotic
//! invariants.

pub mod chain;
pub mod cuts;
pub mod dimension;
pub mod error;
pub mod gallery;
pub mod metric;
pub mod oracles;
pub mod props;
pub mod scale;
pub mod schema;

pub use error::{CoarseError, Result};
pub use metric::{ExtLength, FiniteMetricSpace, Norm, PointId, Subset};
pub use scale::ScaleParams;
