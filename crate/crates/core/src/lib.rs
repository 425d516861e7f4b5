//! Constructive coverings of finite metric spaces.
//!
//! The crate builds colored coverings with controlled `s`-multiplicity,
//! hierarchical covering families, snowflake embeddings into products of
//! metric trees, covering transfers along maps, and Lipschitz extensions
//! into Euclidean space. Every construction re-checks the inequalities it
//! promises and reports measured values next to the theoretical ones.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cert;
pub mod covering;
pub mod error;
pub mod hierarchy;
pub mod instances;
pub mod io;
pub mod metric;
pub mod nerve;
pub mod reduction;
pub mod tree;
pub mod whitney;

pub use error::{Error, Result};
pub use metric::{FiniteMetricSpace, PointSet};
