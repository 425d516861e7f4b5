//! Metric trees built from glued intervals, the chain pseudometric on a
//! hierarchical covering, and the snowflake embedding into a product of trees.

mod chain;
mod embed;
mod metric_tree;

pub use chain::{ChainMetric, ChildRelation, NodeId};
pub use embed::{
    build_trees, default_exponent, default_base, embed, exponent_guard, lower_bound_check, lower_constant,
    upper_constant, ColorTree, EmbedParams, Embedding, EmbeddingReport, LowerBoundReport, LowerBoundViolation, PairWitness,
    TreeNorm,
};
pub use metric_tree::{MetricTree, TreePoint, TreeRecord};
