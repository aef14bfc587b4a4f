//! Ground truth at small scale: exact search, free-tree enumeration and
//! instance generators.

mod backtrack;
mod generate;
mod trees;

pub use backtrack::{backtrack_embed, OracleResult};
pub use generate::{generate, planted_partition, random_spanning_tree, GenerateError, InstanceProfile, ProfileKind};
pub use trees::{canonical_form, enumerate_free_trees, enumerate_with_cap, EnumerateError, DEFAULT_EDGE_CAP};
