//! Spanning-tree embedding for graphs on `m + 1` vertices with minimum degree
//! `⌊2m/3⌋` and a universal vertex.

pub mod absorb;
pub mod bitset;
pub mod decompose;
pub mod embed;
pub mod embedding;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod rng;
pub mod special;
pub mod tree;

pub use bitset::VertexSet;
pub use embedding::{is_full_embedding, verify_embedding, Embedding};
pub use graph::{required_degree, validate_m_good, GoodnessReport, HostGraph};
pub use tree::{bipartition_classes, RootedTree};
pub use embed::{embed_tree, EmbedConfig, EmbedError, EmbedResult, EmbedTrace};
pub use oracle::{backtrack_embed, OracleResult};
