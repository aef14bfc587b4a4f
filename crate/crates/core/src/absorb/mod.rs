//! Reservation of deferred tree vertices and their final absorption by a
//! perfect matching.

mod matching;
mod plan;

pub use matching::{matching_size, max_bipartite_matching};
pub use plan::{absorb, reserve_type1, reserve_type2, reserved_size, verify_plan, AbsorptionPlan};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AbsorbError {
    #[error("|L| = {l} is smaller than the slack {slack}")]
    TooSmall { l: usize, slack: usize },
    #[error("plan kind does not match the subtree type")]
    WrongKind,
    #[error("host has no universal vertex besides the root image")]
    NoUniversal,
    #[error("placement stuck: {0}")]
    Stuck(String),
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("invalid leftover set: {0}")]
    BadLeftover(String),
    #[error("no perfect matching ({matched} of {needed})")]
    NoMatching { matched: usize, needed: usize },
}
