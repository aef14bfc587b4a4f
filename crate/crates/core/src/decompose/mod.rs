//! Tree-side combinatorics: nice subtrees, centroids, the `Z`-cut partition
//! and bad-component classification.

mod centroid;
mod nice;
mod zcut;

pub use centroid::centroid;
pub use nice::{gamma_nice_subtree, select_l, try_nice_subtree, verify_nice, NiceKind, NiceSubtree};
pub use zcut::{classify_bad, verify_zcut, z_cut, ZCut, ZCutViolation};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecomposeError {
    #[error("tree has m = {m} edges but gamma = {gamma} needs m >= 200/gamma = {needed:.1}")]
    TooSmall { m: usize, gamma: f64, needed: f64 },
    #[error("gamma must lie in (0, 1], got {0}")]
    BadGamma(f64),
    #[error("no nice subtree found by the constructive search")]
    NoNiceSubtree,
    #[error("type-2 subtree has {available} leaves away from the root, {needed} required")]
    TooFewLeaves { available: usize, needed: usize },
    #[error("empty vertex set")]
    Empty,
    #[error("vertex set does not induce a connected subtree")]
    Disconnected,
    #[error("no Z-cut found: {0}")]
    NoCut(String),
}

const EPS: f64 = 1e-9;

/// `⌈x⌉` tolerant of representation error in `gamma * m`.
pub fn ceil_real(x: f64) -> usize {
    let c = (x - EPS).ceil();
    if c <= 0.0 {
        0
    } else {
        c as usize
    }
}

pub fn floor_real(x: f64) -> usize {
    let f = (x + EPS).floor();
    if f <= 0.0 {
        0
    } else {
        f as usize
    }
}
