//! The embedding pipeline: validation, decomposition, reservation, one of
//! two rest strategies, absorption, and an exact fallback.

mod extremal;
mod finish;
mod greedy;
mod quota;

pub use extremal::{case_of, embed_extremal_rest, root_region, ExtremalOutcome, ExtremalState, Phase, Placement, Region};
pub use finish::{finish_embedding, DeferredLeaf};
pub use greedy::embed_greedy_rest;
pub use quota::{max_quota, quota_embed_component, quota_labels, Side};

use std::time::Duration;

use rand::seq::IteratorRandom;
use serde::Serialize;
use thiserror::Error;

use crate::absorb::{reserve_type1, reserve_type2, AbsorbError, AbsorptionPlan};
use crate::bitset::VertexSet;
use crate::decompose::{select_l, try_nice_subtree, z_cut, DecomposeError, NiceKind, NiceSubtree, ZCut};
use crate::embedding::{is_full_embedding, Embedding};
use crate::graph::{validate_m_good, HostGraph};
use crate::oracle::{backtrack_embed, OracleResult};
use crate::rng::{self, Rng};
use crate::special::{detect_special, refine_partition, RefinedPartition, DEFAULT_RESTARTS};
use crate::tree::RootedTree;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbedConfig {
    pub gamma: f64,
    pub gamma0: f64,
    pub gamma1: f64,
    pub beta: f64,
    pub retry_budget: usize,
    pub oracle_fallback: bool,
    pub seed: u64,
    pub undo_window: usize,
    pub detect_restarts: usize,
    /// Skip the extremal branch even when structure is detected.
    pub allow_extremal: bool,
    pub oracle_time_budget: Option<Duration>,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        Self {
            gamma: 0.02,
            gamma0: 0.05,
            gamma1: 0.02,
            beta: 0.05,
            retry_budget: 64,
            oracle_fallback: true,
            seed: 0,
            undo_window: 50,
            detect_restarts: DEFAULT_RESTARTS,
            allow_extremal: true,
            oracle_time_budget: Some(Duration::from_secs(30)),
        }
    }
}

impl EmbedConfig {
    pub fn validate(&self) -> Result<(), EmbedError> {
        for (name, v) in [("gamma", self.gamma), ("gamma0", self.gamma0), ("gamma1", self.gamma1)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(EmbedError::Config(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        if self.beta.is_nan() || self.beta < 0.0 {
            return Err(EmbedError::Config(format!("beta must be non-negative, got {}", self.beta)));
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmbedError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("tree has {tree} vertices, host has {graph}")]
    SizeMismatch { tree: usize, graph: usize },
    #[error("stuck: {0}")]
    Stuck(String),
    #[error("case infeasible: {0}")]
    CaseInfeasible(String),
    #[error(transparent)]
    Absorb(#[from] AbsorbError),
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
    #[error("internal: {0}")]
    Internal(String),
    #[error("no embedding found")]
    NotFound,
    #[error("oracle time budget exhausted")]
    Timeout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Extremal,
    Greedy,
    Oracle,
}

/// Decisions taken by the pipeline, in order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbedTrace {
    pub branch: Option<Branch>,
    pub case: Option<u8>,
    pub retries: usize,
    pub special_detected: bool,
    pub steps: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbedResult {
    pub embedding: Embedding,
    pub trace: EmbedTrace,
    /// Reservation used by the successful attempt, if any.
    pub plan: Option<AbsorptionPlan>,
}

/// Everything the extremal branch needs besides a seed.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalSetup {
    pub refined: RefinedPartition,
    pub subtree: NiceSubtree,
    pub cut: ZCut,
    pub case: u8,
}

const STREAM_DETECT: u64 = 0xD7;
const STREAM_EXTREMAL: u64 = 0x1000;
const STREAM_GREEDY: u64 = 0x2000;

/// Nice subtree with its deferred set chosen.
pub fn prepare_subtree(tree: &RootedTree, gamma: f64) -> Result<NiceSubtree, EmbedError> {
    let sub = try_nice_subtree(tree, gamma)?;
    let l = select_l(&sub, tree.neighbours(sub.root))?;
    Ok(sub.with_selected(l))
}

pub fn prepare_extremal(tree: &RootedTree, refined: RefinedPartition, cfg: &EmbedConfig) -> Result<ExtremalSetup, EmbedError> {
    let subtree = prepare_subtree(tree, cfg.gamma1)?;
    let cut = z_cut(tree, &subtree, cfg.gamma0, cfg.gamma1)?;
    let bad = crate::decompose::classify_bad(&cut, tree);
    let case = case_of(tree.m(), 3 * bad.len());
    Ok(ExtremalSetup { refined, subtree, cut, case })
}

fn reserve(
    g: &HostGraph,
    tree: &RootedTree,
    sub: &NiceSubtree,
    w_prime: usize,
    rng: &mut Rng,
) -> Result<AbsorptionPlan, AbsorbError> {
    match sub.kind {
        NiceKind::Type1 => reserve_type1(g, tree, sub, w_prime, rng),
        NiceKind::Type2 => reserve_type2(g, tree, sub, w_prime, rng),
    }
}

/// One extremal attempt: `t*` on a random vertex of its region, then the
/// case-specific rest embedding.
pub fn extremal_attempt(
    g: &HostGraph,
    tree: &RootedTree,
    setup: &ExtremalSetup,
    cfg: &EmbedConfig,
    rng: &mut Rng,
) -> Result<(ExtremalOutcome, AbsorptionPlan), EmbedError> {
    let region = root_region(&setup.refined, &setup.cut, setup.case);
    let &w_prime = region.iter().choose(rng).ok_or_else(|| EmbedError::Stuck("empty root region".into()))?;
    let plan = reserve(g, tree, &setup.subtree, w_prime, rng)?;
    let out = embed_extremal_rest(g, &setup.refined, tree, &plan, &setup.cut, cfg, rng)?;
    Ok((out, plan))
}

/// One non-extremal attempt: `t*` on a random vertex other than the first
/// universal vertex, then the greedy rest embedding.
pub fn greedy_attempt(
    g: &HostGraph,
    tree: &RootedTree,
    sub: &NiceSubtree,
    cfg: &EmbedConfig,
    rng: &mut Rng,
) -> Result<(Embedding, AbsorptionPlan), EmbedError> {
    let w = g.universal_vertices().first().copied();
    let &w_prime = (0..g.n())
        .filter(|&v| Some(v) != w)
        .collect::<Vec<_>>()
        .iter()
        .choose(rng)
        .ok_or_else(|| EmbedError::Stuck("no root image".into()))?;
    let plan = reserve(g, tree, sub, w_prime, rng)?;
    let phi = embed_greedy_rest(g, tree, &plan, cfg, rng)?;
    Ok((phi, plan))
}

/// Embeds the spanning tree `tree` into `g`.
pub fn embed_tree(g: &HostGraph, tree: &RootedTree, cfg: &EmbedConfig) -> Result<EmbedResult, EmbedError> {
    cfg.validate()?;
    if tree.n() != g.n() {
        return Err(EmbedError::SizeMismatch { tree: tree.n(), graph: g.n() });
    }
    let mut trace = EmbedTrace { branch: None, case: None, retries: 0, special_detected: false, steps: Vec::new() };
    let m = tree.m();
    let report = validate_m_good(g);

    let structured = if !report.is_m_good {
        trace.steps.push("host is not m-good".into());
        false
    } else if m <= 3 {
        trace.steps.push(format!("m = {m} too small for decomposition"));
        false
    } else if tree.max_leaf_count() as f64 > cfg.beta * m as f64 {
        trace.steps.push(format!("a vertex has {} leaves, above beta*m", tree.max_leaf_count()));
        false
    } else {
        true
    };

    if structured {
        if let Some(r) = structured_attempts(g, tree, cfg, &mut trace) {
            return Ok(r);
        }
    }
    oracle_fallback(g, tree, cfg, trace)
}

fn structured_attempts(g: &HostGraph, tree: &RootedTree, cfg: &EmbedConfig, trace: &mut EmbedTrace) -> Option<EmbedResult> {
    if cfg.allow_extremal {
        let detected = detect_special(g, cfg.gamma0, cfg.detect_restarts, rng::derive(cfg.seed, STREAM_DETECT));
        if let Some(p) = detected {
            trace.special_detected = true;
            trace.steps.push(format!("special partition sizes {:?}", [p.x1.len(), p.x2.len(), p.x3.len()]));
            let setup = refine_partition(g, &p, cfg.gamma0)
                .map_err(|e| e.to_string())
                .and_then(|r| prepare_extremal(tree, r, cfg).map_err(|e| e.to_string()));
            match setup {
                Ok(setup) => {
                    trace.case = Some(setup.case);
                    trace.steps.push(format!("extremal case {}", setup.case));
                    for k in 0..cfg.retry_budget {
                        let mut rng = rng::split(cfg.seed, STREAM_EXTREMAL + k as u64);
                        match extremal_attempt(g, tree, &setup, cfg, &mut rng) {
                            Ok((out, plan)) => {
                                trace.branch = Some(Branch::Extremal);
                                return Some(EmbedResult { embedding: out.embedding, trace: trace.clone(), plan: Some(plan) });
                            }
                            Err(e) => {
                                trace.retries += 1;
                                log::debug!("extremal attempt {k} failed: {e}");
                                if k == 0 {
                                    trace.steps.push(format!("extremal attempt failed: {e}"));
                                }
                            }
                        }
                    }
                    trace.steps.push("extremal budget exhausted, switching to greedy".into());
                }
                Err(e) => trace.steps.push(format!("extremal preparation failed: {e}")),
            }
        }
    }
    let sub = match prepare_subtree(tree, cfg.gamma) {
        Ok(s) => s,
        Err(e) => {
            trace.steps.push(format!("no nice subtree: {e}"));
            return None;
        }
    };
    trace.steps.push(format!("greedy rest with {:?} subtree, |L| = {}", sub.kind, sub.selected.len()));
    for k in 0..cfg.retry_budget {
        let mut rng = rng::split(cfg.seed, STREAM_GREEDY + k as u64);
        match greedy_attempt(g, tree, &sub, cfg, &mut rng) {
            Ok((phi, plan)) => {
                trace.branch = Some(Branch::Greedy);
                return Some(EmbedResult { embedding: phi, trace: trace.clone(), plan: Some(plan) });
            }
            Err(e) => {
                trace.retries += 1;
                log::debug!("greedy attempt {k} failed: {e}");
                if k == 0 {
                    trace.steps.push(format!("greedy attempt failed: {e}"));
                }
            }
        }
    }
    trace.steps.push("greedy budget exhausted".into());
    None
}

fn oracle_fallback(g: &HostGraph, tree: &RootedTree, cfg: &EmbedConfig, mut trace: EmbedTrace) -> Result<EmbedResult, EmbedError> {
    if !cfg.oracle_fallback {
        return Err(EmbedError::Stuck("structured attempts failed and the exact fallback is disabled".into()));
    }
    trace.steps.push("exact search".into());
    match backtrack_embed(g, tree, cfg.oracle_time_budget) {
        OracleResult::Embedded(phi) => {
            debug_assert!(is_full_embedding(g, tree, &phi));
            trace.branch = Some(Branch::Oracle);
            Ok(EmbedResult { embedding: phi, trace, plan: None })
        }
        OracleResult::NotFound => Err(EmbedError::NotFound),
        OracleResult::Timeout => Err(EmbedError::Timeout),
    }
}

/// Host vertices in no part of the refined partition.
pub fn junk_vertices(g: &HostGraph, refined: &RefinedPartition) -> VertexSet {
    let mut all = VertexSet::full(g.n());
    for x in refined.sets(g.n()) {
        all.difference_with(&x);
    }
    all
}
