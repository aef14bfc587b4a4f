use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{required_degree, validate_m_good, HostGraph};
use crate::rng::Rng;
use crate::tree::RootedTree;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenerateError {
    #[error("infeasible profile: {0}")]
    Infeasible(String),
    #[error("graph is disconnected")]
    Disconnected,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ProfileKind {
    Complete,
    /// Each deletable edge is kept with probability `keep`.
    RandomSupergraph { keep: f64 },
    /// Two cliques sharing `X3`, plus `cross` random `X1`-`X2` edges.
    PlantedExtremal { cross: usize },
    /// Edge-minimal: every removable edge is removed, in random order.
    Adversarial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceProfile {
    pub kind: ProfileKind,
    pub m: usize,
}

/// Sizes `(|X1|, |X2|, |X3|)` of the planted partition for `m`.
pub fn planted_partition(m: usize) -> (usize, usize, usize) {
    let a = m.div_ceil(3);
    (a, a, m + 1 - 2 * a)
}

pub fn generate(profile: InstanceProfile, rng: &mut Rng) -> Result<HostGraph, GenerateError> {
    let m = profile.m;
    if m < 1 {
        return Err(GenerateError::Infeasible("m must be at least 1".into()));
    }
    let n = m + 1;
    let g = match profile.kind {
        ProfileKind::Complete => complete(n)?,
        ProfileKind::RandomSupergraph { keep } => {
            if !(0.0..=1.0).contains(&keep) {
                return Err(GenerateError::Infeasible(format!("keep probability {keep} outside [0, 1]")));
            }
            thin(complete(n)?, keep, rng)
        }
        ProfileKind::Adversarial => thin(complete(n)?, 0.0, rng),
        ProfileKind::PlantedExtremal { cross } => planted(m, cross, rng)?,
    };
    debug_assert!(validate_m_good(&g).is_m_good);
    Ok(g)
}

fn complete(n: usize) -> Result<HostGraph, GenerateError> {
    HostGraph::complete(n).map_err(|e| GenerateError::Infeasible(e.to_string()))
}

/// Deletes edges avoiding one random universal vertex while both endpoints
/// stay above the degree floor; each candidate survives with probability `keep`.
fn thin(mut g: HostGraph, keep: f64, rng: &mut Rng) -> HostGraph {
    let n = g.n();
    let floor = required_degree(n - 1);
    let u = rng.gen_range(0..n);
    let mut edges: Vec<(usize, usize)> = g.edges().into_iter().filter(|&(a, b)| a != u && b != u).collect();
    edges.shuffle(rng);
    for (a, b) in edges {
        if g.degree(a) > floor && g.degree(b) > floor && !rng.gen_bool(keep) {
            g.remove_edge(a, b);
        }
    }
    g
}

fn planted(m: usize, cross: usize, rng: &mut Rng) -> Result<HostGraph, GenerateError> {
    let (a, b, c) = planted_partition(m);
    if c == 0 {
        return Err(GenerateError::Infeasible(format!("no room for X3 at m = {m}")));
    }
    if cross > a * b {
        return Err(GenerateError::Infeasible(format!("{cross} cross edges exceed |X1||X2| = {}", a * b)));
    }
    let n = m + 1;
    let mut g = complete(n)?;
    let x1 = 0..a;
    let x2 = a..a + b;
    let mut pairs: Vec<(usize, usize)> = x1.flat_map(|u| x2.clone().map(move |v| (u, v))).collect();
    for &(u, v) in &pairs {
        g.remove_edge(u, v);
    }
    let (chosen, _) = pairs.partial_shuffle(rng, cross);
    for &(u, v) in chosen.iter() {
        g.add_edge(u, v).expect("in range");
    }
    Ok(g)
}

/// Aldous-Broder random walk tree, rooted at a random vertex.
pub fn random_spanning_tree(g: &HostGraph, rng: &mut Rng) -> Result<RootedTree, GenerateError> {
    if !g.is_connected() {
        return Err(GenerateError::Disconnected);
    }
    let n = g.n();
    let mut seen = vec![false; n];
    let mut cur = rng.gen_range(0..n);
    seen[cur] = true;
    let mut edges = Vec::with_capacity(n - 1);
    let nbrs: Vec<Vec<usize>> = (0..n).map(|v| g.neighbours(v).to_vec()).collect();
    while edges.len() + 1 < n {
        let next = *nbrs[cur].choose(rng).expect("connected graphs have no isolated vertex");
        if !seen[next] {
            seen[next] = true;
            edges.push((cur, next));
        }
        cur = next;
    }
    let root = rng.gen_range(0..n);
    RootedTree::from_edges(n, &edges, root).map_err(|_| GenerateError::Disconnected)
}
