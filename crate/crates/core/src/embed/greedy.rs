use rand::seq::SliceRandom;

use super::finish::{finish_embedding, DeferredLeaf};
use super::{EmbedConfig, EmbedError};
use crate::absorb::AbsorptionPlan;
use crate::bitset::VertexSet;
use crate::embedding::Embedding;
use crate::graph::HostGraph;
use crate::rng::Rng;
use crate::tree::RootedTree;

struct Frame {
    vertex: usize,
    candidates: Vec<usize>,
}

/// Extends the reservation to all of `T` outside `S`: components of
/// `T - T*` in decreasing size, each in BFS order onto random free
/// neighbours of the parent's image, with a bounded undo window. Tree
/// leaves are left to the final matching.
pub fn embed_greedy_rest(
    g: &HostGraph,
    tree: &RootedTree,
    plan: &AbsorptionPlan,
    cfg: &EmbedConfig,
    rng: &mut Rng,
) -> Result<Embedding, EmbedError> {
    let n = g.n();
    let mut in_sub = VertexSet::new(tree.n());
    for (v, img) in plan.phi_star.images().iter().enumerate() {
        if img.is_some() {
            in_sub.insert(v);
        }
    }
    for &x in &plan.l {
        in_sub.insert(x);
    }
    let keep = in_sub.complement();
    let mut comps = tree.components(&keep);
    comps.sort_by_key(|c| (std::cmp::Reverse(c.len()), c[0]));

    let mut order: Vec<(usize, usize)> = Vec::new();
    let mut deferred = Vec::new();
    for c in &comps {
        let root = c
            .iter()
            .copied()
            .find(|&v| tree.neighbours(v).contains(&plan.tstar))
            .ok_or_else(|| EmbedError::Internal("component not attached to the subtree root".into()))?;
        for (v, p) in bfs_within(tree, &keep, root, plan.tstar) {
            if tree.is_leaf(v) {
                deferred.push(DeferredLeaf { leaf: v, anchor: p, allowed: None });
            } else {
                order.push((v, p));
            }
        }
    }

    let mut phi = plan.phi_star.clone();
    let blocked = plan.s_set(n);
    let unplaced_nbrs = |v: usize| tree.degree(v) - 1;
    let mut stack: Vec<Frame> = Vec::with_capacity(order.len());
    let mut frontier = 0usize;
    let mut backtracks = 0usize;
    let limit = 20 * tree.n();
    while stack.len() < order.len() {
        let i = stack.len();
        let (v, p) = order[i];
        let pi = phi.get(p).expect("parent placed first");
        let mut free = g.neighbours(pi).difference(phi.used());
        free.difference_with(&blocked);
        let mut all_free = phi.used().complement();
        all_free.difference_with(&blocked);
        let need = unplaced_nbrs(v);
        let mut cands: Vec<usize> = free.iter().filter(|&c| g.degree_into(c, &all_free) > need).collect();
        cands.shuffle(rng);
        stack.push(Frame { vertex: v, candidates: cands });
        frontier = frontier.max(stack.len());
        loop {
            let top = stack.last_mut().expect("non-empty");
            if let Some(c) = top.candidates.pop() {
                phi.place(top.vertex, c);
                break;
            }
            stack.pop();
            backtracks += 1;
            if stack.is_empty() || stack.len() + cfg.undo_window < frontier || backtracks > limit {
                return Err(EmbedError::Stuck(format!("greedy rest stuck at tree vertex {v}")));
            }
            let prev = stack.last().expect("non-empty").vertex;
            phi.unplace(prev);
        }
    }
    log::debug!("greedy rest placed {} vertices with {} backtracks", order.len(), backtracks);
    finish_embedding(g, tree, plan, phi, &deferred)
}

/// BFS inside `keep` from `root`, whose parent is the already placed `anchor`.
pub(crate) fn bfs_within(tree: &RootedTree, keep: &VertexSet, root: usize, anchor: usize) -> Vec<(usize, usize)> {
    let mut out = vec![(root, anchor)];
    let mut seen = VertexSet::new(tree.n());
    seen.insert(root);
    let mut i = 0;
    while i < out.len() {
        let u = out[i].0;
        i += 1;
        for &c in tree.neighbours(u) {
            if keep.contains(c) && seen.insert(c) {
                out.push((c, u));
            }
        }
    }
    out
}
