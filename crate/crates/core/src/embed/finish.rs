//! Final step shared by both rest strategies: deferred tree leaves and the
//! absorbing set `L` are matched jointly onto everything still free.

use super::EmbedError;
use crate::absorb::{absorb, max_bipartite_matching, AbsorptionPlan};
use crate::bitset::VertexSet;
use crate::embedding::{is_full_embedding, Embedding};
use crate::graph::HostGraph;
use crate::tree::RootedTree;

/// A tree leaf whose placement waits for the final matching.
#[derive(Debug, Clone)]
pub struct DeferredLeaf {
    pub leaf: usize,
    pub anchor: usize,
    /// Host vertices the leaf may use besides adjacency to its anchor's image.
    pub allowed: Option<VertexSet>,
}

/// Matches deferred leaves onto free vertices and `L` onto free vertices or
/// `S`, so that `S` is used up by `L`; the images of `L` outside `S` then form
/// the leftover set `R` handed to [`absorb`].
pub fn finish_embedding(
    g: &HostGraph,
    tree: &RootedTree,
    plan: &AbsorptionPlan,
    mut phi: Embedding,
    deferred: &[DeferredLeaf],
) -> Result<Embedding, EmbedError> {
    let n = g.n();
    let s_set = plan.s_set(n);
    let mut free = phi.used().complement();
    free.difference_with(&s_set);
    let mut right_set = free.clone();
    right_set.union_with(&s_set);
    let right = right_set.to_vec();
    let left_len = deferred.len() + plan.l.len();
    if left_len != right.len() {
        return Err(EmbedError::Internal(format!(
            "{} vertices left to place but {} host vertices free",
            left_len,
            right.len()
        )));
    }
    let index: Vec<usize> = {
        let mut idx = vec![usize::MAX; n];
        for (j, &v) in right.iter().enumerate() {
            idx[v] = j;
        }
        idx
    };
    let mut adj = Vec::with_capacity(left_len);
    for d in deferred {
        let a = phi
            .get(d.anchor)
            .ok_or_else(|| EmbedError::Internal(format!("anchor {} of leaf {} unplaced", d.anchor, d.leaf)))?;
        let mut c = g.neighbours(a).intersection(&free);
        if let Some(allowed) = &d.allowed {
            c.intersect_with(allowed);
        }
        adj.push(c.iter().map(|v| index[v]).collect::<Vec<_>>());
    }
    for i in 0..plan.l.len() {
        let c = plan.candidates(g, i).intersection(&right_set);
        adj.push(c.iter().map(|v| index[v]).collect());
    }
    let pair = max_bipartite_matching(right.len(), &adj);
    let matched = pair.iter().filter(|p| p.is_some()).count();
    if matched < left_len {
        return Err(EmbedError::Stuck(format!("final matching covers {matched} of {left_len}")));
    }
    let l_images: Vec<usize> = pair[deferred.len()..].iter().map(|p| right[p.expect("perfect")]).collect();
    let r: Vec<usize> = l_images.into_iter().filter(|v| !s_set.contains(*v)).collect();
    for (d, p) in deferred.iter().zip(&pair) {
        phi.place(d.leaf, right[p.expect("perfect")]);
    }
    let map = absorb(g, plan, &r)?;
    for (x, v) in map {
        phi.place(x, v);
    }
    if !is_full_embedding(g, tree, &phi) {
        return Err(EmbedError::Internal("assembled map fails verification".into()));
    }
    Ok(phi)
}
