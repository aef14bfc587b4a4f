use rand::seq::IteratorRandom;

use super::EmbedError;
use crate::bitset::VertexSet;
use crate::embedding::Embedding;
use crate::graph::HostGraph;
use crate::rng::Rng;
use crate::tree::RootedTree;

/// Which of the two target sets a vertex goes to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Largest `t` accepted for a component of `size` vertices.
pub fn max_quota(size: usize) -> usize {
    size.saturating_sub(1).div_ceil(2)
}

/// Splits `comp` (connected, containing `root`) so that exactly `t`
/// vertices land on side `B` and no two `B` vertices are adjacent. The root
/// and every vertex in `forced` stay on side `A`. `B` vertices are taken from
/// one bipartition class, the one with most eligible vertices. Returned in
/// BFS order from `root`; the root is included only if `include_root`.
pub fn quota_labels(
    tree: &RootedTree,
    comp: &[usize],
    root: usize,
    forced: &VertexSet,
    t: usize,
    include_root: bool,
) -> Result<Vec<(usize, Side)>, EmbedError> {
    let cap = max_quota(comp.len());
    if t > cap {
        return Err(EmbedError::CaseInfeasible(format!("quota {t} exceeds {cap} for a {}-vertex component", comp.len())));
    }
    let keep = tree.vertex_set(comp);
    let mut order = vec![(root, 0usize)];
    let mut seen = VertexSet::new(tree.n());
    seen.insert(root);
    let mut i = 0;
    while i < order.len() {
        let (u, d) = order[i];
        i += 1;
        for &c in tree.neighbours(u) {
            if keep.contains(c) && seen.insert(c) {
                order.push((c, d + 1));
            }
        }
    }
    if order.len() != comp.len() {
        return Err(EmbedError::Internal("component is not connected".into()));
    }
    let eligible = |parity: usize| {
        order
            .iter()
            .filter(move |&&(v, d)| v != root && d % 2 == parity && !forced.contains(v))
            .map(|&(v, _)| v)
    };
    let (e0, e1) = (eligible(0).count(), eligible(1).count());
    let parity = if e1 >= e0 { 1 } else { 0 };
    if t > e0.max(e1) {
        return Err(EmbedError::CaseInfeasible(format!("only {} eligible vertices for quota {t}", e0.max(e1))));
    }
    let chosen: VertexSet = VertexSet::from_iter_with_capacity(tree.n(), eligible(parity).take(t));
    Ok(order
        .into_iter()
        .filter(|&(v, _)| include_root || v != root)
        .map(|(v, _)| (v, if chosen.contains(v) { Side::B } else { Side::A }))
        .collect())
}

/// Embeds a whole component with exactly `t` vertices in `sb` and the rest
/// in `sa`. The root goes next to `root_target` when given.
#[allow(clippy::too_many_arguments)]
pub fn quota_embed_component(
    g: &HostGraph,
    tree: &RootedTree,
    comp: &[usize],
    root: usize,
    root_target: Option<usize>,
    sa: &VertexSet,
    sb: &VertexSet,
    t: usize,
    phi: &mut Embedding,
    rng: &mut Rng,
) -> Result<(), EmbedError> {
    let labels = quota_labels(tree, comp, root, &VertexSet::new(tree.n()), t, true)?;
    for (v, side) in labels {
        let pool = if side == Side::A { sa } else { sb };
        let mut cand = pool.difference(phi.used());
        let anchor = if v == root { root_target } else { tree.neighbours(v).iter().find_map(|&u| phi.get(u)) };
        if let Some(a) = anchor {
            cand.intersect_with(g.neighbours(a));
        }
        let c = cand
            .iter()
            .choose(rng)
            .ok_or_else(|| EmbedError::Stuck(format!("no free image for component vertex {v}")))?;
        phi.place(v, c);
    }
    Ok(())
}
