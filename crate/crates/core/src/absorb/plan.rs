use rand::seq::SliceRandom;
use serde::Serialize;

use super::{max_bipartite_matching, AbsorbError};
use crate::bitset::VertexSet;
use crate::decompose::{ceil_real, NiceKind, NiceSubtree};
use crate::embedding::Embedding;
use crate::graph::HostGraph;
use crate::rng::Rng;
use crate::tree::RootedTree;

/// Reservation state after `T* - L` is embedded: the deferred tree vertices
/// `L`, the reserved target set `S`, and the images every `x in L` must be
/// adjacent to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbsorptionPlan {
    pub kind: NiceKind,
    pub l: Vec<usize>,
    pub s: Vec<usize>,
    /// Type 1 only: the `2|L|` images of the neighbours of `L`.
    pub n_set: Vec<usize>,
    /// For each `x in L` (same order), images of its tree neighbours.
    pub anchors: Vec<Vec<usize>>,
    pub phi_star: Embedding,
    pub tstar: usize,
    pub w_prime: usize,
    /// Type 2 only: the universal vertex hosting `t`.
    pub w: Option<usize>,
    /// Type 2 only: parent of the most deferred leaves.
    pub t: Option<usize>,
}

impl AbsorptionPlan {
    pub fn s_set(&self, n: usize) -> VertexSet {
        VertexSet::from_iter_with_capacity(n, self.s.iter().copied())
    }

    /// Graph vertices any `x in L` may take in the final matching.
    pub fn candidates(&self, g: &HostGraph, i: usize) -> VertexSet {
        let mut c = VertexSet::full(g.n());
        for &a in &self.anchors[i] {
            c.intersect_with(g.neighbours(a));
        }
        c
    }
}

pub fn reserved_size(l: usize, gamma: f64, m: usize) -> Result<usize, AbsorbError> {
    let slack = ceil_real((gamma / 2.0).powi(4) * m as f64);
    l.checked_sub(slack).ok_or(AbsorbError::TooSmall { l, slack })
}

fn sample(pool: &VertexSet, k: usize, rng: &mut Rng) -> Result<Vec<usize>, AbsorbError> {
    let v = pool.to_vec();
    if v.len() < k {
        return Err(AbsorbError::Stuck("not enough vertices to sample from".into()));
    }
    let mut out: Vec<usize> = v.choose_multiple(rng, k).copied().collect();
    out.sort_unstable();
    Ok(out)
}

/// BFS order of the subtree from `root`, with parents inside the subtree.
fn subtree_bfs(tree: &RootedTree, sub: &NiceSubtree) -> Vec<(usize, Option<usize>)> {
    let mut out = vec![(sub.root, None)];
    let mut seen = VertexSet::new(tree.n());
    seen.insert(sub.root);
    let mut i = 0;
    while i < out.len() {
        let u = out[i].0;
        i += 1;
        for &c in tree.neighbours(u) {
            if sub.contains(c) && seen.insert(c) {
                out.push((c, Some(u)));
            }
        }
    }
    out
}

/// Type-1 reservation: sample `S` and `N`, pre-place the neighbours of `L`
/// on `N` and embed the rest of `T* - L` greedily in BFS order, each vertex
/// adjacent to all its embedded tree neighbours.
pub fn reserve_type1(
    g: &HostGraph,
    tree: &RootedTree,
    sub: &NiceSubtree,
    w_prime: usize,
    rng: &mut Rng,
) -> Result<AbsorptionPlan, AbsorbError> {
    if sub.kind != NiceKind::Type1 {
        return Err(AbsorbError::WrongKind);
    }
    let n = g.n();
    let l = sub.selected.clone();
    let s_size = reserved_size(l.len(), sub.gamma, tree.m())?;
    let mut pool = VertexSet::full(n);
    pool.remove(w_prime);
    let s = sample(&pool, s_size, rng)?;
    for &v in &s {
        pool.remove(v);
    }
    let mut n_set = sample(&pool, 2 * l.len(), rng)?;
    n_set.shuffle(rng);

    let mut phi = Embedding::new(tree.n(), n);
    phi.place(sub.root, w_prime);
    let mut reserved = VertexSet::from_iter_with_capacity(n, s.iter().copied());
    reserved.union_with(&VertexSet::from_iter_with_capacity(n, n_set.iter().copied()));
    let in_l = tree.vertex_set(&l);
    let mut k = 0;
    for &x in &l {
        for &y in tree.neighbours(x) {
            if phi.get(y).is_none() {
                phi.place(y, n_set[k]);
                k += 1;
            }
        }
    }
    n_set.truncate(k);
    n_set.sort_unstable();

    for (v, _) in subtree_bfs(tree, sub) {
        if phi.get(v).is_some() || in_l.contains(v) {
            continue;
        }
        let mut cand = phi.used().complement();
        cand.difference_with(&reserved);
        for &u in tree.neighbours(v) {
            if let Some(img) = phi.get(u) {
                cand.intersect_with(g.neighbours(img));
            }
        }
        let free = phi.used().complement().difference(&reserved);
        let best = cand
            .iter()
            .max_by_key(|&c| (g.degree_into(c, &free), std::cmp::Reverse(c)))
            .ok_or_else(|| AbsorbError::Stuck(format!("no image for subtree vertex {v}")))?;
        phi.place(v, best);
    }
    finish(g, tree, sub, NiceKind::Type1, l, s, n_set, phi, w_prime, None, None)
}

/// Type-2 reservation: `t*` goes to `w_prime`, the parent `t` of the most
/// deferred leaves goes to a universal vertex `w`, every other vertex to a
/// uniformly random free neighbour of its parent's image; `S` is sampled
/// from what remains.
pub fn reserve_type2(
    g: &HostGraph,
    tree: &RootedTree,
    sub: &NiceSubtree,
    w_prime: usize,
    rng: &mut Rng,
) -> Result<AbsorptionPlan, AbsorbError> {
    if sub.kind != NiceKind::Type2 {
        return Err(AbsorbError::WrongKind);
    }
    let n = g.n();
    let l = sub.selected.clone();
    let s_size = reserved_size(l.len(), sub.gamma, tree.m())?;
    let bfs = subtree_bfs(tree, sub);
    let parent_in = |x: usize| bfs.iter().find(|&&(v, _)| v == x).and_then(|&(_, p)| p);
    let mut counts: std::collections::BTreeMap<usize, usize> = Default::default();
    for &x in &l {
        if let Some(p) = parent_in(x) {
            *counts.entry(p).or_default() += 1;
        }
    }
    let t = counts
        .iter()
        .max_by_key(|&(&p, &c)| (c, std::cmp::Reverse(p)))
        .map(|(&p, _)| p)
        .ok_or(AbsorbError::Stuck("empty deferred set".into()))?;
    let w = g
        .universal_vertices()
        .into_iter()
        .find(|&u| u != w_prime)
        .ok_or(AbsorbError::NoUniversal)?;

    let mut phi = Embedding::new(tree.n(), n);
    phi.place(sub.root, w_prime);
    if t != sub.root {
        phi.place(t, w);
    }
    let in_l = tree.vertex_set(&l);
    for &(v, p) in &bfs {
        if phi.get(v).is_some() || in_l.contains(v) {
            continue;
        }
        let pi = phi.get(p.expect("non-root has parent")).expect("BFS order");
        let cand: Vec<usize> = g.neighbours(pi).difference(phi.used()).to_vec();
        let &c = cand
            .choose(rng)
            .ok_or_else(|| AbsorbError::Stuck(format!("no image for subtree vertex {v}")))?;
        phi.place(v, c);
    }
    let s = sample(&phi.used().complement(), s_size, rng)?;
    finish(g, tree, sub, NiceKind::Type2, l, s, Vec::new(), phi, w_prime, Some(w), Some(t))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    g: &HostGraph,
    tree: &RootedTree,
    sub: &NiceSubtree,
    kind: NiceKind,
    l: Vec<usize>,
    s: Vec<usize>,
    n_set: Vec<usize>,
    phi: Embedding,
    w_prime: usize,
    w: Option<usize>,
    t: Option<usize>,
) -> Result<AbsorptionPlan, AbsorbError> {
    let anchors = l
        .iter()
        .map(|&x| tree.neighbours(x).iter().filter_map(|&y| phi.get(y)).collect())
        .collect();
    let plan = AbsorptionPlan { kind, l, s, n_set, anchors, phi_star: phi, tstar: sub.root, w_prime, w, t };
    verify_plan(g, tree, sub, &plan)?;
    Ok(plan)
}

/// Audits a plan: sizes, disjointness, coverage of `T* - L` and validity of
/// the partial embedding.
pub fn verify_plan(g: &HostGraph, tree: &RootedTree, sub: &NiceSubtree, plan: &AbsorptionPlan) -> Result<(), AbsorbError> {
    let bad = |s: &str| Err(AbsorbError::InvalidPlan(s.into()));
    let n = g.n();
    let s_set = plan.s_set(n);
    if s_set.len() != plan.s.len() || plan.s.len() != reserved_size(plan.l.len(), sub.gamma, tree.m())? {
        return bad("|S| differs from |L| - ceil((gamma/2)^4 m)");
    }
    if !s_set.is_disjoint(plan.phi_star.used()) {
        return bad("S meets the subtree images");
    }
    if plan.s.contains(&plan.w_prime) || plan.phi_star.get(sub.root) != Some(plan.w_prime) {
        return bad("root image");
    }
    let in_l = tree.vertex_set(&plan.l);
    for &v in &sub.vertices {
        if in_l.contains(v) == plan.phi_star.get(v).is_some() {
            return bad("subtree coverage");
        }
    }
    if plan.phi_star.domain_len() != sub.vertices.len() - plan.l.len() {
        return bad("images outside the subtree");
    }
    if !crate::embedding::verify_embedding(g, tree, &plan.phi_star) {
        return bad("partial embedding invalid");
    }
    match plan.kind {
        NiceKind::Type1 => {
            if plan.n_set.len() != 2 * plan.l.len() {
                return bad("|N| != 2|L|");
            }
            let n_vs = VertexSet::from_iter_with_capacity(n, plan.n_set.iter().copied());
            if !n_vs.is_disjoint(&s_set) {
                return bad("N meets S");
            }
            for a in &plan.anchors {
                if a.len() != 2 || !a.iter().all(|x| n_vs.contains(*x)) {
                    return bad("L neighbour images outside N");
                }
            }
        }
        NiceKind::Type2 => {
            let (Some(w), Some(t)) = (plan.w, plan.t) else { return bad("missing t or w") };
            if plan.phi_star.get(t) != Some(w) || g.degree(w) != n - 1 {
                return bad("t not on a universal vertex");
            }
            for a in &plan.anchors {
                if a.len() != 1 {
                    return bad("deferred leaf anchors");
                }
            }
        }
    }
    Ok(())
}

/// Maps `L` bijectively onto `S ∪ R`, each `x` to a vertex adjacent to all
/// its anchors. Returns `(x, image)` pairs in `L` order.
pub fn absorb(g: &HostGraph, plan: &AbsorptionPlan, r: &[usize]) -> Result<Vec<(usize, usize)>, AbsorbError> {
    let n = g.n();
    let r_set = VertexSet::from_iter_with_capacity(n, r.iter().copied());
    let s_set = plan.s_set(n);
    if r_set.len() != r.len() || plan.s.len() + r.len() != plan.l.len() {
        return Err(AbsorbError::BadLeftover(format!(
            "|R| = {} but |L| - |S| = {}",
            r.len(),
            plan.l.len() as isize - plan.s.len() as isize
        )));
    }
    if !r_set.is_disjoint(&s_set) || !r_set.is_disjoint(plan.phi_star.used()) {
        return Err(AbsorbError::BadLeftover("R meets S or occupied vertices".into()));
    }
    let mut targets = s_set;
    targets.union_with(&r_set);
    let right: Vec<usize> = targets.to_vec();
    let adj: Vec<Vec<usize>> = (0..plan.l.len())
        .map(|i| {
            let c = plan.candidates(g, i);
            right.iter().enumerate().filter(|(_, &v)| c.contains(v)).map(|(j, _)| j).collect()
        })
        .collect();
    let pair = max_bipartite_matching(right.len(), &adj);
    let out: Option<Vec<(usize, usize)>> =
        pair.iter().zip(&plan.l).map(|(p, &x)| p.map(|j| (x, right[j]))).collect();
    out.ok_or(AbsorbError::NoMatching { matched: super::matching_size(&pair), needed: plan.l.len() })
}
