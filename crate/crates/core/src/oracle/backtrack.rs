use std::time::{Duration, Instant};

use serde::Serialize;

use crate::bitset::VertexSet;
use crate::decompose::centroid;
use crate::embedding::Embedding;
use crate::graph::HostGraph;
use crate::tree::RootedTree;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum OracleResult {
    Embedded(Embedding),
    /// The search space was exhausted.
    NotFound,
    Timeout,
}

struct Frame {
    candidates: Vec<usize>,
}

/// Exhaustive search for an embedding of `tree` into `g`. Tree vertices go in
/// BFS order from a centroid; each takes a free neighbour of its parent's
/// image, fewest free neighbours first. A placement is pruned when it
/// leaves some placed vertex with fewer free neighbours than unplaced
/// children.
pub fn backtrack_embed(g: &HostGraph, tree: &RootedTree, budget: Option<Duration>) -> OracleResult {
    let tn = tree.n();
    let n = g.n();
    if tn > n {
        return OracleResult::NotFound;
    }
    let all: Vec<usize> = (0..tn).collect();
    let c = centroid(tree, &all).expect("trees are connected");
    let rooted = tree.rerooted(c);
    let order = rooted.bfs_order().to_vec();
    let deadline = budget.map(|b| Instant::now() + b);

    let mut phi = Embedding::new(tn, n);
    let mut pending = vec![0usize; tn];
    let mut free = VertexSet::full(n);
    let mut stack: Vec<Frame> = Vec::with_capacity(tn);
    let mut steps: u64 = 0;

    let candidates_for = |i: usize, phi: &Embedding, free: &VertexSet| -> Vec<usize> {
        let v = order[i];
        let base = match rooted.parent(v) {
            Some(p) => g.neighbours(phi.get(p).expect("parent first")).intersection(free),
            None => free.clone(),
        };
        let need = rooted.children(v).len();
        let mut c: Vec<(usize, usize)> =
            base.iter().map(|x| (g.degree_into(x, free), x)).filter(|&(d, _)| d >= need).collect();
        // popped from the back, so sort descending to try fewest first
        c.sort_unstable_by(|a, b| b.cmp(a));
        c.into_iter().map(|(_, x)| x).collect()
    };

    stack.push(Frame { candidates: candidates_for(0, &phi, &free) });
    loop {
        steps += 1;
        if steps.is_multiple_of(1024) {
            if let Some(d) = deadline {
                if Instant::now() >= d {
                    return OracleResult::Timeout;
                }
            }
        }
        let i = stack.len() - 1;
        let v = order[i];
        let next = stack[i].candidates.pop();
        match next {
            Some(x) => {
                phi.place(v, x);
                free.remove(x);
                if let Some(p) = rooted.parent(v) {
                    pending[p] -= 1;
                }
                pending[v] = rooted.children(v).len();
                if feasible(g, &order[..=i], &phi, &pending, &free, x) {
                    if i + 1 == tn {
                        return OracleResult::Embedded(phi);
                    }
                    let c = candidates_for(i + 1, &phi, &free);
                    stack.push(Frame { candidates: c });
                    continue;
                }
                undo(&rooted, v, &mut phi, &mut pending, &mut free);
            }
            None => {
                stack.pop();
                if stack.is_empty() {
                    return OracleResult::NotFound;
                }
                let u = order[stack.len() - 1];
                undo(&rooted, u, &mut phi, &mut pending, &mut free);
            }
        }
    }
}

fn undo(rooted: &RootedTree, v: usize, phi: &mut Embedding, pending: &mut [usize], free: &mut VertexSet) {
    if let Some(x) = phi.unplace(v) {
        free.insert(x);
    }
    pending[v] = 0;
    if let Some(p) = rooted.parent(v) {
        pending[p] += 1;
    }
}

/// Only placed vertices whose image is adjacent to the newly used `x` lost
/// a free neighbour; each must keep room for its unplaced children.
fn feasible(g: &HostGraph, placed: &[usize], phi: &Embedding, pending: &[usize], free: &VertexSet, x: usize) -> bool {
    placed.iter().all(|&u| {
        if pending[u] == 0 {
            return true;
        }
        let img = phi.get(u).expect("placed");
        !g.has_edge(img, x) || g.degree_into(img, free) >= pending[u]
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::is_full_embedding;

    #[test]
    fn path_into_complete() {
        let g = HostGraph::complete(6).unwrap();
        let t = RootedTree::path(6);
        match backtrack_embed(&g, &t, None) {
            OracleResult::Embedded(phi) => assert!(is_full_embedding(&g, &t, &phi)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn star_into_cycle_not_found() {
        let g = HostGraph::cycle(10).unwrap();
        let t = RootedTree::star(10);
        assert_eq!(backtrack_embed(&g, &t, None), OracleResult::NotFound);
    }

    #[test]
    fn path_into_cycle_found() {
        let g = HostGraph::cycle(9).unwrap();
        let t = RootedTree::path(9);
        assert!(matches!(backtrack_embed(&g, &t, None), OracleResult::Embedded(_)));
    }
}
