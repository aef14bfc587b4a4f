//! Hopcroft–Karp maximum bipartite matching.

use std::collections::VecDeque;

const INF: usize = usize::MAX;

/// Maximum matching between `0..left` and `0..right`, where `adj[u]` lists the
/// right neighbours of left vertex `u`. Output: `pair[u]` for each left vertex.
/// Deterministic: neighbours are tried in the given order.
pub fn max_bipartite_matching(right: usize, adj: &[Vec<usize>]) -> Vec<Option<usize>> {
    let left = adj.len();
    let mut pair_l = vec![INF; left];
    let mut pair_r = vec![INF; right];
    let mut dist = vec![0usize; left];

    loop {
        let mut queue = VecDeque::new();
        for u in 0..left {
            if pair_l[u] == INF {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = INF;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = pair_r[v];
                if w == INF {
                    found = true;
                } else if dist[w] == INF {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        let mut next = vec![0usize; left];
        for u in 0..left {
            if pair_l[u] == INF {
                augment(u, adj, &mut pair_l, &mut pair_r, &mut dist, &mut next);
            }
        }
    }
    pair_l.into_iter().map(|v| (v != INF).then_some(v)).collect()
}

/// Iterative layered DFS from a free left vertex.
fn augment(
    root: usize,
    adj: &[Vec<usize>],
    pair_l: &mut [usize],
    pair_r: &mut [usize],
    dist: &mut [usize],
    next: &mut [usize],
) -> bool {
    let mut stack = vec![root];
    while let Some(&u) = stack.last() {
        if next[u] == adj[u].len() {
            dist[u] = INF;
            stack.pop();
            continue;
        }
        let v = adj[u][next[u]];
        next[u] += 1;
        let w = pair_r[v];
        if w == INF {
            // flip the path recorded on the stack
            let mut v = v;
            while let Some(u) = stack.pop() {
                let prev = pair_l[u];
                pair_l[u] = v;
                pair_r[v] = u;
                v = prev;
            }
            return true;
        }
        if dist[w] == dist[u].wrapping_add(1) {
            stack.push(w);
        }
    }
    false
}

pub fn matching_size(pair: &[Option<usize>]) -> usize {
    pair.iter().filter(|p| p.is_some()).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_and_path() {
        let k: Vec<Vec<usize>> = (0..5).map(|_| (0..5).collect()).collect();
        assert_eq!(matching_size(&max_bipartite_matching(5, &k)), 5);
        // a1-b1-a2-b2
        let p = vec![vec![0], vec![0, 1]];
        let m = max_bipartite_matching(2, &p);
        assert_eq!(m, vec![Some(0), Some(1)]);
    }

    #[test]
    fn hall_violator() {
        let adj = vec![vec![0], vec![0], vec![1, 2], vec![2, 3]];
        assert_eq!(matching_size(&max_bipartite_matching(4, &adj)), 3);
        assert_eq!(matching_size(&max_bipartite_matching(3, &[vec![], vec![]])), 0);
    }

    #[test]
    fn matching_is_valid() {
        let adj = vec![vec![1, 2], vec![0], vec![0, 1], vec![2]];
        let m = max_bipartite_matching(3, &adj);
        let mut seen = std::collections::HashSet::new();
        for (u, v) in m.iter().enumerate() {
            if let Some(v) = v {
                assert!(adj[u].contains(v));
                assert!(seen.insert(*v));
            }
        }
        assert_eq!(matching_size(&m), 3);
    }
}
