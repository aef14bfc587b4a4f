use super::DecomposeError;
use crate::tree::RootedTree;

/// A vertex of the connected vertex set `d` whose removal leaves pieces of
/// at most `|d|/2` vertices.
///
/// Roots `d` at its lowest-index leaf and returns the deepest vertex whose
/// descendant closure has at least `|d|/2` vertices.
pub fn centroid(tree: &RootedTree, d: &[usize]) -> Result<usize, DecomposeError> {
    if d.is_empty() {
        return Err(DecomposeError::Empty);
    }
    let set = tree.vertex_set(d);
    let k = set.len();
    if k == 1 {
        return Ok(d[0]);
    }
    let inner = |v: usize| tree.neighbours(v).iter().copied().filter(|&u| set.contains(u));
    let start = set
        .iter()
        .find(|&v| inner(v).count() <= 1)
        .ok_or(DecomposeError::Disconnected)?;

    let n = tree.n();
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    let mut order = Vec::with_capacity(k);
    order.push(start);
    parent[start] = start;
    let mut i = 0;
    while i < order.len() {
        let u = order[i];
        i += 1;
        for w in inner(u) {
            if parent[w] == usize::MAX {
                parent[w] = u;
                depth[w] = depth[u] + 1;
                order.push(w);
            }
        }
    }
    if order.len() != k {
        return Err(DecomposeError::Disconnected);
    }
    let mut size = vec![0usize; n];
    for &v in order.iter().rev() {
        size[v] += 1;
        if v != start {
            size[parent[v]] += size[v];
        }
    }
    let best = order
        .iter()
        .copied()
        .filter(|&v| 2 * size[v] >= k)
        .max_by_key(|&v| (depth[v], std::cmp::Reverse(v)))
        .expect("start qualifies");
    Ok(best)
}
