use serde::Serialize;

use super::{ceil_real, floor_real, DecomposeError};
use crate::bitset::VertexSet;
use crate::tree::RootedTree;

/// Number of vertices on each reserved path (five edges).
pub const PATH_VERTICES: usize = 6;

/// Candidate roots tried before giving up.
const MAX_ROOT_CANDIDATES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NiceKind {
    /// Many disjoint 5-edge paths of degree-2 vertices.
    Type1,
    /// Many leaves of the host tree.
    Type2,
}

/// A small subtree hanging off `root` such that every other part of the
/// tree attaches to `root`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NiceSubtree {
    pub vertices: Vec<usize>,
    pub root: usize,
    pub kind: NiceKind,
    /// Type 1 only; each path listed from the end nearest `root`.
    pub paths: Vec<[usize; PATH_VERTICES]>,
    /// Type 2 only; tree leaves inside the subtree.
    pub reserved_leaves: Vec<usize>,
    /// The deferred set, filled by [`select_l`] via [`NiceSubtree::with_selected`].
    pub selected: Vec<usize>,
    pub gamma: f64,
    pub m: usize,
}

impl NiceSubtree {
    pub fn with_selected(mut self, selected: Vec<usize>) -> Self {
        self.selected = selected;
        self
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn min_paths(&self) -> usize {
        ceil_real(self.gamma * self.m as f64 / 20.0)
    }

    pub fn min_leaves(&self) -> usize {
        ceil_real(self.gamma * self.m as f64 / 40.0)
    }
}

fn check_gamma(gamma: f64) -> Result<(), DecomposeError> {
    if gamma > 0.0 && gamma <= 1.0 {
        Ok(())
    } else {
        Err(DecomposeError::BadGamma(gamma))
    }
}

/// Extracts a γ-nice subtree, enforcing `m >= 200/γ`.
pub fn gamma_nice_subtree(tree: &RootedTree, gamma: f64) -> Result<NiceSubtree, DecomposeError> {
    check_gamma(gamma)?;
    let m = tree.m();
    let needed = 200.0 / gamma;
    if (m as f64) < needed - 1e-9 {
        return Err(DecomposeError::TooSmall { m, gamma, needed });
    }
    try_nice_subtree(tree, gamma)
}

/// Same construction without the size precondition; the result is only
/// returned if it satisfies every clause of the definition.
pub fn try_nice_subtree(tree: &RootedTree, gamma: f64) -> Result<NiceSubtree, DecomposeError> {
    check_gamma(gamma)?;
    let m = tree.m();
    if m == 0 {
        return Err(DecomposeError::NoNiceSubtree);
    }
    let gm = gamma * m as f64;
    let half = ceil_real(gm / 2.0).max(1);
    let cap = floor_real(gm);

    let leaf = tree.leaves().next().expect("tree with an edge has a leaf");
    let rooted = tree.rerooted(leaf);
    let sizes = rooted.subtree_sizes();

    // deepest first, lowest index on ties
    let mut candidates: Vec<usize> = (0..tree.n()).filter(|&v| sizes[v] > half).collect();
    candidates.sort_by_key(|&v| (std::cmp::Reverse(rooted.depth(v)), v));

    let mut first_valid = None;
    for &root in candidates.iter().take(MAX_ROOT_CANDIDATES) {
        let mut kids: Vec<usize> = rooted.children(root).to_vec();
        kids.sort_by_key(|&c| (std::cmp::Reverse(sizes[c]), c));
        for greedy_full in [false, true] {
            let mut chosen = Vec::new();
            let mut total = 0;
            for &c in &kids {
                if !greedy_full && total >= half {
                    break;
                }
                if total + sizes[c] < cap {
                    total += sizes[c];
                    chosen.push(c);
                }
            }
            if chosen.is_empty() {
                continue;
            }
            if let Some(sub) = classify(tree, &rooted, root, &chosen, gamma) {
                if verify_nice(tree, &sub, gamma) {
                    // prefer subtrees whose deferred set can be chosen
                    if select_l(&sub, tree.neighbours(root)).is_ok() {
                        return Ok(sub);
                    }
                    first_valid.get_or_insert(sub);
                }
            }
        }
    }
    first_valid.ok_or(DecomposeError::NoNiceSubtree)
}

fn classify(
    tree: &RootedTree,
    rooted: &RootedTree,
    root: usize,
    chosen: &[usize],
    gamma: f64,
) -> Option<NiceSubtree> {
    let m = tree.m();
    let mut vertices = vec![root];
    let mut stack: Vec<usize> = chosen.to_vec();
    while let Some(u) = stack.pop() {
        vertices.push(u);
        stack.extend_from_slice(rooted.children(u));
    }
    vertices.sort_unstable();
    let mut sub = NiceSubtree {
        vertices,
        root,
        kind: NiceKind::Type2,
        paths: Vec::new(),
        reserved_leaves: Vec::new(),
        selected: Vec::new(),
        gamma,
        m,
    };

    let leaves: Vec<usize> =
        sub.vertices.iter().copied().filter(|&v| v != root && tree.is_leaf(v)).collect();
    if leaves.len() >= sub.min_leaves() {
        sub.reserved_leaves = leaves;
        return Some(sub);
    }

    // Drop high-degree vertices (and the root); what remains are vertical chains.
    let member = tree.vertex_set(&sub.vertices);
    let on_chain = |v: usize| v != root && member.contains(v) && tree.degree(v) <= 2;
    let mut paths = Vec::new();
    for &v in &sub.vertices {
        if !on_chain(v) || rooted.parent(v).is_some_and(on_chain) {
            continue;
        }
        let mut chain = vec![v];
        let mut cur = v;
        while let Some(&next) = rooted.children(cur).first() {
            if !on_chain(next) {
                break;
            }
            chain.push(next);
            cur = next;
        }
        // trim from the far end, keep whole 6-vertex blocks from the near end
        for block in chain.chunks_exact(PATH_VERTICES) {
            paths.push(block.try_into().expect("exact chunk"));
        }
    }
    let need = sub.min_paths();
    if paths.len() < need || need == 0 {
        return None;
    }
    paths.truncate(need);
    sub.kind = NiceKind::Type1;
    sub.paths = paths;
    Some(sub)
}

/// Literal check of the nice-subtree definition.
pub fn verify_nice(tree: &RootedTree, sub: &NiceSubtree, gamma: f64) -> bool {
    let n = tree.n();
    let m = tree.m();
    let gm = gamma * m as f64;
    if sub.vertices.is_empty() || sub.vertices.iter().any(|&v| v >= n) {
        return false;
    }
    let set = VertexSet::from_iter_with_capacity(n, sub.vertices.iter().copied());
    if set.len() != sub.vertices.len() || !set.contains(sub.root) {
        return false;
    }
    if set.len() as f64 > gm + 1e-9 {
        return false;
    }
    if !tree.is_connected_subset(&set) {
        return false;
    }
    // every component of T - T* touches the root
    for comp in tree.components(&set.complement()) {
        let touches = comp.iter().any(|&v| tree.neighbours(v).contains(&sub.root));
        if !touches {
            return false;
        }
    }
    if sub.selected.iter().any(|&v| v == sub.root || !set.contains(v)) {
        return false;
    }
    match sub.kind {
        NiceKind::Type1 => {
            if (sub.paths.len() as f64) < gm / 20.0 - 1e-9 {
                return false;
            }
            let mut seen = VertexSet::new(n);
            for path in &sub.paths {
                for (i, &v) in path.iter().enumerate() {
                    if v >= n || !set.contains(v) || tree.degree(v) > 2 || !seen.insert(v) {
                        return false;
                    }
                    if i > 0 && !tree.neighbours(v).contains(&path[i - 1]) {
                        return false;
                    }
                }
            }
            true
        }
        NiceKind::Type2 => {
            if (sub.reserved_leaves.len() as f64) < gm / 40.0 - 1e-9 {
                return false;
            }
            let mut seen = VertexSet::new(n);
            sub.reserved_leaves
                .iter()
                .all(|&v| v < n && set.contains(v) && tree.is_leaf(v) && seen.insert(v))
        }
    }
}

/// Chooses the deferred set: the fourth vertex of every reserved path
/// (type 1), or reserved leaves not adjacent to the root truncated to
/// `⌈γm/41⌉` (type 2).
pub fn select_l(sub: &NiceSubtree, root_neighbours: &[usize]) -> Result<Vec<usize>, DecomposeError> {
    match sub.kind {
        NiceKind::Type1 => Ok(sub.paths.iter().map(|p| p[3]).collect()),
        NiceKind::Type2 => {
            let needed = ceil_real(sub.gamma * sub.m as f64 / 41.0).max(1);
            let mut eligible: Vec<usize> = sub
                .reserved_leaves
                .iter()
                .copied()
                .filter(|v| !root_neighbours.contains(v))
                .collect();
            eligible.sort_unstable();
            if eligible.len() < needed {
                return Err(DecomposeError::TooFewLeaves { available: eligible.len(), needed });
            }
            eligible.truncate(needed);
            Ok(eligible)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn long_path_gives_type1() {
        let t = RootedTree::path(10_001);
        let sub = gamma_nice_subtree(&t, 0.02).unwrap();
        assert_eq!(sub.kind, NiceKind::Type1);
        assert!(sub.paths.len() >= 10);
        assert!(sub.vertices.len() <= 200);
        assert!(verify_nice(&t, &sub, 0.02));
        let l = select_l(&sub, t.neighbours(sub.root)).unwrap();
        assert_eq!(l.len(), 10);
        for (&x, p) in l.iter().zip(&sub.paths) {
            assert!(t.neighbours(x).iter().all(|u| p.contains(u)));
        }
    }

    #[test]
    fn star_gives_type2_at_center_and_l_fails() {
        let t = RootedTree::star(10_001);
        let sub = gamma_nice_subtree(&t, 0.02).unwrap();
        assert_eq!(sub.kind, NiceKind::Type2);
        assert_eq!(sub.root, 0);
        assert!(sub.reserved_leaves.len() >= 100);
        assert!(verify_nice(&t, &sub, 0.02));
        // every leaf neighbours the center
        assert_eq!(
            select_l(&sub, t.neighbours(0)),
            Err(DecomposeError::TooFewLeaves { available: 0, needed: 5 })
        );
    }

    #[test]
    fn spider_three_legs() {
        let m = 9999;
        let leg = m / 3;
        let mut edges = Vec::new();
        for l in 0..3 {
            let mut prev = 0;
            for i in 0..leg {
                let v = 1 + l * leg + i;
                edges.push((prev, v));
                prev = v;
            }
        }
        let t = RootedTree::from_edges(m + 1, &edges, 0).unwrap();
        let sub = gamma_nice_subtree(&t, 0.03).unwrap();
        assert!(verify_nice(&t, &sub, 0.03));
    }

    #[test]
    fn precondition_enforced() {
        let t = RootedTree::path(100);
        assert!(matches!(
            gamma_nice_subtree(&t, 0.02),
            Err(DecomposeError::TooSmall { m: 99, .. })
        ));
        assert_eq!(gamma_nice_subtree(&t, 0.0), Err(DecomposeError::BadGamma(0.0)));
    }

    #[test]
    fn verifier_rejects_whole_tree_and_fat_paths() {
        let t = RootedTree::path(10_001);
        let mut sub = gamma_nice_subtree(&t, 0.02).unwrap();
        let whole = NiceSubtree { vertices: (0..t.n()).collect(), ..sub.clone() };
        assert!(!verify_nice(&t, &whole, 0.02));

        // graft a leaf onto a path vertex so it has degree 3
        let x = sub.paths[0][2];
        let mut edges = t.edges();
        edges.push((x, t.n()));
        let t2 = RootedTree::from_edges(t.n() + 1, &edges, 0).unwrap();
        sub.m = t2.m();
        assert!(!verify_nice(&t2, &sub, 0.02));
    }

    #[test]
    fn type1_single_path_l_splits_three_and_one() {
        // a root with one six-vertex tail plus filler that is not a chain
        let t = RootedTree::path(7);
        let sub = NiceSubtree {
            vertices: (0..7).collect(),
            root: 0,
            kind: NiceKind::Type1,
            paths: vec![[1, 2, 3, 4, 5, 6]],
            reserved_leaves: vec![],
            selected: vec![],
            gamma: 1.0,
            m: 6,
        };
        let l = select_l(&sub, &[1]).unwrap();
        assert_eq!(l, vec![4]);
        let rest: Vec<usize> = (1..7).filter(|&v| v != 4).collect();
        let comps = t.components(&t.vertex_set(&rest));
        let mut sizes: Vec<usize> = comps.iter().map(Vec::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 3]);
    }
}
