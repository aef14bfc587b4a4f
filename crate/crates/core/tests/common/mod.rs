#![allow(dead_code)]

pub mod audit;
pub mod cut;
use rand::Rng as _;
use spanembed::oracle::{generate, InstanceProfile, ProfileKind};
use spanembed::rng::{self, Rng};
use spanembed::special::SpecialPartition;
use spanembed::{HostGraph, RootedTree};

/// Reference instance with `|X1| = |X2| = a`, `|X3| = rest`: X1 is `0..a`,
/// X2 is `a..2a`, X3 the remaining vertices.
pub fn planted(m: usize, cross: usize, seed: u64) -> HostGraph {
    generate(InstanceProfile { kind: ProfileKind::PlantedExtremal { cross }, m }, &mut rng::rng(seed)).unwrap()
}

pub fn planted_parts(m: usize) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let a = m.div_ceil(3);
    ((0..a).collect(), (a..2 * a).collect(), (2 * a..m + 1).collect())
}

pub fn planted_partition(m: usize, gamma: f64) -> SpecialPartition {
    let (x1, x2, x3) = planted_parts(m);
    SpecialPartition { x1, x2, x3, gamma }
}

pub fn random_host(m: usize, keep: f64, seed: u64) -> HostGraph {
    generate(InstanceProfile { kind: ProfileKind::RandomSupergraph { keep }, m }, &mut rng::rng(seed)).unwrap()
}

/// Uniform labelled tree from a random Prüfer sequence.
pub fn prufer_tree(n: usize, rng: &mut Rng) -> RootedTree {
    if n <= 2 {
        return RootedTree::path(n);
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    from_prufer(n, &seq)
}

pub fn from_prufer(n: usize, seq: &[usize]) -> RootedTree {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    let mut heap: std::collections::BinaryHeap<std::cmp::Reverse<usize>> =
        (0..n).filter(|&v| degree[v] == 1).map(std::cmp::Reverse).collect();
    for &s in seq {
        let std::cmp::Reverse(leaf) = heap.pop().unwrap();
        edges.push((leaf, s));
        degree[s] -= 1;
        if degree[s] == 1 {
            heap.push(std::cmp::Reverse(s));
        }
    }
    let std::cmp::Reverse(a) = heap.pop().unwrap();
    let std::cmp::Reverse(b) = heap.pop().unwrap();
    edges.push((a, b));
    RootedTree::from_edges(n, &edges, 0).unwrap()
}

/// Each vertex attaches to a uniformly random earlier vertex.
pub fn recursive_tree(n: usize, rng: &mut Rng) -> RootedTree {
    let edges: Vec<(usize, usize)> = (1..n).map(|v| (v, rng.gen_range(0..v))).collect();
    RootedTree::from_edges(n, &edges, 0).unwrap()
}

/// Independent component sizes of `tree - removed`, by DFS over edges.
pub fn component_sizes(tree: &RootedTree, keep: &[bool]) -> Vec<usize> {
    let n = tree.n();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if !keep[s] || seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![s];
        let mut size = 0;
        while let Some(u) = stack.pop() {
            size += 1;
            for &w in tree.neighbours(u) {
                if keep[w] && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        out.push(size);
    }
    out
}

/// Planted instance at m = 300 where X1 vertices 0, 1, 2 lose their mutual
/// edges and gain two X2 neighbours each, keeping the graph m-good.
pub fn sabotaged() -> HostGraph {
    let mut g = planted(300, 0, 1);
    for (u, v) in [(0, 1), (0, 2), (1, 2)] {
        g.remove_edge(u, v);
    }
    for u in 0..3 {
        g.add_edge(u, 100 + 2 * u).unwrap();
        g.add_edge(u, 101 + 2 * u).unwrap();
    }
    g
}

