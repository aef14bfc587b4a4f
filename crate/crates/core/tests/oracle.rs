mod common;

use std::collections::BTreeSet;
use std::time::Duration;

use common::{from_prufer, planted_parts, prufer_tree};
use proptest::prelude::*;
use spanembed::oracle::{
    backtrack_embed, canonical_form, enumerate_free_trees, enumerate_with_cap, generate, random_spanning_tree,
    EnumerateError, GenerateError, InstanceProfile, OracleResult, ProfileKind,
};
use spanembed::rng;
use spanembed::{embed_tree, is_full_embedding, validate_m_good, EmbedConfig, HostGraph, RootedTree, VertexSet};

/// Rooted code by nested parentheses, children sorted; free code is the
/// minimum over all roots.
fn free_code(n: usize, edges: &[(usize, usize)]) -> String {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    fn rooted(adj: &[Vec<usize>], v: usize, p: usize) -> String {
        let mut kids: Vec<String> = adj[v].iter().filter(|&&u| u != p).map(|&u| rooted(adj, u, v)).collect();
        kids.sort();
        format!("({})", kids.concat())
    }
    (0..n).map(|r| rooted(&adj, r, usize::MAX)).min().unwrap_or_default()
}

fn count_by_prufer(n: usize) -> usize {
    let mut seen = BTreeSet::new();
    let total = n.pow(n as u32 - 2);
    let mut seq = vec![0usize; n - 2];
    for mut k in 0..total {
        for s in seq.iter_mut() {
            *s = k % n;
            k /= n;
        }
        let t = from_prufer(n, &seq);
        seen.insert(free_code(n, &t.edges()));
    }
    seen.len()
}

fn profile(kind: ProfileKind, m: usize, seed: u64) -> HostGraph {
    generate(InstanceProfile { kind, m }, &mut rng::rng(seed)).unwrap()
}

#[test]
fn free_tree_counts() {
    // unlabelled trees with 3, 5, 7, 9 edges
    let want = [(3, 2), (5, 6), (7, 23), (9, 106)];
    for (m, c) in want {
        let trees = enumerate_free_trees(m).unwrap();
        assert_eq!(trees.len(), c, "{m} edges");
        assert!(trees.iter().all(|t| t.m() == m));
    }
}

#[test]
fn enumeration_matches_prufer_dedup() {
    for n in 3..=8 {
        let trees = enumerate_free_trees(n - 1).unwrap();
        let codes: BTreeSet<String> = trees.iter().map(|t| free_code(n, &t.edges())).collect();
        assert_eq!(codes.len(), trees.len(), "duplicates at n = {n}");
        assert_eq!(codes.len(), count_by_prufer(n), "n = {n}");
    }
}

#[test]
fn canonical_form_separates_exactly_isomorphism_classes() {
    let mut r = rng::rng(1);
    for _ in 0..300 {
        let a = prufer_tree(8, &mut r);
        let b = prufer_tree(8, &mut r);
        let same = free_code(8, &a.edges()) == free_code(8, &b.edges());
        assert_eq!(canonical_form(&a) == canonical_form(&b), same);
    }
}

#[test]
fn enumeration_cap() {
    assert_eq!(enumerate_with_cap(5, 4).unwrap_err(), EnumerateError::CapExceeded { requested: 5, cap: 4 });
}

#[test]
fn generated_hosts_are_m_good() {
    for seed in 0..100 {
        let g = profile(ProfileKind::RandomSupergraph { keep: 0.8 }, 100, seed);
        assert!(validate_m_good(&g).is_m_good);
        assert_eq!(g.n(), 101);
    }
    let k = profile(ProfileKind::Complete, 50, 0);
    assert_eq!(k.edge_count(), 51 * 50 / 2);
    for seed in 0..20 {
        let a = profile(ProfileKind::Adversarial, 60, seed);
        assert!(validate_m_good(&a).is_m_good);
        assert!(a.edge_count() <= profile(ProfileKind::RandomSupergraph { keep: 0.9 }, 60, seed).edge_count());
    }
}

#[test]
fn planted_host_structure() {
    let m = 300;
    let g = profile(ProfileKind::PlantedExtremal { cross: 0 }, m, 0);
    let (x1, x2, x3) = planted_parts(m);
    let n = g.n();
    let s = |v: Vec<usize>| VertexSet::from_iter_with_capacity(n, v);
    let (a, b, c) = (s(x1), s(x2), s(x3));
    assert_eq!(g.edges_between(&a, &b), 0);
    assert!(validate_m_good(&g).is_m_good);
    assert_eq!(a.len() + b.len() + c.len(), n);
    let noisy = profile(ProfileKind::PlantedExtremal { cross: 25 }, m, 1);
    assert_eq!(noisy.edges_between(&a, &b), 25);
    assert!(matches!(
        generate(InstanceProfile { kind: ProfileKind::PlantedExtremal { cross: 1 }, m: 1 }, &mut rng::rng(0)),
        Err(GenerateError::Infeasible(_))
    ));
}

#[test]
fn spanning_trees_of_k4_cover_all_labelled_trees() {
    let g = HostGraph::complete(4).unwrap();
    let mut r = rng::rng(2);
    let mut seen = BTreeSet::new();
    for _ in 0..2000 {
        let t = random_spanning_tree(&g, &mut r).unwrap();
        let mut e: Vec<(usize, usize)> = t.edges().into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        e.sort_unstable();
        seen.insert(e);
    }
    assert_eq!(seen.len(), 16);
}

#[test]
fn planted_spanning_trees_avoid_cross_pairs() {
    let m = 90;
    let g = profile(ProfileKind::PlantedExtremal { cross: 0 }, m, 0);
    let (x1, x2, _) = planted_parts(m);
    for seed in 0..20 {
        let t = random_spanning_tree(&g, &mut rng::rng(seed)).unwrap();
        for (a, b) in t.edges() {
            assert!(g.has_edge(a, b));
            assert!(!(x1.contains(&a) && x2.contains(&b) || x1.contains(&b) && x2.contains(&a)));
        }
    }
}

#[test]
fn every_seven_edge_tree_fits_every_small_host() {
    let trees = enumerate_free_trees(7).unwrap();
    let mut hosts = vec![profile(ProfileKind::Complete, 7, 0)];
    for seed in 0..15 {
        hosts.push(profile(ProfileKind::RandomSupergraph { keep: seed as f64 / 15.0 }, 7, seed));
        hosts.push(profile(ProfileKind::PlantedExtremal { cross: (seed % 3) as usize }, 7, seed));
        hosts.push(profile(ProfileKind::Adversarial, 7, seed));
    }
    for g in &hosts {
        assert!(validate_m_good(g).is_m_good);
        for t in &trees {
            match backtrack_embed(g, t, None) {
                OracleResult::Embedded(phi) => assert!(is_full_embedding(g, t, &phi)),
                other => panic!("{other:?}"),
            }
        }
    }
}

#[test]
fn oracle_negative_answers() {
    let g = HostGraph::cycle(8).unwrap();
    assert_eq!(backtrack_embed(&g, &RootedTree::star(8), None), OracleResult::NotFound);
    let spider = RootedTree::from_edges(8, &[(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6), (6, 7)], 0).unwrap();
    assert_eq!(backtrack_embed(&g, &spider, None), OracleResult::NotFound);
    assert!(matches!(backtrack_embed(&g, &RootedTree::path(8), None), OracleResult::Embedded(_)));
}

#[test]
fn oracle_timeout_is_reported() {
    // K_{29,31} has no Hamiltonian path, and the search only learns that slowly
    let mut edges = Vec::new();
    for a in 0..29 {
        for b in 29..60 {
            edges.push((a, b));
        }
    }
    let g = HostGraph::from_edges(60, &edges).unwrap();
    let t = RootedTree::path(60);
    assert_eq!(backtrack_embed(&g, &t, Some(Duration::ZERO)), OracleResult::Timeout);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Whatever the pipeline embeds, the exact search finds too.
    #[test]
    fn pipeline_success_implies_oracle_success(m in 4usize..12, keep in 0.0f64..1.0, seed: u64) {
        let g = profile(ProfileKind::RandomSupergraph { keep }, m, seed);
        let t = prufer_tree(m + 1, &mut rng::rng(seed ^ 7));
        let cfg = EmbedConfig { seed, ..Default::default() };
        let ours = embed_tree(&g, &t, &cfg);
        let exact = backtrack_embed(&g, &t, None);
        if let Ok(r) = &ours {
            prop_assert!(is_full_embedding(&g, &t, &r.embedding));
            prop_assert!(matches!(exact, OracleResult::Embedded(_)));
        }
        if let OracleResult::Embedded(phi) = exact {
            prop_assert!(is_full_embedding(&g, &t, &phi));
            prop_assert!(ours.is_ok());
        }
    }
}
