mod common;

use common::audit::{audit, extremal_run, legs_tree};
use common::{planted, planted_parts, prufer_tree, random_host};
use proptest::prelude::*;
use spanembed::embed::{
    quota_embed_component, quota_labels, Branch, ExtremalOutcome, Side,
};
use spanembed::oracle::{backtrack_embed, random_spanning_tree, OracleResult};
use spanembed::rng;
use spanembed::{embed_tree, verify_embedding, EmbedConfig, EmbedError, Embedding, HostGraph, RootedTree, VertexSet};

fn cfg(seed: u64) -> EmbedConfig {
    EmbedConfig { seed, ..Default::default() }
}

#[test]
fn star_into_complete() {
    let g = HostGraph::complete(101).unwrap();
    let t = RootedTree::star(101);
    let r = embed_tree(&g, &t, &cfg(0)).unwrap();
    assert!(verify_embedding(&g, &t, &r.embedding));
    assert_eq!(r.embedding.domain_len(), 101);
}

#[test]
fn path_into_planted_uses_extremal_branch() {
    let g = planted(300, 0, 0);
    let t = RootedTree::path(301);
    let r = embed_tree(&g, &t, &cfg(1)).unwrap();
    assert_eq!(r.trace.branch, Some(Branch::Extremal));
    assert!(r.trace.special_detected);
    assert!(verify_embedding(&g, &t, &r.embedding));
    assert!(matches!(backtrack_embed(&g, &t, None), OracleResult::Embedded(_)));
}

#[test]
fn random_pairs_with_fallback_always_embed() {
    let m = 500;
    for seed in 0..60 {
        let g = random_host(m, 0.3 + 0.01 * seed as f64, seed);
        let t = random_spanning_tree(&g, &mut rng::split(seed, 1)).unwrap();
        let r = embed_tree(&g, &t, &cfg(seed)).unwrap();
        assert!(verify_embedding(&g, &t, &r.embedding));
        assert_eq!(r.embedding.domain_len(), m + 1);
    }
}

#[test]
fn forced_greedy_on_planted_still_succeeds() {
    let g = planted(300, 0, 2);
    let t = RootedTree::path(301);
    let c = EmbedConfig { allow_extremal: false, ..cfg(3) };
    let r = embed_tree(&g, &t, &c).unwrap();
    assert!(matches!(r.trace.branch, Some(Branch::Greedy) | Some(Branch::Oracle)));
    assert!(!r.trace.special_detected);
    assert!(verify_embedding(&g, &t, &r.embedding));
}

#[test]
fn disabled_fallback_reports_failure() {
    // m below the decomposition range, so only the exact search could help
    let g = HostGraph::complete(11).unwrap();
    let t = RootedTree::path(11);
    let c = EmbedConfig { oracle_fallback: false, ..cfg(0) };
    assert!(matches!(embed_tree(&g, &t, &c), Err(EmbedError::Stuck(_))));
}

#[test]
fn size_mismatch_and_bad_config() {
    let g = HostGraph::complete(10).unwrap();
    assert!(matches!(
        embed_tree(&g, &RootedTree::path(9), &cfg(0)),
        Err(EmbedError::SizeMismatch { tree: 9, graph: 10 })
    ));
    let c = EmbedConfig { gamma: 1.5, ..cfg(0) };
    assert!(matches!(embed_tree(&g, &RootedTree::path(10), &c), Err(EmbedError::Config(_))));
}

#[test]
fn not_m_good_host_goes_to_exact_search() {
    // a 10-cycle has no universal vertex; the path still embeds
    let g = HostGraph::cycle(10).unwrap();
    let r = embed_tree(&g, &RootedTree::path(10), &cfg(0)).unwrap();
    assert_eq!(r.trace.branch, Some(Branch::Oracle));
    let star = RootedTree::star(10);
    assert_eq!(embed_tree(&g, &star, &cfg(0)).unwrap_err(), EmbedError::NotFound);
}

#[test]
fn pipeline_is_deterministic() {
    let g = random_host(400, 0.5, 9);
    let t = random_spanning_tree(&g, &mut rng::rng(9)).unwrap();
    let a = embed_tree(&g, &t, &cfg(5)).unwrap();
    let b = embed_tree(&g, &t, &cfg(5)).unwrap();
    assert_eq!(a, b);
    let gp = planted(300, 0, 0);
    let tp = legs_tree(300, 55);
    assert_eq!(embed_tree(&gp, &tp, &cfg(2)).unwrap(), embed_tree(&gp, &tp, &cfg(2)).unwrap());
}

fn run_case(legs: usize, want: u8, seeds: u64) -> Vec<ExtremalOutcome> {
    let g = planted(300, 0, 0);
    let t = if legs == 0 { RootedTree::path(301) } else { legs_tree(300, legs) };
    (0..seeds)
        .map(|seed| {
            let c = cfg(seed);
            let run = extremal_run(&g, &t, &c).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
            assert_eq!(run.setup.case, want);
            audit(&g, &t, &run, &c).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
            run.outcome
        })
        .collect()
}

#[test]
fn case1_pattern_audit() {
    for out in run_case(56, 1, 10) {
        assert!(!out.pattern_components.is_empty());
    }
}

#[test]
fn case2_pattern_audit() {
    run_case(50, 2, 10);
}

#[test]
fn case3_side_audit() {
    for out in run_case(0, 3, 10) {
        assert!(out.pattern_components.is_empty());
    }
}

#[test]
fn case_thresholds_on_integers() {
    use spanembed::embed::case_of;
    assert_eq!(case_of(300, 151), 1);
    assert_eq!(case_of(300, 150), 2);
    assert_eq!(case_of(300, 134), 2);
    assert_eq!(case_of(300, 133), 3);
}

fn planted_sides(m: usize) -> (HostGraph, VertexSet, VertexSet) {
    let g = planted(m, 0, 0);
    let (x1, _, x3) = planted_parts(m);
    let n = g.n();
    (g, VertexSet::from_iter_with_capacity(n, x1), VertexSet::from_iter_with_capacity(n, x3))
}

/// Places `comp` with quota `t` and checks the count and every tree edge.
fn quota_audit(g: &HostGraph, tree: &RootedTree, sa: &VertexSet, sb: &VertexSet, t: usize, seed: u64) {
    let comp: Vec<usize> = (0..tree.n()).collect();
    let mut phi = Embedding::new(tree.n(), g.n());
    quota_embed_component(g, tree, &comp, 0, None, sa, sb, t, &mut phi, &mut rng::rng(seed)).unwrap();
    let in_b = comp.iter().filter(|&&v| sb.contains(phi.get(v).unwrap())).count();
    assert_eq!(in_b, t);
    assert_eq!(comp.iter().filter(|&&v| sa.contains(phi.get(v).unwrap())).count(), comp.len() - t);
    assert!(verify_embedding(g, tree, &phi));
}

#[test]
fn quota_path_star_and_five() {
    let (g, sa, sb) = planted_sides(300);
    quota_audit(&g, &RootedTree::path(7), &sa, &sb, 3, 0);
    quota_audit(&g, &RootedTree::star(6), &sa, &sb, 0, 1);
    quota_audit(&g, &RootedTree::path(5), &sa, &sb, 2, 2);
    let fork = RootedTree::from_edges(5, &[(0, 1), (1, 2), (1, 3), (0, 4)], 0).unwrap();
    quota_audit(&g, &fork, &sa, &sb, 2, 3);
}

#[test]
fn quota_random_nine_vertex_components() {
    let (g, sa, sb) = planted_sides(300);
    let mut r = rng::rng(4);
    for k in 0..20 {
        let t = prufer_tree(9, &mut r);
        for q in 0..=4 {
            // the larger class has at least 5 vertices, so 4 non-root ones
            let l = quota_labels(&t, &(0..9).collect::<Vec<_>>(), 0, &VertexSet::new(9), q, true).unwrap();
            assert_eq!(l.iter().filter(|x| x.1 == Side::B).count(), q);
            quota_audit(&g, &t, &sa, &sb, q, k);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn quota_b_side_is_independent(n in 2usize..40, seed: u64, frac in 0.0f64..1.0) {
        let t = prufer_tree(n, &mut rng::rng(seed));
        let comp: Vec<usize> = (0..n).collect();
        let cap = spanembed::embed::max_quota(n);
        let q = (frac * cap as f64) as usize;
        if let Ok(l) = quota_labels(&t, &comp, 0, &VertexSet::new(n), q, true) {
            let b: VertexSet = VertexSet::from_iter_with_capacity(n, l.iter().filter(|x| x.1 == Side::B).map(|x| x.0));
            prop_assert_eq!(b.len(), q);
            prop_assert!(!b.contains(0));
            for v in b.iter() {
                prop_assert!(t.neighbours(v).iter().all(|&u| !b.contains(u)));
            }
        }
    }

    #[test]
    fn every_returned_embedding_verifies(m in 20usize..120, keep in 0.0f64..1.0, seed: u64) {
        let g = random_host(m, keep, seed);
        let t = prufer_tree(m + 1, &mut rng::rng(seed ^ 1));
        if let Ok(r) = embed_tree(&g, &t, &cfg(seed)) {
            prop_assert!(verify_embedding(&g, &t, &r.embedding));
            prop_assert_eq!(r.embedding.domain_len(), m + 1);
        }
    }
}
