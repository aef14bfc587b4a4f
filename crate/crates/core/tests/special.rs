mod common;

use common::{planted, planted_partition, random_host, sabotaged};
use proptest::prelude::*;
use spanembed::special::{
    detect_special, refine_partition, special_report, verify_refined, verify_special, RefineError, SpecialPartition,
};
use spanembed::{validate_m_good, HostGraph, VertexSet};

fn cross_edges(g: &HostGraph, p: &SpecialPartition) -> usize {
    let [a, b, _] = p.sets(g.n());
    g.edges_between(&a, &b)
}

#[test]
fn verify_accepts_plant_and_rejects_balanced_complete() {
    let g = planted(300, 0, 3);
    assert!(verify_special(&g, &planted_partition(300, 0.05)));

    let k = HostGraph::complete(301).unwrap();
    let r = special_report(&k, &planted_partition(300, 0.05));
    assert!(r.is_partition && r.sizes_ok && !r.sparse_ok);
    assert_eq!(r.cross_edges, 100 * 100);
}

#[test]
fn verify_rejects_swapped_parts() {
    let g = planted(300, 0, 4);
    let mut p = planted_partition(300, 0.05);
    std::mem::swap(&mut p.x2, &mut p.x3);
    assert!(!verify_special(&g, &p));
}

#[test]
fn verify_rejects_non_partitions() {
    let g = planted(30, 0, 5);
    let mut p = planted_partition(30, 0.05);
    p.x3.push(p.x1[0]);
    assert!(!special_report(&g, &p).is_partition);
    let mut p = planted_partition(30, 0.05);
    p.x3.pop();
    assert!(!verify_special(&g, &p));
}

#[test]
fn detection_recovers_plant() {
    for seed in 0..5 {
        let g = planted(300, 0, seed);
        let p = detect_special(&g, 0.05, 32, seed).expect("plant detected");
        assert!(verify_special(&g, &p));
        assert_eq!(cross_edges(&g, &p), 0);
    }
}

#[test]
fn detection_finds_nothing_in_dense_random_hosts() {
    for seed in 0..5 {
        let g = random_host(300, 0.5, seed);
        assert!(detect_special(&g, 0.05, 32, seed).is_none());
    }
}

#[test]
fn detection_tolerates_noise_within_half_budget() {
    let m: usize = 3000;
    let gamma: f64 = 0.3;
    let a = m.div_ceil(3);
    let k = (gamma.powi(10) * (a * a) as f64 / 2.0).floor() as usize;
    assert!(k > 0);
    let g = planted(m, k, 11);
    let p = detect_special(&g, gamma, 32, 11).expect("noisy plant detected");
    assert!(verify_special(&g, &p));
}

#[test]
fn refine_leaves_clean_plant_alone() {
    let g = planted(300, 0, 7);
    let p = planted_partition(300, 0.05);
    let r = refine_partition(&g, &p, 0.05).unwrap();
    assert!(r.removed.is_empty());
    assert_eq!((r.x1p.clone(), r.x2p.clone(), r.x3p.clone()), (p.x1.clone(), p.x2.clone(), p.x3.clone()));
    let again = SpecialPartition { x1: r.x1p.clone(), x2: r.x2p.clone(), x3: r.x3p.clone(), gamma: p.gamma };
    let r2 = refine_partition(&g, &again, 0.05).unwrap();
    assert_eq!(r2, r);
}

#[test]
fn refine_removes_exactly_the_sabotaged_vertices() {
    let g = sabotaged();
    assert!(validate_m_good(&g).is_m_good);
    let p = planted_partition(300, 0.5);
    assert!(verify_special(&g, &p));
    let r = refine_partition(&g, &p, 0.05).unwrap();
    assert_eq!(r.removed, vec![0, 1, 2]);
    verify_refined(&g, &p, &r).unwrap();
}

#[test]
fn tiny_gamma0_errors_exactly_when_removal_is_needed() {
    let gamma0 = 1e-7;
    assert!(5.0 * f64::sqrt(gamma0) * 300.0 < 1.0);
    let clean = planted(300, 0, 8);
    assert!(refine_partition(&clean, &planted_partition(300, 0.5), gamma0).unwrap().removed.is_empty());
    let r = refine_partition(&sabotaged(), &planted_partition(300, 0.5), gamma0);
    assert!(matches!(r, Err(RefineError::TooManyRemoved { .. })), "{r:?}");
}

#[test]
fn refine_rejects_non_special_input() {
    let k = HostGraph::complete(301).unwrap();
    assert_eq!(refine_partition(&k, &planted_partition(300, 0.05), 0.05), Err(RefineError::NotSpecial));
}

/// Refined X3' vertices keep most of their degree into both refined sides.
#[test]
fn refined_x3_degrees_checked_independently() {
    let g = sabotaged();
    let p = planted_partition(300, 0.5);
    let r = refine_partition(&g, &p, 0.05).unwrap();
    let [a, b, c] = r.sets(g.n());
    let slack = 3.0 * 0.05f64.sqrt() * 300.0;
    for v in c.iter() {
        for x in [&a, &b] {
            assert!(g.degree_into(v, x) as f64 >= x.len() as f64 - slack);
        }
    }
    let all: VertexSet = VertexSet::from_iter_with_capacity(g.n(), r.removed.iter().copied());
    assert!(all.is_disjoint(&a) && all.is_disjoint(&b) && all.is_disjoint(&c));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn detection_output_always_verifies(m in 30usize..120, keep in 0.0f64..1.0, planted_host: bool, seed: u64) {
        let g = if planted_host { planted(m, 0, seed) } else { random_host(m, keep, seed) };
        for gamma in [0.05, 0.3] {
            if let Some(p) = detect_special(&g, gamma, 8, seed) {
                prop_assert!(verify_special(&g, &p));
                prop_assert_eq!(p.x1.len() + p.x2.len() + p.x3.len(), g.n());
            }
        }
    }
}
