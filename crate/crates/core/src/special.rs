//! Detection and refinement of three-part extremal structure: near-equal
//! parts `X1, X2, X3` with almost no `X1`-`X2` edges.

use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bitset::VertexSet;
use crate::graph::{required_degree, HostGraph};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpecialPartition {
    pub x1: Vec<usize>,
    pub x2: Vec<usize>,
    pub x3: Vec<usize>,
    pub gamma: f64,
}

impl SpecialPartition {
    pub fn sets(&self, n: usize) -> [VertexSet; 3] {
        [&self.x1, &self.x2, &self.x3].map(|x| VertexSet::from_iter_with_capacity(n, x.iter().copied()))
    }
}

/// Clause-by-clause outcome of checking a partition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpecialReport {
    pub sizes: [usize; 3],
    pub size_window: (f64, f64),
    pub cross_edges: usize,
    pub cross_budget: f64,
    pub cross_density: f64,
    pub is_partition: bool,
    pub sizes_ok: bool,
    pub sparse_ok: bool,
}

impl SpecialReport {
    pub fn passes(&self) -> bool {
        self.is_partition && self.sizes_ok && self.sparse_ok
    }
}

pub fn special_report(g: &HostGraph, p: &SpecialPartition) -> SpecialReport {
    let n = g.n();
    let mf = g.m() as f64;
    let [s1, s2, s3] = p.sets(n);
    let in_range = p.x1.iter().chain(&p.x2).chain(&p.x3).all(|&v| v < n);
    let is_partition = in_range
        && s1.len() == p.x1.len()
        && s2.len() == p.x2.len()
        && s3.len() == p.x3.len()
        && s1.len() + s2.len() + s3.len() == n
        && s1.is_disjoint(&s2)
        && s1.is_disjoint(&s3)
        && s2.is_disjoint(&s3);
    let lo = mf / 3.0 - 3.0 * p.gamma * mf;
    let hi = mf / 3.0 + 3.0 * p.gamma * mf;
    let sizes = [p.x1.len(), p.x2.len(), p.x3.len()];
    let sizes_ok = sizes.iter().all(|&s| (s as f64) >= lo - 1e-9 && (s as f64) <= hi + 1e-9);
    let cross_edges = if in_range { g.edges_between(&s1, &s2) } else { 0 };
    let pairs = (p.x1.len() * p.x2.len()) as f64;
    let cross_budget = p.gamma.powi(10) * pairs;
    SpecialReport {
        sizes,
        size_window: (lo, hi),
        cross_edges,
        cross_budget,
        cross_density: if pairs > 0.0 { cross_edges as f64 / pairs } else { 0.0 },
        is_partition,
        sizes_ok,
        sparse_ok: (cross_edges as f64) <= cross_budget + 1e-9,
    }
}

pub fn verify_special(g: &HostGraph, p: &SpecialPartition) -> bool {
    special_report(g, p).passes()
}

pub const DEFAULT_RESTARTS: usize = 32;

/// Randomized sparse-cut search. Each restart seeds `X2` with the
/// non-neighbourhood of a random non-universal vertex, alternates
/// reassignment by cross-degree, then repairs sizes and strips high
/// cross-degree vertices into `X3`. Only verified partitions are returned.
pub fn detect_special(g: &HostGraph, gamma: f64, restarts: usize, seed: u64) -> Option<SpecialPartition> {
    (0..restarts.max(1) as u64)
        .into_par_iter()
        .find_map_first(|r| {
            let mut rng = rng::split(seed, r);
            let p = one_restart(g, gamma, &mut rng)?;
            verify_special(g, &p).then_some(p)
        })
}

fn one_restart(g: &HostGraph, gamma: f64, rng: &mut rng::Rng) -> Option<SpecialPartition> {
    let n = g.n();
    let mf = g.m() as f64;
    let candidates: Vec<usize> = (0..n).filter(|&v| g.degree(v) < n - 1).collect();
    let &a = candidates.choose(rng)?;
    let mut x2 = g.neighbours(a).complement();
    x2.remove(a);
    if x2.is_empty() {
        return None;
    }
    let mut x1 = VertexSet::new(n);
    x1.insert(a);
    let eps = 0.25 + 0.1 * rng.gen::<f64>();

    for _ in 0..4 {
        let mut n1 = VertexSet::new(n);
        let mut n2 = VertexSet::new(n);
        for v in 0..n {
            let d1 = g.degree_into(v, &x1);
            let d2 = g.degree_into(v, &x2);
            let low1 = (d1 as f64) <= eps * x1.len() as f64;
            let low2 = (d2 as f64) <= eps * x2.len() as f64;
            match (low1, low2) {
                (false, true) => {
                    n1.insert(v);
                }
                (true, false) => {
                    n2.insert(v);
                }
                _ => {}
            }
        }
        if n1 == x1 && n2 == x2 {
            break;
        }
        if n1.is_empty() || n2.is_empty() {
            return None;
        }
        x1 = n1;
        x2 = n2;
    }
    let mut x3 = x1.complement();
    x3.difference_with(&x2);

    let lo = crate::decompose::ceil_real(mf / 3.0 - 3.0 * gamma * mf);
    let hi = crate::decompose::floor_real(mf / 3.0 + 3.0 * gamma * mf);
    if lo > hi {
        return None;
    }
    let cross = |v: usize, other: &VertexSet| g.degree_into(v, other);

    // shrink oversized sides into X3
    for side in 0..2 {
        loop {
            let (s, o) = if side == 0 { (&x1, &x2) } else { (&x2, &x1) };
            if s.len() <= hi {
                break;
            }
            let v = s.iter().max_by_key(|&v| (cross(v, o), std::cmp::Reverse(v)))?;
            if side == 0 {
                x1.remove(v);
            } else {
                x2.remove(v);
            }
            x3.insert(v);
        }
    }
    // pull from X3 into undersized sides
    for side in 0..2 {
        loop {
            let (s, o) = if side == 0 { (&x1, &x2) } else { (&x2, &x1) };
            if s.len() >= lo {
                break;
            }
            let v = x3.iter().min_by_key(|&v| (cross(v, o), v))?;
            x3.remove(v);
            if side == 0 {
                x1.insert(v);
            } else {
                x2.insert(v);
            }
        }
    }
    // X3 too large: move its sparsest vertices into the sides
    while x3.len() > hi {
        let (v, side) = x3
            .iter()
            .flat_map(|v| [(v, 0usize, cross(v, &x2)), (v, 1, cross(v, &x1))])
            .filter(|&(_, side, _)| if side == 0 { x1.len() < hi } else { x2.len() < hi })
            .min_by_key(|&(v, side, c)| (c, v, side))
            .map(|(v, s, _)| (v, s))?;
        x3.remove(v);
        if side == 0 {
            x1.insert(v);
        } else {
            x2.insert(v);
        }
    }
    // strip cross edges within the budget of the window
    loop {
        let budget = gamma.powi(10) * (x1.len() * x2.len()) as f64;
        if (g.edges_between(&x1, &x2) as f64) <= budget || x3.len() >= hi {
            break;
        }
        let best = x1
            .iter()
            .map(|v| (cross(v, &x2), 0, v))
            .chain(x2.iter().map(|v| (cross(v, &x1), 1, v)))
            .filter(|&(_, side, _)| if side == 0 { x1.len() > lo } else { x2.len() > lo })
            .max_by_key(|&(c, side, v)| (c, std::cmp::Reverse(v), side))?;
        let (_, side, v) = best;
        if side == 0 {
            x1.remove(v);
        } else {
            x2.remove(v);
        }
        x3.insert(v);
    }
    Some(SpecialPartition { x1: x1.to_vec(), x2: x2.to_vec(), x3: x3.to_vec(), gamma })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinedPartition {
    pub x1p: Vec<usize>,
    pub x2p: Vec<usize>,
    pub x3p: Vec<usize>,
    pub removed: Vec<usize>,
    pub gamma0: f64,
}

impl RefinedPartition {
    pub fn sets(&self, n: usize) -> [VertexSet; 3] {
        [&self.x1p, &self.x2p, &self.x3p].map(|x| VertexSet::from_iter_with_capacity(n, x.iter().copied()))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RefineError {
    #[error("input partition is not special")]
    NotSpecial,
    #[error("part {part} lost {lost} vertices, bound is {bound:.2}")]
    TooManyRemoved { part: usize, lost: usize, bound: f64 },
    #[error("refined partition violates {0}")]
    Invariant(String),
}

/// Per-vertex shortfall against the refinement thresholds; positive means remove.
/// The first test is against the original parts, the others against the
/// current ones. A vertex's own part is counted without the vertex itself.
fn deficits(g: &HostGraph, orig: &[VertexSet; 3], cur: &[VertexSet; 3], gamma0: f64) -> Vec<(usize, f64)> {
    let mf = g.m() as f64;
    let s = gamma0.sqrt();
    let base = required_degree(g.m()) as f64;
    let mut out = Vec::new();
    for i in 0..2 {
        let mut own_plus_x3 = orig[i].clone();
        own_plus_x3.union_with(&orig[2]);
        let thr = base - gamma0.powi(5) * orig[1 - i].len() as f64;
        for v in cur[i].iter() {
            let mut d = thr - g.degree_into(v, &own_plus_x3) as f64;
            for (x, own) in [(&cur[i], 1.0), (&cur[2], 0.0)] {
                let need = x.len() as f64 - own - 6.0 * s * mf;
                d = d.max(need - g.degree_into(v, x) as f64);
            }
            if d > 1e-9 {
                out.push((v, d));
            }
        }
    }
    for v in cur[2].iter() {
        let mut d = f64::NEG_INFINITY;
        for x in &cur[..2] {
            let len = x.len() as f64;
            let need = ((1.0 - 6.0 * s) * len).max(len - 3.0 * s * mf);
            d = d.max(need - g.degree_into(v, x) as f64);
        }
        if d > 1e-9 {
            out.push((v, d));
        }
    }
    out
}

/// Removes low-degree vertices worst-first until every degree condition
/// holds, then checks the size bound `|X_i'| >= |X_i| - 5 sqrt(gamma0) m`.
pub fn refine_partition(g: &HostGraph, p: &SpecialPartition, gamma0: f64) -> Result<RefinedPartition, RefineError> {
    if !verify_special(g, p) {
        return Err(RefineError::NotSpecial);
    }
    let n = g.n();
    let orig = p.sets(n);
    let mut cur = orig.clone();
    let mut removed = Vec::new();
    loop {
        let d = deficits(g, &orig, &cur, gamma0);
        let Some(&(v, _)) = d.iter().max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0))) else { break };
        for c in cur.iter_mut() {
            c.remove(v);
        }
        removed.push(v);
    }
    removed.sort_unstable();
    let bound = 5.0 * gamma0.sqrt() * g.m() as f64;
    for i in 0..3 {
        let lost = orig[i].len() - cur[i].len();
        if lost as f64 > bound + 1e-9 {
            return Err(RefineError::TooManyRemoved { part: i + 1, lost, bound });
        }
    }
    let r = RefinedPartition {
        x1p: cur[0].to_vec(),
        x2p: cur[1].to_vec(),
        x3p: cur[2].to_vec(),
        removed,
        gamma0,
    };
    verify_refined(g, p, &r).map_err(RefineError::Invariant)?;
    Ok(r)
}

/// Checks the three output invariants of the refinement.
pub fn verify_refined(g: &HostGraph, p: &SpecialPartition, r: &RefinedPartition) -> Result<(), String> {
    let n = g.n();
    let mf = g.m() as f64;
    let s = r.gamma0.sqrt();
    let orig = p.sets(n);
    let cur = r.sets(n);
    for i in 0..3 {
        if !cur[i].is_subset(&orig[i]) {
            return Err(format!("X{}' is not a subset of X{}", i + 1, i + 1));
        }
        if (cur[i].len() as f64) < orig[i].len() as f64 - 5.0 * s * mf - 1e-9 {
            return Err(format!("size bound for X{}'", i + 1));
        }
    }
    for v in cur[2].iter() {
        for x in &cur[..2] {
            if (g.degree_into(v, x) as f64) < x.len() as f64 - 3.0 * s * mf - 1e-9 {
                return Err(format!("X3' degree bound at vertex {v}"));
            }
        }
    }
    for i in 0..2 {
        for v in cur[i].iter() {
            for (x, own) in [(&cur[i], 1.0), (&cur[2], 0.0)] {
                if (g.degree_into(v, x) as f64) < x.len() as f64 - own - 6.0 * s * mf - 1e-9 {
                    return Err(format!("X{}' degree bound at vertex {v}", i + 1));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planted(m: usize) -> (HostGraph, SpecialPartition) {
        let a = m / 3;
        let n = m + 1;
        let x1: Vec<usize> = (0..a).collect();
        let x2: Vec<usize> = (a..2 * a).collect();
        let x3: Vec<usize> = (2 * a..n).collect();
        let mut g = HostGraph::complete(n).unwrap();
        for &u in &x1 {
            for &v in &x2 {
                g.remove_edge(u, v);
            }
        }
        (g, SpecialPartition { x1, x2, x3, gamma: 0.05 })
    }

    #[test]
    fn planted_passes_complete_fails() {
        let (g, p) = planted(300);
        assert!(verify_special(&g, &p));
        let k = HostGraph::complete(301).unwrap();
        assert!(!verify_special(&k, &p));
        let swapped = SpecialPartition { x1: p.x3.clone(), x3: p.x1.clone(), ..p.clone() };
        assert!(!verify_special(&g, &swapped));
    }

    #[test]
    fn detection_on_plant() {
        let (g, _) = planted(300);
        let p = detect_special(&g, 0.05, 8, 3).expect("plant detected");
        assert!(verify_special(&g, &p));
        let [a, b, _] = p.sets(g.n());
        assert_eq!(g.edges_between(&a, &b), 0);
        assert!(detect_special(&HostGraph::complete(301).unwrap(), 0.05, 8, 3).is_none());
    }

    #[test]
    fn refine_clean_plant_is_identity_and_idempotent() {
        let (g, p) = planted(300);
        let r = refine_partition(&g, &p, 0.05).unwrap();
        assert!(r.removed.is_empty());
        assert_eq!((r.x1p.clone(), r.x2p.clone(), r.x3p.clone()), (p.x1.clone(), p.x2.clone(), p.x3.clone()));
        let again = SpecialPartition { x1: r.x1p.clone(), x2: r.x2p.clone(), x3: r.x3p.clone(), gamma: p.gamma };
        let r2 = refine_partition(&g, &again, 0.05).unwrap();
        assert_eq!(r2, r);
    }

    #[test]
    fn rejects_non_special_input() {
        let (_, p) = planted(300);
        let k = HostGraph::complete(301).unwrap();
        assert_eq!(refine_partition(&k, &p, 0.05), Err(RefineError::NotSpecial));
    }
}
