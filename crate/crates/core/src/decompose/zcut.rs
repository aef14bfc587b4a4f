use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use super::{centroid, ceil_real, floor_real, DecomposeError, NiceSubtree};
use crate::bitset::VertexSet;
use crate::tree::RootedTree;

/// Up to three cut vertices outside the nice subtree and a balanced split of
/// the remaining components.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZCut {
    pub z: Vec<usize>,
    /// Components of `T - (T* - t*) - Z`, each sorted.
    pub components: Vec<Vec<usize>>,
    pub part1: Vec<usize>,
    pub part2: Vec<usize>,
    /// Components containing the subtree root or touching more than one cut vertex.
    pub a_star: Vec<usize>,
    /// Per component, its lowest-index vertex adjacent to `Z`.
    pub roots: Vec<Option<usize>>,
    pub tstar: usize,
}

impl ZCut {
    pub fn side_size(&self, side: &[usize]) -> usize {
        side.iter().map(|&i| self.components[i].len()).sum()
    }

    pub fn total(&self) -> usize {
        self.components.iter().map(Vec::len).sum()
    }

    pub fn in_part1(&self, comp: usize) -> bool {
        self.part1.contains(&comp)
    }

    /// Index of the component containing tree vertex `v`, if any.
    pub fn component_of(&self, v: usize) -> Option<usize> {
        self.components.iter().position(|c| c.binary_search(&v).is_ok())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZCutViolation {
    #[error("|Z| = {0} > 3")]
    TooManyCutVertices(usize),
    #[error("Z is not independent")]
    NotIndependent,
    #[error("Z meets the nice subtree")]
    MeetsSubtree,
    #[error("components do not match T - (T* - t*) - Z")]
    ComponentsMismatch,
    #[error("A1/A2 is not a partition of the components")]
    NotAPartition,
    #[error("{0} components touch Z in more than one vertex")]
    MultiAttached(usize),
    #[error("side {side} has {size} vertices, outside [{lo}, {hi}]")]
    SideSize { side: usize, size: usize, lo: f64, hi: f64 },
    #[error("side {0} is heavy but holds a small component")]
    SmallInHeavySide(usize),
    #[error("|A*| = {0} > 2")]
    TooManySpecial(usize),
}

struct SubsetSums {
    reach: Vec<bool>,
    via: Vec<usize>,
    groups: BTreeMap<usize, Vec<usize>>,
}

impl SubsetSums {
    fn new(sizes: &[usize]) -> Self {
        let total: usize = sizes.iter().sum();
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &s) in sizes.iter().enumerate() {
            groups.entry(s).or_default().push(i);
        }
        let mut reach = vec![false; total + 1];
        let mut via = vec![0; total + 1];
        reach[0] = true;
        let mut used = vec![0usize; total + 1];
        for (&w, idx) in &groups {
            if w == 0 {
                continue;
            }
            used.iter_mut().for_each(|u| *u = 0);
            for s in w..=total {
                if !reach[s] && reach[s - w] && used[s - w] < idx.len() {
                    reach[s] = true;
                    via[s] = w;
                    used[s] = used[s - w] + 1;
                }
            }
        }
        Self { reach, via, groups }
    }

    fn smallest_in(&self, lo: usize, hi: usize) -> Option<usize> {
        (lo..=hi.min(self.reach.len() - 1)).find(|&s| self.reach[s])
    }

    fn items(&self, mut s: usize) -> Vec<usize> {
        let mut pools = self.groups.clone();
        let mut out = Vec::new();
        while s > 0 {
            let w = self.via[s];
            out.push(pools.get_mut(&w).and_then(Vec::pop).expect("consistent table"));
            s -= w;
        }
        out.sort_unstable();
        out
    }
}

struct Bounds {
    lo: usize,
    hi: usize,
    lo_real: f64,
    hi_real: f64,
}

fn bounds(m: usize, gamma1: f64) -> Bounds {
    let mf = m as f64;
    let lo_real = mf / 3.0 + gamma1 * mf;
    let hi_real = 2.0 * mf / 3.0 - gamma1 * mf;
    Bounds { lo: ceil_real(lo_real), hi: floor_real(hi_real), lo_real, hi_real }
}

fn rest_set(tree: &RootedTree, sub: &NiceSubtree) -> VertexSet {
    let mut keep = VertexSet::full(tree.n());
    for &v in &sub.vertices {
        if v != sub.root {
            keep.remove(v);
        }
    }
    keep
}

/// Builds the cut following the centroid argument: one centroid when a
/// balanced grouping of its components exists, otherwise centroids of the
/// three heavy components.
pub fn z_cut(
    tree: &RootedTree,
    sub: &NiceSubtree,
    gamma0: f64,
    gamma1: f64,
) -> Result<ZCut, DecomposeError> {
    let m = tree.m();
    let b = bounds(m, gamma1);
    let rest = rest_set(tree, sub);
    let rest_vec = rest.to_vec();
    let z = centroid(tree, &rest_vec)?;

    let mut keep = rest.clone();
    keep.remove(z);
    let comps_z = tree.components(&keep);
    let sizes: Vec<usize> = comps_z.iter().map(Vec::len).collect();
    let total: usize = sizes.iter().sum();
    let sums = SubsetSums::new(&sizes);
    let half = total.div_ceil(2);

    let balanced = {
        let lo = half.max(b.lo);
        let hi = b.hi.min(total.saturating_sub(b.lo));
        sums.smallest_in(lo, hi).or_else(|| sums.smallest_in(half, b.hi))
    };

    let (zs, components, part1) = if let Some(s) = balanced {
        let part1 = sums.items(s);
        (vec![z], comps_z, part1)
    } else {
        let mf = m as f64;
        let heavy_lo = mf / 3.0 - 2.0 * gamma1 * mf;
        let heavy_hi = mf / 3.0 + gamma1 * mf;
        let mut heavy: Vec<usize> = (0..comps_z.len())
            .filter(|&i| (sizes[i] as f64) >= heavy_lo - 1e-9 && (sizes[i] as f64) <= heavy_hi + 1e-9)
            .collect();
        heavy.sort_by_key(|&i| (std::cmp::Reverse(sizes[i]), i));
        if heavy.len() < 3 {
            return Err(DecomposeError::NoCut(format!(
                "no balanced grouping around the centroid and only {} heavy components",
                heavy.len()
            )));
        }
        let cents: Vec<usize> = heavy[..3]
            .iter()
            .map(|&i| centroid(tree, &comps_z[i]))
            .collect::<Result<_, _>>()?;
        let zs = match cents.iter().find(|&&c| !tree.neighbours(c).contains(&z)) {
            Some(&c) => vec![z, c],
            None => cents,
        };
        let mut keep = rest.clone();
        for &v in &zs {
            keep.remove(v);
        }
        let comps = tree.components(&keep);
        let sizes: Vec<usize> = comps.iter().map(Vec::len).collect();
        let total: usize = sizes.iter().sum();
        let sums = SubsetSums::new(&sizes);
        let lo = total.div_ceil(2).max(b.lo);
        let hi = b.hi.min(total.saturating_sub(b.lo));
        let s = sums
            .smallest_in(lo, hi)
            .or_else(|| sums.smallest_in(b.lo, hi))
            .ok_or_else(|| DecomposeError::NoCut("no balanced grouping after splitting heavy components".into()))?;
        let part1 = sums.items(s);
        (zs, comps, part1)
    };

    let mut zs = zs;
    zs.sort_unstable();
    let part2: Vec<usize> = (0..components.len()).filter(|i| !part1.contains(i)).collect();
    let mut cut = ZCut {
        z: zs,
        components,
        part1,
        part2,
        a_star: Vec::new(),
        roots: Vec::new(),
        tstar: sub.root,
    };
    shift_small(&mut cut, gamma0, &b);
    annotate(tree, &mut cut);
    verify_zcut(tree, sub, &cut, gamma0, gamma1).map_err(|v| DecomposeError::NoCut(v.to_string()))?;
    Ok(cut)
}

/// Moves small components out of the heavier side while that helps (iii)
/// without breaking the size window.
fn shift_small(cut: &mut ZCut, gamma0: f64, b: &Bounds) {
    let small = 1.0 / gamma0;
    let total = cut.total() as f64;
    loop {
        let s1 = cut.side_size(&cut.part1);
        let s2 = cut.side_size(&cut.part2);
        let heavy_is_1 = s1 >= s2;
        let (sh, sl) = if heavy_is_1 { (s1, s2) } else { (s2, s1) };
        if (sh as f64) < total / 2.0 + small {
            break;
        }
        let heavy = if heavy_is_1 { &cut.part1 } else { &cut.part2 };
        let pick = heavy
            .iter()
            .copied()
            .filter(|&i| (cut.components[i].len() as f64) < small)
            .min_by_key(|&i| (cut.components[i].len(), i));
        let Some(i) = pick else { break };
        let w = cut.components[i].len();
        let (nh, nl) = (sh - w, sl + w);
        let ok = |s: usize| s >= b.lo && s <= b.hi;
        if !ok(nh) || !ok(nl) || nh.abs_diff(nl) >= sh - sl {
            break;
        }
        if heavy_is_1 {
            cut.part1.retain(|&j| j != i);
            cut.part2.push(i);
            cut.part2.sort_unstable();
        } else {
            cut.part2.retain(|&j| j != i);
            cut.part1.push(i);
            cut.part1.sort_unstable();
        }
    }
}

fn annotate(tree: &RootedTree, cut: &mut ZCut) {
    cut.roots = cut
        .components
        .iter()
        .map(|c| c.iter().copied().find(|&v| tree.neighbours(v).iter().any(|u| cut.z.contains(u))))
        .collect();
    cut.a_star = (0..cut.components.len())
        .filter(|&i| {
            let c = &cut.components[i];
            let touching = cut
                .z
                .iter()
                .filter(|&&zv| c.iter().any(|&v| tree.neighbours(v).contains(&zv)))
                .count();
            c.binary_search(&cut.tstar).is_ok() || touching > 1
        })
        .collect();
}

/// Checks the cut against all of its stated invariants.
pub fn verify_zcut(
    tree: &RootedTree,
    sub: &NiceSubtree,
    cut: &ZCut,
    gamma0: f64,
    gamma1: f64,
) -> Result<(), ZCutViolation> {
    let m = tree.m();
    let b = bounds(m, gamma1);
    if cut.z.len() > 3 {
        return Err(ZCutViolation::TooManyCutVertices(cut.z.len()));
    }
    for (i, &a) in cut.z.iter().enumerate() {
        if sub.contains(a) && a != sub.root {
            return Err(ZCutViolation::MeetsSubtree);
        }
        if cut.z[i + 1..].iter().any(|&c| tree.neighbours(a).contains(&c)) {
            return Err(ZCutViolation::NotIndependent);
        }
    }
    let mut keep = rest_set(tree, sub);
    for &v in &cut.z {
        keep.remove(v);
    }
    let mut expect = tree.components(&keep);
    let mut got = cut.components.clone();
    expect.sort();
    got.sort();
    if expect != got {
        return Err(ZCutViolation::ComponentsMismatch);
    }
    let mut sides = vec![0u8; cut.components.len()];
    for &i in &cut.part1 {
        if i >= sides.len() || sides[i] != 0 {
            return Err(ZCutViolation::NotAPartition);
        }
        sides[i] = 1;
    }
    for &i in &cut.part2 {
        if i >= sides.len() || sides[i] != 0 {
            return Err(ZCutViolation::NotAPartition);
        }
        sides[i] = 2;
    }
    if sides.contains(&0) {
        return Err(ZCutViolation::NotAPartition);
    }

    let attach = |c: &[usize]| {
        c.iter().filter(|&&v| tree.neighbours(v).iter().any(|u| cut.z.contains(u))).count()
    };
    let multi = cut.components.iter().filter(|c| attach(c) != 1).count();
    if multi > 1 {
        return Err(ZCutViolation::MultiAttached(multi));
    }

    let total = cut.total() as f64;
    let small = 1.0 / gamma0;
    for (side, idx) in [(1, &cut.part1), (2, &cut.part2)] {
        let size = cut.side_size(idx);
        let sf = size as f64;
        if sf < b.lo_real - 1e-9 || sf > b.hi_real + 1e-9 {
            return Err(ZCutViolation::SideSize { side, size, lo: b.lo_real, hi: b.hi_real });
        }
        if sf >= total / 2.0 + small && idx.iter().any(|&i| (cut.components[i].len() as f64) < small) {
            return Err(ZCutViolation::SmallInHeavySide(side));
        }
    }

    let special = cut
        .components
        .iter()
        .filter(|c| {
            let touching = cut
                .z
                .iter()
                .filter(|&&zv| c.iter().any(|&v| tree.neighbours(v).contains(&zv)))
                .count();
            c.contains(&sub.root) || touching > 1
        })
        .count();
    if special > 2 {
        return Err(ZCutViolation::TooManySpecial(special));
    }
    Ok(())
}

/// Components outside `A*` that are 3-vertex paths whose middle vertex has
/// degree 2 in the whole tree.
pub fn classify_bad(cut: &ZCut, tree: &RootedTree) -> Vec<usize> {
    (0..cut.components.len())
        .filter(|i| !cut.a_star.contains(i))
        .filter(|&i| {
            let c = &cut.components[i];
            if c.len() != 3 {
                return false;
            }
            let inner = |v: usize| tree.neighbours(v).iter().filter(|u| c.contains(u)).count();
            c.iter().any(|&v| inner(v) == 2 && tree.degree(v) == 2)
        })
        .collect()
}
