//! Rest-embedding for hosts with three-part extremal structure. Every tree
//! vertex outside the reserved subtree gets a target region `S1`, `S2` or
//! `S3`; tree edges may join `S1`-`S1`, `S2`-`S2` and `S3` to `S1` or `S2`,
//! never `S1`-`S2` or `S3`-`S3`. The three cases differ in how bad
//! 3-vertex paths and quotas are planned.

use rand::seq::IteratorRandom;
use serde::Serialize;

use super::finish::{finish_embedding, DeferredLeaf};
use super::quota::{max_quota, quota_labels, Side};
use super::{EmbedConfig, EmbedError};
use crate::absorb::AbsorptionPlan;
use crate::bitset::VertexSet;
use crate::decompose::{classify_bad, ZCut};
use crate::embedding::Embedding;
use crate::graph::HostGraph;
use crate::rng::Rng;
use crate::special::RefinedPartition;
use crate::tree::RootedTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Region {
    S1,
    S2,
    S3,
    /// Vertices dropped by the refinement.
    Junk,
}

impl Region {
    fn index(self) -> usize {
        match self {
            Region::S1 => 0,
            Region::S2 => 1,
            Region::S3 => 2,
            Region::Junk => 3,
        }
    }

    fn from_index(i: usize) -> Self {
        [Region::S1, Region::S2, Region::S3, Region::Junk][i]
    }

    pub fn compatible(self, other: Region) -> bool {
        use Region::*;
        !matches!((self, other), (S3, S3) | (S1, S2) | (S2, S1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Phase {
    /// Reserved subtree, placed by the absorption plan.
    Reserved,
    /// Cut vertices `Z - t*`.
    Cut,
    /// Bad paths placed in the pattern phase.
    BadPattern,
    Rest,
    /// Placed by the final matching.
    Matched,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Placement {
    pub vertex: usize,
    pub image: usize,
    pub region: Region,
    pub component: Option<usize>,
    pub phase: Phase,
}

/// Free parts of the refined partition once `T* - L`, `Z` and `S` are placed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalState {
    pub s: [VertexSet; 3],
    pub junk: VertexSet,
    pub cut: ZCut,
    pub bad: Vec<usize>,
}

impl ExtremalState {
    pub fn sizes(&self) -> [usize; 3] {
        [self.s[0].len(), self.s[1].len(), self.s[2].len()]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalOutcome {
    pub embedding: Embedding,
    pub case: u8,
    pub log: Vec<Placement>,
    /// Bad components embedded in the pattern phase.
    pub pattern_components: Vec<usize>,
    /// Components whose leaves adjacent to `Z - t*` may go anywhere.
    pub free_leaf_components: Vec<usize>,
    /// State at the start of the rest embedding.
    pub initial: ExtremalState,
    /// Case 3: components of the side embedded next to `S1`.
    pub side1: Vec<usize>,
}

/// Case number from the number of vertices in bad components, compared
/// against `⌊m/2⌋` and `⌊4m/9⌋`.
pub fn case_of(m: usize, bad_vertices: usize) -> u8 {
    if bad_vertices > m / 2 {
        1
    } else if bad_vertices > 4 * m / 9 {
        2
    } else {
        3
    }
}

/// Region for the image of `t*`: `X1'` in case 1, otherwise `X3'` when `t*`
/// is a cut vertex and `X1'` when it is not.
pub fn root_region(refined: &RefinedPartition, cut: &ZCut, case: u8) -> Vec<usize> {
    if case != 1 && cut.z.contains(&cut.tstar) {
        refined.x3p.clone()
    } else {
        refined.x1p.clone()
    }
}

struct Planner<'a> {
    tree: &'a RootedTree,
    cut: &'a ZCut,
    gamma0: f64,
    labels: Vec<Option<Region>>,
    cap: [usize; 4],
    tstar_comp: Option<usize>,
    /// Vertices adjacent to `t*` or to a cut vertex.
    touching: VertexSet,
}

impl<'a> Planner<'a> {
    fn root_of(&self, i: usize) -> usize {
        if Some(i) == self.tstar_comp {
            self.cut.tstar
        } else {
            self.cut.roots[i].expect("every component touches the cut")
        }
    }

    /// Vertices of component `i` still to place.
    fn size(&self, i: usize) -> usize {
        self.cut.components[i].len() - usize::from(Some(i) == self.tstar_comp)
    }

    fn forced(&self, i: usize) -> VertexSet {
        let root = self.root_of(i);
        let mut f = VertexSet::new(self.tree.n());
        for &v in &self.cut.components[i] {
            if v != root && self.touching.contains(v) {
                f.insert(v);
            }
        }
        f
    }

    fn achievable(&self, i: usize) -> usize {
        let comp = &self.cut.components[i];
        let forced = self.forced(i);
        let root = self.root_of(i);
        let mut best = 0;
        for t in (0..=max_quota(comp.len())).rev() {
            if quota_labels(self.tree, comp, root, &forced, t, false).is_ok() {
                best = t;
                break;
            }
        }
        best
    }

    fn assign_quota(&mut self, i: usize, sa: Region, t: usize) -> Result<(), EmbedError> {
        let root = self.root_of(i);
        let include_root = Some(i) != self.tstar_comp;
        let labels = quota_labels(self.tree, &self.cut.components[i], root, &self.forced(i), t, include_root)?;
        for (v, side) in labels {
            self.labels[v] = Some(if side == Side::A { sa } else { Region::S3 });
        }
        Ok(())
    }

    /// Quotas summing to `d` over `comps`, largest caps first.
    fn spread(&self, comps: &[(usize, usize)], mut d: usize) -> Vec<(usize, usize)> {
        let mut order: Vec<(usize, usize)> = comps.to_vec();
        order.sort_by_key(|&(i, c)| (std::cmp::Reverse(c), i));
        order
            .into_iter()
            .map(|(i, c)| {
                let t = c.min(d);
                d -= t;
                (i, t)
            })
            .collect()
    }

    fn counts(&self) -> [usize; 4] {
        let mut c = [0; 4];
        for r in self.labels.iter().flatten() {
            c[r.index()] += 1;
        }
        c
    }

    fn check_capacity(&self) -> Result<(), EmbedError> {
        for (i, (&need, &have)) in self.counts().iter().zip(&self.cap).enumerate() {
            if need > have {
                return Err(EmbedError::CaseInfeasible(format!(
                    "{:?} needs {need} vertices, {have} available",
                    Region::from_index(i)
                )));
            }
        }
        Ok(())
    }

    fn policy_cap(&self, i: usize, bad: &[usize]) -> usize {
        let size = self.size(i);
        let base = if bad.contains(&i) {
            1
        } else if size as f64 >= 1.0 / self.gamma0 {
            size / 2
        } else if size >= 5 {
            2 * size / 5
        } else {
            max_quota(size)
        };
        let base = if self.cut.a_star.contains(&i) { base.saturating_sub(1) } else { base };
        base.min(self.achievable(i))
    }
}

/// Embeds everything outside the reserved subtree following the case given
/// by the number of bad-path vertices, then absorbs `L`.
pub fn embed_extremal_rest(
    g: &HostGraph,
    refined: &RefinedPartition,
    tree: &RootedTree,
    plan: &AbsorptionPlan,
    cut: &ZCut,
    cfg: &EmbedConfig,
    rng: &mut Rng,
) -> Result<ExtremalOutcome, EmbedError> {
    let n = g.n();
    let xs = refined.sets(n);
    let region_of = |v: usize| {
        (0..3).find(|&i| xs[i].contains(v)).map(Region::from_index).unwrap_or(Region::Junk)
    };
    let bad = classify_bad(cut, tree);
    let case = case_of(tree.m(), 3 * bad.len());
    let tstar = cut.tstar;
    let mut phi = plan.phi_star.clone();
    let t_img = phi.get(tstar).ok_or_else(|| EmbedError::Internal("t* unplaced".into()))?;
    let w_region = VertexSet::from_iter_with_capacity(n, root_region(refined, cut, case));
    if !w_region.contains(t_img) {
        return Err(EmbedError::Internal("t* image outside the required region".into()));
    }

    let s_set = plan.s_set(n);
    let z_region = if case == 1 { &xs[0] } else { &xs[2] };
    for &z in &cut.z {
        if z == tstar {
            continue;
        }
        let mut cand = z_region.difference(phi.used());
        cand.difference_with(&s_set);
        if tree.neighbours(z).contains(&tstar) {
            cand.intersect_with(g.neighbours(t_img));
        }
        let c = cand
            .iter()
            .choose(rng)
            .ok_or_else(|| EmbedError::Stuck(format!("no image for cut vertex {z}")))?;
        phi.place(z, c);
    }

    let mut free = phi.used().complement();
    free.difference_with(&s_set);
    let s: [VertexSet; 3] = [0, 1, 2].map(|i| xs[i].intersection(&free));
    let junk = free.difference(&xs[0]).difference(&xs[1]).difference(&xs[2]);

    let mut touching = VertexSet::new(tree.n());
    for &z in cut.z.iter().chain(std::iter::once(&tstar)) {
        for &u in tree.neighbours(z) {
            touching.insert(u);
        }
    }
    let mut planner = Planner {
        tree,
        cut,
        gamma0: cfg.gamma0,
        labels: vec![None; tree.n()],
        cap: [s[0].len(), s[1].len(), s[2].len(), junk.len()],
        tstar_comp: cut.component_of(tstar),
        touching,
    };

    let mut pattern = Vec::new();
    let mut free_leaf = Vec::new();
    let mut side1 = Vec::new();
    match case {
        1 => plan_case1(&mut planner, &bad, &mut pattern)?,
        2 => plan_case2(&mut planner, &bad, &mut pattern)?,
        _ => plan_case3(&mut planner, &bad, &mut free_leaf, &mut side1)?,
    }
    planner.check_capacity()?;

    // every planned tree edge must be realizable between its regions
    for (a, b) in tree.edges() {
        if planner.labels[a].is_none() && planner.labels[b].is_none() {
            continue;
        }
        let at = |v: usize| planner.labels[v].or_else(|| phi.get(v).map(region_of));
        if let (Some(ra), Some(rb)) = (at(a), at(b)) {
            if !ra.compatible(rb) {
                return Err(EmbedError::Internal(format!("planned edge {a}-{b} joins {ra:?} and {rb:?}")));
            }
        }
    }

    let pools = [s[0].clone(), s[1].clone(), s[2].clone(), junk.clone()];
    let mut deferred = Vec::new();
    let comp_order: Vec<usize> = pattern
        .iter()
        .copied()
        .chain((0..cut.components.len()).filter(|i| !pattern.contains(i)))
        .collect();
    let mut keep = VertexSet::new(tree.n());
    for c in &cut.components {
        for &v in c {
            keep.insert(v);
        }
    }
    for &i in &comp_order {
        let root = planner.root_of(i);
        let start: Vec<(usize, usize)> = if Some(i) == planner.tstar_comp {
            super::greedy::bfs_within(tree, &keep, tstar, tstar).into_iter().skip(1).collect()
        } else {
            let anchor = tree
                .neighbours(root)
                .iter()
                .copied()
                .find(|u| cut.z.contains(u))
                .expect("root touches the cut");
            super::greedy::bfs_within(tree, &keep, root, anchor)
        };
        for (v, p) in start {
            let label = planner.labels[v].ok_or_else(|| EmbedError::Internal(format!("vertex {v} unlabelled")))?;
            if tree.is_leaf(v) && !pattern.contains(&i) {
                let mut allowed = pools[label.index()].clone();
                allowed.union_with(&junk);
                let anywhere = free_leaf.contains(&i);
                deferred.push(DeferredLeaf { leaf: v, anchor: p, allowed: (!anywhere).then_some(allowed) });
                continue;
            }
            let mut cand = pools[label.index()].difference(phi.used());
            for &u in tree.neighbours(v) {
                if let Some(img) = phi.get(u) {
                    cand.intersect_with(g.neighbours(img));
                }
            }
            let c = cand
                .iter()
                .choose(rng)
                .ok_or_else(|| EmbedError::Stuck(format!("no {label:?} image for tree vertex {v}")))?;
            phi.place(v, c);
        }
    }

    let embedding = finish_embedding(g, tree, plan, phi, &deferred)?;
    let matched: VertexSet =
        VertexSet::from_iter_with_capacity(tree.n(), deferred.iter().map(|d| d.leaf).chain(plan.l.iter().copied()));
    let log = (0..tree.n())
        .map(|v| {
            let image = embedding.get(v).expect("complete");
            let component = cut.component_of(v);
            let phase = if matched.contains(v) {
                Phase::Matched
            } else if v != tstar && cut.z.contains(&v) {
                Phase::Cut
            } else if component.is_some_and(|c| pattern.contains(&c)) {
                Phase::BadPattern
            } else if plan.phi_star.get(v).is_some() {
                Phase::Reserved
            } else {
                Phase::Rest
            };
            Placement { vertex: v, image, region: region_of(image), component, phase }
        })
        .collect();
    Ok(ExtremalOutcome {
        embedding,
        case,
        log,
        pattern_components: pattern,
        free_leaf_components: free_leaf,
        initial: ExtremalState { s: s.clone(), junk: junk.clone(), cut: cut.clone(), bad: bad.clone() },
        side1,
    })
}

fn bad_in_order(p: &Planner, bad: &[usize]) -> Vec<usize> {
    bad.iter().copied().filter(|i| !p.cut.a_star.contains(i)).collect()
}

/// Each bad path as `(attached end, middle, leaf)`.
fn path_of(p: &Planner, i: usize) -> (usize, usize, usize) {
    let x = p.root_of(i);
    let c = &p.cut.components[i];
    let y = *c.iter().find(|&&v| p.tree.neighbours(x).contains(&v)).expect("path");
    let z = *c.iter().find(|&&v| v != x && v != y).expect("path");
    (x, y, z)
}

fn plan_case1(p: &mut Planner, bad: &[usize], pattern: &mut Vec<usize>) -> Result<(), EmbedError> {
    let b_all = bad_in_order(p, bad);
    let [c1, c2, c3, _] = p.cap;
    let b_max = b_all.len().min(c2).min(c3 / 2);
    let others: Vec<usize> = (0..p.cut.components.len()).filter(|i| !b_all.contains(i)).collect();
    let mut last_err = None;
    for b in (0..=b_max).rev() {
        let mut r2 = c2 - b;
        let mut r3 = c3 - 2 * b;
        // root in S3 with chosen child subtrees wholly in S2
        let mut children: Vec<(usize, usize, Vec<usize>)> = Vec::new();
        for &i in &others {
            if p.cut.a_star.contains(&i) || Some(i) == p.tstar_comp {
                continue;
            }
            let root = p.root_of(i);
            let keep = p.tree.vertex_set(&p.cut.components[i]);
            for &c in p.tree.neighbours(root) {
                if keep.contains(c) {
                    let sub: Vec<usize> =
                        super::greedy::bfs_within(p.tree, &keep.difference(&p.tree.vertex_set(&[root])), c, root)
                            .into_iter()
                            .map(|x| x.0)
                            .collect();
                    children.push((i, c, sub));
                }
            }
        }
        children.sort_by_key(|(i, c, s)| (std::cmp::Reverse(s.len()), *i, *c));
        let mut mode_b: Vec<usize> = Vec::new();
        let mut to_s2: Vec<&Vec<usize>> = Vec::new();
        for (i, _, sub) in &children {
            let new = !mode_b.contains(i);
            if sub.len() <= r2 && (!new || r3 >= 1) {
                r2 -= sub.len();
                if new {
                    r3 -= 1;
                    mode_b.push(*i);
                }
                to_s2.push(sub);
            }
            if r2 == 0 {
                break;
            }
        }
        let s1_from_b: usize = mode_b.iter().map(|&i| p.size(i) - 1).sum::<usize>()
            - to_s2.iter().map(|s| s.len()).sum::<usize>();
        let rest: Vec<usize> = others.iter().copied().filter(|i| !mode_b.contains(i)).chain(b_all[b..].iter().copied()).collect();
        let caps: Vec<(usize, usize)> = rest
            .iter()
            .map(|&i| {
                let cap = if bad.contains(&i) { 1 } else { max_quota(p.size(i) + usize::from(Some(i) == p.tstar_comp)) };
                let cap = if p.cut.a_star.contains(&i) { cap.saturating_sub(1) } else { cap };
                (i, cap.min(p.achievable(i)))
            })
            .collect();
        let m_a: usize = rest.iter().map(|&i| p.size(i)).sum();
        let q: usize = caps.iter().map(|c| c.1).sum();
        let d = (m_a + s1_from_b).saturating_sub(c1);
        if d > q.min(r3) {
            last_err = Some(format!("b = {b}: S3 quota {d} exceeds {}", q.min(r3)));
            continue;
        }
        p.labels.iter_mut().for_each(|l| *l = None);
        for &i in &b_all[..b] {
            let (x, y, z) = path_of(p, i);
            p.labels[x] = Some(Region::S3);
            p.labels[y] = Some(Region::S2);
            p.labels[z] = Some(Region::S3);
        }
        for &i in &mode_b {
            for &v in &p.cut.components[i] {
                p.labels[v] = Some(Region::S1);
            }
            let r = p.root_of(i);
            p.labels[r] = Some(Region::S3);
        }
        for sub in &to_s2 {
            for &v in sub.iter() {
                p.labels[v] = Some(Region::S2);
            }
        }
        for (i, t) in p.spread(&caps, d) {
            p.assign_quota(i, Region::S1, t)?;
        }
        if p.check_capacity().is_err() {
            last_err = Some(format!("b = {b}: capacity"));
            continue;
        }
        pattern.clear();
        pattern.extend_from_slice(&b_all[..b]);
        log::debug!("case 1: {b} pattern paths, {} root-in-S3 components", mode_b.len());
        return Ok(());
    }
    Err(EmbedError::CaseInfeasible(last_err.unwrap_or_else(|| "case 1 has no feasible plan".into())))
}

fn plan_case2(p: &mut Planner, bad: &[usize], pattern: &mut Vec<usize>) -> Result<(), EmbedError> {
    let b_all = bad_in_order(p, bad);
    let [c1, c2, c3, _] = p.cap;
    let p_max = b_all.len().min(c2 / 2);
    let mut last_err = None;
    for k in (0..=p_max).rev() {
        let q = (3 * k).saturating_sub(c2);
        if q > k || q > c3 {
            continue;
        }
        let rest: Vec<usize> = (0..p.cut.components.len()).filter(|i| !b_all[..k].contains(i)).collect();
        let caps: Vec<(usize, usize)> = rest
            .iter()
            .map(|&i| {
                let cap = if bad.contains(&i) {
                    0
                } else {
                    max_quota(p.size(i) + usize::from(Some(i) == p.tstar_comp))
                };
                let cap = if p.cut.a_star.contains(&i) { cap.saturating_sub(1) } else { cap };
                (i, cap.min(p.achievable(i)))
            })
            .collect();
        let m_rest: usize = rest.iter().map(|&i| p.size(i)).sum();
        let qsum: usize = caps.iter().map(|c| c.1).sum();
        let d = m_rest.saturating_sub(c1);
        if d > qsum.min(c3 - q) {
            last_err = Some(format!("{k} pattern paths: S3 quota {d} exceeds {}", qsum.min(c3 - q)));
            continue;
        }
        p.labels.iter_mut().for_each(|l| *l = None);
        for (j, &i) in b_all[..k].iter().enumerate() {
            let (x, y, z) = path_of(p, i);
            p.labels[x] = Some(Region::S2);
            p.labels[y] = Some(if j < q { Region::S3 } else { Region::S2 });
            p.labels[z] = Some(Region::S2);
        }
        for (i, t) in p.spread(&caps, d) {
            p.assign_quota(i, Region::S1, t)?;
        }
        if p.check_capacity().is_err() {
            last_err = Some(format!("{k} pattern paths: capacity"));
            continue;
        }
        pattern.clear();
        pattern.extend_from_slice(&b_all[..k]);
        log::debug!("case 2: {k} pattern paths, {q} middles in S3");
        return Ok(());
    }
    Err(EmbedError::CaseInfeasible(last_err.unwrap_or_else(|| "case 2 has no feasible plan".into())))
}

fn plan_case3(
    p: &mut Planner,
    bad: &[usize],
    free_leaf: &mut Vec<usize>,
    side1_out: &mut Vec<usize>,
) -> Result<(), EmbedError> {
    let [c1, c2, c3, _] = p.cap;
    let swap = p.tstar_comp.is_some_and(|i| p.cut.part2.contains(&i));
    let (side1, side2) = if swap {
        (p.cut.part2.clone(), p.cut.part1.clone())
    } else {
        (p.cut.part1.clone(), p.cut.part2.clone())
    };
    for i in 0..p.cut.components.len() {
        let c = &p.cut.components[i];
        if c.len() == 1 && p.tree.is_leaf(c[0]) && Some(i) != p.tstar_comp {
            let r = c[0];
            if p.tree.neighbours(r).iter().any(|u| p.cut.z.contains(u) && *u != p.cut.tstar) {
                free_leaf.push(i);
            }
        }
    }
    let mut plans = Vec::new();
    for (side, cap_i) in [(&side1, c1), (&side2, c2)] {
        let caps: Vec<(usize, usize)> = side.iter().map(|&i| (i, p.policy_cap(i, bad))).collect();
        let m_i: usize = side.iter().map(|&i| p.size(i)).sum();
        let q: usize = caps.iter().map(|c| c.1).sum();
        let d = m_i.saturating_sub(cap_i);
        if d > q {
            return Err(EmbedError::CaseInfeasible(format!("side needs {d} vertices in S3, quotas allow {q}")));
        }
        plans.push((caps, d));
    }
    if plans[0].1 + plans[1].1 > c3 {
        return Err(EmbedError::CaseInfeasible(format!("S3 demand {} exceeds {c3}", plans[0].1 + plans[1].1)));
    }
    for (k, (caps, d)) in plans.into_iter().enumerate() {
        let sa = if k == 0 { Region::S1 } else { Region::S2 };
        for (i, t) in p.spread(&caps, d) {
            p.assign_quota(i, sa, t)?;
        }
    }
    side1_out.extend_from_slice(&side1);
    Ok(())
}
