use spanembed::bitset::VertexSet;
use spanembed::decompose::{select_l, try_nice_subtree, NiceSubtree, ZCut};
use spanembed::RootedTree;

pub fn prepared(t: &RootedTree, gamma: f64) -> NiceSubtree {
    let sub = try_nice_subtree(t, gamma).unwrap();
    let l = select_l(&sub, t.neighbours(sub.root)).unwrap_or_default();
    sub.with_selected(l)
}

/// All stated cut invariants, recomputed without the library's verifier.
pub fn audit_cut(t: &RootedTree, sub: &NiceSubtree, cut: &ZCut, gamma0: f64, gamma1: f64) -> Result<(), String> {
    let m = t.m() as f64;
    let n = t.n();
    if cut.z.len() > 3 {
        return Err("too many cut vertices".into());
    }
    for (i, &a) in cut.z.iter().enumerate() {
        if a != sub.root && sub.vertices.contains(&a) {
            return Err("cut meets T* - t*".into());
        }
        for &b in &cut.z[i + 1..] {
            if t.neighbours(a).contains(&b) {
                return Err("cut not independent".into());
            }
        }
    }
    let mut keep = vec![true; n];
    for &v in &sub.vertices {
        keep[v] = v == sub.root;
    }
    for &z in &cut.z {
        keep[z] = false;
    }
    let mut expected = super::component_sizes(t, &keep);
    let mut got: Vec<usize> = cut.components.iter().map(Vec::len).collect();
    expected.sort_unstable();
    got.sort_unstable();
    if expected != got {
        return Err(format!("component sizes {got:?} != {expected:?}"));
    }
    let zset = VertexSet::from_iter_with_capacity(n, cut.z.iter().copied());
    let multi = cut
        .components
        .iter()
        .filter(|c| c.iter().filter(|&&v| t.neighbours(v).iter().any(|&u| zset.contains(u))).count() != 1)
        .count();
    if multi > 1 {
        return Err(format!("{multi} components without a unique Z-neighbour"));
    }
    let mut parts: Vec<usize> = cut.part1.iter().chain(&cut.part2).copied().collect();
    parts.sort_unstable();
    if parts != (0..cut.components.len()).collect::<Vec<_>>() {
        return Err("parts do not partition A".into());
    }
    let total: usize = got.iter().sum();
    for side in [&cut.part1, &cut.part2] {
        let size: usize = side.iter().map(|&i| cut.components[i].len()).sum();
        let (lo, hi) = (m / 3.0 + gamma1 * m, 2.0 * m / 3.0 - gamma1 * m);
        if (size as f64) < lo - 1e-9 || size as f64 > hi + 1e-9 {
            return Err(format!("side size {size} outside [{lo}, {hi}]"));
        }
        if size as f64 >= total as f64 / 2.0 + 1.0 / gamma0 - 1e-9
            && side.iter().any(|&i| (cut.components[i].len() as f64) < 1.0 / gamma0 - 1e-9)
        {
            return Err("large side holds a small component".into());
        }
    }
    let a_star = cut
        .components
        .iter()
        .filter(|c| {
            c.contains(&sub.root) || cut.z.iter().filter(|&&z| c.iter().any(|&v| t.neighbours(v).contains(&z))).count() > 1
        })
        .count();
    if a_star > 2 || a_star != cut.a_star.len() {
        return Err(format!("A* has {a_star} components, cut lists {}", cut.a_star.len()));
    }
    Ok(())
}

