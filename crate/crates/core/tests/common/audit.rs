//! Independent audits of extremal-branch outcomes against the refined
//! partition, shared by the embedder tests and the acceptance run.

use spanembed::absorb::AbsorptionPlan;
use spanembed::embed::{extremal_attempt, prepare_extremal, ExtremalOutcome, ExtremalSetup, Phase};
use spanembed::rng;
use spanembed::special::{detect_special, refine_partition};
use spanembed::{is_full_embedding, EmbedConfig, HostGraph, RootedTree, VertexSet};

/// Centre 0 with `legs` pendant 3-vertex paths, then cherries (a vertex with
/// two leaves) attached to the centre, then single leaves.
pub fn legs_tree(m: usize, legs: usize) -> RootedTree {
    let mut e = Vec::new();
    let mut next = 1;
    for _ in 0..legs {
        e.extend([(0, next), (next, next + 1), (next + 1, next + 2)]);
        next += 3;
    }
    while next + 3 <= m + 1 {
        e.extend([(0, next), (next, next + 1), (next, next + 2)]);
        next += 3;
    }
    while next <= m {
        e.push((0, next));
        next += 1;
    }
    RootedTree::from_edges(m + 1, &e, 0).unwrap()
}

pub struct ExtremalRun {
    pub setup: ExtremalSetup,
    pub outcome: ExtremalOutcome,
    pub plan: AbsorptionPlan,
    pub attempts: usize,
}

/// Runs detection, refinement and extremal attempts with the same seed
/// streams as the pipeline, stopping at the first success.
pub fn extremal_run(g: &HostGraph, tree: &RootedTree, cfg: &EmbedConfig) -> Result<ExtremalRun, String> {
    let p = detect_special(g, cfg.gamma0, cfg.detect_restarts, rng::derive(cfg.seed, 0xD7)).ok_or("no special partition")?;
    let refined = refine_partition(g, &p, cfg.gamma0).map_err(|e| e.to_string())?;
    let setup = prepare_extremal(tree, refined, cfg).map_err(|e| e.to_string())?;
    let mut last = String::new();
    for k in 0..cfg.retry_budget {
        let mut r = rng::split(cfg.seed, 0x1000 + k as u64);
        match extremal_attempt(g, tree, &setup, cfg, &mut r) {
            Ok((outcome, plan)) => return Ok(ExtremalRun { setup, outcome, plan, attempts: k + 1 }),
            Err(e) => last = e.to_string(),
        }
    }
    Err(format!("retry budget exhausted: {last}"))
}

/// Checks the outcome of an extremal run. Regions are recomputed from the
/// refined partition, not taken from the log.
pub fn audit(g: &HostGraph, tree: &RootedTree, run: &ExtremalRun, cfg: &EmbedConfig) -> Result<(), String> {
    let n = g.n();
    let m = tree.m() as f64;
    let out = &run.outcome;
    let cut = &run.setup.cut;
    let [x1, x2, x3] = run.setup.refined.sets(n);
    let phi = &out.embedding;
    if !is_full_embedding(g, tree, phi) {
        return Err("embedding fails verification".into());
    }
    if out.case != run.setup.case {
        return Err(format!("case {} differs from planned {}", out.case, run.setup.case));
    }
    let img = |v: usize| phi.get(v).expect("spanning");

    for (i, s) in out.initial.s.iter().enumerate() {
        let lo = m / 3.0 - 1.1 * cfg.gamma1 * m;
        let hi = m / 3.0 + 3.0 * cfg.gamma0 * m;
        if (s.len() as f64) < lo - 1e-9 || (s.len() as f64) > hi + 1e-9 {
            return Err(format!("|S{}| = {} outside [{lo:.1}, {hi:.1}]", i + 1, s.len()));
        }
    }

    // only vertices placed by the rest embedding are bound by regions
    let phase: Vec<Phase> = {
        let mut v = vec![Phase::Rest; n];
        for p in &out.log {
            v[p.vertex] = p.phase;
        }
        v
    };
    let in_l = tree.vertex_set(&run.plan.l);
    let constrained = |v: usize| matches!(phase[v], Phase::Rest | Phase::BadPattern) || (phase[v] == Phase::Matched && !in_l.contains(v));
    for (a, b) in tree.edges() {
        if constrained(a) && constrained(b) && x3.contains(img(a)) && x3.contains(img(b)) {
            return Err(format!("tree edge {a}-{b} has both ends in X3'"));
        }
    }

    let middle = |c: &[usize]| -> usize {
        let keep = tree.vertex_set(c);
        *c.iter().find(|&&v| tree.neighbours(v).iter().filter(|u| keep.contains(**u)).count() == 2).expect("3-path")
    };
    match out.case {
        1 => {
            if out.pattern_components.is_empty() {
                return Err("case 1 used no bad paths".into());
            }
            let mut covered = VertexSet::new(n);
            for &i in &out.pattern_components {
                let c = &cut.components[i];
                let y = middle(c);
                for &v in c {
                    let want = if v == y { &x2 } else { &x3 };
                    if !want.contains(img(v)) {
                        return Err(format!("bad path {i} breaks the S3-S2-S3 pattern at {v}"));
                    }
                    covered.insert(img(v));
                }
            }
            let residual = out.initial.s[1].difference(&covered).len() as f64;
            let bound = 3.0 * cfg.gamma0 * m + 3.0 * cfg.gamma0.sqrt() * m;
            if residual > bound {
                return Err(format!("S2 residual {residual} above {bound:.1}"));
            }
        }
        2 => {
            for &i in &out.pattern_components {
                let c = &cut.components[i];
                let y = middle(c);
                for &v in c {
                    let ok = if v == y { x2.contains(img(v)) || x3.contains(img(v)) } else { x2.contains(img(v)) };
                    if !ok {
                        return Err(format!("bad path {i} endpoint outside S2"));
                    }
                }
            }
        }
        _ => {
            if cut.a_star.len() > 2 {
                return Err(format!("{} exceptional components", cut.a_star.len()));
            }
            let side1: Vec<usize> = out.side1.clone();
            for i in 0..cut.components.len() {
                if cut.a_star.contains(&i) || out.free_leaf_components.contains(&i) {
                    continue;
                }
                let avoid = if side1.contains(&i) { &x2 } else { &x1 };
                for &v in &cut.components[i] {
                    if constrained(v) && avoid.contains(img(v)) {
                        return Err(format!("component {i} vertex {v} on the wrong side"));
                    }
                }
            }
        }
    }
    Ok(())
}
