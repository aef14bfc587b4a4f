use std::io::Write;
use std::time::Instant;

use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;
use spanembed::embed::Branch;
use spanembed::io::{emit_graph, emit_tree};
use spanembed::oracle::{enumerate_free_trees, generate, planted_partition, InstanceProfile, ProfileKind};
use spanembed::{backtrack_embed, embed_tree, rng, EmbedConfig, HostGraph, OracleResult, RootedTree};

use crate::config::{budget, FileConfig};
use crate::record::{instance_id, Outcome};
use crate::{CliError, ProfileArg, SweepArgs, EXIT_NOT_FOUND, EXIT_OK, EXIT_TIMEOUT};

/// One line of sweep output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub m: usize,
    pub profile: &'static str,
    pub host: usize,
    pub tree: usize,
    pub instance_id: String,
    /// Exact search result.
    pub outcome: Outcome,
    /// Full pipeline result on the same instance.
    pub pipeline: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pipeline_branch: Option<Branch>,
    pub agree: bool,
    /// Full instance text, present only when the exact search proves non-containment.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<[String; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

struct Host {
    m: usize,
    profile: &'static str,
    index: usize,
    graph: HostGraph,
}

fn profiles(p: ProfileArg) -> Vec<ProfileArg> {
    match p {
        ProfileArg::All => vec![ProfileArg::Complete, ProfileArg::Random, ProfileArg::Planted, ProfileArg::Adversarial],
        p => vec![p],
    }
}

fn name(p: ProfileArg) -> &'static str {
    match p {
        ProfileArg::Complete => "complete",
        ProfileArg::Random => "random",
        ProfileArg::Planted => "planted",
        ProfileArg::Adversarial => "adversarial",
        ProfileArg::All => "all",
    }
}

/// Hosts for one `m`; the complete profile contributes a single graph.
fn hosts_for(m: usize, profile: ProfileArg, count: usize, seed: u64) -> Result<Vec<Host>, CliError> {
    let pid = profile as u64;
    let n = if profile == ProfileArg::Complete { 1 } else { count };
    (0..n)
        .map(|j| {
            let mut r = rng::split(seed, ((m as u64) << 32) | (pid << 24) | j as u64);
            let kind = match profile {
                ProfileArg::Complete => ProfileKind::Complete,
                ProfileArg::Random => ProfileKind::RandomSupergraph { keep: r.gen_range(0.0..1.0) },
                ProfileArg::Planted => {
                    let (a, b, _) = planted_partition(m);
                    ProfileKind::PlantedExtremal { cross: r.gen_range(0..=a * b / 2) }
                }
                ProfileArg::Adversarial => ProfileKind::Adversarial,
                ProfileArg::All => unreachable!("expanded by profiles()"),
            };
            let graph = generate(InstanceProfile { kind, m }, &mut r).map_err(|e| CliError::Usage(format!("m = {m}: {e}")))?;
            Ok(Host { m, profile: name(profile), index: j, graph })
        })
        .collect()
}

fn run_pair(host: &Host, ti: usize, tree: &RootedTree, cfg: &EmbedConfig, timings: bool) -> SweepRecord {
    let start = Instant::now();
    let exact = backtrack_embed(&host.graph, tree, cfg.oracle_time_budget);
    let outcome = match exact {
        OracleResult::Embedded(_) => Outcome::Embedded,
        OracleResult::NotFound => Outcome::NotFound,
        OracleResult::Timeout => Outcome::Timeout,
    };
    let (pipeline, pipeline_branch) = match embed_tree(&host.graph, tree, cfg) {
        Ok(r) => (Outcome::Embedded, r.trace.branch),
        Err(spanembed::EmbedError::NotFound) => (Outcome::NotFound, None),
        Err(spanembed::EmbedError::Timeout) => (Outcome::Timeout, None),
        Err(_) => (Outcome::Error, None),
    };
    let counterexample = (outcome == Outcome::NotFound).then(|| [emit_graph(&host.graph), emit_tree(tree)]);
    SweepRecord {
        m: host.m,
        profile: host.profile,
        host: host.index,
        tree: ti,
        instance_id: instance_id(&host.graph, tree),
        outcome,
        pipeline,
        pipeline_branch,
        agree: (outcome == Outcome::Embedded) == (pipeline == Outcome::Embedded),
        counterexample,
        elapsed_ms: timings.then(|| start.elapsed().as_secs_f64() * 1e3),
    }
}

/// Every free tree with `m` edges against every generated host, for each `m`
/// in range. Records come out in a fixed order whatever the thread count.
pub fn sweep_records(a: &SweepArgs, file: &FileConfig) -> Result<Vec<SweepRecord>, CliError> {
    if a.m_min < 1 || a.m_min > a.m_max {
        return Err(CliError::Usage(format!("need 1 <= m-min <= m-max, got {}..{}", a.m_min, a.m_max)));
    }
    let cfg = EmbedConfig {
        seed: a.seed,
        oracle_time_budget: budget(a.time_budget.or(file.time_budget))?,
        ..EmbedConfig::default()
    };
    let mut hosts = Vec::new();
    let mut trees = Vec::new();
    for m in a.m_min..=a.m_max {
        let ts = enumerate_free_trees(m).map_err(|e| CliError::Usage(e.to_string()))?;
        for p in profiles(a.profile) {
            hosts.extend(hosts_for(m, p, a.hosts, a.seed)?);
        }
        trees.push(ts);
    }
    let pairs: Vec<(&Host, usize, &RootedTree)> = hosts
        .iter()
        .flat_map(|h| trees[h.m - a.m_min].iter().enumerate().map(move |(i, t)| (h, i, t)))
        .collect();
    let work = || pairs.par_iter().map(|&(h, i, t)| run_pair(h, i, t, &cfg, a.timings)).collect::<Vec<_>>();
    let records = match a.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(work),
        None => work(),
    };
    Ok(records)
}

pub fn sweep(a: &SweepArgs, file: &FileConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let records = sweep_records(a, file)?;
    let mut text = String::new();
    for r in &records {
        text += &serde_json::to_string(r).expect("record serializes");
        text.push('\n');
    }
    match &a.out {
        Some(p) => std::fs::write(p, &text).map_err(|source| CliError::Io { path: p.clone(), source })?,
        None => out.write_all(text.as_bytes())?,
    }
    let count = |o: Outcome| records.iter().filter(|r| r.outcome == o).count();
    let (nf, to) = (count(Outcome::NotFound), count(Outcome::Timeout));
    let disagree = records.iter().filter(|r| !r.agree).count();
    writeln!(err, "{} records, {} embedded, {nf} not found, {to} timeout, {disagree} disagreements", records.len(), count(Outcome::Embedded))?;
    for r in records.iter().filter(|r| r.outcome == Outcome::NotFound) {
        writeln!(err, "COUNTEREXAMPLE m={} profile={} host={} tree={} id={}", r.m, r.profile, r.host, r.tree, r.instance_id)?;
    }
    Ok(if nf > 0 {
        EXIT_NOT_FOUND
    } else if to > 0 {
        EXIT_TIMEOUT
    } else {
        EXIT_OK
    })
}
