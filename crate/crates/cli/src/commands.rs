use std::io::Write;
use std::time::Instant;

use serde_json::json;
use spanembed::decompose::{classify_bad, gamma_nice_subtree, select_l, try_nice_subtree, z_cut};
use spanembed::embed::case_of;
use spanembed::io::{emit_graph, emit_tree, parse_graph, parse_tree};
use spanembed::oracle::{generate as gen_graph, random_spanning_tree, InstanceProfile, ProfileKind};
use spanembed::special::{detect_special, refine_partition, special_report, DEFAULT_RESTARTS};
use spanembed::{backtrack_embed, embed_tree, is_full_embedding, rng, EmbedError, HostGraph, OracleResult, RootedTree};

use crate::config::{budget, FileConfig};
use crate::record::{instance_id, Outcome, RunRecord};
use crate::{CliError, DecomposeArgs, DetectArgs, EmbedArgs, GenerateArgs, OracleArgs, ProfileArg, EXIT_NOT_FOUND, EXIT_OK};

fn read(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })
}

pub fn read_graph(path: &str) -> Result<HostGraph, CliError> {
    parse_graph(&read(path)?).map_err(|source| CliError::Parse { path: path.into(), source })
}

pub fn read_tree(path: &str) -> Result<RootedTree, CliError> {
    parse_tree(&read(path)?).map_err(|source| CliError::Parse { path: path.into(), source })
}

fn write_to(path: &str, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.into(), source })
}

fn emit_record(rec: &RunRecord, json: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    if json {
        writeln!(out, "{}", serde_json::to_string(rec).expect("record serializes"))?;
    } else {
        write!(out, "{}", rec.text())?;
    }
    Ok(rec.outcome.exit_code())
}

fn verified_map(g: &HostGraph, t: &RootedTree, phi: &spanembed::Embedding) -> Result<Vec<usize>, CliError> {
    if !is_full_embedding(g, t, phi) {
        return Err(CliError::Usage("internal error: produced map fails verification".into()));
    }
    Ok(phi.to_map().expect("complete"))
}

pub fn embed(a: &EmbedArgs, file: &FileConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    let g = read_graph(&a.graph)?;
    let t = read_tree(&a.tree)?;
    let mut cfg = file.embed_config(&a.params, a.time_budget)?;
    cfg.oracle_fallback = !a.no_oracle_fallback;
    let start = Instant::now();
    let result = embed_tree(&g, &t, &cfg);
    let elapsed = start.elapsed();
    let mut rec = RunRecord {
        instance_id: instance_id(&g, &t),
        command: "embed".into(),
        seed: cfg.seed,
        outcome: Outcome::Error,
        branch: None,
        case: None,
        branch_trace: Vec::new(),
        map: None,
        error: None,
        elapsed_ms: a.params.timings.then_some(elapsed.as_secs_f64() * 1e3),
        plan: None,
    };
    match result {
        Ok(r) => {
            rec.outcome = Outcome::Embedded;
            rec.branch = r.trace.branch;
            rec.case = r.trace.case;
            rec.branch_trace = r.trace.steps;
            rec.map = Some(verified_map(&g, &t, &r.embedding)?);
            if a.dump_plan {
                rec.plan = r.plan.map(|p| serde_json::to_value(p).expect("plan serializes"));
            }
        }
        Err(e) => {
            rec.outcome = match e {
                EmbedError::NotFound => Outcome::NotFound,
                EmbedError::Timeout => Outcome::Timeout,
                _ => Outcome::Error,
            };
            rec.error = Some(e.to_string());
        }
    }
    emit_record(&rec, a.params.json, out)
}

pub fn oracle(a: &OracleArgs, file: &FileConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    let g = read_graph(&a.graph)?;
    let t = read_tree(&a.tree)?;
    let limit = budget(a.time_budget.or(file.time_budget))?;
    let start = Instant::now();
    let res = backtrack_embed(&g, &t, limit);
    let elapsed = start.elapsed();
    let mut rec = RunRecord {
        instance_id: instance_id(&g, &t),
        command: "oracle".into(),
        seed: 0,
        outcome: Outcome::Error,
        branch: None,
        case: None,
        branch_trace: vec!["exact search".into()],
        map: None,
        error: None,
        elapsed_ms: a.timings.then_some(elapsed.as_secs_f64() * 1e3),
        plan: None,
    };
    match res {
        OracleResult::Embedded(phi) => {
            rec.outcome = Outcome::Embedded;
            rec.map = Some(verified_map(&g, &t, &phi)?);
        }
        OracleResult::NotFound => rec.outcome = Outcome::NotFound,
        OracleResult::Timeout => rec.outcome = Outcome::Timeout,
    }
    if t.n() != g.n() && rec.outcome == Outcome::NotFound {
        rec.error = Some(format!("tree has {} vertices, host has {}", t.n(), g.n()));
    }
    emit_record(&rec, a.json, out)
}

pub fn decompose(a: &DecomposeArgs, file: &FileConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    let t = read_tree(&a.tree)?;
    let cfg = file.embed_config(&a.params, None)?;
    let sub = if a.relaxed { try_nice_subtree(&t, cfg.gamma) } else { gamma_nice_subtree(&t, cfg.gamma) }
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let selected = select_l(&sub, t.neighbours(sub.root));
    let mut doc = json!({
        "m": t.m(),
        "gamma": cfg.gamma,
        "kind": sub.kind,
        "root": sub.root,
        "vertices": sub.vertices,
        "paths": sub.paths,
        "reserved_leaves": sub.reserved_leaves,
    });
    match &selected {
        Ok(l) => doc["selected"] = json!(l),
        Err(e) => doc["selected_error"] = json!(e.to_string()),
    }
    let with_l = sub.clone().with_selected(selected.unwrap_or_default());
    match z_cut(&t, &with_l, cfg.gamma0, cfg.gamma1) {
        Ok(cut) => {
            let bad = classify_bad(&cut, &t);
            let sizes: Vec<usize> = cut.components.iter().map(Vec::len).collect();
            doc["cut"] = json!({
                "z": cut.z,
                "tstar": cut.tstar,
                "component_sizes": sizes,
                "part1": cut.part1,
                "part2": cut.part2,
                "a_star": cut.a_star,
                "bad": bad,
                "case": case_of(t.m(), 3 * bad.len()),
            });
        }
        Err(e) => doc["cut_error"] = json!(e.to_string()),
    }
    if a.params.json {
        writeln!(out, "{doc}")?;
    } else {
        writeln!(out, "kind {:?}\nroot {}\nsize {}", sub.kind, sub.root, sub.vertices.len())?;
        if let Some(l) = doc.get("selected") {
            writeln!(out, "selected {l}")?;
        }
        match doc.get("cut") {
            Some(c) => writeln!(out, "z {}\ncase {}", c["z"], c["case"])?,
            None => writeln!(out, "cut_error {}", doc["cut_error"])?,
        }
    }
    Ok(EXIT_OK)
}

pub fn detect(a: &DetectArgs, file: &FileConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    let g = read_graph(&a.graph)?;
    let cfg = file.embed_config(&a.params, None)?;
    let restarts = a.restarts.or(file.detect_restarts).unwrap_or(DEFAULT_RESTARTS);
    let found = detect_special(&g, cfg.gamma0, restarts, rng::derive(cfg.seed, 0xD7));
    let mut doc = json!({ "found": found.is_some(), "gamma": cfg.gamma0 });
    if let Some(p) = &found {
        doc["partition"] = json!(p);
        doc["report"] = json!(special_report(&g, p));
        if a.refine {
            match refine_partition(&g, p, cfg.gamma0) {
                Ok(r) => doc["refined"] = json!(r),
                Err(e) => doc["refine_error"] = json!(e.to_string()),
            }
        }
    }
    if a.params.json {
        writeln!(out, "{doc}")?;
    } else {
        match &found {
            Some(p) => writeln!(out, "found sizes {} {} {}", p.x1.len(), p.x2.len(), p.x3.len())?,
            None => writeln!(out, "not found")?,
        }
        if let Some(r) = doc.get("refined") {
            writeln!(out, "removed {}", r["removed"])?;
        }
        if let Some(e) = doc.get("refine_error") {
            writeln!(out, "refine_error {e}")?;
        }
    }
    Ok(if found.is_some() { EXIT_OK } else { EXIT_NOT_FOUND })
}

pub fn profile_kind(p: ProfileArg, keep: f64, cross: usize) -> Result<ProfileKind, CliError> {
    Ok(match p {
        ProfileArg::Complete => ProfileKind::Complete,
        ProfileArg::Random => ProfileKind::RandomSupergraph { keep },
        ProfileArg::Planted => ProfileKind::PlantedExtremal { cross },
        ProfileArg::Adversarial => ProfileKind::Adversarial,
        ProfileArg::All => return Err(CliError::Usage("generate needs a single profile".into())),
    })
}

pub fn generate(a: &GenerateArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let kind = profile_kind(a.profile, a.keep, a.cross)?;
    let g = gen_graph(InstanceProfile { kind, m: a.m }, &mut rng::split(a.seed, 0))
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let text = emit_graph(&g);
    match &a.out {
        Some(p) => write_to(p, &text)?,
        None => out.write_all(text.as_bytes())?,
    }
    if let Some(p) = &a.tree_out {
        let t = random_spanning_tree(&g, &mut rng::split(a.seed, 1)).map_err(|e| CliError::Usage(e.to_string()))?;
        write_to(p, &emit_tree(&t))?;
    }
    Ok(EXIT_OK)
}

