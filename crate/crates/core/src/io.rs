//! Plain-text edge-list formats.
//!
//! Graph: first line `n m_edges`, then one `u v` pair per line (0-based).
//! Tree: first line `n`, then `n - 1` lines `child parent`.
//! Blank lines and lines starting with `#` are skipped.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::HostGraph;
use crate::tree::RootedTree;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_fields<const K: usize>(line: usize, s: &str) -> Result<[usize; K], ParseError> {
    let parts: Vec<&str> = s.split_whitespace().collect();
    if parts.len() != K {
        return Err(err(line, format!("expected {K} integers, found {} fields", parts.len())));
    }
    let mut out = [0usize; K];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse().map_err(|_| err(line, format!("not a non-negative integer: {p:?}")))?;
    }
    Ok(out)
}

pub fn parse_graph(text: &str) -> Result<HostGraph, ParseError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| err(1, "missing header `n m_edges`"))?;
    let [n, m_edges] = parse_fields::<2>(hl, header)?;
    let mut g = HostGraph::empty(n).map_err(|e| err(hl, e.to_string()))?;
    let mut count = 0;
    let mut last = hl;
    for (ln, l) in lines {
        let [u, v] = parse_fields::<2>(ln, l)?;
        g.add_edge(u, v).map_err(|e| err(ln, e.to_string()))?;
        count += 1;
        last = ln;
    }
    if count != m_edges {
        return Err(err(last, format!("header promises {m_edges} edges, found {count}")));
    }
    Ok(g)
}

pub fn emit_graph(g: &HostGraph) -> String {
    let edges = g.edges();
    let mut s = String::with_capacity(edges.len() * 8);
    writeln!(s, "{} {}", g.n(), edges.len()).unwrap();
    for (u, v) in edges {
        writeln!(s, "{u} {v}").unwrap();
    }
    s
}

pub fn parse_tree(text: &str) -> Result<RootedTree, ParseError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| err(1, "missing header `n`"))?;
    let [n] = parse_fields::<1>(hl, header)?;
    if n == 0 {
        return Err(err(hl, "tree needs at least one vertex"));
    }
    let mut parents: Vec<Option<usize>> = vec![None; n];
    let mut count = 0;
    let mut last = hl;
    for (ln, l) in lines {
        let [child, parent] = parse_fields::<2>(ln, l)?;
        if child >= n || parent >= n {
            return Err(err(ln, format!("vertex out of range for n = {n}")));
        }
        if parents[child].is_some() {
            return Err(err(ln, format!("vertex {child} has two parents")));
        }
        parents[child] = Some(parent);
        count += 1;
        last = ln;
    }
    if count != n - 1 {
        return Err(err(last, format!("expected {} child-parent lines, found {count}", n - 1)));
    }
    RootedTree::from_parents(&parents).map_err(|e| err(last, e.to_string()))
}

pub fn emit_tree(t: &RootedTree) -> String {
    let mut s = String::new();
    writeln!(s, "{}", t.n()).unwrap();
    for v in 0..t.n() {
        if let Some(p) = t.parent(v) {
            writeln!(s, "{v} {p}").unwrap();
        }
    }
    s
}
