use serde::Serialize;
use sha2::{Digest, Sha256};
use spanembed::embed::Branch;
use spanembed::io::{emit_graph, emit_tree};
use spanembed::{HostGraph, RootedTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    Embedded,
    NotFound,
    Timeout,
    Error,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Embedded => crate::EXIT_OK,
            Outcome::NotFound => crate::EXIT_NOT_FOUND,
            Outcome::Timeout => crate::EXIT_TIMEOUT,
            Outcome::Error => crate::EXIT_ERROR,
        }
    }
}

/// SHA-256 over the canonical text of both files.
pub fn instance_id(g: &HostGraph, t: &RootedTree) -> String {
    let mut h = Sha256::new();
    h.update(emit_graph(g).as_bytes());
    h.update(b"--\n");
    h.update(emit_tree(t).as_bytes());
    hex::encode(h.finalize())
}

/// Result of one `embed` or `oracle` run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub instance_id: String,
    pub command: String,
    pub seed: u64,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch: Option<Branch>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<u8>,
    pub branch_trace: Vec<String>,
    /// `map[v]` is the host vertex of tree vertex `v`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub map: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plan: Option<serde_json::Value>,
}

impl RunRecord {
    pub fn text(&self) -> String {
        let mut s = format!("instance {}\noutcome {:?}\n", self.instance_id, self.outcome);
        if let Some(b) = self.branch {
            s += &format!("branch {}\n", serde_json::to_value(b).expect("plain enum").as_str().unwrap_or("?"));
        }
        if let Some(c) = self.case {
            s += &format!("case {c}\n");
        }
        for step in &self.branch_trace {
            s += &format!("step {step}\n");
        }
        if let Some(e) = &self.error {
            s += &format!("error {e}\n");
        }
        if let Some(ms) = self.elapsed_ms {
            s += &format!("elapsed_ms {ms:.3}\n");
        }
        if let Some(map) = &self.map {
            for (v, x) in map.iter().enumerate() {
                s += &format!("{v} {x}\n");
            }
        }
        s
    }
}
