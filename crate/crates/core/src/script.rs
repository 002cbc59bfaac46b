//! Update/query scripts for the dynamic oracle: one `U v λ` or `Q v λ` per
//! line, `#` comments allowed.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{parse_err, Result};
use crate::graph::{LabelId, NodeId};
use crate::io::{content_lines, parse_field};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScriptOp {
    Update(NodeId, LabelId),
    Query(NodeId, LabelId),
}

impl fmt::Display for ScriptOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScriptOp::Update(v, l) => write!(f, "U {v} {l}"),
            ScriptOp::Query(v, l) => write!(f, "Q {v} {l}"),
        }
    }
}

pub fn parse_script(text: &str) -> Result<Vec<ScriptOp>> {
    let mut ops = Vec::new();
    for (line, content) in content_lines(text) {
        let toks: Vec<&str> = content.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(parse_err(line, "expected `U v label` or `Q v label`"));
        }
        let v = parse_field(line, Some(toks[1]), "node")?;
        let l = parse_field(line, Some(toks[2]), "label")?;
        ops.push(match toks[0] {
            "U" | "u" => ScriptOp::Update(v, l),
            "Q" | "q" => ScriptOp::Query(v, l),
            other => return Err(parse_err(line, format!("unknown op `{other}`"))),
        });
    }
    Ok(ops)
}

pub fn write_script(ops: &[ScriptOp]) -> String {
    ops.iter().map(|op| format!("{op}\n")).collect()
}

/// `len` operations over `n` nodes and `label_count` labels, alternating
/// updates and queries with equal probability.
pub fn random_script(n: usize, label_count: usize, len: usize, seed: u64) -> Vec<ScriptOp> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| {
            let v = rng.gen_range(0..n);
            let l = rng.gen_range(0..label_count);
            if rng.gen_bool(0.5) {
                ScriptOp::Update(v, l)
            } else {
                ScriptOp::Query(v, l)
            }
        })
        .collect()
}
