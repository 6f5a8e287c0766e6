//! JSON exchange format and DOT export.
//!
//! ```json
//! {"nodes": [{"id": 0, "succ": []}, {"id": 1, "succ": [[0, 1]]}],
//!  "markings": {"M": [[1, 1], [0, -1]]}}
//! ```
//!
//! Node ids are kept as given. Output is stable: nodes by id, arcs and
//! marking entries by target id, markings by name.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{MarkingId, PowerCircuit};
use crate::error::CircuitError;
use crate::marking::{Marking, NodeId, Sign};

#[derive(Debug, Error)]
pub enum ExchangeError {
    #[error("invalid circuit JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid circuit: {0}")]
    Circuit(#[from] CircuitError),
    #[error("invalid sign {0} (expected 1 or -1)")]
    BadSign(i64),
    #[error("the arcs contain a cycle")]
    Cyclic,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct NodeRec {
    id: u32,
    succ: Vec<(u32, i64)>,
}

#[derive(Debug, Clone, Deserialize)]
struct Doc {
    nodes: Vec<NodeRec>,
    #[serde(default)]
    markings: BTreeMap<String, Vec<(u32, i64)>>,
}

/// A circuit whose registered markings carry names.
#[derive(Debug, Clone, Default)]
pub struct NamedCircuit {
    pub circuit: PowerCircuit,
    pub markings: BTreeMap<String, MarkingId>,
}

impl NamedCircuit {
    /// Names every registered marking of `c` as `m<handle>`.
    pub fn with_default_names(circuit: PowerCircuit) -> Self {
        let markings = circuit
            .marking_ids()
            .into_iter()
            .map(|id| (format!("m{}", id.0), id))
            .collect();
        NamedCircuit { circuit, markings }
    }

    pub fn marking(&self, name: &str) -> Option<&Marking> {
        self.markings.get(name).map(|&id| self.circuit.marking(id))
    }
}

fn entries(m: &Marking) -> Vec<(u32, i64)> {
    m.iter().map(|(n, s)| (n.0, s.to_i64())).collect()
}

fn marking_of(v: &[(u32, i64)]) -> Result<Marking, ExchangeError> {
    let mut m = Marking::new();
    for &(n, s) in v {
        m.set(
            NodeId(n),
            Some(Sign::from_i64(s).ok_or(ExchangeError::BadSign(s))?),
        );
    }
    Ok(m)
}

pub fn import_json(text: &str) -> Result<NamedCircuit, ExchangeError> {
    let doc: Doc = serde_json::from_str(text)?;
    let mut c = PowerCircuit::new();
    for n in &doc.nodes {
        c.insert_leaf_with_id(NodeId(n.id))?;
    }
    for n in &doc.nodes {
        for &(t, s) in &n.succ {
            let sign = Sign::from_i64(s).ok_or(ExchangeError::BadSign(s))?;
            c.add_arc_unchecked(NodeId(n.id), NodeId(t), sign)?;
        }
    }
    if !c.is_acyclic() {
        return Err(ExchangeError::Cyclic);
    }
    let mut markings = BTreeMap::new();
    for (name, v) in &doc.markings {
        markings.insert(name.clone(), c.register_marking(marking_of(v)?)?);
    }
    Ok(NamedCircuit {
        circuit: c,
        markings,
    })
}

fn compact<T: Serialize + ?Sized>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

pub fn export_json(nc: &NamedCircuit) -> String {
    let c = &nc.circuit;
    let doc = Doc {
        nodes: c
            .node_ids()
            .map(|n| NodeRec {
                id: n.0,
                succ: entries(c.succ(n)),
            })
            .collect(),
        markings: nc
            .markings
            .iter()
            .map(|(name, &id)| (name.clone(), entries(c.marking(id))))
            .collect(),
    };
    // one node or marking per line
    let mut s = String::from("{\n  \"nodes\": [");
    for (i, n) in doc.nodes.iter().enumerate() {
        s.push_str(if i == 0 { "\n    " } else { ",\n    " });
        s.push_str(&compact(n));
    }
    s.push_str(if doc.nodes.is_empty() {
        "],\n"
    } else {
        "\n  ],\n"
    });
    s.push_str("  \"markings\": {");
    for (i, (name, m)) in doc.markings.iter().enumerate() {
        s.push_str(if i == 0 { "\n    " } else { ",\n    " });
        let _ = write!(s, "{}: {}", compact(name), compact(m));
    }
    s.push_str(if doc.markings.is_empty() {
        "}\n}\n"
    } else {
        "\n  }\n}\n"
    });
    s
}

/// One edge per arc labelled `+`/`-`; node labels list the markings that
/// contain the node.
pub fn export_dot(nc: &NamedCircuit) -> String {
    let c = &nc.circuit;
    let mut member: BTreeMap<NodeId, Vec<String>> = BTreeMap::new();
    for (name, &id) in &nc.markings {
        for (n, s) in c.marking(id).iter() {
            member.entry(n).or_default().push(format!("{s}{name}"));
        }
    }
    let mut out = String::from("digraph circuit {\n");
    for n in c.node_ids() {
        let mut label = n.to_string();
        if let Some(ms) = member.get(&n) {
            let _ = write!(label, "\\n{}", ms.join(" "));
        }
        let _ = writeln!(out, "  {n} [label=\"{label}\"];");
    }
    for n in c.node_ids() {
        for (t, s) in c.succ(n).iter() {
            let _ = writeln!(out, "  {n} -> {t} [label=\"{s}\"];");
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{"nodes": [{"id": 0, "succ": []}, {"id": 3, "succ": [[0, 1]]}],
        "markings": {"M": [[3, 1], [0, -1]]}}"#;

    #[test]
    fn round_trip() {
        let nc = import_json(SAMPLE).unwrap();
        assert!(nc.circuit.contains(NodeId(3)));
        assert!(!nc.circuit.contains(NodeId(1)));
        let a = export_json(&nc);
        let b = export_json(&import_json(&a).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_input() {
        let cyc = r#"{"nodes": [{"id": 0, "succ": [[1, 1]]}, {"id": 1, "succ": [[0, 1]]}]}"#;
        assert!(matches!(import_json(cyc), Err(ExchangeError::Cyclic)));
        let sign = r#"{"nodes": [{"id": 0, "succ": []}, {"id": 1, "succ": [[0, 2]]}]}"#;
        assert!(matches!(import_json(sign), Err(ExchangeError::BadSign(2))));
        let dangling = r#"{"nodes": [{"id": 0, "succ": [[5, 1]]}]}"#;
        assert!(matches!(
            import_json(dangling),
            Err(ExchangeError::Circuit(_))
        ));
        assert!(matches!(import_json("{"), Err(ExchangeError::Json(_))));
    }

    #[test]
    fn dot_output() {
        let dot = export_dot(&import_json(SAMPLE).unwrap());
        assert_eq!(
            dot,
            "digraph circuit {\n  n0 [label=\"n0\\n-M\"];\n  n3 [label=\"n3\\n+M\"];\n  n3 -> n0 [label=\"+\"];\n}\n"
        );
    }
}
