//! JSON tree-decomposition documents: bags as lists of variable names, tree
//! edges as pairs of bag indices, and an optional root (default: last bag).
//!
//! ```json
//! { "version": 1, "bags": [["x2", "x5"], ["x1", "x2", "x3", "x4"]],
//!   "edges": [[0, 1]], "root": 1 }
//! ```

use std::collections::HashMap;

use localelim::treedec::{width, TdViolation};
use localelim::{Problem, TreeDecomposition};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::problem_file::{syntax_error, FORMAT_VERSION};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TdDoc {
    version: u32,
    /// Informational on output; ignored on input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    width: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    root: Option<usize>,
    bags: Vec<Vec<String>>,
    edges: Vec<[usize; 2]>,
}

pub fn parse_td(text: &str, origin: &str, p: &Problem) -> Result<TreeDecomposition> {
    let doc: TdDoc = serde_json::from_str(text).map_err(|e| syntax_error(origin, e))?;
    let field = |field: String, message: String| CliError::Field {
        origin: origin.to_string(),
        field,
        message,
    };
    if doc.version != FORMAT_VERSION {
        return Err(field(
            "version".into(),
            format!("unsupported version {} (expected {FORMAT_VERSION})", doc.version),
        ));
    }
    let ids: HashMap<&str, usize> = p.variables.iter().map(|v| (v.name.as_str(), v.id)).collect();
    let mut bags = Vec::with_capacity(doc.bags.len());
    for (b, bag) in doc.bags.iter().enumerate() {
        let resolved = bag
            .iter()
            .enumerate()
            .map(|(j, name)| {
                ids.get(name.as_str())
                    .copied()
                    .ok_or_else(|| field(format!("bags[{b}][{j}]"), format!("unknown variable '{name}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        bags.push(resolved);
    }
    if bags.is_empty() {
        return Err(field("bags".into(), "no bags".into()));
    }
    let root = doc.root.unwrap_or(bags.len() - 1);
    if root >= bags.len() {
        return Err(field("root".into(), format!("{root} is not a bag index")));
    }
    let edges = doc.edges.iter().map(|&[a, b]| (a, b)).collect();
    Ok(TreeDecomposition::new(bags, edges, root))
}

pub fn export_td(p: &Problem, td: &TreeDecomposition) -> String {
    let doc = TdDoc {
        version: FORMAT_VERSION,
        width: Some(width(td)),
        root: Some(td.root()),
        bags: td
            .bags()
            .iter()
            .map(|bag| bag.iter().map(|&v| p.name(v).to_string()).collect())
            .collect(),
        edges: td.edges().iter().map(|&(a, b)| [a, b]).collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("td documents serialize");
    text.push('\n');
    text
}

/// A verification finding rendered with variable names.
pub fn describe_violation(p: &Problem, v: &TdViolation) -> String {
    match v {
        TdViolation::Structure(why) => format!("structure: {why}"),
        TdViolation::UnknownVertex { bag, vertex } => {
            format!("structure: bag {bag} holds unknown vertex {vertex}")
        }
        TdViolation::UncoveredVertex(x) => format!("condition (i): {} is in no bag", p.name(*x)),
        TdViolation::UncoveredEdge(a, b) => {
            format!("condition (ii): edge ({}, {}) is in no bag", p.name(*a), p.name(*b))
        }
        TdViolation::DisconnectedOccurrences(x) => format!(
            "condition (iii): bags containing {} do not form a connected subtree",
            p.name(*x)
        ),
    }
}
