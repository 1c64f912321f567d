//! Plain-text ordering and partition files: one block per line, variable
//! names separated by commas, blocks listed in elimination order. `#` starts
//! a comment; blank lines are skipped.
//!
//! ```text
//! # hand-picked order
//! x5
//! x2
//! x1, x4
//! ```

use std::collections::HashMap;

use localelim::{EliminationSequence, Problem};

use crate::error::{CliError, Result};

/// Parses a sequence covering every variable of `p` exactly once. With
/// `singletons_only`, a line naming more than one variable is rejected.
pub fn parse_sequence(text: &str, origin: &str, p: &Problem, singletons_only: bool) -> Result<EliminationSequence> {
    let ids: HashMap<&str, usize> = p.variables.iter().map(|v| (v.name.as_str(), v.id)).collect();
    let mut seen_on: Vec<Option<usize>> = vec![None; p.num_vars()];
    let mut blocks = Vec::new();
    let at = |line: usize, message: String| CliError::Line {
        origin: origin.to_string(),
        line,
        message,
    };

    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut block = Vec::new();
        for name in content.split(',').map(str::trim) {
            if name.is_empty() {
                return Err(at(line, "empty variable name".into()));
            }
            let &v = ids
                .get(name)
                .ok_or_else(|| at(line, format!("unknown variable '{name}'")))?;
            if let Some(first) = seen_on[v] {
                return Err(at(line, format!("variable '{name}' already listed on line {first}")));
            }
            seen_on[v] = Some(line);
            block.push(v);
        }
        if singletons_only && block.len() > 1 {
            return Err(at(
                line,
                format!("expected one variable per line, found {} (use a partition file for blocks)", block.len()),
            ));
        }
        blocks.push(block);
    }

    let missing: Vec<&str> = (0..p.num_vars())
        .filter(|&v| seen_on[v].is_none())
        .map(|v| p.name(v))
        .collect();
    if !missing.is_empty() {
        return Err(CliError::Invalid {
            origin: origin.to_string(),
            message: format!("sequence does not list {}", missing.join(", ")),
        });
    }
    Ok(EliminationSequence::new(blocks)?)
}

/// Writes `seq` in the file format, preceded by `# `-prefixed comment lines.
pub fn format_sequence(p: &Problem, seq: &EliminationSequence, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str("# ");
        out.push_str(c);
        out.push('\n');
    }
    for block in seq.blocks() {
        let names: Vec<&str> = block.iter().map(|&v| p.name(v)).collect();
        out.push_str(&names.join(", "));
        out.push('\n');
    }
    out
}
