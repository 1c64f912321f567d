//! The operations behind each subcommand, free of argument parsing and I/O.

use std::time::Instant;

use clap::ValueEnum;
use localelim::elim;
use localelim::graph::{build_interaction_graph, Indistinguishability};
use localelim::oracle::brute_force_with_cap;
use localelim::ordering::{block_order, elimination_game, elimination_tree, Heuristic};
use localelim::treedec::{absorb, td_from_elimination, tree_dp, verify_td, width};
use localelim::{EliminationRecord, EliminationSequence, Problem, Solution, Status, TreeDecomposition};
use serde::{Serialize, Serializer};

use crate::dot;
use crate::error::{CliError, Result};
use crate::td_file::describe_violation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Variable-by-variable elimination.
    Nsdp,
    /// Elimination of variable blocks.
    Block,
    /// Dynamic programming over a tree decomposition.
    Treedec,
    /// Exhaustive enumeration.
    Brute,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Nsdp => "nsdp",
            Method::Block => "block",
            Method::Treedec => "treedec",
            Method::Brute => "brute",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DotTarget {
    Interaction,
    Filled,
    Etree,
    Td,
}

/// Where the elimination sequence comes from. File contents are passed in
/// already read, paired with their origin for error messages.
#[derive(Debug, Clone)]
pub enum SequenceSource {
    Heuristic(Heuristic),
    OrderFile { text: String, origin: String },
    PartitionFile { text: String, origin: String },
}

impl Default for SequenceSource {
    fn default() -> Self {
        SequenceSource::Heuristic(Heuristic::MinFill)
    }
}

/// Resolves the sequence for `p`. A heuristic yields a vertex order, or with
/// `blocks` set, indistinguishable-vertex blocks ordered on the quotient graph.
pub fn resolve_sequence(p: &Problem, source: &SequenceSource, blocks: bool) -> Result<EliminationSequence> {
    let g = build_interaction_graph(p);
    match source {
        SequenceSource::Heuristic(h) if blocks => Ok(block_order(&g, *h)),
        SequenceSource::Heuristic(h) => Ok(h.order(&g)),
        SequenceSource::OrderFile { text, origin } => crate::seq_file::parse_sequence(text, origin, p, true),
        SequenceSource::PartitionFile { text, origin } => crate::seq_file::parse_sequence(text, origin, p, false),
    }
}

#[derive(Debug, Clone, Default)]
pub struct TdOptions {
    pub absorb: bool,
    pub root: Option<usize>,
}

/// Tree decomposition from the elimination record of `seq`, optionally
/// absorbed into a clique tree and re-rooted.
pub fn build_td(rec: &EliminationRecord, opts: &TdOptions) -> Result<TreeDecomposition> {
    let mut td = td_from_elimination(rec);
    if opts.absorb {
        td = absorb(&td);
    }
    if let Some(root) = opts.root {
        td = td.with_root(root)?;
    }
    Ok(td)
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct ReportStats {
    pub induced_width: Option<usize>,
    pub fill_edges: Option<usize>,
    pub max_table_entries: usize,
    pub tables: usize,
    pub bag_count: Option<usize>,
    pub td_width: Option<usize>,
    pub assignments_enumerated: u128,
}

fn as_map<S: Serializer>(pairs: &Option<Vec<(String, i64)>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match pairs {
        Some(pairs) => s.collect_map(pairs.iter().map(|(k, v)| (k, v))),
        None => s.serialize_none(),
    }
}

/// Result of `solve`. Serialized as the command's JSON output; every field is
/// a function of the inputs except `wall_time_ms`, which is only present when
/// requested.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RunReport {
    pub method: String,
    pub status: String,
    pub value: Option<i64>,
    #[serde(serialize_with = "as_map")]
    pub assignment: Option<Vec<(String, i64)>>,
    /// Blocks in elimination order, each written as in an ordering file.
    pub sequence: Option<Vec<String>>,
    pub stats: ReportStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl RunReport {
    pub fn status(&self) -> Status {
        if self.status == "optimal" {
            Status::Optimal
        } else {
            Status::Infeasible
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports serialize");
        text.push('\n');
        text
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub method: Method,
    pub source: SequenceSource,
    pub cap: u128,
    pub td: TdOptions,
    pub timing: bool,
}

fn block_lines(p: &Problem, seq: &EliminationSequence) -> Vec<String> {
    seq.blocks()
        .iter()
        .map(|b| b.iter().map(|&v| p.name(v)).collect::<Vec<_>>().join(", "))
        .collect()
}

pub fn solve(p: &Problem, opts: &SolveOptions) -> Result<RunReport> {
    let start = Instant::now();
    if let (Method::Nsdp, SequenceSource::PartitionFile { .. }) = (opts.method, &opts.source) {
        return Err(CliError::Usage(
            "method nsdp eliminates single variables; use --order-file or --method block".into(),
        ));
    }
    let (solution, sequence, td_width): (Solution, Option<EliminationSequence>, Option<usize>) = match opts.method {
        Method::Brute => (brute_force_with_cap(p, opts.cap)?, None, None),
        Method::Nsdp | Method::Block => {
            let seq = resolve_sequence(p, &opts.source, opts.method == Method::Block)?;
            (elim::solve(p, &seq)?, Some(seq), None)
        }
        Method::Treedec => {
            let seq = resolve_sequence(p, &opts.source, false)?;
            let rec = elimination_game(&build_interaction_graph(p), &seq)?;
            let td = build_td(&rec, &opts.td)?;
            let mut solution = tree_dp(p, &td)?.solution;
            solution.stats.induced_width = Some(rec.induced_width);
            solution.stats.fill_edges = Some(rec.fill.len());
            (solution, Some(seq), Some(width(&td)))
        }
    };
    let stats = &solution.stats;
    Ok(RunReport {
        method: opts.method.name().to_string(),
        status: match solution.status {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
        }
        .to_string(),
        value: solution.value,
        assignment: solution.assignment.as_ref().map(|a| {
            (0..p.num_vars())
                .map(|v| (p.name(v).to_string(), a.get(v).expect("total assignment")))
                .collect()
        }),
        sequence: sequence.as_ref().map(|s| block_lines(p, s)),
        stats: ReportStats {
            induced_width: stats.induced_width,
            fill_edges: stats.fill_edges,
            max_table_entries: stats.max_table_entries,
            tables: stats.tables,
            bag_count: stats.bag_count,
            td_width,
            assignments_enumerated: stats.assignments_enumerated,
        },
        wall_time_ms: opts.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    })
}

/// Ordering file text for `seq`, headed by its width and fill as comments.
pub fn order(p: &Problem, source: &SequenceSource, blocks: bool) -> Result<String> {
    let seq = resolve_sequence(p, source, blocks)?;
    let rec = elimination_game(&build_interaction_graph(p), &seq)?;
    let origin = match source {
        SequenceSource::Heuristic(h) if blocks => format!("heuristic: {h} (blocks)"),
        SequenceSource::Heuristic(h) => format!("heuristic: {h}"),
        SequenceSource::OrderFile { origin, .. } | SequenceSource::PartitionFile { origin, .. } => {
            format!("file: {origin}")
        }
    };
    let fill: Vec<String> = rec
        .fill
        .iter()
        .map(|&(u, v)| format!("({}, {})", p.name(u), p.name(v)))
        .collect();
    let comments = vec![
        origin,
        format!("induced width: {}", rec.induced_width),
        format!("fill edges: {}{}", rec.fill.len(), if fill.is_empty() { String::new() } else { format!(" {}", fill.join(" ")) }),
    ];
    Ok(crate::seq_file::format_sequence(p, &seq, &comments))
}

pub fn export_dot(p: &Problem, target: DotTarget, source: &SequenceSource, td: &TdOptions) -> Result<String> {
    let g = build_interaction_graph(p);
    if target == DotTarget::Interaction {
        return Ok(dot::interaction_dot(p, &g));
    }
    let seq = resolve_sequence(p, source, false)?;
    let rec = elimination_game(&g, &seq)?;
    Ok(match target {
        DotTarget::Interaction => unreachable!(),
        DotTarget::Filled => dot::filled_dot(p, &rec),
        DotTarget::Etree => dot::etree_dot(p, &rec, &elimination_tree(&rec)),
        DotTarget::Td => dot::td_dot(p, &build_td(&rec, td)?),
    })
}

/// Tree decomposition document for `p`.
pub fn treedec(p: &Problem, source: &SequenceSource, td: &TdOptions) -> Result<String> {
    let seq = resolve_sequence(p, source, false)?;
    let rec = elimination_game(&build_interaction_graph(p), &seq)?;
    Ok(crate::td_file::export_td(p, &build_td(&rec, td)?))
}

/// Violations of `td` against `p`'s interaction graph, rendered with names;
/// empty iff valid.
pub fn verify(p: &Problem, td: &TreeDecomposition) -> Vec<String> {
    verify_td(&build_interaction_graph(p), td)
        .iter()
        .map(|v| describe_violation(p, v))
        .collect()
}

#[derive(Debug, Serialize)]
struct HeuristicStats {
    heuristic: &'static str,
    induced_width: usize,
    fill_edges: usize,
    sequence: Vec<String>,
}

#[derive(Debug, Serialize)]
struct ProblemStats {
    variables: usize,
    constraints: usize,
    linear_terms: usize,
    tables: usize,
    search_space: u128,
    edges: usize,
    max_degree: usize,
    chordal: bool,
    indistinguishable_blocks: Vec<String>,
    orderings: Vec<HeuristicStats>,
}

/// Structural summary of `p` as a JSON document.
pub fn stats(p: &Problem) -> Result<String> {
    let g = build_interaction_graph(p);
    let twins = g.indistinguishable_partition(Indistinguishability::Union);
    let mut orderings = Vec::new();
    for h in Heuristic::ALL {
        let seq = h.order(&g);
        let rec = elimination_game(&g, &seq)?;
        orderings.push(HeuristicStats {
            heuristic: h.name(),
            induced_width: rec.induced_width,
            fill_edges: rec.fill.len(),
            sequence: block_lines(p, &seq),
        });
    }
    let linear_terms = p
        .objective
        .iter()
        .filter(|c| matches!(c, localelim::ObjectiveComponent::Linear { .. }))
        .count();
    let doc = ProblemStats {
        variables: p.num_vars(),
        constraints: p.constraints.len(),
        linear_terms,
        tables: p.objective.len() - linear_terms,
        search_space: p.search_space_size(),
        edges: g.num_edges(),
        max_degree: g.vertices().map(|v| g.degree(v)).max().unwrap_or(0),
        chordal: g.is_chordal(),
        indistinguishable_blocks: block_lines(p, &EliminationSequence::from_partition(twins)),
        orderings,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("stats serialize");
    text.push('\n');
    Ok(text)
}
