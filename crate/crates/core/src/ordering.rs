//! Elimination sequences, the Elimination Game, elimination trees and greedy
//! ordering heuristics.
//!
//! A sequence lists blocks in the order they are eliminated. Pure variable
//! elimination uses singleton blocks.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{Edge, Indistinguishability, InteractionGraph, Partition};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationSequence {
    blocks: Vec<Vec<usize>>,
    step_of: Vec<Option<usize>>,
}

impl EliminationSequence {
    pub fn new(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let partition = Partition::new(blocks)?;
        Ok(Self::from_partition(partition))
    }

    pub fn singletons(order: impl IntoIterator<Item = usize>) -> Self {
        Self::from_partition(Partition::singletons(order))
    }

    pub fn from_partition(partition: Partition) -> Self {
        let blocks = partition.into_blocks();
        let bound = blocks.iter().flatten().map(|&v| v + 1).max().unwrap_or(0);
        let mut step_of = vec![None; bound];
        for (step, block) in blocks.iter().enumerate() {
            for &v in block {
                step_of[v] = Some(step);
            }
        }
        Self { blocks, step_of }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Zero-based step at which `v` is eliminated.
    pub fn step_of(&self, v: usize) -> Option<usize> {
        self.step_of.get(v).copied().flatten()
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().flatten().copied()
    }

    pub fn is_singleton(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }

    pub fn to_partition(&self) -> Partition {
        Partition::new(self.blocks.clone()).expect("sequence blocks are disjoint")
    }

    pub(crate) fn check_covers(&self, g: &InteractionGraph) -> Result<()> {
        self.to_partition().check_covers(g)
    }
}

/// One step of the Elimination Game: the block removed and its open
/// neighborhood in the current graph (sorted ascending).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationStep {
    pub block: Vec<usize>,
    pub scope: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationRecord {
    pub sequence: EliminationSequence,
    pub steps: Vec<EliminationStep>,
    /// Fill edges in the order they were created.
    pub fill: Vec<Edge>,
    pub filled: InteractionGraph,
    pub induced_width: usize,
}

impl EliminationRecord {
    /// Largest `|block| + |scope|` over all steps.
    pub fn max_bag_size(&self) -> usize {
        self.steps
            .iter()
            .map(|s| s.block.len() + s.scope.len())
            .max()
            .unwrap_or(0)
    }
}

/// Simulates eliminating each block in turn, completing its neighborhood into a
/// clique. The filled graph is `g` plus every fill edge.
pub fn elimination_game(g: &InteractionGraph, seq: &EliminationSequence) -> Result<EliminationRecord> {
    seq.check_covers(g)?;
    let mut current = g.clone();
    let mut filled = g.clone();
    let mut steps = Vec::with_capacity(seq.len());
    let mut fill = Vec::new();
    for block in seq.blocks() {
        let (scope, added) = current.eliminate_block_in_place(block)?;
        for &(u, v) in &added {
            filled.add_edge(u, v);
        }
        fill.extend(added);
        steps.push(EliminationStep {
            block: block.clone(),
            scope,
        });
    }
    let induced_width = steps.iter().map(|s| s.scope.len()).max().unwrap_or(0);
    Ok(EliminationRecord {
        sequence: seq.clone(),
        steps,
        fill,
        filled,
        induced_width,
    })
}

pub fn induced_width(g: &InteractionGraph, seq: &EliminationSequence) -> Result<usize> {
    Ok(elimination_game(g, seq)?.induced_width)
}

/// Parent relation over elimination steps. Steps without a parent hang off a
/// virtual root; a connected graph has exactly one such step, the last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationTree {
    parent: Vec<Option<usize>>,
}

impl EliminationTree {
    pub fn parent(&self, step: usize) -> Option<usize> {
        self.parent[step]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Steps adopted by the virtual root, ascending.
    pub fn roots(&self) -> Vec<usize> {
        (0..self.parent.len()).filter(|&s| self.parent[s].is_none()).collect()
    }

    pub fn children(&self, step: usize) -> Vec<usize> {
        (0..self.parent.len())
            .filter(|&s| self.parent[s] == Some(step))
            .collect()
    }
}

/// The parent of a step is the earliest-eliminated step owning a vertex of its
/// recorded scope.
pub fn elimination_tree(rec: &EliminationRecord) -> EliminationTree {
    let parent = rec
        .steps
        .iter()
        .map(|step| step.scope.iter().filter_map(|&v| rec.sequence.step_of(v)).min())
        .collect();
    EliminationTree { parent }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Heuristic {
    MinDegree,
    MinFill,
    Mcs,
    /// Ascending vertex id.
    Natural,
}

impl Heuristic {
    pub const ALL: [Heuristic; 4] = [Heuristic::MinDegree, Heuristic::MinFill, Heuristic::Mcs, Heuristic::Natural];

    pub fn name(self) -> &'static str {
        match self {
            Heuristic::MinDegree => "min-degree",
            Heuristic::MinFill => "min-fill",
            Heuristic::Mcs => "mcs",
            Heuristic::Natural => "natural",
        }
    }

    pub fn order(self, g: &InteractionGraph) -> EliminationSequence {
        match self {
            Heuristic::MinDegree => order_min_degree(g),
            Heuristic::MinFill => order_min_fill(g),
            Heuristic::Mcs => order_mcs(g),
            Heuristic::Natural => EliminationSequence::singletons(g.vertices()),
        }
    }
}

impl fmt::Display for Heuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Heuristic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Heuristic::ALL
            .into_iter()
            .find(|h| h.name() == s)
            .ok_or_else(|| Error::UnknownHeuristic(s.to_string()))
    }
}

fn greedy(g: &InteractionGraph, mut cost: impl FnMut(&InteractionGraph, usize) -> usize) -> EliminationSequence {
    let mut current = g.clone();
    let mut order = Vec::with_capacity(g.num_vertices());
    while let Some(v) = current.vertices().min_by_key(|&v| (cost(&current, v), v)) {
        current
            .eliminate_block_in_place(&[v])
            .expect("vertex is present");
        order.push(v);
    }
    EliminationSequence::singletons(order)
}

/// Repeatedly eliminates a vertex of minimum current degree.
pub fn order_min_degree(g: &InteractionGraph) -> EliminationSequence {
    greedy(g, |h, v| h.degree(v))
}

/// Repeatedly eliminates the vertex whose elimination adds the fewest fill
/// edges.
pub fn order_min_fill(g: &InteractionGraph) -> EliminationSequence {
    greedy(g, |h, v| {
        let nbrs: Vec<usize> = h.neighbors(v).iter().copied().collect();
        h.missing_edges(&nbrs).len()
    })
}

/// Reverse of the maximum-cardinality search visiting order; a perfect
/// elimination order whenever `g` is chordal.
pub fn order_mcs(g: &InteractionGraph) -> EliminationSequence {
    let mut visit = g.mcs_visit_order();
    visit.reverse();
    EliminationSequence::singletons(visit)
}

/// Later neighbors of `v` in `g` under the vertex order of `seq`.
pub fn monotone_neighborhood(g: &InteractionGraph, seq: &EliminationSequence, v: usize) -> BTreeSet<usize> {
    let here = seq.step_of(v);
    g.neighbors(v)
        .iter()
        .copied()
        .filter(|&u| seq.step_of(u) > here)
        .collect()
}

/// Merges indistinguishable vertices into blocks and orders the blocks by
/// running `heuristic` on the quotient graph.
pub fn block_order(g: &InteractionGraph, heuristic: Heuristic) -> EliminationSequence {
    let partition = g.indistinguishable_partition(Indistinguishability::Union);
    let quotient = g.quotient(&partition).expect("partition covers the graph");
    let mut blocks: Vec<Option<Vec<usize>>> = partition.into_blocks().into_iter().map(Some).collect();
    let ordered = heuristic
        .order(&quotient)
        .vertices()
        .map(|b| blocks[b].take().expect("each block ordered once"))
        .collect();
    EliminationSequence::new(ordered).expect("blocks of a partition")
}
