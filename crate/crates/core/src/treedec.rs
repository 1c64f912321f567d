//! Tree decompositions: construction from an elimination record, verification,
//! absorption into a clique tree, and dynamic programming over the bags.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{build_interaction_graph, InteractionGraph};
use crate::local::{Factor, LocalSubproblem, LocalTable, Score};
use crate::model::{Assignment, Problem, Solution, SolveStats, VarId};
use crate::ordering::{elimination_tree, EliminationRecord};

/// Bags (sorted vertex sets) connected by tree edges, with a designated root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    bags: Vec<Vec<VarId>>,
    edges: Vec<(usize, usize)>,
    root: usize,
}

/// Parent links and a root-first visiting order of a tree decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rooted {
    pub parent: Vec<Option<usize>>,
    pub depth: Vec<usize>,
    /// Breadth-first from the root; every parent precedes its children.
    pub order: Vec<usize>,
}

impl Rooted {
    pub fn children(&self, bag: usize) -> impl Iterator<Item = usize> + '_ {
        self.order.iter().copied().filter(move |&c| self.parent[c] == Some(bag))
    }
}

impl TreeDecomposition {
    /// Bags are stored sorted and deduplicated; no validity check is made
    /// here (see [`verify_td`]).
    pub fn new(bags: Vec<Vec<VarId>>, edges: Vec<(usize, usize)>, root: usize) -> Self {
        let bags = bags
            .into_iter()
            .map(|b| b.into_iter().collect::<BTreeSet<_>>().into_iter().collect())
            .collect();
        Self { bags, edges, root }
    }

    pub fn bags(&self) -> &[Vec<VarId>] {
        &self.bags
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    pub fn with_root(mut self, root: usize) -> Result<Self> {
        if root >= self.bags.len() {
            return Err(Error::InvalidTreeDecomposition(format!(
                "root {root} is not a bag index"
            )));
        }
        self.root = root;
        Ok(self)
    }

    fn adjacency(&self) -> Vec<BTreeSet<usize>> {
        let mut adj = vec![BTreeSet::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            if a < self.bags.len() && b < self.bags.len() {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        adj
    }

    /// Orients the tree away from the root; fails unless the edges form a
    /// spanning tree over the bags.
    pub fn rooted(&self) -> Result<Rooted> {
        let n = self.bags.len();
        let bad = |why: String| Err(Error::InvalidTreeDecomposition(why));
        if n == 0 {
            return bad("no bags".into());
        }
        if self.root >= n {
            return bad(format!("root {} is not a bag index", self.root));
        }
        if let Some(&(a, b)) = self.edges.iter().find(|&&(a, b)| a >= n || b >= n || a == b) {
            return bad(format!("edge ({a}, {b}) is not between two distinct bags"));
        }
        if self.edges.len() != n - 1 {
            return bad(format!("{} edges over {n} bags do not form a tree", self.edges.len()));
        }
        let adj = self.adjacency();
        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::from([self.root]);
        seen[self.root] = true;
        while let Some(b) = queue.pop_front() {
            order.push(b);
            for &c in &adj[b] {
                if !seen[c] {
                    seen[c] = true;
                    parent[c] = Some(b);
                    depth[c] = depth[b] + 1;
                    queue.push_back(c);
                }
            }
        }
        if order.len() != n {
            return bad("tree edges do not connect all bags".into());
        }
        Ok(Rooted { parent, depth, order })
    }
}

/// Maximum bag size minus one.
pub fn width(td: &TreeDecomposition) -> usize {
    td.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
}

/// One bag per elimination step (block plus its recorded scope), linked like
/// the elimination tree and rooted at the last step. Components of a
/// disconnected graph are hung under the last step's bag.
pub fn td_from_elimination(rec: &EliminationRecord) -> TreeDecomposition {
    let etree = elimination_tree(rec);
    let bags: Vec<Vec<VarId>> = rec
        .steps
        .iter()
        .map(|s| s.block.iter().chain(&s.scope).copied().collect())
        .collect();
    let last = bags.len().saturating_sub(1);
    let edges = (0..bags.len())
        .filter(|&s| s != last)
        .map(|s| (s, etree.parent(s).unwrap_or(last)))
        .collect();
    TreeDecomposition::new(bags, edges, last)
}

/// A failed tree-decomposition condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TdViolation {
    /// The bag graph is not a tree, or the root is out of range.
    Structure(String),
    UnknownVertex { bag: usize, vertex: usize },
    /// Condition (i): a vertex lies in no bag.
    UncoveredVertex(usize),
    /// Condition (ii): an edge lies in no bag.
    UncoveredEdge(usize, usize),
    /// Condition (iii): the bags holding a vertex are not connected.
    DisconnectedOccurrences(usize),
}

impl TdViolation {
    pub fn condition(&self) -> &'static str {
        match self {
            TdViolation::Structure(_) | TdViolation::UnknownVertex { .. } => "structure",
            TdViolation::UncoveredVertex(_) => "i",
            TdViolation::UncoveredEdge(..) => "ii",
            TdViolation::DisconnectedOccurrences(_) => "iii",
        }
    }
}

impl fmt::Display for TdViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TdViolation::Structure(why) => write!(f, "structure: {why}"),
            TdViolation::UnknownVertex { bag, vertex } => {
                write!(f, "structure: bag {bag} holds unknown vertex {vertex}")
            }
            TdViolation::UncoveredVertex(v) => write!(f, "condition (i): vertex {v} is in no bag"),
            TdViolation::UncoveredEdge(u, v) => {
                write!(f, "condition (ii): edge ({u}, {v}) is in no bag")
            }
            TdViolation::DisconnectedOccurrences(v) => write!(
                f,
                "condition (iii): bags containing vertex {v} do not form a subtree"
            ),
        }
    }
}

/// Checks that `td` is a tree decomposition of `g`; empty iff valid.
pub fn verify_td(g: &InteractionGraph, td: &TreeDecomposition) -> Vec<TdViolation> {
    let mut report = Vec::new();
    let rooted = match td.rooted() {
        Ok(r) => Some(r),
        Err(e) => {
            report.push(TdViolation::Structure(match e {
                Error::InvalidTreeDecomposition(why) => why,
                other => other.to_string(),
            }));
            None
        }
    };
    for (b, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            if !g.contains(v) {
                report.push(TdViolation::UnknownVertex { bag: b, vertex: v });
            }
        }
    }

    let holders = |v: usize| -> Vec<usize> {
        (0..td.bags.len())
            .filter(|&b| td.bags[b].binary_search(&v).is_ok())
            .collect()
    };
    for v in g.vertices() {
        if holders(v).is_empty() {
            report.push(TdViolation::UncoveredVertex(v));
        }
    }
    for (u, v) in g.edges() {
        let covered = td
            .bags
            .iter()
            .any(|bag| bag.binary_search(&u).is_ok() && bag.binary_search(&v).is_ok());
        if !covered {
            report.push(TdViolation::UncoveredEdge(u, v));
        }
    }
    if let Some(rooted) = rooted {
        // A vertex's bags form a subtree iff exactly one of them has its
        // parent outside the set.
        for v in g.vertices() {
            let held = holders(v);
            let tops = held
                .iter()
                .filter(|&&b| match rooted.parent[b] {
                    Some(p) => td.bags[p].binary_search(&v).is_err(),
                    None => true,
                })
                .count();
            if tops > 1 {
                report.push(TdViolation::DisconnectedOccurrences(v));
            }
        }
    }
    report
}

/// Merges every bag contained in a tree-adjacent bag into that neighbor until
/// no such pair remains. Surviving bags keep their relative order.
pub fn absorb(td: &TreeDecomposition) -> TreeDecomposition {
    let n = td.bags.len();
    let mut alive = vec![true; n];
    let mut adj = td.adjacency();
    let mut root = td.root;
    let subset = |a: &[VarId], b: &[VarId]| a.iter().all(|v| b.binary_search(v).is_ok());

    'scan: loop {
        for a in 0..n {
            if !alive[a] {
                continue;
            }
            for &b in &adj[a] {
                if subset(&td.bags[a], &td.bags[b]) {
                    let others: Vec<usize> = adj[a].iter().copied().filter(|&c| c != b).collect();
                    for c in others {
                        adj[c].remove(&a);
                        adj[c].insert(b);
                        adj[b].insert(c);
                    }
                    adj[b].remove(&a);
                    adj[a].clear();
                    alive[a] = false;
                    if root == a {
                        root = b;
                    }
                    continue 'scan;
                }
            }
        }
        break;
    }

    let mut new_index = vec![usize::MAX; n];
    let mut bags = Vec::new();
    for b in (0..n).filter(|&b| alive[b]) {
        new_index[b] = bags.len();
        bags.push(td.bags[b].clone());
    }
    let mut edges = Vec::new();
    for a in 0..n {
        for &b in &adj[a] {
            if a < b {
                edges.push((new_index[a], new_index[b]));
            }
        }
    }
    edges.sort_unstable();
    TreeDecomposition {
        bags,
        edges,
        root: new_index[root],
    }
}

/// Constraints and objective components solved at one bag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BagSubproblem {
    pub bag: usize,
    pub parent: Option<usize>,
    /// Bag ∩ parent bag; empty at the root.
    pub separator: Vec<VarId>,
    pub constraints: Vec<usize>,
    pub components: Vec<usize>,
}

fn covering_bag(td: &TreeDecomposition, rooted: &Rooted, scope: &[VarId]) -> Option<usize> {
    (0..td.bags.len())
        .filter(|&b| scope.iter().all(|v| td.bags[b].binary_search(v).is_ok()))
        .min_by_key(|&b| (rooted.depth[b], b))
}

/// Assigns every constraint and objective component to exactly one bag that
/// covers its scope: the covering bag nearest the root, ties to the lowest
/// bag index.
pub fn assign_to_bags(p: &Problem, td: &TreeDecomposition) -> Result<Vec<BagSubproblem>> {
    let rooted = td.rooted()?;
    let mut subproblems: Vec<BagSubproblem> = (0..td.bags.len())
        .map(|b| {
            let parent = rooted.parent[b];
            let separator = parent.map_or_else(Vec::new, |q| {
                td.bags[b]
                    .iter()
                    .copied()
                    .filter(|v| td.bags[q].binary_search(v).is_ok())
                    .collect()
            });
            BagSubproblem {
                bag: b,
                parent,
                separator,
                constraints: Vec::new(),
                components: Vec::new(),
            }
        })
        .collect();
    let uncovered = |what: String| Error::InvalidTreeDecomposition(format!("{what} is covered by no bag"));
    for (i, c) in p.constraints.iter().enumerate() {
        let b = covering_bag(td, &rooted, &c.scope()).ok_or_else(|| uncovered(format!("constraint {i}")))?;
        subproblems[b].constraints.push(i);
    }
    for (k, c) in p.objective.iter().enumerate() {
        let b = covering_bag(td, &rooted, &c.scope()).ok_or_else(|| uncovered(format!("objective component {k}")))?;
        subproblems[b].components.push(k);
    }
    Ok(subproblems)
}

/// Tables computed by [`tree_dp`], indexed by bag.
#[derive(Debug, Clone)]
pub struct TreeDp {
    pub subproblems: Vec<BagSubproblem>,
    /// Message of each bag to its parent (scope = separator, block = bag minus
    /// separator). The root's table has an empty scope and a single entry.
    pub tables: Vec<LocalTable>,
    pub solution: Solution,
}

/// Bottom-up pass computing each bag's message, then a top-down pass reading
/// off the argmax.
pub fn tree_dp(p: &Problem, td: &TreeDecomposition) -> Result<TreeDp> {
    if let Some(violation) = p.validate().first() {
        return Err(Error::InvalidProblem(violation.to_string()));
    }
    let g = build_interaction_graph(p);
    if let Some(violation) = verify_td(&g, td).first() {
        return Err(Error::InvalidTreeDecomposition(violation.to_string()));
    }
    let rooted = td.rooted()?;
    let subproblems = assign_to_bags(p, td)?;
    let own_factors: Vec<Vec<Factor>> = subproblems
        .iter()
        .map(|s| {
            s.components
                .iter()
                .map(|&k| Factor::from_component(p, &p.objective[k]))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut tables: Vec<Option<LocalTable>> = vec![None; td.len()];
    let mut messages: Vec<Option<Factor>> = vec![None; td.len()];
    let mut stats = SolveStats {
        induced_width: Some(width(td)),
        bag_count: Some(td.len()),
        ..SolveStats::default()
    };
    for &b in rooted.order.iter().rev() {
        let sub = &subproblems[b];
        let children: Vec<usize> = rooted.children(b).collect();
        let mut factors: Vec<&Factor> = own_factors[b].iter().collect();
        for &c in &children {
            factors.push(messages[c].as_ref().expect("children are solved first"));
        }
        let local = LocalSubproblem {
            factors,
            constraints: sub.constraints.iter().map(|&i| &p.constraints[i]).collect(),
            block: td.bags[b]
                .iter()
                .copied()
                .filter(|v| sub.separator.binary_search(v).is_err())
                .collect(),
            scope: sub.separator.clone(),
        };
        let (table, visited) = local.solve(p);
        stats.assignments_enumerated += visited;
        stats.max_table_entries = stats.max_table_entries.max(table.len());
        stats.tables += 1;
        messages[b] = Some(Factor::from_table(p, &table));
        tables[b] = Some(table);
    }
    let tables: Vec<LocalTable> = tables.into_iter().map(|t| t.expect("every bag solved")).collect();

    let root_entry = &tables[td.root].entries()[0];
    let solution = match root_entry.value {
        Score::NegInf => Solution::infeasible(stats),
        Score::Finite(value) => {
            let mut assignment = Assignment::empty(p.num_vars());
            for &b in &rooted.order {
                let table = &tables[b];
                let entry = table.entry_for(&assignment)?;
                let argmax = entry.argmax.as_ref().ok_or_else(|| {
                    Error::Inconsistent(format!("infeasible row reached at bag {b}"))
                })?;
                for (&v, &x) in table.block.iter().zip(argmax) {
                    assignment.set(v, x);
                }
            }
            debug_assert_eq!(p.objective_value(&assignment), Ok(value));
            Solution::optimal(value, assignment, stats)
        }
    };
    Ok(TreeDp {
        subproblems,
        tables,
        solution,
    })
}

pub fn solve_tree_dp(p: &Problem, td: &TreeDecomposition) -> Result<Solution> {
    Ok(tree_dp(p, td)?.solution)
}
