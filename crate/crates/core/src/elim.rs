//! Forward/backward local elimination over an ordered sequence of blocks.
//!
//! The forward part eliminates one block at a time: every remaining constraint
//! and objective component that mentions the block is gathered, the resulting
//! subproblem is solved by complete enumeration for each assignment of the
//! block's neighborhood, and the resulting [`LocalTable`] replaces the gathered
//! components. After the last block only constant tables remain; their sum is
//! the optimum. The backward part replays the stored tables in reverse to read
//! off an optimal assignment.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{build_interaction_graph, InteractionGraph, NeighborhoodKind};
use crate::local::{Factor, LocalSubproblem, LocalTable, Score};
use crate::model::{Assignment, Problem, Solution, SolveStats, VarId};
use crate::ordering::EliminationSequence;

/// Where an objective component of the working problem came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ComponentRef {
    /// Index into `Problem::objective`.
    Original(usize),
    /// Index into the solve's table stack.
    Generated(usize),
}

/// Constraints and original objective components whose earliest-eliminated
/// variable lies in `block`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bucket {
    pub block: Vec<VarId>,
    pub constraints: Vec<usize>,
    pub components: Vec<ComponentRef>,
}

fn check_sequence(p: &Problem, seq: &EliminationSequence) -> Result<()> {
    let n = p.num_vars();
    let covered: BTreeSet<usize> = seq.vertices().collect();
    let total: usize = seq.blocks().iter().map(Vec::len).sum();
    if covered.len() != total || covered.len() != n || covered.iter().any(|&v| v >= n) {
        return Err(Error::InvalidPartition(format!(
            "sequence does not partition the {n} problem variables"
        )));
    }
    Ok(())
}

fn validated(p: &Problem) -> Result<()> {
    match p.validate().first() {
        Some(violation) => Err(Error::InvalidProblem(violation.to_string())),
        None => Ok(()),
    }
}

/// Places each constraint and each objective component in the bucket of its
/// earliest-eliminated variable. Buckets come back in elimination order.
pub fn bucket_partition(p: &Problem, seq: &EliminationSequence) -> Result<Vec<Bucket>> {
    check_sequence(p, seq)?;
    let mut buckets: Vec<Bucket> = seq
        .blocks()
        .iter()
        .map(|block| Bucket {
            block: block.clone(),
            constraints: Vec::new(),
            components: Vec::new(),
        })
        .collect();
    let earliest = |scope: Vec<VarId>| scope.into_iter().filter_map(|v| seq.step_of(v)).min();
    for (i, c) in p.constraints.iter().enumerate() {
        if let Some(step) = earliest(c.scope()) {
            buckets[step].constraints.push(i);
        }
    }
    for (k, c) in p.objective.iter().enumerate() {
        if let Some(step) = earliest(c.scope()) {
            buckets[step].components.push(ComponentRef::Original(k));
        }
    }
    Ok(buckets)
}

/// The reduced problem between elimination steps.
#[derive(Debug, Clone)]
pub struct SolveState<'p> {
    problem: &'p Problem,
    graph: InteractionGraph,
    constraints: Vec<usize>,
    components: Vec<(ComponentRef, Factor)>,
    tables: Vec<LocalTable>,
    stats: SolveStats,
}

impl<'p> SolveState<'p> {
    pub fn new(problem: &'p Problem) -> Result<Self> {
        validated(problem)?;
        let components = problem
            .objective
            .iter()
            .enumerate()
            .map(|(k, c)| Ok((ComponentRef::Original(k), Factor::from_component(problem, c)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            problem,
            graph: build_interaction_graph(problem),
            constraints: (0..problem.constraints.len()).collect(),
            components,
            tables: Vec::new(),
            stats: SolveStats {
                induced_width: Some(0),
                fill_edges: Some(0),
                ..SolveStats::default()
            },
        })
    }

    /// Interaction graph of the reduced problem.
    pub fn graph(&self) -> &InteractionGraph {
        &self.graph
    }

    pub fn remaining_constraints(&self) -> &[usize] {
        &self.constraints
    }

    pub fn remaining_components(&self) -> Vec<ComponentRef> {
        self.components.iter().map(|(r, _)| *r).collect()
    }

    /// Tables produced so far, in elimination order.
    pub fn tables(&self) -> &[LocalTable] {
        &self.tables
    }

    pub fn stats(&self) -> &SolveStats {
        &self.stats
    }

    /// Eliminates `block` and returns the table it produced. The table is
    /// installed as a new objective component of the reduced problem.
    pub fn eliminate_block(&mut self, block: &[VarId]) -> Result<&LocalTable> {
        if block.is_empty() {
            return Err(Error::InvalidPartition("empty block".into()));
        }
        if let Some(&v) = block.iter().find(|&&v| !self.graph.contains(v)) {
            return Err(Error::InvalidPartition(format!(
                "variable {v} is not in the reduced problem"
            )));
        }
        let in_block = |v: &VarId| block.contains(v);
        let p = self.problem;

        let (gathered_constraints, kept): (Vec<usize>, Vec<usize>) = self
            .constraints
            .iter()
            .partition(|&&i| p.constraints[i].scope().iter().any(in_block));
        self.constraints = kept;
        let (gathered, kept): (Vec<_>, Vec<_>) = std::mem::take(&mut self.components)
            .into_iter()
            .partition(|(_, f)| f.scope.iter().any(in_block));
        self.components = kept;

        let mut scope: BTreeSet<VarId> = BTreeSet::new();
        for &i in &gathered_constraints {
            scope.extend(p.constraints[i].scope());
        }
        for (_, f) in &gathered {
            scope.extend(f.scope.iter().copied());
        }
        scope.retain(|v| !in_block(v));
        let scope: Vec<VarId> = scope.into_iter().collect();
        debug_assert_eq!(
            scope,
            self.graph
                .neighborhood(&block.iter().copied().collect(), NeighborhoodKind::Open)
                .map(|s| s.into_iter().collect::<Vec<_>>())
                .unwrap_or_default()
        );

        let sub = LocalSubproblem {
            factors: gathered.iter().map(|(_, f)| f).collect(),
            constraints: gathered_constraints.iter().map(|&i| &p.constraints[i]).collect(),
            block: block.to_vec(),
            scope,
        };
        let (table, visited) = sub.solve(p);

        let (_, fill) = self.graph.eliminate_block_in_place(block)?;
        let stats = &mut self.stats;
        stats.fill_edges = Some(stats.fill_edges.unwrap_or(0) + fill.len());
        stats.induced_width = Some(stats.induced_width.unwrap_or(0).max(table.scope.len()));
        stats.max_table_entries = stats.max_table_entries.max(table.len());
        stats.tables += 1;
        stats.assignments_enumerated += visited;

        let index = self.tables.len();
        self.components
            .push((ComponentRef::Generated(index), Factor::from_table(p, &table)));
        self.tables.push(table);
        Ok(&self.tables[index])
    }

    /// Sum of the remaining components; meaningful once every variable is
    /// eliminated and only constant tables are left.
    fn remaining_constant(&self) -> Result<Score> {
        let mut total = Score::ZERO;
        for (r, f) in &self.components {
            if !f.scope.is_empty() {
                return Err(Error::Inconsistent(format!(
                    "component {r:?} still depends on variables {:?}",
                    f.scope
                )));
            }
            total = total + f.scope_free_value();
        }
        Ok(total)
    }
}

/// Outcome of the forward part.
#[derive(Debug, Clone)]
pub struct Forward {
    /// Global optimum, or [`Score::NegInf`] when infeasible.
    pub value: Score,
    pub tables: Vec<LocalTable>,
    pub stats: SolveStats,
}

/// Eliminates the blocks of `seq` in order.
pub fn solve_forward(p: &Problem, seq: &EliminationSequence) -> Result<Forward> {
    check_sequence(p, seq)?;
    let mut state = SolveState::new(p)?;
    for block in seq.blocks() {
        state.eliminate_block(block)?;
    }
    let value = state.remaining_constant()?;
    Ok(Forward {
        value,
        stats: state.stats.clone(),
        tables: state.tables,
    })
}

/// Reads an optimal assignment out of the forward tables, last table first.
pub fn solve_backward(n: usize, tables: &[LocalTable]) -> Result<Assignment> {
    let mut assignment = Assignment::empty(n);
    for table in tables.iter().rev() {
        let entry = table.entry_for(&assignment)?;
        let argmax = entry.argmax.as_ref().ok_or_else(|| {
            Error::Inconsistent(format!(
                "infeasible row reached while recovering block {:?}",
                table.block
            ))
        })?;
        for (&v, &x) in table.block.iter().zip(argmax) {
            assignment.set(v, x);
        }
    }
    if !assignment.is_total() {
        return Err(Error::Inconsistent("tables do not cover every variable".into()));
    }
    Ok(assignment)
}

/// Forward and backward parts combined.
pub fn solve(p: &Problem, seq: &EliminationSequence) -> Result<Solution> {
    let forward = solve_forward(p, seq)?;
    match forward.value {
        Score::NegInf => Ok(Solution::infeasible(forward.stats)),
        Score::Finite(value) => {
            let assignment = solve_backward(p.num_vars(), &forward.tables)?;
            debug_assert_eq!(p.objective_value(&assignment), Ok(value));
            debug_assert_eq!(p.check_feasible(&assignment), Ok(true));
            Ok(Solution::optimal(value, assignment, forward.stats))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Relation, Status};
    use crate::samples;

    fn seq1(blocks: &[&[usize]]) -> EliminationSequence {
        EliminationSequence::new(blocks.iter().map(|b| b.iter().map(|v| v - 1).collect()).collect()).unwrap()
    }

    fn constraints_only(buckets: &[Bucket]) -> Vec<Vec<&'static str>> {
        const LABELS: [&str; 4] = ["C1", "C2", "C3", "C4"];
        buckets
            .iter()
            .map(|b| b.constraints.iter().map(|&i| LABELS[i]).collect())
            .collect()
    }

    #[test]
    fn primer_buckets() {
        let p = samples::primer();
        let buckets = bucket_partition(&p, &seq1(&[&[6, 7], &[3], &[1, 4], &[2], &[5]])).unwrap();
        assert_eq!(
            constraints_only(&buckets),
            vec![vec!["C4"], vec!["C1", "C2"], vec![], vec!["C3"], vec![]]
        );
        // linear terms land with their own variable
        assert_eq!(
            buckets[2].components,
            vec![ComponentRef::Original(0), ComponentRef::Original(3)]
        );
    }

    #[test]
    fn single_block_bucket_holds_everything() {
        let p = samples::primer();
        let buckets = bucket_partition(&p, &EliminationSequence::new(vec![(0..7).collect()]).unwrap()).unwrap();
        assert_eq!(buckets.len(), 1);
        assert_eq!(buckets[0].constraints, vec![0, 1, 2, 3]);
        assert_eq!(buckets[0].components.len(), 7);
    }

    #[test]
    fn earliest_eliminated_variable_owns_the_constraint() {
        let mut p = Problem::new();
        p.add_binary("x2");
        p.add_binary("x5");
        p.add_constraint(vec![(0, 2), (1, 3)], Relation::Le, 4, "c");
        let buckets = bucket_partition(&p, &EliminationSequence::singletons([1, 0])).unwrap();
        assert_eq!(buckets[0].block, vec![1]);
        assert_eq!(buckets[0].constraints, vec![0]);
    }

    #[test]
    fn gathering_matches_buckets() {
        let p = samples::primer();
        let seq = seq1(&[&[6, 7], &[3], &[1, 4], &[2], &[5]]);
        let buckets = bucket_partition(&p, &seq).unwrap();
        let mut state = SolveState::new(&p).unwrap();
        for (block, bucket) in seq.blocks().iter().zip(&buckets) {
            let before = state.remaining_constraints().to_vec();
            state.eliminate_block(block).unwrap();
            let gathered: Vec<usize> = before
                .into_iter()
                .filter(|i| !state.remaining_constraints().contains(i))
                .collect();
            assert_eq!(gathered, bucket.constraints);
        }
    }

    #[test]
    fn first_step_table() {
        let p = samples::primer();
        let mut state = SolveState::new(&p).unwrap();
        let table = state.eliminate_block(&[5, 6]).unwrap();
        assert_eq!(table.scope, vec![2]);
        assert_eq!(table.get(&[0]).unwrap().value, Score::Finite(7));
        assert_eq!(table.get(&[0]).unwrap().argmax, Some(vec![1, 1]));
        assert_eq!(table.get(&[1]).unwrap().value, Score::Finite(6));
        assert_eq!(table.get(&[1]).unwrap().argmax, Some(vec![1, 0]));
        assert!(!state.graph().contains(5));
        assert!(state.eliminate_block(&[5]).is_err());
    }

    #[test]
    fn single_variable_problem() {
        let mut p = Problem::new();
        p.add_binary("x1");
        p.add_linear(0, 5);
        let s = solve(&p, &EliminationSequence::singletons([0])).unwrap();
        assert_eq!(s.value, Some(5));
        assert_eq!(s.assignment.unwrap().to_vec(), Some(vec![1]));
    }

    #[test]
    fn infeasible_cardinality_row() {
        let mut p = samples::primer();
        p.add_constraint((0..7).map(|v| (v, 1)).collect(), Relation::Ge, 8, "too many");
        let s = solve(&p, &EliminationSequence::singletons(0..7)).unwrap();
        assert_eq!(s.status, Status::Infeasible);
        assert_eq!(s.value, None);
    }

    #[test]
    fn disconnected_components_add_up() {
        let mut p = Problem::new();
        for i in 0..4 {
            p.add_binary(format!("v{i}"));
        }
        p.add_linear(0, 2);
        p.add_linear(3, 3);
        p.add_constraint(vec![(0, 1), (1, 1)], Relation::Le, 1, "a");
        p.add_constraint(vec![(2, 1), (3, 1)], Relation::Le, 1, "b");
        let s = solve(&p, &EliminationSequence::singletons([0, 1, 2, 3])).unwrap();
        assert_eq!(s.value, Some(5));
        assert_eq!(s.assignment.unwrap().to_vec(), Some(vec![1, 0, 0, 1]));
    }

    #[test]
    fn rejects_bad_input() {
        let p = samples::primer();
        assert!(solve(&p, &EliminationSequence::singletons(0..6)).is_err());
        let mut bad = samples::primer();
        bad.add_linear(11, 1);
        assert!(matches!(
            solve(&bad, &EliminationSequence::singletons(0..7)),
            Err(Error::InvalidProblem(_))
        ));
    }

    #[test]
    fn backward_reports_inconsistent_tables() {
        let p = samples::primer();
        let mut forward = solve_forward(&p, &EliminationSequence::singletons(0..7)).unwrap();
        forward.tables.remove(0);
        assert!(solve_backward(7, &forward.tables).is_err());
    }
}
