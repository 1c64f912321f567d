//! Local tables and the complete-enumeration kernel shared by the elimination
//! solver and the tree-decomposition solver.
//!
//! A local subproblem maximizes a sum of factors over the variables of a block,
//! subject to a set of linear constraints, separately for every assignment of
//! a scope. The result is a [`LocalTable`]: per scope assignment, the best
//! value (or [`Score::NegInf`] if no block assignment is feasible) and the
//! maximizing block assignment.

use std::fmt;
use std::ops::Add;

use crate::error::{Error, Result};
use crate::model::{Assignment, LinearConstraint, ObjectiveComponent, Odometer, Problem, VarId};

/// Objective value extended with an infeasibility sentinel that sorts below
/// every finite value and absorbs addition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Score {
    NegInf,
    Finite(i64),
}

impl Score {
    pub const ZERO: Score = Score::Finite(0);

    pub fn finite(self) -> Option<i64> {
        match self {
            Score::Finite(v) => Some(v),
            Score::NegInf => None,
        }
    }

    pub fn is_feasible(self) -> bool {
        matches!(self, Score::Finite(_))
    }
}

impl Add for Score {
    type Output = Score;

    fn add(self, rhs: Score) -> Score {
        match (self, rhs) {
            (Score::Finite(a), Score::Finite(b)) => Score::Finite(a + b),
            _ => Score::NegInf,
        }
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Score::Finite(v) => write!(f, "{v}"),
            Score::NegInf => f.write_str("-"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableEntry {
    pub value: Score,
    /// Maximizing block values, aligned with [`LocalTable::block`]; `None`
    /// exactly when `value` is [`Score::NegInf`].
    pub argmax: Option<Vec<i64>>,
}

/// Result of one elimination step: best local value and argmax per scope
/// assignment, stored densely in row-major order over the scope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalTable {
    pub block: Vec<VarId>,
    pub scope: Vec<VarId>,
    domains: Vec<Vec<i64>>,
    entries: Vec<TableEntry>,
}

impl LocalTable {
    pub fn entries(&self) -> &[TableEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn index_of(&self, scope_values: &[i64]) -> Option<usize> {
        if scope_values.len() != self.scope.len() {
            return None;
        }
        let mut index = 0;
        for (value, domain) in scope_values.iter().zip(&self.domains) {
            index = index * domain.len() + domain.binary_search(value).ok()?;
        }
        Some(index)
    }

    /// Entry for the given scope values (aligned with [`LocalTable::scope`]).
    pub fn get(&self, scope_values: &[i64]) -> Option<&TableEntry> {
        self.index_of(scope_values).map(|i| &self.entries[i])
    }

    /// Entry selected by the scope values found in `a`.
    pub fn entry_for(&self, a: &Assignment) -> Result<&TableEntry> {
        let key = self
            .scope
            .iter()
            .map(|&v| a.get(v).ok_or(Error::PartialAssignment(v)))
            .collect::<Result<Vec<_>>>()?;
        self.get(&key)
            .ok_or_else(|| Error::Inconsistent(format!("no table row for scope values {key:?}")))
    }

    /// `(scope values, entry)` pairs in row-major order.
    pub fn rows(&self) -> impl Iterator<Item = (Vec<i64>, &TableEntry)> + '_ {
        let mut odo = Odometer::new(self.domains.iter().map(Vec::len).collect());
        let mut done = false;
        self.entries.iter().map(move |entry| {
            debug_assert!(!done);
            let key = odo
                .digits()
                .iter()
                .zip(&self.domains)
                .map(|(&d, dom)| dom[d])
                .collect();
            done = !odo.advance();
            (key, entry)
        })
    }
}

/// Dense real-valued (or infeasible) function of a scope; the working form of
/// every objective component during a solve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Factor {
    pub(crate) scope: Vec<VarId>,
    strides: Vec<usize>,
    values: Vec<Score>,
}

impl Factor {
    fn new(p: &Problem, scope: Vec<VarId>, values: Vec<Score>) -> Self {
        let mut strides = vec![0; scope.len()];
        let mut stride = 1;
        for (i, &v) in scope.iter().enumerate().rev() {
            strides[i] = stride;
            stride *= p.domain(v).len();
        }
        debug_assert_eq!(stride, values.len());
        Self { scope, strides, values }
    }

    pub(crate) fn from_component(p: &Problem, component: &ObjectiveComponent) -> Result<Self> {
        match component {
            ObjectiveComponent::Linear { var, coef } => {
                let values = p.domain(*var).iter().map(|&x| Score::Finite(coef * x)).collect();
                Ok(Self::new(p, vec![*var], values))
            }
            ObjectiveComponent::Table(table) => {
                let domains: Vec<&[i64]> = table.scope.iter().map(|&v| p.domain(v)).collect();
                let mut odo = Odometer::new(domains.iter().map(|d| d.len()).collect());
                let mut values = Vec::new();
                loop {
                    let key: Vec<i64> = odo.digits().iter().zip(&domains).map(|(&i, d)| d[i]).collect();
                    let value = table
                        .entries
                        .get(&key)
                        .ok_or_else(|| Error::InvalidProblem(format!("table has no entry for {key:?}")))?;
                    values.push(Score::Finite(*value));
                    if !odo.advance() {
                        break;
                    }
                }
                Ok(Self::new(p, table.scope.clone(), values))
            }
        }
    }

    pub(crate) fn from_table(p: &Problem, table: &LocalTable) -> Self {
        Self::new(p, table.scope.clone(), table.entries.iter().map(|e| e.value).collect())
    }

    /// Value of a factor with an empty scope.
    pub(crate) fn scope_free_value(&self) -> Score {
        debug_assert!(self.scope.is_empty());
        self.values[0]
    }

    /// Value under the domain positions in `pos` (indexed by variable id).
    fn eval(&self, pos: &[usize]) -> Score {
        let index: usize = self.scope.iter().zip(&self.strides).map(|(&v, s)| pos[v] * s).sum();
        self.values[index]
    }
}

/// One bucket-style subproblem: maximize the sum of `factors` over `block`
/// subject to `constraints`, for each assignment of `scope`.
pub(crate) struct LocalSubproblem<'a> {
    pub(crate) factors: Vec<&'a Factor>,
    pub(crate) constraints: Vec<&'a LinearConstraint>,
    pub(crate) block: Vec<VarId>,
    pub(crate) scope: Vec<VarId>,
}

impl LocalSubproblem<'_> {
    /// Complete enumeration. Scope rows and block assignments are both visited
    /// in row-major order; the first maximizer found is kept, so ties resolve
    /// to the lexicographically smallest block assignment.
    pub(crate) fn solve(&self, p: &Problem) -> (LocalTable, u128) {
        let n = p.num_vars();
        let mut pos = vec![0usize; n];
        let mut vals = vec![0i64; n];
        let scope_domains: Vec<Vec<i64>> = self.scope.iter().map(|&v| p.domain(v).to_vec()).collect();
        let block_radices: Vec<usize> = self.block.iter().map(|&v| p.domain(v).len()).collect();
        let mut entries = Vec::with_capacity(scope_domains.iter().map(Vec::len).product());
        let mut visited = 0u128;

        let mut rows = Odometer::new(scope_domains.iter().map(Vec::len).collect());
        loop {
            for (i, &v) in self.scope.iter().enumerate() {
                pos[v] = rows.digits()[i];
                vals[v] = scope_domains[i][pos[v]];
            }
            let mut best = Score::NegInf;
            let mut argmax: Option<Vec<i64>> = None;
            let mut inner = Odometer::new(block_radices.clone());
            loop {
                visited += 1;
                for (i, &v) in self.block.iter().enumerate() {
                    pos[v] = inner.digits()[i];
                    vals[v] = p.domain(v)[pos[v]];
                }
                if self.constraints.iter().all(|c| c.is_satisfied_by(|v| vals[v])) {
                    let value = self.factors.iter().fold(Score::ZERO, |acc, f| acc + f.eval(&pos));
                    if value.is_feasible() && value > best {
                        best = value;
                        argmax = Some(self.block.iter().map(|&v| vals[v]).collect());
                    }
                }
                if !inner.advance() {
                    break;
                }
            }
            entries.push(TableEntry { value: best, argmax });
            if !rows.advance() {
                break;
            }
        }

        let table = LocalTable {
            block: self.block.clone(),
            scope: self.scope.clone(),
            domains: scope_domains,
            entries,
        };
        (table, visited)
    }
}
