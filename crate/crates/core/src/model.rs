//! Problem representation: variables over finite integer domains, a separable
//! objective to maximize and linear constraints.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Dense variable index, `0..n`.
pub type VarId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub id: VarId,
    pub name: String,
    /// Strictly increasing list of admissible values.
    pub domain: Vec<i64>,
}

impl Variable {
    /// Position of `value` in the domain, if present.
    pub fn position(&self, value: i64) -> Option<usize> {
        self.domain.binary_search(&value).ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }

    pub fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Relation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "<=" => Ok(Relation::Le),
            "=" | "==" => Ok(Relation::Eq),
            ">=" => Ok(Relation::Ge),
            other => Err(format!(
                "unsupported relation {other:?} (expected one of \"<=\", \"=\", \">=\")"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    pub terms: Vec<(VarId, i64)>,
    pub relation: Relation,
    pub rhs: i64,
    pub label: String,
}

impl LinearConstraint {
    pub fn scope(&self) -> Vec<VarId> {
        self.terms.iter().map(|&(v, _)| v).collect()
    }

    pub fn mentions(&self, var: VarId) -> bool {
        self.terms.iter().any(|&(v, _)| v == var)
    }

    /// Evaluates the constraint with `value_of` supplying each term's value.
    pub fn is_satisfied_by(&self, mut value_of: impl FnMut(VarId) -> i64) -> bool {
        let lhs: i64 = self.terms.iter().map(|&(v, c)| c * value_of(v)).sum();
        self.relation.holds(lhs, self.rhs)
    }
}

/// Objective function given by an explicit value for every assignment of its
/// scope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableComponent {
    pub scope: Vec<VarId>,
    /// Keys are value tuples aligned with `scope`.
    pub entries: BTreeMap<Vec<i64>, i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObjectiveComponent {
    Linear { var: VarId, coef: i64 },
    Table(TableComponent),
}

impl ObjectiveComponent {
    pub fn scope(&self) -> Vec<VarId> {
        match self {
            ObjectiveComponent::Linear { var, .. } => vec![*var],
            ObjectiveComponent::Table(t) => t.scope.clone(),
        }
    }

    pub fn mentions(&self, var: VarId) -> bool {
        match self {
            ObjectiveComponent::Linear { var: v, .. } => *v == var,
            ObjectiveComponent::Table(t) => t.scope.contains(&var),
        }
    }
}

/// A maximization problem over finite domains.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Problem {
    pub variables: Vec<Variable>,
    pub objective: Vec<ObjectiveComponent>,
    pub constraints: Vec<LinearConstraint>,
}

/// One failed invariant found by [`Problem::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoVariables,
    IdMismatch { position: usize, id: VarId },
    EmptyDomain(String),
    UnsortedDomain(String),
    DuplicateName(String),
    UnknownVariable { context: String, var: VarId },
    DuplicateScopeVariable { context: String, var: VarId },
    EmptyConstraint(String),
    IncompleteTable { component: usize, missing: usize },
    InvalidTableEntry { component: usize, key: Vec<i64> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoVariables => write!(f, "problem has no variables"),
            Violation::IdMismatch { position, id } => {
                write!(f, "variable at position {position} carries id {id}")
            }
            Violation::EmptyDomain(name) => write!(f, "variable {name} has an empty domain"),
            Violation::UnsortedDomain(name) => {
                write!(f, "domain of variable {name} is not strictly increasing")
            }
            Violation::DuplicateName(name) => write!(f, "duplicate variable name {name}"),
            Violation::UnknownVariable { context, var } => {
                write!(f, "{context} references unknown variable {var}")
            }
            Violation::DuplicateScopeVariable { context, var } => {
                write!(f, "{context} mentions variable {var} more than once")
            }
            Violation::EmptyConstraint(label) => write!(f, "constraint {label} has no terms"),
            Violation::IncompleteTable { component, missing } => write!(
                f,
                "table component {component} is missing {missing} assignment(s) of its scope"
            ),
            Violation::InvalidTableEntry { component, key } => write!(
                f,
                "table component {component} has entry {key:?} outside its scope's domains"
            ),
        }
    }
}

impl Problem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(&mut self, name: impl Into<String>, domain: Vec<i64>) -> VarId {
        let id = self.variables.len();
        self.variables.push(Variable {
            id,
            name: name.into(),
            domain,
        });
        id
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> VarId {
        self.add_variable(name, vec![0, 1])
    }

    pub fn add_linear(&mut self, var: VarId, coef: i64) {
        self.objective.push(ObjectiveComponent::Linear { var, coef });
    }

    pub fn add_table(&mut self, scope: Vec<VarId>, entries: impl IntoIterator<Item = (Vec<i64>, i64)>) {
        self.objective.push(ObjectiveComponent::Table(TableComponent {
            scope,
            entries: entries.into_iter().collect(),
        }));
    }

    pub fn add_constraint(
        &mut self,
        terms: Vec<(VarId, i64)>,
        relation: Relation,
        rhs: i64,
        label: impl Into<String>,
    ) {
        self.constraints.push(LinearConstraint {
            terms,
            relation,
            rhs,
            label: label.into(),
        });
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn name(&self, var: VarId) -> &str {
        &self.variables[var].name
    }

    pub fn domain(&self, var: VarId) -> &[i64] {
        &self.variables[var].domain
    }

    /// Number of total assignments, saturating at `u128::MAX`.
    pub fn search_space_size(&self) -> u128 {
        self.variables
            .iter()
            .fold(1u128, |acc, v| acc.saturating_mul(v.domain.len() as u128))
    }

    /// Lists every violated structural invariant; empty iff the problem is
    /// well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut report = Vec::new();
        let n = self.variables.len();
        if n == 0 {
            report.push(Violation::NoVariables);
        }
        let mut names = BTreeSet::new();
        for (position, v) in self.variables.iter().enumerate() {
            if v.id != position {
                report.push(Violation::IdMismatch { position, id: v.id });
            }
            if v.domain.is_empty() {
                report.push(Violation::EmptyDomain(v.name.clone()));
            } else if v.domain.windows(2).any(|w| w[0] >= w[1]) {
                report.push(Violation::UnsortedDomain(v.name.clone()));
            }
            if !names.insert(v.name.as_str()) {
                report.push(Violation::DuplicateName(v.name.clone()));
            }
        }

        let check_scope = |context: String, scope: &[VarId], report: &mut Vec<Violation>| {
            let mut ok = true;
            let mut seen = BTreeSet::new();
            for &var in scope {
                if var >= n {
                    report.push(Violation::UnknownVariable {
                        context: context.clone(),
                        var,
                    });
                    ok = false;
                } else if !seen.insert(var) {
                    report.push(Violation::DuplicateScopeVariable {
                        context: context.clone(),
                        var,
                    });
                    ok = false;
                }
            }
            ok
        };

        for (k, component) in self.objective.iter().enumerate() {
            let context = format!("objective component {k}");
            match component {
                ObjectiveComponent::Linear { var, .. } => {
                    check_scope(context, &[*var], &mut report);
                }
                ObjectiveComponent::Table(table) => {
                    if !check_scope(context, &table.scope, &mut report) {
                        continue;
                    }
                    let domains: Vec<&[i64]> = table.scope.iter().map(|&v| self.domain(v)).collect();
                    if let Some(key) = table.entries.keys().find(|key| {
                        key.len() != domains.len()
                            || key.iter().zip(&domains).any(|(x, d)| d.binary_search(x).is_err())
                    }) {
                        report.push(Violation::InvalidTableEntry {
                            component: k,
                            key: key.clone(),
                        });
                        continue;
                    }
                    let expected = domains.iter().map(|d| d.len()).product::<usize>();
                    if table.entries.len() < expected {
                        report.push(Violation::IncompleteTable {
                            component: k,
                            missing: expected - table.entries.len(),
                        });
                    }
                }
            }
        }

        for (i, c) in self.constraints.iter().enumerate() {
            let label = if c.label.is_empty() {
                format!("#{i}")
            } else {
                c.label.clone()
            };
            if c.terms.is_empty() {
                report.push(Violation::EmptyConstraint(label));
                continue;
            }
            check_scope(format!("constraint {label}"), &c.scope(), &mut report);
        }
        report
    }

    fn value_checked(&self, a: &Assignment, var: VarId) -> Result<i64> {
        let value = a.get(var).ok_or(Error::PartialAssignment(var))?;
        if self.variables[var].position(value).is_none() {
            return Err(Error::OutOfDomain { var, value });
        }
        Ok(value)
    }

    fn check_total(&self, a: &Assignment) -> Result<()> {
        for var in 0..self.num_vars() {
            self.value_checked(a, var)?;
        }
        Ok(())
    }

    /// Sum of every objective component under a total assignment.
    pub fn objective_value(&self, a: &Assignment) -> Result<i64> {
        self.check_total(a)?;
        let mut total = 0i64;
        for component in &self.objective {
            total += match component {
                ObjectiveComponent::Linear { var, coef } => coef * self.value_checked(a, *var)?,
                ObjectiveComponent::Table(table) => {
                    let key = table
                        .scope
                        .iter()
                        .map(|&v| self.value_checked(a, v))
                        .collect::<Result<Vec<_>>>()?;
                    *table.entries.get(&key).ok_or_else(|| {
                        Error::InvalidProblem(format!("table has no entry for {key:?}"))
                    })?
                }
            };
        }
        Ok(total)
    }

    /// True iff every constraint holds under a total assignment.
    pub fn check_feasible(&self, a: &Assignment) -> Result<bool> {
        self.check_total(a)?;
        Ok(self
            .constraints
            .iter()
            .all(|c| c.is_satisfied_by(|v| a.get(v).unwrap_or_default())))
    }
}

/// Values for (some of) the variables of a problem, indexed by [`VarId`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    values: Vec<Option<i64>>,
}

impl Assignment {
    pub fn empty(n: usize) -> Self {
        Self {
            values: vec![None; n],
        }
    }

    pub fn from_values(values: impl IntoIterator<Item = i64>) -> Self {
        Self {
            values: values.into_iter().map(Some).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, var: VarId) -> Option<i64> {
        self.values.get(var).copied().flatten()
    }

    pub fn set(&mut self, var: VarId, value: i64) {
        if var >= self.values.len() {
            self.values.resize(var + 1, None);
        }
        self.values[var] = Some(value);
    }

    pub fn is_total(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }

    /// The plain value vector when every variable is assigned.
    pub fn to_vec(&self) -> Option<Vec<i64>> {
        self.values.iter().copied().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
}

/// Counters reported alongside a solve. Fields a method does not produce stay
/// `None`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub induced_width: Option<usize>,
    pub fill_edges: Option<usize>,
    pub max_table_entries: usize,
    pub tables: usize,
    pub bag_count: Option<usize>,
    pub assignments_enumerated: u128,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub status: Status,
    pub value: Option<i64>,
    pub assignment: Option<Assignment>,
    pub stats: SolveStats,
}

impl Solution {
    pub fn optimal(value: i64, assignment: Assignment, stats: SolveStats) -> Self {
        Self {
            status: Status::Optimal,
            value: Some(value),
            assignment: Some(assignment),
            stats,
        }
    }

    pub fn infeasible(stats: SolveStats) -> Self {
        Self {
            status: Status::Infeasible,
            value: None,
            assignment: None,
            stats,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }
}

/// Mixed-radix counter over domain positions; the last digit moves fastest.
#[derive(Debug, Clone)]
pub(crate) struct Odometer {
    radices: Vec<usize>,
    digits: Vec<usize>,
}

impl Odometer {
    pub(crate) fn new(radices: Vec<usize>) -> Self {
        let digits = vec![0; radices.len()];
        Self { radices, digits }
    }

    pub(crate) fn digits(&self) -> &[usize] {
        &self.digits
    }

    /// Advances to the next combination; false once the counter wraps.
    pub(crate) fn advance(&mut self) -> bool {
        for i in (0..self.digits.len()).rev() {
            self.digits[i] += 1;
            if self.digits[i] < self.radices[i] {
                return true;
            }
            self.digits[i] = 0;
        }
        false
    }
}
