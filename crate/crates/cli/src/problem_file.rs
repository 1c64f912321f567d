//! JSON problem documents.
//!
//! ```json
//! {
//!   "version": 1,
//!   "variables": [{ "name": "x1" }, { "name": "y", "domain": [0, 1, 2] }],
//!   "objective": [
//!     { "kind": "linear", "var": "x1", "coef": 2 },
//!     { "kind": "table", "scope": ["x1", "y"],
//!       "entries": [{ "values": [0, 0], "value": 3 }, ...] }
//!   ],
//!   "constraints": [
//!     { "terms": [{ "var": "x1", "coef": 3 }, { "var": "y", "coef": 1 }],
//!       "relation": "<=", "rhs": 4, "label": "C1" }
//!   ]
//! }
//! ```
//!
//! `domain` defaults to `[0, 1]` and `label` to `C<k>` (1-based position).
//! Tables must list every assignment of their scope exactly once.

use std::collections::{BTreeMap, HashMap};

use localelim::{ObjectiveComponent, Problem, Relation, TableComponent, VarId};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemDoc {
    version: u32,
    variables: Vec<VariableDoc>,
    #[serde(default)]
    objective: Vec<ComponentDoc>,
    #[serde(default)]
    constraints: Vec<ConstraintDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VariableDoc {
    name: String,
    #[serde(default = "binary_domain")]
    domain: Vec<i64>,
}

fn binary_domain() -> Vec<i64> {
    vec![0, 1]
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum ComponentDoc {
    Linear { var: String, coef: i64 },
    Table { scope: Vec<String>, entries: Vec<RowDoc> },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RowDoc {
    values: Vec<i64>,
    value: i64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintDoc {
    terms: Vec<TermDoc>,
    relation: String,
    rhs: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    var: String,
    coef: i64,
}

/// Converts a `serde_json` error into one carrying the origin and position.
pub(crate) fn syntax_error(origin: &str, e: serde_json::Error) -> CliError {
    let mut message = e.to_string();
    let suffix = format!(" at line {} column {}", e.line(), e.column());
    if let Some(stripped) = message.strip_suffix(&suffix) {
        message = stripped.to_string();
    }
    CliError::Syntax {
        origin: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message,
    }
}

struct Resolver<'a> {
    origin: &'a str,
    ids: HashMap<&'a str, VarId>,
}

impl Resolver<'_> {
    fn field(&self, field: String, message: impl Into<String>) -> CliError {
        CliError::Field {
            origin: self.origin.to_string(),
            field,
            message: message.into(),
        }
    }

    fn var(&self, name: &str, field: impl FnOnce() -> String) -> Result<VarId> {
        self.ids
            .get(name)
            .copied()
            .ok_or_else(|| self.field(field(), format!("unknown variable '{name}'")))
    }
}

/// Parses and validates a problem document. `origin` names the source in
/// error messages.
pub fn parse_problem(text: &str, origin: &str) -> Result<Problem> {
    let doc: ProblemDoc = serde_json::from_str(text).map_err(|e| syntax_error(origin, e))?;
    let mut r = Resolver {
        origin,
        ids: HashMap::new(),
    };
    if doc.version != FORMAT_VERSION {
        return Err(r.field(
            "version".into(),
            format!("unsupported version {} (expected {FORMAT_VERSION})", doc.version),
        ));
    }

    let mut p = Problem::new();
    for (i, v) in doc.variables.iter().enumerate() {
        if r.ids.insert(v.name.as_str(), i).is_some() {
            return Err(r.field(format!("variables[{i}].name"), format!("duplicate name '{}'", v.name)));
        }
        p.add_variable(v.name.clone(), v.domain.clone());
    }

    for (k, c) in doc.objective.iter().enumerate() {
        let component = match c {
            ComponentDoc::Linear { var, coef } => ObjectiveComponent::Linear {
                var: r.var(var, || format!("objective[{k}].var"))?,
                coef: *coef,
            },
            ComponentDoc::Table { scope, entries } => {
                let scope = scope
                    .iter()
                    .enumerate()
                    .map(|(j, name)| r.var(name, || format!("objective[{k}].scope[{j}]")))
                    .collect::<Result<Vec<_>>>()?;
                let mut rows = BTreeMap::new();
                for (j, row) in entries.iter().enumerate() {
                    let field = || format!("objective[{k}].entries[{j}].values");
                    if row.values.len() != scope.len() {
                        return Err(r.field(
                            field(),
                            format!("expected {} values, found {}", scope.len(), row.values.len()),
                        ));
                    }
                    if rows.insert(row.values.clone(), row.value).is_some() {
                        return Err(r.field(field(), format!("duplicate row {:?}", row.values)));
                    }
                }
                ObjectiveComponent::Table(TableComponent { scope, entries: rows })
            }
        };
        p.objective.push(component);
    }

    for (i, c) in doc.constraints.iter().enumerate() {
        let terms = c
            .terms
            .iter()
            .enumerate()
            .map(|(j, t)| Ok((r.var(&t.var, || format!("constraints[{i}].terms[{j}].var"))?, t.coef)))
            .collect::<Result<Vec<_>>>()?;
        let relation: Relation = c
            .relation
            .parse()
            .map_err(|e: String| r.field(format!("constraints[{i}].relation"), e))?;
        let label = c.label.clone().unwrap_or_else(|| format!("C{}", i + 1));
        p.add_constraint(terms, relation, c.rhs, label);
    }

    let violations = p.validate();
    if !violations.is_empty() {
        let message = violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ");
        return Err(CliError::Invalid {
            origin: origin.to_string(),
            message,
        });
    }
    Ok(p)
}

/// Canonical document for `p`: every field written out, table rows sorted.
pub fn export_problem(p: &Problem) -> String {
    let name = |v: VarId| p.name(v).to_string();
    let doc = ProblemDoc {
        version: FORMAT_VERSION,
        variables: p
            .variables
            .iter()
            .map(|v| VariableDoc {
                name: v.name.clone(),
                domain: v.domain.clone(),
            })
            .collect(),
        objective: p
            .objective
            .iter()
            .map(|c| match c {
                ObjectiveComponent::Linear { var, coef } => ComponentDoc::Linear {
                    var: name(*var),
                    coef: *coef,
                },
                ObjectiveComponent::Table(t) => ComponentDoc::Table {
                    scope: t.scope.iter().map(|&v| name(v)).collect(),
                    entries: t
                        .entries
                        .iter()
                        .map(|(values, &value)| RowDoc {
                            values: values.clone(),
                            value,
                        })
                        .collect(),
                },
            })
            .collect(),
        constraints: p
            .constraints
            .iter()
            .map(|c| ConstraintDoc {
                terms: c
                    .terms
                    .iter()
                    .map(|&(v, coef)| TermDoc { var: name(v), coef })
                    .collect(),
                relation: c.relation.symbol().to_string(),
                rhs: c.rhs,
                label: Some(c.label.clone()),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("problem documents serialize");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use localelim::samples;

    #[test]
    fn defaults_apply() {
        let p = parse_problem(
            r#"{"version": 1, "variables": [{"name": "a"}, {"name": "b", "domain": [-1, 2]}],
                "constraints": [{"terms": [{"var": "a", "coef": 1}], "relation": ">=", "rhs": 0}]}"#,
            "t",
        )
        .unwrap();
        assert_eq!(p.domain(0), &[0, 1]);
        assert_eq!(p.domain(1), &[-1, 2]);
        assert_eq!(p.constraints[0].label, "C1");
        assert!(p.objective.is_empty());
    }

    #[test]
    fn round_trip() {
        for p in [samples::primer(), samples::unconstrained_tables(), samples::chain(5, true)] {
            let text = export_problem(&p);
            assert_eq!(parse_problem(&text, "t").unwrap(), p);
        }
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_problem("{\n  \"version\": 1,\n  \"variables\": [\n}", "bad.json").unwrap_err();
        match err {
            CliError::Syntax { line, ref origin, .. } => {
                assert_eq!(line, 4);
                assert_eq!(origin, "bad.json");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn field_errors_name_the_field() {
        let cases = [
            (r#"{"version": 2, "variables": [{"name": "a"}]}"#, "version"),
            (
                r#"{"version": 1, "variables": [{"name": "a"}, {"name": "a"}]}"#,
                "variables[1].name",
            ),
            (
                r#"{"version": 1, "variables": [{"name": "a"}],
                    "constraints": [{"terms": [{"var": "a", "coef": 1}], "relation": "<", "rhs": 0}]}"#,
                "constraints[0].relation",
            ),
            (
                r#"{"version": 1, "variables": [{"name": "a"}],
                    "objective": [{"kind": "linear", "var": "z", "coef": 1}]}"#,
                "objective[0].var",
            ),
            (
                r#"{"version": 1, "variables": [{"name": "a"}],
                    "objective": [{"kind": "table", "scope": ["a"], "entries": [{"values": [0, 1], "value": 1}]}]}"#,
                "objective[0].entries[0].values",
            ),
        ];
        for (text, expected) in cases {
            match parse_problem(text, "t") {
                Err(CliError::Field { field, .. }) => assert_eq!(field, expected),
                other => panic!("{expected}: unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn unknown_fields_and_incomplete_tables_are_rejected() {
        assert!(matches!(
            parse_problem(r#"{"version": 1, "variables": [{"name": "a", "dom": [0]}]}"#, "t"),
            Err(CliError::Syntax { .. })
        ));
        let incomplete = r#"{"version": 1, "variables": [{"name": "a"}],
            "objective": [{"kind": "table", "scope": ["a"], "entries": [{"values": [0], "value": 1}]}]}"#;
        assert!(matches!(parse_problem(incomplete, "t"), Err(CliError::Invalid { .. })));
    }
}
