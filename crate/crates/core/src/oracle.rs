//! Exhaustive reference solver.

use crate::error::{Error, Result};
use crate::model::{Assignment, Odometer, Problem, Solution, SolveStats};

/// Default limit on the number of assignments the oracle will enumerate.
pub const DEFAULT_CAP: u128 = 1 << 24;

pub fn brute_force(p: &Problem) -> Result<Solution> {
    brute_force_with_cap(p, DEFAULT_CAP)
}

/// Enumerates every total assignment in lexicographic order (first variable
/// slowest) and keeps the first maximizer among the feasible ones.
pub fn brute_force_with_cap(p: &Problem, cap: u128) -> Result<Solution> {
    if let Some(violation) = p.validate().first() {
        return Err(Error::InvalidProblem(violation.to_string()));
    }
    let size = p.search_space_size();
    if size > cap {
        return Err(Error::CapExceeded { size, cap });
    }

    let mut odo = Odometer::new(p.variables.iter().map(|v| v.domain.len()).collect());
    let mut best: Option<(i64, Assignment)> = None;
    loop {
        let a = Assignment::from_values(odo.digits().iter().enumerate().map(|(v, &d)| p.domain(v)[d]));
        if p.check_feasible(&a)? {
            let value = p.objective_value(&a)?;
            if best.as_ref().is_none_or(|(b, _)| value > *b) {
                best = Some((value, a));
            }
        }
        if !odo.advance() {
            break;
        }
    }

    let stats = SolveStats {
        assignments_enumerated: size,
        ..SolveStats::default()
    };
    Ok(match best {
        Some((value, a)) => Solution::optimal(value, a, stats),
        None => Solution::infeasible(stats),
    })
}
