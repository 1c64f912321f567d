//! Small reference instances used throughout the tests and the CLI fixtures.

use crate::model::{Problem, Relation};

fn binaries(p: &mut Problem, n: usize) {
    for i in 1..=n {
        p.add_binary(format!("x{i}"));
    }
}

/// Seven binary variables, linear objective `2 3 1 5 4 6 1`, four knapsack rows
/// C1..C4. Optimum 18 at `(1,0,0,1,1,1,1)`.
pub fn primer() -> Problem {
    let mut p = Problem::new();
    binaries(&mut p, 7);
    for (var, coef) in [2, 3, 1, 5, 4, 6, 1].into_iter().enumerate() {
        p.add_linear(var, coef);
    }
    p.add_constraint(vec![(0, 3), (1, 4), (2, 1)], Relation::Le, 6, "C1");
    p.add_constraint(vec![(1, 2), (2, 3), (3, 3)], Relation::Le, 5, "C2");
    p.add_constraint(vec![(1, 2), (4, 3)], Relation::Le, 4, "C3");
    p.add_constraint(vec![(2, 2), (5, 3), (6, 2)], Relation::Le, 5, "C4");
    p
}

fn table3(values: [i64; 8]) -> Vec<(Vec<i64>, i64)> {
    values
        .into_iter()
        .enumerate()
        .map(|(row, v)| {
            let row = row as i64;
            (vec![(row >> 2) & 1, (row >> 1) & 1, row & 1], v)
        })
        .collect()
}

/// Unconstrained sum `f1(x1,x2,x3) + f2(x2,x3,x4) + f3(x2,x5) + f4(x3,x6,x7)`
/// with the same interaction graph as [`primer`]. Optimum 20 at
/// `(0,0,1,0,0,1,1)`.
pub fn unconstrained_tables() -> Problem {
    let mut p = Problem::new();
    binaries(&mut p, 7);
    p.add_table(vec![0, 1, 2], table3([2, 3, 4, 0, 5, 2, 4, 1]));
    p.add_table(vec![1, 2, 3], table3([3, 1, 5, 2, 4, 1, 3, 0]));
    p.add_table(
        vec![1, 4],
        [(vec![0, 0], 6), (vec![0, 1], 2), (vec![1, 0], 4), (vec![1, 1], 5)],
    );
    p.add_table(vec![2, 5, 6], table3([5, 2, 3, 4, 2, 1, 3, 6]));
    p
}

/// Serial chain `sum_i f_i(x_i, x_{i+1})` over `n` binary variables with
/// pairwise tables `f_i(a, b) = (i + 1) * a - i * b + 2 * a * b`, plus the
/// packing rows `x_i + x_{i+1} <= 1` when `packing` is set.
pub fn chain(n: usize, packing: bool) -> Problem {
    let mut p = Problem::new();
    binaries(&mut p, n);
    for i in 0..n.saturating_sub(1) {
        let k = i as i64;
        let entries = [(0, 0), (0, 1), (1, 0), (1, 1)]
            .into_iter()
            .map(|(a, b)| (vec![a, b], (k + 1) * a - k * b + 2 * a * b));
        p.add_table(vec![i, i + 1], entries);
    }
    if packing {
        for i in 0..n.saturating_sub(1) {
            p.add_constraint(vec![(i, 1), (i + 1, 1)], Relation::Le, 1, format!("P{}", i + 1));
        }
    }
    p
}
