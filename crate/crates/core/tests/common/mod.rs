//! Seeded random instances shared by the property and acceptance tests.

#![allow(dead_code)]

use localelim::{EliminationSequence, Problem, Relation};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Binary problem with 3..=12 variables, a linear objective and 1..=8 linear
/// constraints of arity 1..=4. Coefficients lie in [-5, 5].
pub fn random_instance(rng: &mut ChaCha8Rng) -> Problem {
    let n = rng.gen_range(3..=12);
    let mut p = Problem::new();
    for i in 0..n {
        p.add_binary(format!("x{}", i + 1));
    }
    for v in 0..n {
        let coef = rng.gen_range(-5..=5);
        if coef != 0 {
            p.add_linear(v, coef);
        }
    }
    // an occasional pairwise table keeps non-linear components in the mix
    if rng.gen_bool(0.25) {
        let mut scope: Vec<usize> = (0..n).collect();
        scope.shuffle(rng);
        scope.truncate(2);
        let entries: Vec<(Vec<i64>, i64)> = [[0, 0], [0, 1], [1, 0], [1, 1]]
            .iter()
            .map(|k| (k.to_vec(), rng.gen_range(-5..=5)))
            .collect();
        p.add_table(scope, entries);
    }
    let m = rng.gen_range(1..=8);
    for c in 0..m {
        let arity = rng.gen_range(1..=4.min(n));
        let mut vars: Vec<usize> = (0..n).collect();
        vars.shuffle(rng);
        vars.truncate(arity);
        vars.sort_unstable();
        let terms: Vec<(usize, i64)> = vars
            .into_iter()
            .map(|v| {
                let mut coef = 0;
                while coef == 0 {
                    coef = rng.gen_range(-5..=5);
                }
                (v, coef)
            })
            .collect();
        let relation = match rng.gen_range(0..10) {
            0 => Relation::Eq,
            1 | 2 => Relation::Ge,
            _ => Relation::Le,
        };
        // rhs within the attainable range of the row
        let lo: i64 = terms.iter().map(|&(_, a)| a.min(0)).sum();
        let hi: i64 = terms.iter().map(|&(_, a)| a.max(0)).sum();
        let rhs = rng.gen_range(lo..=hi);
        p.add_constraint(terms, relation, rhs, format!("C{}", c + 1));
    }
    p
}

pub fn random_order(n: usize, rng: &mut ChaCha8Rng) -> EliminationSequence {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    EliminationSequence::singletons(order)
}

/// Random ordered partition: a shuffled order cut at random points.
pub fn random_partition(n: usize, rng: &mut ChaCha8Rng) -> EliminationSequence {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for (i, v) in order.into_iter().enumerate() {
        if i == 0 || rng.gen_bool(0.5) {
            blocks.push(Vec::new());
        }
        blocks.last_mut().unwrap().push(v);
    }
    EliminationSequence::new(blocks).unwrap()
}
