//! Exhaustive check that arbitrary row/column sets never let `ℓ`
//! anti-diagonals cover more points than intervals of the same sizes.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{binomial, Budget};
use crate::error::{Error, Result};
use crate::extremal::h_interval;

/// Row set `A`, column set `B` and diagonal budget `ℓ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SetPairInstance {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    pub ell: usize,
}

impl SetPairInstance {
    /// Sorts and validates both sets.
    pub fn new(mut a: Vec<i64>, mut b: Vec<i64>, ell: usize) -> Result<SetPairInstance> {
        for (name, set) in [("A", &mut a), ("B", &mut b)] {
            if set.is_empty() {
                return Err(Error::InvalidArgument(format!("{name} must be nonempty")));
            }
            set.sort_unstable();
            if set.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidArgument(format!("{name} has duplicates")));
            }
        }
        Ok(SetPairInstance { a, b, ell })
    }

    /// Multiplicity of every occupied diagonal value `x + y`.
    pub fn diagonal_multiplicities(&self) -> BTreeMap<i64, usize> {
        let mut counts = BTreeMap::new();
        for &x in &self.a {
            for &y in &self.b {
                *counts.entry(x + y).or_insert(0) += 1;
            }
        }
        counts
    }
}

/// `h(A, B, ℓ)` by trying every choice of `ℓ` occupied diagonals.
pub fn h_sets_brute(inst: &SetPairInstance, budget: Budget) -> Result<usize> {
    let counts: Vec<usize> = inst.diagonal_multiplicities().into_values().collect();
    let pick = inst.ell.min(counts.len());
    budget.check(binomial(counts.len() as u64, pick as u64))?;
    Ok(best_choice(&counts, pick, 0))
}

fn best_choice(counts: &[usize], pick: usize, from: usize) -> usize {
    if pick == 0 {
        return 0;
    }
    (from..=counts.len() - pick).map(|i| counts[i] + best_choice(counts, pick - 1, i + 1)).max().unwrap_or(0)
}

/// `h(A, B, ℓ)` as the sum of the `ℓ` largest diagonal multiplicities.
pub fn h_sets_multiplicity(inst: &SetPairInstance) -> usize {
    let mut counts: Vec<usize> = inst.diagonal_multiplicities().into_values().collect();
    counts.sort_unstable_by(|p, q| q.cmp(p));
    counts.iter().take(inst.ell).sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CounterexampleKind {
    /// `h(A, B, ℓ) > h([|A|], [|B|], ℓ)`.
    ExceedsInterval,
    /// The two evaluation routes disagreed.
    RouteMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub kind: CounterexampleKind,
    pub instance: SetPairInstance,
    pub h_sets: usize,
    pub h_interval: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CompressionParams {
    pub max_coord: i64,
    pub max_size: usize,
    pub max_ell: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompressionReport {
    pub instances_checked: u64,
    pub counterexamples: Vec<Counterexample>,
    pub max_params: CompressionParams,
}

impl CompressionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// Nonempty subsets of `1..=max_coord` with at most `max_size` elements, in
/// lexicographic order.
fn subsets(max_coord: i64, max_size: usize) -> Vec<Vec<i64>> {
    fn extend(cur: &mut Vec<i64>, from: i64, max_coord: i64, max_size: usize, out: &mut Vec<Vec<i64>>) {
        for v in from..=max_coord {
            cur.push(v);
            out.push(cur.clone());
            if cur.len() < max_size {
                extend(cur, v + 1, max_coord, max_size, out);
            }
            cur.pop();
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), 1, max_coord, max_size, &mut out);
    out
}

/// Checks `h(A, B, ℓ) ≤ h([|A|], [|B|], ℓ)` for all `A, B ⊆ {1..max_coord}`
/// of size at most `max_size` and all `ℓ ≤ max_ell`, comparing both
/// evaluation routes on every instance.
///
/// Pairs `(A, B)` are taken up to simultaneous translation: the diagonal
/// multiset only shifts, so only pairs with `min(A ∪ B) = 1` are visited.
pub fn verify_compression(
    max_coord: i64,
    max_size: usize,
    max_ell: usize,
    budget: Budget,
) -> Result<CompressionReport> {
    if max_coord < 1 || max_size == 0 {
        return Err(Error::InvalidArgument("max_coord and max_size must be positive".into()));
    }
    let all = subsets(max_coord, max_size);
    let pairs = (all.len() as u128) * (all.len() as u128) * (max_ell as u128 + 1);
    budget.check(pairs)?;

    let per_a: Vec<(u64, Vec<Counterexample>)> = all
        .par_iter()
        .map(|a| {
            let mut checked = 0u64;
            let mut found = Vec::new();
            for b in &all {
                if a[0].min(b[0]) != 1 {
                    continue;
                }
                for ell in 0..=max_ell {
                    let inst = SetPairInstance { a: a.clone(), b: b.clone(), ell };
                    let literal = h_sets_brute(&inst, Budget::UNLIMITED).expect("unlimited");
                    let shortcut = h_sets_multiplicity(&inst);
                    let interval = h_interval(a.len() as u64, b.len() as u64, ell as u64);
                    checked += 1;
                    if literal != shortcut {
                        found.push(Counterexample {
                            kind: CounterexampleKind::RouteMismatch,
                            instance: inst.clone(),
                            h_sets: literal,
                            h_interval: interval,
                        });
                    }
                    if literal.max(shortcut) as u64 > interval {
                        found.push(Counterexample {
                            kind: CounterexampleKind::ExceedsInterval,
                            instance: inst,
                            h_sets: literal.max(shortcut),
                            h_interval: interval,
                        });
                    }
                }
            }
            (checked, found)
        })
        .collect();

    let mut report = CompressionReport {
        instances_checked: 0,
        counterexamples: Vec::new(),
        max_params: CompressionParams { max_coord, max_size, max_ell },
    };
    for (checked, found) in per_a {
        report.instances_checked += checked;
        report.counterexamples.extend(found);
    }
    Ok(report)
}
