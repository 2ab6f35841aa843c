use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::config::Budget;
use crate::error::{Error, Result};
use crate::groups::{Elem, GroupSpec};
use crate::triples::{Pair, TripleSystem};

/// Role of one coordinate of `(Z_q × Z_q)^m`. The derived order (wildcards
/// first, then fixed symbols lexicographically) is the search order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Label {
    Wild(usize),
    Fixed(u32, u32),
}

/// A `d`-dimensional combinatorial subspace of `(Z_q × Z_q)^m`, one label per
/// coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SubspacePartition {
    pub q: u32,
    pub d: usize,
    pub labels: Vec<Label>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftAndBasis {
    pub a_hat: Elem,
    pub b_hat: Elem,
    pub basis: Vec<Elem>,
}

impl SubspacePartition {
    pub fn new(q: u32, d: usize, labels: Vec<Label>) -> Result<SubspacePartition> {
        let part = SubspacePartition { q, d, labels };
        part.validate()?;
        Ok(part)
    }

    pub fn from_blocks(
        q: u32,
        m: usize,
        fixed: &BTreeMap<(u32, u32), BTreeSet<usize>>,
        wild: &[BTreeSet<usize>],
    ) -> Result<SubspacePartition> {
        let mut labels: Vec<Option<Label>> = vec![None; m];
        let blocks = fixed
            .iter()
            .map(|(&(e1, e2), block)| (Label::Fixed(e1, e2), block))
            .chain(wild.iter().enumerate().map(|(j, block)| (Label::Wild(j), block)));
        for (label, block) in blocks {
            for &i in block {
                match labels.get_mut(i) {
                    Some(slot @ None) => *slot = Some(label),
                    Some(Some(_)) => return Err(Error::InvalidArgument(format!("coordinate {i} is in two blocks"))),
                    None => return Err(Error::InvalidArgument(format!("coordinate {i} outside [0, {m})"))),
                }
            }
        }
        let labels = labels
            .into_iter()
            .enumerate()
            .map(|(i, l)| l.ok_or_else(|| Error::InvalidArgument(format!("coordinate {i} is in no block"))))
            .collect::<Result<_>>()?;
        SubspacePartition::new(q, wild.len(), labels)
    }

    pub fn validate(&self) -> Result<()> {
        let mut used = vec![false; self.d];
        for label in &self.labels {
            match *label {
                Label::Fixed(e1, e2) if e1 >= self.q || e2 >= self.q => {
                    return Err(Error::InvalidArgument(format!("symbol ({e1}, {e2}) outside Z_{}²", self.q)))
                }
                Label::Fixed(..) => {}
                Label::Wild(j) if j >= self.d => {
                    return Err(Error::InvalidArgument(format!("wildcard {j} but only {} blocks", self.d)))
                }
                Label::Wild(j) => used[j] = true,
            }
        }
        if let Some(j) = used.iter().position(|&u| !u) {
            return Err(Error::InvalidArgument(format!("wildcard block {j} is empty")));
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.labels.len()
    }

    pub fn fixed_blocks(&self) -> BTreeMap<(u32, u32), BTreeSet<usize>> {
        let mut out: BTreeMap<(u32, u32), BTreeSet<usize>> = BTreeMap::new();
        for (i, label) in self.labels.iter().enumerate() {
            if let Label::Fixed(e1, e2) = *label {
                out.entry((e1, e2)).or_default().insert(i);
            }
        }
        out
    }

    pub fn wildcard_blocks(&self) -> Vec<BTreeSet<usize>> {
        let mut out = vec![BTreeSet::new(); self.d];
        for (i, label) in self.labels.iter().enumerate() {
            if let Label::Wild(j) = *label {
                out[j].insert(i);
            }
        }
        out
    }

    fn check_group(&self, spec: &GroupSpec) -> Result<()> {
        match spec {
            GroupSpec::Power { q, m } if *q == self.q && *m as usize == self.m() => Ok(()),
            other => {
                Err(Error::InvalidGroup(format!("partition over Z_{}^{} does not fit {other:?}", self.q, self.m())))
            }
        }
    }

    /// Every point of the subspace, as pairs `(a, b)` of `Z_q^m`, with the
    /// wildcard values of `a` varying slowest.
    pub fn points(&self, spec: &GroupSpec) -> Result<Vec<Pair>> {
        self.validate()?;
        self.check_group(spec)?;
        let q = self.q;
        let assignments = q.pow(self.d as u32);
        let digit = |x: u32, j: usize| x / q.pow(j as u32) % q;
        let vector = |x: u32, pick: fn(u32, u32) -> u32| -> Elem {
            let coords: Vec<u32> = self
                .labels
                .iter()
                .map(|label| match *label {
                    Label::Fixed(e1, e2) => pick(e1, e2),
                    Label::Wild(j) => digit(x, j),
                })
                .collect();
            spec.from_coords(&coords).expect("reduced coordinates")
        };
        let firsts: Vec<Elem> = (0..assignments).map(|x| vector(x, |e1, _| e1)).collect();
        let seconds: Vec<Elem> = (0..assignments).map(|y| vector(y, |_, e2| e2)).collect();
        Ok(firsts.iter().flat_map(|&a| seconds.iter().map(move |&b| (a, b))).collect())
    }
}

/// Whether the whole subspace lies in `c`.
pub fn comb_subspace_verify(c: &TripleSystem, part: &SubspacePartition) -> Result<bool> {
    Ok(part.points(c.spec())?.into_iter().all(|(a, b)| c.contains(a, b)))
}

/// Label sequences visited by [`comb_subspace_find`], as an upper bound.
pub fn subspace_search_space(q: u32, m: u32, d: usize) -> u128 {
    (d as u128 + u128::from(q) * u128::from(q)).saturating_pow(m)
}

/// The first partition, in lexicographic label order with wildcard blocks
/// numbered by first appearance, whose subspace lies in `c`.
pub fn comb_subspace_find(c: &TripleSystem, d: usize, budget: Budget) -> Result<Option<SubspacePartition>> {
    let GroupSpec::Power { q, m } = *c.spec() else {
        return Err(Error::InvalidGroup("subspace search needs Z_q^m".into()));
    };
    if d == 0 || d > m as usize {
        return Err(Error::InvalidArgument(format!("need 1 <= d <= m, got d = {d}, m = {m}")));
    }
    budget.check(subspace_search_space(q, m, d))?;
    let alphabet: Vec<Label> = (0..q).flat_map(|e1| (0..q).map(move |e2| Label::Fixed(e1, e2))).collect();
    let mut labels = Vec::with_capacity(m as usize);
    search(c, q, m as usize, d, &alphabet, &mut labels, 0)
}

fn search(
    c: &TripleSystem,
    q: u32,
    m: usize,
    d: usize,
    alphabet: &[Label],
    labels: &mut Vec<Label>,
    opened: usize,
) -> Result<Option<SubspacePartition>> {
    if labels.len() == m {
        if opened < d {
            return Ok(None);
        }
        let part = SubspacePartition { q, d, labels: labels.clone() };
        return Ok(comb_subspace_verify(c, &part)?.then_some(part));
    }
    let remaining = m - labels.len();
    let wild = (0..(opened + 1).min(d)).map(Label::Wild);
    for label in wild.chain(alphabet.iter().copied()) {
        let now_open = match label {
            Label::Wild(j) if j == opened => opened + 1,
            _ => opened,
        };
        if d - now_open > remaining - 1 {
            continue;
        }
        labels.push(label);
        let found = search(c, q, m, d, alphabet, labels, now_open)?;
        labels.pop();
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// `â`, `b̂` from the fixed symbols (zero on wildcard coordinates) and the
/// indicator vectors of the wildcard blocks.
pub fn subspace_to_shift_and_basis(spec: &GroupSpec, part: &SubspacePartition) -> Result<ShiftAndBasis> {
    part.validate()?;
    part.check_group(spec)?;
    if part.d == 0 {
        return Err(Error::InvalidArgument("a subspace needs at least one wildcard block".into()));
    }
    let shift = |pick: fn(u32, u32) -> u32| {
        let coords: Vec<u32> = part
            .labels
            .iter()
            .map(|l| match *l {
                Label::Fixed(e1, e2) => pick(e1, e2),
                Label::Wild(_) => 0,
            })
            .collect();
        spec.from_coords(&coords)
    };
    let basis = part
        .wildcard_blocks()
        .iter()
        .map(|block| spec.from_coords(&(0..part.m()).map(|i| u32::from(block.contains(&i))).collect::<Vec<_>>()))
        .collect::<Result<_>>()?;
    Ok(ShiftAndBasis { a_hat: shift(|e1, _| e1)?, b_hat: shift(|_, e2| e2)?, basis })
}
