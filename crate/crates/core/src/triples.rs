//! Triple systems `S ⊆ {(a, b, a·b)}` over a finite group, stored as the set
//! of ordered pairs `(a, b)`.

use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{binomial, Budget};
use crate::error::{Error, Result};
use crate::extremal::g_exact;
use crate::groups::{Elem, GroupSpec};

/// Most pairs (bits) a system may hold: `order²` must not exceed this.
pub const MAX_PAIR_BITS: usize = 1 << 31;

pub type Pair = (Elem, Elem);

/// Options for span counting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpanOptions {
    /// Skip pairs whose triple `{a, b, ab}` has fewer than three elements.
    pub exclude_degenerate: bool,
}

impl Default for SpanOptions {
    fn default() -> Self {
        SpanOptions { exclude_degenerate: true }
    }
}

/// Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleSystem {
    spec: GroupSpec,
    pairs: FixedBitSet,
    len: usize,
}

impl TripleSystem {
    fn empty(spec: GroupSpec) -> Result<TripleSystem> {
        spec.validate()?;
        let order = spec.order();
        let bits = order
            .checked_mul(order)
            .filter(|&b| b <= MAX_PAIR_BITS)
            .ok_or(Error::BudgetExceeded { needed: (order as u128).pow(2), budget: MAX_PAIR_BITS as u64 })?;
        Ok(TripleSystem { spec, pairs: FixedBitSet::with_capacity(bits), len: 0 })
    }

    /// All `order²` pairs.
    pub fn full_system(spec: &GroupSpec) -> Result<TripleSystem> {
        let mut sys = TripleSystem::empty(spec.clone())?;
        sys.pairs.insert_range(..);
        sys.len = sys.pairs.len();
        Ok(sys)
    }

    /// Keeps each pair independently with probability `c`, drawn from a
    /// ChaCha8 stream seeded with `seed`.
    pub fn random_dense(spec: &GroupSpec, c: Ratio<u64>, seed: u64) -> Result<TripleSystem> {
        if c <= Ratio::from_integer(0) || c > Ratio::from_integer(1) {
            return Err(Error::InvalidArgument(format!("density {c} is outside (0, 1]")));
        }
        if c == Ratio::from_integer(1) {
            return TripleSystem::full_system(spec);
        }
        let (num, den) = (u32::try_from(*c.numer()), u32::try_from(*c.denom()));
        let (Ok(num), Ok(den)) = (num, den) else {
            return Err(Error::InvalidArgument(format!("density {c} needs a 32-bit numerator and denominator")));
        };
        let mut sys = TripleSystem::empty(spec.clone())?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..sys.pairs.len() {
            if rng.random_ratio(num, den) {
                sys.pairs.insert(i);
                sys.len += 1;
            }
        }
        Ok(sys)
    }

    /// The system `A × B` over `Z_n` with `A = [n/8, 2n/8 - 1]` and
    /// `B = [2n/8, 3n/8 - 1]`, in which `A`, `B` and `A + B` are disjoint.
    pub fn lower_bound_system(n: u32) -> Result<TripleSystem> {
        if n == 0 || !n.is_multiple_of(8) {
            return Err(Error::InvalidArgument(format!("n must be a positive multiple of 8, got {n}")));
        }
        let spec = GroupSpec::cyclic(n)?;
        let (a, b) = lower_bound_intervals(n);
        let pairs = a.flat_map(|x| b.clone().map(move |y| (Elem(x), Elem(y))));
        TripleSystem::from_pairs(spec, pairs)
    }

    pub fn from_pairs(spec: GroupSpec, pairs: impl IntoIterator<Item = Pair>) -> Result<TripleSystem> {
        let mut sys = TripleSystem::empty(spec)?;
        for (a, b) in pairs {
            sys.spec.check(a)?;
            sys.spec.check(b)?;
            let i = sys.index(a, b);
            if !sys.pairs.put(i) {
                sys.len += 1;
            }
        }
        Ok(sys)
    }

    /// Keeps the pairs satisfying `keep`.
    pub fn filtered(&self, mut keep: impl FnMut(Elem, Elem) -> bool) -> TripleSystem {
        let mut out =
            TripleSystem { spec: self.spec.clone(), pairs: FixedBitSet::with_capacity(self.pairs.len()), len: 0 };
        for (a, b) in self.iter_pairs() {
            if keep(a, b) {
                out.pairs.insert(self.index(a, b));
                out.len += 1;
            }
        }
        out
    }

    fn index(&self, a: Elem, b: Elem) -> usize {
        a.index() * self.spec.order() + b.index()
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_full(&self) -> bool {
        self.len == self.pairs.len()
    }

    /// `|pairs| / order²`, exactly.
    pub fn density(&self) -> Ratio<u64> {
        Ratio::new(self.len as u64, self.pairs.len() as u64)
    }

    pub fn contains(&self, a: Elem, b: Elem) -> bool {
        self.spec.contains(a) && self.spec.contains(b) && self.pairs.contains(self.index(a, b))
    }

    /// Pairs in lexicographic order.
    pub fn iter_pairs(&self) -> impl Iterator<Item = Pair> + '_ {
        let order = self.spec.order();
        self.pairs.ones().map(move |i| (Elem((i / order) as u32), Elem((i % order) as u32)))
    }

    /// The ordered triple `(a, b, a·b)`.
    pub fn triple(&self, a: Elem, b: Elem) -> [Elem; 3] {
        [a, b, self.spec.op(a, b)]
    }

    /// Whether `{a, b, ab}` has fewer than three distinct elements.
    pub fn is_degenerate(&self, a: Elem, b: Elem) -> bool {
        let ab = self.spec.op(a, b);
        a == b || a == ab || b == ab
    }

    fn membership(&self, elements: &BTreeSet<Elem>) -> FixedBitSet {
        let mut member = FixedBitSet::with_capacity(self.spec.order());
        for e in elements.iter().filter(|e| self.spec.contains(**e)) {
            member.insert(e.index());
        }
        member
    }

    /// Pairs `(a, b) ∈ S` with `a, b, ab ∈ T`, in lexicographic order.
    pub fn spanned_pairs(&self, elements: &BTreeSet<Elem>, opts: SpanOptions) -> Vec<Pair> {
        let member = self.membership(elements);
        let inside: Vec<Elem> = elements.iter().copied().filter(|e| member.contains(e.index())).collect();
        let mut out = Vec::new();
        for &a in &inside {
            for &b in &inside {
                if self.pairs.contains(self.index(a, b))
                    && member.contains(self.spec.op(a, b).index())
                    && !(opts.exclude_degenerate && self.is_degenerate(a, b))
                {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Number of ordered pairs of `S` spanned by `T`, degenerate triples
    /// excluded.
    pub fn span_count(&self, elements: &BTreeSet<Elem>) -> usize {
        self.span_count_with(elements, SpanOptions::default())
    }

    pub fn span_count_with(&self, elements: &BTreeSet<Elem>, opts: SpanOptions) -> usize {
        self.spanned_pairs(elements, opts).len()
    }

    /// Number of distinct triples-as-sets `{a, b, ab}` spanned by `T`; two
    /// ordered pairs with the same underlying set count once.
    pub fn span_count_as_sets(&self, elements: &BTreeSet<Elem>, opts: SpanOptions) -> usize {
        self.spanned_pairs(elements, opts)
            .into_iter()
            .map(|(a, b)| {
                let mut t = self.triple(a, b);
                t.sort_unstable();
                t
            })
            .collect::<BTreeSet<_>>()
            .len()
    }

    /// Union of `{a, b, ab}` over the given pairs.
    pub fn spanned_elements(&self, pairs: &[Pair]) -> BTreeSet<Elem> {
        pairs.iter().flat_map(|&(a, b)| self.triple(a, b)).collect()
    }

    /// A smallest vertex set spanning at least `k` pairs of `S`.
    ///
    /// Any `T` spanning `k` pairs contains the elements of some `k` of them, so
    /// minimising `|spanned_elements|` over `k`-subsets of pairs is exact.
    pub fn min_span_brute(&self, k: usize, opts: SpanOptions, budget: Budget) -> Result<SpanMinimum> {
        let candidates: Vec<[u32; 3]> = self
            .iter_pairs()
            .filter(|&(a, b)| !(opts.exclude_degenerate && self.is_degenerate(a, b)))
            .map(|(a, b)| self.triple(a, b).map(|e| e.0))
            .collect();
        if k == 0 {
            return Err(Error::InvalidArgument("k must be positive".into()));
        }
        if k > candidates.len() {
            return Err(Error::InvalidArgument(format!("only {} usable pairs, k = {k}", candidates.len())));
        }
        let space = binomial(candidates.len() as u64, k as u64);
        budget.check(space)?;
        let order = self.spec.order();

        let best = (0..=candidates.len() - k)
            .into_par_iter()
            .filter_map(|first| {
                let mut search = SpanSearch {
                    candidates: &candidates,
                    k,
                    counts: vec![0u16; order],
                    union: 0,
                    chosen: Vec::with_capacity(k),
                    best: usize::MAX,
                    best_choice: Vec::new(),
                };
                search.push(first);
                search.run(first + 1);
                (search.best < usize::MAX).then_some((search.best, search.best_choice))
            })
            .min()
            .expect("k <= number of candidates");

        let pairs: Vec<Pair> = best.1.iter().map(|&i| (Elem(candidates[i][0]), Elem(candidates[i][1]))).collect();
        let elements = self.spanned_elements(&pairs);
        Ok(SpanMinimum { size: best.0, elements, pairs, search_space: space })
    }

    pub fn to_file(&self) -> TripleSystemFile {
        TripleSystemFile {
            spec: self.spec.clone(),
            pairs: self.iter_pairs().map(|(a, b)| [self.spec.element_json(a), self.spec.element_json(b)]).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("systems serialise")
    }

    /// Parses and validates the JSON file format, including group axioms for
    /// table specs.
    pub fn from_json(s: &str) -> Result<TripleSystem> {
        TripleSystem::from_file(serde_json::from_str(s)?)
    }

    pub fn from_file(file: TripleSystemFile) -> Result<TripleSystem> {
        file.spec.validate()?;
        let pairs = file
            .pairs
            .iter()
            .map(|[a, b]| Ok((file.spec.element_from_json(a)?, file.spec.element_from_json(b)?)))
            .collect::<Result<Vec<Pair>>>()?;
        TripleSystem::from_pairs(file.spec, pairs)
    }
}

/// `A` and `B` of the lower-bound construction as index ranges.
pub fn lower_bound_intervals(n: u32) -> (std::ops::Range<u32>, std::ops::Range<u32>) {
    let e = n / 8;
    (e..2 * e, 2 * e..3 * e)
}

/// On-disk form: `{"spec": {...}, "pairs": [[a, b], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TripleSystemFile {
    pub spec: GroupSpec,
    pub pairs: Vec<[Value; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpanMinimum {
    pub size: usize,
    pub elements: BTreeSet<Elem>,
    pub pairs: Vec<Pair>,
    pub search_space: u128,
}

struct SpanSearch<'a> {
    candidates: &'a [[u32; 3]],
    k: usize,
    counts: Vec<u16>,
    union: usize,
    chosen: Vec<usize>,
    best: usize,
    best_choice: Vec<usize>,
}

impl SpanSearch<'_> {
    fn push(&mut self, i: usize) {
        for e in self.candidates[i] {
            let c = &mut self.counts[e as usize];
            if *c == 0 {
                self.union += 1;
            }
            *c += 1;
        }
        self.chosen.push(i);
    }

    fn pop(&mut self) {
        let i = self.chosen.pop().expect("balanced push/pop");
        for e in self.candidates[i] {
            let c = &mut self.counts[e as usize];
            *c -= 1;
            if *c == 0 {
                self.union -= 1;
            }
        }
    }

    fn run(&mut self, next: usize) {
        if self.union >= self.best {
            return;
        }
        if self.chosen.len() == self.k {
            self.best = self.union;
            self.best_choice = self.chosen.clone();
            return;
        }
        for i in next..=self.candidates.len() - (self.k - self.chosen.len()) {
            self.push(i);
            self.run(i + 1);
            self.pop();
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LowerBoundReport {
    pub n: u32,
    pub k: usize,
    /// `g(k)`: every `k` pairs must span at least this many elements.
    pub threshold: u64,
    pub min_span: usize,
    pub witness_pairs: Vec<Pair>,
    pub pass: bool,
}

/// Checks that every `k` pairs of the lower-bound system over `Z_n` span at
/// least `g(k)` elements.
pub fn verify_lower_bound(n: u32, k: usize, budget: Budget) -> Result<LowerBoundReport> {
    let sys = TripleSystem::lower_bound_system(n)?;
    let threshold = g_exact(k as u64)?;
    let min = sys.min_span_brute(k, SpanOptions::default(), budget)?;
    Ok(LowerBoundReport {
        n,
        k,
        threshold,
        min_span: min.size,
        witness_pairs: min.pairs,
        pass: min.size as u64 >= threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[u32]) -> BTreeSet<Elem> {
        v.iter().map(|&i| Elem(i)).collect()
    }

    #[test]
    fn full_systems() {
        let c4 = TripleSystem::full_system(&GroupSpec::cyclic(4).unwrap()).unwrap();
        assert_eq!(c4.len(), 16);
        assert_eq!(c4.density(), Ratio::from_integer(1));
        let p22 = TripleSystem::full_system(&GroupSpec::power(2, 2).unwrap()).unwrap();
        assert_eq!(p22.len(), 16);
        assert!(p22.is_full());
    }

    #[test]
    fn random_dense_is_reproducible() {
        let spec = GroupSpec::cyclic(50).unwrap();
        let a = TripleSystem::random_dense(&spec, Ratio::new(1, 3), 11).unwrap();
        let b = TripleSystem::random_dense(&spec, Ratio::new(1, 3), 11).unwrap();
        let c = TripleSystem::random_dense(&spec, Ratio::new(1, 3), 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(TripleSystem::random_dense(&spec, Ratio::from_integer(1), 3).unwrap().len(), 2500);
        assert!(TripleSystem::random_dense(&spec, Ratio::from_integer(0), 3).is_err());
        assert!(TripleSystem::random_dense(&spec, Ratio::new(3, 2), 3).is_err());
    }

    #[test]
    fn random_dense_concentrates() {
        let spec = GroupSpec::cyclic(1000).unwrap();
        let sys = TripleSystem::random_dense(&spec, Ratio::new(1, 2), 7).unwrap();
        // binomial(10^6, 1/2): standard deviation 500
        assert!(sys.len().abs_diff(500_000) <= 2_500, "{}", sys.len());
    }

    #[test]
    fn lower_bound_small_cases() {
        let s8 = TripleSystem::lower_bound_system(8).unwrap();
        assert_eq!(s8.iter_pairs().collect::<Vec<_>>(), vec![(Elem(1), Elem(2))]);
        let s16 = TripleSystem::lower_bound_system(16).unwrap();
        assert_eq!(s16.len(), 4);
        let a: BTreeSet<_> = s16.iter_pairs().map(|p| p.0).collect();
        let b: BTreeSet<_> = s16.iter_pairs().map(|p| p.1).collect();
        let sums: BTreeSet<_> = s16.iter_pairs().map(|(x, y)| s16.spec().op(x, y)).collect();
        assert_eq!(a, set(&[2, 3]));
        assert_eq!(b, set(&[4, 5]));
        assert_eq!(sums, set(&[6, 7, 8]));
        assert_eq!(TripleSystem::lower_bound_system(64).unwrap().len(), 64);
        assert!(TripleSystem::lower_bound_system(12).is_err());
    }

    #[test]
    fn span_examples() {
        let c5 = TripleSystem::full_system(&GroupSpec::cyclic(5).unwrap()).unwrap();
        assert_eq!(c5.span_count(&BTreeSet::new()), 0);
        // (1,2), (2,1) and (2,2) leave the set; the other six pairs involve 0
        // or repeat an element, so all of them are degenerate.
        let t = set(&[0, 1, 2]);
        assert_eq!(c5.span_count_with(&t, SpanOptions { exclude_degenerate: false }), 6);
        assert_eq!(c5.span_count(&t), 0);

        let s16 = TripleSystem::lower_bound_system(16).unwrap();
        let t = set(&[2, 3, 4, 5, 6, 7, 8]);
        assert_eq!(s16.span_count(&t), 4);
    }

    #[test]
    fn spanned_element_examples() {
        let s16 = TripleSystem::lower_bound_system(16).unwrap();
        let all: Vec<_> = s16.iter_pairs().collect();
        assert_eq!(s16.spanned_elements(&all).len(), 7);
        assert_eq!(s16.spanned_elements(&all[..1]).len(), 3);
        assert!(s16.spanned_elements(&[]).is_empty());
    }

    #[test]
    fn set_counting_merges_reversed_pairs() {
        let c9 = TripleSystem::full_system(&GroupSpec::cyclic(9).unwrap()).unwrap();
        let t = set(&[1, 2, 3]);
        assert_eq!(c9.span_count(&t), 2); // (1,2) and (2,1)
        assert_eq!(c9.span_count_as_sets(&t, SpanOptions::default()), 1);
    }

    #[test]
    fn min_span_examples() {
        let s64 = TripleSystem::lower_bound_system(64).unwrap();
        let one = s64.min_span_brute(1, SpanOptions::default(), Budget::UNLIMITED).unwrap();
        assert_eq!(one.size, 3);
        let three = s64.min_span_brute(3, SpanOptions::default(), Budget::UNLIMITED).unwrap();
        assert_eq!(three.size, 6);
        assert_eq!(s64.span_count(&three.elements), 3);

        let c16 = TripleSystem::full_system(&GroupSpec::cyclic(16).unwrap()).unwrap();
        let m = c16.min_span_brute(3, SpanOptions::default(), Budget::UNLIMITED).unwrap();
        assert!(m.size <= 6);
        assert!(c16.span_count(&m.elements) >= 3);
    }

    #[test]
    fn lower_bound_verification() {
        assert!(verify_lower_bound(16, 2, Budget::UNLIMITED).unwrap().pass);
        let r = verify_lower_bound(64, 2, Budget::UNLIMITED).unwrap();
        assert!(r.pass);
        assert_eq!(r.threshold, 5);
        assert!(matches!(verify_lower_bound(64, 3, Budget(10)), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn json_round_trip() {
        let spec = GroupSpec::power(3, 2).unwrap();
        let sys = TripleSystem::random_dense(&spec, Ratio::new(1, 2), 5).unwrap();
        let back = TripleSystem::from_json(&sys.to_json()).unwrap();
        assert_eq!(sys, back);
    }

    #[test]
    fn json_ingestion_validates_tables() {
        let bad = r#"{"spec":{"kind":"table","order":2,"cayley":[[0,1],[1,1]]},"pairs":[[0,1]]}"#;
        assert!(matches!(TripleSystem::from_json(bad), Err(Error::InvalidGroup(_))));
        let good = r#"{"spec":{"kind":"table","order":2,"cayley":[[0,1],[1,0]]},"pairs":[[0,1],[1,1]]}"#;
        assert_eq!(TripleSystem::from_json(good).unwrap().len(), 2);
        let out_of_range = r#"{"spec":{"kind":"cyclic","n":3},"pairs":[[0,3]]}"#;
        assert!(TripleSystem::from_json(out_of_range).is_err());
    }
}
