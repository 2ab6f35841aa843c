//! Small vertex sets spanning `k` triples.
//!
//! A witness is a triple of sets `(A, B, P)` with `P ⊆ A·B`; its span is the
//! number of pairs `(a, b) ∈ A × B` with `a·b ∈ P` that belong to the target
//! system. Two families of constructions are provided, each in a `√k`
//! variant (total size at most `⌈8√k⌉`) and a `k + 3` variant:
//!
//! * homothetic grids `s + t·[h]²` in `Z_n` ([`case1_sqrt`], [`case1_k3`]);
//! * affine subspaces `â + W'` in `Z_q^m` ([`case2_sqrt`], [`case2_k3`]).

mod grid;
mod localize;
mod pipeline;
mod subspace;

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{Elem, GroupSpec};
use crate::triples::{Pair, TripleSystem};

pub use grid::{find_homothetic, grid_pattern_search, grid_search_space, GridPattern, PairGrid};
pub use localize::{coset_localize, Localization, SubgroupEmbedding};
pub use pipeline::{recheck_witness, witness_pipeline, PipelineConfig, PipelineResult, RecheckReport, Route};
pub use subspace::{
    comb_subspace_find, comb_subspace_verify, subspace_search_space, subspace_to_shift_and_basis, Label, ShiftAndBasis,
    SubspacePartition,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Total size at most `⌈8√k⌉`.
    Sqrt,
    /// Total size exactly `k + 3`.
    K3,
}

impl Variant {
    /// Size bound the variant guarantees.
    pub fn bound(self, k: usize) -> usize {
        match self {
            Variant::Sqrt => ceil_8_sqrt(k),
            Variant::K3 => k + 3,
        }
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sqrt" => Ok(Variant::Sqrt),
            "k3" => Ok(Variant::K3),
            other => Err(Error::Parse(format!("unknown variant `{other}`, expected sqrt or k3"))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Sqrt => "sqrt",
            Variant::K3 => "k3",
        })
    }
}

/// `⌈√k⌉`, exactly.
pub fn ceil_sqrt(k: usize) -> usize {
    let mut r = (k as f64).sqrt() as usize;
    while r * r < k {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= k {
        r -= 1;
    }
    r
}

/// `⌈8√k⌉ = ⌈√(64k)⌉`, exactly.
pub fn ceil_8_sqrt(k: usize) -> usize {
    ceil_sqrt(64 * k)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub a: BTreeSet<Elem>,
    pub b: BTreeSet<Elem>,
    pub p: BTreeSet<Elem>,
    pub span: usize,
}

impl Witness {
    /// Builds a witness whose span is taken in the full system of `spec`.
    pub fn new(spec: &GroupSpec, a: BTreeSet<Elem>, b: BTreeSet<Elem>, p: BTreeSet<Elem>) -> Witness {
        let mut w = Witness { a, b, p, span: 0 };
        w.span = w.pairs(spec).len();
        w
    }

    /// `|A| + |B| + |P|`.
    pub fn size_total(&self) -> usize {
        self.a.len() + self.b.len() + self.p.len()
    }

    pub fn vertex_set(&self) -> BTreeSet<Elem> {
        self.a.iter().chain(&self.b).chain(&self.p).copied().collect()
    }

    /// Pairs `(a, b) ∈ A × B` with `a·b ∈ P`, lexicographically.
    pub fn pairs(&self, spec: &GroupSpec) -> Vec<Pair> {
        let mut out = Vec::new();
        for &a in &self.a {
            for &b in &self.b {
                if self.p.contains(&spec.op(a, b)) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Span with respect to `system`.
    pub fn span_in(&self, system: &TripleSystem) -> usize {
        self.pairs(system.spec()).into_iter().filter(|&(a, b)| system.contains(a, b)).count()
    }

    /// Whether every element of `P` is a product `a·b`.
    pub fn p_within_products(&self, spec: &GroupSpec) -> bool {
        let products: HashSet<Elem> = self.a.iter().flat_map(|&a| self.b.iter().map(move |&b| spec.op(a, b))).collect();
        self.p.iter().all(|e| products.contains(e))
    }
}

fn check_k(k: usize) -> Result<()> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!("constructions need k >= 3, got {k}")));
    }
    Ok(())
}

fn reduce(v: i128, n: u32) -> Elem {
    Elem(v.rem_euclid(i128::from(n)) as u32)
}

fn progression(start: i64, step: u64, len: usize) -> Vec<i128> {
    (1..=len as i128).map(|i| i128::from(start) + i128::from(step) * i).collect()
}

/// `A = {s₁ + t·i}`, `B = {s₂ + t·j}` for `i, j ∈ [h]`, `h = ⌈√k⌉`, and
/// `P = A + B`, all in `Z_n`.
pub fn case1_sqrt(s: (i64, i64), t: u64, k: usize, n: u32) -> Result<Witness> {
    check_k(k)?;
    let spec = GroupSpec::cyclic(n)?;
    if t == 0 {
        return Err(Error::InvalidArgument("t must be positive".into()));
    }
    let h = ceil_sqrt(k);
    let a_int = progression(s.0, t, h);
    let b_int = progression(s.1, t, h);
    let p: BTreeSet<Elem> = a_int.iter().flat_map(|&x| b_int.iter().map(move |&y| reduce(x + y, n))).collect();
    let a = a_int.iter().map(|&x| reduce(x, n)).collect();
    let b = b_int.iter().map(|&y| reduce(y, n)).collect();
    Ok(Witness::new(&spec, a, b, p))
}

/// `A = {s₁ + t·i : i ∈ [⌈k/2⌉]}`, `B = {s₂ + t, s₂ + 2t}` and `P = A + B`,
/// dropping the largest sum `s₁ + ht + s₂ + 2t` when `k` is odd. Sums are
/// formed in `Z` and then reduced mod `n`.
pub fn case1_k3(s: (i64, i64), t: u64, k: usize, n: u32) -> Result<Witness> {
    check_k(k)?;
    let spec = GroupSpec::cyclic(n)?;
    if t == 0 {
        return Err(Error::InvalidArgument("t must be positive".into()));
    }
    let h = k.div_ceil(2);
    let a_int = progression(s.0, t, h);
    let b_int = progression(s.1, t, 2);
    let mut p_int: BTreeSet<i128> = a_int.iter().flat_map(|&x| b_int.iter().map(move |&y| x + y)).collect();
    if k % 2 == 1 {
        p_int.remove(&(a_int[h - 1] + b_int[1]));
    }
    let a = a_int.iter().map(|&x| reduce(x, n)).collect();
    let b = b_int.iter().map(|&y| reduce(y, n)).collect();
    let p = p_int.into_iter().map(|z| reduce(z, n)).collect();
    Ok(Witness::new(&spec, a, b, p))
}

fn power_params(spec: &GroupSpec) -> Result<(u32, u32)> {
    match spec {
        GroupSpec::Power { q, m } => Ok((*q, *m)),
        other => Err(Error::InvalidGroup(format!("expected Z_q^m, got {other:?}"))),
    }
}

fn scale(spec: &GroupSpec, u: Elem, lambda: u32) -> Elem {
    (0..lambda).fold(spec.identity(), |acc, _| spec.op(acc, u))
}

/// Whether the coefficient map `(λ₁, …, λ_r) ↦ Σ λᵢ uᵢ` on `[0, q)^r` is
/// injective, i.e. the vectors are independent over `Z_q`.
pub fn is_independent(spec: &GroupSpec, vectors: &[Elem]) -> Result<bool> {
    let (q, _) = power_params(spec)?;
    let mut span: HashSet<Elem> = HashSet::from([spec.identity()]);
    for &u in vectors {
        spec.check(u)?;
        let mut next = HashSet::with_capacity(span.len() * q as usize);
        for &w in &span {
            for lambda in 0..q {
                if !next.insert(spec.op(w, scale(spec, u, lambda))) {
                    return Ok(false);
                }
            }
        }
        span = next;
    }
    Ok(true)
}

/// The weaker condition the `k + 3` construction relies on: every `uᵢ` has
/// order `q`, the nonzero multiples `λuᵢ` are pairwise distinct across all
/// `i`, and no `λuᵢ + μuⱼ` with `i ≠ j` and `λ, μ ≠ 0` is zero or a multiple
/// of some `u_l`.
pub fn is_general_position(spec: &GroupSpec, vectors: &[Elem]) -> Result<bool> {
    let (q, _) = power_params(spec)?;
    let zero = spec.identity();
    let mut multiples: HashSet<Elem> = HashSet::new();
    let mut table: Vec<Vec<Elem>> = Vec::with_capacity(vectors.len());
    for &u in vectors {
        spec.check(u)?;
        let row: Vec<Elem> = (1..q).map(|l| scale(spec, u, l)).collect();
        for &v in &row {
            if v == zero || !multiples.insert(v) {
                return Ok(false);
            }
        }
        table.push(row);
    }
    for i in 0..table.len() {
        for j in i + 1..table.len() {
            for &x in &table[i] {
                for &y in &table[j] {
                    let s = spec.op(x, y);
                    if s == zero || multiples.contains(&s) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// `d`: largest with `q^{2d} ≤ k`; `t`: smallest with `t² q^{2d} ≥ k`.
pub fn case2_sqrt_params(q: u32, k: usize) -> (u32, u32) {
    let q = q as u128;
    let k = k as u128;
    let mut d = 0u32;
    while q.pow(2 * (d + 1)) <= k {
        d += 1;
    }
    let base = q.pow(2 * d);
    let mut t = 1u128;
    while t * t * base < k {
        t += 1;
    }
    (d, t as u32)
}

/// `A = â + W'`, `B = b̂ + W'`, `P = A + B` where
/// `W' = {λ₁u₁ + … + λ_d u_d + λ_{d+1} u_{d+1} : λᵢ ∈ [0, q), λ_{d+1} ∈ [0, t)}`.
pub fn case2_sqrt(spec: &GroupSpec, basis: &[Elem], a_hat: Elem, b_hat: Elem, k: usize) -> Result<Witness> {
    check_k(k)?;
    let (q, _) = power_params(spec)?;
    let (d, t) = case2_sqrt_params(q, k);
    assert!(1 <= t && t <= q, "t = {t} outside [1, q] for q = {q}, k = {k}");
    let used = d as usize + 1;
    if basis.len() < used {
        return Err(Error::InvalidArgument(format!("need {used} basis vectors, got {}", basis.len())));
    }
    if !is_independent(spec, &basis[..used])? {
        return Err(Error::InvalidArgument("basis vectors are not independent".into()));
    }
    spec.check(a_hat)?;
    spec.check(b_hat)?;

    let mut w = vec![spec.identity()];
    for (i, &u) in basis[..used].iter().enumerate() {
        let range = if i == d as usize { t } else { q };
        w = w
            .iter()
            .flat_map(|&x| (0..range).map(move |l| (x, l)))
            .map(|(x, l)| spec.op(x, scale(spec, u, l)))
            .collect();
    }
    let a: BTreeSet<Elem> = w.iter().map(|&x| spec.op(a_hat, x)).collect();
    let b: BTreeSet<Elem> = w.iter().map(|&x| spec.op(b_hat, x)).collect();
    let p = a.iter().flat_map(|&x| b.iter().map(move |&y| spec.op(x, y))).collect();
    Ok(Witness::new(spec, a, b, p))
}

/// Parameters of the `k + 3` construction: `h = ⌊k/(2q-1)⌋`,
/// `t = ⌈(k - h(2q-1))/2⌉` and the number of vectors used.
pub fn case2_k3_params(q: u32, k: usize) -> (usize, usize, usize) {
    let block = 2 * q as usize - 1;
    let h = k / block;
    let t = (k - h * block).div_ceil(2);
    let used = if t == 0 { h } else { h + 1 };
    (h, t, used)
}

/// The `k + 3` construction in `Z_q^m`.
///
/// With `h`, `t` from [`case2_k3_params`]:
/// `A = â + {λuᵢ : λ ∈ [0, q), i ≤ h} ∪ {λu_{h+1} : λ ∈ [0, t)}`,
/// `B = b̂ + {0, u₁, …, u_{h+1}}` and
/// `P = â + b̂ + {λuᵢ : λ ∈ [0, q), i ≤ h} ∪ {λu_{h+1} : λ ∈ [0, t]}`, without
/// `t·u_{h+1}` when `k - h(2q-1)` is odd. When `t = 0` the vector `u_{h+1}`
/// would only enlarge `B`, so it is left out, giving span `k + 1`.
pub fn case2_k3(spec: &GroupSpec, basis: &[Elem], a_hat: Elem, b_hat: Elem, k: usize) -> Result<Witness> {
    check_k(k)?;
    let (q, _) = power_params(spec)?;
    let (h, t, used) = case2_k3_params(q, k);
    if basis.len() < used {
        return Err(Error::InvalidArgument(format!("need {used} basis vectors, got {}", basis.len())));
    }
    let u = &basis[..used];
    if !is_general_position(spec, u)? {
        return Err(Error::InvalidArgument("vectors are not in general position".into()));
    }
    spec.check(a_hat)?;
    spec.check(b_hat)?;
    let ab_hat = spec.op(a_hat, b_hat);
    let shift = |base: Elem, x: Elem| spec.op(base, x);

    let mut a_off: BTreeSet<Elem> = BTreeSet::from([spec.identity()]);
    let mut b_off: BTreeSet<Elem> = BTreeSet::from([spec.identity()]);
    let mut p_off: BTreeSet<Elem> = BTreeSet::from([spec.identity()]);
    for &ui in &u[..h] {
        for l in 1..q {
            a_off.insert(scale(spec, ui, l));
            p_off.insert(scale(spec, ui, l));
        }
        b_off.insert(ui);
    }
    if t > 0 {
        let last = u[h];
        for l in 1..t as u32 {
            a_off.insert(scale(spec, last, l));
        }
        b_off.insert(last);
        for l in 1..=t as u32 {
            p_off.insert(scale(spec, last, l));
        }
        if (k - h * (2 * q as usize - 1)) % 2 == 1 {
            p_off.remove(&scale(spec, last, t as u32));
        }
    }
    let a = a_off.into_iter().map(|x| shift(a_hat, x)).collect();
    let b = b_off.into_iter().map(|x| shift(b_hat, x)).collect();
    let p = p_off.into_iter().map(|x| shift(ab_hat, x)).collect();
    Ok(Witness::new(spec, a, b, p))
}
