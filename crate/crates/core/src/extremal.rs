//! `h(a, b, ℓ)`, `h(m)` and the exact value of `g(k)`.
//!
//! `h(a, b, ℓ)` is the largest number of points of the grid `[a] × [b]` lying
//! on `ℓ` anti-diagonals, `h(m)` its maximum over `a + b + ℓ = m`, and `g(k)`
//! the least `m` with `h(m) ≥ k`.

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{binomial, Budget};
use crate::error::{Error, Result};

/// Arguments of `h(a, b, ℓ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct HTriple {
    pub a: u64,
    pub b: u64,
    pub ell: u64,
}

impl HTriple {
    pub fn new(a: u64, b: u64, ell: u64) -> Result<HTriple> {
        if a == 0 || b == 0 {
            return Err(Error::InvalidArgument(format!("grid sides must be positive, got {a}x{b}")));
        }
        Ok(HTriple { a, b, ell })
    }

    pub fn value(&self) -> u64 {
        h_interval(self.a, self.b, self.ell)
    }

    pub fn sum(&self) -> u64 {
        self.a + self.b + self.ell
    }
}

/// `h(m)` together with the lexicographically smallest `(a, b, ℓ)` realising it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExtremalRecord {
    pub m: u64,
    pub h_value: u64,
    pub argmax: HTriple,
}

impl ExtremalRecord {
    /// Whether every component of the realiser lies in `[⌊m/3⌋, ⌈m/3⌉]`.
    pub fn is_near_equal(&self) -> bool {
        let lo = self.m / 3;
        let hi = self.m.div_ceil(3);
        [self.argmax.a, self.argmax.b, self.argmax.ell].iter().all(|&c| lo <= c && c <= hi)
    }
}

/// Sizes of the anti-diagonal intersections of `[a] × [b]`, largest first.
///
/// For `a ≤ b` this is `b - a + 1` copies of `a` followed by two copies each
/// of `a - 1, a - 2, …, 1`.
pub fn diag_profile_sorted(a: u64, b: u64) -> Vec<u64> {
    let (a, b) = (a.min(b), a.max(b));
    if a == 0 {
        return Vec::new();
    }
    let mut profile = vec![a; (b - a + 1) as usize];
    for v in (1..a).rev() {
        profile.push(v);
        profile.push(v);
    }
    profile
}

/// `h(a, b, ℓ)`: sum of the `ℓ` largest entries of the diagonal profile, in
/// closed form.
pub fn h_interval(a: u64, b: u64, ell: u64) -> u64 {
    let (a, b) = (a.min(b), a.max(b));
    if a == 0 {
        return 0;
    }
    let flat = b - a + 1;
    if ell <= flat {
        return ell * a;
    }
    // pairs a-1, a-1, a-2, a-2, ... of which `extra` are taken
    let extra = (ell - flat).min(2 * (a - 1));
    let pairs = extra / 2;
    let odd = extra % 2;
    flat * a + 2 * (pairs * a - pairs * (pairs + 1) / 2) + odd * (a - 1 - pairs)
}

/// `h(m)`: maximum of `h(a, b, ℓ)` over positive `a, b, ℓ` with sum `m`.
///
/// All ordered splits are scanned; ties go to the lexicographically smallest
/// `(a, b, ℓ)`. Near-equality of the realiser is checked by callers through
/// [`ExtremalRecord::is_near_equal`], never assumed here.
pub fn h_max(m: u64) -> Result<ExtremalRecord> {
    if m < 3 {
        return Err(Error::InvalidArgument(format!("h(m) needs m >= 3, got {m}")));
    }
    let mut best = ExtremalRecord { m, h_value: 0, argmax: HTriple { a: 0, b: 0, ell: 0 } };
    for a in 1..=m - 2 {
        for b in 1..=m - 1 - a {
            let ell = m - a - b;
            let v = h_interval(a, b, ell);
            if v > best.h_value {
                best.h_value = v;
                best.argmax = HTriple { a, b, ell };
            }
        }
    }
    debug_assert!(best.is_near_equal(), "realiser of h({m}) is not near-equal: {best:?}");
    Ok(best)
}

/// `h(m)` for every `m` in `3..=max_m`, indexed by `m`.
pub fn h_table(max_m: u64) -> Vec<Option<ExtremalRecord>> {
    let mut table = vec![None; max_m as usize + 1];
    let records: Vec<_> = (3..=max_m).into_par_iter().map(|m| h_max(m).expect("m >= 3")).collect();
    for r in records {
        table[r.m as usize] = Some(r);
    }
    table
}

/// `g(k)`: the least `m` with `h(m) ≥ k`.
///
/// `h(m)` is non-decreasing in `m` (one more diagonal never hurts), so the
/// least such `m` is found by doubling and bisection.
pub fn g_exact(k: u64) -> Result<u64> {
    if k == 0 {
        return Err(Error::InvalidArgument("g(k) needs k >= 1".into()));
    }
    let reaches = |m: u64| -> bool { h_max(m).map(|r| r.h_value >= k).unwrap_or(false) };
    let mut hi = 3;
    while !reaches(hi) {
        hi *= 2;
    }
    let mut lo = 2; // h is undefined below 3, treated as never reaching k
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if reaches(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// One row of the `g` table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GRow {
    pub k: u64,
    pub g: u64,
    pub ratio: f64,
}

/// `g(k)` for every `k` in `from..=to`, computed from one `h` table.
pub fn g_range(from: u64, to: u64) -> Result<Vec<GRow>> {
    if from == 0 || from > to {
        return Err(Error::InvalidArgument(format!("invalid k range {from}..={to}")));
    }
    let max_m = g_exact(to)?;
    let table = h_table(max_m);
    let mut rows = Vec::with_capacity((to - from + 1) as usize);
    let mut m = 3u64;
    for k in from..=to {
        while table[m as usize].expect("filled for m >= 3").h_value < k {
            m += 1;
        }
        rows.push(GRow { k, g: m, ratio: m as f64 / ((12 * k) as f64).sqrt() });
    }
    Ok(rows)
}

/// `g(k) / √(12k)`.
pub fn g_asymptotic_ratio(k: u64) -> Result<f64> {
    Ok(g_exact(k)? as f64 / ((12 * k) as f64).sqrt())
}

/// CSV with header `k,g,ratio`; ratios are printed with six decimals.
pub fn g_rows_csv(rows: &[GRow]) -> String {
    let mut out = String::from("k,g,ratio\n");
    for r in rows {
        out.push_str(&format!("{},{},{:.6}\n", r.k, r.g, r.ratio));
    }
    out
}

/// Minimum of `g(P)` over all `k`-point subsets of `[grid]²`, by exhaustive
/// search.
///
/// Only translation-canonical subsets (touching row 0 and column 0) are
/// visited, and a branch is cut once its partial line count reaches the best
/// value so far, since adding points never frees a line.
pub fn g_brute(k: usize, grid: usize, budget: Budget) -> Result<usize> {
    if k == 0 || grid == 0 {
        return Err(Error::InvalidArgument("k and grid must be positive".into()));
    }
    let cells = grid * grid;
    if k > cells {
        return Err(Error::InvalidArgument(format!("{k} points do not fit in a {grid}x{grid} grid")));
    }
    budget.check(binomial(cells as u64, k as u64))?;

    // The lexicographically first point has the smallest x, so it sits in column 0.
    let best = (0..grid)
        .into_par_iter()
        .map(|y0| {
            let mut search = GSearch::new(k, grid);
            search.push(y0);
            search.run(y0 + 1);
            search.best
        })
        .min()
        .expect("grid is nonempty");
    Ok(best)
}

struct GSearch {
    k: usize,
    grid: usize,
    rows: Vec<u32>,
    cols: Vec<u32>,
    diags: Vec<u32>,
    lines: usize,
    chosen: usize,
    on_row_zero: usize,
    best: usize,
}

impl GSearch {
    fn new(k: usize, grid: usize) -> GSearch {
        GSearch {
            k,
            grid,
            rows: vec![0; grid],
            cols: vec![0; grid],
            diags: vec![0; 2 * grid - 1],
            lines: 0,
            chosen: 0,
            on_row_zero: 0,
            best: usize::MAX,
        }
    }

    // cell index c = x * grid + y, so index order is lexicographic in (x, y)
    fn push(&mut self, c: usize) {
        let (x, y) = (c / self.grid, c % self.grid);
        for slot in [&mut self.cols[x], &mut self.rows[y], &mut self.diags[x + y]] {
            if *slot == 0 {
                self.lines += 1;
            }
            *slot += 1;
        }
        self.chosen += 1;
        if y == 0 {
            self.on_row_zero += 1;
        }
    }

    fn pop(&mut self, c: usize) {
        let (x, y) = (c / self.grid, c % self.grid);
        for slot in [&mut self.cols[x], &mut self.rows[y], &mut self.diags[x + y]] {
            *slot -= 1;
            if *slot == 0 {
                self.lines -= 1;
            }
        }
        self.chosen -= 1;
        if y == 0 {
            self.on_row_zero -= 1;
        }
    }

    fn run(&mut self, next: usize) {
        if self.lines >= self.best {
            return;
        }
        if self.chosen == self.k {
            if self.on_row_zero > 0 {
                self.best = self.lines;
            }
            return;
        }
        let cells = self.grid * self.grid;
        for c in next..=cells - (self.k - self.chosen) {
            self.push(c);
            self.run(c + 1);
            self.pop(c);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Enumerates the anti-diagonals of the grid directly.
    fn profile_oracle(a: u64, b: u64) -> Vec<u64> {
        let mut counts = vec![0u64; (a + b - 1) as usize];
        for x in 0..a {
            for y in 0..b {
                counts[(x + y) as usize] += 1;
            }
        }
        counts.sort_unstable_by(|p, q| q.cmp(p));
        counts
    }

    #[test]
    fn profile_examples() {
        assert_eq!(diag_profile_sorted(1, 1), vec![1]);
        assert_eq!(diag_profile_sorted(2, 3), vec![2, 2, 1, 1]);
        assert_eq!(diag_profile_sorted(3, 3), vec![3, 2, 2, 1, 1]);
    }

    #[test]
    fn profile_matches_enumeration() {
        for a in 1..=12 {
            for b in 1..=12 {
                let p = diag_profile_sorted(a, b);
                assert_eq!(p, profile_oracle(a, b), "{a}x{b}");
                assert_eq!(p.iter().sum::<u64>(), a * b);
                assert_eq!(p.len() as u64, a + b - 1);
            }
        }
    }

    #[test]
    fn closed_form_matches_prefix_sums() {
        for a in 1..=15 {
            for b in 1..=15 {
                let p = profile_oracle(a, b);
                for ell in 0..=a + b + 2 {
                    let expected: u64 = p.iter().take(ell as usize).sum();
                    assert_eq!(h_interval(a, b, ell), expected, "h({a},{b},{ell})");
                }
            }
        }
    }

    #[test]
    fn h_examples() {
        assert_eq!(h_interval(2, 2, 2), 3);
        assert_eq!(h_interval(5, 4, 0), 0);
        assert_eq!(h_interval(3, 3, 3), 7);
        assert_eq!(h_interval(3, 3, 100), 9);
    }

    #[test]
    fn h_max_examples() {
        let r3 = h_max(3).unwrap();
        assert_eq!((r3.h_value, r3.argmax), (1, HTriple { a: 1, b: 1, ell: 1 }));
        let r6 = h_max(6).unwrap();
        assert_eq!((r6.h_value, r6.argmax), (3, HTriple { a: 2, b: 2, ell: 2 }));
        let r12 = h_max(12).unwrap();
        assert_eq!((r12.h_value, r12.argmax), (12, HTriple { a: 4, b: 4, ell: 4 }));
        assert_eq!(h_max(5).unwrap().h_value, 2);
        assert_eq!(h_max(11).unwrap().h_value, 10);
        assert!(h_max(2).is_err());
    }

    #[test]
    fn g_examples() {
        assert_eq!(g_exact(1).unwrap(), 3);
        assert_eq!(g_exact(3).unwrap(), 6);
        assert_eq!(g_exact(12).unwrap(), 12);
        assert!(g_exact(0).is_err());
    }

    #[test]
    fn g_range_matches_pointwise() {
        let rows = g_range(1, 300).unwrap();
        for r in &rows {
            assert_eq!(r.g, g_exact(r.k).unwrap(), "k = {}", r.k);
        }
        assert!(g_range(5, 4).is_err());
        assert!(g_range(0, 4).is_err());
    }

    #[test]
    fn ratio_examples() {
        assert!((g_asymptotic_ratio(3).unwrap() - 1.0).abs() < 1e-12);
        assert!((g_asymptotic_ratio(12).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn csv_layout() {
        let csv = g_rows_csv(&g_range(1, 3).unwrap());
        assert_eq!(csv, "k,g,ratio\n1,3,0.866025\n2,5,1.020621\n3,6,1.000000\n");
    }

    #[test]
    fn g_brute_small() {
        assert_eq!(g_brute(1, 3, Budget::UNLIMITED).unwrap(), 3);
        assert_eq!(g_brute(2, 4, Budget::UNLIMITED).unwrap(), 5);
        assert_eq!(g_brute(3, 5, Budget::UNLIMITED).unwrap(), 6);
        assert!(matches!(g_brute(6, 8, Budget(10)), Err(Error::BudgetExceeded { .. })));
    }
}
