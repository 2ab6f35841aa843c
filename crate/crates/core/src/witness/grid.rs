use rayon::prelude::*;
use serde::Serialize;

use crate::config::Budget;
use crate::error::{Error, Result};

/// A subset of `[0, n)²` stored as one bitset row per first coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairGrid {
    n: usize,
    words: usize,
    rows: Vec<Vec<u64>>,
}

impl PairGrid {
    pub fn new(n: usize) -> PairGrid {
        let words = n.div_ceil(64);
        PairGrid { n, words, rows: vec![vec![0; words]; n] }
    }

    pub fn from_cells(n: usize, cells: impl IntoIterator<Item = (usize, usize)>) -> Result<PairGrid> {
        let mut grid = PairGrid::new(n);
        for (x, y) in cells {
            if x >= n || y >= n {
                return Err(Error::InvalidArgument(format!("cell ({x}, {y}) outside [0, {n})²")));
            }
            grid.insert(x, y);
        }
        Ok(grid)
    }

    pub fn insert(&mut self, x: usize, y: usize) {
        self.rows[x][y / 64] |= 1 << (y % 64);
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x < self.n && y < self.n && self.rows[x][y / 64] >> (y % 64) & 1 == 1
    }

    pub fn side(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.rows.iter().flatten().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Cells `s + t·(i, j)` for `0 ≤ i < shape.0`, `0 ≤ j < shape.1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct GridPattern {
    pub s: (usize, usize),
    pub t: usize,
    pub shape: (usize, usize),
}

impl GridPattern {
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.shape.0)
            .flat_map(move |i| (0..self.shape.1).map(move |j| (self.s.0 + self.t * i, self.s.1 + self.t * j)))
    }
}

/// Largest dilation for which a pattern of the given shape fits in `[0, n)`.
fn max_step(n: usize, shape: (usize, usize)) -> usize {
    match shape.0.max(shape.1) {
        1 => usize::from(n > 0),
        long => (n.saturating_sub(1)) / (long - 1),
    }
}

/// Word operations of an exhaustive [`find_homothetic`] run.
pub fn grid_search_space(n: usize, shape: (usize, usize)) -> u128 {
    max_step(n, shape) as u128 * n as u128 * n.div_ceil(64) as u128 * (shape.0 + shape.1) as u128
}

fn and_shifted(acc: &mut [u64], src: &[u64], shift: usize) {
    let (ws, bs) = (shift / 64, shift % 64);
    for (w, slot) in acc.iter_mut().enumerate() {
        let lo = src.get(w + ws).copied().unwrap_or(0);
        let hi = src.get(w + ws + 1).copied().unwrap_or(0);
        let word = if bs == 0 { lo } else { lo >> bs | hi << (64 - bs) };
        *slot &= word;
    }
}

fn first_at_step(c: &PairGrid, shape: (usize, usize), t: usize) -> Option<(usize, usize)> {
    let (ha, hb) = shape;
    let mut mask = vec![0u64; c.words];
    let mut fit = vec![0u64; c.words];
    for s1 in 0..c.n - (ha - 1) * t {
        mask.copy_from_slice(&c.rows[s1]);
        for i in 1..ha {
            and_shifted(&mut mask, &c.rows[s1 + t * i], 0);
        }
        if mask.iter().all(|&w| w == 0) {
            continue;
        }
        fit.copy_from_slice(&mask);
        for j in 1..hb {
            and_shifted(&mut fit, &mask, t * j);
        }
        if let Some((w, word)) = fit.iter().enumerate().find(|(_, &w)| w != 0) {
            return Some((s1, w * 64 + word.trailing_zeros() as usize));
        }
    }
    None
}

/// The first rectangle `s + t·([0, ha) × [0, hb))` inside `c`, in order of
/// increasing `t` and then lexicographic `s`.
pub fn find_homothetic(c: &PairGrid, shape: (usize, usize), budget: Budget) -> Result<Option<GridPattern>> {
    if shape.0 == 0 || shape.1 == 0 {
        return Err(Error::InvalidArgument("pattern sides must be positive".into()));
    }
    budget.check(grid_search_space(c.n, shape))?;
    let found = (1..=max_step(c.n, shape))
        .into_par_iter()
        .find_map_first(|t| first_at_step(c, shape, t).map(|s| GridPattern { s, t, shape }));
    Ok(found)
}

/// Square case of [`find_homothetic`].
pub fn grid_pattern_search(c: &PairGrid, h: usize, budget: Budget) -> Result<Option<GridPattern>> {
    find_homothetic(c, (h, h), budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(c: &PairGrid, shape: (usize, usize)) -> Option<GridPattern> {
        let n = c.side();
        for t in 1..=n {
            for s1 in 0..n {
                for s2 in 0..n {
                    let p = GridPattern { s: (s1, s2), t, shape };
                    if p.cells().all(|(x, y)| c.contains(x, y)) {
                        return Some(p);
                    }
                }
            }
        }
        None
    }

    #[test]
    fn full_grid_hits_origin() {
        let c = PairGrid::from_cells(10, (0..10).flat_map(|x| (0..10).map(move |y| (x, y)))).unwrap();
        let p = grid_pattern_search(&c, 2, Budget::UNLIMITED).unwrap().unwrap();
        assert_eq!((p.s, p.t), ((0, 0), 1));
    }

    #[test]
    fn parity_grid_needs_step_two() {
        let c =
            PairGrid::from_cells(12, (0..12).step_by(2).flat_map(|x| (0..12).step_by(2).map(move |y| (x, y)))).unwrap();
        let p = grid_pattern_search(&c, 2, Budget::UNLIMITED).unwrap().unwrap();
        assert_eq!((p.s, p.t), ((0, 0), 2));
    }

    #[test]
    fn missing_band_blocks_full_square() {
        let n = 12;
        let c = PairGrid::from_cells(
            n,
            (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter(|&(x, _)| !(n / 4..3 * n / 4).contains(&x)),
        )
        .unwrap();
        assert_eq!(grid_pattern_search(&c, n, Budget::UNLIMITED).unwrap(), None);
        assert!(grid_pattern_search(&c, 2, Budget::UNLIMITED).unwrap().is_some());
    }

    #[test]
    fn agrees_with_naive_across_word_boundaries() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let n = rng.random_range(60..140);
            let cells: Vec<(usize, usize)> =
                (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter(|_| rng.random_ratio(4, 5)).collect();
            let c = PairGrid::from_cells(n, cells).unwrap();
            for shape in [(3, 3), (4, 2), (2, 5)] {
                assert_eq!(find_homothetic(&c, shape, Budget::UNLIMITED).unwrap(), naive(&c, shape));
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(PairGrid::from_cells(4, [(4, 0)]).is_err());
        assert!(find_homothetic(&PairGrid::new(4), (0, 1), Budget::UNLIMITED).is_err());
        assert!(matches!(grid_pattern_search(&PairGrid::new(512), 2, Budget(10)), Err(Error::BudgetExceeded { .. })));
    }
}
