//! Exhaustive minimisation of the edge boundary over `k`-subsets of a
//! hexagonal window.
//!
//! Two enumerators share nothing but the window: [`min_boundary_brute`] is a
//! branch and bound on the degree sum `6k - 2e(P)`, [`min_boundary_scan`]
//! visits every subset and counts boundary edges by scanning neighbours.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use super::{canonicalize, hexagon_ball, Point, PointSet, NEIGHBOURS};
use crate::config::{binomial, Budget};
use crate::error::{Error, Result};

/// Largest window whose points fit in a `u128` mask (91 points).
pub const MAX_WINDOW_RADIUS: u32 = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundaryMinimum {
    pub k: usize,
    pub window_radius: u32,
    pub minimum: usize,
    /// All minimisers, each in translation-canonical form.
    pub witnesses: BTreeSet<PointSet>,
    /// `C(|window|, k)`.
    pub search_space: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StabilityReport {
    pub at_radius: BoundaryMinimum,
    pub at_next_radius: BoundaryMinimum,
    pub stable: bool,
}

struct Window {
    points: Vec<Point>,
    /// For each point, the window indices of its neighbours (all six
    /// directions, `None` outside the window).
    neighbours: Vec<[Option<u8>; 6]>,
    /// For each point, the mask of neighbours with a smaller index.
    earlier: Vec<u128>,
}

impl Window {
    fn new(radius: u32) -> Window {
        let points: Vec<Point> = hexagon_ball(radius).iter().copied().collect();
        let index_of = |p: Point| points.binary_search(&p).ok().map(|i| i as u8);
        let neighbours: Vec<[Option<u8>; 6]> =
            points.iter().map(|&p| NEIGHBOURS.map(|(dx, dy)| index_of(p.offset(dx, dy)))).collect();
        let earlier = neighbours
            .iter()
            .enumerate()
            .map(|(i, nbrs)| {
                nbrs.iter().flatten().filter(|&&j| usize::from(j) < i).fold(0u128, |m, &j| m | (1u128 << j))
            })
            .collect();
        Window { points, neighbours, earlier }
    }

    fn to_canonical(&self, mask: u128) -> PointSet {
        let set: PointSet = (0..self.points.len()).filter(|&i| mask >> i & 1 == 1).map(|i| self.points[i]).collect();
        canonicalize(&set)
    }
}

fn prepare(k: usize, radius: u32, budget: Budget) -> Result<(Window, u128)> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    if radius == 0 || radius > MAX_WINDOW_RADIUS {
        return Err(Error::InvalidArgument(format!("window radius must be in 1..={MAX_WINDOW_RADIUS}, got {radius}")));
    }
    let window = Window::new(radius);
    let n = window.points.len();
    if k > n {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds the {n} window points")));
    }
    let space = binomial(n as u64, k as u64);
    budget.check(space)?;
    Ok((window, space))
}

/// Best value found in one part of the search, plus every mask attaining it.
#[derive(Default)]
struct Partial {
    best: Option<usize>,
    masks: Vec<u128>,
}

impl Partial {
    fn offer(&mut self, value: usize, mask: u128) {
        match self.best {
            Some(b) if value > b => {}
            Some(b) if value == b => self.masks.push(mask),
            _ => {
                self.best = Some(value);
                self.masks.clear();
                self.masks.push(mask);
            }
        }
    }

    fn merge(mut self, other: Partial) -> Partial {
        match (self.best, other.best) {
            (_, None) => self,
            (None, _) => other,
            (Some(a), Some(b)) if a < b => self,
            (Some(a), Some(b)) if b < a => other,
            _ => {
                self.masks.extend(other.masks);
                self
            }
        }
    }

    fn finish(self, window: &Window, k: usize, radius: u32, search_space: u128) -> BoundaryMinimum {
        BoundaryMinimum {
            k,
            window_radius: radius,
            minimum: self.best.expect("k <= |window| guarantees a subset"),
            witnesses: self.masks.into_iter().map(|m| window.to_canonical(m)).collect(),
            search_space,
        }
    }
}

/// Exact minimum edge boundary over all `k`-subsets of `hexagon_ball(radius)`
/// with every minimiser in translation-canonical form. Disconnected subsets
/// are included.
pub fn min_boundary_brute(k: usize, window_radius: u32, budget: Budget) -> Result<BoundaryMinimum> {
    let (window, space) = prepare(k, window_radius, budget)?;
    let n = window.points.len();
    // `cap[d]`: most edges the points at depths d..k can add. Points are taken
    // in increasing lexicographic order, and only three of the six neighbours
    // of a point precede it.
    let cap: Vec<usize> = (0..=k).map(|d| (d..k).map(|p| p.min(3)).sum()).collect();

    let partial = (0..=n - k)
        .into_par_iter()
        .map(|first| {
            let mut part = Partial::default();
            bnb(&window, &cap, k, first + 1, 1, 1u128 << first, 0, &mut part);
            part
        })
        .reduce(Partial::default, Partial::merge);
    Ok(partial.finish(&window, k, window_radius, space))
}

#[allow(clippy::too_many_arguments)]
fn bnb(
    w: &Window,
    cap: &[usize],
    k: usize,
    next: usize,
    depth: usize,
    mask: u128,
    internal: usize,
    part: &mut Partial,
) {
    if depth == k {
        part.offer(6 * k - 2 * internal, mask);
        return;
    }
    if let Some(best) = part.best {
        if 6 * k - 2 * (internal + cap[depth]) > best {
            return;
        }
    }
    let n = w.points.len();
    for i in next..=n - (k - depth) {
        let added = (w.earlier[i] & mask).count_ones() as usize;
        bnb(w, cap, k, i + 1, depth + 1, mask | 1u128 << i, internal + added, part);
    }
}

/// Same contract as [`min_boundary_brute`], by plain enumeration of every
/// subset and a neighbour scan at each leaf.
pub fn min_boundary_scan(k: usize, window_radius: u32, budget: Budget) -> Result<BoundaryMinimum> {
    let (window, space) = prepare(k, window_radius, budget)?;
    let n = window.points.len();
    let partial = (0..=n - k)
        .into_par_iter()
        .map(|first| {
            let mut part = Partial::default();
            let mut chosen = Vec::with_capacity(k);
            chosen.push(first);
            scan(&window, k, first + 1, &mut chosen, 1u128 << first, &mut part);
            part
        })
        .reduce(Partial::default, Partial::merge);
    Ok(partial.finish(&window, k, window_radius, space))
}

fn scan(w: &Window, k: usize, next: usize, chosen: &mut Vec<usize>, mask: u128, part: &mut Partial) {
    if chosen.len() == k {
        let boundary = chosen
            .iter()
            .flat_map(|&i| w.neighbours[i].iter())
            .filter(|nb| match nb {
                Some(j) => mask >> j & 1 == 0,
                None => true,
            })
            .count();
        part.offer(boundary, mask);
        return;
    }
    let n = w.points.len();
    for i in next..=n - (k - chosen.len()) {
        chosen.push(i);
        scan(w, k, i + 1, chosen, mask | 1u128 << i, part);
        chosen.pop();
    }
}

/// Runs [`min_boundary_brute`] at `window_radius` and `window_radius + 1`; the
/// window is adequate when minimum and minimisers agree.
pub fn min_boundary_stable(k: usize, window_radius: u32, budget: Budget) -> Result<StabilityReport> {
    let at_radius = min_boundary_brute(k, window_radius, budget)?;
    let at_next_radius = min_boundary_brute(k, window_radius + 1, budget)?;
    let stable = at_radius.minimum == at_next_radius.minimum && at_radius.witnesses == at_next_radius.witnesses;
    Ok(StabilityReport { at_radius, at_next_radius, stable })
}

/// All translation classes of `k`-point sets attaining the minimum boundary.
pub fn extremal_uniqueness(k: usize, window_radius: u32, budget: Budget) -> Result<BTreeSet<PointSet>> {
    Ok(min_boundary_brute(k, window_radius, budget)?.witnesses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{canonicalize_up_to_symmetry, hexagon_ball};

    fn set(pts: &[(i64, i64)]) -> PointSet {
        pts.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn single_point() {
        let r = min_boundary_brute(1, 3, Budget::UNLIMITED).unwrap();
        assert_eq!(r.minimum, 6);
        assert_eq!(r.witnesses, BTreeSet::from([set(&[(0, 0)])]));
    }

    #[test]
    fn triangle_minimises_three_points() {
        let r = min_boundary_brute(3, 3, Budget::UNLIMITED).unwrap();
        assert_eq!(r.minimum, 12);
        assert!(r.witnesses.contains(&set(&[(0, 0), (1, 0), (0, 1)])));
        assert_eq!(r, min_boundary_scan(3, 3, Budget::UNLIMITED).unwrap());
    }

    #[test]
    fn dominoes_in_three_directions() {
        let w = extremal_uniqueness(2, 2, Budget::UNLIMITED).unwrap();
        assert_eq!(w.len(), 3);
        let shapes: BTreeSet<_> = w.iter().map(canonicalize_up_to_symmetry).collect();
        assert_eq!(shapes.len(), 1);
    }

    #[test]
    fn hexagon_is_unique_at_seven() {
        let w = extremal_uniqueness(7, 3, Budget::UNLIMITED).unwrap();
        assert_eq!(w, BTreeSet::from([canonicalize(&hexagon_ball(1))]));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(min_boundary_brute(0, 3, Budget::UNLIMITED), Err(Error::InvalidArgument(_))));
        assert!(matches!(min_boundary_brute(8, 1, Budget::UNLIMITED), Err(Error::InvalidArgument(_))));
        assert!(matches!(min_boundary_brute(3, 9, Budget::UNLIMITED), Err(Error::InvalidArgument(_))));
        assert!(matches!(min_boundary_brute(7, 3, Budget(1000)), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn small_windows_are_stable() {
        for k in 1..=4 {
            let report = min_boundary_stable(k, 2, Budget::UNLIMITED).unwrap();
            assert!(report.stable, "k = {k}");
        }
    }
}
