use std::cmp::Reverse;
use std::collections::{HashMap, HashSet};

use super::Point;

/// A nested family of boundary-minimising sets, grown greedily from the
/// origin.
///
/// Each step appends the point adding the fewest boundary edges (the one with
/// most neighbours already chosen). Ties go to the point nearest the origin
/// in the lattice metric, then to the smallest `(x + y, x)`. Every prefix of
/// length `3r² + 3r + 1` is the hexagon of radius `r`.
pub fn spiral_family(k: usize) -> Vec<Point> {
    let mut order = Vec::with_capacity(k);
    if k == 0 {
        return order;
    }
    let mut chosen = HashSet::with_capacity(k);
    // free point -> number of chosen neighbours
    let mut frontier: HashMap<Point, usize> = HashMap::new();
    let mut next = Point::ORIGIN;
    loop {
        order.push(next);
        chosen.insert(next);
        frontier.remove(&next);
        if order.len() == k {
            return order;
        }
        for q in next.neighbours() {
            if !chosen.contains(&q) {
                *frontier.entry(q).or_insert(0) += 1;
            }
        }
        next = frontier
            .iter()
            .map(|(&p, &links)| (Reverse(links), p.hex_norm(), p.diag(), p.x, p))
            .min()
            .map(|key| key.4)
            .expect("a nonempty set always has free neighbours");
    }
}
