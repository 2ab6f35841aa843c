//! Integer point sets in the plane.
//!
//! The same `Z²` carries two structures here. Rows, columns and
//! anti-diagonals `x + y = c` give the line profile and `g(P)`; the lines
//! `x - y = c` are never counted. The triangular lattice is `Z²` with the six
//! neighbours `(x±1, y)`, `(x, y±1)`, `(x+1, y-1)` and `(x-1, y+1)`.

mod brute;
mod spiral;

use std::collections::BTreeSet;
use std::fmt;

use serde::de::{Deserialize, Deserializer};
use serde::ser::{Serialize, Serializer};

pub use brute::{
    extremal_uniqueness, min_boundary_brute, min_boundary_scan, min_boundary_stable, BoundaryMinimum, StabilityReport,
};
pub use spiral::spiral_family;

/// Offsets of the six triangular-lattice neighbours.
pub const NEIGHBOURS: [(i64, i64); 6] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)];

/// Half of [`NEIGHBOURS`]: each undirected edge is `p -- p + offset` for
/// exactly one of these.
pub const FORWARD_NEIGHBOURS: [(i64, i64); 3] = [(1, 0), (0, 1), (1, -1)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }

    pub fn offset(self, dx: i64, dy: i64) -> Point {
        Point::new(self.x + dx, self.y + dy)
    }

    /// The anti-diagonal `x + y` the point lies on.
    pub fn diag(self) -> i64 {
        self.x + self.y
    }

    /// Distance from the origin in the triangular lattice.
    pub fn hex_norm(self) -> i64 {
        self.x.abs().max(self.y.abs()).max(self.diag().abs())
    }

    pub fn neighbours(self) -> impl Iterator<Item = Point> {
        NEIGHBOURS.iter().map(move |&(dx, dy)| self.offset(dx, dy))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A finite, duplicate-free set of lattice points, ordered lexicographically.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointSet(BTreeSet<Point>);

impl PointSet {
    pub fn new() -> Self {
        PointSet(BTreeSet::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn insert(&mut self, p: Point) -> bool {
        self.0.insert(p)
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.0.contains(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Point> + '_ {
        self.0.iter()
    }

    pub fn translate(&self, dx: i64, dy: i64) -> PointSet {
        self.0.iter().map(|p| p.offset(dx, dy)).collect()
    }

    pub fn map(&self, f: impl Fn(Point) -> Point) -> PointSet {
        self.0.iter().map(|&p| f(p)).collect()
    }

    /// Number of lattice edges with both endpoints in the set.
    pub fn internal_edges(&self) -> usize {
        self.0
            .iter()
            .map(|p| FORWARD_NEIGHBOURS.iter().filter(|&&(dx, dy)| self.0.contains(&p.offset(dx, dy))).count())
            .sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("point sets always serialise")
    }

    pub fn from_json(s: &str) -> crate::Result<PointSet> {
        Ok(serde_json::from_str(s)?)
    }
}

impl FromIterator<Point> for PointSet {
    fn from_iter<I: IntoIterator<Item = Point>>(iter: I) -> Self {
        PointSet(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = &'a Point;
    type IntoIter = std::collections::btree_set::Iter<'a, Point>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Serialised as a JSON array of `[x, y]` pairs in lexicographic order.
impl Serialize for PointSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.0.iter().map(|p| [p.x, p.y]))
    }
}

impl<'de> Deserialize<'de> for PointSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw: Vec<[i64; 2]> = Vec::deserialize(deserializer)?;
        Ok(raw.into_iter().map(|[x, y]| Point::new(x, y)).collect())
    }
}

/// Occupied rows (`y`), columns (`x`) and anti-diagonals (`x + y`).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LineProfile {
    pub rows: BTreeSet<i64>,
    pub cols: BTreeSet<i64>,
    pub diags: BTreeSet<i64>,
}

impl LineProfile {
    pub fn g(&self) -> usize {
        self.rows.len() + self.cols.len() + self.diags.len()
    }
}

pub fn line_profile(points: &PointSet) -> LineProfile {
    let mut profile = LineProfile::default();
    for p in points {
        profile.rows.insert(p.y);
        profile.cols.insert(p.x);
        profile.diags.insert(p.diag());
    }
    profile
}

/// `g(P)`: total number of occupied rows, columns and anti-diagonals.
pub fn g_of_set(points: &PointSet) -> usize {
    line_profile(points).g()
}

/// Number of triangular-lattice edges with exactly one endpoint in `points`,
/// found by scanning the six neighbours of every point.
pub fn edge_boundary(points: &PointSet) -> usize {
    points.iter().flat_map(|p| p.neighbours()).filter(|q| !points.contains(q)).count()
}

/// Edge boundary via the degree sum `6|P| - 2 e(P)`.
pub fn edge_boundary_by_degree(points: &PointSet) -> usize {
    6 * points.len() - 2 * points.internal_edges()
}

/// The radius-`r` ball around the origin in the triangular-lattice metric,
/// a regular hexagon with `3r² + 3r + 1` points.
pub fn hexagon_ball(radius: u32) -> PointSet {
    let r = i64::from(radius);
    let mut ball = PointSet::new();
    for x in -r..=r {
        for y in (-r).max(-r - x)..=r.min(r - x) {
            ball.insert(Point::new(x, y));
        }
    }
    ball
}

/// `3r² + 3r + 1`.
pub fn hexagon_volume(radius: u32) -> usize {
    let r = radius as usize;
    3 * r * r + 3 * r + 1
}

/// Translation normal form: shift so that `min x = 0` and `min y = 0`.
pub fn canonicalize(points: &PointSet) -> PointSet {
    let (Some(min_x), Some(min_y)) = (points.iter().map(|p| p.x).min(), points.iter().map(|p| p.y).min()) else {
        return PointSet::new();
    };
    points.translate(-min_x, -min_y)
}

/// The 12 automorphisms of the triangular lattice fixing the origin, as
/// linear maps on `(x, y)`.
pub fn lattice_symmetries() -> [[i64; 4]; 12] {
    // rotation by 60 degrees: (x, y) -> (-y, x + y); reflection: (x, y) -> (y, x)
    let rot = [0, -1, 1, 1];
    let refl = [0, 1, 1, 0];
    let mul = |a: [i64; 4], b: [i64; 4]| {
        [a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]]
    };
    let mut out = [[1, 0, 0, 1]; 12];
    for i in 1..6 {
        out[i] = mul(rot, out[i - 1]);
    }
    for i in 0..6 {
        out[i + 6] = mul(refl, out[i]);
    }
    out
}

/// Canonical form up to translation and the 12 lattice symmetries: the
/// smallest translation-canonical image.
pub fn canonicalize_up_to_symmetry(points: &PointSet) -> PointSet {
    lattice_symmetries()
        .iter()
        .map(|m| canonicalize(&points.map(|p| Point::new(m[0] * p.x + m[1] * p.y, m[2] * p.x + m[3] * p.y))))
        .min()
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(pts: &[(i64, i64)]) -> PointSet {
        pts.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn profile_of_small_sets() {
        let empty = line_profile(&PointSet::new());
        assert_eq!(empty, LineProfile::default());

        let single = line_profile(&set(&[(0, 0)]));
        assert_eq!(single.rows, BTreeSet::from([0]));
        assert_eq!(single.cols, BTreeSet::from([0]));
        assert_eq!(single.diags, BTreeSet::from([0]));

        let domino = line_profile(&set(&[(0, 0), (1, 0)]));
        assert_eq!(domino.rows, BTreeSet::from([0]));
        assert_eq!(domino.cols, BTreeSet::from([0, 1]));
        assert_eq!(domino.diags, BTreeSet::from([0, 1]));
        assert_eq!(domino.g(), 5);
    }

    #[test]
    fn g_examples() {
        assert_eq!(g_of_set(&set(&[(0, 0)])), 3);
        assert_eq!(g_of_set(&set(&[(0, 0), (1, 0), (0, 1)])), 6);
        assert_eq!(g_of_set(&hexagon_ball(1)), 9);
    }

    #[test]
    fn anti_diagonals_only() {
        // (0,0) and (1,1) share the line x - y = 0, which is not counted.
        assert_eq!(g_of_set(&set(&[(0, 0), (1, 1)])), 6);
        // (1,0) and (0,1) share x + y = 1.
        assert_eq!(g_of_set(&set(&[(1, 0), (0, 1)])), 5);
    }

    #[test]
    fn boundary_examples() {
        assert_eq!(edge_boundary(&set(&[(0, 0)])), 6);
        assert_eq!(edge_boundary(&set(&[(0, 0), (1, 0)])), 10);
        assert_eq!(edge_boundary(&hexagon_ball(1)), 18);
        assert_eq!(edge_boundary(&PointSet::new()), 0);
    }

    #[test]
    fn hexagon_examples() {
        assert_eq!(hexagon_ball(0), set(&[(0, 0)]));
        let h1 = hexagon_ball(1);
        assert_eq!(h1.len(), 7);
        let h2 = hexagon_ball(2);
        assert_eq!(h2.len(), 19);
        assert_eq!(edge_boundary(&h2), 30);
        assert_eq!(g_of_set(&h2), 15);
        assert!(h2.iter().all(|p| p.hex_norm() <= 2));
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(canonicalize(&set(&[(5, 7)])), set(&[(0, 0)]));
        assert_eq!(canonicalize(&set(&[(2, 3), (3, 3)])), set(&[(0, 0), (1, 0)]));
        assert_eq!(canonicalize(&PointSet::new()), PointSet::new());
    }

    #[test]
    fn symmetries_preserve_the_neighbourhood() {
        let syms = lattice_symmetries();
        let mut distinct: Vec<_> = syms.to_vec();
        distinct.sort();
        distinct.dedup();
        assert_eq!(distinct.len(), 12);
        let nbrs: BTreeSet<_> = NEIGHBOURS.iter().copied().collect();
        for m in syms {
            let image: BTreeSet<_> =
                NEIGHBOURS.iter().map(|&(x, y)| (m[0] * x + m[1] * y, m[2] * x + m[3] * y)).collect();
            assert_eq!(image, nbrs);
        }
    }

    #[test]
    fn dominoes_are_one_shape_up_to_symmetry() {
        let a = canonicalize_up_to_symmetry(&set(&[(0, 0), (1, 0)]));
        let b = canonicalize_up_to_symmetry(&set(&[(0, 0), (0, 1)]));
        let c = canonicalize_up_to_symmetry(&set(&[(0, 0), (1, -1)]));
        assert_eq!(a, b);
        assert_eq!(b, c);
    }

    #[test]
    fn json_is_sorted_pairs() {
        let p = set(&[(3, 1), (-1, 2), (0, 0)]);
        assert_eq!(p.to_json(), "[[-1,2],[0,0],[3,1]]");
        assert_eq!(PointSet::from_json("[[3,1],[0,0],[-1,2],[0,0]]").unwrap(), p);
    }
}
