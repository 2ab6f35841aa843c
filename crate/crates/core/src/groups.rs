//! Finite groups given as `Z_n`, `Z_q^m` or an explicit Cayley table.
//!
//! Elements are dense indices `0..order`. For `Z_q^m` the index packs the
//! coordinates in base `q`, coordinate 0 being the least significant digit.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// Largest table order accepted; associativity is checked in `O(order³)`.
pub const MAX_TABLE_ORDER: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Elem(pub u32);

impl Elem {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupSpec {
    /// `Z_n`.
    Cyclic { n: u32 },
    /// `Z_q^m`.
    Power { q: u32, m: u32 },
    /// Explicit multiplication table, `cayley[a][b] = a·b`.
    Table { order: u32, cayley: Vec<Vec<u32>> },
}

impl GroupSpec {
    pub fn cyclic(n: u32) -> Result<GroupSpec> {
        let spec = GroupSpec::Cyclic { n };
        spec.validate()?;
        Ok(spec)
    }

    pub fn power(q: u32, m: u32) -> Result<GroupSpec> {
        let spec = GroupSpec::Power { q, m };
        spec.validate()?;
        Ok(spec)
    }

    /// Builds a table group, checking closure, associativity, identity and
    /// inverses.
    pub fn table(cayley: Vec<Vec<u32>>) -> Result<GroupSpec> {
        let spec = GroupSpec::Table { order: cayley.len() as u32, cayley };
        spec.validate()?;
        Ok(spec)
    }

    /// Parses `zn:<n>` and `zqm:<q>:<m>`. Table groups are loaded from files by
    /// the caller and passed to [`GroupSpec::table`].
    pub fn parse(s: &str) -> Result<GroupSpec> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |t: &str| t.parse::<u32>().map_err(|_| Error::Parse(format!("bad number `{t}` in `{s}`")));
        match parts.as_slice() {
            ["zn", n] => GroupSpec::cyclic(num(n)?),
            ["zqm", q, m] => GroupSpec::power(num(q)?, num(m)?),
            _ => Err(Error::Parse(format!("expected zn:<n> or zqm:<q>:<m>, got `{s}`"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GroupSpec::Cyclic { n } if *n < 2 => Err(Error::InvalidGroup(format!("Z_n needs n >= 2, got {n}"))),
            GroupSpec::Cyclic { .. } => Ok(()),
            GroupSpec::Power { q, m } => {
                if *q < 2 || *m < 1 {
                    return Err(Error::InvalidGroup(format!("Z_q^m needs q >= 2 and m >= 1, got q={q}, m={m}")));
                }
                match q.checked_pow(*m) {
                    Some(o) if o <= u32::MAX / 2 => Ok(()),
                    _ => Err(Error::InvalidGroup(format!("Z_{q}^{m} is too large"))),
                }
            }
            GroupSpec::Table { order, cayley } => validate_table(*order, cayley),
        }
    }

    pub fn order(&self) -> usize {
        match self {
            GroupSpec::Cyclic { n } => *n as usize,
            GroupSpec::Power { q, m } => (*q as usize).pow(*m),
            GroupSpec::Table { order, .. } => *order as usize,
        }
    }

    pub fn is_abelian(&self) -> bool {
        match self {
            GroupSpec::Cyclic { .. } | GroupSpec::Power { .. } => true,
            GroupSpec::Table { cayley, .. } => {
                (0..cayley.len()).all(|a| (0..cayley.len()).all(|b| cayley[a][b] == cayley[b][a]))
            }
        }
    }

    pub fn contains(&self, e: Elem) -> bool {
        e.index() < self.order()
    }

    pub fn check(&self, e: Elem) -> Result<Elem> {
        if self.contains(e) {
            Ok(e)
        } else {
            Err(Error::InvalidElement(format!("{} is not an element of a group of order {}", e.0, self.order())))
        }
    }

    /// The product `a·b`. Panics on out-of-range elements; use
    /// [`GroupSpec::try_op`] for unchecked input.
    pub fn op(&self, a: Elem, b: Elem) -> Elem {
        match self {
            GroupSpec::Cyclic { n } => Elem(((u64::from(a.0) + u64::from(b.0)) % u64::from(*n)) as u32),
            GroupSpec::Power { q, m } => {
                let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0u32, 1u32);
                for _ in 0..*m {
                    out += ((x % q + y % q) % q) * place;
                    x /= q;
                    y /= q;
                    place = place.wrapping_mul(*q);
                }
                Elem(out)
            }
            GroupSpec::Table { cayley, .. } => Elem(cayley[a.index()][b.index()]),
        }
    }

    pub fn try_op(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.op(self.check(a)?, self.check(b)?))
    }

    pub fn identity(&self) -> Elem {
        match self {
            GroupSpec::Cyclic { .. } | GroupSpec::Power { .. } => Elem(0),
            GroupSpec::Table { cayley, .. } => Elem(table_identity(cayley).expect("validated table")),
        }
    }

    pub fn inverse(&self, a: Elem) -> Elem {
        match self {
            GroupSpec::Cyclic { n } => Elem((n - a.0 % n) % n),
            GroupSpec::Power { q, m } => {
                let coords: Vec<u32> = self.coords(a).iter().map(|c| (q - c) % q).collect();
                debug_assert_eq!(coords.len(), *m as usize);
                self.from_coords(&coords).expect("reduced coordinates")
            }
            GroupSpec::Table { cayley, .. } => {
                let e = self.identity().0;
                Elem(cayley[a.index()].iter().position(|&v| v == e).expect("validated table") as u32)
            }
        }
    }

    /// Coordinates of an element of `Z_q^m`; a single entry for other groups.
    pub fn coords(&self, e: Elem) -> Vec<u32> {
        match self {
            GroupSpec::Power { q, m } => {
                let mut x = e.0;
                (0..*m)
                    .map(|_| {
                        let c = x % q;
                        x /= q;
                        c
                    })
                    .collect()
            }
            _ => vec![e.0],
        }
    }

    pub fn from_coords(&self, coords: &[u32]) -> Result<Elem> {
        match self {
            GroupSpec::Power { q, m } => {
                if coords.len() != *m as usize || coords.iter().any(|c| c >= q) {
                    return Err(Error::InvalidElement(format!("{coords:?} is not a reduced vector in Z_{q}^{m}")));
                }
                Ok(Elem(coords.iter().rev().fold(0u32, |acc, &c| acc * q + c)))
            }
            _ => match coords {
                [v] => self.check(Elem(*v)),
                _ => Err(Error::InvalidElement(format!("expected a single index, got {coords:?}"))),
            },
        }
    }

    /// JSON form of an element: an integer, or an array of residues for `Z_q^m`.
    pub fn element_json(&self, e: Elem) -> Value {
        match self {
            GroupSpec::Power { .. } => Value::from(self.coords(e)),
            _ => Value::from(e.0),
        }
    }

    pub fn element_from_json(&self, v: &Value) -> Result<Elem> {
        let bad = || Error::InvalidElement(format!("unreadable element {v}"));
        match (self, v) {
            (GroupSpec::Power { .. }, Value::Array(items)) => {
                let coords = items
                    .iter()
                    .map(|c| c.as_u64().and_then(|c| u32::try_from(c).ok()).ok_or_else(bad))
                    .collect::<Result<Vec<u32>>>()?;
                self.from_coords(&coords)
            }
            (GroupSpec::Power { .. }, _) => Err(bad()),
            (_, Value::Number(n)) => {
                let i = n.as_u64().and_then(|c| u32::try_from(c).ok()).ok_or_else(bad)?;
                self.check(Elem(i))
            }
            _ => Err(bad()),
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.order() as u32).map(Elem)
    }

    /// Multiplication table, used to restate a subgroup as its own group.
    pub fn cayley_table(&self) -> Vec<Vec<u32>> {
        let n = self.order() as u32;
        (0..n).map(|a| (0..n).map(|b| self.op(Elem(a), Elem(b)).0).collect()).collect()
    }
}

fn table_identity(cayley: &[Vec<u32>]) -> Option<u32> {
    let n = cayley.len();
    (0..n).find(|&e| (0..n).all(|a| cayley[e][a] as usize == a && cayley[a][e] as usize == a)).map(|e| e as u32)
}

fn validate_table(order: u32, cayley: &[Vec<u32>]) -> Result<()> {
    let n = cayley.len();
    if n == 0 || n != order as usize {
        return Err(Error::InvalidGroup(format!("table has {n} rows but order {order}")));
    }
    if n > MAX_TABLE_ORDER {
        return Err(Error::InvalidGroup(format!("table order {n} exceeds {MAX_TABLE_ORDER}")));
    }
    for (a, row) in cayley.iter().enumerate() {
        if row.len() != n {
            return Err(Error::InvalidGroup(format!("row {a} has {} entries, expected {n}", row.len())));
        }
        if let Some(v) = row.iter().find(|&&v| v as usize >= n) {
            return Err(Error::InvalidGroup(format!("row {a} contains {v}, outside 0..{n}")));
        }
    }
    let e = table_identity(cayley).ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
    for (a, row) in cayley.iter().enumerate() {
        if !row.contains(&e) || !cayley.iter().any(|r| r[a] == e) {
            return Err(Error::InvalidGroup(format!("element {a} has no inverse")));
        }
    }
    for a in 0..n {
        for b in 0..n {
            let ab = cayley[a][b] as usize;
            for c in 0..n {
                if cayley[ab][c] != cayley[a][cayley[b][c] as usize] {
                    return Err(Error::InvalidGroup(format!("not associative at ({a}, {b}, {c})")));
                }
            }
        }
    }
    Ok(())
}
