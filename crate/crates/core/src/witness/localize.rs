use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::groups::{Elem, GroupSpec};
use crate::triples::TripleSystem;

/// An injective homomorphism from a small group into `parent`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupEmbedding {
    pub parent: GroupSpec,
    /// The subgroup as a group in its own right.
    pub spec: GroupSpec,
    /// `images[x]` is the image of subgroup element `x`.
    pub images: Vec<Elem>,
}

fn element_order(spec: &GroupSpec, g: Elem) -> usize {
    let e = spec.identity();
    let (mut x, mut n) = (g, 1);
    while x != e {
        x = spec.op(x, g);
        n += 1;
    }
    n
}

fn is_prime(q: usize) -> bool {
    q >= 2 && (2..).take_while(|d| d * d <= q).all(|d| !q.is_multiple_of(d))
}

impl SubgroupEmbedding {
    /// The whole group mapped onto itself.
    pub fn identity(spec: &GroupSpec) -> SubgroupEmbedding {
        SubgroupEmbedding { parent: spec.clone(), spec: spec.clone(), images: spec.elements().collect() }
    }

    /// The cyclic subgroup generated by `gen`.
    pub fn cyclic(parent: &GroupSpec, gen: Elem) -> Result<SubgroupEmbedding> {
        parent.check(gen)?;
        let n = element_order(parent, gen);
        if n < 2 {
            return Err(Error::InvalidGroup("the identity generates the trivial subgroup".into()));
        }
        let mut images = Vec::with_capacity(n);
        let mut x = parent.identity();
        for _ in 0..n {
            images.push(x);
            x = parent.op(x, gen);
        }
        Ok(SubgroupEmbedding { parent: parent.clone(), spec: GroupSpec::cyclic(n as u32)?, images })
    }

    /// The subgroup `Z_q^m` spanned by commuting generators of order `q`;
    /// coordinate `i` of the subgroup maps to `gens[i]`.
    pub fn power(parent: &GroupSpec, q: u32, gens: &[Elem]) -> Result<SubgroupEmbedding> {
        let spec = GroupSpec::power(q, gens.len() as u32)?;
        for &g in gens {
            parent.check(g)?;
            if element_order(parent, g) != q as usize {
                return Err(Error::InvalidGroup(format!("generator {g} does not have order {q}")));
            }
        }
        for &g in gens {
            for &h in gens {
                if parent.op(g, h) != parent.op(h, g) {
                    return Err(Error::InvalidGroup(format!("generators {g} and {h} do not commute")));
                }
            }
        }
        let images: Vec<Elem> = spec
            .elements()
            .map(|x| {
                spec.coords(x)
                    .iter()
                    .zip(gens)
                    .fold(parent.identity(), |acc, (&c, &g)| (0..c).fold(acc, |acc, _| parent.op(acc, g)))
            })
            .collect();
        if images.iter().collect::<BTreeSet<_>>().len() != images.len() {
            return Err(Error::InvalidGroup("generators are not independent".into()));
        }
        Ok(SubgroupEmbedding { parent: parent.clone(), spec, images })
    }

    /// Validates that `elements` form a subgroup and restates it as a cyclic
    /// group, an elementary abelian group or, failing both, a Cayley table.
    pub fn from_elements(parent: &GroupSpec, elements: &[Elem]) -> Result<SubgroupEmbedding> {
        let set: BTreeSet<Elem> = elements.iter().map(|&e| parent.check(e)).collect::<Result<_>>()?;
        if !set.contains(&parent.identity()) {
            return Err(Error::InvalidGroup("subgroup must contain the identity".into()));
        }
        for &a in &set {
            if !set.contains(&parent.inverse(a)) {
                return Err(Error::InvalidGroup(format!("{a} has no inverse in the subset")));
            }
            for &b in &set {
                if !set.contains(&parent.op(a, b)) {
                    return Err(Error::InvalidGroup(format!("{a}·{b} leaves the subset")));
                }
            }
        }
        if set.len() < 2 {
            return Err(Error::InvalidGroup("the trivial subgroup cannot be localized to".into()));
        }
        if let Some(&g) = set.iter().find(|&&g| element_order(parent, g) == set.len()) {
            return SubgroupEmbedding::cyclic(parent, g);
        }

        let orders: BTreeSet<usize> =
            set.iter().filter(|&&g| g != parent.identity()).map(|&g| element_order(parent, g)).collect();
        let abelian = set.iter().all(|&a| set.iter().all(|&b| parent.op(a, b) == parent.op(b, a)));
        if abelian && orders.len() == 1 {
            let q = *orders.iter().next().expect("nontrivial");
            if is_prime(q) {
                let mut gens = Vec::new();
                let mut span: BTreeSet<Elem> = BTreeSet::from([parent.identity()]);
                for &g in &set {
                    if span.contains(&g) {
                        continue;
                    }
                    gens.push(g);
                    let mut next = BTreeSet::new();
                    for &x in &span {
                        let mut y = x;
                        for _ in 0..q {
                            next.insert(y);
                            y = parent.op(y, g);
                        }
                    }
                    span = next;
                }
                return SubgroupEmbedding::power(parent, q as u32, &gens);
            }
        }

        let list: Vec<Elem> = set.iter().copied().collect();
        let index: HashMap<Elem, u32> = list.iter().enumerate().map(|(i, &e)| (e, i as u32)).collect();
        let cayley = list.iter().map(|&a| list.iter().map(|&b| index[&parent.op(a, b)]).collect()).collect();
        Ok(SubgroupEmbedding { parent: parent.clone(), spec: GroupSpec::table(cayley)?, images: list })
    }

    pub fn map(&self, x: Elem) -> Elem {
        self.images[x.index()]
    }

    pub fn order(&self) -> usize {
        self.images.len()
    }

    pub fn image_set(&self) -> BTreeSet<Elem> {
        self.images.iter().copied().collect()
    }
}

/// The coset cell `ℓG × Gr` carrying the most pairs of `S`, restated over `G`.
#[derive(Debug, Clone)]
pub struct Localization {
    pub ell: Elem,
    pub r: Elem,
    /// `{(x, y) ∈ G² : (ℓ·x, y·r) ∈ S}`.
    pub subsystem: TripleSystem,
    pub embedding: SubgroupEmbedding,
}

impl Localization {
    pub fn pull_a(&self, x: Elem) -> Elem {
        self.embedding.parent.op(self.ell, self.embedding.map(x))
    }

    pub fn pull_b(&self, y: Elem) -> Elem {
        self.embedding.parent.op(self.embedding.map(y), self.r)
    }

    pub fn pull_p(&self, z: Elem) -> Elem {
        let g = &self.embedding.parent;
        g.op(g.op(self.ell, self.embedding.map(z)), self.r)
    }
}

/// Picks the densest cell `ℓG × Gr` over coset representatives (the least
/// element of each coset); ties go to the smallest `(ℓ, r)`.
pub fn coset_localize(system: &TripleSystem, embedding: &SubgroupEmbedding) -> Result<Localization> {
    let parent = system.spec();
    if *parent != embedding.parent {
        return Err(Error::InvalidGroup("embedding targets a different group".into()));
    }
    let order = parent.order();
    if embedding.images.len() == order && embedding.images.iter().enumerate().all(|(i, e)| e.index() == i) {
        // one coset on each side, represented by its least element
        let e = parent.identity();
        let subsystem = if e == Elem(0) {
            system.clone()
        } else {
            let pairs = system
                .iter_pairs()
                .map(|(a, b)| (parent.op(parent.inverse(Elem(0)), a), parent.op(b, parent.inverse(Elem(0)))));
            TripleSystem::from_pairs(parent.clone(), pairs)?
        };
        return Ok(Localization { ell: Elem(0), r: Elem(0), subsystem, embedding: embedding.clone() });
    }
    let mut left = vec![Elem(u32::MAX); order];
    let mut right = vec![Elem(u32::MAX); order];
    for x in parent.elements() {
        for &g in &embedding.images {
            left[x.index()] = left[x.index()].min(parent.op(x, g));
            right[x.index()] = right[x.index()].min(parent.op(g, x));
        }
    }

    let mut cells: HashMap<(Elem, Elem), usize> = HashMap::new();
    for (a, b) in system.iter_pairs() {
        *cells.entry((left[a.index()], right[b.index()])).or_insert(0) += 1;
    }
    let e = parent.identity();
    let (ell, r) = cells
        .into_iter()
        .max_by(|(ka, ca), (kb, cb)| ca.cmp(cb).then(kb.cmp(ka)))
        .map(|(key, _)| key)
        .unwrap_or((left[e.index()], right[e.index()]));

    let sub = &embedding.spec;
    let pairs = sub
        .elements()
        .flat_map(|x| sub.elements().map(move |y| (x, y)))
        .filter(|&(x, y)| system.contains(parent.op(ell, embedding.map(x)), parent.op(embedding.map(y), r)));
    let subsystem = TripleSystem::from_pairs(sub.clone(), pairs)?;
    Ok(Localization { ell, r, subsystem, embedding: embedding.clone() })
}
