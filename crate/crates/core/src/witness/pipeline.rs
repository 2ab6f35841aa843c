use std::collections::BTreeSet;

use serde::Serialize;
use serde_json::{json, Value};

use super::grid::{find_homothetic, GridPattern, PairGrid};
use super::localize::{coset_localize, Localization, SubgroupEmbedding};
use super::subspace::{comb_subspace_find, subspace_to_shift_and_basis};
use super::{case1_k3, case1_sqrt, case2_k3, case2_k3_params, case2_sqrt, case2_sqrt_params, ceil_sqrt};
use super::{check_k, is_general_position, Variant, Witness};
use crate::config::Budget;
use crate::error::{Error, Result};
use crate::groups::{Elem, GroupSpec};
use crate::triples::{Pair, SpanOptions, TripleSystem};

#[derive(Debug, Clone, Default)]
pub struct PipelineConfig {
    /// Subgroup to localize to. Required for table groups; cyclic and power
    /// groups default to the whole group.
    pub subgroup: Option<SubgroupEmbedding>,
    pub budget: Budget,
    pub span: SpanOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Full cell: fixed placement, no search.
    Direct,
    GridSearch,
    SubspaceSearch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineResult {
    pub spec: GroupSpec,
    pub variant: Variant,
    pub k: usize,
    /// The witness in the original group; `span` counts pairs of the system.
    pub witness: Witness,
    pub vertex_set: BTreeSet<Elem>,
    /// The first `k` witnessing pairs.
    pub certificate: Vec<Pair>,
    pub span_count: usize,
    pub span_count_as_sets: usize,
    pub bound: usize,
    pub ell: Elem,
    pub r: Elem,
    pub route: Route,
}

impl PipelineResult {
    pub fn to_json(&self) -> Value {
        let g = &self.spec;
        let list = |s: &BTreeSet<Elem>| Value::from(s.iter().map(|&e| g.element_json(e)).collect::<Vec<_>>());
        json!({
            "group": g,
            "k": self.k,
            "variant": self.variant,
            "A": list(&self.witness.a),
            "B": list(&self.witness.b),
            "P": list(&self.witness.p),
            "span": self.witness.span,
            "size_total": self.witness.size_total(),
            "bound": self.bound,
            "vertex_set": list(&self.vertex_set),
            "span_count": self.span_count,
            "span_count_as_sets": self.span_count_as_sets,
            "pullback": { "ell": g.element_json(self.ell), "r": g.element_json(self.r) },
            "route": self.route,
            "certificate": self.certificate.iter().map(|&(a, b)| json!([g.element_json(a), g.element_json(b)])).collect::<Vec<_>>(),
        })
    }
}

fn nondegenerate(triple: [Elem; 3]) -> bool {
    triple[0] != triple[1] && triple[0] != triple[2] && triple[1] != triple[2]
}

fn counted(system: &TripleSystem, opts: SpanOptions, a: Elem, b: Elem) -> bool {
    system.contains(a, b) && !(opts.exclude_degenerate && system.is_degenerate(a, b))
}

/// Whether a pair of the localized system pulls back to a pair counted in `S`.
fn in_domain(loc: &Localization, opts: SpanOptions, x: Elem, y: Elem) -> bool {
    loc.subsystem.contains(x, y)
        && (!opts.exclude_degenerate
            || nondegenerate([loc.pull_a(x), loc.pull_b(y), loc.pull_p(loc.embedding.spec.op(x, y))]))
}

/// The search domain, materialized only when a search is needed.
fn search_domain(loc: &Localization, opts: SpanOptions) -> TripleSystem {
    loc.subsystem.filtered(|x, y| in_domain(loc, opts, x, y))
}

fn separated(w: &Witness) -> bool {
    w.a.is_disjoint(&w.b) && w.a.is_disjoint(&w.p) && w.b.is_disjoint(&w.p)
}

fn fits(w: &Witness, loc: &Localization, opts: SpanOptions) -> bool {
    w.pairs(&loc.embedding.spec).iter().all(|&(a, b)| in_domain(loc, opts, a, b))
}

fn cyclic_witness(
    loc: &Localization,
    opts: SpanOptions,
    n: u32,
    k: usize,
    variant: Variant,
    budget: Budget,
) -> Result<(Witness, Route)> {
    let build = |s: (i64, i64), t: u64| match variant {
        Variant::Sqrt => case1_sqrt(s, t, k, n),
        Variant::K3 => case1_k3(s, t, k, n),
    };
    if loc.subsystem.is_full() {
        let w = build((i64::from(n / 8), i64::from(n / 4)), 1)?;
        if separated(&w) && fits(&w, loc, opts) {
            return Ok((w, Route::Direct));
        }
    }
    let shape = match variant {
        Variant::Sqrt => (ceil_sqrt(k), ceil_sqrt(k)),
        Variant::K3 => (k.div_ceil(2), 2),
    };
    let c = search_domain(loc, opts);
    let grid = PairGrid::from_cells(n as usize, c.iter_pairs().map(|(a, b)| (a.index(), b.index())))?;
    let GridPattern { s, t, .. } = find_homothetic(&grid, shape, budget)?.ok_or_else(|| {
        Error::PatternNotFound(format!("no {}x{} homothetic grid in the localized system", shape.0, shape.1))
    })?;
    let w = build((s.0 as i64 - t as i64, s.1 as i64 - t as i64), t as u64)?;
    Ok((w, Route::GridSearch))
}

/// Vectors supported on the first `dims` coordinates, greedily kept while
/// they stay in general position.
fn general_position_family(spec: &GroupSpec, q: u32, dims: u32, want: usize) -> Result<Vec<Elem>> {
    let mut family = Vec::new();
    for x in 1..q.pow(dims) {
        if family.len() == want {
            break;
        }
        family.push(Elem(x));
        if !is_general_position(spec, &family)? {
            family.pop();
        }
    }
    Ok(family)
}

fn power_witness(
    loc: &Localization,
    opts: SpanOptions,
    q: u32,
    m: u32,
    k: usize,
    variant: Variant,
    budget: Budget,
) -> Result<(Witness, Route)> {
    let spec = &loc.embedding.spec;
    let dims = match variant {
        Variant::Sqrt => case2_sqrt_params(q, k).0 as usize + 1,
        Variant::K3 => case2_k3_params(q, k).2,
    };
    let build = |basis: &[Elem], a_hat: Elem, b_hat: Elem| match variant {
        Variant::Sqrt => case2_sqrt(spec, basis, a_hat, b_hat, k),
        Variant::K3 => case2_k3(spec, basis, a_hat, b_hat, k),
    };
    if loc.subsystem.is_full() && m >= 3 {
        // shifts on the last two coordinates, vectors on the rest
        let unit = |i: u32| Elem(q.pow(i));
        let basis = match variant {
            Variant::Sqrt => (0..dims.min(m as usize - 2) as u32).map(unit).collect(),
            Variant::K3 => general_position_family(spec, q, m - 2, dims)?,
        };
        if basis.len() == dims {
            let w = build(&basis, unit(m - 2), unit(m - 1))?;
            if separated(&w) && fits(&w, loc, opts) {
                return Ok((w, Route::Direct));
            }
        }
    }
    if dims > m as usize {
        return Err(Error::PatternNotFound(format!("Z_{q}^{m} has no {dims}-dimensional subspace")));
    }
    let c = search_domain(loc, opts);
    let part = comb_subspace_find(&c, dims, budget)?.ok_or_else(|| {
        Error::PatternNotFound(format!("no {dims}-dimensional combinatorial subspace in the localized system"))
    })?;
    let sb = subspace_to_shift_and_basis(spec, &part)?;
    Ok((build(&sb.basis, sb.a_hat, sb.b_hat)?, Route::SubspaceSearch))
}

/// Localizes, searches for a grid or subspace pattern (or places the
/// witness directly when the cell is full), builds the matching witness,
/// pulls it back and certifies it against `system`.
pub fn witness_pipeline(
    system: &TripleSystem,
    k: usize,
    variant: Variant,
    config: &PipelineConfig,
) -> Result<PipelineResult> {
    check_k(k)?;
    let spec = system.spec();
    let embedding = match (&config.subgroup, spec) {
        (Some(e), _) => e.clone(),
        (None, GroupSpec::Table { .. }) => {
            return Err(Error::InvalidArgument("table groups need a cyclic or power subgroup to localize to".into()))
        }
        (None, _) => SubgroupEmbedding::identity(spec),
    };
    let loc = coset_localize(system, &embedding)?;
    let (local, route) = match embedding.spec {
        GroupSpec::Cyclic { n } => cyclic_witness(&loc, config.span, n, k, variant, config.budget)?,
        GroupSpec::Power { q, m } => power_witness(&loc, config.span, q, m, k, variant, config.budget)?,
        GroupSpec::Table { .. } => {
            return Err(Error::InvalidArgument("the localizing subgroup must be cyclic or elementary abelian".into()))
        }
    };

    let a: BTreeSet<Elem> = local.a.iter().map(|&x| loc.pull_a(x)).collect();
    let b: BTreeSet<Elem> = local.b.iter().map(|&y| loc.pull_b(y)).collect();
    let p: BTreeSet<Elem> = local.p.iter().map(|&z| loc.pull_p(z)).collect();
    let mut witness = Witness { a, b, p, span: 0 };
    let pairs: Vec<Pair> =
        witness.pairs(spec).into_iter().filter(|&(x, y)| counted(system, config.span, x, y)).collect();
    witness.span = pairs.len();

    let vertex_set = witness.vertex_set();
    let span_count = system.span_count_with(&vertex_set, config.span);
    let bound = variant.bound(k);
    if pairs.len() < k || span_count < k {
        return Err(Error::Certification(format!("witness spans {span_count} < {k} triples")));
    }
    if witness.size_total() > bound {
        return Err(Error::Certification(format!("witness has size {} > {bound}", witness.size_total())));
    }
    Ok(PipelineResult {
        spec: spec.clone(),
        variant,
        k,
        certificate: pairs[..k].to_vec(),
        span_count_as_sets: system.span_count_as_sets(&vertex_set, config.span),
        witness,
        vertex_set,
        span_count,
        bound,
        ell: loc.ell,
        r: loc.r,
        route,
    })
}

/// Outcome of re-checking an emitted witness against a system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecheckReport {
    pub claimed_span: usize,
    pub span: usize,
    pub claimed_size_total: usize,
    pub size_total: usize,
    pub span_count: usize,
    pub products_ok: bool,
    pub certificate_ok: bool,
    pub pass: bool,
}

fn field<'a>(doc: &'a Value, key: &str) -> Result<&'a Value> {
    doc.get(key).ok_or_else(|| Error::Parse(format!("witness JSON lacks `{key}`")))
}

fn count(doc: &Value, key: &str) -> Result<usize> {
    field(doc, key)?.as_u64().map(|v| v as usize).ok_or_else(|| Error::Parse(format!("`{key}` is not a count")))
}

fn elements(spec: &GroupSpec, doc: &Value, key: &str) -> Result<BTreeSet<Elem>> {
    field(doc, key)?
        .as_array()
        .ok_or_else(|| Error::Parse(format!("`{key}` is not an array")))?
        .iter()
        .map(|v| spec.element_from_json(v))
        .collect()
}

/// Recomputes span, size, `P ⊆ A·B` and the certificate of a witness JSON
/// document, trusting none of its derived fields.
pub fn recheck_witness(system: &TripleSystem, doc: &Value, opts: SpanOptions) -> Result<RecheckReport> {
    let spec = system.spec();
    let (a, b, p) = (elements(spec, doc, "A")?, elements(spec, doc, "B")?, elements(spec, doc, "P")?);
    let witness = Witness { a, b, p, span: 0 };
    let span = witness.pairs(spec).into_iter().filter(|&(x, y)| counted(system, opts, x, y)).count();
    let vertex_set = witness.vertex_set();
    let span_count = system.span_count_with(&vertex_set, opts);

    let k = count(doc, "k")?;
    let certificate = field(doc, "certificate")?
        .as_array()
        .ok_or_else(|| Error::Parse("`certificate` is not an array".into()))?
        .iter()
        .map(|pair| match pair.as_array().map(Vec::as_slice) {
            Some([x, y]) => Ok((spec.element_from_json(x)?, spec.element_from_json(y)?)),
            _ => Err(Error::Parse(format!("certificate entry {pair} is not a pair"))),
        })
        .collect::<Result<BTreeSet<Pair>>>()?;
    let certificate_ok = certificate.len() >= k
        && certificate
            .iter()
            .all(|&(x, y)| counted(system, opts, x, y) && system.triple(x, y).iter().all(|e| vertex_set.contains(e)));

    let products_ok = witness.p_within_products(spec);
    let claimed_span = count(doc, "span")?;
    let claimed_size_total = count(doc, "size_total")?;
    let size_total = witness.size_total();
    let pass =
        products_ok && certificate_ok && span == claimed_span && size_total == claimed_size_total && span_count >= k;
    Ok(RecheckReport {
        claimed_span,
        span,
        claimed_size_total,
        size_total,
        span_count,
        products_ok,
        certificate_ok,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use num_rational::Ratio;

    use super::*;

    fn run(spec: &GroupSpec, k: usize, variant: Variant) -> PipelineResult {
        let s = TripleSystem::full_system(spec).unwrap();
        witness_pipeline(&s, k, variant, &PipelineConfig::default()).unwrap()
    }

    #[test]
    fn full_cyclic_k3() {
        let r = run(&GroupSpec::cyclic(2048).unwrap(), 10, Variant::K3);
        assert_eq!(r.route, Route::Direct);
        assert_eq!(r.vertex_set.len(), 13);
        assert!(r.span_count >= 10);
        assert_eq!(r.certificate.len(), 10);
    }

    #[test]
    fn full_power_sqrt() {
        let r = run(&GroupSpec::power(3, 8).unwrap(), 9, Variant::Sqrt);
        assert_eq!(r.route, Route::Direct);
        assert!(r.witness.size_total() <= 12);
        assert_eq!(r.witness.span, 9);
    }

    #[test]
    fn dense_random_cyclic() {
        let g = GroupSpec::cyclic(512).unwrap();
        let s = TripleSystem::random_dense(&g, Ratio::new(19, 20), 1).unwrap();
        let r = witness_pipeline(&s, 4, Variant::Sqrt, &PipelineConfig::default()).unwrap();
        assert_eq!(r.route, Route::GridSearch);
        assert!(r.vertex_set.len() <= 16);
        assert!(r.span_count >= 4);
    }

    #[test]
    fn small_power_uses_subspace_search() {
        let g = GroupSpec::power(2, 2).unwrap();
        let s = TripleSystem::full_system(&g).unwrap();
        let err = witness_pipeline(&s, 3, Variant::K3, &PipelineConfig::default()).unwrap_err();
        assert!(matches!(err, Error::PatternNotFound(_)), "{err}");
        let r = run(&GroupSpec::power(3, 3).unwrap(), 4, Variant::K3);
        assert_eq!(r.route, Route::Direct);
    }

    #[test]
    fn tiny_cyclic_group_fails_honestly() {
        let s = TripleSystem::full_system(&GroupSpec::cyclic(7).unwrap()).unwrap();
        let err = witness_pipeline(&s, 100, Variant::K3, &PipelineConfig::default()).unwrap_err();
        assert!(matches!(err, Error::PatternNotFound(_) | Error::BudgetExceeded { .. }), "{err}");
    }

    #[test]
    fn localized_table_group() {
        let s3 = GroupSpec::table(crate::groups::tests::s3_table()).unwrap();
        let s = TripleSystem::full_system(&s3).unwrap();
        assert!(witness_pipeline(&s, 3, Variant::K3, &PipelineConfig::default()).is_err());
    }

    #[test]
    fn localized_cyclic_subgroup() {
        let g = GroupSpec::cyclic(96).unwrap();
        let sub = SubgroupEmbedding::cyclic(&g, Elem(2)).unwrap();
        let s = TripleSystem::full_system(&g).unwrap().filtered(|a, b| a.0 % 2 == 1 && b.0 % 2 == 0);
        let config = PipelineConfig { subgroup: Some(sub), ..PipelineConfig::default() };
        let r = witness_pipeline(&s, 6, Variant::K3, &config).unwrap();
        assert_eq!((r.ell, r.r), (Elem(1), Elem(0)));
        assert!(r.witness.a.iter().all(|a| a.0 % 2 == 1));
        assert!(r.span_count >= 6);
    }

    #[test]
    fn emitted_json_rechecks() {
        let g = GroupSpec::power(3, 8).unwrap();
        let s = TripleSystem::full_system(&g).unwrap();
        let r = witness_pipeline(&s, 11, Variant::K3, &PipelineConfig::default()).unwrap();
        let doc = r.to_json();
        let report = recheck_witness(&s, &doc, SpanOptions::default()).unwrap();
        assert!(report.pass, "{report:?}");

        let mut forged = doc.clone();
        forged["span"] = json!(r.witness.span + 1);
        assert!(!recheck_witness(&s, &forged, SpanOptions::default()).unwrap().pass);
    }
}
