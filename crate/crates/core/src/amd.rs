//! Admissible Minkowski decomposition data: a decomposition and a coherent
//! fine mixed subdivision per facet, subject to the matching condition at
//! every dull edge.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::ops::ControlFlow;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::cayley::{enumerate_fine_coherent_subdivisions, FineMixedSubdivision};
use crate::error::{AmdError, CayleyError, GeometryError};
use crate::geometry::{EdgeGeometry, FacetChart, LatticePolygon, LatticePolytope3};
use crate::minkowski::{enumerate_admissible_decompositions, AdmissibleDecomposition};

/// Decompositions of a facet polygon and, lazily, the subdivisions of each.
pub struct FacetSolutions {
    pub decompositions: Vec<AdmissibleDecomposition>,
    subdivisions: Vec<OnceLock<Result<Arc<Vec<FineMixedSubdivision>>, CayleyError>>>,
    seed: u64,
}

impl FacetSolutions {
    fn new(polygon: &LatticePolygon, seed: u64) -> Self {
        let decompositions = enumerate_admissible_decompositions(polygon);
        let subdivisions = decompositions.iter().map(|_| OnceLock::new()).collect();
        FacetSolutions {
            decompositions,
            subdivisions,
            seed,
        }
    }

    pub fn subdivisions(&self, d: usize) -> Result<Arc<Vec<FineMixedSubdivision>>, CayleyError> {
        self.subdivisions[d]
            .get_or_init(|| enumerate_fine_coherent_subdivisions(&self.decompositions[d], self.seed).map(Arc::new))
            .clone()
    }
}

/// Facet solutions shared between polytopes, keyed by the normal-form
/// facet polygon.
#[derive(Clone, Default)]
pub struct SolutionCache {
    map: Arc<Mutex<HashMap<LatticePolygon, Arc<FacetSolutions>>>>,
}

impl SolutionCache {
    pub fn get(&self, polygon: &LatticePolygon, seed: u64) -> Arc<FacetSolutions> {
        let mut map = self.map.lock().expect("cache lock");
        map.entry(polygon.clone())
            .or_insert_with(|| Arc::new(FacetSolutions::new(polygon, seed)))
            .clone()
    }
}

/// One admissible (decomposition, subdivision) pair of a facet, with its
/// edge partitions in the global segment indexing of each edge.
/// Decomposition, cell polygons and relabeled edge partitions.
type OptionClassKey = (usize, Vec<LatticePolygon>, Vec<Vec<usize>>);

#[derive(Clone)]
pub struct FacetOption {
    pub decomposition: usize,
    pub subdivision: usize,
    /// `(global edge, summand per unit segment from p_0)` per chart edge.
    pub partitions: Vec<(usize, Vec<usize>)>,
    /// Index of the option's class up to relabeling summands.
    pub class: usize,
}

impl FacetOption {
    pub fn partition(&self, edge: usize) -> Option<&[usize]> {
        self.partitions
            .iter()
            .find(|(e, _)| *e == edge)
            .map(|(_, p)| p.as_slice())
    }
}

pub struct FacetData {
    pub chart: FacetChart,
    /// `(global edge, reversed)` per chart edge; reversed when the chart
    /// traverses the edge from its lexicographically larger endpoint.
    pub edges: Vec<(usize, bool)>,
    solutions: Arc<FacetSolutions>,
    options: OnceLock<Result<Arc<Vec<FacetOption>>, CayleyError>>,
}

impl FacetData {
    pub fn solutions(&self) -> &FacetSolutions {
        &self.solutions
    }
}

/// Reflexive polytope with the per-facet and per-edge data the pipeline uses.
pub struct PolytopeContext {
    pub polytope: LatticePolytope3,
    pub edges: Vec<EdgeGeometry>,
    pub facets: Vec<FacetData>,
    anticanonical: OnceLock<Result<(i64, u64), GeometryError>>,
}

impl PolytopeContext {
    pub fn new(p: &LatticePolytope3, seed: u64) -> Result<Self, AmdError> {
        Self::with_cache(p, seed, &SolutionCache::default())
    }

    pub fn with_cache(p: &LatticePolytope3, seed: u64, cache: &SolutionCache) -> Result<Self, AmdError> {
        p.require_reflexive()?;
        let edges: Vec<EdgeGeometry> = (0..p.edges().len()).map(|e| p.edge_geometry(e)).collect();
        let mut facets = Vec::with_capacity(p.facets().len());
        for f in 0..p.facets().len() {
            let chart = p.facet_chart(f)?;
            let poly = &chart.polygon;
            let vindex = |x| {
                p.vertices()
                    .iter()
                    .position(|v| *v == x)
                    .expect("chart vertex is a polytope vertex")
            };
            let fedges = (0..poly.num_edges())
                .map(|i| {
                    let (a, b) = poly.edge(i);
                    let (va, vb) = (vindex(chart.to_lattice(a)), vindex(chart.to_lattice(b)));
                    let e = p.edge_between(va, vb).ok_or(AmdError::Gluing(usize::MAX))?;
                    Ok((e, p.edges()[e].vertices[0] != va))
                })
                .collect::<Result<Vec<_>, AmdError>>()?;
            let solutions = cache.get(poly, seed);
            facets.push(FacetData {
                chart,
                edges: fedges,
                solutions,
                options: OnceLock::new(),
            });
        }
        Ok(PolytopeContext {
            polytope: p.clone(),
            edges,
            facets,
            anticanonical: OnceLock::new(),
        })
    }

    /// `(-K)^3` and `h^0(-K)`: normalized volume and lattice point count of
    /// the polar polytope.
    pub fn anticanonical(&self) -> Result<(i64, u64), GeometryError> {
        self.anticanonical
            .get_or_init(|| {
                let dual = self
                    .polytope
                    .polar_dual()?
                    .to_lattice()
                    .ok_or(GeometryError::NotReflexive)??;
                Ok((dual.normalized_volume(), dual.lattice_points().len() as u64))
            })
            .clone()
    }

    pub fn is_dull(&self, e: usize) -> bool {
        self.edges[e].colength == 1
    }

    pub fn dull_edges(&self) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.is_dull(e)).collect()
    }

    /// The two facets incident to edge `e`.
    pub fn edge_facets(&self, e: usize) -> [usize; 2] {
        self.polytope.edges()[e].facets
    }

    pub fn facet_options(&self, f: usize) -> Result<Arc<Vec<FacetOption>>, CayleyError> {
        self.facets[f]
            .options
            .get_or_init(|| self.build_options(f).map(Arc::new))
            .clone()
    }

    fn build_options(&self, f: usize) -> Result<Vec<FacetOption>, CayleyError> {
        let data = &self.facets[f];
        let sol = &data.solutions;
        let mut out = Vec::new();
        let mut classes: HashMap<OptionClassKey, usize> = HashMap::new();
        for d in 0..sol.decompositions.len() {
            let subs = sol.subdivisions(d)?;
            for (s, sub) in subs.iter().enumerate() {
                let partitions: Vec<(usize, Vec<usize>)> = data
                    .edges
                    .iter()
                    .zip(&sub.edge_partitions)
                    .map(|(&(e, rev), local)| {
                        let mut p = local.clone();
                        if rev {
                            p.reverse();
                        }
                        (e, p)
                    })
                    .collect();
                let key = (
                    d,
                    sub.cell_key(),
                    partitions.iter().map(|(_, p)| canonical_labels(p)).collect(),
                );
                let next = classes.len();
                let class = *classes.entry(key).or_insert(next);
                out.push(FacetOption {
                    decomposition: d,
                    subdivision: s,
                    partitions,
                    class,
                });
            }
        }
        Ok(out)
    }
}

/// Relabel parts by order of first occurrence.
pub fn canonical_labels(p: &[usize]) -> Vec<usize> {
    let mut map = HashMap::new();
    p.iter()
        .map(|&x| {
            let n = map.len();
            *map.entry(x).or_insert(n)
        })
        .collect()
}

/// Parts of a partition given as a label per segment (segments 0-based).
pub fn parts(p: &[usize]) -> BTreeMap<usize, Vec<usize>> {
    let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (s, &j) in p.iter().enumerate() {
        out.entry(j).or_default().push(s);
    }
    out
}

/// First pair of parts `(i, j)` with `|L^F_i ∩ L^G_j| >= 2`, if any.
pub fn matching_violation(f: &[usize], g: &[usize]) -> Result<Option<(usize, usize)>, AmdError> {
    if f.len() != g.len() {
        return Err(AmdError::LengthMismatch(f.len(), g.len()));
    }
    let mut seen = HashSet::new();
    for (&a, &b) in f.iter().zip(g) {
        if !seen.insert((a, b)) {
            return Ok(Some((a, b)));
        }
    }
    Ok(None)
}

pub fn matching_condition(f: &[usize], g: &[usize]) -> Result<bool, AmdError> {
    Ok(matching_violation(f, g)?.is_none())
}

#[derive(Clone)]
pub struct FacetChoice {
    pub facet: usize,
    pub option: FacetOption,
    solutions: Arc<FacetSolutions>,
    subdivisions: Arc<Vec<FineMixedSubdivision>>,
}

impl FacetChoice {
    pub fn decomposition(&self) -> &AdmissibleDecomposition {
        &self.solutions.decompositions[self.option.decomposition]
    }

    pub fn subdivision(&self) -> &FineMixedSubdivision {
        &self.subdivisions[self.option.subdivision]
    }
}

#[derive(Clone)]
pub struct Amd {
    /// Indexed by facet.
    pub choices: Vec<FacetChoice>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeMatch {
    pub edge: usize,
    pub pass: bool,
    pub violation: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchReport {
    pub edges: Vec<EdgeMatch>,
}

impl MatchReport {
    pub fn passed(&self) -> bool {
        self.edges.iter().all(|e| e.pass)
    }
}

impl Amd {
    /// The partitions of `L^e` induced from the two incident facets.
    pub fn edge_partitions(&self, ctx: &PolytopeContext, e: usize) -> [&[usize]; 2] {
        let [f, g] = ctx.edge_facets(e);
        [
            self.choices[f].option.partition(e).expect("incident facet"),
            self.choices[g].option.partition(e).expect("incident facet"),
        ]
    }

    /// Independent re-check of the matching condition at every dull edge.
    pub fn match_report(&self, ctx: &PolytopeContext) -> Result<MatchReport, AmdError> {
        let mut edges = Vec::new();
        for e in ctx.dull_edges() {
            let [a, b] = self.edge_partitions(ctx, e);
            let violation = matching_violation(a, b)?;
            edges.push(EdgeMatch {
                edge: e,
                pass: violation.is_none(),
                violation,
            });
        }
        Ok(MatchReport { edges })
    }

    /// Class of each facet choice up to relabeling summands.
    pub fn dedup_key(&self) -> Vec<usize> {
        self.choices.iter().map(|c| c.option.class).collect()
    }

    pub fn to_json(&self, ctx: &PolytopeContext) -> Result<serde_json::Value, AmdError> {
        let choices: Vec<serde_json::Value> = self
            .choices
            .iter()
            .map(|c| {
                let parts: BTreeMap<String, &[usize]> = c
                    .option
                    .partitions
                    .iter()
                    .map(|(e, p)| (e.to_string(), p.as_slice()))
                    .collect();
                serde_json::json!({
                    "facet": c.facet,
                    "decomposition": c.decomposition().to_json(),
                    "subdivision": c.subdivision().to_json(),
                    "edge_partitions": parts,
                })
            })
            .collect();
        let report = self.match_report(ctx)?;
        Ok(serde_json::json!({
            "choices": choices,
            "match": {
                "dull_edges": report.edges.len(),
                "passed": report.passed(),
            },
        }))
    }
}

#[derive(Debug, Clone, Default)]
pub struct AmdOptions {
    /// Stop after this many amd; 0 means unlimited.
    pub limit: usize,
    pub dedup: bool,
    /// Enforce the matching condition at every edge, not only dull ones.
    pub strict: bool,
    /// Worker threads; 0 or 1 runs on the calling thread.
    pub jobs: usize,
}

pub struct AmdEngine<'a> {
    ctx: &'a PolytopeContext,
    order: Vec<usize>,
}

type Assigned = Vec<Option<(FacetOption, Arc<Vec<FineMixedSubdivision>>)>>;

impl<'a> AmdEngine<'a> {
    pub fn new(ctx: &'a PolytopeContext) -> Self {
        AmdEngine {
            ctx,
            order: facet_order(ctx),
        }
    }

    /// Facet processing order: greedily maximize dull edges shared with
    /// facets already placed.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    fn compatible(&self, f: usize, o: &FacetOption, assigned: &Assigned, strict: bool) -> bool {
        o.partitions.iter().all(|(e, p)| {
            if !strict && !self.ctx.is_dull(*e) {
                return true;
            }
            let [a, b] = self.ctx.edge_facets(*e);
            let g = if a == f { b } else { a };
            match &assigned[g] {
                None => true,
                Some((go, _)) => {
                    let q = go.partition(*e).expect("incident facet");
                    matches!(matching_violation(p, q), Ok(None))
                }
            }
        })
    }

    fn build(&self, assigned: &Assigned) -> Amd {
        Amd {
            choices: assigned
                .iter()
                .enumerate()
                .map(|(f, a)| {
                    let (o, subs) = a.as_ref().expect("complete assignment");
                    FacetChoice {
                        facet: f,
                        option: o.clone(),
                        solutions: self.ctx.facets[f].solutions.clone(),
                        subdivisions: subs.clone(),
                    }
                })
                .collect(),
        }
    }

    fn dfs(
        &self,
        depth: usize,
        assigned: &mut Assigned,
        strict: bool,
        visit: &mut dyn FnMut(&Self, &Assigned) -> ControlFlow<()>,
    ) -> Result<ControlFlow<()>, AmdError> {
        if depth == self.order.len() {
            return Ok(visit(self, assigned));
        }
        let f = self.order[depth];
        let options = self.ctx.facet_options(f)?;
        for o in options.iter() {
            if !self.compatible(f, o, assigned, strict) {
                continue;
            }
            let subs = self.ctx.facets[f].solutions.subdivisions(o.decomposition)?;
            assigned[f] = Some((o.clone(), subs));
            let flow = self.dfs(depth + 1, assigned, strict, visit)?;
            assigned[f] = None;
            if flow.is_break() {
                return Ok(flow);
            }
        }
        Ok(ControlFlow::Continue(()))
    }

    /// Whether any facet lacks an admissible decomposition; then no amd exists.
    fn trivially_empty(&self) -> bool {
        self.ctx.facets.iter().any(|f| f.solutions.decompositions.is_empty())
    }

    /// Stream amd to `visit` in deterministic order; returns how many were
    /// delivered.
    pub fn for_each(
        &self,
        opts: &AmdOptions,
        mut visit: impl FnMut(&Amd) -> ControlFlow<()>,
    ) -> Result<usize, AmdError> {
        if self.trivially_empty() {
            return Ok(0);
        }
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut delivered = 0usize;
        let mut deliver = |amd: &Amd| -> ControlFlow<()> {
            if opts.dedup && !seen.insert(amd.dedup_key()) {
                return ControlFlow::Continue(());
            }
            delivered += 1;
            if visit(amd).is_break() || (opts.limit > 0 && delivered >= opts.limit) {
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        };
        if opts.jobs <= 1 || self.order.is_empty() {
            let mut assigned: Assigned = vec![None; self.ctx.facets.len()];
            let _ = self.dfs(0, &mut assigned, opts.strict, &mut |eng, a| deliver(&eng.build(a)))?;
        } else {
            for batch in self.parallel_branches(opts)? {
                for amd in &batch {
                    if deliver(amd).is_break() {
                        return Ok(delivered);
                    }
                }
            }
        }
        Ok(delivered)
    }

    /// Complete the search below each first-level choice on a worker pool,
    /// returning per-branch results in branch order.
    fn parallel_branches(&self, opts: &AmdOptions) -> Result<Vec<Vec<Amd>>, AmdError> {
        let f0 = self.order[0];
        let first = self.ctx.facet_options(f0)?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(|e| AmdError::Inconsistent(e.to_string()))?;
        let branch_limit = if opts.dedup { 0 } else { opts.limit };
        pool.install(|| {
            first
                .par_iter()
                .map(|o| {
                    let mut assigned: Assigned = vec![None; self.ctx.facets.len()];
                    let subs = self.ctx.facets[f0].solutions.subdivisions(o.decomposition)?;
                    assigned[f0] = Some((o.clone(), subs));
                    let mut out = Vec::new();
                    let _ = self.dfs(1, &mut assigned, opts.strict, &mut |eng, a| {
                        out.push(eng.build(a));
                        if branch_limit > 0 && out.len() >= branch_limit {
                            ControlFlow::Break(())
                        } else {
                            ControlFlow::Continue(())
                        }
                    })?;
                    Ok(out)
                })
                .collect()
        })
    }

    pub fn enumerate(&self, opts: &AmdOptions) -> Result<Vec<Amd>, AmdError> {
        let mut out = Vec::new();
        self.for_each(opts, |a| {
            out.push(a.clone());
            ControlFlow::Continue(())
        })?;
        Ok(out)
    }

    /// Number of amd (capped by `opts.limit`) without materializing them.
    pub fn count(&self, opts: &AmdOptions) -> Result<u64, AmdError> {
        if self.trivially_empty() {
            return Ok(0);
        }
        if opts.dedup {
            return self.for_each(opts, |_| ControlFlow::Continue(())).map(|n| n as u64);
        }
        let limit = opts.limit as u64;
        let count_branch = |assigned: &mut Assigned, depth: usize| -> Result<u64, AmdError> {
            let mut n = 0u64;
            let _ = self.dfs(depth, assigned, opts.strict, &mut |_, _| {
                n += 1;
                if limit > 0 && n >= limit {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            })?;
            Ok(n)
        };
        if opts.jobs <= 1 || self.order.is_empty() {
            let mut assigned: Assigned = vec![None; self.ctx.facets.len()];
            return count_branch(&mut assigned, 0);
        }
        let f0 = self.order[0];
        let first = self.ctx.facet_options(f0)?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(|e| AmdError::Inconsistent(e.to_string()))?;
        let counts: Result<Vec<u64>, AmdError> = pool.install(|| {
            first
                .par_iter()
                .map(|o| {
                    let mut assigned: Assigned = vec![None; self.ctx.facets.len()];
                    let subs = self.ctx.facets[f0].solutions.subdivisions(o.decomposition)?;
                    assigned[f0] = Some((o.clone(), subs));
                    count_branch(&mut assigned, 1)
                })
                .collect()
        });
        let total: u64 = counts?.iter().sum();
        Ok(if limit > 0 { total.min(limit) } else { total })
    }

    pub fn exists(&self) -> Result<bool, AmdError> {
        let opts = AmdOptions {
            limit: 1,
            ..AmdOptions::default()
        };
        Ok(self.count(&opts)? > 0)
    }
}

fn facet_order(ctx: &PolytopeContext) -> Vec<usize> {
    let n = ctx.facets.len();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let shared = |f: usize, placed: &[bool]| -> (usize, usize) {
        let mut dull = 0;
        let mut any = 0;
        for &(e, _) in &ctx.facets[f].edges {
            let [a, b] = ctx.edge_facets(e);
            let g = if a == f { b } else { a };
            if placed[g] {
                any += 1;
                if ctx.is_dull(e) {
                    dull += 1;
                }
            }
        }
        (dull, any)
    };
    while order.len() < n {
        let best = (0..n)
            .filter(|&f| !placed[f])
            .max_by(|&a, &b| shared(a, &placed).cmp(&shared(b, &placed)).then(b.cmp(&a)))
            .expect("unplaced facet");
        placed[best] = true;
        order.push(best);
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point3;

    pub(crate) fn cube() -> LatticePolytope3 {
        let pts: Vec<Point3> = (0..8)
            .map(|i| [1 - 2 * (i & 1), 1 - (i & 2), 1 - (i & 4) / 2])
            .collect();
        LatticePolytope3::hull(&pts).unwrap()
    }

    fn simplex64() -> LatticePolytope3 {
        LatticePolytope3::hull(&[[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, -1, -1]]).unwrap()
    }

    fn no_amd() -> LatticePolytope3 {
        LatticePolytope3::hull(&[[-1, -1, -1], [2, -1, -1], [-1, 1, -1], [0, 0, 1]]).unwrap()
    }

    #[test]
    fn matching_examples() {
        assert!(matching_condition(&[0, 1, 2], &[5, 6, 7]).unwrap());
        assert!(!matching_condition(&[0, 0], &[0, 0]).unwrap());
        // {{1,3},{2,4}} vs {{1,2},{3,4}}
        assert!(matching_condition(&[0, 1, 0, 1], &[0, 0, 1, 1]).unwrap());
        assert_eq!(matching_condition(&[0], &[0, 1]), Err(AmdError::LengthMismatch(1, 2)));
    }

    #[test]
    fn dull_edges() {
        let c = PolytopeContext::new(&cube(), 0).unwrap();
        assert_eq!(c.dull_edges().len(), 12);
        let s = PolytopeContext::new(&simplex64(), 0).unwrap();
        assert!(s.dull_edges().is_empty());
    }

    #[test]
    fn existence() {
        let p = PolytopeContext::new(&no_amd(), 0).unwrap();
        assert!(!AmdEngine::new(&p).exists().unwrap());
        let s = PolytopeContext::new(&simplex64(), 0).unwrap();
        let e = AmdEngine::new(&s);
        assert!(e.exists().unwrap());
        assert_eq!(e.count(&AmdOptions::default()).unwrap(), 1);
    }

    #[test]
    fn cube_amd() {
        let c = PolytopeContext::new(&cube(), 0).unwrap();
        let e = AmdEngine::new(&c);
        assert_eq!(e.count(&AmdOptions::default()).unwrap(), 4096);
        let dedup = AmdOptions {
            dedup: true,
            ..AmdOptions::default()
        };
        assert_eq!(e.count(&dedup).unwrap(), 1);
        let some = e
            .enumerate(&AmdOptions {
                limit: 50,
                ..AmdOptions::default()
            })
            .unwrap();
        assert_eq!(some.len(), 50);
        for a in &some {
            let r = a.match_report(&c).unwrap();
            assert_eq!(r.edges.len(), 12);
            assert!(r.passed());
        }
        let par = AmdOptions {
            jobs: 3,
            ..AmdOptions::default()
        };
        assert_eq!(e.count(&par).unwrap(), 4096);
    }
}
