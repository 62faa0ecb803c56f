//! Numerical invariants of the smoothing attached to an amd: node counts
//! and classes, Picard rank of `Y`, Euler and Betti numbers, degree,
//! `h^0(-K)` and `dim T^1`.

use std::collections::BTreeSet;

use num_traits::Zero;
use serde::Serialize;

use crate::amd::{parts, Amd, PolytopeContext};
use crate::arith::{self, Q};
use crate::error::AmdError;
use crate::fan::{refine_by_amd, singular_points, Fan3};

fn binom2(n: usize) -> i64 {
    (n * n.saturating_sub(1) / 2) as i64
}

/// `m_ij = k - [i ~_F j] - [i ~_G j]` for segments `i != j` (0-based).
pub fn node_multiplicity(k: i64, f: &[usize], g: &[usize], i: usize, j: usize) -> i64 {
    k - i64::from(f[i] == f[j]) - i64::from(g[i] == g[j])
}

/// Closed form `k C(l,2) - Σ C(|F_i|,2) - Σ C(|G_j|,2)` for an edge whose
/// unit segments are labeled by the two incident facets' partitions.
pub fn node_count_edge(k: i64, f: &[usize], g: &[usize]) -> Result<i64, AmdError> {
    if f.len() != g.len() {
        return Err(AmdError::LengthMismatch(f.len(), g.len()));
    }
    let total = k * binom2(f.len())
        - parts(f).values().map(|p| binom2(p.len())).sum::<i64>()
        - parts(g).values().map(|p| binom2(p.len())).sum::<i64>();
    if total < 0 {
        return Err(AmdError::Inconsistent(format!("negative node count {total}")));
    }
    Ok(total)
}

/// `Σ_{i<j} m_ij`, checking every multiplicity is nonnegative.
pub fn node_count_pairs(edge: usize, k: i64, f: &[usize], g: &[usize]) -> Result<i64, AmdError> {
    let mut n = 0;
    for j in 0..f.len() {
        for i in 0..j {
            let m = node_multiplicity(k, f, g, i, j);
            if m < 0 {
                return Err(AmdError::MatchingViolated {
                    edge,
                    i: i + 1,
                    j: j + 1,
                });
            }
            n += m;
        }
    }
    Ok(n)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeRecord {
    pub edge: usize,
    /// Segment indices, `1 <= i < j <= l_e`.
    pub i: usize,
    pub j: usize,
    pub multiplicity: i64,
    /// Coefficients over the rays of the fan of `Y`: pairing with a support
    /// function `φ` is `Σ class[r] φ(r)`.
    pub class: Vec<i64>,
}

fn ray_index(fan: &Fan3, p: [i64; 3]) -> Result<usize, AmdError> {
    fan.rays
        .binary_search(&p)
        .map_err(|_| AmdError::Inconsistent(format!("edge point {p:?} is not a ray")))
}

/// Class of the curve between segments `i < j` (1-based) of edge `e`:
/// `φ(p_{i-1}) - φ(p_i) - φ(p_{j-1}) + φ(p_j)`.
pub fn node_class(ctx: &PolytopeContext, fan: &Fan3, e: usize, i: usize, j: usize) -> Result<Vec<i64>, AmdError> {
    let pts = &ctx.edges[e].points;
    let mut class = vec![0; fan.rays.len()];
    for (k, c) in [(i - 1, 1), (i, -1), (j - 1, -1), (j, 1)] {
        class[ray_index(fan, pts[k])?] += c;
    }
    Ok(class)
}

/// Class of the fiber over segment boundary `k` (0 < k < l_e):
/// `φ(p_{k-1}) - 2φ(p_k) + φ(p_{k+1})`.
pub fn fiber_class(ctx: &PolytopeContext, fan: &Fan3, e: usize, k: usize) -> Result<Vec<i64>, AmdError> {
    let pts = &ctx.edges[e].points;
    let mut class = vec![0; fan.rays.len()];
    for (m, c) in [(k - 1, 1), (k, -2), (k + 1, 1)] {
        class[ray_index(fan, pts[m])?] += c;
    }
    Ok(class)
}

pub fn node_records(ctx: &PolytopeContext, amd: &Amd, fan: &Fan3) -> Result<Vec<NodeRecord>, AmdError> {
    let mut out = Vec::new();
    for (e, geom) in ctx.edges.iter().enumerate() {
        let [f, g] = amd.edge_partitions(ctx, e);
        let l = geom.length as usize;
        for j in 1..l {
            for i in 0..j {
                let m = node_multiplicity(geom.colength, f, g, i, j);
                if m < 0 {
                    return Err(AmdError::MatchingViolated {
                        edge: e,
                        i: i + 1,
                        j: j + 1,
                    });
                }
                if m > 0 {
                    out.push(NodeRecord {
                        edge: e,
                        i: i + 1,
                        j: j + 1,
                        multiplicity: m,
                        class: node_class(ctx, fan, e, i + 1, j + 1)?,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Linear constraints `φ(v_0) + φ(v_2) - φ(v_1) - φ(v_3) = 0`, one per
/// parallelogram cone, cutting out support functions on the fan.
pub fn pl_constraints(fan: &Fan3) -> Vec<Vec<Q>> {
    fan.cones
        .iter()
        .filter(|c| c.len() == 4)
        .map(|c| {
            let mut row = vec![Q::zero(); fan.rays.len()];
            for (k, s) in [(0, 1), (1, -1), (2, 1), (3, -1)] {
                row[c[k]] += arith::q(s);
            }
            row
        })
        .collect()
}

/// Basis of the space of ray values that are linear on every maximal cone.
pub fn pl_space(fan: &Fan3) -> Vec<Vec<Q>> {
    arith::kernel(&pl_constraints(fan), fan.rays.len())
}

pub fn picard_rank(fan: &Fan3) -> i64 {
    let c = pl_constraints(fan);
    fan.rays.len() as i64 - arith::rank(&c, fan.rays.len()) as i64 - 3
}

/// Ray values of support functions of the spanning fan of `P`, i.e. linear
/// on each facet cone, restricted to the rays of `fan`.
pub fn pullback_space(ctx: &PolytopeContext, fan: &Fan3) -> Vec<Vec<Q>> {
    let p = &ctx.polytope;
    let nf = p.facets().len();
    // Unknowns: a linear form m_F per facet; m_F = m_G on shared edges.
    let mut rows = Vec::new();
    for edge in p.edges() {
        let [f, g] = edge.facets;
        for &v in &edge.vertices {
            let x = p.vertices()[v];
            let mut row = vec![Q::zero(); 3 * nf];
            for k in 0..3 {
                row[3 * f + k] = arith::q(x[k]);
                row[3 * g + k] = arith::q(-x[k]);
            }
            rows.push(row);
        }
    }
    let mut ray_facet = vec![0; fan.rays.len()];
    for (c, cone) in fan.cones.iter().enumerate() {
        for &r in cone {
            ray_facet[r] = fan.cone_facets[c];
        }
    }
    arith::kernel(&rows, 3 * nf)
        .into_iter()
        .map(|m| {
            fan.rays
                .iter()
                .zip(&ray_facet)
                .map(|(x, &f)| (0..3).map(|k| &m[3 * f + k] * arith::q(x[k])).sum())
                .collect()
        })
        .collect()
}

fn pair(class: &[i64], phi: &[Q]) -> Q {
    class.iter().zip(phi).map(|(&c, x)| arith::q(c) * x).sum()
}

/// `Σ_F r(F) + Σ_e l_e (k_e - 1)`, with `r(F)` the number of summands.
pub fn t1_dimension(ctx: &PolytopeContext, amd: &Amd) -> i64 {
    let facets: i64 = amd
        .choices
        .iter()
        .map(|c| c.decomposition().num_summands() as i64)
        .sum();
    let edges: i64 = ctx.edges.iter().map(|g| g.length * (g.colength - 1)).sum();
    facets + edges
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SmoothingInvariants {
    pub n: i64,
    pub q: i64,
    #[serde(rename = "eY")]
    pub e_y: i64,
    #[serde(rename = "eYt")]
    pub e_yt: i64,
    #[serde(rename = "eXeta")]
    pub e_xeta: i64,
    #[serde(rename = "picY")]
    pub pic_y: i64,
    pub sigma: i64,
    pub b2: i64,
    pub b3: i64,
    pub degree: i64,
    pub h0: u64,
    #[serde(rename = "t1dim")]
    pub t1_dim: i64,
}

/// Everything computed on the way to the invariants.
#[derive(Debug, Clone)]
pub struct InvariantReport {
    pub fan: Fan3,
    pub nodes: Vec<NodeRecord>,
    /// `b_3` of the smoothing `Y_t` of `Y`.
    pub b3_yt: i64,
    pub invariants: SmoothingInvariants,
}

fn inconsistent(msg: impl Into<String>) -> AmdError {
    AmdError::Inconsistent(msg.into())
}

pub fn invariant_report(ctx: &PolytopeContext, amd: &Amd) -> Result<InvariantReport, AmdError> {
    let fan = refine_by_amd(ctx, amd)?;
    let q = singular_points(&fan)?.len() as i64;
    let nodes = node_records(ctx, amd, &fan)?;

    let mut n = 0;
    for (e, geom) in ctx.edges.iter().enumerate() {
        let [f, g] = amd.edge_partitions(ctx, e);
        let closed = node_count_edge(geom.colength, f, g)?;
        if closed != node_count_pairs(e, geom.colength, f, g)? {
            return Err(inconsistent(format!("node count identity fails at edge {e}")));
        }
        n += closed;
    }
    if n != nodes.iter().map(|r| r.multiplicity).sum::<i64>() {
        return Err(inconsistent("node records disagree with node count"));
    }

    let nrays = fan.rays.len();
    let constraints = pl_constraints(&fan);
    let rank_c = arith::rank(&constraints, nrays);
    let pic_y = nrays as i64 - rank_c as i64 - 3;
    let classes: BTreeSet<&Vec<i64>> = nodes.iter().map(|r| &r.class).collect();
    let mut stacked = constraints;
    stacked.extend(
        classes
            .iter()
            .map(|c| c.iter().map(|&x| arith::q(x)).collect::<Vec<Q>>()),
    );
    let sigma = (arith::rank(&stacked, nrays) - rank_c) as i64;
    if sigma > (classes.len() as i64).min(pic_y) {
        return Err(inconsistent("node class rank exceeds its bounds"));
    }
    for phi in pullback_space(ctx, &fan) {
        if classes.iter().any(|c| !pair(c, &phi).is_zero()) {
            return Err(inconsistent(
                "node class does not vanish on pulled back support functions",
            ));
        }
    }

    let e_y = fan.cones.len() as i64;
    let e_yt = e_y - q;
    let b3_yt = 2 + 2 * pic_y - e_yt;
    let b2 = pic_y - sigma;
    let e_xeta = e_yt - 2 * n;
    let b3 = 2 + 2 * b2 - e_xeta;
    if b3 != b3_yt + 2 * (n - sigma) {
        return Err(inconsistent("b3 double entry fails"));
    }
    if b3 < 0 || b3 % 2 != 0 || b3_yt < 0 || b2 < 1 {
        return Err(inconsistent(format!("b2 = {b2}, b3 = {b3}, b3(Y_t) = {b3_yt}")));
    }
    let (degree, h0) = ctx.anticanonical()?;
    Ok(InvariantReport {
        fan,
        nodes,
        b3_yt,
        invariants: SmoothingInvariants {
            n,
            q,
            e_y,
            e_yt,
            e_xeta,
            pic_y,
            sigma,
            b2,
            b3,
            degree,
            h0,
            t1_dim: t1_dimension(ctx, amd),
        },
    })
}

pub fn betti_numbers(ctx: &PolytopeContext, amd: &Amd) -> Result<SmoothingInvariants, AmdError> {
    invariant_report(ctx, amd).map(|r| r.invariants)
}
