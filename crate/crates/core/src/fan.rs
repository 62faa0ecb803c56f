//! The spanning fan of a reflexive polytope and its refinement by an amd:
//! the fan of the induced partial resolution `Y`.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::amd::{Amd, PolytopeContext};
use crate::arith::{cross, det3, dot3, gcd_slice, sub3};
use crate::error::AmdError;
use crate::geometry::{LatticePolytope3, Point3};

/// A complete fan given by its maximal cones, each the cone over a lattice
/// polygon at height one; rays are listed in cyclic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fan3 {
    /// Sorted lexicographically.
    pub rays: Vec<Point3>,
    pub cones: Vec<Vec<usize>>,
    /// Facet of `P` containing each maximal cone.
    pub cone_facets: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "type")]
pub enum ConeClass {
    BasicSimplex,
    UnitParallelogram { interior_points: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SingularPoint {
    pub cone: usize,
    /// Index of the qODP; 1 for an ODP.
    pub a: u64,
}

impl Fan3 {
    fn from_cones(cones: Vec<(usize, Vec<Point3>)>) -> Self {
        let rays: Vec<Point3> = cones
            .iter()
            .flat_map(|(_, c)| c.iter().copied())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index: BTreeMap<Point3, usize> = rays.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let (cone_facets, cones) = cones
            .into_iter()
            .map(|(f, c)| (f, c.iter().map(|r| index[r]).collect()))
            .unzip();
        Fan3 {
            rays,
            cones,
            cone_facets,
        }
    }

    pub fn cone_rays(&self, c: usize) -> Vec<Point3> {
        self.cones[c].iter().map(|&r| self.rays[r]).collect()
    }

    /// Two-dimensional cones with the maximal cones containing them.
    pub fn walls(&self) -> BTreeMap<(usize, usize), Vec<usize>> {
        let mut out: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (ci, c) in self.cones.iter().enumerate() {
            for k in 0..c.len() {
                let (a, b) = (c[k], c[(k + 1) % c.len()]);
                out.entry((a.min(b), a.max(b))).or_default().push(ci);
            }
        }
        out
    }

    pub fn classify(&self) -> Result<Vec<ConeClass>, AmdError> {
        (0..self.cones.len())
            .map(|c| {
                classify_cone(&self.cone_rays(c)).ok_or(AmdError::BadCone {
                    cone: c,
                    rays: self.cones[c].len(),
                })
            })
            .collect()
    }

    /// Exact ray shooting: each of `samples` random directions lies in the
    /// interior of exactly one maximal cone. Directions hitting a lower
    /// dimensional cone are resampled.
    pub fn is_complete(&self, samples: usize, seed: u64) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let simplices: Vec<(usize, [Point3; 3])> = self
            .cones
            .iter()
            .enumerate()
            .flat_map(|(ci, c)| {
                let r: Vec<Point3> = c.iter().map(|&i| self.rays[i]).collect();
                (1..r.len() - 1).map(move |k| (ci, [r[0], r[k], r[k + 1]]))
            })
            .collect();
        let mut done = 0;
        while done < samples {
            let d: Point3 = [
                rng.gen_range(-1000..=1000),
                rng.gen_range(-1000..=1000),
                rng.gen_range(-1000..=1000),
            ];
            if d == [0, 0, 0] {
                continue;
            }
            let mut hits = BTreeSet::new();
            let mut degenerate = false;
            for (ci, [a, b, c]) in &simplices {
                let det = det3(*a, *b, *c);
                if det == 0 {
                    return false;
                }
                let coeffs = [det3(d, *b, *c), det3(*a, d, *c), det3(*a, *b, d)];
                if coeffs.iter().all(|x| x.signum() == det.signum()) {
                    hits.insert(*ci);
                } else if coeffs.contains(&0) && coeffs.iter().all(|x| *x == 0 || x.signum() == det.signum()) {
                    degenerate = true;
                }
            }
            if degenerate {
                continue;
            }
            if hits.len() != 1 {
                return false;
            }
            done += 1;
        }
        true
    }
}

/// Cones over the facets of `P`.
pub fn spanning_fan(p: &LatticePolytope3) -> Fan3 {
    Fan3::from_cones(
        p.facets()
            .iter()
            .enumerate()
            .map(|(f, facet)| (f, facet.vertices.iter().map(|&v| p.vertices()[v]).collect()))
            .collect(),
    )
}

/// Refine each facet cone by the cells of the facet's induced subdivision.
pub fn refine_by_amd(ctx: &PolytopeContext, amd: &Amd) -> Result<Fan3, AmdError> {
    let mut cones = Vec::new();
    let mut boundary: Vec<BTreeMap<usize, BTreeSet<[Point3; 2]>>> = Vec::new();
    for (f, choice) in amd.choices.iter().enumerate() {
        let chart = &ctx.facets[f].chart;
        let mut on_edges: BTreeMap<usize, BTreeSet<[Point3; 2]>> = BTreeMap::new();
        for cell in &choice.subdivision().induced_subdivision().cells {
            let rays: Vec<Point3> = cell.vertices().iter().map(|&v| chart.to_lattice(v)).collect();
            for k in 0..rays.len() {
                let (a, b) = (rays[k], rays[(k + 1) % rays.len()]);
                for &(e, _) in &ctx.facets[f].edges {
                    let pts = &ctx.edges[e].points;
                    if pts.contains(&a) && pts.contains(&b) {
                        on_edges.entry(e).or_default().insert([a.min(b), a.max(b)]);
                    }
                }
            }
            cones.push((f, rays));
        }
        boundary.push(on_edges);
    }
    for (e, geom) in ctx.edges.iter().enumerate() {
        let unit: BTreeSet<[Point3; 2]> = geom
            .points
            .windows(2)
            .map(|w| [w[0].min(w[1]), w[0].max(w[1])])
            .collect();
        let [f, g] = ctx.edge_facets(e);
        if boundary[f].get(&e) != Some(&unit) || boundary[g].get(&e) != Some(&unit) {
            return Err(AmdError::Gluing(e));
        }
    }
    Ok(Fan3::from_cones(cones))
}

/// Classify the cone over a polygon with the given vertices (any order).
pub fn classify_cone(rays: &[Point3]) -> Option<ConeClass> {
    match rays.len() {
        3 => (det3(rays[0], rays[1], rays[2]).abs() == 1).then_some(ConeClass::BasicSimplex),
        4 => {
            let (p, u, v) = parallelogram(rays)?;
            if gcd_slice(&u) != 1 || gcd_slice(&v) != 1 {
                return None;
            }
            let normal = cross(u, v);
            let g = gcd_slice(&normal);
            if g == 0 {
                return None;
            }
            let level = dot3(p, normal) / g;
            if level.abs() != 1 || dot3(p, normal) % g != 0 {
                return None;
            }
            Some(ConeClass::UnitParallelogram {
                interior_points: (det3(p, u, v).unsigned_abs()) - 1,
            })
        }
        _ => None,
    }
}

/// A vertex and the two edge vectors from it, if the points form a
/// parallelogram.
fn parallelogram(r: &[Point3]) -> Option<(Point3, Point3, Point3)> {
    for (i, j, k, l) in [(0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)] {
        // Diagonals {r_i, r_j} and {r_k, r_l}.
        let s1 = [r[i][0] + r[j][0], r[i][1] + r[j][1], r[i][2] + r[j][2]];
        let s2 = [r[k][0] + r[l][0], r[k][1] + r[l][1], r[k][2] + r[l][2]];
        if s1 == s2 {
            return Some((r[i], sub3(r[k], r[i]), sub3(r[l], r[i])));
        }
    }
    None
}

pub fn singular_points(fan: &Fan3) -> Result<Vec<SingularPoint>, AmdError> {
    Ok(fan
        .classify()?
        .into_iter()
        .enumerate()
        .filter_map(|(cone, c)| match c {
            ConeClass::UnitParallelogram { interior_points } => Some(SingularPoint {
                cone,
                a: interior_points + 1,
            }),
            ConeClass::BasicSimplex => None,
        })
        .collect())
}

pub fn fan_json(fan: &Fan3) -> Result<serde_json::Value, AmdError> {
    let classes = fan.classify()?;
    Ok(serde_json::json!({
        "rays": fan.rays,
        "cones": fan.cones,
        "classes": classes,
    }))
}
