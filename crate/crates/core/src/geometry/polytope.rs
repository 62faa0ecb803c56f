use std::collections::{BTreeMap, BTreeSet};

use super::polygon::{LatticePolygon, Point2};
use crate::arith::{self, cross, det3, dot3, gcd_slice, sub3, Q};
use crate::error::GeometryError;

pub type Point3 = [i64; 3];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    /// Primitive outer normal `u`; the facet is `<u, x> = level`.
    pub normal: Point3,
    pub level: i64,
    /// Vertex indices in cyclic order, counterclockwise seen from outside.
    pub vertices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    /// Endpoints; the lexicographically smaller vertex comes first.
    pub vertices: [usize; 2],
    /// The two incident facets, in increasing order.
    pub facets: [usize; 2],
}

/// Full-dimensional lattice polytope in Z^3 with its face lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePolytope3 {
    vertices: Vec<Point3>,
    facets: Vec<Facet>,
    edges: Vec<Edge>,
}

/// Polytope with rational vertices; produced by [`LatticePolytope3::polar_dual`].
///
/// Vertex `i` is dual to facet `i` of the primal, facet `j` dual to primal
/// vertex `j` and edge `e` dual to primal edge `e`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalPolytope3 {
    pub vertices: Vec<[Q; 3]>,
    /// For each facet (dual to a primal vertex) the incident vertex indices.
    pub facets: Vec<Vec<usize>>,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeGeometry {
    pub edge: usize,
    pub length: i64,
    pub colength: i64,
    /// Lattice points `p_0, ..., p_length`, starting at the lexicographically
    /// smaller endpoint.
    pub points: Vec<Point3>,
    /// Endpoints of the dual edge: the polar vertices of the two incident facets.
    pub dual: [Point3; 2],
}

/// Unimodular chart of a facet at lattice distance one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacetChart {
    pub facet: usize,
    /// Columns: a point on the facet plane, then a basis of the plane's lattice.
    basis: [Point3; 3],
    /// Rows of the inverse matrix.
    inverse: [Point3; 3],
    pub polygon: LatticePolygon,
}

impl FacetChart {
    pub fn to_lattice(&self, p: Point2) -> Point3 {
        let [o, a, b] = self.basis;
        [
            o[0] + p[0] * a[0] + p[1] * b[0],
            o[1] + p[0] * a[1] + p[1] * b[1],
            o[2] + p[0] * a[2] + p[1] * b[2],
        ]
    }

    /// Chart coordinates of a point on the facet plane; `None` off the plane.
    pub fn to_chart(&self, x: Point3) -> Option<Point2> {
        let c = [
            dot3(self.inverse[0], x),
            dot3(self.inverse[1], x),
            dot3(self.inverse[2], x),
        ];
        (c[0] == 1).then_some([c[1], c[2]])
    }
}

fn primitive(v: Point3) -> Point3 {
    let g = gcd_slice(&v);
    if g == 0 {
        v
    } else {
        [v[0] / g, v[1] / g, v[2] / g]
    }
}

fn affine_dim(points: &[Point3]) -> usize {
    let o = points[0];
    let rows: Vec<Vec<i64>> = points[1..].iter().map(|p| sub3(*p, o).to_vec()).collect();
    arith::rank_int(&rows, 3)
}

impl LatticePolytope3 {
    /// Convex hull of a full-dimensional point set.
    pub fn hull(points: &[Point3]) -> Result<Self, GeometryError> {
        if points.is_empty() {
            return Err(GeometryError::Empty);
        }
        let mut pts = points.to_vec();
        pts.sort_unstable();
        pts.dedup();
        let dim = affine_dim(&pts);
        if dim < 3 {
            return Err(GeometryError::Degenerate {
                expected: 3,
                found: dim,
            });
        }
        if pts.iter().flatten().any(|c| c.abs() > 1 << 20) {
            return Err(GeometryError::Overflow);
        }
        let n = pts.len();
        let mut planes: BTreeSet<(Point3, i64)> = BTreeSet::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let nrm = cross(sub3(pts[j], pts[i]), sub3(pts[k], pts[i]));
                    if nrm == [0, 0, 0] {
                        continue;
                    }
                    let nrm = primitive(nrm);
                    let c = dot3(nrm, pts[i]);
                    let (mut le, mut ge) = (true, true);
                    for p in &pts {
                        let s = dot3(nrm, *p) - c;
                        le &= s <= 0;
                        ge &= s >= 0;
                    }
                    if le {
                        planes.insert((nrm, c));
                    } else if ge {
                        planes.insert(([-nrm[0], -nrm[1], -nrm[2]], -c));
                    }
                }
            }
        }
        // Vertices are the extreme points of the facet polygons.
        let mut vertex_set: BTreeSet<Point3> = BTreeSet::new();
        for &(nrm, c) in &planes {
            let on: Vec<Point3> = pts.iter().copied().filter(|p| dot3(nrm, *p) == c).collect();
            let drop = (0..3).find(|&t| nrm[t] != 0).expect("nonzero normal");
            let proj: Vec<Point2> = on.iter().map(|p| project(*p, drop)).collect();
            let poly = LatticePolygon::hull_any(&proj)?;
            for p in &on {
                if poly.vertices().contains(&project(*p, drop)) {
                    vertex_set.insert(*p);
                }
            }
        }
        let vertices: Vec<Point3> = vertex_set.into_iter().collect();
        Self::from_vertices_and_planes(vertices, planes.into_iter().collect())
    }

    fn from_vertices_and_planes(vertices: Vec<Point3>, planes: Vec<(Point3, i64)>) -> Result<Self, GeometryError> {
        let mut facets = Vec::with_capacity(planes.len());
        for (nrm, c) in planes {
            let idx: Vec<usize> = (0..vertices.len()).filter(|&v| dot3(nrm, vertices[v]) == c).collect();
            let ordered = cyclic_order(&vertices, &idx, nrm);
            facets.push(Facet {
                normal: nrm,
                level: c,
                vertices: ordered,
            });
        }
        facets.sort_by(|a, b| {
            let mut sa = a.vertices.clone();
            let mut sb = b.vertices.clone();
            sa.sort_unstable();
            sb.sort_unstable();
            sa.cmp(&sb)
        });
        let mut edge_map: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (f, facet) in facets.iter().enumerate() {
            let m = facet.vertices.len();
            for i in 0..m {
                let (a, b) = (facet.vertices[i], facet.vertices[(i + 1) % m]);
                edge_map.entry((a.min(b), a.max(b))).or_default().push(f);
            }
        }
        let mut edges = Vec::with_capacity(edge_map.len());
        for ((a, b), fs) in edge_map {
            if fs.len() != 2 {
                return Err(GeometryError::Degenerate { expected: 3, found: 2 });
            }
            edges.push(Edge {
                vertices: [a, b],
                facets: [fs[0].min(fs[1]), fs[0].max(fs[1])],
            });
        }
        let p = LatticePolytope3 {
            vertices,
            facets,
            edges,
        };
        debug_assert_eq!(
            p.vertices.len() as i64 - p.edges.len() as i64 + p.facets.len() as i64,
            2
        );
        Ok(p)
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.facets.len() as i64
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        let key = [a.min(b), a.max(b)];
        self.edges.iter().position(|e| e.vertices == key)
    }

    pub fn origin_is_interior(&self) -> bool {
        self.facets.iter().all(|f| f.level > 0)
    }

    pub fn contains(&self, x: Point3) -> bool {
        self.facets.iter().all(|f| dot3(f.normal, x) <= f.level)
    }

    pub fn lattice_points(&self) -> Vec<Point3> {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for v in &self.vertices {
            for k in 0..3 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        let mut out = Vec::new();
        for x in lo[0]..=hi[0] {
            for y in lo[1]..=hi[1] {
                for z in lo[2]..=hi[2] {
                    if self.contains([x, y, z]) {
                        out.push([x, y, z]);
                    }
                }
            }
        }
        out
    }

    pub fn boundary_lattice_points(&self) -> Vec<Point3> {
        self.lattice_points()
            .into_iter()
            .filter(|&x| self.facets.iter().any(|f| dot3(f.normal, x) == f.level))
            .collect()
    }

    /// Six times the Euclidean volume.
    pub fn normalized_volume(&self) -> i64 {
        let apex = self.vertices[0];
        let mut total = 0;
        for f in &self.facets {
            if f.vertices.contains(&0) {
                continue;
            }
            let a = sub3(self.vertices[f.vertices[0]], apex);
            for w in f.vertices[1..].windows(2) {
                let b = sub3(self.vertices[w[0]], apex);
                let c = sub3(self.vertices[w[1]], apex);
                total += det3(a, b, c).abs();
            }
        }
        total
    }

    /// `P* = { u : <u, v> >= -1 for all v in P }`.
    pub fn polar_dual(&self) -> Result<RationalPolytope3, GeometryError> {
        if !self.origin_is_interior() {
            return Err(GeometryError::OriginNotInterior);
        }
        let vertices = self
            .facets
            .iter()
            .map(|f| {
                let c = arith::q(f.level);
                [
                    -arith::q(f.normal[0]) / &c,
                    -arith::q(f.normal[1]) / &c,
                    -arith::q(f.normal[2]) / &c,
                ]
            })
            .collect();
        let facets = (0..self.vertices.len())
            .map(|v| {
                (0..self.facets.len())
                    .filter(|&f| self.facets[f].vertices.contains(&v))
                    .collect()
            })
            .collect();
        let edges = self.edges.iter().map(|e| e.facets).collect();
        Ok(RationalPolytope3 {
            vertices,
            facets,
            edges,
        })
    }

    /// True iff the origin is interior and the polar has integral vertices.
    pub fn is_reflexive(&self) -> bool {
        self.origin_is_interior() && self.facets.iter().all(|f| f.level == 1)
    }

    pub fn require_reflexive(&self) -> Result<(), GeometryError> {
        if !self.origin_is_interior() {
            return Err(GeometryError::OriginNotInterior);
        }
        if !self.is_reflexive() {
            return Err(GeometryError::NotReflexive);
        }
        Ok(())
    }

    /// Vertex of the polar dual to facet `f` (reflexive input).
    pub fn polar_vertex(&self, f: usize) -> Point3 {
        let n = self.facets[f].normal;
        [-n[0], -n[1], -n[2]]
    }

    pub fn edge_geometry(&self, e: usize) -> EdgeGeometry {
        let edge = &self.edges[e];
        let a = self.vertices[edge.vertices[0]];
        let b = self.vertices[edge.vertices[1]];
        let d = sub3(b, a);
        let length = gcd_slice(&d);
        let step = [d[0] / length, d[1] / length, d[2] / length];
        let points = (0..=length)
            .map(|s| [a[0] + s * step[0], a[1] + s * step[1], a[2] + s * step[2]])
            .collect();
        let u = self.polar_vertex(edge.facets[0]);
        let w = self.polar_vertex(edge.facets[1]);
        let colength = gcd_slice(&sub3(w, u));
        EdgeGeometry {
            edge: e,
            length,
            colength,
            points,
            dual: [u, w],
        }
    }

    pub fn facet_chart(&self, f: usize) -> Result<FacetChart, GeometryError> {
        let facet = &self.facets[f];
        if facet.level != 1 {
            return Err(GeometryError::FacetDistance {
                facet: f,
                distance: facet.level,
            });
        }
        let [o, a, b] = unimodular_completion(facet.normal);
        let inv = inverse_unimodular([o, a, b]);
        let raw: Vec<Point2> = facet
            .vertices
            .iter()
            .map(|&v| {
                let x = self.vertices[v];
                [dot3(inv[1], x), dot3(inv[2], x)]
            })
            .collect();
        // Re-anchor the chart so that the facet polygon is in normal form.
        let (polygon, map) = LatticePolygon::hull(&raw)?.normal_form_with_map();
        let n = map.inverse();
        let comb = |u: i64, w: i64| -> Point3 { [u * a[0] + w * b[0], u * a[1] + w * b[1], u * a[2] + w * b[2]] };
        let shift = comb(n.t[0], n.t[1]);
        let basis = [
            [o[0] + shift[0], o[1] + shift[1], o[2] + shift[2]],
            comb(n.m[0][0], n.m[1][0]),
            comb(n.m[0][1], n.m[1][1]),
        ];
        Ok(FacetChart {
            facet: f,
            basis,
            inverse: inverse_unimodular(basis),
            polygon,
        })
    }

    pub fn transform(&self, m: [[i64; 3]; 3]) -> Result<Self, GeometryError> {
        let pts: Vec<Point3> = self
            .vertices
            .iter()
            .map(|v| [dot3(m[0], *v), dot3(m[1], *v), dot3(m[2], *v)])
            .collect();
        Self::hull(&pts)
    }
}

impl RationalPolytope3 {
    pub fn is_integral(&self) -> bool {
        self.vertices.iter().flatten().all(|c| c.is_integer())
    }

    /// Lattice polytope with the same vertices, if they are integral.
    pub fn to_lattice(&self) -> Option<Result<LatticePolytope3, GeometryError>> {
        let pts: Option<Vec<Point3>> = self
            .vertices
            .iter()
            .map(|v| Some([arith::to_i64(&v[0])?, arith::to_i64(&v[1])?, arith::to_i64(&v[2])?]))
            .collect();
        pts.map(|p| LatticePolytope3::hull(&p))
    }

    /// Lattice length of a dual edge when its endpoints are integral.
    pub fn edge_length(&self, e: usize) -> Option<i64> {
        let [a, b] = self.edges[e];
        let d: Option<Vec<i64>> = (0..3)
            .map(|k| arith::to_i64(&(&self.vertices[b][k] - &self.vertices[a][k])))
            .collect();
        d.map(|d| gcd_slice(&d))
    }
}

fn project(p: Point3, drop: usize) -> Point2 {
    match drop {
        0 => [p[1], p[2]],
        1 => [p[0], p[2]],
        _ => [p[0], p[1]],
    }
}

/// Order facet vertices counterclockwise around the outer normal.
fn cyclic_order(vertices: &[Point3], idx: &[usize], nrm: Point3) -> Vec<usize> {
    let drop = (0..3).find(|&t| nrm[t] != 0).expect("nonzero normal");
    let proj: Vec<Point2> = idx.iter().map(|&i| project(vertices[i], drop)).collect();
    let poly = LatticePolygon::hull_any(&proj).expect("non-empty");
    let mut order: Vec<usize> = poly
        .vertices()
        .iter()
        .map(|p| idx[proj.iter().position(|q| q == p).expect("hull vertex")])
        .collect();
    // The projection drops coordinate `drop`; it preserves orientation seen
    // from +e_drop iff the permutation parity matches.
    let sign = match drop {
        1 => -1,
        _ => 1,
    } * nrm[drop].signum();
    if sign < 0 {
        order.reverse();
    }
    // Rotate so the smallest index comes first.
    let k = order
        .iter()
        .enumerate()
        .min_by_key(|(_, &v)| v)
        .map(|(i, _)| i)
        .unwrap_or(0);
    order.rotate_left(k);
    order
}

/// Unimodular matrix (as columns) whose first column `x0` satisfies
/// `<n, x0> = 1` and whose other columns span `n^perp`.
fn unimodular_completion(n: Point3) -> [Point3; 3] {
    // Column operations on the row vector n, mirrored on the identity.
    let mut r = n;
    let mut u = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]; // u[col] = column vector
    loop {
        let nz: Vec<usize> = (0..3).filter(|&i| r[i] != 0).collect();
        if nz.len() <= 1 {
            break;
        }
        let piv = *nz.iter().min_by_key(|&&i| r[i].abs()).expect("nonempty");
        for &i in &nz {
            if i == piv {
                continue;
            }
            let qt = r[i].div_euclid(r[piv]);
            r[i] -= qt * r[piv];
            for k in 0..3 {
                u[i][k] -= qt * u[piv][k];
            }
        }
    }
    let piv = (0..3).find(|&i| r[i] != 0).expect("nonzero normal");
    debug_assert_eq!(r[piv].abs(), 1);
    if r[piv] < 0 {
        for k in 0..3 {
            u[piv][k] = -u[piv][k];
        }
    }
    let others: Vec<usize> = (0..3).filter(|&i| i != piv).collect();
    let mut cols = [u[piv], u[others[0]], u[others[1]]];
    if det3(cols[0], cols[1], cols[2]) < 0 {
        cols[2] = [-cols[2][0], -cols[2][1], -cols[2][2]];
    }
    cols
}

/// Rows of the inverse of the matrix with the given columns (det = +-1).
fn inverse_unimodular(cols: [Point3; 3]) -> [Point3; 3] {
    let [a, b, c] = cols;
    let d = det3(a, b, c);
    debug_assert_eq!(d.abs(), 1);
    let r0 = cross(b, c);
    let r1 = cross(c, a);
    let r2 = cross(a, b);
    [
        [r0[0] * d, r0[1] * d, r0[2] * d],
        [r1[0] * d, r1[1] * d, r1[2] * d],
        [r2[0] * d, r2[1] * d, r2[2] * d],
    ]
}
