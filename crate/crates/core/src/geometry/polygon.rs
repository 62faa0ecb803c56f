use crate::arith::{det2, ext_gcd, gcd, sub2};
use crate::error::GeometryError;

pub type Point2 = [i64; 2];

/// Convex lattice polygon, or a lower-dimensional lattice polytope in the
/// plane (segment or point) where the callers permit it.
///
/// Vertices are exactly the hull vertices, counterclockwise, starting at the
/// lexicographically smallest one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePolygon {
    vertices: Vec<Point2>,
}

fn cross(o: Point2, a: Point2, b: Point2) -> i64 {
    det2(sub2(a, o), sub2(b, o))
}

impl LatticePolygon {
    /// Hull of a full-dimensional point set.
    pub fn hull(points: &[Point2]) -> Result<Self, GeometryError> {
        let p = Self::hull_any(points)?;
        if p.dim() < 2 {
            return Err(GeometryError::Degenerate {
                expected: 2,
                found: p.dim(),
            });
        }
        Ok(p)
    }

    /// Hull of any non-empty point set; may be a segment or a point.
    pub fn hull_any(points: &[Point2]) -> Result<Self, GeometryError> {
        if points.is_empty() {
            return Err(GeometryError::Empty);
        }
        let mut pts = points.to_vec();
        pts.sort_unstable();
        pts.dedup();
        if pts.len() <= 2 {
            return Ok(LatticePolygon { vertices: pts });
        }
        // Andrew's monotone chain, strict turns only.
        let mut lower: Vec<Point2> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<Point2> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        if lower.len() == 2 && lower[0] == lower[1] {
            lower.pop();
        }
        Ok(LatticePolygon { vertices: lower })
    }

    /// Build from vertices already known to be in convex position (any
    /// rotation/orientation); re-hulls to normalize.
    pub fn from_vertices(vertices: &[Point2]) -> Result<Self, GeometryError> {
        Self::hull_any(vertices)
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn dim(&self) -> usize {
        match self.vertices.len() {
            1 => 0,
            2 => 1,
            _ => 2,
        }
    }

    /// Number of edges; a segment has one.
    pub fn num_edges(&self) -> usize {
        match self.vertices.len() {
            1 => 0,
            2 => 1,
            n => n,
        }
    }

    pub fn edge(&self, i: usize) -> (Point2, Point2) {
        let n = self.vertices.len();
        (self.vertices[i], self.vertices[(i + 1) % n])
    }

    pub fn edge_vector(&self, i: usize) -> Point2 {
        let (a, b) = self.edge(i);
        sub2(b, a)
    }

    pub fn edge_length(&self, i: usize) -> i64 {
        let v = self.edge_vector(i);
        gcd(v[0], v[1])
    }

    pub fn edge_direction(&self, i: usize) -> Point2 {
        let v = self.edge_vector(i);
        let g = gcd(v[0], v[1]);
        [v[0] / g, v[1] / g]
    }

    /// Primitive outer normal of edge `i` (polygons only).
    pub fn outer_normal(&self, i: usize) -> Point2 {
        let d = self.edge_direction(i);
        [d[1], -d[0]]
    }

    /// Twice the Euclidean area.
    pub fn double_area(&self) -> i64 {
        if self.vertices.len() < 3 {
            return 0;
        }
        let o = self.vertices[0];
        (1..self.vertices.len() - 1)
            .map(|i| cross(o, self.vertices[i], self.vertices[i + 1]))
            .sum()
    }

    pub fn num_boundary_points(&self) -> i64 {
        match self.vertices.len() {
            1 => 1,
            2 => self.edge_length(0) + 1,
            n => (0..n).map(|i| self.edge_length(i)).sum(),
        }
    }

    pub fn num_interior_points(&self) -> i64 {
        if self.dim() < 2 {
            return 0;
        }
        // Pick: 2A = 2I + B - 2
        (self.double_area() - self.num_boundary_points() + 2) / 2
    }

    pub fn contains(&self, p: Point2) -> bool {
        match self.vertices.len() {
            1 => self.vertices[0] == p,
            2 => {
                let (a, b) = (self.vertices[0], self.vertices[1]);
                cross(a, b, p) == 0 && (p[0] - a[0]) * (p[0] - b[0]) <= 0 && (p[1] - a[1]) * (p[1] - b[1]) <= 0
            }
            n => (0..n).all(|i| cross(self.vertices[i], self.vertices[(i + 1) % n], p) >= 0),
        }
    }

    /// All lattice points, sorted.
    pub fn lattice_points(&self) -> Vec<Point2> {
        let (mut lo, mut hi) = (self.vertices[0], self.vertices[0]);
        for v in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        let mut out = Vec::new();
        for x in lo[0]..=hi[0] {
            for y in lo[1]..=hi[1] {
                if self.contains([x, y]) {
                    out.push([x, y]);
                }
            }
        }
        out
    }

    pub fn translate(&self, t: Point2) -> Self {
        LatticePolygon {
            vertices: self.vertices.iter().map(|v| [v[0] + t[0], v[1] + t[1]]).collect(),
        }
    }

    /// Image under the linear map with the given rows.
    pub fn transform(&self, m: [[i64; 2]; 2]) -> Self {
        let pts: Vec<Point2> = self
            .vertices
            .iter()
            .map(|v| [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]])
            .collect();
        Self::hull_any(&pts).expect("non-empty")
    }

    pub fn minkowski_sum(&self, other: &Self) -> Self {
        let mut pts = Vec::with_capacity(self.vertices.len() * other.vertices.len());
        for a in &self.vertices {
            for b in &other.vertices {
                pts.push([a[0] + b[0], a[1] + b[1]]);
            }
        }
        Self::hull_any(&pts).expect("non-empty")
    }

    pub fn lex_min(&self) -> Point2 {
        self.vertices[0]
    }

    /// Canonical representative under translations and GL2(Z).
    pub fn normal_form(&self) -> LatticePolygon {
        self.normal_form_with_map().0
    }

    /// Normal form together with a unimodular affine map `p -> m p + t`
    /// taking `self` onto it.
    pub fn normal_form_with_map(&self) -> (LatticePolygon, AffineMap2) {
        let v0 = self.vertices[0];
        match self.vertices.len() {
            1 => (
                LatticePolygon { vertices: vec![[0, 0]] },
                AffineMap2::translation([-v0[0], -v0[1]]),
            ),
            2 => {
                let (map, _) = anchored_frame(&[v0, self.vertices[1]], false);
                (
                    LatticePolygon {
                        vertices: vec![[0, 0], [self.edge_length(0), 0]],
                    },
                    map,
                )
            }
            n => {
                let mut best: Option<(Vec<Point2>, AffineMap2)> = None;
                for start in 0..n {
                    for reversed in [false, true] {
                        let seq: Vec<Point2> = (0..n)
                            .map(|i| {
                                if reversed {
                                    self.vertices[(start + n - i) % n]
                                } else {
                                    self.vertices[(start + i) % n]
                                }
                            })
                            .collect();
                        let (map, img) = anchored_frame(&seq, reversed);
                        if best.as_ref().is_none_or(|b| img < b.0) {
                            best = Some((img, map));
                        }
                    }
                }
                let (img, map) = best.expect("n >= 3");
                (LatticePolygon::hull_any(&img).expect("non-empty"), map)
            }
        }
    }
}

/// Affine lattice map `p -> m p + t` with `m` unimodular (rows of `m`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AffineMap2 {
    pub m: [[i64; 2]; 2],
    pub t: Point2,
}

impl AffineMap2 {
    pub fn translation(t: Point2) -> Self {
        AffineMap2 { m: [[1, 0], [0, 1]], t }
    }

    pub fn apply(&self, p: Point2) -> Point2 {
        [
            self.m[0][0] * p[0] + self.m[0][1] * p[1] + self.t[0],
            self.m[1][0] * p[0] + self.m[1][1] * p[1] + self.t[1],
        ]
    }

    pub fn inverse(&self) -> Self {
        let [[a, b], [c, d]] = self.m;
        let det = a * d - b * c;
        debug_assert_eq!(det.abs(), 1);
        let inv = [[d * det, -b * det], [-c * det, a * det]];
        let t = [
            -(inv[0][0] * self.t[0] + inv[0][1] * self.t[1]),
            -(inv[1][0] * self.t[0] + inv[1][1] * self.t[1]),
        ];
        AffineMap2 { m: inv, t }
    }
}

/// Unimodular frame with `seq[0]` at the origin, the first edge along +x,
/// the polygon in the upper half plane and the shear fixed by the third
/// vertex. Returns the map and the images in traversal order.
fn anchored_frame(seq: &[Point2], clockwise: bool) -> (AffineMap2, Vec<Point2>) {
    let d = sub2(seq[1], seq[0]);
    let g = gcd(d[0], d[1]);
    let (p, qq) = (d[0] / g, d[1] / g);
    // B = [[p, s], [q, t]] with det 1; rows of B^{-1} = [[t, -s], [-q, p]].
    let (_, x, y) = ext_gcd(p, qq);
    // p*x + q*y = 1  =>  s = -y, t = x
    let (s, t) = (-y, x);
    let flip = if clockwise { -1 } else { 1 };
    let mut m = [[t, -s], [-qq * flip, p * flip]];
    if seq.len() >= 3 {
        // Shear (x, y) -> (x + k y, y) so that the second edge has 0 <= dx < dy.
        let w = sub2(seq[2], seq[1]);
        let w = [m[0][0] * w[0] + m[0][1] * w[1], m[1][0] * w[0] + m[1][1] * w[1]];
        let k = -w[0].div_euclid(w[1]);
        m[0] = [m[0][0] + k * m[1][0], m[0][1] + k * m[1][1]];
    }
    let t0 = [
        -(m[0][0] * seq[0][0] + m[0][1] * seq[0][1]),
        -(m[1][0] * seq[0][0] + m[1][1] * seq[0][1]),
    ];
    let map = AffineMap2 { m, t: t0 };
    let img = seq.iter().map(|&v| map.apply(v)).collect();
    (map, img)
}
