//! A-triangles and admissible Minkowski decompositions of lattice polygons.
//!
//! A Minkowski summand of a polygon `F` has every edge parallel to, and
//! oriented like, an edge of `F`. A summand is therefore a vector `λ` of
//! edge lengths indexed by the edges of `F` with `Σ λ_i d_i = 0`, where `d_i`
//! is the primitive direction of edge `i`. A-triangles have support of size
//! two (a unit segment, using two opposite directions) or three.

use serde::Serialize;

use crate::arith::{det2, gcd};
use crate::geometry::{LatticePolygon, Point2};

/// An `A_n` triangle (`n >= 0`) or a unit segment (`n = -1`), placed with its
/// lexicographically smallest vertex at the origin.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ATriangle {
    pub n: i64,
    pub vertices: Vec<Point2>,
}

impl ATriangle {
    pub fn polygon(&self) -> LatticePolygon {
        LatticePolygon::from_vertices(&self.vertices).expect("non-empty")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct AdmissibleDecomposition {
    #[serde(skip)]
    target: LatticePolygon,
    /// `target = offset + Σ summands`.
    offset: Point2,
    summands: Vec<ATriangle>,
    /// `lengths[j][i]`: lattice length of the face of summand `j` maximizing
    /// the outer normal of target edge `i` (0 for a vertex).
    #[serde(skip)]
    lengths: Vec<Vec<i64>>,
}

impl AdmissibleDecomposition {
    pub fn target(&self) -> &LatticePolygon {
        &self.target
    }

    pub fn offset(&self) -> Point2 {
        self.offset
    }

    pub fn summands(&self) -> &[ATriangle] {
        &self.summands
    }

    pub fn num_summands(&self) -> usize {
        self.summands.len()
    }

    pub fn edge_lengths(&self, summand: usize) -> &[i64] {
        &self.lengths[summand]
    }

    /// Vertex-wise Minkowski sum of the placed summands.
    pub fn minkowski_sum(&self) -> LatticePolygon {
        let mut acc = LatticePolygon::from_vertices(&[self.offset]).expect("point");
        for s in &self.summands {
            acc = acc.minkowski_sum(&s.polygon());
        }
        acc
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }
}

/// `(summand index, face length)` for every summand, at one edge of the target.
pub type EdgeFaceProfile = Vec<(usize, i64)>;

pub fn edge_face_profile(d: &AdmissibleDecomposition, edge: usize) -> EdgeFaceProfile {
    d.lengths.iter().enumerate().map(|(j, l)| (j, l[edge])).collect()
}

/// `Some(n)` iff `q` is an `A_n` triangle, with `n = -1` for a unit segment.
pub fn classify_a_triangle(q: &LatticePolygon) -> Option<i64> {
    match q.num_vertices() {
        2 if q.edge_length(0) == 1 => Some(-1),
        3 => {
            // Lattice height 1 over some edge of length L forces area L/2,
            // and conversely.
            let a = q.double_area();
            (0..3).any(|i| q.edge_length(i) == a).then_some(a - 1)
        }
        _ => None,
    }
}

/// Summand polygon with the given edge lengths, lexmin vertex at the origin.
fn summand_polygon(dirs: &[Point2], lambda: &[i64]) -> LatticePolygon {
    let mut pts = vec![[0, 0]];
    let mut cur = [0, 0];
    for (d, &l) in dirs.iter().zip(lambda) {
        if l > 0 {
            cur = [cur[0] + l * d[0], cur[1] + l * d[1]];
            pts.push(cur);
        }
    }
    debug_assert_eq!(cur, [0, 0]);
    let p = LatticePolygon::from_vertices(&pts).expect("non-empty");
    let m = p.lex_min();
    p.translate([-m[0], -m[1]])
}

/// All A-triangle summand shapes compatible with the edges of `f`.
fn candidates(dirs: &[Point2], lengths: &[i64]) -> Vec<Vec<i64>> {
    let m = dirs.len();
    let mut out = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            if dirs[i] == [-dirs[j][0], -dirs[j][1]] {
                let mut l = vec![0; m];
                l[i] = 1;
                l[j] = 1;
                out.push(l);
            }
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                // Positive relation a d_i + b d_j + c d_k = 0.
                let (di, dj, dk) = (dirs[i], dirs[j], dirs[k]);
                let (mut a, mut b, mut c) = (det2(dj, dk), det2(dk, di), det2(di, dj));
                if a < 0 || (a == 0 && (b < 0 || (b == 0 && c < 0))) {
                    (a, b, c) = (-a, -b, -c);
                }
                if a <= 0 || b <= 0 || c <= 0 {
                    continue;
                }
                let g = gcd(gcd(a, b), c);
                let base = [a / g, b / g, c / g];
                for t in 1.. {
                    let l = [t * base[0], t * base[1], t * base[2]];
                    if l[0] > lengths[i] || l[1] > lengths[j] || l[2] > lengths[k] {
                        break;
                    }
                    let mut lam = vec![0; m];
                    lam[i] = l[0];
                    lam[j] = l[1];
                    lam[k] = l[2];
                    if classify_a_triangle(&summand_polygon(dirs, &lam)).is_some() {
                        out.push(lam);
                    }
                }
            }
        }
    }
    out.retain(|l| l.iter().zip(lengths).all(|(a, b)| a <= b));
    out.sort();
    out
}

fn search(cands: &[Vec<i64>], start: usize, remaining: &mut [i64], chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if remaining.iter().all(|&r| r == 0) {
        out.push(chosen.clone());
        return;
    }
    // The first uncovered edge must be covered by a later choice.
    let e = remaining.iter().position(|&r| r > 0).expect("positive entry");
    let fits = |c: &[i64], rem: &[i64]| c.iter().zip(rem).all(|(a, b)| a <= b);
    if !cands[start..].iter().any(|c| c[e] > 0 && fits(c, remaining)) {
        return;
    }
    // Nondecreasing candidate indices enumerate each multiset once.
    for c in start..cands.len() {
        if !fits(&cands[c], remaining) {
            continue;
        }
        for (r, a) in remaining.iter_mut().zip(&cands[c]) {
            *r -= a;
        }
        chosen.push(c);
        search(cands, c, remaining, chosen, out);
        chosen.pop();
        for (r, a) in remaining.iter_mut().zip(&cands[c]) {
            *r += a;
        }
    }
}

/// The complete set of admissible decompositions of `f`, canonically ordered.
pub fn enumerate_admissible_decompositions(f: &LatticePolygon) -> Vec<AdmissibleDecomposition> {
    let offset = f.lex_min();
    match f.dim() {
        0 => {
            return vec![AdmissibleDecomposition {
                target: f.clone(),
                offset,
                summands: Vec::new(),
                lengths: Vec::new(),
            }]
        }
        1 => {
            let d = f.edge_direction(0);
            let unit = LatticePolygon::from_vertices(&[[0, 0], d]).expect("segment");
            let s = ATriangle {
                n: -1,
                vertices: unit.vertices().to_vec(),
            };
            let l = f.edge_length(0) as usize;
            return vec![AdmissibleDecomposition {
                target: f.clone(),
                offset,
                summands: vec![s; l],
                lengths: vec![vec![1]; l],
            }];
        }
        _ => {}
    }
    let m = f.num_edges();
    let dirs: Vec<Point2> = (0..m).map(|i| f.edge_direction(i)).collect();
    let lengths: Vec<i64> = (0..m).map(|i| f.edge_length(i)).collect();
    let cands = candidates(&dirs, &lengths);
    let mut raw = Vec::new();
    search(&cands, 0, &mut lengths.clone(), &mut Vec::new(), &mut raw);
    let mut out: Vec<AdmissibleDecomposition> = raw
        .into_iter()
        .map(|idx| {
            let lens: Vec<Vec<i64>> = idx.iter().map(|&c| cands[c].clone()).collect();
            build(f, &dirs, lens)
        })
        .collect();
    out.sort_by(|a, b| a.lengths.cmp(&b.lengths));
    out.dedup();
    out
}

fn build(f: &LatticePolygon, dirs: &[Point2], mut lens: Vec<Vec<i64>>) -> AdmissibleDecomposition {
    lens.sort();
    let summands = lens
        .iter()
        .map(|l| {
            let p = summand_polygon(dirs, l);
            ATriangle {
                n: classify_a_triangle(&p).expect("candidate is an A-triangle"),
                vertices: p.vertices().to_vec(),
            }
        })
        .collect();
    AdmissibleDecomposition {
        target: f.clone(),
        offset: f.lex_min(),
        summands,
        lengths: lens,
    }
}
