//! Independent reference implementations used to cross-check the library.

use std::collections::{BTreeMap, BTreeSet};

use amd_core::arith::Q;
use amd_core::cayley::{CayleyConfiguration, PointConfiguration};
use amd_core::geometry::{LatticePolygon, Point2};
use amd_core::minkowski::AdmissibleDecomposition;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A decomposition as the sorted multiset of its summands, each given by
/// its sorted vertices translated to put the smallest at the origin.
pub type Shape = Vec<Point2>;

fn normalize(points: &[Point2]) -> Shape {
    let mut v: Vec<Point2> = points.to_vec();
    v.sort();
    v.dedup();
    let o = v[0];
    v.iter().map(|p| [p[0] - o[0], p[1] - o[1]]).collect()
}

pub fn canonical(d: &AdmissibleDecomposition) -> Vec<Shape> {
    let mut v: Vec<Shape> = d.summands().iter().map(|s| normalize(&s.vertices)).collect();
    v.sort();
    v
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Apex at lattice distance one from an edge of length `n + 1`.
fn is_a_triangle(t: &[Point2; 3]) -> bool {
    let det = (t[1][0] - t[0][0]) * (t[2][1] - t[0][1]) - (t[1][1] - t[0][1]) * (t[2][0] - t[0][0]);
    if det == 0 {
        return false;
    }
    (0..3).any(|k| {
        let (a, b) = (t[k], t[(k + 1) % 3]);
        gcd(b[0] - a[0], b[1] - a[1]) == det.abs()
    })
}

fn vertex_set(p: &LatticePolygon) -> BTreeSet<Point2> {
    p.vertices().iter().copied().collect()
}

/// `F ⊖ T` when `T` is a Minkowski summand of `F`.
fn minkowski_difference(f: &LatticePolygon, t: &[Point2]) -> Option<LatticePolygon> {
    let pts: Vec<Point2> = f
        .lattice_points()
        .into_iter()
        .filter(|x| t.iter().all(|v| f.contains([x[0] + v[0], x[1] + v[1]])))
        .collect();
    if pts.is_empty() {
        return None;
    }
    let r = LatticePolygon::hull_any(&pts).ok()?;
    let tp = LatticePolygon::hull_any(t).ok()?;
    (vertex_set(&r.minkowski_sum(&tp)) == vertex_set(f)).then_some(r)
}

/// Every admissible decomposition, by exhaustive search over candidate
/// summands: unit segments and A-triangles fitting in the bounding box.
pub fn brute_force_decompositions(f: &LatticePolygon) -> BTreeSet<Vec<Shape>> {
    let pts = f.lattice_points();
    let (xs, ys): (Vec<i64>, Vec<i64>) = pts.iter().map(|p| (p[0], p[1])).unzip();
    let w = xs.iter().max().unwrap() - xs.iter().min().unwrap();
    let h = ys.iter().max().unwrap() - ys.iter().min().unwrap();
    let mut cands: BTreeSet<Shape> = BTreeSet::new();
    for dx in -w..=w {
        for dy in -h..=h {
            if gcd(dx, dy) == 1 {
                cands.insert(normalize(&[[0, 0], [dx, dy]]));
            }
        }
    }
    for x1 in 0..=w {
        for y1 in -h..=h {
            for x2 in 0..=w {
                for y2 in -h..=h {
                    let t = [[0, 0], [x1, y1], [x2, y2]];
                    if is_a_triangle(&t) {
                        cands.insert(normalize(&t));
                    }
                }
            }
        }
    }
    let cands: Vec<Shape> = cands
        .into_iter()
        .filter(|c| minkowski_difference(f, c).is_some())
        .collect();
    let mut out = BTreeSet::new();
    let mut acc = Vec::new();
    search(f, &cands, 0, &mut acc, &mut out);
    out
}

fn search(rest: &LatticePolygon, cands: &[Shape], from: usize, acc: &mut Vec<Shape>, out: &mut BTreeSet<Vec<Shape>>) {
    if rest.num_vertices() == 1 {
        out.insert(acc.clone());
        return;
    }
    for (i, c) in cands.iter().enumerate().skip(from) {
        if let Some(r) = minkowski_difference(rest, c) {
            acc.push(c.clone());
            search(&r, cands, i, acc, out);
            acc.pop();
        }
    }
}

/// Fine regular triangulations of the Cayley configuration found by
/// sampling heights: a grid over the heights left free after fixing an
/// affine basis to zero, plus random heights. Uses the brute-force lower
/// hull, independent of the gift-wrapping and flip code.
pub fn triangulations_by_heights(d: &AdmissibleDecomposition, samples: usize, seed: u64) -> BTreeSet<Vec<u128>> {
    let cayley = CayleyConfiguration::new(d).unwrap();
    let c: &PointConfiguration = cayley.config();
    let n = c.len();
    let dim = c.dim();
    let basis = affine_basis(c);
    let free: Vec<usize> = (0..n).filter(|i| !basis.contains(i)).collect();
    let mut found = BTreeSet::new();
    let vs = c.vectors();
    let simplices: Vec<(Vec<usize>, i128)> = subsets(n, dim)
        .into_iter()
        .filter_map(|s| {
            let m: Vec<Vec<i128>> = s.iter().map(|&i| vs[i].iter().map(|&x| x.into()).collect()).collect();
            let det = det_i128(m);
            (det != 0).then_some((s, det.signum()))
        })
        .collect();
    let mut consider = |h: &[i64]| {
        let cells = lower_cells(vs, &simplices, h);
        let used = cells.iter().fold(0u128, |a, &x| a | x);
        if cells.iter().all(|x| x.count_ones() as usize == dim) && used.count_ones() as usize == n {
            found.insert(cells);
        }
    };
    let f = free.len() as u32;
    let mut k = 1i64;
    while (2 * (k + 1) + 1).pow(f) <= 40_000 && k < 12 {
        k += 1;
    }
    let side = (2 * k + 1) as usize;
    let mut h = vec![0i64; n];
    for code in 0..side.pow(f) {
        let mut x = code;
        for &i in &free {
            h[i] = (x % side) as i64 - k;
            x /= side;
        }
        consider(&h);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        for &i in &free {
            h[i] = rng.gen_range(-1000..=1000);
        }
        consider(&h);
    }
    found
}

/// Cells of the regular subdivision induced by `h`: for each simplex whose
/// lifted hyperplane lies weakly below every lifted point, the set of points
/// on that hyperplane. Above-ness is the sign of a bordered determinant,
/// computed by fraction-free elimination.
fn lower_cells(vs: &[Vec<i64>], simplices: &[(Vec<usize>, i128)], h: &[i64]) -> Vec<u128> {
    let d = vs[0].len();
    let mut cells = BTreeSet::new();
    'simplex: for (s, orient) in simplices {
        let mut m = [[0i128; MAX_DIM]; MAX_DIM];
        for (r, &i) in s.iter().enumerate() {
            for (c, &x) in vs[i].iter().enumerate() {
                m[r][c] = x.into();
            }
            m[r][d] = h[i].into();
        }
        let mut tight = 0u128;
        for j in 0..vs.len() {
            for (c, &x) in vs[j].iter().enumerate() {
                m[d][c] = x.into();
            }
            m[d][d] = h[j].into();
            match (det_fixed(m, d + 1) * orient).signum() {
                -1 => continue 'simplex,
                0 => tight |= 1 << j,
                _ => {}
            }
        }
        cells.insert(tight);
    }
    cells.into_iter().collect()
}

const MAX_DIM: usize = 10;

fn det_fixed(mut m: [[i128; MAX_DIM]; MAX_DIM], n: usize) -> i128 {
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| m[r][k] != 0) else {
            return 0;
        };
        if p != k {
            m.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

fn det_i128(rows: Vec<Vec<i128>>) -> i128 {
    let mut m = [[0i128; MAX_DIM]; MAX_DIM];
    for (r, row) in rows.iter().enumerate() {
        m[r][..row.len()].copy_from_slice(row);
    }
    det_fixed(m, rows.len())
}

fn affine_basis(c: &PointConfiguration) -> Vec<usize> {
    let mut rows: Vec<Vec<Q>> = Vec::new();
    let mut chosen = Vec::new();
    for (i, v) in c.vectors().iter().enumerate() {
        let mut trial = rows.clone();
        trial.push(v.iter().map(|&x| Q::from_integer(x.into())).collect());
        if amd_core::arith::rank(&trial, c.dim()) > rows.len() {
            rows = trial;
            chosen.push(i);
        }
    }
    chosen
}

/// Constant terms of `w^m` by dense expansion without pruning.
pub fn brute_force_period(w: &[([i64; 3], i64)], order: usize) -> Vec<i128> {
    let mut power: BTreeMap<[i64; 3], i128> = BTreeMap::from([([0, 0, 0], 1)]);
    let mut out = vec![1];
    for _ in 0..order {
        let mut next = BTreeMap::new();
        for (x, c) in &power {
            for (y, e) in w {
                *next.entry([x[0] + y[0], x[1] + y[1], x[2] + y[2]]).or_insert(0) += c * *e as i128;
            }
        }
        out.push(next.get(&[0, 0, 0]).copied().unwrap_or(0));
        power = next;
    }
    out
}

/// Regularized quantum period coefficients of the complete intersection of
/// three quadrics in P^6: `m! [t^m] e^{-8t} Σ_d C(2d,d)^3 t^d / d!`.
pub fn three_quadrics_period(order: usize) -> Vec<num_bigint::BigInt> {
    use num_bigint::BigInt;
    let fact = |n: usize| (1..=n).fold(BigInt::from(1), |a, k| a * k);
    let binom = |n: usize, k: usize| fact(n) / (fact(k) * fact(n - k));
    (0..=order)
        .map(|m| {
            let mut total = Q::zero();
            for d in 0..=m {
                let i_d = Q::new(binom(2 * d, d).pow(3), fact(d));
                let e = Q::new(BigInt::from(-8).pow((m - d) as u32), fact(m - d));
                total += i_d * e;
            }
            let v = total * Q::from_integer(fact(m));
            assert!(v.is_integer());
            v.to_integer()
        })
        .collect()
}
