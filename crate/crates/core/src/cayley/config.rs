//! Point configurations in homogeneous coordinates and their regular
//! subdivisions.
//!
//! A configuration of `N` points is a list of integer vectors of length `D`
//! spanning `R^D`; the affine structure comes from a linear functional that
//! is 1 on every point (for example a trailing `1`, or `e_1 + ... + e_k` on a
//! Cayley configuration). A full-dimensional simplex is a set of `D` linearly
//! independent points, stored as a bitmask.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::{self, gcd_slice, Q};
use crate::error::CayleyError;
use crate::lp::{Constraint, LinearProgram, LpOutcome, Relation};

pub type Cell = u128;

pub fn cell_points(c: Cell) -> Vec<usize> {
    (0..128).filter(|&i| c >> i & 1 == 1).collect()
}

pub fn cell_of(points: &[usize]) -> Cell {
    points.iter().fold(0, |acc, &i| acc | 1u128 << i)
}

/// A triangulation as its sorted list of maximal simplices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triangulation {
    cells: Vec<Cell>,
}

impl Triangulation {
    pub fn new(mut cells: Vec<Cell>) -> Self {
        cells.sort_unstable();
        cells.dedup();
        Triangulation { cells }
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn used_points(&self) -> Cell {
        self.cells.iter().fold(0, |a, c| a | c)
    }
}

/// Interior wall between two adjacent simplices, with the unique linear
/// dependence on their union. `coeffs` is indexed by point and positive at
/// both apexes.
#[derive(Debug, Clone)]
pub struct Wall {
    pub cells: [usize; 2],
    pub coeffs: Vec<(usize, i64)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointConfiguration {
    vectors: Vec<Vec<i64>>,
    dim: usize,
}

impl PointConfiguration {
    pub fn new(vectors: Vec<Vec<i64>>) -> Result<Self, CayleyError> {
        if vectors.len() > 128 {
            return Err(CayleyError::TooManyPoints(vectors.len()));
        }
        let dim = vectors.first().map_or(0, |v| v.len());
        if arith::rank_int(&vectors, dim) != dim || vectors.iter().any(|v| v.len() != dim) {
            return Err(CayleyError::RankDeficient);
        }
        Ok(PointConfiguration { vectors, dim })
    }

    /// Affine plane points `(x, y)` homogenized as `(x, y, 1)`.
    pub fn planar(points: &[[i64; 2]]) -> Result<Self, CayleyError> {
        Self::new(points.iter().map(|p| vec![p[0], p[1], 1]).collect())
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Number of points in a full-dimensional simplex.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vectors(&self) -> &[Vec<i64>] {
        &self.vectors
    }

    pub fn all_points(&self) -> Cell {
        if self.len() == 128 {
            u128::MAX
        } else {
            (1u128 << self.len()) - 1
        }
    }

    fn det_of(&self, idx: &[usize]) -> BigInt {
        let m: Vec<Vec<i64>> = idx.iter().map(|&i| self.vectors[i].clone()).collect();
        arith::det_int(&m)
    }

    /// Normalized volume `|det|` of a simplex.
    pub fn simplex_volume(&self, c: Cell) -> i64 {
        self.det_of(&cell_points(c)).abs().to_i64().expect("small determinant")
    }

    /// Primitive integer dependence on `D + 1` points (indexed like `idx`).
    pub fn circuit(&self, idx: &[usize]) -> Vec<i64> {
        debug_assert_eq!(idx.len(), self.dim + 1);
        let mut c: Vec<i64> = (0..idx.len())
            .map(|u| {
                let rest: Vec<usize> = idx
                    .iter()
                    .enumerate()
                    .filter(|&(t, _)| t != u)
                    .map(|(_, &i)| i)
                    .collect();
                let d = self.det_of(&rest).to_i64().expect("small determinant");
                if u % 2 == 0 {
                    d
                } else {
                    -d
                }
            })
            .collect();
        let g = gcd_slice(&c);
        if g > 1 {
            c.iter_mut().for_each(|x| *x /= g);
        }
        c
    }

    /// Primitive functional vanishing on `D - 1` independent points.
    fn ridge_normal(&self, ridge: &[usize]) -> Vec<i64> {
        // Cofactor expansion: g_t = (-1)^t det(ridge rows, columns != t).
        let d = self.dim;
        let mut g: Vec<i64> = (0..d)
            .map(|t| {
                let m: Vec<Vec<i64>> = ridge
                    .iter()
                    .map(|&i| {
                        self.vectors[i]
                            .iter()
                            .enumerate()
                            .filter(|&(s, _)| s != t)
                            .map(|(_, &x)| x)
                            .collect()
                    })
                    .collect();
                let v = arith::det_int(&m).to_i64().expect("small determinant");
                if t % 2 == 0 {
                    v
                } else {
                    -v
                }
            })
            .collect();
        let gg = gcd_slice(&g);
        if gg > 1 {
            g.iter_mut().for_each(|x| *x /= gg);
        }
        g
    }

    fn dot(&self, i: usize, f: &[i64]) -> i64 {
        self.vectors[i].iter().zip(f).map(|(a, b)| a * b).sum()
    }

    fn check_heights(&self, h: &[Q]) -> Result<(), CayleyError> {
        if h.len() != self.len() {
            return Err(CayleyError::HeightLength {
                expected: self.len(),
                found: h.len(),
            });
        }
        Ok(())
    }

    /// Linear functional agreeing with the heights on an independent `D`-set.
    fn lift(&self, idx: &[usize], h: &[Q]) -> Option<Vec<Q>> {
        let a: Vec<Vec<Q>> = idx
            .iter()
            .map(|&i| self.vectors[i].iter().map(|&x| arith::q(x)).collect())
            .collect();
        let b: Vec<Q> = idx.iter().map(|&i| h[i].clone()).collect();
        arith::solve(&a, &b)
    }

    fn eval(&self, i: usize, f: &[Q]) -> Q {
        self.vectors[i].iter().zip(f).map(|(&x, c)| c * arith::q(x)).sum()
    }

    /// Cells of the regular subdivision induced by arbitrary heights: the
    /// point sets of the lower facets of the lifted configuration. Points
    /// lifted strictly above the lower hull belong to no cell.
    pub fn regular_subdivision(&self, h: &[Q]) -> Result<Vec<Cell>, CayleyError> {
        self.check_heights(h)?;
        let n = self.len();
        let d = self.dim;
        let mut cells = BTreeSet::new();
        let mut idx: Vec<usize> = (0..d).collect();
        if d > n {
            return Ok(Vec::new());
        }
        loop {
            if !self.det_of(&idx).is_zero() {
                let f = self.lift(&idx, h).expect("independent");
                let mut tight = 0u128;
                let mut lower = true;
                for i in 0..n {
                    let diff = &h[i] - self.eval(i, &f);
                    if diff.is_negative() {
                        lower = false;
                        break;
                    }
                    if diff.is_zero() {
                        tight |= 1 << i;
                    }
                }
                if lower {
                    cells.insert(tight);
                }
            }
            // Next d-subset in lexicographic order.
            let mut k = d;
            loop {
                if k == 0 {
                    return Ok(cells.into_iter().collect());
                }
                k -= 1;
                if idx[k] < n - d + k {
                    idx[k] += 1;
                    for t in k + 1..d {
                        idx[t] = idx[t - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    /// Regular triangulation for heights in general position, by gift
    /// wrapping across ridges. `Ok(None)` if the heights are not generic.
    pub fn regular_triangulation(&self, h: &[Q]) -> Result<Option<Triangulation>, CayleyError> {
        self.check_heights(h)?;
        let Some(first) = self.first_lower_cell(h) else {
            return Ok(None);
        };
        let mut cells: BTreeSet<Cell> = BTreeSet::new();
        let mut seen_ridges: HashSet<Cell> = HashSet::new();
        let mut queue = VecDeque::from([first]);
        cells.insert(first);
        while let Some(cell) = queue.pop_front() {
            let pts = cell_points(cell);
            let f = self.lift(&pts, h).expect("independent");
            for &a in &pts {
                let ridge_cell = cell & !(1u128 << a);
                if !seen_ridges.insert(ridge_cell) {
                    continue;
                }
                let ridge = cell_points(ridge_cell);
                let mut g = self.ridge_normal(&ridge);
                if self.dot(a, &g) > 0 {
                    g.iter_mut().for_each(|x| *x = -*x);
                }
                let mut best: Option<(Q, usize, bool)> = None;
                for b in 0..self.len() {
                    let gb = self.dot(b, &g);
                    if gb <= 0 {
                        continue;
                    }
                    let t = (&h[b] - self.eval(b, &f)) / arith::q(gb);
                    best = match best {
                        None => Some((t, b, false)),
                        Some((bt, bb, tie)) => {
                            if t < bt {
                                Some((t, b, false))
                            } else if t == bt {
                                Some((bt, bb, true))
                            } else {
                                Some((bt, bb, tie))
                            }
                        }
                    };
                }
                match best {
                    None => {}
                    Some((_, _, true)) => return Ok(None),
                    Some((_, b, false)) => {
                        let next = ridge_cell | 1u128 << b;
                        if cells.insert(next) {
                            queue.push_back(next);
                        }
                    }
                }
            }
        }
        // A point tight on some lower facet but not a vertex of it means ties.
        for &c in &cells {
            let f = self.lift(&cell_points(c), h).expect("independent");
            for i in 0..self.len() {
                if c >> i & 1 == 0 && (&h[i] - self.eval(i, &f)).is_zero() {
                    return Ok(None);
                }
            }
        }
        Ok(Some(Triangulation::new(cells.into_iter().collect())))
    }

    /// A lower facet, found as the optimal vertex of
    /// `max <z, c>` subject to `<p_i, c> <= h_i` for `z` a positive
    /// combination of the points. The optimum is a vertex when `z` is
    /// interior to a cell, so a few weightings are tried.
    fn first_lower_cell(&self, h: &[Q]) -> Option<Cell> {
        let d = self.dim;
        let n = self.len();
        for attempt in 0..16u64 {
            let w: Vec<i64> = (0..n as u64)
                .map(|i| 1 + ((i + 1) * (2 * attempt + 7919) * 104_729 % 997) as i64)
                .collect();
            let z: Vec<i64> = (0..d)
                .map(|t| self.vectors.iter().zip(&w).map(|(v, wi)| v[t] * wi).sum())
                .collect();
            let mut objective: Vec<Q> = z.iter().map(|&x| arith::q(x)).collect();
            objective.extend(z.iter().map(|&x| arith::q(-x)));
            let constraints = self
                .vectors
                .iter()
                .zip(h)
                .map(|(v, hi)| {
                    let mut coeffs: Vec<Q> = v.iter().map(|&x| arith::q(x)).collect();
                    coeffs.extend(v.iter().map(|&x| arith::q(-x)));
                    Constraint {
                        coeffs,
                        rel: Relation::Le,
                        rhs: hi.clone(),
                    }
                })
                .collect();
            let lp = LinearProgram {
                num_vars: 2 * d,
                objective,
                constraints,
            };
            let LpOutcome::Optimal { x, .. } = lp.solve() else {
                return None;
            };
            let c: Vec<Q> = (0..d).map(|t| &x[t] - &x[t + d]).collect();
            let tight: Vec<usize> = (0..n).filter(|&i| (self.eval(i, &c) - &h[i]).is_zero()).collect();
            let rows: Vec<Vec<i64>> = tight.iter().map(|&i| self.vectors[i].clone()).collect();
            if arith::rank_int(&rows, d) < d {
                continue;
            }
            return (tight.len() == d).then(|| cell_of(&tight));
        }
        None
    }

    /// Interior walls of a triangulation with their circuits.
    pub fn walls(&self, t: &Triangulation) -> Vec<Wall> {
        let mut ridges: BTreeMap<Cell, Vec<usize>> = BTreeMap::new();
        for (ci, &c) in t.cells().iter().enumerate() {
            for p in cell_points(c) {
                ridges.entry(c & !(1u128 << p)).or_default().push(ci);
            }
        }
        let mut out = Vec::new();
        for (_, cs) in ridges {
            if cs.len() != 2 {
                continue;
            }
            let (c1, c2) = (t.cells()[cs[0]], t.cells()[cs[1]]);
            let u = cell_points(c1 | c2);
            let mut coeffs = self.circuit(&u);
            let apex = (c2 & !c1).trailing_zeros() as usize;
            let pos = u.iter().position(|&i| i == apex).expect("apex in union");
            if coeffs[pos] < 0 {
                coeffs.iter_mut().for_each(|x| *x = -*x);
            }
            out.push(Wall {
                cells: [cs[0], cs[1]],
                coeffs: u.into_iter().zip(coeffs).filter(|&(_, c)| c != 0).collect(),
            });
        }
        out
    }

    /// Heights certifying that `t` is regular, if it is: strict local
    /// convexity `Σ c_u h_u >= 1` across every interior wall, plus every
    /// unused point lifted strictly above the cell containing it.
    pub fn is_regular(&self, t: &Triangulation) -> Option<Vec<Q>> {
        let n = self.len();
        let mut constraints: Vec<Constraint> = self
            .walls(t)
            .into_iter()
            .map(|w| {
                let mut coeffs = vec![Q::zero(); n];
                for (i, c) in w.coeffs {
                    coeffs[i] = arith::q(c);
                }
                Constraint {
                    coeffs,
                    rel: Relation::Ge,
                    rhs: arith::q(1),
                }
            })
            .collect();
        let used = t.used_points();
        for p in 0..n {
            if used >> p & 1 == 1 {
                continue;
            }
            let &cell = t.cells().iter().find(|&&c| self.cell_contains(c, p))?;
            let mut idx = cell_points(cell);
            idx.push(p);
            let mut c = self.circuit(&idx);
            if c[idx.len() - 1] < 0 {
                c.iter_mut().for_each(|x| *x = -*x);
            }
            let mut coeffs = vec![Q::zero(); n];
            for (&i, &ci) in idx.iter().zip(&c) {
                coeffs[i] = arith::q(ci);
            }
            constraints.push(Constraint {
                coeffs,
                rel: Relation::Ge,
                rhs: arith::q(1),
            });
        }
        LinearProgram::feasibility(n, constraints).feasible_point()
    }

    /// Whether point `p` lies in the closed simplex `c`.
    pub fn cell_contains(&self, c: Cell, p: usize) -> bool {
        let mut idx = cell_points(c);
        idx.push(p);
        let coeffs = self.circuit(&idx);
        // p = Σ μ_b b with μ_b = -c_b / c_p, all μ_b >= 0.
        let cp = coeffs[idx.len() - 1];
        coeffs[..idx.len() - 1].iter().all(|&cb| cb * cp <= 0)
    }

    pub fn is_fine(&self, t: &Triangulation) -> bool {
        t.used_points() == self.all_points()
    }
}
