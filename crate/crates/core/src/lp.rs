//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! All variables are non-negative. Used for regularity certificates of
//! triangulations, where systems are small but must be decided exactly.

use crate::arith::Q;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<Q>,
    pub rel: Relation,
    pub rhs: Q,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Q>, value: Q },
    Infeasible,
    Unbounded,
}

/// `maximize objective · x` subject to the constraints and `x >= 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<Q>,
    pub constraints: Vec<Constraint>,
}

struct Tableau {
    rows: Vec<Vec<Q>>,
    rhs: Vec<Q>,
    basis: Vec<usize>,
    reduced: Vec<Q>,
    value: Q,
}

enum Step {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, p: usize, col: usize) {
        let inv = self.rows[p][col].recip();
        for x in self.rows[p].iter_mut() {
            *x *= &inv;
        }
        self.rhs[p] *= &inv;
        let prow = self.rows[p].clone();
        let prhs = self.rhs[p].clone();
        for i in 0..self.rows.len() {
            if i == p || self.rows[i][col].is_zero() {
                continue;
            }
            let f = self.rows[i][col].clone();
            for (x, y) in self.rows[i].iter_mut().zip(&prow) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
            self.rhs[i] -= &f * &prhs;
        }
        if !self.reduced[col].is_zero() {
            let f = self.reduced[col].clone();
            for (x, y) in self.reduced.iter_mut().zip(&prow) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
            self.value += &f * &prhs;
        }
        self.basis[p] = col;
    }

    fn set_objective(&mut self, cost: &[Q]) {
        let ncols = cost.len();
        let mut reduced = cost.to_vec();
        let mut value = Q::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for j in 0..ncols {
                if !self.rows[i][j].is_zero() {
                    reduced[j] -= cb * &self.rows[i][j];
                }
            }
            value += cb * &self.rhs[i];
        }
        self.reduced = reduced;
        self.value = value;
    }

    fn run(&mut self, allowed: usize) -> Step {
        loop {
            let Some(col) = (0..allowed).find(|&j| self.reduced[j].is_positive()) else {
                return Step::Optimal;
            };
            let mut best: Option<(usize, Q)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio < br || (ratio == br && self.basis[i] < self.basis[bi]) {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            let Some((p, _)) = best else {
                return Step::Unbounded;
            };
            self.pivot(p, col);
        }
    }
}

impl LinearProgram {
    pub fn feasibility(num_vars: usize, constraints: Vec<Constraint>) -> Self {
        LinearProgram {
            num_vars,
            objective: vec![Q::zero(); num_vars],
            constraints,
        }
    }

    pub fn solve(&self) -> LpOutcome {
        let n = self.num_vars;
        let m = self.constraints.len();
        // Normalize to non-negative right-hand sides.
        let mut rows = Vec::with_capacity(m);
        for c in &self.constraints {
            debug_assert_eq!(c.coeffs.len(), n);
            if c.rhs.is_negative() {
                let rel = match c.rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                rows.push((c.coeffs.iter().map(|x| -x).collect::<Vec<_>>(), rel, -&c.rhs));
            } else {
                rows.push((c.coeffs.clone(), c.rel, c.rhs.clone()));
            }
        }
        let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
        let ncols = n + n_slack + n_art;
        let art_start = n + n_slack;
        let mut t = Tableau {
            rows: Vec::with_capacity(m),
            rhs: Vec::with_capacity(m),
            basis: Vec::with_capacity(m),
            reduced: Vec::new(),
            value: Q::zero(),
        };
        let (mut s, mut a) = (n, art_start);
        for (coeffs, rel, rhs) in rows {
            let mut row = coeffs;
            row.resize(ncols, Q::zero());
            match rel {
                Relation::Le => {
                    row[s] = Q::one();
                    t.basis.push(s);
                    s += 1;
                }
                Relation::Ge => {
                    row[s] = -Q::one();
                    s += 1;
                    row[a] = Q::one();
                    t.basis.push(a);
                    a += 1;
                }
                Relation::Eq => {
                    row[a] = Q::one();
                    t.basis.push(a);
                    a += 1;
                }
            }
            t.rows.push(row);
            t.rhs.push(rhs);
        }

        if n_art > 0 {
            let mut cost = vec![Q::zero(); ncols];
            for c in cost.iter_mut().skip(art_start) {
                *c = -Q::one();
            }
            t.set_objective(&cost);
            t.run(ncols);
            if t.value.is_negative() {
                return LpOutcome::Infeasible;
            }
            // Drive zero-level artificials out of the basis.
            let mut i = 0;
            while i < t.rows.len() {
                if t.basis[i] >= art_start {
                    if let Some(col) = (0..art_start).find(|&j| !t.rows[i][j].is_zero()) {
                        t.pivot(i, col);
                        i += 1;
                    } else {
                        t.rows.remove(i);
                        t.rhs.remove(i);
                        t.basis.remove(i);
                    }
                } else {
                    i += 1;
                }
            }
            for row in t.rows.iter_mut() {
                row.truncate(art_start);
            }
        }

        let mut cost = self.objective.clone();
        cost.resize(art_start, Q::zero());
        t.set_objective(&cost);
        match t.run(art_start) {
            Step::Unbounded => LpOutcome::Unbounded,
            Step::Optimal => {
                let mut x = vec![Q::zero(); n];
                for (i, &b) in t.basis.iter().enumerate() {
                    if b < n {
                        x[b] = t.rhs[i].clone();
                    }
                }
                LpOutcome::Optimal { x, value: t.value }
            }
        }
    }

    pub fn feasible_point(&self) -> Option<Vec<Q>> {
        let lp = LinearProgram::feasibility(self.num_vars, self.constraints.clone());
        match lp.solve() {
            LpOutcome::Optimal { x, .. } => Some(x),
            _ => None,
        }
    }
}
