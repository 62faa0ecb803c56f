//! Minkowski polynomials and their classical periods.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::amd::PolytopeContext;
use crate::arith::{add2, dot3, gcd_slice, sub2};
use crate::error::AmdError;
use crate::geometry::{LatticePolytope3, Point2, Point3};
use crate::minkowski::{ATriangle, AdmissibleDecomposition};

/// Laurent polynomial in three variables with integer coefficients; zero
/// coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly3 {
    pub terms: BTreeMap<Point3, BigInt>,
}

impl LaurentPoly3 {
    pub fn from_terms(terms: impl IntoIterator<Item = (Point3, i64)>) -> Self {
        let mut p = LaurentPoly3::default();
        for (e, c) in terms {
            *p.terms.entry(e).or_insert_with(BigInt::zero) += c;
        }
        p.terms.retain(|_, c| !c.is_zero());
        p
    }

    pub fn support(&self) -> Vec<Point3> {
        self.terms.keys().copied().collect()
    }

    pub fn coeff(&self, e: Point3) -> BigInt {
        self.terms.get(&e).cloned().unwrap_or_default()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(e, c)| serde_json::json!({ "exp": e, "coeff": big_json(c) }))
                .collect(),
        )
    }
}

/// Exact JSON number for an arbitrary-precision integer.
pub fn big_json(x: &BigInt) -> serde_json::Value {
    serde_json::from_str(&x.to_string()).expect("integer literal")
}

fn binomial(n: i64, k: i64) -> i64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Coefficients of the polynomial attached to an A-triangle: 1 at the apex
/// and binomials along the edge of length `n + 1`; `1 + t` for a segment.
pub fn summand_polynomial(s: &ATriangle) -> Vec<(Point2, i64)> {
    let v = &s.vertices;
    if s.n < 0 {
        return v.iter().map(|&p| (p, 1)).collect();
    }
    let len = s.n + 1;
    for k in 0..3 {
        let (a, b, apex) = (v[k], v[(k + 1) % 3], v[(k + 2) % 3]);
        let d = sub2(b, a);
        if gcd_slice(&d) == len {
            let step = [d[0] / len, d[1] / len];
            let mut out = vec![(apex, 1)];
            for i in 0..=len {
                out.push(([a[0] + i * step[0], a[1] + i * step[1]], binomial(len, i)));
            }
            return out;
        }
    }
    unreachable!("A-triangle has an edge of length n + 1")
}

/// Product of the summand polynomials, in the chart coordinates of `d`.
pub fn facet_polynomial(d: &AdmissibleDecomposition) -> BTreeMap<Point2, i64> {
    let mut acc: BTreeMap<Point2, i64> = BTreeMap::from([(d.offset(), 1)]);
    for s in d.summands() {
        let f = summand_polynomial(s);
        let mut next = BTreeMap::new();
        for (&p, &c) in &acc {
            for &(q, e) in &f {
                *next.entry(add2(p, q)).or_insert(0) += c * e;
            }
        }
        acc = next;
    }
    acc
}

/// The Minkowski polynomial for a choice of decomposition per facet
/// (indices into each facet's admissible decompositions).
pub fn minkowski_polynomial(ctx: &PolytopeContext, choice: &[usize]) -> Result<LaurentPoly3, AmdError> {
    let mut terms: BTreeMap<Point3, i64> = BTreeMap::new();
    for (f, &di) in choice.iter().enumerate() {
        let data = &ctx.facets[f];
        let d = &data.solutions().decompositions[di];
        for (p, c) in facet_polynomial(d) {
            let x = data.chart.to_lattice(p);
            match terms.get(&x) {
                Some(&prev) if prev != c => return Err(AmdError::PolynomialEdge(x)),
                _ => {
                    terms.insert(x, c);
                }
            }
        }
    }
    Ok(LaurentPoly3::from_terms(terms))
}

/// `c_0, ..., c_order` with `c_m` the constant term of `w^m`. Only
/// exponents `x` with `-x ∈ (order - m) P` are kept after step `m`, where
/// `P` is the Newton polytope of `w`.
pub fn classical_period(w: &LaurentPoly3, order: usize) -> Result<Vec<BigInt>, AmdError> {
    let newton = newton_facets(w)?;
    let reachable = |x: Point3, budget: i64| match &newton {
        Some(facets) => facets
            .iter()
            .all(|&(n, level)| dot3(n, [-x[0], -x[1], -x[2]]) <= budget * level),
        None => true,
    };
    let mut power: BTreeMap<Point3, BigInt> = BTreeMap::from([([0, 0, 0], BigInt::one())]);
    let mut out = vec![BigInt::one()];
    for m in 1..=order {
        let budget = (order - m) as i64;
        let mut next: BTreeMap<Point3, BigInt> = BTreeMap::new();
        for (x, c) in &power {
            for (y, e) in &w.terms {
                let z = [x[0] + y[0], x[1] + y[1], x[2] + y[2]];
                if reachable(z, budget) {
                    *next.entry(z).or_insert_with(BigInt::zero) += c * e;
                }
            }
        }
        next.retain(|_, c| !c.is_zero());
        out.push(next.get(&[0, 0, 0]).cloned().unwrap_or_default());
        power = next;
    }
    Ok(out)
}

/// Facet inequalities `<n, x> <= level` of the Newton polytope, when it is
/// full-dimensional.
fn newton_facets(w: &LaurentPoly3) -> Result<Option<Vec<(Point3, i64)>>, AmdError> {
    if w.terms.is_empty() {
        return Ok(None);
    }
    match LatticePolytope3::hull(&w.support()) {
        Ok(p) => Ok(Some(p.facets().iter().map(|f| (f.normal, f.level)).collect())),
        Err(crate::error::GeometryError::Degenerate { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn period_json(c: &[BigInt]) -> serde_json::Value {
    serde_json::Value::Array(c.iter().map(big_json).collect())
}
