//! Enumeration of fine regular triangulations by bistellar flips.
//!
//! Height vectors inducing fine regular subdivisions form an open convex
//! cone, so the fine regular triangulations are connected by flips whose
//! endpoints are both fine and regular. Breadth-first search from a seed
//! therefore finds all of them.

use std::collections::{HashMap, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{cell_points, Cell, PointConfiguration, Triangulation};
use crate::arith::{self, Q};
use crate::error::CayleyError;

/// A fine regular triangulation with heights inducing it.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularTriangulation {
    pub triangulation: Triangulation,
    pub heights: Vec<Q>,
}

/// Circuits of `D + 1`-point sets, cached across the search.
#[derive(Default)]
struct CircuitCache {
    map: HashMap<Cell, Vec<(usize, i64)>>,
}

impl CircuitCache {
    fn get(&mut self, c: &PointConfiguration, u: Cell) -> &[(usize, i64)] {
        self.map.entry(u).or_insert_with(|| {
            let idx = cell_points(u);
            let coeffs = c.circuit(&idx);
            idx.into_iter().zip(coeffs).filter(|&(_, x)| x != 0).collect()
        })
    }
}

/// Seed heights: squared norm (strictly convex on the affine hull, hence
/// fine) plus a small random perturbation for genericity.
pub fn seed_triangulation(c: &PointConfiguration, seed: u64) -> Result<RegularTriangulation, CayleyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let norms: Vec<i64> = c.vectors().iter().map(|v| v.iter().map(|x| x * x).sum()).collect();
    let mut scale = 1_000_000i64;
    for _ in 0..40 {
        let heights: Vec<Q> = norms
            .iter()
            .map(|&n| arith::q(n) * arith::q(scale) + arith::q(rng.gen_range(0..1000)))
            .collect();
        if let Some(t) = c.regular_triangulation(&heights)? {
            if c.is_fine(&t) {
                return Ok(RegularTriangulation {
                    triangulation: t,
                    heights,
                });
            }
        }
        scale = scale.saturating_mul(4).min(1 << 40);
    }
    Err(CayleyError::NoSeed)
}

/// Fine triangulations one flip away from `t`.
fn fine_flip_neighbors(c: &PointConfiguration, t: &Triangulation, cache: &mut CircuitCache) -> Vec<Triangulation> {
    let cells = t.cells();
    let mut ridges: HashMap<Cell, Vec<usize>> = HashMap::new();
    for (ci, &cell) in cells.iter().enumerate() {
        for p in cell_points(cell) {
            ridges.entry(cell & !(1u128 << p)).or_default().push(ci);
        }
    }
    let mut seen: HashSet<(Cell, Cell)> = HashSet::new();
    let mut out = Vec::new();
    for cs in ridges.values() {
        if cs.len() != 2 {
            continue;
        }
        let (c1, c2) = (cells[cs[0]], cells[cs[1]]);
        let circuit = cache.get(c, c1 | c2);
        let apex = (c2 & !c1).trailing_zeros() as usize;
        let sign = circuit
            .iter()
            .find(|&&(i, _)| i == apex)
            .map(|&(_, x)| x.signum())
            .expect("apex in circuit support");
        let (mut plus, mut minus) = (0u128, 0u128);
        for &(i, x) in circuit {
            if x * sign > 0 {
                plus |= 1 << i;
            } else {
                minus |= 1 << i;
            }
        }
        if minus.count_ones() < 2 || !seen.insert((plus, minus)) {
            continue;
        }
        let z = plus | minus;
        let mut link: Option<Vec<Cell>> = None;
        let mut ok = true;
        for zp in cell_points(plus) {
            let s = z & !(1u128 << zp);
            let mut l: Vec<Cell> = cells.iter().filter(|&&x| x & s == s).map(|&x| x & !s).collect();
            l.sort_unstable();
            match &link {
                None => link = Some(l),
                Some(prev) if *prev == l => {}
                Some(_) => {
                    ok = false;
                    break;
                }
            }
        }
        let Some(link) = link.filter(|_| ok) else {
            continue;
        };
        let mut removed: HashSet<Cell> = HashSet::new();
        for zp in cell_points(plus) {
            let s = z & !(1u128 << zp);
            for &l in &link {
                removed.insert(s | l);
            }
        }
        let mut next: Vec<Cell> = cells.iter().copied().filter(|x| !removed.contains(x)).collect();
        for zm in cell_points(minus) {
            let s = z & !(1u128 << zm);
            for &l in &link {
                next.push(s | l);
            }
        }
        let nt = Triangulation::new(next);
        if c.is_fine(&nt) {
            out.push(nt);
        }
    }
    out
}

/// All fine regular triangulations, sorted by their canonical cell lists.
pub fn enumerate_fine_regular(c: &PointConfiguration, seed: u64) -> Result<Vec<RegularTriangulation>, CayleyError> {
    let first = seed_triangulation(c, seed)?;
    let mut cache = CircuitCache::default();
    let mut visited: HashSet<Triangulation> = HashSet::from([first.triangulation.clone()]);
    let mut queue = VecDeque::from([first.triangulation.clone()]);
    let mut found = vec![first];
    while let Some(t) = queue.pop_front() {
        for nt in fine_flip_neighbors(c, &t, &mut cache) {
            if !visited.insert(nt.clone()) {
                continue;
            }
            if let Some(heights) = c.is_regular(&nt) {
                queue.push_back(nt.clone());
                found.push(RegularTriangulation {
                    triangulation: nt,
                    heights,
                });
            }
        }
    }
    found.sort_by(|a, b| a.triangulation.cmp(&b.triangulation));
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::config::cell_of;

    #[test]
    fn square_has_two() {
        let c = PointConfiguration::planar(&[[0, 0], [1, 0], [1, 1], [0, 1]]).unwrap();
        let ts = enumerate_fine_regular(&c, 7).unwrap();
        assert_eq!(ts.len(), 2);
    }

    #[test]
    fn pentagon_has_five() {
        let c = PointConfiguration::planar(&[[0, 0], [2, 0], [3, 2], [1, 3], [-1, 2]]).unwrap();
        assert_eq!(enumerate_fine_regular(&c, 1).unwrap().len(), 5);
    }

    #[test]
    fn interior_point_is_always_used() {
        // Fine triangulations must cone from the interior point.
        let c = PointConfiguration::planar(&[[0, 0], [2, 0], [2, 2], [0, 2], [1, 1]]).unwrap();
        let ts = enumerate_fine_regular(&c, 3).unwrap();
        assert_eq!(ts.len(), 1);
        assert_eq!(ts[0].triangulation.cells().len(), 4);
        let c = PointConfiguration::planar(&[[0, 0], [3, 0], [0, 3], [1, 1]]).unwrap();
        let ts = enumerate_fine_regular(&c, 3).unwrap();
        assert_eq!(ts.len(), 1);
        assert_eq!(ts[0].triangulation.cells()[0] & cell_of(&[3]), cell_of(&[3]));
    }

    #[test]
    fn witnesses_round_trip() {
        let c = PointConfiguration::planar(&[[0, 0], [3, 0], [3, 1], [1, 2], [0, 2], [1, 1], [2, 1]]).unwrap();
        let ts = enumerate_fine_regular(&c, 11).unwrap();
        assert!(!ts.is_empty());
        for t in &ts {
            assert_eq!(
                c.regular_triangulation(&t.heights).unwrap().as_ref(),
                Some(&t.triangulation)
            );
        }
        // Independent of the seed.
        let again = enumerate_fine_regular(&c, 99).unwrap();
        let a: Vec<_> = ts.iter().map(|t| &t.triangulation).collect();
        let b: Vec<_> = again.iter().map(|t| &t.triangulation).collect();
        assert_eq!(a, b);
    }
}
