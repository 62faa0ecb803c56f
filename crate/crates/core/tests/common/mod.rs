#![allow(dead_code)]

use amd_core::geometry::io::{parse_batch, PolytopeRecord};
use amd_core::geometry::{LatticePolygon, LatticePolytope3, Point3};

pub fn cube() -> LatticePolytope3 {
    let pts: Vec<Point3> = (0..8)
        .map(|i| [1 - 2 * (i & 1), 1 - (i & 2), 1 - (i & 4) / 2])
        .collect();
    LatticePolytope3::hull(&pts).unwrap()
}

/// Reflexive simplex with polar of normalized volume 64.
pub fn simplex64() -> LatticePolytope3 {
    LatticePolytope3::hull(&[[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, -1, -1]]).unwrap()
}

/// Reflexive polytope with a facet that has no admissible decomposition.
pub fn no_amd_polytope() -> LatticePolytope3 {
    LatticePolytope3::hull(&[[-1, -1, -1], [2, -1, -1], [-1, 1, -1], [0, 0, 1]]).unwrap()
}

pub fn hexagon() -> LatticePolygon {
    LatticePolygon::hull(&[[1, 0], [1, 1], [0, 1], [-1, 0], [-1, -1], [0, -1]]).unwrap()
}

/// Pyramid over the hexagon at height one; the hexagon is a facet.
pub fn hexagon_pyramid() -> LatticePolytope3 {
    LatticePolytope3::hull(&[
        [1, 0, 1],
        [1, 1, 1],
        [0, 1, 1],
        [-1, 0, 1],
        [-1, -1, 1],
        [0, -1, 1],
        [0, 0, -1],
    ])
    .unwrap()
}

/// Two lattice triangles without admissible decompositions.
pub fn no_amd_triangles() -> [LatticePolygon; 2] {
    [
        LatticePolygon::hull(&[[-1, -1], [2, -1], [-1, 1]]).unwrap(),
        LatticePolygon::hull(&[[-1, -1], [1, 0], [0, 1]]).unwrap(),
    ]
}

fn load(text: &str) -> Vec<(String, LatticePolytope3)> {
    parse_batch(text)
        .unwrap()
        .into_iter()
        .map(|PolytopeRecord { id, vertices }| (id, LatticePolytope3::hull(&vertices).unwrap()))
        .collect()
}

pub fn suite20() -> Vec<(String, LatticePolytope3)> {
    load(include_str!("../data/suite20.json"))
}

pub fn suite50() -> Vec<(String, LatticePolytope3)> {
    load(include_str!("../data/suite50.json"))
}

pub fn suite_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

pub mod oracles;
