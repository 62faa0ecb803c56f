//! Exact lattice geometry in dimensions 2 and 3.

pub mod io;
pub mod polygon;
pub mod polytope;

pub use polygon::{AffineMap2, LatticePolygon, Point2};
pub use polytope::{Edge, EdgeGeometry, Facet, FacetChart, LatticePolytope3, Point3, RationalPolytope3};
