//! Minkowski decompositions of reflexive 3-polytope facets, the refined fans
//! they induce, and the invariants and periods of the resulting smoothings.

pub mod amd;
pub mod arith;
pub mod cayley;
pub mod cli;
pub mod error;
pub mod fan;
pub mod geometry;
pub mod invariants;
pub mod lp;
pub mod minkowski;
pub mod period;
