use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("point set is empty")]
    Empty,
    #[error("points span a {found}-dimensional affine space, expected {expected}")]
    Degenerate { expected: usize, found: usize },
    #[error("origin is not in the interior of the polytope")]
    OriginNotInterior,
    #[error("polytope is not reflexive")]
    NotReflexive,
    #[error("facet {facet} lies at lattice distance {distance}, expected 1")]
    FacetDistance { facet: usize, distance: i64 },
    #[error("coordinate overflow in exact integer arithmetic")]
    Overflow,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Text { line: usize, message: String },
    #[error("json: {0}")]
    Json(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CayleyError {
    #[error("Cayley configuration has {0} points; at most 128 are supported")]
    TooManyPoints(usize),
    #[error("point vectors do not span their ambient space")]
    RankDeficient,
    #[error("height function has {found} entries for {expected} points")]
    HeightLength { expected: usize, found: usize },
    #[error("could not find a fine regular triangulation to seed the enumeration")]
    NoSeed,
    #[error("triangulation is not fine")]
    NotFine,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AmdError {
    #[error("edge partitions have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("fan violates the cone classification: cone {cone} over {rays} rays is neither a basic simplex nor a unit-edge parallelogram")]
    BadCone { cone: usize, rays: usize },
    #[error("inconsistent gluing along edge {0}")]
    Gluing(usize),
    #[error("matching violated upstream at edge {edge}: pair ({i},{j}) has negative multiplicity")]
    MatchingViolated { edge: usize, i: usize, j: usize },
    #[error("invariant pipeline inconsistent: {0}")]
    Inconsistent(String),
    #[error("inconsistent Minkowski polynomial coefficient at {0:?}")]
    PolynomialEdge([i64; 3]),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Cayley(#[from] CayleyError),
}
