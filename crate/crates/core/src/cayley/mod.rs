//! The Cayley trick: fine mixed subdivisions of a facet polygon subordinate
//! to an admissible decomposition, realized as fine regular triangulations
//! of the Cayley configuration `⋃_j (F_j ∩ L) × {e_j}`.

pub mod config;
pub mod flips;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::arith::{add2, dot3};
use crate::error::CayleyError;
use crate::geometry::{LatticePolygon, Point2};
use crate::minkowski::AdmissibleDecomposition;

pub use config::{Cell, PointConfiguration, Triangulation};
pub use flips::RegularTriangulation;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyConfiguration {
    config: PointConfiguration,
    /// `(summand, lattice point of the placed summand)` per point.
    labels: Vec<(usize, Point2)>,
    num_summands: usize,
    offset: Point2,
    target: LatticePolygon,
}

impl CayleyConfiguration {
    pub fn new(d: &AdmissibleDecomposition) -> Result<Self, CayleyError> {
        let k = d.num_summands();
        let mut labels = Vec::new();
        let mut vectors = Vec::new();
        for (j, s) in d.summands().iter().enumerate() {
            for p in s.polygon().lattice_points() {
                labels.push((j, p));
                let mut v = vec![p[0], p[1]];
                v.extend((0..k).map(|t| i64::from(t == j)));
                vectors.push(v);
            }
        }
        if vectors.len() > 128 {
            return Err(CayleyError::TooManyPoints(vectors.len()));
        }
        Ok(CayleyConfiguration {
            config: PointConfiguration::new(vectors)?,
            labels,
            num_summands: k,
            offset: d.offset(),
            target: d.target().clone(),
        })
    }

    pub fn config(&self) -> &PointConfiguration {
        &self.config
    }

    pub fn labels(&self) -> &[(usize, Point2)] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_summands(&self) -> usize {
        self.num_summands
    }

    /// Affine dimension of the Cayley polytope.
    pub fn dimension(&self) -> usize {
        self.config.dim() - 1
    }

    pub fn target(&self) -> &LatticePolygon {
        &self.target
    }

    /// Mixed subdivision of the target polygon induced by a fine
    /// triangulation of the configuration.
    pub fn mixed_subdivision(&self, t: &RegularTriangulation) -> FineMixedSubdivision {
        let cells: Vec<MixedCell> = t.triangulation.cells().iter().map(|&c| self.mixed_cell(c)).collect();
        let edge_partitions = (0..self.target.num_edges())
            .map(|e| self.edge_partition(&cells, e))
            .collect();
        FineMixedSubdivision {
            cells,
            edge_partitions,
            triangulation: t.triangulation.clone(),
        }
    }

    fn mixed_cell(&self, c: Cell) -> MixedCell {
        let mut faces = vec![Vec::new(); self.num_summands];
        for p in config::cell_points(c) {
            let (j, pt) = self.labels[p];
            faces[j].push(pt);
        }
        let mut sums = vec![self.offset];
        for f in &faces {
            sums = sums.iter().flat_map(|s| f.iter().map(move |p| add2(*s, *p))).collect();
        }
        let polygon = LatticePolygon::from_vertices(&sums).expect("non-empty");
        MixedCell {
            polygon,
            summand_faces: faces,
        }
    }

    /// Summand index of each unit segment of target edge `e`, counted from
    /// vertex `e` in counterclockwise direction.
    fn edge_partition(&self, cells: &[MixedCell], e: usize) -> Vec<usize> {
        let (v, _) = self.target.edge(e);
        let d = self.target.edge_direction(e);
        let eta = self.target.outer_normal(e);
        let len = self.target.edge_length(e) as usize;
        let dot = |p: Point2| dot3([p[0], p[1], 0], [eta[0], eta[1], 0]);
        let level = dot(v);
        let mut parts = vec![usize::MAX; len];
        for cell in cells {
            let mut base = self.offset;
            let mut wide: Option<(usize, Point2, Point2)> = None;
            for (j, f) in cell.summand_faces.iter().enumerate() {
                let m = f.iter().map(|&p| dot(p)).max().expect("non-empty face");
                let top: Vec<Point2> = f.iter().copied().filter(|&p| dot(p) == m).collect();
                base = add2(base, top[0]);
                if top.len() == 2 {
                    wide = Some((j, top[0], top[1]));
                }
            }
            if dot(base) != level {
                continue;
            }
            let Some((j, a, b)) = wide else {
                continue;
            };
            // Segment endpoints are base and base + (b - a).
            let other = add2(base, [b[0] - a[0], b[1] - a[1]]);
            let pos = |p: Point2| {
                let w = [p[0] - v[0], p[1] - v[1]];
                if d[0] != 0 {
                    w[0] / d[0]
                } else {
                    w[1] / d[1]
                }
            };
            let s = pos(base).min(pos(other)) as usize;
            debug_assert_eq!(parts[s], usize::MAX);
            parts[s] = j;
        }
        debug_assert!(parts.iter().all(|&j| j != usize::MAX));
        parts
    }
}

/// A cell `C = offset + Σ_j conv(C_j)` of a fine mixed subdivision.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MixedCell {
    pub polygon: LatticePolygon,
    /// Lattice points of each summand face, in placed summand coordinates.
    pub summand_faces: Vec<Vec<Point2>>,
}

impl MixedCell {
    /// The unique summand contributing a triangle, if any.
    pub fn triangle_summand(&self) -> Option<usize> {
        self.summand_faces.iter().position(|f| f.len() == 3)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FineMixedSubdivision {
    pub cells: Vec<MixedCell>,
    /// Per target edge, the summand of each unit segment.
    pub edge_partitions: Vec<Vec<usize>>,
    pub triangulation: Triangulation,
}

/// The polyhedral subdivision of the target polygon with all its faces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedSubdivision {
    pub cells: Vec<LatticePolygon>,
    pub edges: BTreeSet<(Point2, Point2)>,
    pub vertices: BTreeSet<Point2>,
}

impl FineMixedSubdivision {
    pub fn induced_subdivision(&self) -> InducedSubdivision {
        let mut cells: Vec<LatticePolygon> = self.cells.iter().map(|c| c.polygon.clone()).collect();
        cells.sort();
        let mut edges = BTreeSet::new();
        let mut vertices = BTreeSet::new();
        for c in &cells {
            for i in 0..c.num_edges() {
                let (a, b) = c.edge(i);
                edges.insert((a.min(b), a.max(b)));
            }
            vertices.extend(c.vertices().iter().copied());
        }
        InducedSubdivision { cells, edges, vertices }
    }

    /// Cell polygons only, sorted; equal for subdivisions differing by a
    /// relabeling of summands.
    pub fn cell_key(&self) -> Vec<LatticePolygon> {
        self.induced_subdivision().cells
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct CellJson<'a> {
            points: &'a [Point2],
            summand_faces: &'a [Vec<Point2>],
        }
        #[derive(Serialize)]
        struct Json<'a> {
            cells: Vec<CellJson<'a>>,
            edge_partitions: BTreeMap<String, &'a [usize]>,
        }
        let j = Json {
            cells: self
                .cells
                .iter()
                .map(|c| CellJson {
                    points: c.polygon.vertices(),
                    summand_faces: &c.summand_faces,
                })
                .collect(),
            edge_partitions: self
                .edge_partitions
                .iter()
                .enumerate()
                .map(|(e, p)| (e.to_string(), p.as_slice()))
                .collect(),
        };
        serde_json::to_value(j).expect("serializable")
    }
}

/// Every coherent fine mixed subdivision subordinate to `d`, one per fine
/// regular triangulation of its Cayley configuration, in canonical order.
pub fn enumerate_fine_coherent_subdivisions(
    d: &AdmissibleDecomposition,
    seed: u64,
) -> Result<Vec<FineMixedSubdivision>, CayleyError> {
    let c = CayleyConfiguration::new(d)?;
    let ts = flips::enumerate_fine_regular(c.config(), seed)?;
    Ok(ts.iter().map(|t| c.mixed_subdivision(t)).collect())
}
