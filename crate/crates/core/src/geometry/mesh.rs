use std::f64::consts::PI;

use super::{dist, SetDescriptor, SetKind};
use crate::error::{Error, Result};

/// Default upper limit on the number of mesh nodes.
pub const DEFAULT_NODE_CAP: usize = 2_000_000;

/// Parameter-space domain of a cell.
#[derive(Clone, Debug)]
pub(crate) enum CellDomain {
    /// Parameter interval of a one-dimensional set.
    Param { t0: f64, t1: f64 },
    /// Axis-aligned block, intersected with the set.
    Block { lo: Vec<f64>, hi: Vec<f64> },
    /// Patch of the cube face `x[axis] = ±1`, radially projected onto a sphere.
    Face { axis: usize, lo: Vec<f64>, hi: Vec<f64> },
}

/// A piece of the set together with a node on the set and a radius `h`
/// such that every point of the piece lies within `h` of the node.
#[derive(Clone, Debug)]
pub struct Cell {
    node: Vec<f64>,
    radius: f64,
    pub(crate) domain: CellDomain,
}

impl Cell {
    pub fn node(&self) -> &[f64] {
        &self.node
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// A finite node set covering the set within `covering_radius`.
#[derive(Clone, Debug)]
pub struct Mesh {
    cells: Vec<Cell>,
    covering_radius: f64,
    resolution: f64,
}

impl Mesh {
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[f64]> {
        self.cells.iter().map(|c| c.node())
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn covering_radius(&self) -> f64 {
        self.covering_radius
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    /// Distance from `x` to the nearest node.
    pub fn distance_to_nodes(&self, x: &[f64]) -> f64 {
        self.nodes().map(|n| dist(n, x)).fold(f64::INFINITY, f64::min)
    }
}

fn half_diagonal(lo: &[f64], hi: &[f64]) -> f64 {
    0.5 * dist(lo, hi)
}

impl SetDescriptor {
    pub(crate) fn make_cell(&self, domain: CellDomain) -> Option<Cell> {
        let (node, radius) = match (&self.kind, &domain) {
            (SetKind::Interval { .. }, CellDomain::Param { t0, t1 }) => (vec![0.5 * (t0 + t1)], 0.5 * (t1 - t0)),
            (SetKind::Circle { center, radius } | SetKind::Arc { center, radius, .. }, CellDomain::Param { t0, t1 }) => {
                let m = 0.5 * (t0 + t1);
                (
                    vec![center[0] + radius * m.cos(), center[1] + radius * m.sin()],
                    2.0 * radius * ((t1 - t0) / 4.0).sin(),
                )
            }
            (SetKind::Curve(c), CellDomain::Param { t0, t1 }) => {
                let m = 0.5 * (t0 + t1);
                let h = c.arclength(*t0, m).max(c.arclength(m, *t1));
                (c.point(m), h * (1.0 + 1e-9))
            }
            (SetKind::Cube { .. } | SetKind::Box { .. }, CellDomain::Block { lo, hi }) => {
                (lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect(), half_diagonal(lo, hi))
            }
            (SetKind::Ball { center, radius, .. }, CellDomain::Block { lo, hi }) => {
                let nearest: Vec<f64> = center.iter().zip(lo.iter().zip(hi)).map(|(c, (a, b))| c.clamp(*a, *b)).collect();
                if dist(&nearest, center) > *radius {
                    return None;
                }
                let mid: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
                let node = self.project(&mid);
                let h = dist(&node, &mid) + half_diagonal(lo, hi);
                (node, h)
            }
            (SetKind::Sphere { center, radius, .. }, CellDomain::Face { lo, hi, .. }) => {
                // u ↦ u/|u| is 1-Lipschitz outside the unit ball.
                let mid: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
                let n = mid.iter().map(|v| v * v).sum::<f64>().sqrt();
                let node = center.iter().zip(&mid).map(|(c, m)| c + radius * m / n).collect();
                (node, radius * half_diagonal(lo, hi))
            }
            _ => unreachable!("cell domain does not match set kind"),
        };
        Some(Cell { node, radius, domain })
    }

    /// The coarse cells every mesh starts from.
    pub fn root_cells(&self) -> Vec<Cell> {
        let param = |t0: f64, t1: f64, pieces: usize| -> Vec<CellDomain> {
            (0..pieces)
                .map(|k| CellDomain::Param {
                    t0: t0 + (t1 - t0) * k as f64 / pieces as f64,
                    t1: if k + 1 == pieces { t1 } else { t0 + (t1 - t0) * (k + 1) as f64 / pieces as f64 },
                })
                .collect()
        };
        let domains = match &self.kind {
            SetKind::Interval { a, b } => param(*a, *b, 1),
            SetKind::Circle { .. } => param(0.0, 2.0 * PI, 4),
            SetKind::Arc { start, end, .. } => param(*start, *end, ((end - start) / (PI / 2.0)).ceil().max(1.0) as usize),
            SetKind::Curve(_) => param(0.0, 1.0, 4),
            SetKind::Cube { dim } => vec![CellDomain::Block {
                lo: vec![0.0; *dim],
                hi: vec![1.0; *dim],
            }],
            SetKind::Box { lo, hi } => vec![CellDomain::Block {
                lo: lo.clone(),
                hi: hi.clone(),
            }],
            SetKind::Ball { center, radius, .. } => vec![CellDomain::Block {
                lo: center.iter().map(|c| c - radius).collect(),
                hi: center.iter().map(|c| c + radius).collect(),
            }],
            SetKind::Sphere { dim, .. } => {
                let mut faces = Vec::with_capacity(2 * dim);
                for axis in 0..*dim {
                    for sign in [-1.0, 1.0] {
                        let mut lo = vec![-1.0; *dim];
                        let mut hi = vec![1.0; *dim];
                        lo[axis] = sign;
                        hi[axis] = sign;
                        faces.push(CellDomain::Face { axis, lo, hi });
                    }
                }
                faces
            }
        };
        domains.into_iter().filter_map(|d| self.make_cell(d)).collect()
    }

    /// Bisects a cell along its widest parameter direction. Children that
    /// miss the set are dropped.
    pub fn split_cell(&self, cell: &Cell) -> Vec<Cell> {
        let halves: [CellDomain; 2] = match &cell.domain {
            CellDomain::Param { t0, t1 } => {
                let m = 0.5 * (t0 + t1);
                [CellDomain::Param { t0: *t0, t1: m }, CellDomain::Param { t0: m, t1: *t1 }]
            }
            CellDomain::Block { lo, hi } => {
                let (a, b) = split_box(lo, hi, None);
                [CellDomain::Block { lo: a.0, hi: a.1 }, CellDomain::Block { lo: b.0, hi: b.1 }]
            }
            CellDomain::Face { axis, lo, hi } => {
                let (a, b) = split_box(lo, hi, Some(*axis));
                [
                    CellDomain::Face {
                        axis: *axis,
                        lo: a.0,
                        hi: a.1,
                    },
                    CellDomain::Face {
                        axis: *axis,
                        lo: b.0,
                        hi: b.1,
                    },
                ]
            }
        };
        halves.into_iter().filter_map(|d| self.make_cell(d)).collect()
    }

    /// Mesh whose nodes are spaced at most `resolution` apart, so that every
    /// point of the set is within `resolution / 2` of a node.
    pub fn mesh(&self, resolution: f64) -> Result<Mesh> {
        self.mesh_with_cap(resolution, DEFAULT_NODE_CAP)
    }

    pub fn mesh_with_cap(&self, resolution: f64, cap: usize) -> Result<Mesh> {
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(Error::InvalidArgument(format!("mesh resolution must be positive, got {resolution}")));
        }
        let target = 0.5 * resolution;
        let mut cells = self.root_cells();
        loop {
            if cells.iter().all(|c| c.radius <= target) {
                break;
            }
            let mut next = Vec::with_capacity(2 * cells.len());
            for c in &cells {
                if c.radius <= target {
                    next.push(c.clone());
                } else {
                    next.extend(self.split_cell(c));
                }
                if next.len() > cap {
                    return Err(Error::ResourceLimit(format!(
                        "mesh at resolution {resolution} needs more than {cap} nodes"
                    )));
                }
            }
            cells = next;
        }
        let covering_radius = cells.iter().map(|c| c.radius).fold(0.0, f64::max);
        Ok(Mesh {
            cells,
            covering_radius,
            resolution,
        })
    }
}

type Corners = (Vec<f64>, Vec<f64>);

fn split_box(lo: &[f64], hi: &[f64], frozen: Option<usize>) -> (Corners, Corners) {
    let mut axis = 0;
    let mut width = -1.0;
    for i in 0..lo.len() {
        if Some(i) != frozen && hi[i] - lo[i] > width {
            width = hi[i] - lo[i];
            axis = i;
        }
    }
    let m = 0.5 * (lo[axis] + hi[axis]);
    let mut hi_a = hi.to_vec();
    hi_a[axis] = m;
    let mut lo_b = lo.to_vec();
    lo_b[axis] = m;
    ((lo.to_vec(), hi_a), (lo_b, hi.to_vec()))
}
