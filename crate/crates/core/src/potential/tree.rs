//! Bounding-sphere kd-tree over weighted sources, used to bound far-field
//! contributions to the potential with a certified remainder.

const LEAF_SIZE: usize = 8;

#[derive(Clone, Debug)]
pub(crate) struct TreeNode {
    pub start: usize,
    pub end: usize,
    /// Strength-weighted centroid, offset into `SourceTree::centroids`.
    pub strength: f64,
    /// `Σ a_j |x_j - c|²`.
    pub second_moment: f64,
    /// `Σ a_j |x_j - c|³`.
    pub third_moment: f64,
    /// Bound on `|Σ a_j (x_j - c)|`, which vanishes up to rounding.
    pub dipole: f64,
    /// `max |x_j - c|`.
    pub radius: f64,
    pub children: Option<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub(crate) struct SourceTree {
    pub dim: usize,
    /// Source coordinates in tree order.
    pub coords: Vec<f64>,
    pub strengths: Vec<f64>,
    pub centroids: Vec<f64>,
    /// `Σ a_j (x_j - c)(x_j - c)ᵀ`, row-major `dim × dim` per node.
    pub quadrupoles: Vec<f64>,
    pub nodes: Vec<TreeNode>,
}

impl SourceTree {
    pub fn build(dim: usize, coords: &[f64], strengths: &[f64]) -> Self {
        let n = strengths.len();
        let mut order: Vec<usize> = (0..n).collect();
        let mut tree = SourceTree {
            dim,
            coords: Vec::with_capacity(coords.len()),
            strengths: Vec::with_capacity(n),
            centroids: Vec::new(),
            quadrupoles: Vec::new(),
            nodes: Vec::new(),
        };
        tree.build_node(&mut order, 0, coords, strengths);
        for &i in &order {
            tree.coords.extend_from_slice(&coords[i * dim..(i + 1) * dim]);
            tree.strengths.push(strengths[i]);
        }
        tree
    }

    fn build_node(&mut self, order: &mut [usize], offset: usize, coords: &[f64], strengths: &[f64]) -> usize {
        let dim = self.dim;
        let at = |i: usize, k: usize| coords[i * dim + k];
        let total: f64 = order.iter().map(|&i| strengths[i]).sum();
        let mut c = vec![0.0; dim];
        for &i in order.iter() {
            for (k, ck) in c.iter_mut().enumerate() {
                *ck += strengths[i] * at(i, k);
            }
        }
        if total > 0.0 {
            c.iter_mut().for_each(|v| *v /= total);
        } else {
            for &i in order.iter() {
                for (k, ck) in c.iter_mut().enumerate() {
                    *ck += at(i, k) / order.len() as f64;
                }
            }
        }
        let mut radius: f64 = 0.0;
        let mut m2 = 0.0;
        let mut m3 = 0.0;
        let mut quad = vec![0.0; dim * dim];
        let mut dip = vec![0.0; dim];
        for &i in order.iter() {
            for (k, dk) in dip.iter_mut().enumerate() {
                *dk += strengths[i] * (at(i, k) - c[k]);
            }
            let r2: f64 = (0..dim).map(|k| (at(i, k) - c[k]).powi(2)).sum();
            radius = radius.max(r2.sqrt());
            m2 += strengths[i] * r2;
            m3 += strengths[i] * r2 * r2.sqrt();
            for a in 0..dim {
                for b in 0..dim {
                    quad[a * dim + b] += strengths[i] * (at(i, a) - c[a]) * (at(i, b) - c[b]);
                }
            }
        }
        radius *= 1.0 + 1e-12;
        let dipole = dip.iter().map(|v| v * v).sum::<f64>().sqrt() + 4.0 * f64::EPSILON * total * (radius + c.iter().map(|v| v.abs()).sum::<f64>());
        let id = self.nodes.len();
        self.centroids.extend_from_slice(&c);
        self.quadrupoles.extend_from_slice(&quad);
        self.nodes.push(TreeNode {
            start: offset,
            end: offset + order.len(),
            strength: total,
            second_moment: m2,
            third_moment: m3,
            dipole,
            radius,
            children: None,
        });
        if order.len() > LEAF_SIZE && radius > 0.0 {
            let mut axis = 0;
            let mut widest = -1.0;
            for k in 0..dim {
                let (lo, hi) = order
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| (lo.min(at(i, k)), hi.max(at(i, k))));
                if hi - lo > widest {
                    widest = hi - lo;
                    axis = k;
                }
            }
            let mid = order.len() / 2;
            order.select_nth_unstable_by(mid, |&a, &b| at(a, axis).total_cmp(&at(b, axis)).then(a.cmp(&b)));
            let (left, right) = order.split_at_mut(mid);
            let l = self.build_node(left, offset, coords, strengths);
            let r = self.build_node(right, offset + mid, coords, strengths);
            self.nodes[id].children = Some((l, r));
        }
        id
    }

    pub fn centroid(&self, node: usize) -> &[f64] {
        &self.centroids[node * self.dim..(node + 1) * self.dim]
    }

    pub fn quadrupole(&self, node: usize) -> &[f64] {
        &self.quadrupoles[node * self.dim * self.dim..(node + 1) * self.dim * self.dim]
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }
}
