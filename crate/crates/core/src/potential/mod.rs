//! Potentials of point configurations and certified brackets on their
//! polarization `P(B; ω) = inf_{y ∈ B} U(y; ω)`.

mod field;
pub(crate) mod search;
mod tree;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Mesh, SetDescriptor};
use crate::kernel::KernelSpec;
use field::PotentialField;
pub(crate) use search::{CellValue, SearchOptions};

/// An ordered multiset of `N ≥ 1` points of `ℝ^p`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Configuration {
    dim: usize,
    coords: Vec<f64>,
}

impl Configuration {
    /// Builds a configuration, checking every point against `set` within
    /// `1e-9 · diam(set)`.
    pub fn new(set: &SetDescriptor, points: &[Vec<f64>]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("a configuration needs at least one point".into()));
        }
        let dim = set.ambient_dim();
        let tol = set.membership_tolerance();
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidArgument(format!(
                    "point {i} has dimension {}, expected {dim}",
                    p.len()
                )));
            }
            if !set.contains(p, tol) {
                return Err(Error::InvalidArgument(format!("point {i} = {p:?} is not on the {}", set.kind_name())));
            }
            coords.extend_from_slice(p);
        }
        Ok(Self { dim, coords })
    }

    /// Builds a configuration from points that are projected onto `set`.
    pub fn projected(set: &SetDescriptor, points: &[Vec<f64>]) -> Result<Self> {
        let pts: Vec<Vec<f64>> = points.iter().map(|p| set.project(p)).collect();
        Self::new(set, &pts)
    }

    pub(crate) fn from_flat(dim: usize, coords: Vec<f64>) -> Self {
        debug_assert!(dim > 0 && coords.len().is_multiple_of(dim) && !coords.is_empty());
        Self { dim, coords }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn to_vecs(&self) -> Vec<Vec<f64>> {
        self.points().map(|p| p.to_vec()).collect()
    }

    /// Multiset union, keeping `self` first.
    pub fn union(&self, other: &Configuration) -> Result<Configuration> {
        if self.dim != other.dim {
            return Err(Error::InvalidArgument("configurations live in different dimensions".into()));
        }
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        Ok(Self::from_flat(self.dim, coords))
    }

    /// The image under `x ↦ α x + shift`.
    pub fn transformed(&self, alpha: f64, shift: &[f64]) -> Configuration {
        let coords = self.coords.iter().enumerate().map(|(i, x)| alpha * x + shift[i % self.dim]).collect();
        Self::from_flat(self.dim, coords)
    }
}

/// `U(y; ω) = Σ_j K(x_j, y)`, with multiplicities. The kernel's clamp applies.
pub fn potential_at(y: &[f64], config: &Configuration, kernel: &KernelSpec) -> f64 {
    config.points().map(|x| kernel.eval(x, y)).sum()
}

/// A certified bracket `lower ≤ P(B; ω) ≤ upper`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolarizationEstimate {
    pub lower: f64,
    /// The potential at `witness`, a point of the region.
    pub upper: f64,
    pub witness: Vec<f64>,
    /// Covering radius of the initial mesh.
    pub covering_radius: f64,
    /// Smallest cell radius reached by refinement.
    pub finest_radius: f64,
    pub budget_exhausted: bool,
    /// Number of cell evaluations.
    pub evaluations: u64,
    pub rounds: usize,
}

impl PolarizationEstimate {
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

/// Controls for the adaptive bracket.
#[derive(Clone, Debug)]
pub struct BracketOptions {
    /// Absolute target for `upper - lower`.
    pub target_gap: f64,
    /// Relative target, applied to `|upper|`; the larger target wins.
    pub rel_gap: f64,
    /// Spacing of the starting mesh; by default the smaller of `diam/8` and
    /// half the typical spacing `(H_d(B)/N)^{1/d}`.
    pub initial_resolution: Option<f64>,
    pub max_rounds: usize,
    /// Cap on cell evaluations.
    pub max_evaluations: u64,
}

impl Default for BracketOptions {
    fn default() -> Self {
        Self {
            target_gap: 0.0,
            rel_gap: 1e-6,
            initial_resolution: None,
            max_rounds: 40,
            max_evaluations: 20_000_000,
        }
    }
}

impl BracketOptions {
    pub fn absolute(target_gap: f64) -> Self {
        Self {
            target_gap,
            rel_gap: 0.0,
            ..Self::default()
        }
    }

    pub fn relative(rel_gap: f64) -> Self {
        Self {
            rel_gap,
            ..Self::default()
        }
    }
}

/// Certified bracket on `P(region; config)` with absolute gap `target_gap`.
pub fn polarization(
    config: &Configuration,
    region: &SetDescriptor,
    kernel: &KernelSpec,
    target_gap: f64,
) -> Result<PolarizationEstimate> {
    if !(target_gap > 0.0) {
        return Err(Error::InvalidArgument(format!("target gap must be positive, got {target_gap}")));
    }
    polarization_with(config, region, kernel, &BracketOptions::absolute(target_gap))
}

fn starting_resolution(config: &Configuration, region: &SetDescriptor, opts: &BracketOptions) -> f64 {
    opts.initial_resolution.unwrap_or_else(|| {
        let d = region.hausdorff_dim() as f64;
        let spacing = (region.hausdorff_measure() / config.len() as f64).powf(1.0 / d);
        (region.diameter() / 8.0).min(0.5 * spacing)
    })
}

/// Certified bracket on `P(region; config)`.
///
/// The kernel clamp is ignored: brackets are always for the unclamped kernel.
pub fn polarization_with(
    config: &Configuration,
    region: &SetDescriptor,
    kernel: &KernelSpec,
    opts: &BracketOptions,
) -> Result<PolarizationEstimate> {
    if config.dim() != region.ambient_dim() {
        return Err(Error::InvalidArgument("configuration and region dimensions differ".into()));
    }
    if !(opts.target_gap > 0.0 || opts.rel_gap > 0.0) {
        return Err(Error::InvalidArgument("either an absolute or a relative gap must be positive".into()));
    }
    let mesh = region.mesh(starting_resolution(config, region, opts))?;
    let roots = mesh.cells().to_vec();

    // A rough scale for the potential sets how much error the tree may use.
    let probe = PotentialField::new(config, kernel, 0.0, 0.0);
    let stride = (roots.len() / 8).max(1);
    let scale = roots
        .iter()
        .step_by(stride)
        .map(|c| probe.exact(c.node()))
        .fold(f64::INFINITY, f64::min)
        .abs();
    let rel = if scale > 0.0 && scale.is_finite() {
        opts.rel_gap.max(opts.target_gap / scale)
    } else {
        opts.rel_gap
    };
    let field = PotentialField::new(config, kernel, 0.25 * rel, scale);

    let search = SearchOptions {
        abs_gap: opts.target_gap,
        rel_gap: opts.rel_gap,
        max_rounds: opts.max_rounds,
        max_evaluations: opts.max_evaluations,
        keep: 8,
    };
    let out = search::minimize(
        region,
        roots,
        |cell| {
            let frame = region.sphere_frame(cell.node());
            let b = field.cell(cell.node(), cell.radius(), frame.as_ref().map(|(n, r)| (n.as_slice(), *r)));
            CellValue {
                upper: b.upper,
                lower: b.lower,
            }
        },
        &search,
    );

    // Rounding slack keeps the reported upper value certified.
    let exact_upper = |y: &[f64]| {
        let (u, slack) = field.exact_with_slack(y);
        u + slack
    };
    let exact: Vec<f64> = out.candidates.par_iter().map(|(_, y)| exact_upper(y)).collect();
    let mut upper = exact_upper(&out.witness);
    let mut witness = out.witness.clone();
    for ((_, y), u) in out.candidates.iter().zip(exact) {
        if u < upper {
            upper = u;
            witness = y.clone();
        }
    }
    Ok(PolarizationEstimate {
        lower: out.lower.min(upper),
        upper,
        witness,
        covering_radius: mesh.covering_radius(),
        finest_radius: out.finest_radius,
        budget_exhausted: out.budget_exhausted,
        evaluations: out.evaluations,
        rounds: out.rounds,
    })
}

/// Bracket over a union of regions: minimum of uppers and of lowers.
pub fn polarization_over_union(
    config: &Configuration,
    regions: &[SetDescriptor],
    kernel: &KernelSpec,
    opts: &BracketOptions,
) -> Result<PolarizationEstimate> {
    let mut best: Option<PolarizationEstimate> = None;
    for region in regions {
        let e = polarization_with(config, region, kernel, opts)?;
        best = Some(match best {
            None => e,
            Some(b) => {
                let (upper, witness) = if e.upper < b.upper { (e.upper, e.witness) } else { (b.upper, b.witness) };
                PolarizationEstimate {
                    lower: b.lower.min(e.lower),
                    upper,
                    witness,
                    covering_radius: b.covering_radius.max(e.covering_radius),
                    finest_radius: b.finest_radius.min(e.finest_radius),
                    budget_exhausted: b.budget_exhausted || e.budget_exhausted,
                    evaluations: b.evaluations + e.evaluations,
                    rounds: b.rounds.max(e.rounds),
                }
            }
        });
    }
    best.ok_or_else(|| Error::InvalidArgument("at least one region is required".into()))
}

/// Fixed-mesh bracket: the upper value is the minimum of `U` over the nodes,
/// the lower value the minimum over cells of `Σ_j w_lo φ(|x_j - node| + h)`.
pub fn mesh_bracket(config: &Configuration, mesh: &Mesh, kernel: &KernelSpec) -> PolarizationEstimate {
    let field = PotentialField::new(config, kernel, 0.0, 0.0);
    let values: Vec<(f64, f64)> = mesh
        .cells()
        .par_iter()
        .map(|c| (field.exact(c.node()), field.first_order_lower(c.node(), c.radius())))
        .collect();
    let mut upper = f64::INFINITY;
    let mut lower = f64::INFINITY;
    let mut witness = mesh.cells()[0].node().to_vec();
    for (c, (u, l)) in mesh.cells().iter().zip(values) {
        if u < upper {
            upper = u;
            witness = c.node().to_vec();
        }
        lower = lower.min(l);
    }
    PolarizationEstimate {
        lower: lower.min(upper),
        upper,
        witness,
        covering_radius: mesh.covering_radius(),
        finest_radius: mesh.covering_radius(),
        budget_exhausted: false,
        evaluations: mesh.len() as u64,
        rounds: 1,
    }
}

/// Minimum of the exact potential over the nodes of a mesh.
pub fn mesh_minimum(config: &Configuration, mesh: &Mesh, kernel: &KernelSpec) -> f64 {
    let field = PotentialField::new(config, kernel, 0.0, 0.0);
    let values: Vec<f64> = mesh.cells().par_iter().map(|c| field.exact(c.node())).collect();
    values.into_iter().fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle_points(n: usize, phase: f64) -> Vec<Vec<f64>> {
        (0..n)
            .map(|k| {
                let t = phase + 2.0 * PI * k as f64 / n as f64;
                vec![t.cos(), t.sin()]
            })
            .collect()
    }

    #[test]
    fn potential_examples() {
        let c = SetDescriptor::circle(1.0).unwrap();
        let k = KernelSpec::riesz(2.0).unwrap();
        let cfg = Configuration::new(&c, &[vec![1.0, 0.0], vec![-1.0, 0.0]]).unwrap();
        assert_eq!(potential_at(&[0.0, 1.0], &cfg, &k), 1.0);
        let one = Configuration::new(&c, &[vec![-1.0, 0.0]]).unwrap();
        assert_eq!(potential_at(&[1.0, 0.0], &one, &k), 0.25);
        assert_eq!(potential_at(&[-1.0, 0.0], &one, &k), f64::INFINITY);
    }

    #[test]
    fn configuration_rejects_foreign_points() {
        let c = SetDescriptor::circle(1.0).unwrap();
        assert!(Configuration::new(&c, &[vec![0.5, 0.0]]).is_err());
        assert!(Configuration::new(&c, &[]).is_err());
        assert!(Configuration::new(&c, &[vec![1.0, 0.0, 0.0]]).is_err());
    }

    #[test]
    fn four_points_on_circle_bracket_four() {
        let c = SetDescriptor::circle(1.0).unwrap();
        let k = KernelSpec::riesz(2.0).unwrap();
        let cfg = Configuration::new(&c, &circle_points(4, 0.0)).unwrap();
        let e = polarization(&cfg, &c, &k, 1e-9).unwrap();
        assert!(e.contains(4.0), "{e:?}");
        assert!(e.gap() <= 1e-9);
    }

    #[test]
    fn single_point_antipode() {
        let c = SetDescriptor::circle(1.0).unwrap();
        for s in [1.0, 2.0, 3.5] {
            let k = KernelSpec::riesz(s).unwrap();
            let cfg = Configuration::new(&c, &[vec![0.0, 1.0]]).unwrap();
            let e = polarization(&cfg, &c, &k, 1e-10).unwrap();
            assert!(e.contains(2f64.powf(-s)), "s={s}: {e:?}");
        }
    }

    #[test]
    fn chebyshev_pair_log_bracket() {
        let i = SetDescriptor::interval(-1.0, 1.0).unwrap();
        let r = 0.5f64.sqrt();
        let cfg = Configuration::new(&i, &[vec![-r], vec![r]]).unwrap();
        let e = polarization(&cfg, &i, &KernelSpec::log(), 1e-10).unwrap();
        assert!(e.contains(2f64.ln()), "{e:?}");
    }

    #[test]
    fn tree_bracket_agrees_with_direct() {
        let c = SetDescriptor::circle(1.0).unwrap();
        let k = KernelSpec::riesz(1.0).unwrap();
        let pts: Vec<Vec<f64>> = c.sample_uniform(300, 5);
        let cfg = Configuration::new(&c, &pts).unwrap();
        let tree = polarization_with(&cfg, &c, &k, &BracketOptions::relative(1e-3)).unwrap();
        let direct = polarization_with(&cfg, &c, &k, &BracketOptions::relative(1e-9)).unwrap();
        assert!(tree.lower <= direct.upper && direct.lower <= tree.upper);
        assert!(tree.gap() <= 1e-3 * tree.upper.abs());
    }

    #[test]
    fn weighted_bracket_contains_mesh_scan() {
        use crate::kernel::{ScalarField, Weight};
        let c = SetDescriptor::circle(1.0).unwrap();
        let w = Weight::separable(ScalarField::axial(2.0, 1.0, 2), ScalarField::axial(3.0, 0.5, 2), 0.2).unwrap();
        let k = KernelSpec::weighted_riesz(3.0, w, &c).unwrap();
        let cfg = Configuration::new(&c, &circle_points(7, 0.3)).unwrap();
        let e = polarization_with(&cfg, &c, &k, &BracketOptions::relative(1e-6)).unwrap();
        let scan = mesh_minimum(&cfg, &c.mesh(1e-4).unwrap(), &k);
        assert!(e.lower <= scan && scan <= e.upper * (1.0 + 1e-6) + 1e-12, "{e:?} vs {scan}");
    }

    #[test]
    fn union_of_quadrants_contains_four() {
        let c = SetDescriptor::circle(1.0).unwrap();
        let k = KernelSpec::riesz(2.0).unwrap();
        let cfg = Configuration::new(&c, &circle_points(4, PI / 4.0)).unwrap();
        let arcs: Vec<SetDescriptor> = (0..4)
            .map(|q| SetDescriptor::arc([0.0, 0.0], 1.0, q as f64 * PI / 2.0, (q + 1) as f64 * PI / 2.0).unwrap())
            .collect();
        let e = polarization_over_union(&cfg, &arcs, &k, &BracketOptions::absolute(1e-9)).unwrap();
        assert!(e.contains(4.0), "{e:?}");
    }
}
