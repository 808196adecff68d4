//! Deterministic starting configurations, node sets and the cube tiling.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{SetDescriptor, SetKind};
use crate::potential::Configuration;

/// How a starting configuration is laid out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedStyle {
    /// Equal angles on a circle, or midpoints of `N` equal-length pieces of
    /// an interval, arc or curve.
    EquallySpaced,
    /// Centres of the `n^p = N` equal subcubes of a cube or box.
    TensorLattice,
    /// The Fibonacci spiral on a 2-sphere.
    FibonacciSphere,
    /// One uniform point per stratum where strata are available, otherwise
    /// independent uniform points.
    JitteredUniform(u64),
}

/// The structured style that suits `set`, falling back to jittered points.
pub fn default_style(set: &SetDescriptor, n: usize, seed: u64) -> SeedStyle {
    match set.kind() {
        SetKind::Interval { .. } | SetKind::Circle { .. } | SetKind::Arc { .. } | SetKind::Curve(_) => {
            SeedStyle::EquallySpaced
        }
        SetKind::Sphere { center, .. } if center.len() == 3 => SeedStyle::FibonacciSphere,
        SetKind::Cube { dim } if lattice_side(n, *dim).is_some() => SeedStyle::TensorLattice,
        SetKind::Box { lo, .. } if lattice_side(n, lo.len()).is_some() => SeedStyle::TensorLattice,
        _ => SeedStyle::JitteredUniform(seed),
    }
}

fn lattice_side(n: usize, p: usize) -> Option<usize> {
    let side = (n as f64).powf(1.0 / p as f64).round() as usize;
    (side.checked_pow(p as u32) == Some(n)).then_some(side)
}

fn box_bounds(set: &SetDescriptor) -> Option<(Vec<f64>, Vec<f64>)> {
    match set.kind() {
        SetKind::Cube { dim } => Some((vec![0.0; *dim], vec![1.0; *dim])),
        SetKind::Box { lo, hi } => Some((lo.clone(), hi.clone())),
        SetKind::Interval { a, b } => Some((vec![*a], vec![*b])),
        _ => None,
    }
}

/// Multi-indices of `{0..side-1}^p` with the first coordinate varying slowest.
fn multi_indices(side: usize, p: usize) -> Vec<Vec<usize>> {
    let total = side.pow(p as u32);
    (0..total)
        .map(|mut k| {
            let mut idx = vec![0; p];
            for slot in idx.iter_mut().rev() {
                *slot = k % side;
                k /= side;
            }
            idx
        })
        .collect()
}

pub fn seed_configuration(set: &SetDescriptor, n: usize, style: SeedStyle) -> Result<Configuration> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let incompatible = || {
        Error::InvalidArgument(format!("seed style {style:?} does not apply to a {}", set.kind_name()))
    };
    let points: Vec<Vec<f64>> = match style {
        SeedStyle::EquallySpaced => match set.kind() {
            SetKind::Circle { center, radius } => (0..n)
                .map(|k| {
                    let t = 2.0 * PI * k as f64 / n as f64;
                    vec![center[0] + radius * t.cos(), center[1] + radius * t.sin()]
                })
                .collect(),
            SetKind::Interval { .. } | SetKind::Arc { .. } | SetKind::Curve(_) => (0..n)
                .map(|k| set.point_at_fraction((k as f64 + 0.5) / n as f64).expect("one-dimensional set"))
                .collect(),
            _ => return Err(incompatible()),
        },
        SeedStyle::TensorLattice => {
            let (lo, hi) = box_bounds(set).ok_or_else(incompatible)?;
            let p = lo.len();
            let side = lattice_side(n, p)
                .ok_or_else(|| Error::InvalidArgument(format!("N = {n} is not a perfect {p}-th power")))?;
            multi_indices(side, p)
                .into_iter()
                .map(|idx| {
                    idx.iter()
                        .enumerate()
                        .map(|(k, &i)| lo[k] + (i as f64 + 0.5) * (hi[k] - lo[k]) / side as f64)
                        .collect()
                })
                .collect()
        }
        SeedStyle::FibonacciSphere => match set.kind() {
            SetKind::Sphere { center, radius, .. } if center.len() == 3 => {
                let golden = PI * (3.0 - 5f64.sqrt());
                (0..n)
                    .map(|k| {
                        let z = 1.0 - (2 * k + 1) as f64 / n as f64;
                        let rho = (1.0 - z * z).max(0.0).sqrt();
                        let t = golden * k as f64;
                        vec![
                            center[0] + radius * rho * t.cos(),
                            center[1] + radius * rho * t.sin(),
                            center[2] + radius * z,
                        ]
                    })
                    .collect()
            }
            _ => return Err(incompatible()),
        },
        SeedStyle::JitteredUniform(seed) => jittered(set, n, seed),
    };
    Configuration::projected(set, &points)
}

fn jittered(set: &SetDescriptor, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match set.kind() {
        SetKind::Interval { .. } | SetKind::Circle { .. } | SetKind::Arc { .. } | SetKind::Curve(_) => (0..n)
            .map(|k| {
                let f = (k as f64 + rng.random::<f64>()) / n as f64;
                set.point_at_fraction(f).expect("one-dimensional set")
            })
            .collect(),
        SetKind::Cube { .. } | SetKind::Box { .. } if lattice_side(n, set.ambient_dim()).is_some() => {
            let (lo, hi) = box_bounds(set).expect("box-like set");
            let p = lo.len();
            let side = lattice_side(n, p).expect("checked above");
            multi_indices(side, p)
                .into_iter()
                .map(|idx| {
                    idx.iter()
                        .enumerate()
                        .map(|(k, &i)| lo[k] + (i as f64 + rng.random::<f64>()) * (hi[k] - lo[k]) / side as f64)
                        .collect()
                })
                .collect()
        }
        _ => set.sample_uniform(n, seed),
    }
}

/// `⋃_{j ∈ {0..m-1}^p} (ω + j)/m` for a configuration on the unit cube.
pub fn tile_configuration(config: &Configuration, set: &SetDescriptor, m: usize) -> Result<Configuration> {
    let SetKind::Cube { dim } = set.kind() else {
        return Err(Error::InvalidArgument(format!("tiling needs the unit cube, got a {}", set.kind_name())));
    };
    if m < 2 {
        return Err(Error::InvalidArgument(format!("tiling factor must be at least 2, got {m}")));
    }
    if config.dim() != *dim {
        return Err(Error::InvalidArgument("configuration dimension does not match the cube".into()));
    }
    let mut points = Vec::with_capacity(m.pow(*dim as u32) * config.len());
    for j in multi_indices(m, *dim) {
        for x in config.points() {
            points.push(x.iter().zip(&j).map(|(v, &jk)| (v + jk as f64) / m as f64).collect());
        }
    }
    Configuration::new(set, &points)
}

/// `m` nodes of a one-dimensional set: angles `2πk/m` on a circle, and
/// equally spaced arclength fractions including both ends otherwise.
pub fn discretize(set: &SetDescriptor, m: usize) -> Result<Vec<Vec<f64>>> {
    Ok(discretize_with_params(set, m)?.into_iter().map(|(_, x)| x).collect())
}

/// As [`discretize`], with the parameter of each node.
pub(crate) fn discretize_with_params(set: &SetDescriptor, m: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    let periodic = matches!(set.kind(), SetKind::Circle { .. });
    if m < 1 || (!periodic && m < 2) {
        return Err(Error::InvalidArgument(format!("cannot discretize into {m} nodes")));
    }
    match set.kind() {
        SetKind::Circle { .. } => Ok((0..m)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / m as f64;
                (t, set.point_at_param(t).expect("circle"))
            })
            .collect()),
        SetKind::Interval { .. } | SetKind::Arc { .. } => {
            let (t0, t1) = set.param_range().expect("one-dimensional set");
            Ok((0..m)
                .map(|k| {
                    let t = if k + 1 == m { t1 } else { t0 + (t1 - t0) * k as f64 / (m - 1) as f64 };
                    (t, set.point_at_param(t).expect("one-dimensional set"))
                })
                .collect())
        }
        SetKind::Curve(c) => {
            let total = set.hausdorff_measure();
            Ok((0..m)
                .map(|k| {
                    let t = c.param_at_length(total * k as f64 / (m - 1) as f64, total);
                    (t, c.point(t))
                })
                .collect())
        }
        _ => Err(Error::Unsupported(format!(
            "node discretization is defined for one-dimensional sets, not a {}",
            set.kind_name()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_seed_examples() {
        let circle = SetDescriptor::circle(1.0).unwrap();
        let c = seed_configuration(&circle, 3, SeedStyle::EquallySpaced).unwrap();
        for (k, x) in c.points().enumerate() {
            let t = 2.0 * PI * k as f64 / 3.0;
            assert!((x[0] - t.cos()).abs() < 1e-15 && (x[1] - t.sin()).abs() < 1e-15);
        }
        let cube = SetDescriptor::cube(2).unwrap();
        let c = seed_configuration(&cube, 9, SeedStyle::TensorLattice).unwrap();
        assert_eq!(c.point(0), &[1.0 / 6.0, 1.0 / 6.0]);
        assert_eq!(c.point(1), &[1.0 / 6.0, 0.5]);
        assert_eq!(c.point(8), &[5.0 / 6.0, 5.0 / 6.0]);
        let sphere = SetDescriptor::sphere(3).unwrap();
        let c = seed_configuration(&sphere, 100, SeedStyle::FibonacciSphere).unwrap();
        assert_eq!(c.len(), 100);
        for x in c.points() {
            assert!((x.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert!(seed_configuration(&cube, 8, SeedStyle::TensorLattice).is_err());
        assert!(seed_configuration(&cube, 4, SeedStyle::FibonacciSphere).is_err());
        assert!(seed_configuration(&circle, 0, SeedStyle::EquallySpaced).is_err());
    }

    #[test]
    fn jittered_seeds_are_deterministic_and_stratified() {
        let set = SetDescriptor::interval(0.0, 1.0).unwrap();
        let a = seed_configuration(&set, 10, SeedStyle::JitteredUniform(4)).unwrap();
        let b = seed_configuration(&set, 10, SeedStyle::JitteredUniform(4)).unwrap();
        assert_eq!(a, b);
        for (k, x) in a.points().enumerate() {
            assert!(x[0] >= k as f64 / 10.0 && x[0] <= (k + 1) as f64 / 10.0);
        }
        let ball = SetDescriptor::ball(3).unwrap();
        assert_eq!(seed_configuration(&ball, 7, SeedStyle::JitteredUniform(1)).unwrap().len(), 7);
    }

    #[test]
    fn tiling_examples() {
        let q1 = SetDescriptor::cube(1).unwrap();
        let w = Configuration::new(&q1, &[vec![0.5]]).unwrap();
        assert_eq!(tile_configuration(&w, &q1, 2).unwrap().to_vecs(), vec![vec![0.25], vec![0.75]]);
        let q2 = SetDescriptor::cube(2).unwrap();
        let w = Configuration::new(&q2, &[vec![0.5, 0.5]]).unwrap();
        assert_eq!(
            tile_configuration(&w, &q2, 2).unwrap().to_vecs(),
            vec![vec![0.25, 0.25], vec![0.25, 0.75], vec![0.75, 0.25], vec![0.75, 0.75]]
        );
        assert!(tile_configuration(&w, &q2, 1).is_err());
        let circle = SetDescriptor::circle(1.0).unwrap();
        let c = seed_configuration(&circle, 2, SeedStyle::EquallySpaced).unwrap();
        assert!(tile_configuration(&c, &circle, 2).is_err());
    }

    #[test]
    fn discretization_includes_ends() {
        let set = SetDescriptor::interval(-1.0, 1.0).unwrap();
        let nodes = discretize(&set, 201).unwrap();
        assert_eq!(nodes[0], vec![-1.0]);
        assert_eq!(nodes[100], vec![0.0]);
        assert_eq!(nodes[200], vec![1.0]);
        let circle = SetDescriptor::circle(1.0).unwrap();
        assert_eq!(discretize(&circle, 360).unwrap().len(), 360);
        assert!(discretize(&SetDescriptor::cube(2).unwrap(), 10).is_err());
    }
}
