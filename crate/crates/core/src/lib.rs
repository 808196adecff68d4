//! Discrete weighted Riesz polarization (Chebyshev) constants on compact sets.

pub mod asymptotics;
pub mod distribution;
pub mod energy;
pub mod error;
pub mod extremal;
pub mod geometry;
pub mod kernel;
pub mod potential;
pub mod quadrature;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{Mesh, ParametricCurve, SetDescriptor};
pub use kernel::{KernelSpec, Profile, ScalarField, Weight, WeightForm};
pub use potential::{
    mesh_bracket, mesh_minimum, polarization, polarization_over_union, polarization_with, potential_at, BracketOptions,
    Configuration, PolarizationEstimate,
};
pub use solver::{brute_force_small, optimize, seed_configuration, tile_configuration, Method, SeedStyle, SolveOptions, SolveResult};
