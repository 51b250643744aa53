//! Riemannian subgradient methods with certified complexity bounds.
//!
//! This crate implements a small toolkit for minimizing nonsmooth geodesically
//! convex functions on two concrete manifolds:
//!
//! * the unit sphere `S^{n-1}` embedded in `R^n`, and
//! * the cone `SPD(n)` of symmetric positive-definite matrices with the
//!   affine-invariant metric.
//!
//! On top of the exact exponential/logarithm maps ([`geometry`]) it provides
//! distance-based subgradient oracles ([`convex`]), the normalized Riemannian
//! subgradient iteration with exogenous and Polyak step sizes ([`solver`]),
//! curvature-dependent complexity constants together with per-iteration
//! certification of the bounds they enter ([`bounds`]), and seeded generators
//! for ball-intersection feasibility experiments ([`feasibility`]).
//!
//! Everything is deterministic: randomness only enters through a 64-bit seed
//! fed to a portable ChaCha8 generator, so traces and instances reproduce
//! bit-for-bit across platforms.

pub use nalgebra;

pub mod bounds;
pub mod convex;
pub mod error;
pub mod feasibility;
pub mod geometry;
pub mod solver;
pub mod tolerances;

pub use bounds::{BoundReport, BoundRow, CurvatureConstants, RuleKind, TheoremId};
pub use convex::{DistanceOracle, FeasibilityOracle, OracleEvaluation, SubgradientOracle};
pub use error::{Error, Result};
pub use feasibility::FeasibilityInstance;
pub use geometry::{ManifoldHandle, ManifoldKind, Point, Tangent};
pub use solver::{IterateRecord, IterateTrace, SolverConfig, StepSizeRule, StopMode, Termination};
