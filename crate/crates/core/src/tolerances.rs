//! Central registry of the numerical tolerances used across the crate.
//!
//! Every constant is an absolute quantity in the natural units of the check
//! it guards. Keeping them in one place makes the accuracy contract of the
//! library auditable at a glance.

/// Membership tests: unit-norm defect on the sphere, symmetry defect and
/// tangency defect on either manifold. Points and tangents further than this
/// from their constraint set are rejected.
pub const POINT_TOLERANCE: f64 = 1e-10;

/// Hard floor for eigenvalues entering a matrix logarithm or square root.
/// A breach is a domain error, never silently clamped: clamping would move
/// the input to a different matrix and corrupt distances downstream.
pub const EIGENVALUE_FLOOR: f64 = 1e-12;

/// Accuracy demanded of the exp/log round trip `exp(p, log(p, q)) = q` and of
/// the norm identity `|log(p, q)| = d(p, q)`.
pub const ROUND_TRIP_TOLERANCE: f64 = 1e-9;

/// Subgradient validity: the convexity margin
/// `f(q) - f(p) - <s, log(p, q)>` may dip below zero by at most this much
/// before an oracle output is declared invalid.
pub const SUBGRADIENT_MARGIN_TOLERANCE: f64 = 1e-8;

/// Certification slack: a per-iteration bound counts as satisfied when
/// `rhs - lhs >= -CERTIFICATION_TOLERANCE`.
pub const CERTIFICATION_TOLERANCE: f64 = 1e-7;

/// Curvature magnitudes below this switch the curvature-dependent constants
/// to their analytic flat limits instead of evaluating 0/0 expressions.
pub const FLAT_KAPPA: f64 = 1e-12;

/// Sphere logarithm domain guard: inner products below `-1 + ANTIPODE_GUARD`
/// are treated as antipodal and rejected.
pub const ANTIPODE_GUARD: f64 = 1e-10;

/// Allowance for arccosh arguments that fall below 1 by pure round-off; the
/// argument is clamped to 1 within this slack and rejected beyond it.
pub const ARCCOSH_SLACK: f64 = 1e-12;

/// Instance self-check: each generated ball center must sit at distance
/// exactly `r` from the hidden interior point, up to this tolerance.
pub const CENTER_DISTANCE_TOLERANCE: f64 = 1e-8;

/// Step-length fidelity demanded of the solver:
/// `d(p_k, p_{k+1}) = t_k` up to this tolerance.
pub const STEP_FIDELITY_TOLERANCE: f64 = 1e-8;

/// Polyak runs must shrink the distance to any minimizer monotonically; the
/// recorded distances may increase by at most this much per step.
pub const MONOTONE_TOLERANCE: f64 = 1e-9;

/// Oracles advertise a Lipschitz constant `tau`; returned subgradient norms
/// may exceed it by at most this much.
pub const LIPSCHITZ_SLACK: f64 = 1e-9;

// The eigenvalue floor must undercut the membership tolerance, and the
// round-trip/certification tolerances must sit above the membership tolerance
// they compound. Checked at compile time.
const _: () = {
    assert!(EIGENVALUE_FLOOR > 0.0);
    assert!(EIGENVALUE_FLOOR < POINT_TOLERANCE);
    assert!(POINT_TOLERANCE < ROUND_TRIP_TOLERANCE);
    assert!(ROUND_TRIP_TOLERANCE < SUBGRADIENT_MARGIN_TOLERANCE);
    assert!(SUBGRADIENT_MARGIN_TOLERANCE < CERTIFICATION_TOLERANCE);
    assert!(FLAT_KAPPA <= ARCCOSH_SLACK);
};
