//! Numeric tolerances shared across the crate.
//!
//! Data validation is stricter than any solver tolerance so that solver error
//! never hides malformed input.

/// Row-stochasticity and initial-distribution sums.
pub const STOCHASTIC: f64 = 1e-12;
/// Residual of the dense occupancy / evaluation solves.
pub const LINEAR_RESIDUAL: f64 = 1e-10;
/// Bellman residual target for value iteration in induced MDPs.
pub const BELLMAN: f64 = 1e-10;
/// Cross-check between the Bellman value and the occupancy identity.
pub const OCCUPANCY_IDENTITY: f64 = 1e-8;
/// Two actions whose Q-values differ by less than this are treated as tied.
pub const TIE: f64 = 1e-9;
/// Nash gaps below `-NASH_GAP_FLOOR` indicate a solver fault.
pub const NASH_GAP_FLOOR: f64 = 1e-8;
/// Weights at or below this do not count towards a mixed-strategy support.
pub const SUPPORT: f64 = 1e-9;
/// Simplex feasibility / pivot tolerance.
pub const LP: f64 = 1e-9;
/// Simplex validity of a mixed profile.
pub const PROFILE: f64 = 1e-10;
/// Deduplication radius (L-infinity) for enumerated equilibria.
pub const DEDUP: f64 = 1e-7;
/// Zero-sum check on reward tables.
pub const ZERO_SUM: f64 = 1e-12;
/// Damped softmax stage-game solver.
pub const STAGE_INNER: f64 = 1e-12;
pub const STAGE_INNER_CAP: usize = 100_000;
pub const STAGE_DAMPING: f64 = 0.5;
/// Outer sweep of regularized Nash value iteration.
pub const NASH_VI_OUTER: f64 = 1e-8;
pub const NASH_VI_OUTER_CAP: usize = 10_000;

/// Iteration cap for value iteration: `10 log(1/tol) / (1 - gamma)`.
pub fn value_iteration_cap(gamma: f64, tol: f64) -> usize {
    (10.0 * (1.0 / tol).ln() / (1.0 - gamma)).ceil() as usize
}
