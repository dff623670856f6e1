//! Numeric tolerances shared across modules, pinned in one place so tests
//! and implementations agree on every comparison.

/// A computed transition row must sum to 1 within this bound.
pub const ROW_SUM_TOL: f64 = 1e-12;

/// Walk-signature entries must sum to 0 within this bound.
pub const SIGNATURE_SUM_TOL: f64 = 1e-9;

/// Sign classification for bisection: entries `>= -SIGN_EPS` count as
/// nonnegative. Absorbs rounding noise around an exact zero signature.
pub const SIGN_EPS: f64 = 1e-12;

/// A split is accepted only when the modularity sum exceeds the unsplit
/// value by more than this slack; guards against recursing on float ties.
pub const GAIN_SLACK: f64 = 1e-12;

/// Slack allowed when asserting that modularity never decreases.
pub const MONOTONE_SLACK: f64 = 1e-12;

/// Default per-level improvement threshold for the hierarchical optimizers.
pub const MIN_GAIN_DEFAULT: f64 = 1e-9;

/// Hard cap on refinement sweeps over a cluster.
pub const REFINE_SWEEP_CAP: usize = 100;

/// Power iteration stops when the eigenvector changes by less than this.
pub const EIGEN_CONVERGENCE_TOL: f64 = 1e-10;

/// Power iteration budget.
pub const EIGEN_MAX_ITERS: usize = 100_000;

/// Accepted eigenpairs must satisfy `‖L·v − λ·v‖∞ <= EIGEN_RESIDUAL_TOL`.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-8;

/// An eigenvalue gap below this is reported as degenerate.
pub const DEGENERATE_GAP: f64 = 1e-6;

/// Default walk length when none is given.
pub const DEFAULT_WALK_STEPS: usize = 15;
