//! Numerical laboratory for the one-dimensional degenerate/singular wave
//! equation with drift,
//!
//! ```text
//! u_tt - a(x) u_xx - (lambda / d(x)) u - b(x) u_x = 0   on (0, 1),
//! ```
//!
//! with a boundary control acting at x = 1. The crate covers the weighted
//! functional setting (Feller weight, Hardy-Poincare constant), exact-energy
//! time stepping, boundary observability estimates with explicit constants,
//! and null-control synthesis by the Hilbert uniqueness method.

pub mod coefficients;
pub mod error;
pub mod evolution;
pub mod grid;
pub mod hum;
pub mod linalg;
pub mod observability;
pub mod operator;
pub mod quadrature;
pub mod sampling;

pub use coefficients::{
    check_hypotheses, classify_degeneracy, degeneracy_report, drift_constants, eta, sigma,
    CoefficientProfile, CoefficientSet, ControlCase, DegClass, DegeneracyReport,
    HypothesisVerdicts, Verdict,
};
pub use error::{Error, Result};
pub use evolution::{
    boundary_diagnostics, energy, simulate_controlled, simulate_homogeneous,
    trace_squared_integral, BoundaryDiagnostics, Stepper, Trajectory, WaveState,
};
pub use grid::{estimate_chp, estimate_chp_extrapolated, chp_closed_form_bound, Grid, GridFunction};
pub use hum::{lambda_form, rhs_functional, solve_backward, solve_hum, verify_null_control, ControlResult, FinalData};
pub use observability::{
    check_direct_inequality, check_inverse_inequality, direct_constants, estimate_ct,
    inverse_constants, ConstantInputs, InequalityCheck, ObservabilityConstants,
};
pub use operator::DiscreteOperator;
pub use sampling::{left_moving_packet, random_smooth_data, SamplerStrategy};
