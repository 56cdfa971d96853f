//! Explicit supersolutions, selection of their constants, pointwise
//! verification of the supersolution inequalities and nodal comparison with
//! computed solutions.
//!
//! Every barrier is checked against the shifted problem with zero obstacle:
//! `-Δū + αū ≥ -ε` in `D`, `ū ≥ M` on the interior cap `∂₁D` and
//! `∂_ν ū ≥ -δ` on the boundary part `∂₂D`.

mod evaluators;
mod ode;
mod select;
mod verify;

pub use evaluators::{
    intrinsic_barrier, quadratic_barrier, ring_barrier, IntrinsicBarrier, QuadraticBarrier, RingBarrier, Supersolution,
};
pub use ode::{ode_barrier, ode_barrier_extrapolated, OdeBarrier, ValidityInterval};
pub use select::{select_constants, BarrierConstants, BarrierKind, Inequality, Selection, SelectionInput};
pub use verify::{
    comparison_check, param_at_signed_distance, verify_ode, verify_supersolution, BarrierCertificate, BarrierRegion,
    ComparisonReport, FamilyResidual, RegionSamples, VerificationReport, RESIDUAL_TOL,
};
