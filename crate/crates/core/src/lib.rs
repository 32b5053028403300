//! Polar decomposition of Dirac spinor fields on curved charts: bilinears,
//! tensorial connections, Lie derivatives along Killing fields and the
//! spherical no-go certificate.

#![allow(
    clippy::needless_range_loop,
    clippy::redundant_guards,
    clippy::neg_cmp_op_on_partial_ord
)]

pub mod clifford;
pub mod connection;
pub mod dynamics;
pub mod error;
pub mod expr;
pub mod field;
pub mod geometry;
pub mod harness;
pub mod jet;
pub mod lie;
pub mod observables;
pub mod polar;
pub mod sampling;
pub mod spherical;
pub mod tensor;

pub use clifford::{basis, build_gamma_basis, exp_spin, GammaBasis, SpinGroupElement, Spinor};
pub use connection::{curvature_residuals, tensorial_f, tensorial_p, transport_residuals, Kinematics};
pub use dynamics::{dirac_residuals, energy_tensor, momentum, zy_vectors, DynamicsContext};
pub use error::{Error, Result};
pub use expr::Expr;
pub use field::{PolarField, PolarFieldSpec};
pub use geometry::{
    killing_residual, riemann, spherical_killing_fields, spin_connection, KillingField, SpacetimeChart,
};
pub use harness::{run_invariance, run_nogo, run_verify, RunOptions, Scenario};
pub use lie::{
    cond_scalar, equivalence_check, lie_bilinears, lie_gamma_residual, lie_spinor, polar_lie_decomposition, LieReport,
};
pub use observables::{bilinears, fierz_residuals, Bilinears};
pub use polar::{polar_decompose, polar_reconstruct, real_lorentz_of, PolarData};
pub use spherical::{ansatz_field, nogo_certificate, parity_constraints, SphericalScenario};
