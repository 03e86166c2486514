//! Region of possible minimizers of `f1 + f2` when each `fi` is
//! `sigma_i`-strongly convex with minimizer `xi*` and the gradients at the
//! sum's minimizer are bounded by `L`.
//!
//! - [`geometry`]: instances, the canonical frame, angle quantities.
//! - [`region`]: regimes, membership predicates, classification, tracing.
//! - [`quadratic`]: quadratic functions, the constructive existence procedure
//!   and witness pairs.
//! - [`federated`]: the robust aggregate point and the smallest workable `L`.
//! - [`oracle`]: Monte-Carlo and finite-difference verification.

pub mod error;
pub mod geometry;
pub mod linalg;
pub mod region;

pub use error::{Error, FeasibilityViolation, Result};
pub use geometry::{angle_report, canonical_frame, AngleReport, CanonicalFrame, CanonicalInstance, ProblemInstance};
pub use region::{
    classify, in_inner, in_outer, regime, t_residual, trace_boundary, BoundaryPiece, BoundaryTrace, Membership,
    MembershipValue, RegimeCase, Region, RegionRegime, Segment, SegmentTag,
};
pub mod federated;
pub mod oracle;
pub mod quadratic;

pub use federated::{fed_point, min_gradient_bound, AggregationResult};
pub use oracle::{
    fd_gradient_check, mc_completeness, mc_soundness, sample_quadratic, VerificationMode, VerificationReport,
};
pub use quadratic::{
    admissible_angles, construct_quadratic, construct_quadratic_2d, sum_minimizer, witness_family, witness_pair,
    AdmissibleAngles, QuadraticFunction, WitnessPair,
};
