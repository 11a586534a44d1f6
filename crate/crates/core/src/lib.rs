//! Exact sum-of-squares and sos-convexity certificates for multivariate
//! polynomials with rational coefficients.
//!
//! Numerical semidefinite programming only proposes answers. Every verdict
//! returned by [`analysis`] carries a certificate (a rational Gram matrix or a
//! separating moment functional) that is checked in exact arithmetic by
//! [`certificates`], which never calls the solver.

// dense linear algebra reads best with explicit indices
#![allow(clippy::needless_range_loop)]

pub mod analysis;
pub mod certificates;
pub mod constructions;
pub mod error;
pub mod forms;
pub mod polynomial;
pub mod sdp;

pub use analysis::{
    check_convexity_multiplier, classify, is_sos, is_sos_convex, is_sos_matrix, AnalysisOptions, ConvexityStatus,
    SosStatus,
};
pub use certificates::{verify_gram, verify_separation, Certificate, GramCertificate, SeparationCertificate};
pub use error::{Error, Result};
pub use forms::WitnessKind;
pub use polynomial::{Monomial, PolyMatrix, Polynomial, Scalar};
