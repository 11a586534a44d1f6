use super::ldlt::Definiteness;
use crate::polynomial::{Monomial, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailedCheck {
    /// The polynomial identity does not hold.
    Identity,
    /// The matrix is not positive semidefinite.
    Psd,
    /// The dual pairing is not strictly negative.
    Pairing,
}

/// Outcome of an exact certificate check.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub valid: bool,
    /// First check that failed, in the order identity/pairing then PSD.
    pub failed: Option<FailedCheck>,
    /// Leading monomial of the identity residual, if any.
    pub mismatch: Option<Monomial>,
    pub definiteness: Option<Definiteness>,
    pub pivots: Vec<Scalar>,
    /// Exact value of the dual pairing for separation certificates.
    pub pairing: Option<Scalar>,
}
