//! Exact verification of Gram (sum of squares) and separation (dual) certificates.

mod basis;
mod file;
mod gram;
mod ldlt;
mod matrix;
mod report;
mod separation;

pub use basis::{prune_basis, standard_basis, BasisStructure, MonomialBasis};
pub use file::{Certificate, CertificateFile};
pub use gram::{gram_is_psd, verify_gram, GramCertificate};
pub use ldlt::{rational_ldlt, Definiteness, LdltResult};
pub use matrix::RatMatrix;
pub use report::{FailedCheck, VerificationReport};
pub use separation::{moment_matrix, verify_separation, SeparationCertificate};
