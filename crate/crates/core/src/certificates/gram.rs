use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::basis::MonomialBasis;
use super::ldlt::{rational_ldlt, Definiteness};
use super::matrix::RatMatrix;
use super::report::{FailedCheck, VerificationReport};
use crate::error::{Error, Result};
use crate::polynomial::{Monomial, Polynomial, Scalar};

/// Claims `multiplier * p = scale * zᵀ Q z` with `Q` PSD.
#[derive(Debug, Clone, PartialEq)]
pub struct GramCertificate {
    pub basis: MonomialBasis,
    pub gram: RatMatrix,
    pub multiplier: Polynomial,
    pub scale: Scalar,
}

impl GramCertificate {
    /// Certificate with unit multiplier and unit scale.
    pub fn new(basis: MonomialBasis, gram: RatMatrix) -> Result<Self> {
        let n = basis.num_vars();
        Self::with_multiplier(basis, gram, Polynomial::one(n), Scalar::one())
    }

    pub fn with_multiplier(
        basis: MonomialBasis,
        gram: RatMatrix,
        multiplier: Polynomial,
        scale: Scalar,
    ) -> Result<Self> {
        if gram.rows() != basis.len() || gram.cols() != basis.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} Gram matrix for a basis of {} monomials",
                gram.rows(),
                gram.cols(),
                basis.len()
            )));
        }
        if let Some((row, col)) = gram.first_asymmetry() {
            return Err(Error::NotSymmetric { row, col });
        }
        if !scale.is_positive() {
            return Err(Error::InvalidArgument("certificate scale must be positive".into()));
        }
        if multiplier.num_vars() != basis.num_vars() {
            return Err(Error::VariableMismatch {
                left: basis.num_vars(),
                right: multiplier.num_vars(),
            });
        }
        Ok(GramCertificate {
            basis,
            gram,
            multiplier,
            scale,
        })
    }

    /// Expands `scale * zᵀ Q z` exactly.
    pub fn expand(&self) -> Polynomial {
        let z = self.basis.monomials();
        let mut acc: BTreeMap<Monomial, Scalar> = BTreeMap::new();
        let two = Scalar::from_integer(2.into());
        for i in 0..z.len() {
            for j in i..z.len() {
                let q = self.gram.get(i, j);
                if q.is_zero() {
                    continue;
                }
                let c = if i == j { q.clone() } else { q * &two };
                *acc.entry(z[i].mul(&z[j])).or_insert_with(Scalar::zero) += c;
            }
        }
        let n = self.basis.num_vars();
        Polynomial::from_terms(
            n,
            acc.into_iter().map(|(m, c)| (m.exponents().to_vec(), c * &self.scale)),
        )
        .expect("basis monomials share the variable count")
    }
}

/// Exact check of the identity and of PSD-ness of the Gram matrix.
pub fn verify_gram(p: &Polynomial, cert: &GramCertificate) -> Result<VerificationReport> {
    if cert.gram.rows() != cert.basis.len() || cert.gram.cols() != cert.basis.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} Gram matrix for a basis of {} monomials",
            cert.gram.rows(),
            cert.gram.cols(),
            cert.basis.len()
        )));
    }
    if p.num_vars() != cert.basis.num_vars() {
        return Err(Error::VariableMismatch {
            left: p.num_vars(),
            right: cert.basis.num_vars(),
        });
    }
    let lhs = cert.multiplier.try_mul(p)?;
    let diff = lhs.try_sub(&cert.expand())?;
    let mismatch = diff.terms().next().map(|(m, _)| m.clone());

    let ldlt = rational_ldlt(&cert.gram)?;
    let mut report = VerificationReport {
        valid: false,
        failed: None,
        mismatch,
        definiteness: Some(ldlt.status),
        pivots: ldlt.pivots,
        pairing: None,
    };
    report.failed = if report.mismatch.is_some() {
        Some(FailedCheck::Identity)
    } else if !ldlt.status.is_psd() {
        Some(FailedCheck::Psd)
    } else {
        None
    };
    report.valid = report.failed.is_none();
    Ok(report)
}

/// True when the Gram matrix is exactly PSD.
pub fn gram_is_psd(cert: &GramCertificate) -> Result<bool> {
    Ok(rational_ldlt(&cert.gram)?.status != Definiteness::Indefinite)
}
