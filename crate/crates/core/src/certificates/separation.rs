use num_traits::{Signed, Zero};

use super::basis::MonomialBasis;
use super::ldlt::rational_ldlt;
use super::matrix::RatMatrix;
use super::report::{FailedCheck, VerificationReport};
use crate::error::{Error, Result};
use crate::polynomial::{Polynomial, Scalar};

/// A linear functional `c` on the span of `ordering`, claimed nonnegative on
/// every sum of squares of polynomials spanned by `moment_basis`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationCertificate {
    pub ordering: MonomialBasis,
    pub dual: Vec<Scalar>,
    pub moment_basis: MonomialBasis,
}

impl SeparationCertificate {
    pub fn new(ordering: MonomialBasis, dual: Vec<Scalar>, moment_basis: MonomialBasis) -> Result<Self> {
        if dual.len() != ordering.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} dual values for {} monomials",
                dual.len(),
                ordering.len()
            )));
        }
        if ordering.num_vars() != moment_basis.num_vars() {
            return Err(Error::VariableMismatch {
                left: ordering.num_vars(),
                right: moment_basis.num_vars(),
            });
        }
        let cert = SeparationCertificate {
            ordering,
            dual,
            moment_basis,
        };
        cert.moment_matrix()?;
        Ok(cert)
    }

    /// Applies the functional to a polynomial's coefficient vector.
    pub fn pairing(&self, t: &Polynomial) -> Result<Scalar> {
        let index = self.ordering.index_map();
        let mut s = Scalar::zero();
        for (m, c) in t.terms() {
            let i = index.get(m).ok_or_else(|| Error::Unrepresentable(m.tuple_text()))?;
            s += c * &self.dual[*i];
        }
        Ok(s)
    }

    /// `(z zᵀ)|_c`: entry `(i, j)` is the dual value at `z_i z_j`.
    pub fn moment_matrix(&self) -> Result<RatMatrix> {
        let index = self.ordering.index_map();
        let z = self.moment_basis.monomials();
        let mut m = RatMatrix::zeros(z.len(), z.len());
        for i in 0..z.len() {
            for j in i..z.len() {
                let prod = z[i].mul(&z[j]);
                let k = index
                    .get(&prod)
                    .ok_or_else(|| Error::Unrepresentable(prod.tuple_text()))?;
                m.set(i, j, self.dual[*k].clone());
                m.set(j, i, self.dual[*k].clone());
            }
        }
        Ok(m)
    }
}

/// Free-standing form of [`SeparationCertificate::moment_matrix`].
pub fn moment_matrix(cert: &SeparationCertificate) -> Result<RatMatrix> {
    cert.moment_matrix()
}

/// Valid iff the pairing with `t` is strictly negative and the moment matrix is PSD.
pub fn verify_separation(t: &Polynomial, cert: &SeparationCertificate) -> Result<VerificationReport> {
    if t.num_vars() != cert.ordering.num_vars() {
        return Err(Error::VariableMismatch {
            left: t.num_vars(),
            right: cert.ordering.num_vars(),
        });
    }
    let pairing = cert.pairing(t)?;
    let ldlt = rational_ldlt(&cert.moment_matrix()?)?;
    let failed = if !pairing.is_negative() {
        Some(FailedCheck::Pairing)
    } else if !ldlt.status.is_psd() {
        Some(FailedCheck::Psd)
    } else {
        None
    };
    Ok(VerificationReport {
        valid: failed.is_none(),
        failed,
        mismatch: None,
        definiteness: Some(ldlt.status),
        pivots: ldlt.pivots,
        pairing: Some(pairing),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificates::ldlt::Definiteness;
    use crate::polynomial::scalar::int;

    fn univariate() -> (MonomialBasis, MonomialBasis) {
        // moments of 1, x, x^2 against squares of a + b x
        let ordering = MonomialBasis::from_exponents(1, &[&[0], &[1], &[2]]).unwrap();
        let moment = MonomialBasis::from_exponents(1, &[&[0], &[1]]).unwrap();
        (ordering, moment)
    }

    #[test]
    fn point_evaluation_is_rank_one() {
        let (ordering, moment) = univariate();
        // evaluation at x = 2: (1, 2, 4)
        let cert = SeparationCertificate::new(ordering, vec![int(1), int(2), int(4)], moment).unwrap();
        let m = cert.moment_matrix().unwrap();
        assert_eq!(m.get(0, 1), &int(2));
        let f = rational_ldlt(&m).unwrap();
        assert_eq!(f.status, Definiteness::PositiveSemidefinite);
        // x^2 - 4x + 3 is negative at 2, and is not a square
        let t = Polynomial::from_int_terms(1, &[(1, &[2]), (-4, &[1]), (3, &[0])]);
        let r = verify_separation(&t, &cert).unwrap();
        assert!(r.valid);
        assert_eq!(r.pairing, Some(int(-1)));
    }

    #[test]
    fn zero_functional_is_invalid() {
        let (ordering, moment) = univariate();
        let cert = SeparationCertificate::new(ordering, vec![int(0); 3], moment).unwrap();
        let t = Polynomial::from_int_terms(1, &[(-1, &[0])]);
        let r = verify_separation(&t, &cert).unwrap();
        assert!(!r.valid);
        assert_eq!(r.failed, Some(FailedCheck::Pairing));
    }

    #[test]
    fn indefinite_moments_are_rejected() {
        let (ordering, moment) = univariate();
        let cert = SeparationCertificate::new(ordering, vec![int(1), int(2), int(1)], moment).unwrap();
        let t = Polynomial::from_int_terms(1, &[(-1, &[0])]);
        let r = verify_separation(&t, &cert).unwrap();
        assert_eq!(r.failed, Some(FailedCheck::Psd));
    }

    #[test]
    fn closure_and_support_errors() {
        let ordering = MonomialBasis::from_exponents(1, &[&[0], &[1]]).unwrap();
        let moment = MonomialBasis::from_exponents(1, &[&[0], &[1]]).unwrap();
        assert!(SeparationCertificate::new(ordering, vec![int(1), int(0)], moment).is_err());
        let (ordering, moment) = univariate();
        let cert = SeparationCertificate::new(ordering, vec![int(1), int(0), int(1)], moment).unwrap();
        let t = Polynomial::from_int_terms(1, &[(1, &[3])]);
        assert!(matches!(verify_separation(&t, &cert), Err(Error::Unrepresentable(_))));
    }
}
