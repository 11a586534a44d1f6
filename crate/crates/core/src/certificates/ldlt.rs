//! Exact rational LDLᵀ factorization with symmetric diagonal pivoting.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::RatMatrix;
use crate::error::{Error, Result};
use crate::polynomial::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Definiteness {
    PositiveDefinite,
    PositiveSemidefinite,
    Indefinite,
}

impl Definiteness {
    /// PSD or better.
    pub fn is_psd(self) -> bool {
        !matches!(self, Definiteness::Indefinite)
    }
}

/// `PᵀQP = L · blockdiag(D, R) · Lᵀ` where `R` is empty unless elimination
/// stopped at an all-zero diagonal with a nonzero off-diagonal remainder.
#[derive(Debug, Clone)]
pub struct LdltResult {
    /// `permutation[k]` is the row of `Q` placed at position `k`.
    pub permutation: Vec<usize>,
    pub lower: RatMatrix,
    pub pivots: Vec<Scalar>,
    /// Unfactored trailing block, present only for the indefinite stop.
    pub remainder: Option<RatMatrix>,
    pub status: Definiteness,
}

impl LdltResult {
    /// Rebuilds `L · blockdiag(D, R) · Lᵀ`, which equals `PᵀQP` exactly.
    pub fn reconstruct_permuted(&self) -> RatMatrix {
        let n = self.lower.rows();
        let k = self.pivots.len();
        let mut mid = RatMatrix::zeros(n, n);
        for (i, d) in self.pivots.iter().enumerate() {
            mid.set(i, i, d.clone());
        }
        if let Some(r) = &self.remainder {
            for i in 0..r.rows() {
                for j in 0..r.cols() {
                    mid.set(k + i, k + j, r.get(i, j).clone());
                }
            }
        }
        self.lower.mul(&mid).mul(&self.lower.transpose())
    }
}

/// Factors a symmetric rational matrix.
///
/// At each step the remaining diagonal entry of largest magnitude is moved to
/// the pivot position. A zero largest diagonal ends elimination: the matrix
/// is PSD-completable only if the whole remaining block is zero.
pub fn rational_ldlt(q: &RatMatrix) -> Result<LdltResult> {
    let n = q.rows();
    if q.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix is not square",
            n,
            q.cols()
        )));
    }
    if let Some((row, col)) = q.first_asymmetry() {
        return Err(Error::NotSymmetric { row, col });
    }
    let mut a = q.clone();
    let mut lower = RatMatrix::identity(n);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut pivots = Vec::with_capacity(n);
    let mut negative = false;

    for k in 0..n {
        let (best, best_abs) = (k..n)
            .map(|i| (i, a.get(i, i).abs()))
            .max_by(|x, y| x.1.cmp(&y.1).then(y.0.cmp(&x.0)))
            .expect("non-empty range");
        if best_abs.is_zero() {
            let rest_zero = (k..n).all(|i| (k..n).all(|j| a.get(i, j).is_zero()));
            if rest_zero {
                pivots.extend((k..n).map(|_| Scalar::zero()));
                let status = if negative {
                    Definiteness::Indefinite
                } else {
                    Definiteness::PositiveSemidefinite
                };
                return Ok(LdltResult {
                    permutation: perm,
                    lower,
                    pivots,
                    remainder: None,
                    status,
                });
            }
            let m = n - k;
            let mut rem = RatMatrix::zeros(m, m);
            for i in 0..m {
                for j in 0..m {
                    rem.set(i, j, a.get(k + i, k + j).clone());
                }
            }
            return Ok(LdltResult {
                permutation: perm,
                lower,
                pivots,
                remainder: Some(rem),
                status: Definiteness::Indefinite,
            });
        }
        if best != k {
            a.swap_symmetric(k, best);
            perm.swap(k, best);
            for c in 0..k {
                let t = lower.get(k, c).clone();
                lower.set(k, c, lower.get(best, c).clone());
                lower.set(best, c, t);
            }
        }
        let d = a.get(k, k).clone();
        if d.is_negative() {
            negative = true;
        }
        for i in (k + 1)..n {
            let lik = a.get(i, k) / &d;
            if lik.is_zero() {
                continue;
            }
            for j in (k + 1)..=i {
                let v = a.get(i, j) - &lik * a.get(k, j);
                a.set(i, j, v.clone());
                a.set(j, i, v);
            }
            lower.set(i, k, lik);
        }
        for i in (k + 1)..n {
            a.set(i, k, Scalar::zero());
            a.set(k, i, Scalar::zero());
        }
        pivots.push(d);
    }
    let status = if negative {
        Definiteness::Indefinite
    } else if pivots.iter().all(|p| p.is_positive()) {
        Definiteness::PositiveDefinite
    } else {
        Definiteness::PositiveSemidefinite
    };
    Ok(LdltResult {
        permutation: perm,
        lower,
        pivots,
        remainder: None,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::scalar::int;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()).unwrap()
    }

    fn check_reconstruction(q: &RatMatrix, f: &LdltResult) {
        let permuted = q.permuted(&f.permutation);
        assert_eq!(f.reconstruct_permuted(), permuted);
    }

    #[test]
    fn hand_examples() {
        let q = m(&[&[4, 2], &[2, 2]]);
        let f = rational_ldlt(&q).unwrap();
        assert_eq!(f.pivots, vec![int(4), int(1)]);
        assert_eq!(f.status, Definiteness::PositiveDefinite);
        check_reconstruction(&q, &f);

        let f = rational_ldlt(&RatMatrix::identity(3)).unwrap();
        assert_eq!(f.lower, RatMatrix::identity(3));
        assert_eq!(f.pivots, vec![int(1); 3]);
        assert_eq!(f.status, Definiteness::PositiveDefinite);

        let q = m(&[&[1, 1], &[1, 1]]);
        let f = rational_ldlt(&q).unwrap();
        assert_eq!(f.pivots, vec![int(1), int(0)]);
        assert_eq!(f.status, Definiteness::PositiveSemidefinite);
        check_reconstruction(&q, &f);
    }

    #[test]
    fn indefinite_cases() {
        let q = m(&[&[0, 1], &[1, 0]]);
        let f = rational_ldlt(&q).unwrap();
        assert_eq!(f.status, Definiteness::Indefinite);
        assert!(f.remainder.is_some());
        check_reconstruction(&q, &f);

        let q = m(&[&[1, 2], &[2, 1]]);
        let f = rational_ldlt(&q).unwrap();
        assert_eq!(f.status, Definiteness::Indefinite);
        check_reconstruction(&q, &f);

        let q = m(&[&[1, 0, 0], &[0, 0, 1], &[0, 1, 0]]);
        let f = rational_ldlt(&q).unwrap();
        assert_eq!(f.status, Definiteness::Indefinite);
        check_reconstruction(&q, &f);
    }

    #[test]
    fn rejects_asymmetric() {
        let q = m(&[&[1, 2], &[3, 1]]);
        assert!(matches!(rational_ldlt(&q), Err(Error::NotSymmetric { .. })));
    }

    proptest! {
        #[test]
        fn reconstruction_is_exact(entries in prop::collection::vec(-6i64..6, 25), rank in 0usize..5) {
            // B is 5xrank, Q = B Bᵀ minus a perturbation that may break definiteness
            let n = 5;
            let mut q = RatMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    let mut v = int(0);
                    for k in 0..rank {
                        v += int(entries[i * 5 + k] * entries[j * 5 + k]);
                    }
                    q.set(i, j, v);
                }
            }
            if entries[0] < -3 {
                q.set(0, 0, q.get(0, 0) - int(1));
            }
            let f = rational_ldlt(&q).unwrap();
            prop_assert_eq!(f.reconstruct_permuted(), q.permuted(&f.permutation));
            if entries[0] >= -3 {
                prop_assert!(f.status.is_psd());
                if rank < n {
                    prop_assert_ne!(f.status, Definiteness::PositiveDefinite);
                }
            }
        }
    }
}
