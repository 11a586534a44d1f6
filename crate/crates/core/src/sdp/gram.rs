//! Numerical Gram search and exact rounding.
//!
//! The search solves
//!
//! ```text
//! minimize s  subject to  Σ_{z_i z_j = α} Q_ij - s·#{i : z_i² = α} = p_α / κ,  Q ⪰ 0, s ≥ 0
//! ```
//!
//! where `κ` normalizes the largest coefficient to one. Adding `s·I` to any
//! matching symmetric matrix gives a strictly feasible start, so the method
//! never stalls on an empty interior. The optimum is zero exactly when `p` is a
//! sum of squares over the basis; otherwise the dual multipliers, negated,
//! form a functional with PSD moment matrix and negative pairing.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use num_traits::{Signed, Zero};

use super::ipm::{Entry, StandardForm};
use super::SolverOptions;
use crate::certificates::{
    rational_ldlt, verify_gram, verify_separation, GramCertificate, MonomialBasis, RatMatrix, SeparationCertificate,
};
use crate::error::{Error, Result};
use crate::polynomial::scalar::{round_dyadic, to_f64};
use crate::polynomial::{Monomial, Polynomial, Scalar};

/// Basis index pairs `(i, j)`, `i <= j`, grouped by the product monomial.
#[derive(Debug, Clone)]
pub(crate) struct GramClasses {
    pub ordering: Vec<Monomial>,
    pub pairs: Vec<Vec<(usize, usize)>>,
}

impl GramClasses {
    pub fn new(basis: &MonomialBasis, target: &Polynomial) -> Result<Self> {
        if basis.num_vars() != target.num_vars() {
            return Err(Error::VariableMismatch {
                left: basis.num_vars(),
                right: target.num_vars(),
            });
        }
        let mut map: BTreeMap<Monomial, Vec<(usize, usize)>> = BTreeMap::new();
        let z = basis.monomials();
        for i in 0..z.len() {
            for j in i..z.len() {
                map.entry(z[i].mul(&z[j])).or_default().push((i, j));
            }
        }
        for (m, _) in target.terms() {
            if !map.contains_key(m) {
                return Err(Error::Unrepresentable(m.tuple_text()));
            }
        }
        let (ordering, pairs) = map.into_iter().unzip();
        Ok(GramClasses { ordering, pairs })
    }

    /// `Σ_{pairs} Q_ij` weighted by multiplicity in `zᵀQz`.
    fn coefficient(&self, k: usize, q: &DMatrix<f64>) -> f64 {
        self.pairs[k]
            .iter()
            .map(|&(i, j)| if i == j { q[(i, j)] } else { 2.0 * q[(i, j)] })
            .sum()
    }
}

/// A floating Gram matrix that matches the target to within tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericGram {
    pub gram: DMatrix<f64>,
    /// Largest coefficient mismatch after normalizing the target to unit max-norm.
    pub residual: f64,
    pub min_pivot: f64,
}

/// A functional on the monomials of `ordering` separating the target from the
/// sos cone of the basis, up to rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct DualRay {
    pub ray: Vec<f64>,
    pub ordering: MonomialBasis,
    /// Pairing of `ray` with the normalized target.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GramSearch {
    NumericGram(NumericGram),
    DualRay(DualRay),
}

/// Pivots of a floating LDLᵀ with diagonal pivoting; the smallest is returned.
pub fn float_min_pivot(q: &DMatrix<f64>) -> f64 {
    let n = q.nrows();
    let mut a = q.clone();
    let mut active: Vec<usize> = (0..n).collect();
    let mut min = f64::INFINITY;
    while !active.is_empty() {
        let (pos, &p) = active
            .iter()
            .enumerate()
            .max_by(|x, y| a[(*x.1, *x.1)].abs().total_cmp(&a[(*y.1, *y.1)].abs()))
            .expect("nonempty");
        let d = a[(p, p)];
        min = min.min(d);
        active.swap_remove(pos);
        if d.abs() <= f64::MIN_POSITIVE {
            continue;
        }
        for &i in &active {
            let f = a[(i, p)] / d;
            for &j in &active {
                a[(i, j)] -= f * a[(p, j)];
            }
        }
    }
    if n == 0 {
        0.0
    } else {
        min
    }
}

fn max_abs_coefficient(p: &Polynomial) -> f64 {
    p.terms().map(|(_, c)| to_f64(c).abs()).fold(0.0, f64::max)
}

/// Searches for a Gram matrix of `multiplier · p` over `basis`.
pub fn sos_gram_search(
    p: &Polynomial,
    basis: &MonomialBasis,
    multiplier: &Polynomial,
    opts: &SolverOptions,
) -> Result<GramSearch> {
    let target = p.try_mul(multiplier)?;
    if target.degree() >= 0 && target.degree() % 2 == 1 {
        return Err(Error::InvalidArgument("odd-degree target has no Gram matrix".into()));
    }
    let classes = GramClasses::new(basis, &target)?;
    let n = basis.len();
    let kappa = max_abs_coefficient(&target).max(f64::MIN_POSITIVE);
    let normalized: Vec<f64> = classes
        .ordering
        .iter()
        .map(|m| to_f64(&target.coefficient(m)) / kappa)
        .collect();

    // Diagonal preconditioning: Q = D Q' D with D taken from the target's
    // square coefficients, so small and large blocks are solved to similar
    // relative accuracy.
    let scale: Vec<f64> = basis
        .iter()
        .map(|b| {
            let w = to_f64(&target.coefficient(&b.mul(b))).abs() / kappa;
            if w > 0.0 {
                w.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    let mut a = Vec::with_capacity(classes.ordering.len());
    for pairs in &classes.pairs {
        let mut e: Vec<Entry> = pairs
            .iter()
            .map(|&(i, j)| Entry {
                block: 0,
                row: i,
                col: j,
                value: scale[i] * scale[j],
            })
            .collect();
        let diag: f64 = pairs
            .iter()
            .filter(|(i, j)| i == j)
            .map(|&(i, _)| scale[i] * scale[i])
            .sum();
        if diag > 0.0 {
            e.push(Entry {
                block: 1,
                row: 0,
                col: 0,
                value: -diag,
            });
        }
        a.push(e);
    }
    let sf = StandardForm {
        dims: vec![n, 1],
        a,
        b: normalized.clone(),
        c: vec![Entry {
            block: 1,
            row: 0,
            col: 0,
            value: 1.0,
        }],
    };
    let r = super::run_ipm(&sf, opts)?;
    let scaled = &r.x[0];
    let q = DMatrix::from_fn(n, n, |i, j| scaled[(i, j)] * scale[i] * scale[j]);
    let residual = (0..classes.ordering.len())
        .map(|k| (classes.coefficient(k, &q) - normalized[k]).abs())
        .fold(0.0, f64::max);
    let min_pivot = float_min_pivot(scaled);
    log::debug!(
        "gram search: basis {n}, {} classes, shift {:.3e}, residual {residual:.3e}, min pivot {min_pivot:.3e}, {} iterations",
        classes.ordering.len(),
        r.x[1][(0, 0)],
        r.iterations
    );
    if residual <= 1e-7 && min_pivot >= -1e-8 {
        return Ok(GramSearch::NumericGram(NumericGram {
            gram: q * kappa,
            residual,
            min_pivot,
        }));
    }
    let ray: Vec<f64> = r.y.iter().map(|v| -v).collect();
    let value = ray.iter().zip(&normalized).map(|(c, p)| c * p).sum();
    Ok(GramSearch::DualRay(DualRay {
        ray,
        ordering: MonomialBasis::new(target.num_vars(), classes.ordering)?,
        value,
    }))
}

const GRAM_BITS: [u32; 11] = [8, 12, 16, 20, 24, 28, 32, 40, 48, 56, 64];

/// Rounds a floating Gram matrix to dyadic rationals with at most
/// `max_bits` fractional bits, projects exactly onto the coefficient-matching
/// subspace and keeps the result only if it is exactly PSD.
///
/// The coefficient classes are disjoint, so the orthogonal projection shifts
/// every entry of class `α` by `r_α / ‖A_α‖²`. If no precision yields a PSD
/// matrix, the numerical range is tried as a face before giving up with
/// `Ok(None)`.
pub fn round_to_rational(
    numeric: &DMatrix<f64>,
    p: &Polynomial,
    basis: &MonomialBasis,
    multiplier: &Polynomial,
    max_bits: u32,
) -> Result<Option<GramCertificate>> {
    let n = basis.len();
    if numeric.nrows() != n || numeric.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} Gram matrix for a basis of {n}",
            numeric.nrows(),
            numeric.ncols()
        )));
    }
    let target = p.try_mul(multiplier)?;
    let classes = GramClasses::new(basis, &target)?;
    for bits in GRAM_BITS.into_iter().filter(|&b| b <= max_bits) {
        let mut q = RatMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = 0.5 * (numeric[(i, j)] + numeric[(j, i)]);
                let r = round_dyadic(v, bits).ok_or_else(|| Error::Numerical(format!("entry ({i},{j}) is {v}")))?;
                q.set(i, j, r.clone());
                q.set(j, i, r);
            }
        }
        for (k, m) in classes.ordering.iter().enumerate() {
            let pairs = &classes.pairs[k];
            let mut current = Scalar::zero();
            let mut weight = 0i64;
            for &(i, j) in pairs {
                if i == j {
                    current += q.get(i, j);
                    weight += 1;
                } else {
                    current += q.get(i, j) * Scalar::from_integer(2.into());
                    weight += 2;
                }
            }
            let r = target.coefficient(m) - current;
            if r.is_zero() {
                continue;
            }
            let delta = r / Scalar::from_integer(weight.into());
            for &(i, j) in pairs {
                let v = q.get(i, j) + &delta;
                q.set(i, j, v.clone());
                if i != j {
                    q.set(j, i, v);
                }
            }
        }
        if !rational_ldlt(&q)?.status.is_psd() {
            continue;
        }
        let cert =
            GramCertificate::with_multiplier(basis.clone(), q, multiplier.clone(), Scalar::from_integer(1.into()))?;
        if verify_gram(p, &cert)?.valid {
            log::debug!("gram rounded at {bits} bits");
            return Ok(Some(cert));
        }
    }
    super::facial::round_on_face(numeric, p, &target, basis, multiplier)
}

/// Moments of the standard Gaussian: `Π (α_i - 1)!!` when every exponent is even.
pub(crate) fn gaussian_moment(m: &Monomial) -> i64 {
    let mut out = 1i64;
    for &e in m.exponents() {
        if e % 2 == 1 {
            return 0;
        }
        let mut k = e as i64 - 1;
        while k > 1 {
            out = out.saturating_mul(k);
            k -= 2;
        }
    }
    out
}

const RAY_BITS: [u32; 6] = [12, 20, 28, 36, 44, 52];
const RAY_SHIFTS: [f64; 8] = [0.0, 1e-8, 1e-6, 1e-4, 1e-3, 1e-2, 3e-2, 1e-1];

/// Rationalizes a dual ray into a separation certificate for `t`.
///
/// The ray is normalized, nudged toward the Gaussian moment functional (whose
/// moment matrix is positive definite) to move off the cone boundary, then
/// rounded to dyadic rationals. A candidate is returned only if it passes
/// `verify_separation` exactly. `Ok(None)` reports that every attempt broke
/// either the sign of the pairing or PSD-ness of the moment matrix.
pub fn dual_ray_to_separation(
    ray: &[f64],
    ordering: &MonomialBasis,
    moment_basis: &MonomialBasis,
    t: &Polynomial,
) -> Result<Option<SeparationCertificate>> {
    if ray.len() != ordering.len() {
        return Err(Error::DimensionMismatch(format!(
            "ray of length {} for {} monomials",
            ray.len(),
            ordering.len()
        )));
    }
    let norm = ray.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if !norm.is_finite() || norm <= 0.0 {
        return Ok(None);
    }
    let gauss: Vec<f64> = ordering.iter().map(|m| gaussian_moment(m) as f64).collect();
    let gnorm = gauss.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    for shift in RAY_SHIFTS {
        for bits in RAY_BITS {
            let dual = ray
                .iter()
                .zip(&gauss)
                .map(|(c, g)| round_dyadic(c / norm + shift * g / gnorm, bits))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::Numerical("non-finite ray".into()))?;
            let cert = SeparationCertificate::new(ordering.clone(), dual, moment_basis.clone())?;
            if !cert.pairing(t)?.is_negative() {
                continue;
            }
            if verify_separation(t, &cert)?.valid {
                log::debug!("ray rounded at {bits} bits with shift {shift:e}");
                return Ok(Some(cert));
            }
        }
    }
    Ok(None)
}

/// Monomials in `t` that no product of `basis` reaches.
pub(crate) fn unreachable_terms(basis: &MonomialBasis, t: &Polynomial) -> Vec<Monomial> {
    let products: BTreeSet<Monomial> = basis.products();
    t.terms()
        .filter(|(m, _)| !products.contains(*m))
        .map(|(m, _)| m.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificates::{standard_basis, BasisStructure};
    use crate::polynomial::motzkin;

    fn sum_of_squares_2() -> Polynomial {
        Polynomial::from_int_terms(2, &[(1, &[2, 0]), (1, &[0, 2])])
    }

    #[test]
    fn sum_of_two_squares() {
        let p = sum_of_squares_2();
        let basis = standard_basis(2, 1, BasisStructure::Plain).unwrap();
        let one = Polynomial::one(2);
        let GramSearch::NumericGram(g) = sos_gram_search(&p, &basis, &one, &SolverOptions::default()).unwrap() else {
            panic!("expected a Gram matrix");
        };
        assert!(g.residual <= 1e-7);
        // constant row must vanish, the rest is close to the identity
        assert!(g.gram[(0, 0)].abs() < 1e-6);
        assert!((g.gram[(1, 1)] - 1.0).abs() < 1e-6);
        assert!((g.gram[(2, 2)] - 1.0).abs() < 1e-6);
        let cert = round_to_rational(&g.gram, &p, &basis, &one, 64).unwrap().unwrap();
        assert!(verify_gram(&p, &cert).unwrap().valid);
    }

    #[test]
    fn noisy_identity_rounds_to_identity() {
        let p = sum_of_squares_2();
        let basis = MonomialBasis::from_exponents(2, &[&[1, 0], &[0, 1]]).unwrap();
        let noisy = DMatrix::from_row_slice(2, 2, &[1.0 + 1e-9, -1e-9, -1e-9, 1.0 - 1e-9]);
        let cert = round_to_rational(&noisy, &p, &basis, &Polynomial::one(2), 64)
            .unwrap()
            .unwrap();
        assert_eq!(cert.gram, RatMatrix::identity(2));
    }

    #[test]
    fn motzkin_yields_a_separating_ray() {
        let p = motzkin();
        let basis = standard_basis(3, 3, BasisStructure::Homogeneous).unwrap();
        let one = Polynomial::one(3);
        let GramSearch::DualRay(ray) = sos_gram_search(&p, &basis, &one, &SolverOptions::default()).unwrap() else {
            panic!("Motzkin is not a sum of squares");
        };
        assert!(ray.value < 0.0);
        let cert = dual_ray_to_separation(&ray.ray, &ray.ordering, &basis, &p)
            .unwrap()
            .unwrap();
        assert!(verify_separation(&p, &cert).unwrap().valid);
        assert!(
            dual_ray_to_separation(&vec![0.0; ray.ray.len()], &ray.ordering, &basis, &p)
                .unwrap()
                .is_none()
        );
    }

    #[test]
    fn motzkin_near_solution_does_not_round() {
        let p = motzkin();
        let basis = standard_basis(3, 3, BasisStructure::Homogeneous).unwrap();
        let one = Polynomial::one(3);
        // a Gram matrix of Motzkin plus a small multiple of the basis squares
        let shifted = &p
            + &standard_basis(3, 3, BasisStructure::Homogeneous)
                .unwrap()
                .iter()
                .map(|m| Polynomial::from_monomial(m.mul(m), Scalar::new(1.into(), 100.into())))
                .fold(Polynomial::zero(3), |a, b| &a + &b);
        let GramSearch::NumericGram(g) = sos_gram_search(&shifted, &basis, &one, &SolverOptions::default()).unwrap()
        else {
            panic!("shifted Motzkin is a sum of squares");
        };
        assert!(round_to_rational(&g.gram, &p, &basis, &one, 64).unwrap().is_none());
    }

    #[test]
    fn unrepresentable_target() {
        let p = Polynomial::from_int_terms(2, &[(1, &[4, 0])]);
        let basis = standard_basis(2, 1, BasisStructure::Plain).unwrap();
        assert!(matches!(
            sos_gram_search(&p, &basis, &Polynomial::one(2), &SolverOptions::default()),
            Err(Error::Unrepresentable(_))
        ));
    }

    #[test]
    fn gaussian_moments() {
        assert_eq!(gaussian_moment(&Monomial::new(vec![4, 2, 0])), 3);
        assert_eq!(gaussian_moment(&Monomial::new(vec![6, 0])), 15);
        assert_eq!(gaussian_moment(&Monomial::new(vec![1, 1])), 0);
    }

    #[test]
    fn float_pivots() {
        assert!((float_min_pivot(&DMatrix::identity(3, 3)) - 1.0).abs() < 1e-12);
        let indefinite = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(float_min_pivot(&indefinite) < 0.0);
    }
}
