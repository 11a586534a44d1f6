//! Rounding on a face of the PSD cone.
//!
//! When every Gram matrix of the target is singular (a sum of fewer squares
//! than the basis size forces, say) the feasible set has no interior, and
//! rounding plus projection lands slightly outside the cone. Interior point
//! iterates approach such a face only like the square root of their
//! accuracy, so the face is recovered in two steps: a fixed-rank factor
//! `Q = L Lᵀ` is polished by Gauss-Newton with exactly computed residuals,
//! then the range of `L` is brought to reduced row echelon form and each
//! entry snapped to the simplest rational nearby. The Gram matrix is finally
//! sought as `Rᵀ G R`, with `G` from exact linear algebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::gram::GramClasses;
use super::ipm::{Entry, StandardForm};
use super::SolverOptions;
use crate::certificates::{rational_ldlt, verify_gram, GramCertificate, MonomialBasis, RatMatrix};
use crate::error::Result;
use crate::polynomial::scalar::{round_dyadic, to_f64};
use crate::polynomial::{Polynomial, Scalar};

const RANK_TOLERANCES: [f64; 4] = [1e-5, 1e-6, 1e-7, 1e-8];
/// Snapping tolerances, as negative powers of ten. A denominator `D` is only
/// recovered when the tolerance sits between the factor's accuracy and
/// `1/(2D²)`, so every digit count in the range is tried.
const SNAP_DIGITS: std::ops::RangeInclusive<u32> = 6..=36;
const FREE_BITS: [u32; 4] = [16, 24, 32, 48];
const FLOAT_STEPS: usize = 30;
const EXACT_STEPS: usize = 260;
/// Relative residual at which fixed-point refinement stops.
const FIXED_RESIDUAL: f64 = 1e-90;
/// Bound on `classes² · entries of L`, the cost of one fixed-point step.
const FIXED_WORK_LIMIT: usize = 4_000_000;
/// Largest weight `10^LATTICE_DIGITS` on the complement in lattice reduction.
const LATTICE_DIGITS: usize = 40;
const LATTICE_MAX_DIM: usize = 40;
/// Smallest norm ratio between the last relation and the next reduced
/// vector for the relations to be trusted.
const LATTICE_GAP: f64 = 1e2;

/// The rational with the smallest denominator within `tol` of `x`, taken
/// among the continued fraction convergents of `x`.
pub(crate) fn simplest_within(x: &Scalar, tol: &Scalar) -> Scalar {
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let mut rest = x.clone();
    loop {
        let a = rest.floor().to_integer();
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        let c = Scalar::new(p2.clone(), q2.clone());
        if (x - &c).abs() <= *tol {
            return c;
        }
        let frac = &rest - Scalar::from_integer(a);
        if frac.is_zero() {
            return c;
        }
        rest = frac.recip();
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
}

fn ten_pow_neg(digits: u32) -> Scalar {
    Scalar::new(BigInt::one(), num_traits::pow(BigInt::from(10), digits as usize))
}

/// Solves `A g = b` exactly. Free unknowns take their value from `hint`.
/// Returns `None` if the system is inconsistent.
pub(crate) fn solve_with_hint(mut a: Vec<Vec<Scalar>>, mut b: Vec<Scalar>, hint: &[Scalar]) -> Option<Vec<Scalar>> {
    let cols = hint.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        b.swap(r, p);
        let d = a[r][c].clone();
        for v in a[r].iter_mut() {
            *v = &*v / &d;
        }
        b[r] = &b[r] / &d;
        for i in 0..a.len() {
            if i == r || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in 0..cols {
                let t = &a[r][j] * &f;
                a[i][j] -= t;
            }
            let t = &b[r] * &f;
            b[i] -= t;
        }
        pivots.push(c);
        r += 1;
    }
    if b[r..].iter().any(|v| !v.is_zero()) {
        return None;
    }
    let mut g = hint.to_vec();
    for (row, &c) in pivots.iter().enumerate() {
        let mut v = b[row].clone();
        for j in 0..cols {
            if j != c && !pivots.contains(&j) {
                v -= &a[row][j] * &hint[j];
            }
        }
        g[c] = v;
    }
    Some(g)
}

/// Numerical ranks suggested by gaps in the spectrum of `q`.
fn candidate_ranks(eigenvalues: &[f64]) -> Vec<usize> {
    let top = eigenvalues.iter().cloned().fold(0.0, f64::max);
    let mut out: Vec<usize> = Vec::new();
    for tol in RANK_TOLERANCES {
        let k = eigenvalues.iter().filter(|&&l| l > tol * top).count();
        if k > 0 && k < eigenvalues.len() && !out.contains(&k) {
            out.push(k);
        }
    }
    out
}

/// Tries to find an exact Gram matrix of `target` on the face spanned by the
/// numerical range of `numeric`.
pub(crate) fn round_on_face(
    numeric: &DMatrix<f64>,
    p: &Polynomial,
    target: &Polynomial,
    basis: &MonomialBasis,
    multiplier: &Polynomial,
) -> Result<Option<GramCertificate>> {
    let n = basis.len();
    let eig = SymmetricEigen::new((numeric + numeric.transpose()) * 0.5);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    let classes = GramClasses::new(basis, target)?;
    for k in candidate_ranks(&values) {
        let start = DMatrix::from_fn(n, k, |i, a| eig.eigenvectors[(i, order[a])] * values[order[a]].sqrt());
        let Some((factor, residual)) = refine_factor(start, &classes, target) else {
            continue;
        };
        let gram = DMatrix::from_fn(n, n, |i, j| {
            (0..k)
                .map(|a| to_f64(factor.get(i, a)) * to_f64(factor.get(j, a)))
                .sum::<f64>()
        });
        let transposed = RatMatrix::from_fn(k, n, |a, i| factor.get(i, a).clone());
        let (echelon, pivots) = rational_rref(transposed);
        if pivots.len() != k {
            continue;
        }
        let mut tried: Vec<RatMatrix> = Vec::new();
        for digits in SNAP_DIGITS.rev() {
            let rows = snap_rows(&echelon, &pivots, &ten_pow_neg(digits));
            if tried.contains(&rows) {
                continue;
            }
            if let Some(estimate) = inner_estimate(&rows, &gram) {
                if let Some(cert) = solve_on_face(&rows, &estimate, p, target, basis, multiplier)? {
                    log::debug!("gram rounded on a face of rank {k} (snapped to 1e-{digits})");
                    return Ok(Some(cert));
                }
            }
            tried.push(rows);
        }
        // The numerical face may be irrational; rational Gram matrices then
        // live on the face of the largest rational subspace of its range.
        // the range is accurate to about the square root of the residual
        let digits = ((-residual.log10() / 2.0).floor() as usize)
            .saturating_sub(2)
            .min(LATTICE_DIGITS);
        let Some(rows) = rational_subspace(&echelon, &pivots, digits) else {
            continue;
        };
        log::debug!(
            "rational subspace of dimension {} in a numerical face of rank {k}",
            rows.rows()
        );
        if let Some(estimate) = face_gram_search(&rows, basis, target)? {
            if let Some(cert) = solve_on_face(&rows, &estimate, p, target, basis, multiplier)? {
                log::debug!("gram rounded on a rational face of rank {}", rows.rows());
                return Ok(Some(cert));
            }
        }
    }
    Ok(None)
}

/// Polynomials `w_a = Σ_i rows[a][i] z_i` spanning a face.
fn face_polynomials(rows: &RatMatrix, basis: &MonomialBasis) -> Vec<Polynomial> {
    (0..rows.rows())
        .map(|a| {
            let mut poly = Polynomial::zero(basis.num_vars());
            for i in 0..rows.cols() {
                if !rows.get(a, i).is_zero() {
                    poly.add_term(basis.get(i).clone(), rows.get(a, i).clone());
                }
            }
            poly
        })
        .collect()
}

/// Numerical Gram search over the polynomial basis `w` of a face, by the
/// same shifted formulation as the monomial search.
fn face_gram_search(rows: &RatMatrix, basis: &MonomialBasis, target: &Polynomial) -> Result<Option<DMatrix<f64>>> {
    let w = face_polynomials(rows, basis);
    let k = w.len();
    let mut products: Vec<((usize, usize), Polynomial)> = Vec::new();
    for a in 0..k {
        for b in a..k {
            products.push(((a, b), w[a].try_mul(&w[b])?));
        }
    }
    let mut monomials: Vec<_> = target.terms().map(|(m, _)| m.clone()).collect();
    for (_, prod) in &products {
        monomials.extend(prod.terms().map(|(m, _)| m.clone()));
    }
    monomials.sort();
    monomials.dedup();
    let kappa = target
        .terms()
        .map(|(_, c)| to_f64(c).abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut a = Vec::with_capacity(monomials.len());
    for m in &monomials {
        let mut entries: Vec<Entry> = Vec::new();
        let mut identity = 0.0;
        for (&(x, y), prod) in products.iter().map(|(i, p)| (i, p)) {
            let c = to_f64(&prod.coefficient(m));
            if c == 0.0 {
                continue;
            }
            entries.push(Entry {
                block: 0,
                row: x,
                col: y,
                value: c,
            });
            if x == y {
                identity += c;
            }
        }
        if identity != 0.0 {
            entries.push(Entry {
                block: 1,
                row: 0,
                col: 0,
                value: -identity,
            });
        }
        a.push(entries);
    }
    let sf = StandardForm {
        dims: vec![k, 1],
        a,
        b: monomials
            .iter()
            .map(|m| to_f64(&target.coefficient(m)) / kappa)
            .collect(),
        c: vec![Entry {
            block: 1,
            row: 0,
            col: 0,
            value: 1.0,
        }],
    };
    let r = super::run_ipm(&sf, &SolverOptions::default())?;
    log::debug!(
        "face gram search: rank {k}, shift {:.1e}, {} iterations",
        r.x[1][(0, 0)],
        r.iterations
    );
    Ok((r.x[1][(0, 0)].abs() < 1e-6).then(|| &r.x[0] * kappa))
}

/// Exact nullspace basis of a reduced matrix with unit columns at `pivots`.
fn nullspace(rref: &RatMatrix, pivots: &[usize]) -> RatMatrix {
    let n = rref.cols();
    let free: Vec<usize> = (0..n).filter(|i| !pivots.contains(i)).collect();
    RatMatrix::from_fn(free.len(), n, |row, i| {
        if i == free[row] {
            Scalar::one()
        } else if let Some(a) = pivots.iter().position(|&pc| pc == i) {
            -rref.get(a, free[row]).clone()
        } else {
            Scalar::zero()
        }
    })
}

/// Integer vectors in the row space of `echelon` found by lattice
/// reduction, in reduced echelon form. Vectors `v` with `K v ≈ 0` for the
/// exact complement `K` are short in the lattice spanned by `(e_i, C·K e_i)`.
fn rational_subspace(echelon: &RatMatrix, pivots: &[usize], digits: usize) -> Option<RatMatrix> {
    let n = echelon.cols();
    let kernel = nullspace(echelon, pivots);
    if kernel.rows() == 0 || n > LATTICE_MAX_DIM {
        return None;
    }
    let weight = Scalar::from_integer(num_traits::pow(BigInt::from(10), digits));
    let norms: Vec<Scalar> = (0..kernel.rows())
        .map(|r| (0..n).map(|i| kernel.get(r, i).abs()).max().unwrap_or_else(Scalar::one))
        .collect();
    let lattice: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let mut v = vec![BigInt::zero(); n];
            v[i] = BigInt::one();
            v.extend((0..kernel.rows()).map(|r| (kernel.get(r, i) / &norms[r] * &weight).round().to_integer()));
            v
        })
        .collect();
    let reduced = lattice::lll(lattice);
    let mut by_norm: Vec<(f64, Vec<BigInt>)> = reduced
        .into_iter()
        .map(|v| {
            (
                v.iter()
                    .map(|x| fixed::to_f64(&(x << fixed::BITS)).powi(2))
                    .sum::<f64>()
                    .sqrt(),
                v,
            )
        })
        .collect();
    by_norm.sort_by(|a, b| a.0.total_cmp(&b.0));
    // relations are the vectors before the largest jump in norm
    let (cut, gap) = (1..by_norm.len())
        .map(|i| (i, by_norm[i].0 / by_norm[i - 1].0.max(1.0)))
        .fold((0, 0.0), |best, c| if c.1 > best.1 { c } else { best });
    if gap < LATTICE_GAP {
        return None;
    }
    let found: Vec<Vec<Scalar>> = by_norm[..cut]
        .iter()
        .map(|(_, v)| v[..n].iter().map(|x| Scalar::from_integer(x.clone())).collect())
        .collect();
    if found.is_empty() {
        return None;
    }
    let rows = found.len();
    let (reduced, found_pivots) = rational_rref(RatMatrix::from_fn(rows, n, |a, i| found[a][i].clone()));
    let r = found_pivots.len();
    Some(RatMatrix::from_fn(r, n, |a, i| reduced.get(a, i).clone()))
}

/// Lattice basis reduction with exact rational Gram-Schmidt data.
mod lattice {
    use num_bigint::BigInt;
    use num_traits::{Signed, Zero};

    use crate::polynomial::Scalar;

    /// LLL with parameter 3/4 on linearly independent rows.
    pub fn lll(mut b: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
        let n = b.len();
        if n < 2 {
            return b;
        }
        let mut mu = vec![vec![Scalar::zero(); n]; n];
        let mut norms = vec![Scalar::zero(); n];
        let mut star: Vec<Vec<Scalar>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut v: Vec<Scalar> = b[i].iter().map(|x| Scalar::from_integer(x.clone())).collect();
            for j in 0..i {
                let num: Scalar = b[i]
                    .iter()
                    .zip(&star[j])
                    .map(|(x, s)| s * Scalar::from_integer(x.clone()))
                    .sum();
                mu[i][j] = num / &norms[j];
                for (vt, st) in v.iter_mut().zip(&star[j]) {
                    *vt -= &mu[i][j] * st;
                }
            }
            norms[i] = v.iter().map(|x| x * x).sum();
            star.push(v);
        }
        let half = Scalar::new(1.into(), 2.into());
        let three_quarters = Scalar::new(3.into(), 4.into());
        let reduce = |b: &mut Vec<Vec<BigInt>>, mu: &mut Vec<Vec<Scalar>>, k: usize, l: usize| {
            if mu[k][l].abs() <= half {
                return;
            }
            let q = mu[k][l].round();
            let qi = q.to_integer();
            let row_l = b[l].clone();
            for (x, y) in b[k].iter_mut().zip(&row_l) {
                *x -= &qi * y;
            }
            mu[k][l] -= &q;
            for i in 0..l {
                let t = &q * &mu[l][i];
                mu[k][i] -= t;
            }
        };
        let mut k = 1;
        let mut guard = 0usize;
        while k < n {
            guard += 1;
            if guard > 100_000 {
                break;
            }
            reduce(&mut b, &mut mu, k, k - 1);
            let lovasz = (&three_quarters - &mu[k][k - 1] * &mu[k][k - 1]) * &norms[k - 1];
            if norms[k] < lovasz {
                let m = mu[k][k - 1].clone();
                let big = &norms[k] + &m * &m * &norms[k - 1];
                b.swap(k, k - 1);
                for j in 0..k - 1 {
                    let t = mu[k][j].clone();
                    mu[k][j] = mu[k - 1][j].clone();
                    mu[k - 1][j] = t;
                }
                mu[k][k - 1] = &m * &norms[k - 1] / &big;
                norms[k] = &norms[k - 1] * &norms[k] / &big;
                norms[k - 1] = big;
                for i in k + 1..n {
                    let t = mu[i][k].clone();
                    mu[i][k] = &mu[i][k - 1] - &m * &t;
                    mu[i][k - 1] = t + &mu[k][k - 1] * &mu[i][k];
                }
                k = (k - 1).max(1);
            } else {
                for l in (0..k - 1).rev() {
                    reduce(&mut b, &mut mu, k, l);
                }
                k += 1;
            }
        }
        b
    }

}

fn jacobian(l: &DMatrix<f64>, classes: &GramClasses) -> DMatrix<f64> {
    let (n, k) = l.shape();
    let mut jac = DMatrix::zeros(classes.pairs.len(), n * k);
    for (m, pairs) in classes.pairs.iter().enumerate() {
        for &(i, j) in pairs {
            // d(L_ia L_ja)/dL: the diagonal counts once, off-diagonal pairs twice
            let w = if i == j { 1.0 } else { 2.0 };
            for a in 0..k {
                jac[(m, i * k + a)] += w * l[(j, a)];
                jac[(m, j * k + a)] += w * l[(i, a)];
            }
        }
    }
    jac
}

/// Gauss-Newton on `L Lᵀ` matching the target coefficients with `L` of fixed
/// rank, first in floating point and then in fixed point. Near the face the
/// Jacobian loses rank along the tilt of the range, which caps floating
/// point at a residual around `1e-30` and a range accurate to about `1e-15`;
/// the fixed-point phase removes that floor. Returns the factor with its
/// relative residual, or `None` if the residual does not become negligible.
fn refine_factor(mut l: DMatrix<f64>, classes: &GramClasses, target: &Polynomial) -> Option<(RatMatrix, f64)> {
    let (n, k) = l.shape();
    let b: Vec<Scalar> = classes.ordering.iter().map(|m| target.coefficient(m)).collect();
    let bf: Vec<f64> = b.iter().map(to_f64).collect();
    let scale = bf.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    let float_residual = |l: &DMatrix<f64>| {
        let q = l * l.transpose();
        DVector::from_iterator(
            bf.len(),
            classes.pairs.iter().zip(&bf).map(|(pairs, bm)| {
                pairs
                    .iter()
                    .map(|&(i, j)| if i == j { q[(i, j)] } else { 2.0 * q[(i, j)] })
                    .sum::<f64>()
                    - bm
            }),
        )
    };
    let mut r = float_residual(&l);
    for _ in 0..FLOAT_STEPS {
        if r.amax() <= 1e-14 * scale {
            break;
        }
        let step = jacobian(&l, classes).svd(true, true).solve(&r, 1e-13).ok()?;
        let next = DMatrix::from_fn(n, k, |i, a| l[(i, a)] - step[i * k + a]);
        let next_r = float_residual(&next);
        if next_r.amax() >= r.amax() {
            break;
        }
        l = next;
        r = next_r;
    }
    if r.amax() > 1e-9 * scale {
        return None;
    }
    let m = classes.pairs.len();
    if m * m * n * k > FIXED_WORK_LIMIT {
        return None;
    }
    let mut lx: Vec<BigInt> = l.iter().map(|v| fixed::from_f64(*v)).collect::<Option<_>>()?;
    // nalgebra is column-major: entry (i, a) sits at a * n + i
    let at = |i: usize, a: usize| a * n + i;
    let bx: Vec<BigInt> = b.iter().map(fixed::from_scalar).collect();
    let residual_of = |lx: &[BigInt]| -> Vec<BigInt> {
        classes
            .pairs
            .iter()
            .zip(&bx)
            .map(|(pairs, bm)| {
                let mut acc = -bm.clone();
                for &(i, j) in pairs {
                    let w = if i == j { 1 } else { 2 };
                    for a in 0..k {
                        acc += fixed::mul(&lx[at(i, a)], &lx[at(j, a)]) * w;
                    }
                }
                acc
            })
            .collect()
    };
    let size_of = |r: &[BigInt]| r.iter().map(|v| fixed::to_f64(v).abs()).fold(0.0, f64::max);
    let mut residual = residual_of(&lx);
    let mut size = size_of(&residual);
    for _ in 0..EXACT_STEPS {
        if size <= FIXED_RESIDUAL * scale {
            break;
        }
        let mut jac = vec![vec![BigInt::zero(); n * k]; m];
        for (row, pairs) in classes.pairs.iter().enumerate() {
            for &(i, j) in pairs {
                let w = if i == j { 1 } else { 2 };
                for a in 0..k {
                    jac[row][at(i, a)] += &lx[at(j, a)] * w;
                    jac[row][at(j, a)] += &lx[at(i, a)] * w;
                }
            }
        }
        let gram: Vec<Vec<BigInt>> = (0..m)
            .map(|p| (0..m).map(|q| fixed::dot(&jac[p], &jac[q])).collect())
            .collect();
        // A plain Gauss-Newton step first; where the Jacobian is singular it
        // can overshoot, and a Levenberg-Marquardt step damped by the
        // residual size is taken instead.
        let damping = residual.iter().map(|v| v.abs()).max().unwrap_or_default();
        let mut improved = None;
        for damp in [BigInt::zero(), damping] {
            let mut normal = gram.clone();
            for (p, row) in normal.iter_mut().enumerate() {
                row[p] += &damp;
            }
            let y = fixed::solve(normal, residual.clone());
            let next: Vec<BigInt> = (0..n * k)
                .map(|c| &lx[c] - (0..m).map(|row| fixed::mul(&jac[row][c], &y[row])).sum::<BigInt>())
                .collect();
            let next_residual = residual_of(&next);
            let next_size = size_of(&next_residual);
            if next_size < size {
                improved = Some((next, next_residual, next_size));
                break;
            }
        }
        let Some((next, next_residual, next_size)) = improved else {
            break;
        };
        lx = next;
        residual = next_residual;
        size = next_size;
    }
    log::debug!("face factor of rank {k}: relative residual {:.1e}", size / scale);
    (size <= 1e-40 * scale).then(|| {
        (
            RatMatrix::from_fn(n, k, |i, a| fixed::to_scalar(&lx[at(i, a)])),
            size / scale,
        )
    })
}

/// Fixed-point numbers `v / 2^BITS` on big integers, for the refinement.
mod fixed {
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::{One, Signed, ToPrimitive, Zero};

    use crate::polynomial::Scalar;

    pub const BITS: usize = 400;

    pub fn from_scalar(x: &Scalar) -> BigInt {
        (x.numer() << BITS).div_floor(x.denom())
    }

    pub fn from_f64(x: f64) -> Option<BigInt> {
        Scalar::from_float(x).map(|s| from_scalar(&s))
    }

    pub fn to_scalar(v: &BigInt) -> Scalar {
        Scalar::new(v.clone(), BigInt::one() << BITS)
    }

    pub fn to_f64(v: &BigInt) -> f64 {
        let shift = v.bits().saturating_sub(60) as usize;
        (v >> shift).to_f64().unwrap_or(0.0) * 2f64.powi(shift as i32 - BITS as i32)
    }

    pub fn mul(a: &BigInt, b: &BigInt) -> BigInt {
        (a * b) >> BITS
    }

    pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
        let raw: BigInt = a.iter().zip(b).map(|(x, y)| x * y).sum();
        raw >> BITS
    }

    /// Gaussian elimination with partial pivoting. Pivots below
    /// `2^-(BITS - 64)` times the largest are treated as zero and their
    /// unknowns set to zero.
    pub fn solve(mut a: Vec<Vec<BigInt>>, mut b: Vec<BigInt>) -> Vec<BigInt> {
        let n = b.len();
        let largest = a.iter().flatten().map(|v| v.abs()).max().unwrap_or_default();
        let floor = &largest >> (BITS - 64);
        let mut pivot_of = vec![None; n];
        let mut used = vec![false; n];
        for c in 0..n {
            let Some(p) = (0..n).filter(|&i| !used[i]).max_by_key(|&i| a[i][c].abs()) else {
                break;
            };
            if a[p][c].abs() <= floor || a[p][c].is_zero() {
                continue;
            }
            used[p] = true;
            pivot_of[c] = Some(p);
            for i in (0..n).filter(|&i| !used[i]) {
                if a[i][c].is_zero() {
                    continue;
                }
                let f = (&a[i][c] << BITS) / &a[p][c];
                for j in c..n {
                    let t = mul(&f, &a[p][j]);
                    a[i][j] -= t;
                }
                let t = mul(&f, &b[p]);
                b[i] -= t;
            }
        }
        let mut x = vec![BigInt::zero(); n];
        for c in (0..n).rev() {
            let Some(p) = pivot_of[c] else { continue };
            let mut v = b[p].clone();
            for j in c + 1..n {
                v -= mul(&a[p][j], &x[j]);
            }
            x[c] = (v << BITS) / &a[p][c];
        }
        x
    }
}

/// Exact reduced row echelon form with complete pivoting. `pivots[a]` is the
/// column reduced to a unit vector by row `a`.
fn rational_rref(mut m: RatMatrix) -> (RatMatrix, Vec<usize>) {
    let (rows, cols) = (m.rows(), m.cols());
    let mut pivots: Vec<usize> = Vec::new();
    for r in 0..rows {
        let mut best: Option<(usize, usize, Scalar)> = None;
        for i in r..rows {
            for j in (0..cols).filter(|j| !pivots.contains(j)) {
                let v = m.get(i, j).abs();
                if best.as_ref().is_none_or(|b| v > b.2) {
                    best = Some((i, j, v));
                }
            }
        }
        let Some((i, c, v)) = best else { break };
        if v.is_zero() {
            break;
        }
        for j in 0..cols {
            let (x, y) = (m.get(r, j).clone(), m.get(i, j).clone());
            m.set(r, j, y);
            m.set(i, j, x);
        }
        let d = m.get(r, c).clone();
        for j in 0..cols {
            let v = m.get(r, j) / &d;
            m.set(r, j, v);
        }
        for i in (0..rows).filter(|&i| i != r) {
            let f = m.get(i, c).clone();
            if f.is_zero() {
                continue;
            }
            for j in 0..cols {
                let v = m.get(i, j) - m.get(r, j) * &f;
                m.set(i, j, v);
            }
        }
        pivots.push(c);
    }
    (m, pivots)
}

/// Snaps the non-pivot entries to multiples of one common denominator,
/// built up entry by entry. In an exact echelon form every entry is a ratio
/// of minors over the pivot block's determinant, so a shared denominator is
/// the natural target and needs far less precision than independent fits.
fn snap_rows(echelon: &RatMatrix, pivots: &[usize], tol: &Scalar) -> RatMatrix {
    let (k, n) = (pivots.len(), echelon.cols());
    let free: Vec<(usize, usize)> = (0..k)
        .flat_map(|a| (0..n).filter(|i| !pivots.contains(i)).map(move |i| (a, i)))
        .collect();
    let mut den = BigInt::one();
    for &(a, i) in &free {
        let d = Scalar::from_integer(den.clone());
        let scaled = echelon.get(a, i) * &d;
        den *= simplest_within(&scaled, &(tol * &d)).denom();
    }
    let d = Scalar::from_integer(den);
    RatMatrix::from_fn(k, n, |a, i| {
        if i == pivots[a] {
            Scalar::one()
        } else if pivots.contains(&i) {
            Scalar::zero()
        } else {
            (echelon.get(a, i) * &d).round() / &d
        }
    })
}

/// Least-squares estimate of `G` in `Q ≈ Rᵀ G R`.
fn inner_estimate(rows: &RatMatrix, q: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let r = DMatrix::from_fn(rows.rows(), rows.cols(), |a, i| to_f64(rows.get(a, i)));
    let left = (&r * r.transpose()).try_inverse()? * &r;
    Some(&left * q * left.transpose())
}

fn solve_on_face(
    rows: &RatMatrix,
    estimate: &DMatrix<f64>,
    p: &Polynomial,
    target: &Polynomial,
    basis: &MonomialBasis,
    multiplier: &Polynomial,
) -> Result<Option<GramCertificate>> {
    let (k, n) = (rows.rows(), rows.cols());
    let w = face_polynomials(rows, basis);
    let unknowns: Vec<(usize, usize)> = (0..k).flat_map(|a| (a..k).map(move |b| (a, b))).collect();
    let two = Scalar::from_integer(2.into());
    let mut products = Vec::with_capacity(unknowns.len());
    for &(a, b) in &unknowns {
        let prod = w[a].try_mul(&w[b])?;
        products.push(if a == b { prod } else { prod.scale(&two) });
    }
    let mut monomials: Vec<_> = target.terms().map(|(m, _)| m.clone()).collect();
    for prod in &products {
        monomials.extend(prod.terms().map(|(m, _)| m.clone()));
    }
    monomials.sort();
    monomials.dedup();
    let a: Vec<Vec<Scalar>> = monomials
        .iter()
        .map(|m| products.iter().map(|prod| prod.coefficient(m)).collect())
        .collect();
    let b: Vec<Scalar> = monomials.iter().map(|m| target.coefficient(m)).collect();
    for bits in FREE_BITS {
        let Some(hint) = unknowns
            .iter()
            .map(|&(x, y)| round_dyadic(estimate[(x, y)], bits))
            .collect::<Option<Vec<_>>>()
        else {
            return Ok(None);
        };
        let Some(g) = solve_with_hint(a.clone(), b.clone(), &hint) else {
            return Ok(None);
        };
        let mut inner = RatMatrix::zeros(k, k);
        for (&(x, y), v) in unknowns.iter().zip(g) {
            inner.set(x, y, v.clone());
            inner.set(y, x, v);
        }
        if (0..k).any(|x| inner.get(x, x).is_negative()) || !rational_ldlt(&inner)?.status.is_psd() {
            continue;
        }
        let q = RatMatrix::from_fn(n, n, |i, j| {
            let mut s = Scalar::zero();
            for x in 0..k {
                if rows.get(x, i).is_zero() {
                    continue;
                }
                for y in 0..k {
                    s += rows.get(x, i) * inner.get(x, y) * rows.get(y, j);
                }
            }
            s
        });
        let cert =
            GramCertificate::with_multiplier(basis.clone(), q, multiplier.clone(), Scalar::from_integer(1.into()))?;
        if verify_gram(p, &cert)?.valid {
            return Ok(Some(cert));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::scalar::ratio;

    #[test]
    fn snapping_finds_simple_fractions() {
        let near_third = ratio(1, 3) + ratio(1, 1_000_000_000);
        assert_eq!(simplest_within(&near_third, &ratio(1, 1_000_000)), ratio(1, 3));
        assert_eq!(simplest_within(&ratio(-5, 2), &ratio(1, 10)), ratio(-5, 2));
        assert_eq!(simplest_within(&ratio(0, 1), &ratio(1, 10)), ratio(0, 1));
        assert_eq!(simplest_within(&ratio(22, 7), &ratio(0, 1)), ratio(22, 7));
    }

    #[test]
    fn hinted_solve_keeps_free_values() {
        // x + y = 3, free y = 1
        let a = vec![vec![ratio(1, 1), ratio(1, 1)]];
        let g = solve_with_hint(a.clone(), vec![ratio(3, 1)], &[ratio(0, 1), ratio(1, 1)]).unwrap();
        assert_eq!(g, vec![ratio(2, 1), ratio(1, 1)]);
        let inconsistent = vec![a[0].clone(), a[0].clone()];
        assert!(solve_with_hint(
            inconsistent,
            vec![ratio(3, 1), ratio(4, 1)],
            &[ratio(0, 1), ratio(0, 1)]
        )
        .is_none());
    }

    #[test]
    fn perfect_square_rounds_on_a_face() {
        // (x1 x2 - x1 + 2 x2 - 1/3)^2 has a rank-one Gram matrix only
        let q = Polynomial::from_int_terms(2, &[(3, &[1, 1]), (-3, &[1, 0]), (6, &[0, 1]), (-1, &[0, 0])])
            .scale(&ratio(1, 3));
        let target = q.pow(2);
        let basis = MonomialBasis::from_exponents(2, &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]).unwrap();
        let c = [-1.0 / 3.0, -1.0, 2.0, 1.0];
        let noisy = DMatrix::from_fn(4, 4, |i, j| c[i] * c[j] + if i == j { 1e-10 } else { 3e-11 });
        let one = Polynomial::one(2);
        let cert = round_on_face(&noisy, &target, &target, &basis, &one)
            .unwrap()
            .expect("rounds");
        assert!(verify_gram(&target, &cert).unwrap().valid);
    }
}
