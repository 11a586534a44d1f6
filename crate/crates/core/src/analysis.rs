//! Decision procedures built on the Gram search: sums of squares, sos-matrices,
//! sos-convexity under each witness formulation, multiplier-based convexity
//! certificates and the classification of when the cones coincide.
//!
//! Every definite answer carries an exact certificate that has already been
//! re-verified; numerical trouble surfaces as `Inconclusive`.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::certificates::{
    prune_basis, rational_ldlt, standard_basis, verify_gram, verify_separation, BasisStructure, Definiteness,
    GramCertificate, MonomialBasis, RatMatrix, SeparationCertificate,
};
use crate::error::{Error, Result};
use crate::forms::{build_witness, WitnessKind};
use crate::polynomial::scalar::{int, to_f64};
use crate::polynomial::{Monomial, PolyMatrix, Polynomial, Scalar};
use crate::sdp::{
    dual_ray_to_separation, gaussian_moment, round_to_rational, sos_gram_search, unreachable_terms, GramSearch,
    SolverOptions,
};

#[derive(Debug, Clone, PartialEq)]
pub enum SosStatus {
    CertifiedSos(GramCertificate),
    CertifiedNotSos(SeparationCertificate),
    Inconclusive(String),
}

impl SosStatus {
    pub fn is_sos(&self) -> bool {
        matches!(self, SosStatus::CertifiedSos(_))
    }

    pub fn is_not_sos(&self) -> bool {
        matches!(self, SosStatus::CertifiedNotSos(_))
    }

    pub fn is_certified(&self) -> bool {
        !matches!(self, SosStatus::Inconclusive(_))
    }
}

/// Note attached to multiplier certificates: they prove `σ · yᵀH(x)y ≥ 0`,
/// and convexity follows because `σ` vanishes only on a null set.
pub const MULTIPLIER_NOTE: &str =
    "certifies sigma * y'H(x)y is sos; convexity follows since sigma > 0 off a measure-zero set, by continuity";

#[derive(Debug, Clone, PartialEq)]
pub enum ConvexityStatus {
    /// `witness` is the polynomial the Gram certificate speaks about.
    SosConvex {
        kind: WitnessKind,
        witness: Polynomial,
        certificate: GramCertificate,
    },
    NotSosConvex {
        kind: WitnessKind,
        witness: Polynomial,
        certificate: SeparationCertificate,
    },
    /// `multiplier · yᵀH(x)y` is sos with `multiplier = (Σ_{i∈S} x_i²)^exponent`.
    ConvexNumeric {
        exponent: u32,
        multiplier: Polynomial,
        hessian_form: Polynomial,
        certificate: GramCertificate,
        note: &'static str,
    },
    Inconclusive(String),
}

impl ConvexityStatus {
    pub fn is_sos_convex(&self) -> bool {
        matches!(self, ConvexityStatus::SosConvex { .. })
    }

    pub fn is_not_sos_convex(&self) -> bool {
        matches!(self, ConvexityStatus::NotSosConvex { .. })
    }

    /// Re-checks the carried certificate against its polynomial.
    pub fn reverify(&self) -> Result<bool> {
        Ok(match self {
            ConvexityStatus::SosConvex {
                witness, certificate, ..
            } => verify_gram(witness, certificate)?.valid,
            ConvexityStatus::NotSosConvex {
                witness, certificate, ..
            } => verify_separation(witness, certificate)?.valid,
            ConvexityStatus::ConvexNumeric {
                hessian_form,
                certificate,
                ..
            } => verify_gram(hessian_form, certificate)?.valid,
            ConvexityStatus::Inconclusive(_) => false,
        })
    }
}

/// Knobs shared by the decision procedures.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOptions {
    pub solver: SolverOptions,
    /// Largest number of fractional bits tried when rounding Gram matrices.
    pub max_bits: u32,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            solver: SolverOptions::default(),
            max_bits: 64,
        }
    }
}

fn zero_certificate(basis: &MonomialBasis, multiplier: &Polynomial) -> Result<GramCertificate> {
    let n = basis.len();
    GramCertificate::with_multiplier(basis.clone(), RatMatrix::zeros(n, n), multiplier.clone(), Scalar::one())
}

/// Default basis for a scalar polynomial: homogeneous when `p` is a form.
pub fn default_basis(p: &Polynomial) -> Result<MonomialBasis> {
    let d = p.degree().max(0) as u32;
    let structure = if p.is_homogeneous() && !p.is_zero() {
        BasisStructure::Homogeneous
    } else {
        BasisStructure::Plain
    };
    standard_basis(p.num_vars(), d.div_ceil(2), structure)
}

/// Decides whether `p` is a sum of squares over its default basis.
pub fn is_sos(p: &Polynomial) -> SosStatus {
    is_sos_with(p, &AnalysisOptions::default())
}

pub fn is_sos_with(p: &Polynomial, opts: &AnalysisOptions) -> SosStatus {
    if p.degree() % 2 == 1 {
        return SosStatus::Inconclusive("odd degree, not psd".into());
    }
    match default_basis(p) {
        Ok(basis) => certify_over(p, &basis, &Polynomial::one(p.num_vars()), opts),
        Err(e) => SosStatus::Inconclusive(e.to_string()),
    }
}

/// Decides whether `multiplier · p` is a sum of squares of polynomials spanned by `basis`.
///
/// `basis` must contain every monomial that can occur in a decomposition for
/// a "not sos" verdict to mean "not sos" outright; the separation certificate
/// itself always refers to the full `basis`.
pub fn certify_over(
    p: &Polynomial,
    basis: &MonomialBasis,
    multiplier: &Polynomial,
    opts: &AnalysisOptions,
) -> SosStatus {
    match certify_inner(p, basis, multiplier, opts) {
        Ok(s) => s,
        Err(e) => SosStatus::Inconclusive(e.to_string()),
    }
}

fn certify_inner(
    p: &Polynomial,
    basis: &MonomialBasis,
    multiplier: &Polynomial,
    opts: &AnalysisOptions,
) -> Result<SosStatus> {
    let target = p.try_mul(multiplier)?;
    if target.is_zero() {
        return Ok(SosStatus::CertifiedSos(zero_certificate(basis, multiplier)?));
    }
    let (pruned, removed) = prune_basis(basis, &target);
    let missing = unreachable_terms(&pruned, &target);
    if !missing.is_empty() {
        log::debug!("{} target monomials unreachable after pruning", missing.len());
        let mut values: BTreeMap<Monomial, Scalar> =
            pruned.products().into_iter().map(|m| (m, Scalar::zero())).collect();
        for m in &missing {
            let c = target.coefficient(m);
            values.insert(m.clone(), if c.is_positive() { -Scalar::one() } else { Scalar::one() });
        }
        return finish_separation(values, &pruned, &removed, basis, &target);
    }
    if pruned.is_empty() {
        // nothing survives but the target is nonzero: every monomial is unreachable
        return Err(Error::Numerical("empty basis with nonzero target".into()));
    }
    match sos_gram_search(p, &pruned, multiplier, &opts.solver)? {
        GramSearch::NumericGram(g) => match round_to_rational(&g.gram, p, &pruned, multiplier, opts.max_bits)? {
            Some(cert) => Ok(SosStatus::CertifiedSos(cert)),
            None => Ok(SosStatus::Inconclusive(format!(
                "numerical Gram matrix found (residual {:.1e}) but rounding did not give an exactly PSD matrix",
                g.residual
            ))),
        },
        GramSearch::DualRay(ray) => {
            let Some(cert) = dual_ray_to_separation(&ray.ray, &ray.ordering, &pruned, &target)? else {
                return Ok(SosStatus::Inconclusive(format!(
                    "dual ray found (value {:.1e}) but rounding broke the separation",
                    ray.value
                )));
            };
            let values = cert.ordering.iter().cloned().zip(cert.dual.iter().cloned()).collect();
            finish_separation(values, &pruned, &removed, basis, &target)
        }
    }
}

fn functional_pairing(values: &BTreeMap<Monomial, Scalar>, t: &Polynomial) -> Scalar {
    t.terms()
        .map(|(m, c)| values.get(m).map_or_else(Scalar::zero, |v| v * c))
        .sum()
}

fn moment_of(values: &BTreeMap<Monomial, Scalar>, basis: &[Monomial]) -> RatMatrix {
    let n = basis.len();
    let mut m = RatMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = values
                .get(&basis[i].mul(&basis[j]))
                .cloned()
                .unwrap_or_else(Scalar::zero);
            m.set(i, j, v.clone());
            m.set(j, i, v);
        }
    }
    m
}

/// Turns a functional valid for the pruned basis into one for the full basis.
///
/// The moment matrix is first made positive definite by mixing in a small
/// multiple of the Gaussian moments. Dropped monomials are then restored in
/// reverse order: the square of each is a coordinate nothing else touches and
/// that the target does not contain, so it can be set to any value above
/// `bᵀM⁻¹b`, which keeps the enlarged moment matrix positive definite without
/// moving the pairing. The bound is taken from floating point with a safety
/// factor; the exact check at the end decides.
fn finish_separation(
    mut values: BTreeMap<Monomial, Scalar>,
    pruned: &MonomialBasis,
    removed: &[Monomial],
    full: &MonomialBasis,
    target: &Polynomial,
) -> Result<SosStatus> {
    let pairing = functional_pairing(&values, target);
    if !pairing.is_negative() {
        return Ok(SosStatus::Inconclusive("functional does not separate".into()));
    }
    let base: Vec<Monomial> = pruned.monomials().to_vec();
    if !base.is_empty() && rational_ldlt(&moment_of(&values, &base))?.status != Definiteness::PositiveDefinite {
        let gauss: BTreeMap<Monomial, Scalar> = values.keys().map(|m| (m.clone(), int(gaussian_moment(m)))).collect();
        let gp = functional_pairing(&gauss, target);
        let eps = if gp.is_positive() {
            -&pairing / (gp * int(2))
        } else {
            Scalar::one()
        };
        for (m, v) in values.iter_mut() {
            *v += &gauss[m] * &eps;
        }
    }
    for safety in [2.0, 64.0, 4096.0] {
        let mut values = values.clone();
        let mut current = base.clone();
        for z in removed.iter().rev() {
            let b: Vec<f64> = current
                .iter()
                .map(|w| {
                    let prod = z.mul(w);
                    let v = values.entry(prod.clone()).or_insert_with(|| {
                        let c = target.coefficient(&prod);
                        if c.is_positive() {
                            -Scalar::one()
                        } else if c.is_negative() {
                            Scalar::one()
                        } else {
                            Scalar::zero()
                        }
                    });
                    to_f64(v)
                })
                .collect();
            let square = z.mul(z);
            if values.contains_key(&square) || !target.coefficient(&square).is_zero() {
                return Err(Error::Numerical(format!(
                    "square of {} is not a free coordinate",
                    z.tuple_text()
                )));
            }
            let quad = if current.is_empty() {
                0.0
            } else {
                let m = moment_of(&values, &current).to_f64();
                let b = nalgebra::DVector::from_vec(b);
                let x = m
                    .clone()
                    .cholesky()
                    .map(|c| c.solve(&b))
                    .or_else(|| m.lu().solve(&b))
                    .ok_or_else(|| Error::Numerical("moment matrix became singular".into()))?;
                b.dot(&x).abs()
            };
            let diag = (safety * quad + 1.0).ceil();
            let diag = Scalar::from_float(diag).ok_or_else(|| Error::Numerical("moment bound overflowed".into()))?;
            values.insert(square, diag);
            current.push(z.clone());
        }
        for m in full.products() {
            values.entry(m).or_insert_with(Scalar::zero);
        }
        let (ordering, dual): (Vec<Monomial>, Vec<Scalar>) = values.into_iter().unzip();
        let ordering = MonomialBasis::new(full.num_vars(), ordering)?;
        let cert = SeparationCertificate::new(ordering, dual, full.clone())?;
        if verify_separation(target, &cert)?.valid {
            return Ok(SosStatus::CertifiedNotSos(cert));
        }
    }
    Ok(SosStatus::Inconclusive(
        "extended functional failed exact verification".into(),
    ))
}

fn bipartite_basis(x_vars: usize, y_vars: usize, x_half: u32, x_homogeneous: bool) -> Result<MonomialBasis> {
    standard_basis(
        x_vars + y_vars,
        x_half + 1,
        BasisStructure::BipartiteYLinear {
            x_vars,
            y_vars,
            x_homogeneous,
        },
    )
}

fn matrix_shape(u: &PolyMatrix) -> (u32, bool) {
    let mut max = 0i64;
    let mut degrees = std::collections::BTreeSet::new();
    let mut homogeneous = true;
    for i in 0..u.dim() {
        for j in i..u.dim() {
            let e = u.get(i, j);
            if e.is_zero() {
                continue;
            }
            max = max.max(e.degree());
            degrees.insert(e.degree());
            homogeneous &= e.is_homogeneous();
        }
    }
    ((max.max(0) as u32).div_ceil(2), homogeneous && degrees.len() <= 1)
}

/// Decides whether `U` is an sos-matrix through `yᵀU(x)y` and the y-linear basis.
pub fn is_sos_matrix(u: &PolyMatrix) -> SosStatus {
    is_sos_matrix_with(u, &AnalysisOptions::default())
}

pub fn is_sos_matrix_with(u: &PolyMatrix, opts: &AnalysisOptions) -> SosStatus {
    let t = u.quadratic_form();
    let (half, homogeneous) = matrix_shape(u);
    match bipartite_basis(u.num_vars(), u.dim(), half, homogeneous) {
        Ok(basis) => certify_over(&t, &basis, &Polynomial::one(t.num_vars()), opts),
        Err(e) => SosStatus::Inconclusive(e.to_string()),
    }
}

/// `g(x, x + u)` for a witness in `(x, y)`: the translated witness vanishes to
/// second order in `u`, which lets pruning discard every pure-`x` monomial.
fn translated(witness: &Polynomial, split: usize) -> Result<Polynomial> {
    let n = 2 * split;
    let assign: Vec<Polynomial> = (0..n)
        .map(|i| {
            if i < split {
                Polynomial::var(n, i)
            } else {
                &Polynomial::var(n, i - split) + &Polynomial::var(n, i)
            }
        })
        .collect();
    witness.substitute(&assign)
}

/// Decides sos-convexity of `p` with the chosen witness polynomial.
///
/// The second-order witness is `yᵀH(x)y` over the y-linear basis. The other
/// two are decided in the translated coordinates `(x, u) = (x, y - x)`, so
/// their certificates refer to the translated witness.
pub fn is_sos_convex(p: &Polynomial, kind: &WitnessKind) -> ConvexityStatus {
    is_sos_convex_with(p, kind, &AnalysisOptions::default())
}

pub fn is_sos_convex_with(p: &Polynomial, kind: &WitnessKind, opts: &AnalysisOptions) -> ConvexityStatus {
    match sos_convex_inner(p, kind, opts) {
        Ok(s) => s,
        Err(e) => ConvexityStatus::Inconclusive(e.to_string()),
    }
}

fn sos_convex_inner(p: &Polynomial, kind: &WitnessKind, opts: &AnalysisOptions) -> Result<ConvexityStatus> {
    let d = p.degree();
    if d >= 3 && d % 2 == 1 {
        return Ok(ConvexityStatus::Inconclusive("odd degree, not convex".into()));
    }
    let n = p.num_vars();
    let homogeneous = p.is_homogeneous();
    let (witness, basis) = match kind {
        WitnessKind::SecondOrder => {
            let w = build_witness(p, kind)?.into_polynomial();
            let half = ((d - 2).max(0) as u32) / 2;
            (w, bipartite_basis(n, n, half, homogeneous)?)
        }
        WitnessKind::Midpoint(_) | WitnessKind::FirstOrder => {
            let w = translated(build_witness(p, kind)?.polynomial(), n)?;
            let structure = if homogeneous && !w.is_zero() {
                BasisStructure::Homogeneous
            } else {
                BasisStructure::Plain
            };
            let half = (d.max(0) as u32).div_ceil(2);
            (w, standard_basis(2 * n, half, structure)?)
        }
    };
    let one = Polynomial::one(witness.num_vars());
    Ok(match certify_over(&witness, &basis, &one, opts) {
        SosStatus::CertifiedSos(certificate) => ConvexityStatus::SosConvex {
            kind: kind.clone(),
            witness,
            certificate,
        },
        SosStatus::CertifiedNotSos(certificate) => ConvexityStatus::NotSosConvex {
            kind: kind.clone(),
            witness,
            certificate,
        },
        SosStatus::Inconclusive(why) => ConvexityStatus::Inconclusive(why),
    })
}

fn subsets_by_size(n: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = (1u32..(1 << n))
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    all
}

/// `(Σ_{i ∈ support} x_i²)^exponent` embedded in `num_vars` variables.
pub fn variable_square_multiplier(num_vars: usize, support: &[usize], exponent: u32) -> Polynomial {
    let base = support.iter().fold(Polynomial::zero(num_vars), |acc, &i| {
        let x = Polynomial::var(num_vars, i);
        &acc + &(&x * &x)
    });
    base.pow(exponent)
}

/// Certifies convexity through `σ · yᵀH(x)y` being sos, trying `σ = 1` and
/// then `(Σ_{i∈S} x_i²)^r` for growing supports `S` and `r = 1..=max_r`.
pub fn check_convexity_multiplier(p: &Polynomial, max_r: u32) -> ConvexityStatus {
    check_convexity_multiplier_with(p, max_r, &AnalysisOptions::default())
}

pub fn check_convexity_multiplier_with(p: &Polynomial, max_r: u32, opts: &AnalysisOptions) -> ConvexityStatus {
    let n = p.num_vars();
    let mut candidates = vec![(0u32, Vec::new())];
    for r in 1..=max_r {
        candidates.extend(subsets_by_size(n).into_iter().map(|s| (r, s)));
    }
    let mut last = String::from("no multiplier certified");
    for (r, support) in candidates {
        let sigma = variable_square_multiplier(n, &support, r);
        match certify_with_multiplier(p, &sigma, r, opts) {
            Ok(ConvexityStatus::Inconclusive(why)) => last = why,
            Ok(found) => return found,
            Err(e) => last = e.to_string(),
        }
    }
    ConvexityStatus::Inconclusive(last)
}

/// Certifies `σ · yᵀH(x)y` sos for one explicit multiplier `σ` in the x-variables.
pub fn check_convexity_with_multiplier(p: &Polynomial, sigma: &Polynomial, opts: &AnalysisOptions) -> ConvexityStatus {
    let exponent = (sigma.degree().max(0) as u32) / 2;
    certify_with_multiplier(p, sigma, exponent, opts).unwrap_or_else(|e| ConvexityStatus::Inconclusive(e.to_string()))
}

fn certify_with_multiplier(
    p: &Polynomial,
    sigma: &Polynomial,
    exponent: u32,
    opts: &AnalysisOptions,
) -> Result<ConvexityStatus> {
    let n = p.num_vars();
    if sigma.num_vars() != n {
        return Err(Error::VariableMismatch {
            left: sigma.num_vars(),
            right: n,
        });
    }
    let d = p.degree();
    if d >= 3 && d % 2 == 1 {
        return Ok(ConvexityStatus::Inconclusive("odd degree, not convex".into()));
    }
    let hessian_form = p.hessian().quadratic_form();
    let multiplier = sigma.embed(2 * n, 0);
    let x_degree = (d - 2).max(0) + sigma.degree().max(0);
    let homogeneous = p.is_homogeneous() && sigma.is_homogeneous();
    let basis = bipartite_basis(n, n, (x_degree as u32).div_ceil(2), homogeneous)?;
    log::debug!(
        "multiplier {} with basis of {}",
        sigma.display_with(&crate::polynomial::default_names(n)),
        basis.len()
    );
    Ok(match certify_over(&hessian_form, &basis, &multiplier, opts) {
        SosStatus::CertifiedSos(certificate) => ConvexityStatus::ConvexNumeric {
            exponent,
            multiplier,
            hessian_form,
            certificate,
            note: MULTIPLIER_NOTE,
        },
        SosStatus::CertifiedNotSos(_) => {
            ConvexityStatus::Inconclusive("multiplied Hessian form is not sos for this multiplier".into())
        }
        SosStatus::Inconclusive(why) => ConvexityStatus::Inconclusive(why),
    })
}

/// Every principal minor with its sos status, by size and then lexicographically.
pub fn principal_minors_sos(u: &PolyMatrix) -> Vec<(Vec<usize>, SosStatus)> {
    principal_minors_sos_with(u, &AnalysisOptions::default())
}

pub fn principal_minors_sos_with(u: &PolyMatrix, opts: &AnalysisOptions) -> Vec<(Vec<usize>, SosStatus)> {
    subsets_by_size(u.dim())
        .into_iter()
        .map(|s| {
            let minor = u.principal_submatrix(&s).determinant();
            let status = is_sos_with(&minor, opts);
            (s, status)
        })
        .collect()
}

/// Whether two cones coincide for a given number of variables and degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Relation {
    Equal,
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Classification {
    /// Nonnegative versus sum of squares.
    pub psd_vs_sos: Relation,
    /// Convex versus sos-convex.
    pub convex_vs_sos_convex: Relation,
}

/// Table lookup for when nonnegativity equals sos and convexity equals
/// sos-convexity, for polynomials or (with `homogeneous`) forms.
///
/// Polynomials: equality iff `n = 1`, `d = 2` or `(n, d) = (2, 4)`.
/// Forms: equality iff `n <= 2`, `d = 2` or `(n, d) = (3, 4)`.
pub fn classify(n: usize, d: u32, homogeneous: bool) -> Result<Classification> {
    if d < 2 || d % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "degree must be even and at least 2, got {d}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one variable".into()));
    }
    let equal = if homogeneous {
        n <= 2 || d == 2 || (n, d) == (3, 4)
    } else {
        n == 1 || d == 2 || (n, d) == (2, 4)
    };
    let r = if equal { Relation::Equal } else { Relation::Strict };
    Ok(Classification {
        psd_vs_sos: r,
        convex_vs_sos_convex: r,
    })
}

/// A point `x` and direction `y` with `yᵀH(x)y < 0`, found by exact evaluation
/// on small integer points, showing `p` is not convex.
#[derive(Debug, Clone, PartialEq)]
pub struct NonconvexityWitness {
    pub point: Vec<Scalar>,
    pub direction: Vec<Scalar>,
    pub value: Scalar,
}

/// Searches integer points and directions with coordinates in `-radius..=radius`.
pub fn find_nonconvexity_witness(p: &Polynomial, radius: i64) -> Option<NonconvexityWitness> {
    let n = p.num_vars();
    let form = p.hessian().quadratic_form();
    let side = (2 * radius + 1) as usize;
    let total = side.checked_pow(2 * n as u32)?;
    let mut best: Option<NonconvexityWitness> = None;
    for idx in 0..total {
        let mut k = idx;
        let coords: Vec<Scalar> = (0..2 * n)
            .map(|_| {
                let v = (k % side) as i64 - radius;
                k /= side;
                int(v)
            })
            .collect();
        if coords[n..].iter().all(Zero::is_zero) {
            continue;
        }
        let value = form.evaluate(&coords).ok()?;
        if value.is_negative() && best.as_ref().is_none_or(|b| value < b.value) {
            best = Some(NonconvexityWitness {
                point: coords[..n].to_vec(),
                direction: coords[n..].to_vec(),
                value,
            });
        }
    }
    best
}
