//! Generators of convex forms that are not sos-convex.
//!
//! A ternary form `m` of degree `d` that is positive definite but not sos
//! becomes the `(1,1)` Hessian entry of
//! `f = ∫₀^{x1}∫₀^s m(t, x2, x3) dt ds + γ g(x2, x3)`. Any sos-matrix has sos
//! principal minors, so `f` is not sos-convex, while a large enough `γ` makes
//! it convex. The convexity is settled by an exact multiplier certificate.

use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{check_convexity_multiplier_with, is_sos_with, AnalysisOptions, ConvexityStatus, SosStatus};
use crate::certificates::SeparationCertificate;
use crate::error::{Error, Result};
use nalgebra::DMatrix;

use crate::polynomial::scalar::{format_scalar, int, parse_scalar, ratio, to_f64, two_pow};
use crate::polynomial::text::{from_canonical, to_canonical};
use crate::polynomial::{motzkin, PolyMatrix, Polynomial, Scalar};

fn check_seed_degree(d: u32) -> Result<()> {
    if d < 6 || d % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "seed degree must be even and at least 6, got {d}"
        )));
    }
    Ok(())
}

fn sum_of_squares(num_vars: usize, indices: std::ops::Range<usize>) -> Polynomial {
    indices.fold(Polynomial::zero(num_vars), |acc, i| {
        let x = Polynomial::var(num_vars, i);
        &acc + &(&x * &x)
    })
}

/// `x1^(d-6) · Motzkin + α (x1² + x2² + x3²)^(d/2)`.
///
/// `α = 0` gives the bare Motzkin part; negative `α` is rejected.
pub fn motzkin_family(d: u32, alpha: &Scalar) -> Result<Polynomial> {
    check_seed_degree(d)?;
    if alpha.is_negative() {
        return Err(Error::InvalidArgument("alpha must be nonnegative".into()));
    }
    let lead = Polynomial::var(3, 0).pow(d - 6);
    let base = &lead * &motzkin();
    Ok(&base + &sum_of_squares(3, 0..3).pow(d / 2).scale(alpha))
}

/// A dyadic `α` making `motzkin_family(d, α)` certifiably not sos.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaSearch {
    pub alpha: Scalar,
    pub seed: Polynomial,
    pub certificate: SeparationCertificate,
    /// Sampled minimum of the seed on the unit sphere; positive for a definite form.
    pub sphere_min: f64,
}

const ALPHA_FLOOR_EXPONENT: u32 = 30;
const ALPHA_REFINEMENTS: u32 = 6;

/// Halves `α` from 1 until the seed is certified not sos, then bisects between
/// the last two dyadics to get the largest certified value within a few steps.
pub fn find_alpha(d: u32) -> Result<AlphaSearch> {
    find_alpha_with(d, &AnalysisOptions::default())
}

pub fn find_alpha_with(d: u32, opts: &AnalysisOptions) -> Result<AlphaSearch> {
    check_seed_degree(d)?;
    let not_sos = |alpha: &Scalar| -> Result<Option<(Polynomial, SeparationCertificate)>> {
        let m = motzkin_family(d, alpha)?;
        let status = is_sos_with(&m, opts);
        log::debug!("alpha {alpha}: {}", status_label(&status));
        Ok(match status {
            SosStatus::CertifiedNotSos(c) => Some((m, c)),
            _ => None,
        })
    };
    let mut upper: Option<Scalar> = None;
    let mut found = None;
    for k in 0..=ALPHA_FLOOR_EXPONENT {
        let alpha = two_pow(k).recip();
        if let Some(hit) = not_sos(&alpha)? {
            found = Some((alpha, hit));
            break;
        }
        upper = Some(alpha);
    }
    let Some((mut lo, (mut seed, mut cert))) = found else {
        return Err(Error::Numerical(format!(
            "no certified non-sos seed down to alpha = 2^-{ALPHA_FLOOR_EXPONENT}"
        )));
    };
    if let Some(mut hi) = upper {
        for _ in 0..ALPHA_REFINEMENTS {
            let mid = (&lo + &hi) / int(2);
            match not_sos(&mid)? {
                Some((m, c)) => {
                    lo = mid;
                    seed = m;
                    cert = c;
                }
                None => hi = mid,
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let sphere_min = sphere_minimum(&seed, 20_000, &mut rng);
    if sphere_min.is_nan() || sphere_min <= 0.0 {
        return Err(Error::Numerical(format!(
            "seed is not positive definite (sampled minimum {sphere_min})"
        )));
    }
    Ok(AlphaSearch {
        alpha: lo,
        seed,
        certificate: cert,
        sphere_min,
    })
}

fn status_label(s: &SosStatus) -> &'static str {
    match s {
        SosStatus::CertifiedSos(_) => "sos",
        SosStatus::CertifiedNotSos(_) => "not sos",
        SosStatus::Inconclusive(_) => "inconclusive",
    }
}

fn sphere_minimum(p: &Polynomial, samples: usize, rng: &mut impl Rng) -> f64 {
    let n = p.num_vars();
    let mut pt = vec![0.0; n];
    let mut best = f64::INFINITY;
    for _ in 0..samples {
        pt.iter_mut().for_each(|v| *v = rng.random::<f64>() * 2.0 - 1.0);
        normalize(&mut pt);
        best = best.min(p.evaluate_f64(&pt));
    }
    best
}

/// The default padding `(x2² + x3²)^((d+2)/2)` as a ternary form.
pub fn default_padding(seed_degree: u32) -> Result<Polynomial> {
    check_seed_degree(seed_degree)?;
    Ok(sum_of_squares(3, 1..3).pow((seed_degree + 2) / 2))
}

/// Inputs and output of the double-integral construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstructionRecipe {
    /// Ternary form of even degree `d >= 6`.
    pub seed: Polynomial,
    /// Form of degree `d + 2` in `x2, x3`, stored over three variables.
    pub padding: Polynomial,
    pub gamma: Scalar,
    pub form: Polynomial,
}

fn padding_in_three(g: &Polynomial) -> Result<Polynomial> {
    match g.num_vars() {
        2 => Ok(g.embed(3, 1)),
        3 if g.degree_in(0..1) <= 0 => Ok(g.clone()),
        3 => Err(Error::InvalidArgument("padding must not involve x1".into())),
        n => Err(Error::VariableMismatch { left: n, right: 3 }),
    }
}

/// `f = ∫₀^{x1}∫₀^s m dt ds + γ g`.
pub fn build_thm58(m: &Polynomial, g: &Polynomial, gamma: &Scalar) -> Result<ConstructionRecipe> {
    if m.num_vars() != 3 {
        return Err(Error::VariableMismatch {
            left: m.num_vars(),
            right: 3,
        });
    }
    if !m.is_zero() && (!m.is_homogeneous() || m.degree() < 6 || m.degree() % 2 == 1) {
        return Err(Error::InvalidArgument(
            "seed must be a ternary form of even degree >= 6".into(),
        ));
    }
    if !gamma.is_positive() {
        return Err(Error::InvalidArgument("gamma must be positive".into()));
    }
    let padding = padding_in_three(g)?;
    if !padding.is_homogeneous() || (!m.is_zero() && padding.degree() != m.degree() + 2) {
        return Err(Error::InvalidArgument(format!(
            "padding must be a form of degree {}",
            m.degree() + 2
        )));
    }
    let form = &m.definite_integral_x1_twice() + &padding.scale(gamma);
    Ok(ConstructionRecipe {
        seed: m.clone(),
        padding,
        gamma: gamma.clone(),
        form,
    })
}

#[derive(serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecipe {
    kind: String,
    seed: String,
    padding: String,
    gamma: String,
    form: String,
}

impl ConstructionRecipe {
    /// JSON with every polynomial in canonical text and `γ` as `"num/den"`.
    pub fn to_json(&self) -> String {
        let raw = RawRecipe {
            kind: "construction".into(),
            seed: to_canonical(&self.seed),
            padding: to_canonical(&self.padding),
            gamma: format_scalar(&self.gamma),
            form: to_canonical(&self.form),
        };
        let mut out = serde_json::to_string_pretty(&raw).expect("plain data serializes");
        out.push('\n');
        out
    }

    /// Parses a recipe and rebuilds `form` from the other fields; a stored
    /// form that disagrees is rejected.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawRecipe = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if raw.kind != "construction" {
            return Err(Error::Parse(format!(
                "expected a construction file, found `{}`",
                raw.kind
            )));
        }
        let rebuilt = build_thm58(
            &from_canonical(&raw.seed)?,
            &from_canonical(&raw.padding)?,
            &parse_scalar(&raw.gamma)?,
        )?;
        if rebuilt.form != from_canonical(&raw.form)? {
            return Err(Error::Parse(
                "stored form does not match seed, padding and gamma".into(),
            ));
        }
        Ok(rebuilt)
    }
}

/// `f(x1, x2, 1)`.
pub fn dehomogenize_construction(recipe: &ConstructionRecipe) -> Polynomial {
    recipe.form.dehomogenize(2, &Scalar::one()).expect("ternary form")
}

/// Sampling controls for the bi-sphere minima.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingOptions {
    pub seed: u64,
    pub samples: usize,
    /// Multiplier applied to the ratio `|β1| / β2`.
    pub safety: f64,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        SamplingOptions {
            seed: 2024,
            samples: 100_000,
            safety: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaEstimate {
    /// Sampled minimum of `yᵀH(x)y` for the double integral of the seed.
    pub beta1: f64,
    /// Sampled minimum of `yᵀH(x)y` for the padding over `(x2, x3)`.
    pub beta2: f64,
    /// Sampled maximum over the unit sphere of the least `γ` that makes the
    /// Hessian of `f` PSD at that point.
    pub requirement: f64,
    pub gamma: Scalar,
}

const PRIMES: [u32; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as f64;
    let mut inv = 1.0 / b;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base as u64) as f64 * inv;
        i /= base as u64;
        inv /= b;
    }
    out
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

/// Minimum of `f` over points produced by `project` from a randomly shifted
/// Halton sequence, followed by local descent from the best few points.
fn sampled_minimum(dim: usize, project: impl Fn(&mut [f64]), f: impl Fn(&[f64]) -> f64, opts: &SamplingOptions) -> f64 {
    assert!(dim <= PRIMES.len());
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let shift: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    let mut best: Vec<(f64, Vec<f64>)> = Vec::new();
    let keep = 8;
    for i in 1..=opts.samples as u64 {
        let mut pt: Vec<f64> = (0..dim)
            .map(|k| ((radical_inverse(i, PRIMES[k]) + shift[k]).fract()) * 2.0 - 1.0)
            .collect();
        project(&mut pt);
        let v = f(&pt);
        if best.len() < keep || v < best[best.len() - 1].0 {
            best.push((v, pt));
            best.sort_by(|a, b| a.0.total_cmp(&b.0));
            best.truncate(keep);
        }
    }
    let mut overall = best.first().map_or(f64::INFINITY, |b| b.0);
    for (mut value, mut pt) in best {
        let mut step = 0.05;
        for _ in 0..400 {
            let mut cand: Vec<f64> = pt
                .iter()
                .map(|x| x + step * (rng.random::<f64>() * 2.0 - 1.0))
                .collect();
            project(&mut cand);
            let v = f(&cand);
            if v < value {
                value = v;
                pt = cand;
            } else {
                step *= 0.97;
            }
        }
        overall = overall.min(value);
    }
    overall
}

/// Minimum of `yᵀH(x)y` over `|x| = |y| = 1`; `split` is the length of `x`.
fn bisphere_minimum(form: &Polynomial, split: usize, opts: &SamplingOptions) -> f64 {
    let project = |pt: &mut [f64]| {
        normalize(&mut pt[..split]);
        normalize(&mut pt[split..]);
    };
    sampled_minimum(form.num_vars(), project, |pt| form.evaluate_f64(pt), opts)
}

fn evaluate_matrix(h: &PolyMatrix, x: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(h.dim(), h.dim(), |i, j| h.get(i, j).evaluate_f64(x))
}

/// Least `γ ≥ 0` with `A + γB ⪰ 0`, where the first row and column of `B`
/// vanish. Infinite when no `γ` works.
fn pointwise_requirement(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let scale = a.amax().max(1.0);
    if a.clone().symmetric_eigen().eigenvalues.min() >= -1e-12 * scale {
        return 0.0;
    }
    let pivot = a[(0, 0)];
    if pivot <= 0.0 {
        return f64::INFINITY;
    }
    let k = a.nrows() - 1;
    let v = a.view((1, 0), (k, 1)).into_owned();
    let schur = a.view((1, 1), (k, k)) - &v * v.transpose() / pivot;
    let Some(chol) = b.view((1, 1), (k, k)).into_owned().cholesky() else {
        return f64::INFINITY;
    };
    let l_inv = match chol.l().try_inverse() {
        Some(m) => m,
        None => return f64::INFINITY,
    };
    let reduced = &l_inv * (-schur) * l_inv.transpose();
    reduced.symmetric_eigen().eigenvalues.max().max(0.0)
}

/// Chooses `γ` from sampled Hessian data, times the safety factor, rounded up
/// to a multiple of 1/16.
///
/// Besides the global ratio `|β1| / β2`, the estimate uses the pointwise
/// requirement: the least `γ` making `H(x)` of the seed's double integral plus
/// `γ` times the padding Hessian PSD at `x`, maximized over the unit sphere.
/// The padding Hessian degenerates on the first axis, so the global ratio
/// alone can be far too small. A seed whose double integral is already convex
/// on the samples gets `γ = 1`.
pub fn find_gamma(m: &Polynomial, g: &Polynomial, opts: &SamplingOptions) -> Result<GammaEstimate> {
    let padding = padding_in_three(g)?;
    let two = padding.substitute(&[Polynomial::zero(2), Polynomial::var(2, 0), Polynomial::var(2, 1)])?;
    let form = two.hessian().quadratic_form();
    let beta2 = bisphere_minimum(&form, 2, opts);
    // a sampled minimum cannot reach an exact zero, so demand a clear margin
    let floor = 1e-6 * to_f64(&form.max_abs_coefficient());
    if beta2.is_nan() || beta2 <= floor {
        return Err(Error::InvalidArgument(format!(
            "padding Hessian is not positive definite (sampled minimum {beta2:e})"
        )));
    }
    if m.is_zero() {
        return Ok(GammaEstimate {
            beta1: 0.0,
            beta2,
            requirement: 0.0,
            gamma: Scalar::one(),
        });
    }
    let integral = m.definite_integral_x1_twice();
    let beta1 = bisphere_minimum(&integral.hessian().quadratic_form(), 3, opts);
    let h_seed = integral.hessian();
    let h_pad = padding.hessian();
    let requirement = -sampled_minimum(
        3,
        normalize,
        |x| -pointwise_requirement(&evaluate_matrix(&h_seed, x), &evaluate_matrix(&h_pad, x)),
        opts,
    );
    if !requirement.is_finite() {
        return Err(Error::InvalidArgument(
            "seed double integral has a non-positive (1,1) Hessian entry; no padding weight helps".into(),
        ));
    }
    let bound = requirement.max(-beta1 / beta2);
    let gamma = if bound <= 0.0 {
        Scalar::one()
    } else {
        let raw = opts.safety * bound;
        let sixteenths =
            Scalar::from_float((raw * 16.0).ceil() + 1.0).ok_or_else(|| Error::Numerical("gamma overflow".into()))?;
        sixteenths * ratio(1, 16)
    };
    Ok(GammaEstimate {
        beta1,
        beta2,
        requirement,
        gamma,
    })
}

/// `p(x1..xn) + x_{n+1}^d`.
pub fn extend_variables(p: &Polynomial, d: u32) -> Result<Polynomial> {
    if d % 2 == 1 || p.degree() != d as i64 {
        return Err(Error::InvalidArgument(format!(
            "extension needs an even degree equal to deg p = {}, got {d}",
            p.degree()
        )));
    }
    let n = p.num_vars() + 1;
    Ok(&p.embed(n, 0) + &Polynomial::var(n, n - 1).pow(d))
}

/// Controls for the whole construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOptions {
    pub sampling: SamplingOptions,
    pub analysis: AnalysisOptions,
    /// Largest multiplier exponent tried when certifying convexity.
    pub max_r: u32,
    /// How many times `γ` may be doubled if certification fails.
    pub gamma_doublings: u32,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            sampling: SamplingOptions::default(),
            analysis: AnalysisOptions::default(),
            max_r: 2,
            gamma_doublings: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Construction {
    pub alpha: AlphaSearch,
    pub estimate: GammaEstimate,
    pub recipe: ConstructionRecipe,
    /// `ConvexNumeric` when the pipeline succeeded.
    pub convexity: ConvexityStatus,
}

/// Seed search, `γ` estimate and exact convexity certificate for one seed degree.
///
/// Returns the last attempt even when certification fails, so callers can
/// report an inconclusive run.
pub fn construct(seed_degree: u32, opts: &PipelineOptions) -> Result<Construction> {
    let alpha = find_alpha_with(seed_degree, &opts.analysis)?;
    let padding = default_padding(seed_degree)?;
    let estimate = find_gamma(&alpha.seed, &padding, &opts.sampling)?;
    let mut gamma = estimate.gamma.clone();
    let mut last = None;
    for attempt in 0..=opts.gamma_doublings {
        let recipe = build_thm58(&alpha.seed, &padding, &gamma)?;
        let convexity = check_convexity_multiplier_with(&recipe.form, opts.max_r, &opts.analysis);
        log::info!(
            "gamma {} (attempt {attempt}): {}",
            gamma,
            if matches!(convexity, ConvexityStatus::ConvexNumeric { .. }) {
                "certified"
            } else {
                "not certified"
            }
        );
        let done = matches!(convexity, ConvexityStatus::ConvexNumeric { .. });
        last = Some((recipe, convexity));
        if done {
            break;
        }
        gamma *= int(2);
    }
    let (recipe, convexity) = last.expect("at least one attempt");
    Ok(Construction {
        alpha,
        estimate,
        recipe,
        convexity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn family_limits_and_expansion() {
        assert_eq!(motzkin_family(6, &Scalar::zero()).unwrap(), motzkin());
        let m8 = motzkin_family(8, &Scalar::one()).unwrap();
        let expected = &(&Polynomial::var(3, 0).pow(2) * &motzkin()) + &sum_of_squares(3, 0..3).pow(4);
        assert_eq!(m8, expected);
        assert!(m8.is_homogeneous());
        assert!(motzkin_family(7, &Scalar::one()).is_err());
        assert!(motzkin_family(4, &Scalar::one()).is_err());
        assert!(motzkin_family(6, &int(-1)).is_err());
    }

    #[test]
    fn family_hessian_at_first_axis_is_positive_diagonal() {
        let e1 = [int(1), int(0), int(0)];
        for d in [6, 8, 10] {
            for alpha in [ratio(1, 64), ratio(1, 3), int(2)] {
                let h = motzkin_family(d, &alpha).unwrap().hessian();
                for i in 0..3 {
                    for j in 0..3 {
                        let v = h.get(i, j).evaluate(&e1).unwrap();
                        if i == j {
                            assert!(v.is_positive(), "d={d} alpha={alpha} ({i},{i})");
                        } else {
                            assert!(v.is_zero());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn recipe_invariants() {
        let m = motzkin_family(6, &ratio(1, 8)).unwrap();
        let g = default_padding(6).unwrap();
        let r = build_thm58(&m, &g, &int(1)).unwrap();
        assert_eq!(r.form.degree(), 8);
        assert!(r.form.is_homogeneous());
        assert_eq!(r.form.hessian().get(0, 0), &m);
        let e1 = [int(1), int(0), int(0)];
        let hm = m.hessian();
        let hf = m.definite_integral_x1_twice().hessian();
        for i in 0..3 {
            for j in 0..3 {
                let lhs = hf.get(i, j).evaluate(&e1).unwrap();
                let rhs = hm.get(i, j).evaluate(&e1).unwrap() / int(30);
                assert_eq!(lhs, rhs);
            }
        }
        let flat = dehomogenize_construction(&r);
        let m_flat = m.dehomogenize(2, &Scalar::one()).unwrap();
        assert_eq!(flat.differentiate(0).unwrap().differentiate(0).unwrap(), m_flat);
        assert!(build_thm58(&m, &g, &int(0)).is_err());
        assert!(build_thm58(&m, &default_padding(8).unwrap(), &int(1)).is_err());
    }

    #[test]
    fn recipe_json_round_trip() {
        let m = motzkin_family(6, &ratio(1, 8)).unwrap();
        let r = build_thm58(&m, &default_padding(6).unwrap(), &ratio(5, 4)).unwrap();
        let text = r.to_json();
        let back = ConstructionRecipe::from_json(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), text);
        let tampered = text.replace("\"5/4\"", "\"3/2\"");
        assert!(ConstructionRecipe::from_json(&tampered).is_err());
        assert!(ConstructionRecipe::from_json("{}").is_err());
    }

    #[test]
    fn zero_seed() {
        let g = default_padding(6).unwrap();
        let est = find_gamma(
            &Polynomial::zero(3),
            &g,
            &SamplingOptions {
                samples: 2000,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(est.gamma, Scalar::one());
        assert!(est.beta2 > 0.0);
        let r = build_thm58(&Polynomial::zero(3), &g, &est.gamma).unwrap();
        assert_eq!(r.form, g);
        let flat = dehomogenize_construction(&r);
        assert_eq!(flat.degree_in(0..1), 0);
    }

    #[test]
    fn gamma_scales_with_seed() {
        let m = motzkin_family(6, &ratio(1, 8)).unwrap();
        let g = default_padding(6).unwrap();
        let opts = SamplingOptions {
            samples: 5000,
            ..Default::default()
        };
        let a = find_gamma(&m, &g, &opts).unwrap();
        let b = find_gamma(&m.scale(&int(2)), &g, &opts).unwrap();
        assert!(a.beta1 < 0.0);
        let ratio = b.beta1 / a.beta1;
        assert!((ratio - 2.0).abs() < 0.05, "{ratio}");
        assert!(a.requirement > 0.0);
        let req = b.requirement / a.requirement;
        assert!((req - 2.0).abs() < 0.1, "{req}");
        assert!(b.gamma > a.gamma);
        assert!(find_gamma(&m, &Polynomial::var(3, 1).pow(8), &opts).is_err());
    }

    #[test]
    fn extension() {
        let p = Polynomial::var(2, 0).pow(4);
        let q = extend_variables(&p, 4).unwrap();
        assert_eq!(q.num_vars(), 3);
        assert!(q.is_homogeneous());
        assert!(extend_variables(&p, 6).is_err());
        let h = q.hessian();
        assert_eq!(h.get(2, 2), &Polynomial::var(3, 2).pow(2).scale(&int(12)));
        assert!(h.get(0, 2).is_zero() && h.get(1, 2).is_zero());
    }
}
