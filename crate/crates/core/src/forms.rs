//! Convexity witness polynomials in the doubled variable set `(x, y)`.
//!
//! A polynomial `p` is convex iff any of these is nonnegative:
//!
//! * `g_λ(x, y) = (1-λ) p(x) + λ p(y) - p((1-λ) x + λ y)`
//! * `g_∇(x, y) = p(y) - p(x) - ∇p(x)ᵀ (y - x)`
//! * `g_∇²(x, y) = yᵀ H(x) y`
//!
//! and sos-convex iff any of them is a sum of squares. The residual functions
//! below expand the algebraic identities linking the three and return the
//! exact difference, which must be the zero polynomial.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::polynomial::scalar::{self, ratio};
use crate::polynomial::{Polynomial, Scalar};

/// Which witness polynomial to test.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum WitnessKind {
    /// `g_λ` for a rational `λ` strictly between 0 and 1.
    Midpoint(Scalar),
    /// `g_∇`.
    FirstOrder,
    /// `g_∇²`; the cheapest, since the Gram basis is linear in `y`.
    #[default]
    SecondOrder,
}

impl WitnessKind {
    pub fn midpoint() -> Self {
        WitnessKind::Midpoint(ratio(1, 2))
    }

    pub fn label(&self) -> String {
        match self {
            WitnessKind::Midpoint(l) => format!("midpoint({})", scalar::display_scalar(l)),
            WitnessKind::FirstOrder => "first-order".into(),
            WitnessKind::SecondOrder => "second-order".into(),
        }
    }
}

/// A polynomial in `2n` variables, `x = (v1..vn)` then `y = (v{n+1}..v{2n})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiPolynomial {
    poly: Polynomial,
    split: usize,
}

impl BiPolynomial {
    pub fn new(poly: Polynomial, split: usize) -> Result<Self> {
        if poly.num_vars() != 2 * split {
            return Err(Error::DimensionMismatch(format!(
                "{} variables cannot split into two blocks of {split}",
                poly.num_vars()
            )));
        }
        Ok(BiPolynomial { poly, split })
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.poly
    }

    pub fn into_polynomial(self) -> Polynomial {
        self.poly
    }

    pub fn split(&self) -> usize {
        self.split
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    /// Swaps the two blocks.
    pub fn swapped(&self) -> BiPolynomial {
        let n = self.split;
        let vars: Vec<Polynomial> = (0..2 * n).map(|i| Polynomial::var(2 * n, (i + n) % (2 * n))).collect();
        BiPolynomial {
            poly: self.poly.substitute(&vars).expect("arity matches"),
            split: n,
        }
    }

    /// Evaluates the `(x, y)` blocks at affine expressions over a common variable set.
    pub fn compose(&self, x: &[Polynomial], y: &[Polynomial]) -> Result<Polynomial> {
        let args: Vec<Polynomial> = x.iter().chain(y).cloned().collect();
        self.poly.substitute(&args)
    }
}

/// Coordinate helpers over `2n` (or `2n + extra`) variables.
fn xs(n: usize, total: usize) -> Vec<Polynomial> {
    (0..n).map(|i| Polynomial::var(total, i)).collect()
}

fn ys(n: usize, total: usize) -> Vec<Polynomial> {
    (0..n).map(|i| Polynomial::var(total, n + i)).collect()
}

fn combine(a: &[Polynomial], wa: &Scalar, b: &[Polynomial], wb: &Scalar) -> Vec<Polynomial> {
    a.iter().zip(b).map(|(u, v)| &u.scale(wa) + &v.scale(wb)).collect()
}

pub fn build_g_lambda(p: &Polynomial, lambda: &Scalar) -> Result<BiPolynomial> {
    if *lambda <= Scalar::zero() || *lambda >= Scalar::one() {
        return Err(Error::InvalidArgument(format!(
            "lambda = {} is not strictly between 0 and 1",
            scalar::display_scalar(lambda)
        )));
    }
    let n = p.num_vars();
    let t = 2 * n;
    let mu = Scalar::one() - lambda;
    let px = p.embed(t, 0);
    let py = p.embed(t, n);
    let mid = p.substitute(&combine(&xs(n, t), &mu, &ys(n, t), lambda))?;
    BiPolynomial::new(&(&px.scale(&mu) + &py.scale(lambda)) - &mid, n)
}

pub fn build_g_grad(p: &Polynomial) -> BiPolynomial {
    let n = p.num_vars();
    let t = 2 * n;
    let mut g = &p.embed(t, n) - &p.embed(t, 0);
    for (i, d) in p.gradient().into_iter().enumerate() {
        let step = &Polynomial::var(t, n + i) - &Polynomial::var(t, i);
        g = &g - &(&d.embed(t, 0) * &step);
    }
    BiPolynomial { poly: g, split: n }
}

pub fn build_g_hess(p: &Polynomial) -> BiPolynomial {
    BiPolynomial {
        poly: p.hessian().quadratic_form(),
        split: p.num_vars(),
    }
}

/// The witness polynomial for `kind`.
pub fn build_witness(p: &Polynomial, kind: &WitnessKind) -> Result<BiPolynomial> {
    match kind {
        WitnessKind::Midpoint(l) => build_g_lambda(p, l),
        WitnessKind::FirstOrder => Ok(build_g_grad(p)),
        WitnessKind::SecondOrder => Ok(build_g_hess(p)),
    }
}

/// `g_{1/2^{k+1}}(x,y) - g_{1/2^k}(x,y)/2 - g_{1/2}(x, (1 - 2^-k) x + 2^-k y)`.
pub fn dyadic_relation_residual(p: &Polynomial, k: u32) -> Result<BiPolynomial> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let n = p.num_vars();
    let t = 2 * n;
    let step = Scalar::one() / scalar::two_pow(k);
    let fine = build_g_lambda(p, &(&step / scalar::int(2)))?;
    let coarse = build_g_lambda(p, &step)?;
    let half = build_g_lambda(p, &ratio(1, 2))?;
    let shifted = combine(&xs(n, t), &(Scalar::one() - &step), &ys(n, t), &step);
    let last = half.compose(&xs(n, t), &shifted)?;
    let r = &(fine.poly - coarse.poly.scale(&ratio(1, 2))) - &last;
    BiPolynomial::new(r, n)
}

/// `g_{1/2}(x,y) - g_∇(m, x)/2 - g_∇(m, y)/2` with `m = (x + y)/2`.
pub fn midpoint_decomposition_residual(p: &Polynomial) -> Result<BiPolynomial> {
    let n = p.num_vars();
    let t = 2 * n;
    let half = ratio(1, 2);
    let mid = combine(&xs(n, t), &half, &ys(n, t), &half);
    let grad = build_g_grad(p);
    let to_x = grad.compose(&mid, &xs(n, t))?;
    let to_y = grad.compose(&mid, &ys(n, t))?;
    let g = build_g_lambda(p, &half)?;
    BiPolynomial::new(&g.poly - &(&to_x + &to_y).scale(&half), n)
}

/// `g_∇(x,y) - ∫_0^1 (1-t) (y-x)ᵀ H(x + t(y-x)) (y-x) dt`, integrated exactly.
pub fn taylor_integral_residual(p: &Polynomial) -> Result<BiPolynomial> {
    let n = p.num_vars();
    let total = 2 * n + 1;
    let tvar = Polynomial::var(total, 2 * n);
    let x = xs(n, total);
    let y = ys(n, total);
    let dir: Vec<Polynomial> = y.iter().zip(&x).map(|(b, a)| b - a).collect();
    let point: Vec<Polynomial> = x.iter().zip(&dir).map(|(a, d)| a + &(d * &tvar)).collect();
    let integrand = build_g_hess(p).compose(&point, &dir)?;
    let weighted = &integrand * &(&Polynomial::one(total) - &tvar);
    let integral = weighted.integrate_unit_interval(2 * n)?;
    BiPolynomial::new(&build_g_grad(p).poly - &integral, n)
}

/// `g_{1/2}(x, 0) - (1/2 - 2^-d) p(x)` for a form `p` of degree `d >= 1`.
pub fn form_restriction_identity(p: &Polynomial) -> Result<BiPolynomial> {
    if !p.is_homogeneous() {
        return Err(Error::NotHomogeneous);
    }
    if p.degree() == 0 {
        return Err(Error::InvalidArgument(
            "the restriction identity needs a form of positive degree".into(),
        ));
    }
    let n = p.num_vars();
    let t = 2 * n;
    let d = p.degree().max(0) as u32;
    let g = build_g_lambda(p, &ratio(1, 2))?;
    let zeros = vec![Polynomial::zero(t); n];
    let at_zero = g.compose(&xs(n, t), &zeros)?;
    let c = ratio(1, 2) - Scalar::one() / scalar::two_pow(d);
    BiPolynomial::new(&at_zero - &p.embed(t, 0).scale(&c), n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::motzkin;
    use crate::polynomial::text::parse_infix;
    use proptest::prelude::*;

    fn poly(vars: usize, s: &str) -> Polynomial {
        parse_infix(s, Some(&crate::polynomial::default_names(vars)))
            .unwrap()
            .polynomial
    }

    #[test]
    fn quadratic_witnesses() {
        let p = poly(1, "x1^2");
        let g = build_g_lambda(&p, &ratio(1, 2)).unwrap();
        assert_eq!(g.polynomial(), &poly(2, "(x1 - x2)^2 / 4"));
        assert_eq!(build_g_grad(&p).polynomial(), &poly(2, "(x2 - x1)^2"));
        assert_eq!(build_g_hess(&p).polynomial(), &poly(2, "2 x2^2"));
    }

    #[test]
    fn affine_witnesses_vanish() {
        let p = poly(2, "3 x1 - x2 + 5");
        assert!(build_g_lambda(&p, &ratio(1, 3)).unwrap().is_zero());
        assert!(build_g_grad(&p).is_zero());
        assert!(build_g_hess(&p).is_zero());
    }

    #[test]
    fn quartic_witnesses() {
        let p = poly(1, "x1^4");
        let g = build_g_lambda(&p, &ratio(1, 2)).unwrap();
        assert_eq!(g.polynomial(), &poly(2, "x1^4/2 + x2^4/2 - (x1 + x2)^4/16"));
        assert_eq!(build_g_hess(&p).polynomial(), &poly(2, "12 x1^2 x2^2"));
        let p = poly(2, "x1 x2");
        assert_eq!(build_g_grad(&p).polynomial(), &poly(4, "(x3 - x1)(x4 - x2)"));
        // 1/2 xᵀQx gives yᵀQy
        let p = poly(2, "1/2 (3 x1^2 + 2 x1 x2 + 5 x2^2)");
        assert_eq!(build_g_hess(&p).polynomial(), &poly(4, "3 x3^2 + 2 x3 x4 + 5 x4^2"));
    }

    #[test]
    fn lambda_range_checked() {
        let p = poly(1, "x1^2");
        assert!(build_g_lambda(&p, &Scalar::zero()).is_err());
        assert!(build_g_lambda(&p, &Scalar::one()).is_err());
        assert!(dyadic_relation_residual(&p, 0).is_err());
        assert!(matches!(
            form_restriction_identity(&poly(1, "x1^2 + 1")),
            Err(Error::NotHomogeneous)
        ));
    }

    #[test]
    fn identities_on_named_polynomials() {
        let m = motzkin();
        assert!(dyadic_relation_residual(&m, 2).unwrap().is_zero());
        assert!(form_restriction_identity(&m).unwrap().is_zero());
        let q = poly(2, "x1^4 + x2^4");
        assert!(taylor_integral_residual(&q).unwrap().is_zero());
        assert!(midpoint_decomposition_residual(&q).unwrap().is_zero());
    }

    #[test]
    fn structural_symmetries() {
        let p = poly(2, "x1^4 - 3 x1^2 x2 + x2^3 + x1");
        let g = build_g_lambda(&p, &ratio(1, 2)).unwrap();
        assert_eq!(g.swapped(), g);
        let h = build_g_hess(&p);
        let n = 2;
        let neg: Vec<Polynomial> = (0..n).map(|i| -&Polynomial::var(4, n + i)).collect();
        let flipped = h.compose(&xs(n, 4), &neg).unwrap();
        assert_eq!(&flipped, h.polynomial());
        for (m, _) in h.polynomial().terms() {
            assert_eq!(m.degree_in(n..2 * n), 2);
        }
    }

    fn arb_poly(n: usize, d: u32) -> impl Strategy<Value = Polynomial> {
        prop::collection::vec((prop::collection::vec(0..=d, n), -9i64..=9), 1..8).prop_map(move |terms| {
            let mut p = Polynomial::zero(n);
            for (mut e, c) in terms {
                // clip to total degree d
                while e.iter().sum::<u32>() > d {
                    let i = e.iter().position(|&v| v > 0).unwrap();
                    e[i] -= 1;
                }
                p.add_term(crate::polynomial::Monomial::new(e), scalar::int(c));
            }
            p
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn residuals_vanish(p in (1usize..=3).prop_flat_map(|n| arb_poly(n, 5)), k in 1u32..3) {
            prop_assert!(dyadic_relation_residual(&p, k).unwrap().is_zero());
            prop_assert!(midpoint_decomposition_residual(&p).unwrap().is_zero());
            prop_assert!(taylor_integral_residual(&p).unwrap().is_zero());
        }

        #[test]
        fn witness_degrees(p in arb_poly(2, 6)) {
            let d = p.degree();
            if d >= 2 {
                let h = build_g_hess(&p);
                prop_assert!(h.polynomial().degree() <= d);
                let g = build_g_lambda(&p, &ratio(1, 2)).unwrap();
                prop_assert!(g.polynomial().degree() <= d);
            }
        }
    }
}
