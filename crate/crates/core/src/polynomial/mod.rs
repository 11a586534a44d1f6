//! Exact sparse multivariate polynomials over the rationals.

mod matrix;
mod monomial;
mod poly;
pub mod scalar;
pub mod text;

pub use matrix::PolyMatrix;
pub use monomial::{default_names, xy_names, Monomial};
pub use poly::Polynomial;
pub use scalar::Scalar;

/// The Motzkin form `x1^4 x2^2 + x1^2 x2^4 - 3 x1^2 x2^2 x3^2 + x3^6`.
pub fn motzkin() -> Polynomial {
    Polynomial::from_int_terms(
        3,
        &[(1, &[4, 2, 0]), (1, &[2, 4, 0]), (-3, &[2, 2, 2]), (1, &[0, 0, 6])],
    )
}

#[cfg(test)]
mod tests {
    use super::scalar::{int, ratio};
    use super::*;
    use crate::error::Error;
    use proptest::prelude::*;

    fn x(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    fn parse(s: &str) -> Polynomial {
        text::parse_infix(s, None).unwrap().polynomial
    }

    #[test]
    fn add_cancels_and_prunes() {
        let a = parse("x1^2 + 1");
        let b = -&parse("x1^2");
        let s = &a + &b;
        assert_eq!(s, Polynomial::one(1));
        assert_eq!(s.num_terms(), 1);
        assert_eq!(&motzkin() + &Polynomial::zero(3), motzkin());
        let sum = &parse("x1^2*x2^4") + &parse("x1^4*x2^2");
        assert_eq!(sum.coefficient_of(&[2, 4]), int(1));
        assert_eq!(sum.coefficient_of(&[4, 2]), int(1));
        assert_eq!(sum.num_terms(), 2);
    }

    #[test]
    fn mismatched_variable_counts_error() {
        let a = Polynomial::one(2);
        let b = Polynomial::one(3);
        assert!(matches!(a.try_add(&b), Err(Error::VariableMismatch { .. })));
        assert!(matches!(a.try_mul(&b), Err(Error::VariableMismatch { .. })));
        assert!(a.evaluate(&[int(1)]).is_err());
        assert!(a.differentiate(2).is_err());
    }

    #[test]
    fn multiplication() {
        assert_eq!(&x(2, 0) * &x(2, 1), parse("x1*x2"));
        assert_eq!(&parse("x1 + x2") * &parse("x1 - x2"), parse("x1^2 - x2^2"));
        let p = motzkin();
        assert_eq!(&p * &Polynomial::one(3), p);
    }

    #[test]
    fn motzkin_values() {
        let m = motzkin();
        assert_eq!(m.evaluate(&[int(1), int(1), int(1)]).unwrap(), int(0));
        assert_eq!(m.evaluate(&[int(1), int(1), int(0)]).unwrap(), int(2));
        assert_eq!(m.evaluate(&[int(0), int(0), int(0)]).unwrap(), int(0));
    }

    #[test]
    fn derivatives() {
        assert_eq!(parse("x1^2").differentiate(0).unwrap(), parse("2*x1"));
        let cube = Polynomial::from_int_terms(2, &[(1, &[3, 0])]);
        assert!(cube.differentiate(1).unwrap().is_zero());
        let dm = motzkin().differentiate(0).unwrap();
        let expected = Polynomial::from_int_terms(3, &[(4, &[3, 2, 0]), (2, &[1, 4, 0]), (-6, &[1, 2, 2])]);
        assert_eq!(dm, expected);
    }

    #[test]
    fn gradients() {
        let g = parse("x1^2 + x2^2").gradient();
        assert_eq!(g, vec![parse("2*x1 + 0*x2"), parse("2*x2 + 0*x1")]);
        let c = Polynomial::constant(2, int(5)).gradient();
        assert!(c.iter().all(Polynomial::is_zero));
        let g = parse("x1*x2").gradient();
        assert_eq!(g[0], Polynomial::var(2, 1));
        assert_eq!(g[1], Polynomial::var(2, 0));
    }

    #[test]
    fn hessians() {
        let h = parse("x1^2").hessian();
        assert_eq!(h.dim(), 1);
        assert_eq!(h.get(0, 0), &Polynomial::constant(1, int(2)));
        // 1/2 xᵀQx + bᵀx + c has constant Hessian Q
        let p = parse("1/2*(3*x1^2 + 2*x1*x2 + 5*x2^2) + 7*x1 - x2 + 4");
        let h = p.hessian();
        assert_eq!(h.get(0, 0), &Polynomial::constant(2, int(3)));
        assert_eq!(h.get(0, 1), &Polynomial::constant(2, int(1)));
        assert_eq!(h.get(1, 1), &Polynomial::constant(2, int(5)));
    }

    #[test]
    fn homogenization() {
        let p = parse("10*x1^4 - 5*x1 + 2");
        let h = p.homogenize(4).unwrap();
        let expected = Polynomial::from_int_terms(2, &[(10, &[4, 0]), (-5, &[1, 3]), (2, &[0, 4])]);
        assert_eq!(h, expected);
        let m = motzkin().homogenize(6).unwrap();
        assert_eq!(m, motzkin().embed(4, 0));
        let l = parse("x1 + 1").homogenize(2).unwrap();
        assert_eq!(l, Polynomial::from_int_terms(2, &[(1, &[1, 1]), (1, &[0, 2])]));
        assert!(matches!(p.homogenize(3), Err(Error::DegreeTooLow { .. })));
    }

    #[test]
    fn dehomogenization() {
        let p = Polynomial::from_int_terms(3, &[(1, &[0, 0, 6])]);
        assert_eq!(p.dehomogenize(2, &int(1)).unwrap(), Polynomial::one(2));
        assert!(p.dehomogenize(3, &int(1)).is_err());
    }

    #[test]
    fn substitution() {
        let p = motzkin();
        let id: Vec<Polynomial> = (0..3).map(|i| x(3, i)).collect();
        assert_eq!(p.substitute(&id).unwrap(), p);
        let sq = parse("x1^2 + 0*x2");
        let out = sq.substitute(&[parse("x1 + x2"), x(2, 1)]).unwrap();
        assert_eq!(out, parse("x1^2 + 2*x1*x2 + x2^2"));
        assert!(sq.substitute(&[x(2, 0)]).is_err());
    }

    #[test]
    fn double_integral_in_first_variable() {
        assert_eq!(
            Polynomial::one(1).definite_integral_x1_twice(),
            Polynomial::from_terms(1, [(vec![2], ratio(1, 2))]).unwrap()
        );
        assert_eq!(
            x(1, 0).definite_integral_x1_twice(),
            Polynomial::from_terms(1, [(vec![3], ratio(1, 6))]).unwrap()
        );
        let m = parse("x2^2 + 0*x1");
        assert_eq!(
            m.definite_integral_x1_twice(),
            Polynomial::from_terms(2, [(vec![2, 2], ratio(1, 2))]).unwrap()
        );
    }

    #[test]
    fn exact_division() {
        let a = parse("x1^2 - x2^2");
        let b = parse("x1 + x2");
        assert_eq!(a.div_exact(&b).unwrap(), parse("x1 - x2"));
        assert!(parse("x1^2 + x2").div_exact(&b).is_err());
    }

    #[test]
    fn bareiss_matches_cofactor() {
        let n = 3;
        let rows: Vec<Vec<Polynomial>> = (0..5)
            .map(|i| {
                (0..5)
                    .map(|j| {
                        let (a, b) = (i.min(j), i.max(j));
                        let mut p = Polynomial::constant(n, int((a * 7 + b * 3) as i64 % 5 + 1));
                        p = &p + &Polynomial::var(n, (a + b) % n);
                        if a == b {
                            p = &p + &Polynomial::var(n, a % n).pow(2);
                        }
                        p
                    })
                    .collect()
            })
            .collect();
        let m = PolyMatrix::new(rows).unwrap();
        let bareiss = m.bareiss_determinant();
        // cofactor expansion along the first row with 4x4 minors
        let mut cof = Polynomial::zero(n);
        for c in 0..5 {
            let rest: Vec<usize> = (0..5).filter(|&k| k != c).collect();
            let mut sub = Vec::new();
            for r in 1..5 {
                sub.push(rest.iter().map(|&k| m.get(r, k).clone()).collect::<Vec<_>>());
            }
            // the 4x4 minor is not symmetric, expand it by hand through Bareiss-free recursion
            let minor = det_generic(&sub);
            let term = m.get(0, c) * &minor;
            cof = if c % 2 == 0 { &cof + &term } else { &cof - &term };
        }
        assert_eq!(bareiss, cof);
    }

    fn det_generic(a: &[Vec<Polynomial>]) -> Polynomial {
        let n = a.len();
        if n == 1 {
            return a[0][0].clone();
        }
        let mut total = Polynomial::zero(a[0][0].num_vars());
        for c in 0..n {
            let sub: Vec<Vec<Polynomial>> = a[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(k, _)| *k != c)
                        .map(|(_, p)| p.clone())
                        .collect()
                })
                .collect();
            let term = &a[0][c] * &det_generic(&sub);
            total = if c % 2 == 0 { &total + &term } else { &total - &term };
        }
        total
    }

    #[test]
    fn poly_matrix_rejects_asymmetry() {
        let rows = vec![
            vec![Polynomial::one(1), Polynomial::var(1, 0)],
            vec![Polynomial::zero(1), Polynomial::one(1)],
        ];
        assert!(matches!(PolyMatrix::new(rows), Err(Error::NotSymmetric { .. })));
    }

    fn arb_poly(num_vars: usize, max_deg: u32) -> impl Strategy<Value = Polynomial> {
        prop::collection::vec(
            (prop::collection::vec(0..=max_deg, num_vars), -5i64..=5, 1i64..=3),
            0..6,
        )
        .prop_map(move |terms| {
            Polynomial::from_terms(num_vars, terms.into_iter().map(|(e, n, d)| (e, ratio(n, d)))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(3, 3), b in arb_poly(3, 3), c in arb_poly(3, 3)) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn evaluation_is_a_homomorphism(a in arb_poly(2, 3), b in arb_poly(2, 3),
                                        p in -4i64..4, q in -4i64..4) {
            let pt = [ratio(p, 3), ratio(q, 2)];
            let lhs = (&a * &b).evaluate(&pt).unwrap();
            prop_assert_eq!(lhs, a.evaluate(&pt).unwrap() * b.evaluate(&pt).unwrap());
        }

        #[test]
        fn double_integral_inverts_second_derivative(m in arb_poly(3, 4)) {
            let f = m.definite_integral_x1_twice();
            prop_assert_eq!(f.differentiate(0).unwrap().differentiate(0).unwrap(), m);
        }

        #[test]
        fn mixed_partials_commute(p in arb_poly(3, 4)) {
            let h = p.hessian();
            for i in 0..3 {
                for j in 0..3 {
                    let direct = p.differentiate(j).unwrap().differentiate(i).unwrap();
                    prop_assert_eq!(h.get(i, j), &direct);
                }
            }
        }

        #[test]
        fn dehomogenize_inverts_homogenize(p in arb_poly(2, 4), extra in 0u32..3) {
            let d = p.degree().max(0) as u32 + extra;
            let h = p.homogenize(d).unwrap();
            prop_assert!(h.is_homogeneous());
            prop_assert_eq!(h.dehomogenize(2, &int(1)).unwrap(), p);
        }

        #[test]
        fn canonical_text_round_trips(p in arb_poly(3, 4)) {
            let t = text::to_canonical(&p);
            prop_assert_eq!(text::from_canonical(&t).unwrap(), p);
        }
    }
}
