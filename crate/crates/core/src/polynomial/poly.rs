use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::monomial::{default_names, Monomial};
use super::scalar::{self, Scalar};
use crate::error::{Error, Result};

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Terms are kept in a graded-lex ordered map and zero coefficients are never
/// stored, so two polynomials are equal exactly when their term maps are.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    num_vars: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Polynomial {
    pub fn zero(num_vars: usize) -> Self {
        Polynomial {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(num_vars: usize) -> Self {
        Self::constant(num_vars, Scalar::one())
    }

    pub fn constant(num_vars: usize, c: Scalar) -> Self {
        Self::from_monomial(Monomial::one(num_vars), c)
    }

    /// The coordinate polynomial `x_{index+1}`.
    pub fn var(num_vars: usize, index: usize) -> Self {
        assert!(index < num_vars, "variable index out of range");
        Self::from_monomial(Monomial::var(num_vars, index), Scalar::one())
    }

    pub fn from_monomial(m: Monomial, c: Scalar) -> Self {
        let mut p = Polynomial::zero(m.num_vars());
        p.add_term(m, c);
        p
    }

    /// Builds from `(exponents, coefficient)` pairs, summing repeats.
    pub fn from_terms<I>(num_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Scalar)>,
    {
        let mut p = Polynomial::zero(num_vars);
        for (e, c) in terms {
            if e.len() != num_vars {
                return Err(Error::VariableMismatch {
                    left: num_vars,
                    right: e.len(),
                });
            }
            p.add_term(Monomial::new(e), c);
        }
        Ok(p)
    }

    /// Convenience constructor from integer coefficients.
    pub fn from_int_terms(num_vars: usize, terms: &[(i64, &[u32])]) -> Self {
        Self::from_terms(num_vars, terms.iter().map(|(c, e)| (e.to_vec(), scalar::int(*c))))
            .expect("exponent vector length")
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn coefficient_of(&self, exponents: &[u32]) -> Scalar {
        self.coefficient(&Monomial::new(exponents.to_vec()))
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        debug_assert_eq!(m.num_vars(), self.num_vars);
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Total degree, with `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.terms.keys().map(|m| m.degree() as i64).max().unwrap_or(-1)
    }

    pub fn min_degree(&self) -> i64 {
        self.terms.keys().map(|m| m.degree() as i64).min().unwrap_or(-1)
    }

    /// Degree in the variables of `range` only.
    pub fn degree_in(&self, range: std::ops::Range<usize>) -> i64 {
        self.terms
            .keys()
            .map(|m| m.degree_in(range.clone()) as i64)
            .max()
            .unwrap_or(-1)
    }

    pub fn min_degree_in(&self, range: std::ops::Range<usize>) -> i64 {
        self.terms
            .keys()
            .map(|m| m.degree_in(range.clone()) as i64)
            .min()
            .unwrap_or(-1)
    }

    /// True for the zero polynomial and for forms.
    pub fn is_homogeneous(&self) -> bool {
        let mut degrees = self.terms.keys().map(|m| m.degree());
        match degrees.next() {
            None => true,
            Some(d) => degrees.all(|e| e == d),
        }
    }

    pub fn leading(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    fn check_vars(&self, other: &Polynomial) -> Result<()> {
        if self.num_vars != other.num_vars {
            return Err(Error::VariableMismatch {
                left: self.num_vars,
                right: other.num_vars,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_vars(other)?;
        let mut out = Polynomial::zero(self.num_vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.num_vars);
        }
        Polynomial {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Polynomial {
        let mut result = Polynomial::one(self.num_vars);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn evaluate(&self, point: &[Scalar]) -> Result<Scalar> {
        if point.len() != self.num_vars {
            return Err(Error::DimensionMismatch(format!(
                "point has {} coordinates, polynomial has {} variables",
                point.len(),
                self.num_vars
            )));
        }
        let mut total = Scalar::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (x, &e) in point.iter().zip(m.exponents()) {
                if e > 0 {
                    v *= scalar::pow(x, e);
                }
            }
            total += v;
        }
        Ok(total)
    }

    /// Floating-point evaluation for sampling; panics on a length mismatch.
    pub fn evaluate_f64(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.num_vars);
        self.terms
            .iter()
            .map(|(m, c)| {
                m.exponents()
                    .iter()
                    .zip(point)
                    .fold(scalar::to_f64(c), |acc, (&e, &x)| acc * x.powi(e as i32))
            })
            .sum()
    }

    pub fn differentiate(&self, index: usize) -> Result<Polynomial> {
        if index >= self.num_vars {
            return Err(Error::IndexOutOfRange {
                index,
                len: self.num_vars,
            });
        }
        let mut out = Polynomial::zero(self.num_vars);
        for (m, c) in &self.terms {
            let e = m.exponents()[index];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.exponents_mut()[index] -= 1;
            out.add_term(dm, c * scalar::int(e as i64));
        }
        Ok(out)
    }

    pub fn gradient(&self) -> Vec<Polynomial> {
        (0..self.num_vars)
            .map(|i| self.differentiate(i).expect("index in range"))
            .collect()
    }

    pub fn hessian(&self) -> super::PolyMatrix {
        let n = self.num_vars;
        let grad = self.gradient();
        let mut entries = vec![Polynomial::zero(n); n * n];
        for i in 0..n {
            for j in i..n {
                let h = grad[i].differentiate(j).expect("index in range");
                entries[j * n + i] = h.clone();
                entries[i * n + j] = h;
            }
        }
        super::PolyMatrix::from_entries_unchecked(n, n, entries)
    }

    /// `y^d p(x/y)` with the new variable appended last.
    pub fn homogenize(&self, target_degree: u32) -> Result<Polynomial> {
        let deg = self.degree();
        if (target_degree as i64) < deg {
            return Err(Error::DegreeTooLow {
                target: target_degree as i64,
                degree: deg,
            });
        }
        let n = self.num_vars + 1;
        let mut out = Polynomial::zero(n);
        for (m, c) in &self.terms {
            let mut e = m.exponents().to_vec();
            e.push(target_degree - m.degree());
            out.add_term(Monomial::new(e), c.clone());
        }
        Ok(out)
    }

    /// Fixes variable `index` to `value` and removes it.
    pub fn dehomogenize(&self, index: usize, value: &Scalar) -> Result<Polynomial> {
        if index >= self.num_vars {
            return Err(Error::IndexOutOfRange {
                index,
                len: self.num_vars,
            });
        }
        let mut out = Polynomial::zero(self.num_vars - 1);
        for (m, c) in &self.terms {
            let e = m.exponents()[index];
            let v = if e == 0 { c.clone() } else { c * scalar::pow(value, e) };
            out.add_term(m.without_var(index), v);
        }
        Ok(out)
    }

    /// Composition `p(q_1, ..., q_n)`; all `q_i` share one variable set.
    pub fn substitute(&self, assignments: &[Polynomial]) -> Result<Polynomial> {
        if assignments.len() != self.num_vars {
            return Err(Error::DimensionMismatch(format!(
                "{} assignments for {} variables",
                assignments.len(),
                self.num_vars
            )));
        }
        let target_vars = match assignments.first() {
            Some(q) => q.num_vars,
            None => 0,
        };
        if let Some(q) = assignments.iter().find(|q| q.num_vars != target_vars) {
            return Err(Error::VariableMismatch {
                left: target_vars,
                right: q.num_vars,
            });
        }
        // powers[i][k] = q_i^k, filled lazily
        let mut powers: Vec<Vec<Polynomial>> = assignments
            .iter()
            .map(|q| vec![Polynomial::one(target_vars), q.clone()])
            .collect();
        let mut out = Polynomial::zero(target_vars);
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(target_vars, c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap() * &assignments[i];
                    powers[i].push(next);
                }
                term = &term * &powers[i][e as usize];
            }
            for (tm, tc) in term.terms {
                out.add_term(tm, tc);
            }
        }
        Ok(out)
    }

    /// `∫_0^{x1} ∫_0^s m(t, x2, ...) dt ds`.
    pub fn definite_integral_x1_twice(&self) -> Polynomial {
        let mut out = Polynomial::zero(self.num_vars);
        if self.num_vars == 0 {
            return out;
        }
        for (m, c) in &self.terms {
            let a = m.exponents()[0] as i64;
            let mut e = m.clone();
            e.exponents_mut()[0] += 2;
            out.add_term(e, c / scalar::int((a + 1) * (a + 2)));
        }
        out
    }

    /// `∫_0^1 p dt` over variable `index`, which is removed.
    pub fn integrate_unit_interval(&self, index: usize) -> Result<Polynomial> {
        if index >= self.num_vars {
            return Err(Error::IndexOutOfRange {
                index,
                len: self.num_vars,
            });
        }
        let mut out = Polynomial::zero(self.num_vars - 1);
        for (m, c) in &self.terms {
            let e = m.exponents()[index] as i64;
            out.add_term(m.without_var(index), c / scalar::int(e + 1));
        }
        Ok(out)
    }

    /// Re-embeds into `num_vars` variables, sending `x_i` to `x_{offset+i}`.
    pub fn embed(&self, num_vars: usize, offset: usize) -> Polynomial {
        assert!(offset + self.num_vars <= num_vars);
        Polynomial {
            num_vars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.embed(num_vars, offset), c.clone()))
                .collect(),
        }
    }

    /// Exact quotient `self / divisor`; fails if the division leaves a remainder.
    pub fn div_exact(&self, divisor: &Polynomial) -> Result<Polynomial> {
        self.check_vars(divisor)?;
        let (lm, lc) = divisor.leading().ok_or(Error::NotDivisible)?;
        let mut rem = self.clone();
        let mut quot = Polynomial::zero(self.num_vars);
        while let Some((rm, rc)) = rem.leading() {
            if !lm.divides(rm) {
                return Err(Error::NotDivisible);
            }
            let t = Polynomial::from_monomial(lm.quotient_of(rm), rc / lc);
            rem = &rem - &(&t * divisor);
            quot = &quot + &t;
        }
        Ok(quot)
    }

    /// Largest absolute coefficient.
    pub fn max_abs_coefficient(&self) -> Scalar {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(Scalar::zero)
    }

    pub fn display_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mono = m.display_with(names);
            if mono == "1" {
                out.push_str(&scalar::display_scalar(&abs));
            } else if abs.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&scalar::display_scalar(&abs));
                out.push('*');
                out.push_str(&mono);
            }
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&default_names(self.num_vars)))
    }
}

// Operator forms panic on a variable-count mismatch; use the `try_` methods
// when the operands come from untrusted input.
impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.try_add(rhs).expect("polynomial variable count mismatch")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.try_sub(rhs).expect("polynomial variable count mismatch")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.try_mul(rhs).expect("polynomial variable count mismatch")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Scalar::one())
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}
