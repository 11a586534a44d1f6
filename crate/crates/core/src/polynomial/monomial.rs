use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// An exponent vector `x^α` over a fixed number of variables.
///
/// Ordering is graded lexicographic: total degree first, then exponents
/// compared from the first variable on.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(num_vars: usize) -> Self {
        Monomial(vec![0; num_vars])
    }

    pub fn var(num_vars: usize, index: usize) -> Self {
        let mut e = vec![0; num_vars];
        e[index] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn num_vars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Degree restricted to the variables in `range`.
    pub fn degree_in(&self, range: std::ops::Range<usize>) -> u32 {
        self.0[range].iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(b, a)| b - a).collect())
    }

    /// Halves every exponent; `None` unless all are even.
    pub fn half(&self) -> Option<Monomial> {
        if self.0.iter().all(|e| e % 2 == 0) {
            Some(Monomial(self.0.iter().map(|e| e / 2).collect()))
        } else {
            None
        }
    }

    /// Re-embeds into `num_vars` variables with variable `i` sent to `offset + i`.
    pub fn embed(&self, num_vars: usize, offset: usize) -> Monomial {
        let mut e = vec![0; num_vars];
        e[offset..offset + self.0.len()].copy_from_slice(&self.0);
        Monomial(e)
    }

    pub fn without_var(&self, index: usize) -> Monomial {
        let mut e = self.0.clone();
        e.remove(index);
        Monomial(e)
    }

    pub(crate) fn exponents_mut(&mut self) -> &mut Vec<u32> {
        &mut self.0
    }

    /// Renders as `x1^2*x3` using the given variable names; `1` for the unit.
    pub fn display_with(&self, names: &[String]) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                let name = names.get(i).cloned().unwrap_or_else(|| format!("x{}", i + 1));
                if e == 1 {
                    name
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    /// Exponent tuple text, e.g. `(2,0,1)`.
    pub fn tuple_text(&self) -> String {
        let inner: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        format!("({})", inner.join(","))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tuple_text())
    }
}

/// Default variable names `x1..xn`.
pub fn default_names(num_vars: usize) -> Vec<String> {
    (1..=num_vars).map(|i| format!("x{i}")).collect()
}

/// Names `x1..xn, y1..ym` for a bipartite variable set.
pub fn xy_names(n: usize, m: usize) -> Vec<String> {
    (1..=n)
        .map(|i| format!("x{i}"))
        .chain((1..=m).map(|i| format!("y{i}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lex_order() {
        let a = Monomial::new(vec![2, 0]);
        let b = Monomial::new(vec![1, 1]);
        let c = Monomial::new(vec![0, 3]);
        assert!(a > b);
        assert!(c > a);
        assert!(Monomial::one(2) < b);
    }

    #[test]
    fn arithmetic() {
        let a = Monomial::new(vec![2, 1]);
        let b = Monomial::new(vec![1, 0]);
        assert_eq!(a.mul(&b).exponents(), &[3, 1]);
        assert!(b.divides(&a));
        assert_eq!(b.quotient_of(&a).exponents(), &[1, 1]);
        assert_eq!(Monomial::new(vec![4, 2]).half().unwrap().exponents(), &[2, 1]);
        assert!(a.half().is_none());
    }

    #[test]
    fn rendering() {
        let m = Monomial::new(vec![2, 0, 1]);
        assert_eq!(m.display_with(&default_names(3)), "x1^2*x3");
        assert_eq!(m.tuple_text(), "(2,0,1)");
        assert_eq!(Monomial::one(2).display_with(&default_names(2)), "1");
    }
}
