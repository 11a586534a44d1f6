use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::polynomial::{Monomial, Polynomial};

/// Ordered list of distinct monomials over a fixed variable count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialBasis {
    num_vars: usize,
    monomials: Vec<Monomial>,
}

impl MonomialBasis {
    pub fn new(num_vars: usize, monomials: Vec<Monomial>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for m in &monomials {
            if m.num_vars() != num_vars {
                return Err(Error::VariableMismatch {
                    left: num_vars,
                    right: m.num_vars(),
                });
            }
            if !seen.insert(m.clone()) {
                return Err(Error::InvalidArgument(format!("duplicate basis monomial {m}")));
            }
        }
        Ok(MonomialBasis { num_vars, monomials })
    }

    pub fn from_exponents(num_vars: usize, rows: &[&[u32]]) -> Result<Self> {
        Self::new(num_vars, rows.iter().map(|e| Monomial::new(e.to_vec())).collect())
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn get(&self, i: usize) -> &Monomial {
        &self.monomials[i]
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Monomial> {
        self.monomials.iter()
    }

    pub fn index_map(&self) -> HashMap<&Monomial, usize> {
        self.monomials.iter().enumerate().map(|(i, m)| (m, i)).collect()
    }

    pub fn position(&self, m: &Monomial) -> Option<usize> {
        self.monomials.iter().position(|b| b == m)
    }

    /// All products `z_i z_j`, deduplicated, in graded-lex order.
    pub fn products(&self) -> BTreeSet<Monomial> {
        let mut out = BTreeSet::new();
        for (i, a) in self.monomials.iter().enumerate() {
            for b in &self.monomials[i..] {
                out.insert(a.mul(b));
            }
        }
        out
    }

    /// Keeps the monomials selected by `keep`, preserving order.
    pub fn restrict(&self, keep: &[bool]) -> MonomialBasis {
        MonomialBasis {
            num_vars: self.num_vars,
            monomials: self
                .monomials
                .iter()
                .zip(keep)
                .filter(|(_, &k)| k)
                .map(|(m, _)| m.clone())
                .collect(),
        }
    }
}

/// Shape of the half-degree monomial vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisStructure {
    /// Every monomial of degree at most the half degree.
    Plain,
    /// Monomials of degree exactly the half degree.
    Homogeneous,
    /// `x^a * y_i` for forms quadratic in the trailing `y_vars` variables.
    /// With `x_homogeneous` the x-part has degree exactly `half_degree - 1`,
    /// otherwise every degree up to that.
    BipartiteYLinear {
        x_vars: usize,
        y_vars: usize,
        x_homogeneous: bool,
    },
}

/// Exponent vectors in `n` variables of total degree exactly `d`, in
/// descending lexicographic order (`x1` most significant).
pub(crate) fn exponents_of_degree(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == n {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=d).rev() {
            prefix.push(e);
            rec(n, d - e, prefix, out);
            prefix.pop();
        }
    }
    if n == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    rec(n, d, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Standard half-degree basis.
///
/// Plain and homogeneous bases list monomials by degree, then in descending
/// lexicographic order, so `(2, 1, Plain)` gives `[1, x1, x2]`. Bipartite
/// bases list the reverse (ascending) order, which is the usual layout for
/// Hessian certificates: for each x-part the y-variables run from last to first.
pub fn standard_basis(num_vars: usize, half_degree: u32, structure: BasisStructure) -> Result<MonomialBasis> {
    let monomials = match structure {
        BasisStructure::Plain => (0..=half_degree)
            .flat_map(|d| exponents_of_degree(num_vars, d))
            .map(Monomial::new)
            .collect(),
        BasisStructure::Homogeneous => exponents_of_degree(num_vars, half_degree)
            .into_iter()
            .map(Monomial::new)
            .collect(),
        BasisStructure::BipartiteYLinear {
            x_vars,
            y_vars,
            x_homogeneous,
        } => {
            if x_vars + y_vars != num_vars {
                return Err(Error::DimensionMismatch(format!(
                    "{x_vars} + {y_vars} block variables for {num_vars} total"
                )));
            }
            if half_degree == 0 {
                return Err(Error::InvalidArgument("bipartite basis needs half degree >= 1".into()));
            }
            let top = half_degree - 1;
            let low = if x_homogeneous { top } else { 0 };
            let mut out = Vec::new();
            for d in low..=top {
                let mut chunk = Vec::new();
                for xa in exponents_of_degree(x_vars, d) {
                    for j in 0..y_vars {
                        let mut e = xa.clone();
                        e.resize(num_vars, 0);
                        e[x_vars + j] = 1;
                        chunk.push(Monomial::new(e));
                    }
                }
                chunk.reverse();
                out.extend(chunk);
            }
            out
        }
    };
    MonomialBasis::new(num_vars, monomials)
}

/// Diagonal-consistency pruning against a target polynomial.
///
/// A basis monomial `z_i` is dropped when `z_i^2` has zero coefficient in the
/// target and no other pair of retained monomials multiplies to `z_i^2`: in any
/// PSD Gram matrix the corresponding diagonal entry would be zero, forcing the
/// whole row to vanish. Repeats until stable. Returns the pruned basis and
/// the dropped monomials in the order they were removed.
pub fn prune_basis(basis: &MonomialBasis, target: &Polynomial) -> (MonomialBasis, Vec<Monomial>) {
    let n = basis.len();
    let mut keep = vec![true; n];
    let mut removed = Vec::new();
    loop {
        let mut producers: HashMap<Monomial, usize> = HashMap::new();
        for i in 0..n {
            if !keep[i] {
                continue;
            }
            for j in i..n {
                if keep[j] {
                    *producers.entry(basis.get(i).mul(basis.get(j))).or_insert(0) += 1;
                }
            }
        }
        let mut changed = false;
        for i in 0..n {
            if !keep[i] {
                continue;
            }
            let sq = basis.get(i).mul(basis.get(i));
            if target.coefficient(&sq) == num_traits::Zero::zero() && producers.get(&sq) == Some(&1) {
                keep[i] = false;
                removed.push(basis.get(i).clone());
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (basis.restrict(&keep), removed)
}
