use super::monomial::Monomial;
use super::poly::Polynomial;
use crate::error::{Error, Result};

/// Square symmetric matrix with polynomial entries, `U(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    dim: usize,
    num_vars: usize,
    entries: Vec<Polynomial>,
}

impl PolyMatrix {
    /// Builds from rows, checking squareness, a shared variable set and exact symmetry.
    pub fn new(rows: Vec<Vec<Polynomial>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::DimensionMismatch("empty matrix".into()));
        }
        let num_vars = rows[0][0].num_vars();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "row of length {} in a {dim}x{dim} matrix",
                    row.len()
                )));
            }
            for p in row {
                if p.num_vars() != num_vars {
                    return Err(Error::VariableMismatch {
                        left: num_vars,
                        right: p.num_vars(),
                    });
                }
                entries.push(p);
            }
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                if entries[i * dim + j] != entries[j * dim + i] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(PolyMatrix { dim, num_vars, entries })
    }

    pub(crate) fn from_entries_unchecked(dim: usize, num_vars: usize, entries: Vec<Polynomial>) -> Self {
        debug_assert_eq!(entries.len(), dim * dim);
        PolyMatrix { dim, num_vars, entries }
    }

    pub fn identity(dim: usize, num_vars: usize) -> Self {
        let mut entries = vec![Polynomial::zero(num_vars); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Polynomial::one(num_vars);
        }
        PolyMatrix { dim, num_vars, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i * self.dim + j]
    }

    /// `VᵀV` for a (not necessarily square) polynomial matrix `V` given by rows.
    pub fn gram_of(v: &[Vec<Polynomial>]) -> Result<Self> {
        let rows = v.len();
        if rows == 0 {
            return Err(Error::DimensionMismatch("empty factor".into()));
        }
        let cols = v[0].len();
        let num_vars = v[0][0].num_vars();
        let mut entries = vec![Polynomial::zero(num_vars); cols * cols];
        for i in 0..cols {
            for j in i..cols {
                let mut s = Polynomial::zero(num_vars);
                for row in v {
                    s = &s + &(&row[i] * &row[j]);
                }
                entries[j * cols + i] = s.clone();
                entries[i * cols + j] = s;
            }
        }
        Ok(PolyMatrix::from_entries_unchecked(cols, num_vars, entries))
    }

    /// `yᵀU(x)y` as a polynomial in `num_vars + dim` variables (x first, then y).
    pub fn quadratic_form(&self) -> Polynomial {
        let n = self.num_vars;
        let total = n + self.dim;
        let mut out = Polynomial::zero(total);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let entry = self.get(i, j);
                if entry.is_zero() {
                    continue;
                }
                let mut yy = vec![0u32; total];
                yy[n + i] += 1;
                yy[n + j] += 1;
                let yy = Monomial::new(yy);
                for (m, c) in entry.terms() {
                    out.add_term(m.embed(total, 0).mul(&yy), c.clone());
                }
            }
        }
        out
    }

    pub fn principal_submatrix(&self, indices: &[usize]) -> PolyMatrix {
        let k = indices.len();
        let mut entries = Vec::with_capacity(k * k);
        for &i in indices {
            for &j in indices {
                entries.push(self.get(i, j).clone());
            }
        }
        PolyMatrix::from_entries_unchecked(k, self.num_vars, entries)
    }

    /// Exact determinant: cofactor expansion up to 4x4, fraction-free
    /// Bareiss elimination beyond.
    pub fn determinant(&self) -> Polynomial {
        if self.dim <= 4 {
            let idx: Vec<usize> = (0..self.dim).collect();
            cofactor_det(self, &idx, &idx)
        } else {
            self.bareiss_determinant()
        }
    }

    pub fn bareiss_determinant(&self) -> Polynomial {
        let n = self.dim;
        let mut a: Vec<Vec<Polynomial>> = (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j).clone()).collect())
            .collect();
        let mut prev = Polynomial::one(self.num_vars);
        let mut negate = false;
        for k in 0..n.saturating_sub(1) {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        negate = !negate;
                    }
                    None => return Polynomial::zero(self.num_vars),
                }
            }
            for i in (k + 1)..n {
                for j in (k + 1)..n {
                    let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                    a[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
                }
            }
            prev = a[k][k].clone();
        }
        let det = a[n - 1][n - 1].clone();
        if negate {
            -det
        } else {
            det
        }
    }
}

fn cofactor_det(m: &PolyMatrix, rows: &[usize], cols: &[usize]) -> Polynomial {
    match rows.len() {
        0 => Polynomial::one(m.num_vars),
        1 => m.get(rows[0], cols[0]).clone(),
        2 => {
            &(m.get(rows[0], cols[0]) * m.get(rows[1], cols[1])) - &(m.get(rows[0], cols[1]) * m.get(rows[1], cols[0]))
        }
        _ => {
            let mut total = Polynomial::zero(m.num_vars);
            let sub_rows = &rows[1..];
            for (k, &c) in cols.iter().enumerate() {
                let entry = m.get(rows[0], c);
                if entry.is_zero() {
                    continue;
                }
                let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                let minor = cofactor_det(m, sub_rows, &sub_cols);
                let term = entry * &minor;
                total = if k % 2 == 0 { &total + &term } else { &total - &term };
            }
            total
        }
    }
}
