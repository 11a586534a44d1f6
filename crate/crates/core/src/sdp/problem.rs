use nalgebra::{DMatrix, DVector};

use super::ipm::{Entry, StandardForm};
use crate::error::{Error, Result};

/// Solver tolerances and limits.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub feasibility_tol: f64,
    pub gap_tol: f64,
    pub max_iterations: usize,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_fraction: f64,
    /// Phase-one optimum above which a problem is declared infeasible.
    pub infeasibility_threshold: f64,
    /// Emit one log line per iteration at info level instead of trace.
    pub verbose: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            feasibility_tol: 1e-8,
            gap_tol: 1e-8,
            max_iterations: 200,
            step_fraction: 0.95,
            infeasibility_threshold: 1e-6,
            verbose: false,
        }
    }
}

/// A symmetric matrix given by its upper-triangle nonzeros on one block.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSym {
    pub block: usize,
    /// `(row, col, value)` with `row <= col`.
    pub entries: Vec<(usize, usize, f64)>,
}

/// `⟨A_k, X⟩ = b_k` over a block-diagonal `X ⪰ 0`, with an optional linear objective.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    block_dims: Vec<usize>,
    constraints: Vec<Vec<Entry>>,
    rhs: Vec<f64>,
    objective: Option<Vec<Entry>>,
}

fn dense_entries(blocks: &[DMatrix<f64>], dims: &[usize]) -> Result<Vec<Entry>> {
    if blocks.len() != dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} coefficient blocks for {} variable blocks",
            blocks.len(),
            dims.len()
        )));
    }
    let mut out = Vec::new();
    for (b, (m, &n)) in blocks.iter().zip(dims).enumerate() {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "block {b} is {}x{}, expected {n}x{n}",
                m.nrows(),
                m.ncols()
            )));
        }
        for i in 0..n {
            for j in i..n {
                let tol = 1e-12 * (1.0 + m[(i, j)].abs());
                if (m[(i, j)] - m[(j, i)]).abs() > tol {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
                if m[(i, j)] != 0.0 {
                    out.push(Entry {
                        block: b,
                        row: i,
                        col: j,
                        value: m[(i, j)],
                    });
                }
            }
        }
    }
    Ok(out)
}

fn sparse_entries(mats: &[SparseSym], dims: &[usize]) -> Result<Vec<Entry>> {
    let mut out = Vec::new();
    for m in mats {
        let n = *dims.get(m.block).ok_or(Error::IndexOutOfRange {
            index: m.block,
            len: dims.len(),
        })?;
        for &(r, c, v) in &m.entries {
            if r > c {
                return Err(Error::InvalidArgument(format!(
                    "sparse entry ({r},{c}) lies below the diagonal"
                )));
            }
            if c >= n {
                return Err(Error::DimensionMismatch(format!(
                    "entry ({r},{c}) outside a {n}x{n} block"
                )));
            }
            if v != 0.0 {
                out.push(Entry {
                    block: m.block,
                    row: r,
                    col: c,
                    value: v,
                });
            }
        }
    }
    Ok(out)
}

impl SdpProblem {
    pub fn new(block_dims: Vec<usize>) -> Result<Self> {
        if block_dims.is_empty() || block_dims.contains(&0) {
            return Err(Error::DimensionMismatch("blocks must be nonempty".into()));
        }
        Ok(SdpProblem {
            block_dims,
            constraints: Vec::new(),
            rhs: Vec::new(),
            objective: None,
        })
    }

    /// Adds `⟨A, X⟩ = rhs` with `A` given densely, one matrix per block.
    pub fn add_dense_constraint(&mut self, blocks: &[DMatrix<f64>], rhs: f64) -> Result<()> {
        let e = dense_entries(blocks, &self.block_dims)?;
        self.constraints.push(e);
        self.rhs.push(rhs);
        Ok(())
    }

    pub fn add_sparse_constraint(&mut self, mats: &[SparseSym], rhs: f64) -> Result<()> {
        let e = sparse_entries(mats, &self.block_dims)?;
        self.constraints.push(e);
        self.rhs.push(rhs);
        Ok(())
    }

    pub fn set_dense_objective(&mut self, blocks: &[DMatrix<f64>]) -> Result<()> {
        self.objective = Some(dense_entries(blocks, &self.block_dims)?);
        Ok(())
    }

    pub fn set_sparse_objective(&mut self, mats: &[SparseSym]) -> Result<()> {
        self.objective = Some(sparse_entries(mats, &self.block_dims)?);
        Ok(())
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// `⟨A_k, X⟩` for every constraint.
    pub fn apply(&self, x: &[DMatrix<f64>]) -> Vec<f64> {
        self.constraints
            .iter()
            .map(|a| {
                a.iter()
                    .map(|e| {
                        let v = x[e.block][(e.row, e.col)];
                        if e.row == e.col {
                            e.value * v
                        } else {
                            e.value * (v + x[e.block][(e.col, e.row)])
                        }
                    })
                    .sum()
            })
            .collect()
    }

    /// `Σ y_k A_k` as dense blocks.
    pub fn adjoint(&self, y: &[f64]) -> Vec<DMatrix<f64>> {
        let mut out: Vec<DMatrix<f64>> = self.block_dims.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        for (a, &yk) in self.constraints.iter().zip(y) {
            for e in a {
                out[e.block][(e.row, e.col)] += yk * e.value;
                if e.row != e.col {
                    out[e.block][(e.col, e.row)] += yk * e.value;
                }
            }
        }
        out
    }

    fn svec_len(&self) -> usize {
        self.block_dims.iter().map(|n| n * (n + 1) / 2).sum()
    }

    /// Constraint operator as a dense matrix over the upper triangles, with
    /// off-diagonal coordinates weighted so the map equals `⟨A_k, X⟩`.
    fn operator_matrix(&self) -> (DMatrix<f64>, Vec<(usize, usize, usize)>) {
        let mut index = Vec::with_capacity(self.svec_len());
        let mut offsets = Vec::new();
        for (b, &n) in self.block_dims.iter().enumerate() {
            offsets.push(index.len());
            for i in 0..n {
                for j in i..n {
                    index.push((b, i, j));
                }
            }
        }
        let pos = |b: usize, i: usize, j: usize| {
            let n = self.block_dims[b];
            offsets[b] + i * n - i * (i + 1) / 2 + j
        };
        let mut op = DMatrix::zeros(self.constraints.len(), index.len());
        for (k, a) in self.constraints.iter().enumerate() {
            for e in a {
                let w = if e.row == e.col { 1.0 } else { 2.0 };
                op[(k, pos(e.block, e.row, e.col))] += w * e.value;
            }
        }
        (op, index)
    }

    fn standard(&self) -> StandardForm {
        StandardForm {
            dims: self.block_dims.clone(),
            a: self.constraints.clone(),
            b: self.rhs.clone(),
            c: self.objective.clone().unwrap_or_default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Feasible,
    Infeasible,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub primal: Vec<DMatrix<f64>>,
    /// Multipliers `y`; for infeasible problems a witness with
    /// `Σ y_k A_k ⪯ ε I` and `bᵀy > 0`.
    pub dual: Vec<f64>,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub complementarity: f64,
    pub min_eigenvalue: f64,
    pub iterations: usize,
}

fn min_eig(blocks: &[DMatrix<f64>]) -> f64 {
    blocks
        .iter()
        .flat_map(|b| b.symmetric_eigenvalues().iter().copied().collect::<Vec<_>>())
        .fold(f64::INFINITY, f64::min)
}

/// Decides feasibility and, when an objective is present, optimizes.
///
/// Phase one minimizes `s ≥ 0` subject to `⟨A_k, X⟩ - s·tr(A_k) = b_k` with a
/// trace bound, which always has a strictly feasible start. Its optimum is zero
/// exactly when the original problem is feasible, and its dual multipliers give
/// an infeasibility witness otherwise.
pub fn solve(prob: &SdpProblem, opts: &SolverOptions) -> Result<SdpSolution> {
    let m = prob.num_constraints();
    let dims = prob.block_dims.clone();
    let nb = dims.len();
    let b = DVector::from_vec(prob.rhs.clone());

    // a least-squares point tells whether the affine constraints are consistent
    let (op, index) = prob.operator_matrix();
    let z = if m > 0 {
        let svd = op.clone().svd(true, true);
        let eps = 1e-12 * svd.singular_values.max().max(1.0);
        svd.solve(&b, eps).map_err(|e| Error::Numerical(e.to_string()))?
    } else {
        DVector::zeros(index.len())
    };
    let resid = &b - &op * &z;
    if resid.norm() > 1e-7 * (1.0 + b.norm()) {
        let y: Vec<f64> = resid.iter().copied().collect();
        return Ok(SdpSolution {
            status: SdpStatus::Infeasible,
            primal: dims.iter().map(|&n| DMatrix::zeros(n, n)).collect(),
            dual: y,
            primal_residual: resid.norm(),
            dual_residual: 0.0,
            complementarity: 0.0,
            min_eigenvalue: f64::NAN,
            iterations: 0,
        });
    }
    let mut z_blocks: Vec<DMatrix<f64>> = dims.iter().map(|&n| DMatrix::zeros(n, n)).collect();
    for (k, &(bl, i, j)) in index.iter().enumerate() {
        z_blocks[bl][(i, j)] = z[k];
        z_blocks[bl][(j, i)] = z[k];
    }
    let z_norm: f64 = z_blocks.iter().map(|m| m.norm_squared()).sum::<f64>().sqrt();
    let total: usize = dims.iter().sum();
    let bound = 100.0 * (1.0 + z_norm) * total as f64;

    let s_block = nb;
    let u_block = nb + 1;
    let mut p1_dims = dims.clone();
    p1_dims.extend([1, 1]);
    let mut a = Vec::with_capacity(m + 1);
    for con in &prob.constraints {
        let mut e = con.clone();
        let tr: f64 = con.iter().filter(|e| e.row == e.col).map(|e| e.value).sum();
        if tr != 0.0 {
            e.push(Entry {
                block: s_block,
                row: 0,
                col: 0,
                value: -tr,
            });
        }
        a.push(e);
    }
    let mut trace = Vec::new();
    for (bl, &n) in dims.iter().enumerate() {
        for i in 0..n {
            trace.push(Entry {
                block: bl,
                row: i,
                col: i,
                value: 1.0,
            });
        }
    }
    trace.push(Entry {
        block: u_block,
        row: 0,
        col: 0,
        value: 1.0,
    });
    a.push(trace);
    let mut rhs = prob.rhs.clone();
    rhs.push(bound);
    let phase1 = StandardForm {
        dims: p1_dims,
        a,
        b: rhs,
        c: vec![Entry {
            block: s_block,
            row: 0,
            col: 0,
            value: 1.0,
        }],
    };
    let r1 = super::run_ipm(&phase1, opts)?;
    let s_opt = r1.x[s_block][(0, 0)];
    let scale = 1.0 + b.amax();
    if !r1.converged {
        let primal: Vec<DMatrix<f64>> = r1.x[..nb].to_vec();
        return Ok(SdpSolution {
            status: SdpStatus::MaxIterations,
            min_eigenvalue: min_eig(&primal),
            primal,
            dual: r1.y.iter().take(m).copied().collect(),
            primal_residual: r1.primal_infeasibility,
            dual_residual: r1.dual_infeasibility,
            complementarity: r1.relative_gap,
            iterations: r1.iterations,
        });
    }
    if s_opt > opts.infeasibility_threshold * scale {
        return Ok(SdpSolution {
            status: SdpStatus::Infeasible,
            primal: r1.x[..nb].to_vec(),
            dual: r1.y.iter().take(m).copied().collect(),
            primal_residual: r1.primal_infeasibility,
            dual_residual: r1.dual_infeasibility,
            complementarity: r1.relative_gap,
            min_eigenvalue: -s_opt,
            iterations: r1.iterations,
        });
    }
    let shifted: Vec<DMatrix<f64>> = r1.x[..nb]
        .iter()
        .map(|x| x - DMatrix::identity(x.nrows(), x.ncols()) * s_opt)
        .collect();

    let Some(_) = &prob.objective else {
        let ax = prob.apply(&shifted);
        let res = ax
            .iter()
            .zip(&prob.rhs)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        return Ok(SdpSolution {
            status: SdpStatus::Feasible,
            min_eigenvalue: min_eig(&shifted),
            primal: shifted,
            dual: r1.y.iter().take(m).copied().collect(),
            primal_residual: res,
            dual_residual: r1.dual_infeasibility,
            complementarity: r1.relative_gap,
            iterations: r1.iterations,
        });
    };

    let r2 = super::run_ipm(&prob.standard(), opts)?;
    Ok(SdpSolution {
        status: if r2.converged {
            SdpStatus::Feasible
        } else {
            SdpStatus::MaxIterations
        },
        min_eigenvalue: min_eig(&r2.x),
        primal: r2.x,
        dual: r2.y.iter().copied().collect(),
        primal_residual: r2.primal_infeasibility,
        dual_residual: r2.dual_infeasibility,
        complementarity: r2.relative_gap,
        iterations: r1.iterations + r2.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_by_one(rhs: f64) -> SdpProblem {
        let mut p = SdpProblem::new(vec![1]).unwrap();
        p.add_dense_constraint(&[DMatrix::from_element(1, 1, 1.0)], rhs)
            .unwrap();
        p
    }

    #[test]
    fn unit_entry_is_feasible() {
        let sol = solve(&one_by_one(1.0), &SolverOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Feasible);
        assert!((sol.primal[0][(0, 0)] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn negative_entry_is_infeasible() {
        let sol = solve(&one_by_one(-1.0), &SolverOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Infeasible);
        // witness: y A ⪯ 0 and b y > 0
        assert!(sol.dual[0] < 0.0);
    }

    #[test]
    fn inconsistent_equations_are_infeasible() {
        let mut p = one_by_one(1.0);
        p.add_dense_constraint(&[DMatrix::from_element(1, 1, 2.0)], 3.0)
            .unwrap();
        let sol = solve(&p, &SolverOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Infeasible);
        assert_eq!(sol.iterations, 0);
    }

    #[test]
    fn objective_is_optimized() {
        // minimize X11 + X22 subject to X12 = 1: optimum 2 at the all-ones matrix
        let mut p = SdpProblem::new(vec![2]).unwrap();
        p.add_sparse_constraint(
            &[SparseSym {
                block: 0,
                entries: vec![(0, 1, 0.5)],
            }],
            1.0,
        )
        .unwrap();
        p.set_dense_objective(&[DMatrix::identity(2, 2)]).unwrap();
        let sol = solve(&p, &SolverOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Feasible);
        assert!((sol.primal[0].trace() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn malformed_input() {
        let mut p = SdpProblem::new(vec![2]).unwrap();
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(
            p.add_dense_constraint(&[asym], 1.0),
            Err(Error::NotSymmetric { .. })
        ));
        assert!(p.add_dense_constraint(&[DMatrix::identity(3, 3)], 1.0).is_err());
        assert!(p
            .add_sparse_constraint(
                &[SparseSym {
                    block: 0,
                    entries: vec![(1, 0, 1.0)]
                }],
                1.0
            )
            .is_err());
        assert!(SdpProblem::new(vec![]).is_err());
    }
}
