//! Infeasible-start primal-dual path-following method for block-diagonal SDPs.
//!
//! Primal: minimize ⟨C, X⟩ subject to ⟨A_k, X⟩ = b_k, X ⪰ 0.
//! Dual: maximize bᵀy subject to C - Σ y_k A_k = S ⪰ 0.
//!
//! Each iteration computes the Nesterov-Todd scaling point from Cholesky
//! factors and one SVD per block, forms the dense Schur complement and takes a
//! Mehrotra predictor-corrector step.

use nalgebra::{DMatrix, DVector};

use super::SolverOptions;

/// One structural nonzero of a symmetric constraint matrix (`row <= col`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct StandardForm {
    pub dims: Vec<usize>,
    pub a: Vec<Vec<Entry>>,
    pub b: Vec<f64>,
    pub c: Vec<Entry>,
}

#[derive(Debug, Clone)]
pub(crate) struct IpmResult {
    pub x: Vec<DMatrix<f64>>,
    pub y: DVector<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub relative_gap: f64,
    #[cfg_attr(not(test), allow(dead_code))]
    pub primal_objective: f64,
    #[cfg_attr(not(test), allow(dead_code))]
    pub dual_objective: f64,
}

fn zeros(dims: &[usize]) -> Vec<DMatrix<f64>> {
    dims.iter().map(|&n| DMatrix::zeros(n, n)).collect()
}

fn apply(entries: &[Entry], x: &[DMatrix<f64>]) -> f64 {
    entries
        .iter()
        .map(|e| {
            let v = x[e.block][(e.row, e.col)];
            if e.row == e.col {
                e.value * v
            } else {
                2.0 * e.value * v
            }
        })
        .sum()
}

fn add_scaled(out: &mut [DMatrix<f64>], entries: &[Entry], coef: f64) {
    for e in entries {
        out[e.block][(e.row, e.col)] += coef * e.value;
        if e.row != e.col {
            out[e.block][(e.col, e.row)] += coef * e.value;
        }
    }
}

fn inner(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn frob(a: &[DMatrix<f64>]) -> f64 {
    a.iter().map(|x| x.norm_squared()).sum::<f64>().sqrt()
}

fn entries_norm(entries: &[Entry]) -> f64 {
    entries
        .iter()
        .map(|e| {
            if e.row == e.col {
                e.value * e.value
            } else {
                2.0 * e.value * e.value
            }
        })
        .sum::<f64>()
        .sqrt()
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let t = m.transpose();
    *m += t;
    *m *= 0.5;
}

impl StandardForm {
    fn op_a(&self, x: &[DMatrix<f64>]) -> DVector<f64> {
        DVector::from_iterator(self.a.len(), self.a.iter().map(|a| apply(a, x)))
    }

    fn op_at(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let mut out = zeros(&self.dims);
        for (k, a) in self.a.iter().enumerate() {
            if y[k] != 0.0 {
                add_scaled(&mut out, a, y[k]);
            }
        }
        out
    }

    fn c_dense(&self) -> Vec<DMatrix<f64>> {
        let mut out = zeros(&self.dims);
        add_scaled(&mut out, &self.c, 1.0);
        out
    }
}

/// Nesterov-Todd scaling data for one block: `X = G D Gᵀ`, `S = G⁻ᵀ D G⁻¹`.
struct Scaling {
    g: DMatrix<f64>,
    w: DMatrix<f64>,
    d: DVector<f64>,
}

fn nt_scaling(x: &DMatrix<f64>, s: &DMatrix<f64>) -> Option<Scaling> {
    let lx = x.clone().cholesky()?.l();
    let ls = s.clone().cholesky()?.l();
    let prod = ls.transpose() * &lx;
    let svd = prod.svd(false, true);
    let v_t = svd.v_t?;
    let d = svd.singular_values;
    if d.iter().any(|&v| !v.is_finite() || v <= 0.0) {
        return None;
    }
    let mut g = lx * v_t.transpose();
    for (j, mut col) in g.column_iter_mut().enumerate() {
        col /= d[j].sqrt();
    }
    let w = &g * g.transpose();
    Some(Scaling { g, w, d })
}

/// Largest step keeping `D + α Δ` PSD, via the eigenvalues of `D^-1/2 Δ D^-1/2`.
fn max_step(d: &DVector<f64>, delta: &DMatrix<f64>) -> f64 {
    let n = d.len();
    let mut m = delta.clone();
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] /= (d[i] * d[j]).sqrt();
        }
    }
    symmetrize(&mut m);
    let lmin = m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
    if lmin < 0.0 {
        -1.0 / lmin
    } else {
        f64::INFINITY
    }
}

/// Solves `M v = r` with Cholesky, regularizing the diagonal when needed.
fn solve_schur(m: &DMatrix<f64>) -> Option<SchurFactor> {
    if let Some(c) = m.clone().cholesky() {
        return Some(SchurFactor::Chol(c));
    }
    let scale = m.diagonal().amax().max(1e-300);
    for exp in [-14, -12, -10, -8] {
        let mut reg = m.clone();
        for i in 0..m.nrows() {
            reg[(i, i)] += scale * 10f64.powi(exp);
        }
        if let Some(c) = reg.cholesky() {
            return Some(SchurFactor::Chol(c));
        }
    }
    let lu = m.clone().lu();
    Some(SchurFactor::Lu(lu))
}

enum SchurFactor {
    Chol(nalgebra::Cholesky<f64, nalgebra::Dyn>),
    Lu(nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>),
}

impl SchurFactor {
    fn solve(&self, r: &DVector<f64>) -> Option<DVector<f64>> {
        match self {
            SchurFactor::Chol(c) => Some(c.solve(r)),
            SchurFactor::Lu(l) => l.solve(r),
        }
    }
}

/// `W A W` for a sparse symmetric `A` restricted to one block.
fn congruence(w: &DMatrix<f64>, entries: &[&Entry]) -> DMatrix<f64> {
    let n = w.nrows();
    if entries.len() * 2 > n {
        let mut a = DMatrix::zeros(n, n);
        for e in entries {
            a[(e.row, e.col)] += e.value;
            if e.row != e.col {
                a[(e.col, e.row)] += e.value;
            }
        }
        return w * a * w;
    }
    let mut out = DMatrix::zeros(n, n);
    for e in entries {
        let wr = w.column(e.row);
        let wc = w.column(e.col);
        if e.row == e.col {
            out.ger(e.value, &wr, &wr, 1.0);
        } else {
            out.ger(e.value, &wr, &wc, 1.0);
            out.ger(e.value, &wc, &wr, 1.0);
        }
    }
    out
}

struct Direction {
    dx: Vec<DMatrix<f64>>,
    dy: DVector<f64>,
    ds: Vec<DMatrix<f64>>,
    dx_scaled: Vec<DMatrix<f64>>,
    ds_scaled: Vec<DMatrix<f64>>,
}

pub(crate) fn run(sf: &StandardForm, opts: &SolverOptions) -> IpmResult {
    let m = sf.a.len();
    let n_total: usize = sf.dims.iter().sum();
    let nf = n_total as f64;
    let c_mat = sf.c_dense();
    let b = DVector::from_vec(sf.b.clone());
    let b_norm = b.norm();
    let c_norm = frob(&c_mat);

    let mut xi = 10f64.max(nf.sqrt());
    let mut eta = 10f64.max(nf.sqrt()).max(c_norm);
    for (k, a) in sf.a.iter().enumerate() {
        let an = entries_norm(a);
        xi = xi.max(nf * (1.0 + sf.b[k].abs()) / (1.0 + an));
        eta = eta.max(an);
    }
    let mut x: Vec<DMatrix<f64>> = sf.dims.iter().map(|&n| DMatrix::identity(n, n) * xi).collect();
    let mut s: Vec<DMatrix<f64>> = sf.dims.iter().map(|&n| DMatrix::identity(n, n) * eta).collect();
    let mut y = DVector::zeros(m);

    // constraint entries grouped by block, for the Schur complement
    let by_block: Vec<Vec<Vec<&Entry>>> =
        sf.a.iter()
            .map(|a| {
                let mut g: Vec<Vec<&Entry>> = vec![Vec::new(); sf.dims.len()];
                for e in a {
                    g[e.block].push(e);
                }
                g
            })
            .collect();

    let result = |x: &[DMatrix<f64>], y: &DVector<f64>, it, conv, pinf, dinf, gap| {
        let pobj = inner(&c_mat, x);
        let dobj = b.dot(y);
        IpmResult {
            x: x.to_vec(),
            y: y.clone(),
            converged: conv,
            iterations: it,
            primal_infeasibility: pinf,
            dual_infeasibility: dinf,
            relative_gap: gap,
            primal_objective: pobj,
            dual_objective: dobj,
        }
    };

    let mut stalls = 0;
    for it in 0..=opts.max_iterations {
        let ax = sf.op_a(&x);
        let rp = &b - &ax;
        let aty = sf.op_at(&y);
        let rd: Vec<DMatrix<f64>> = (0..sf.dims.len()).map(|i| &c_mat[i] - &aty[i] - &s[i]).collect();
        let xs = inner(&x, &s);
        let mu = xs / nf;
        let pobj = inner(&c_mat, &x);
        let dobj = b.dot(&y);
        let pinf = rp.norm() / (1.0 + b_norm);
        let dinf = frob(&rd) / (1.0 + c_norm);
        let gap = xs.abs() / (1.0 + pobj.abs() + dobj.abs());
        let msg = format!(
            "iter {it:3}  gap {gap:9.2e}  pinf {pinf:9.2e}  dinf {dinf:9.2e}  pobj {pobj:12.5e}  dobj {dobj:12.5e}"
        );
        if opts.verbose {
            log::info!("{msg}");
        } else {
            log::trace!("{msg}");
        }
        if pinf < opts.feasibility_tol && dinf < opts.feasibility_tol && gap < opts.gap_tol {
            return result(&x, &y, it, true, pinf, dinf, gap);
        }
        if it == opts.max_iterations || stalls >= 4 || !mu.is_finite() {
            return result(&x, &y, it, false, pinf, dinf, gap);
        }

        let mut scal = Vec::with_capacity(sf.dims.len());
        for (xb, sb) in x.iter().zip(&s) {
            match nt_scaling(xb, sb) {
                Some(sc) => scal.push(sc),
                None => return result(&x, &y, it, false, pinf, dinf, gap),
            }
        }

        // Schur complement M_kl = ⟨A_k, W A_l W⟩
        let mut schur = DMatrix::zeros(m, m);
        for l in 0..m {
            let mut p: Vec<Option<DMatrix<f64>>> = vec![None; sf.dims.len()];
            for (blk, ents) in by_block[l].iter().enumerate() {
                if !ents.is_empty() {
                    p[blk] = Some(congruence(&scal[blk].w, ents));
                }
            }
            for k in 0..m {
                let mut v = 0.0;
                for e in &sf.a[k] {
                    if let Some(pb) = &p[e.block] {
                        let q = pb[(e.row, e.col)];
                        v += if e.row == e.col { e.value * q } else { 2.0 * e.value * q };
                    }
                }
                schur[(k, l)] = v;
            }
        }
        symmetrize(&mut schur);
        let Some(factor) = solve_schur(&schur) else {
            return result(&x, &y, it, false, pinf, dinf, gap);
        };

        // W Rd W is shared by both solves
        let wrdw: Vec<DMatrix<f64>> = scal.iter().zip(&rd).map(|(sc, r)| &sc.w * r * &sc.w).collect();
        let a_wrdw = sf.op_a(&wrdw);

        let direction = |rc: &[DMatrix<f64>]| -> Option<Direction> {
            // T solves D T + T D = 2 Rc in scaled coordinates
            let t: Vec<DMatrix<f64>> = scal
                .iter()
                .zip(rc)
                .map(|(sc, r)| {
                    let n = sc.d.len();
                    DMatrix::from_fn(n, n, |i, j| 2.0 * r[(i, j)] / (sc.d[i] + sc.d[j]))
                })
                .collect();
            let gtg: Vec<DMatrix<f64>> = scal
                .iter()
                .zip(&t)
                .map(|(sc, tb)| &sc.g * tb * sc.g.transpose())
                .collect();
            let rhs = &rp - sf.op_a(&gtg) + &a_wrdw;
            let dy = factor.solve(&rhs)?;
            let atdy = sf.op_at(&dy);
            let mut ds: Vec<DMatrix<f64>> = rd.iter().zip(&atdy).map(|(r, a)| r - a).collect();
            ds.iter_mut().for_each(symmetrize);
            let mut dx: Vec<DMatrix<f64>> = (0..scal.len())
                .map(|i| &gtg[i] - &scal[i].w * &ds[i] * &scal[i].w)
                .collect();
            dx.iter_mut().for_each(symmetrize);
            let ds_scaled: Vec<DMatrix<f64>> = scal
                .iter()
                .zip(&ds)
                .map(|(sc, d)| sc.g.transpose() * d * &sc.g)
                .collect();
            let dx_scaled: Vec<DMatrix<f64>> = t.iter().zip(&ds_scaled).map(|(tb, d)| tb - d).collect();
            Some(Direction {
                dx,
                dy,
                ds,
                dx_scaled,
                ds_scaled,
            })
        };
        let steps = |dir: &Direction| -> (f64, f64) {
            let mut ap = f64::INFINITY;
            let mut ad = f64::INFINITY;
            for (i, sc) in scal.iter().enumerate() {
                ap = ap.min(max_step(&sc.d, &dir.dx_scaled[i]));
                ad = ad.min(max_step(&sc.d, &dir.ds_scaled[i]));
            }
            (ap, ad)
        };

        // predictor
        let rc_aff: Vec<DMatrix<f64>> = scal
            .iter()
            .map(|sc| -DMatrix::from_diagonal(&sc.d.map(|v| v * v)))
            .collect();
        let Some(aff) = direction(&rc_aff) else {
            return result(&x, &y, it, false, pinf, dinf, gap);
        };
        let (ap, ad) = steps(&aff);
        let (ap, ad) = (ap.min(1.0), ad.min(1.0));
        let mut mu_aff = 0.0;
        for i in 0..x.len() {
            let xa = &x[i] + &aff.dx[i] * ap;
            let sa = &s[i] + &aff.ds[i] * ad;
            mu_aff += xa.dot(&sa);
        }
        mu_aff /= nf;
        let sigma = (mu_aff / mu).max(0.0).powi(3).min(1.0);

        // corrector
        let rc: Vec<DMatrix<f64>> = scal
            .iter()
            .enumerate()
            .map(|(i, sc)| {
                let n = sc.d.len();
                let mut r = DMatrix::identity(n, n) * (sigma * mu) - DMatrix::from_diagonal(&sc.d.map(|v| v * v));
                let mut cross = &aff.dx_scaled[i] * &aff.ds_scaled[i];
                symmetrize(&mut cross);
                r -= cross;
                r
            })
            .collect();
        let Some(dir) = direction(&rc) else {
            return result(&x, &y, it, false, pinf, dinf, gap);
        };
        let (ap, ad) = steps(&dir);
        let gamma = opts.step_fraction;
        let ap = (gamma * ap).min(1.0);
        let ad = (gamma * ad).min(1.0);
        if ap < 1e-9 && ad < 1e-9 {
            stalls += 1;
        } else {
            stalls = 0;
        }
        for i in 0..x.len() {
            x[i] += &dir.dx[i] * ap;
            s[i] += &dir.ds[i] * ad;
            symmetrize(&mut x[i]);
            symmetrize(&mut s[i]);
        }
        y += &dir.dy * ad;
    }
    unreachable!("loop returns on the final iteration")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(block: usize, row: usize, col: usize, value: f64) -> Entry {
        Entry { block, row, col, value }
    }

    #[test]
    fn tiny_lp_in_sdp_form() {
        // minimize x1 + 2 x2 subject to x1 + x2 = 1 with 1x1 blocks: optimum x1 = 1
        let sf = StandardForm {
            dims: vec![1, 1],
            a: vec![vec![e(0, 0, 0, 1.0), e(1, 0, 0, 1.0)]],
            b: vec![1.0],
            c: vec![e(0, 0, 0, 1.0), e(1, 0, 0, 2.0)],
        };
        let r = run(&sf, &SolverOptions::default());
        assert!(r.converged);
        assert!((r.x[0][(0, 0)] - 1.0).abs() < 1e-6);
        assert!((r.primal_objective - 1.0).abs() < 1e-6);
        assert!((r.dual_objective - 1.0).abs() < 1e-6);
    }

    #[test]
    fn eigenvalue_problem() {
        // minimize ⟨C, X⟩ with tr X = 1 gives the smallest eigenvalue of C
        let sf = StandardForm {
            dims: vec![2],
            a: vec![vec![e(0, 0, 0, 1.0), e(0, 1, 1, 1.0)]],
            b: vec![1.0],
            c: vec![e(0, 0, 0, 2.0), e(0, 0, 1, 1.0), e(0, 1, 1, 2.0)],
        };
        let r = run(&sf, &SolverOptions::default());
        assert!(r.converged);
        assert!((r.primal_objective - 1.0).abs() < 1e-6, "{}", r.primal_objective);
    }
}
