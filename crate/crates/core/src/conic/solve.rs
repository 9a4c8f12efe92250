//! Lowering to real cones and the Clarabel backend.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};
use nalgebra::DMatrix;

use super::check::check_solution;
use super::{AffineMatrix, AffineScalar, ConicProgram, MatVar};
use crate::error::{Error, Result};
use crate::hermitian::{HermitianMatrix, C64};

pub const DEFAULT_TOL: f64 = 1e-8;

/// Slack accepted on reduced-accuracy exits before they count as failures.
const ALMOST_SOLVED_SLACK: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalFailure,
}

#[derive(Clone, Debug)]
pub struct ConicSolution {
    pub status: SolveStatus,
    /// Objective including its constant term; NaN unless optimal.
    pub objective: f64,
    pub matrices: Vec<HermitianMatrix>,
    pub scalars: Vec<f64>,
    /// Largest negative slack over all constraints, recomputed from the
    /// returned point. Zero when every constraint holds.
    pub max_violation: f64,
    pub iterations: u32,
    pub diagnostics: String,
}

impl ConicSolution {
    pub fn matrix(&self, v: MatVar) -> &HermitianMatrix {
        &self.matrices[v.0]
    }

    pub fn scalar(&self, v: super::ScalarVar) -> f64 {
        self.scalars[v.0]
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

/// Column layout of the real decision vector: for every matrix variable its
/// `n²` real parameters (diagonal, then real/imaginary parts of the strict
/// upper triangle row by row), followed by the scalars.
struct Layout {
    mat_offset: Vec<usize>,
    mat_dim: Vec<usize>,
    scalar_offset: usize,
    n: usize,
}

impl Layout {
    fn new(p: &ConicProgram) -> Self {
        let mut off = 0;
        let mut mat_offset = Vec::new();
        let mut mat_dim = Vec::new();
        for v in &p.matrix_vars {
            mat_offset.push(off);
            mat_dim.push(v.dim);
            off += v.dim * v.dim;
        }
        Layout {
            mat_offset,
            mat_dim,
            scalar_offset: off,
            n: off + p.scalar_vars.len(),
        }
    }

    /// Columns of the real and imaginary parts of `X_ij`, `i < j`.
    fn pair_cols(&self, v: usize, i: usize, j: usize) -> (usize, usize) {
        let n = self.mat_dim[v];
        // pairs before row i: Σ_{r<i} (n−1−r)
        let k = i * (2 * n - i - 1) / 2 + (j - i - 1);
        let c = self.mat_offset[v] + n + 2 * k;
        (c, c + 1)
    }

    fn diag_col(&self, v: usize, i: usize) -> usize {
        self.mat_offset[v] + i
    }

    fn unpack(&self, x: &[f64], v: usize) -> HermitianMatrix {
        let n = self.mat_dim[v];
        let mut m = DMatrix::<C64>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(x[self.diag_col(v, i)], 0.0);
            for j in i + 1..n {
                let (cr, ci) = self.pair_cols(v, i, j);
                m[(i, j)] = C64::new(x[cr], x[ci]);
                m[(j, i)] = C64::new(x[cr], -x[ci]);
            }
        }
        HermitianMatrix::symmetrized(m)
    }

    /// Sparse coefficients of a real affine form over the decision vector.
    fn scalar_row(&self, e: &AffineScalar) -> Vec<(usize, f64)> {
        let mut row = Vec::new();
        for &(s, a) in &e.scalar_terms {
            row.push((self.scalar_offset + s.0, a));
        }
        for (v, c) in &e.matrix_terms {
            let n = self.mat_dim[v.0];
            for i in 0..n {
                row.push((self.diag_col(v.0, i), c.get(i, i).re));
                for j in i + 1..n {
                    let (cr, ci) = self.pair_cols(v.0, i, j);
                    let z = c.get(i, j);
                    row.push((cr, 2.0 * z.re));
                    row.push((ci, 2.0 * z.im));
                }
            }
        }
        row
    }
}

/// Triplet accumulator for `A x + s = b`.
struct Rows {
    ai: Vec<usize>,
    aj: Vec<usize>,
    av: Vec<f64>,
    b: Vec<f64>,
}

impl Rows {
    fn push_scalar(&mut self, layout: &Layout, e: &AffineScalar) {
        let r = self.b.len();
        for (c, a) in layout.scalar_row(e) {
            if a != 0.0 {
                self.ai.push(r);
                self.aj.push(c);
                self.av.push(-a);
            }
        }
        self.b.push(e.constant);
    }

    /// Rows of the scaled upper-triangle vectorization of the real embedding
    /// of `expr`; returns the embedding order.
    fn push_lmi(&mut self, layout: &Layout, expr: &AffineMatrix) -> usize {
        let m = expr.dim;
        let k = 2 * m;
        let base = self.b.len();
        self.b.extend(svec_embedding(expr.constant.as_matrix()));
        let add = |col: usize, mat: &DMatrix<C64>, this: &mut Rows| {
            for (idx, v) in svec_embedding(mat).into_iter().enumerate() {
                if v != 0.0 {
                    this.ai.push(base + idx);
                    this.aj.push(col);
                    this.av.push(-v);
                }
            }
        };
        for (s, h) in &expr.scalar_terms {
            add(layout.scalar_offset + s.0, h.as_matrix(), self);
        }
        for t in &expr.congruence_terms {
            let v = t.var.0;
            let n = layout.mat_dim[v];
            let b = &t.basis;
            let coef = C64::new(t.coef, 0.0);
            let outer = |i: usize, j: usize| -> DMatrix<C64> {
                // (B† E_ij B)_{kl} = conj(B_ik) B_jl
                let mut o = DMatrix::<C64>::zeros(m, m);
                for kk in 0..m {
                    let bik = b[(i, kk)].conj() * coef;
                    for l in 0..m {
                        o[(kk, l)] = bik * b[(j, l)];
                    }
                }
                o
            };
            for i in 0..n {
                add(layout.diag_col(v, i), &outer(i, i), self);
                for j in i + 1..n {
                    let (cr, ci) = layout.pair_cols(v, i, j);
                    let oij = outer(i, j);
                    let oji = outer(j, i);
                    add(cr, &(&oij + &oji), self);
                    let im = (&oij - &oji) * C64::new(0.0, 1.0);
                    add(ci, &im, self);
                }
            }
        }
        k
    }
}

/// Scaled vectorization (upper triangle, column-major, off-diagonals ×√2) of
/// `[[Re M, −Im M], [Im M, Re M]]`.
fn svec_embedding(mat: &DMatrix<C64>) -> Vec<f64> {
    let m = mat.nrows();
    let k = 2 * m;
    let mut out = Vec::with_capacity(k * (k + 1) / 2);
    for c in 0..k {
        for r in 0..=c {
            let v = if c < m {
                mat[(r, c)].re
            } else if r < m {
                -mat[(r, c - m)].im
            } else {
                mat[(r - m, c - m)].re
            };
            out.push(if r == c { v } else { v * std::f64::consts::SQRT_2 });
        }
    }
    out
}

/// Solve `p` to tolerance `tol` with Clarabel.
pub fn solve(p: &ConicProgram, tol: f64) -> Result<ConicSolution> {
    p.validate()?;
    let layout = Layout::new(p);
    let mut rows = Rows {
        ai: Vec::new(),
        aj: Vec::new(),
        av: Vec::new(),
        b: Vec::new(),
    };
    let mut cones: Vec<SupportedConeT<f64>> = Vec::new();

    if !p.eq_constraints.is_empty() {
        for c in &p.eq_constraints {
            rows.push_scalar(&layout, &c.expr);
        }
        cones.push(SupportedConeT::ZeroConeT(p.eq_constraints.len()));
    }
    let mut nonneg = 0;
    for c in &p.ineq_constraints {
        rows.push_scalar(&layout, &c.expr);
        nonneg += 1;
    }
    for (i, v) in p.scalar_vars.iter().enumerate() {
        if let Some(lb) = v.lower {
            let e = AffineScalar::var(super::ScalarVar(i)).plus_const(-lb);
            rows.push_scalar(&layout, &e);
            nonneg += 1;
        }
    }
    if nonneg > 0 {
        cones.push(SupportedConeT::NonnegativeConeT(nonneg));
    }
    for c in &p.soc_constraints {
        rows.push_scalar(&layout, &c.expr.bound);
        for e in &c.expr.entries {
            rows.push_scalar(&layout, e);
        }
        cones.push(SupportedConeT::SecondOrderConeT(1 + c.expr.entries.len()));
    }
    for (v, info) in p.matrix_vars.iter().enumerate() {
        let id = AffineMatrix::zeros(info.dim).plus_congruence(
            MatVar(v),
            1.0,
            DMatrix::<C64>::identity(info.dim, info.dim),
        );
        let k = rows.push_lmi(&layout, &id);
        cones.push(SupportedConeT::PSDTriangleConeT(k));
    }
    for c in &p.lmi_constraints {
        let k = rows.push_lmi(&layout, &c.expr);
        cones.push(SupportedConeT::PSDTriangleConeT(k));
    }

    let m = rows.b.len();
    let a = CscMatrix::new_from_triplets(m, layout.n, rows.ai, rows.aj, rows.av);
    let pmat = CscMatrix::zeros((layout.n, layout.n));
    let mut q = vec![0.0; layout.n];
    for (c, v) in layout.scalar_row(&p.objective) {
        q[c] += v;
    }

    let settings = DefaultSettingsBuilder::default()
        .verbose(false)
        .tol_gap_abs(tol)
        .tol_gap_rel(tol)
        .tol_feas(tol)
        .chordal_decomposition_enable(false)
        .build()
        .map_err(|e| Error::Program(format!("solver settings: {e}")))?;
    let mut solver = DefaultSolver::new(&pmat, &q, &a, &rows.b, &cones, settings)
        .map_err(|e| Error::Program(format!("solver setup: {e}")))?;
    solver.solve();
    let sol = &solver.solution;

    let matrices: Vec<_> = (0..p.matrix_vars.len()).map(|v| layout.unpack(&sol.x, v)).collect();
    let scalars = sol.x[layout.scalar_offset..].to_vec();
    let diagnostics = format!(
        "{:?} after {} iterations, primal residual {:.3e}, dual residual {:.3e}",
        sol.status, sol.iterations, sol.r_prim, sol.r_dual
    );
    let mut out = ConicSolution {
        status: SolveStatus::NumericalFailure,
        objective: f64::NAN,
        matrices,
        scalars,
        max_violation: f64::NAN,
        iterations: sol.iterations,
        diagnostics,
    };
    match sol.status {
        SolverStatus::Solved | SolverStatus::AlmostSolved => {
            let report = check_solution(p, &out.matrices, &out.scalars)?;
            out.max_violation = report.max_violation;
            out.objective = p.objective.evaluate(&out.matrices, &out.scalars)?;
            let ok = sol.status == SolverStatus::Solved || report.max_violation <= ALMOST_SOLVED_SLACK;
            out.status = if ok {
                SolveStatus::Optimal
            } else {
                SolveStatus::NumericalFailure
            };
        }
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
            out.status = SolveStatus::Infeasible;
        }
        SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => {
            out.status = SolveStatus::Unbounded;
        }
        _ => {}
    }
    log::debug!("conic solve: {}", out.diagnostics);
    Ok(out)
}

pub fn solve_with_defaults(p: &ConicProgram) -> Result<ConicSolution> {
    solve(p, DEFAULT_TOL)
}
