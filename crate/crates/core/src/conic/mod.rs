//! Solver-neutral conic programs over Hermitian PSD matrix variables and real
//! scalars.
//!
//! Builders describe constraints in complex form; [`solve`] lowers everything
//! to real cones and hands the result to Clarabel.

mod check;
mod dump;
mod expr;
mod solve;

pub use check::{check_solution, evaluate_lmi, evaluate_scalar, SlackReport, ViolationReport};
pub use dump::parse_dump;
pub use expr::{AffineMatrix, AffineScalar, CongruenceTerm, ComplexAffine};
pub use solve::{solve, solve_with_defaults, ConicSolution, SolveStatus, DEFAULT_TOL};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hermitian::{ComplexVector, HermitianMatrix, C64};

/// Handle to a Hermitian PSD matrix variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatVar(pub usize);

/// Handle to a real scalar variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScalarVar(pub usize);

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixVarInfo {
    pub name: String,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarVarInfo {
    pub name: String,
    /// `None` means unbounded below.
    pub lower: Option<f64>,
}

/// `‖entries‖ ≤ bound`.
#[derive(Clone, Debug, PartialEq)]
pub struct SocConstraint {
    pub entries: Vec<AffineScalar>,
    pub bound: AffineScalar,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Labeled<T> {
    pub label: String,
    pub expr: T,
}

/// Minimize a linear objective subject to affine equalities, inequalities
/// (`≥ 0`), second-order cones and LMIs (`⪰ 0`). Matrix variables are
/// implicitly PSD.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConicProgram {
    pub matrix_vars: Vec<MatrixVarInfo>,
    pub scalar_vars: Vec<ScalarVarInfo>,
    pub objective: AffineScalar,
    pub eq_constraints: Vec<Labeled<AffineScalar>>,
    pub ineq_constraints: Vec<Labeled<AffineScalar>>,
    pub soc_constraints: Vec<Labeled<SocConstraint>>,
    pub lmi_constraints: Vec<Labeled<AffineMatrix>>,
}

impl ConicProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_matrix_var(&mut self, name: &str, dim: usize) -> MatVar {
        self.matrix_vars.push(MatrixVarInfo {
            name: name.to_string(),
            dim,
        });
        MatVar(self.matrix_vars.len() - 1)
    }

    pub fn add_scalar_var(&mut self, name: &str, lower: Option<f64>) -> ScalarVar {
        self.scalar_vars.push(ScalarVarInfo {
            name: name.to_string(),
            lower,
        });
        ScalarVar(self.scalar_vars.len() - 1)
    }

    pub fn matrix_dim(&self, v: MatVar) -> usize {
        self.matrix_vars[v.0].dim
    }

    pub fn find_matrix_var(&self, name: &str) -> Option<MatVar> {
        self.matrix_vars.iter().position(|v| v.name == name).map(MatVar)
    }

    pub fn find_scalar_var(&self, name: &str) -> Option<ScalarVar> {
        self.scalar_vars.iter().position(|v| v.name == name).map(ScalarVar)
    }

    pub fn minimize(&mut self, objective: AffineScalar) {
        self.objective = objective;
    }

    pub fn add_eq(&mut self, label: &str, expr: AffineScalar) {
        self.eq_constraints.push(Labeled {
            label: label.to_string(),
            expr,
        });
    }

    pub fn add_ineq(&mut self, label: &str, expr: AffineScalar) {
        self.ineq_constraints.push(Labeled {
            label: label.to_string(),
            expr,
        });
    }

    pub fn add_soc(&mut self, label: &str, entries: Vec<AffineScalar>, bound: AffineScalar) {
        self.soc_constraints.push(Labeled {
            label: label.to_string(),
            expr: SocConstraint { entries, bound },
        });
    }

    pub fn add_lmi(&mut self, label: &str, expr: AffineMatrix) {
        self.lmi_constraints.push(Labeled {
            label: label.to_string(),
            expr,
        });
    }

    /// Structural well-formedness: finite coefficients, consistent
    /// dimensions, every variable used somewhere.
    pub fn validate(&self) -> Result<()> {
        let mut mat_used = vec![false; self.matrix_vars.len()];
        let mut sc_used = vec![false; self.scalar_vars.len()];
        let mut visit = |e: &AffineScalar, what: &str| -> Result<()> {
            if !e.constant.is_finite() {
                return Err(Error::Program(format!("{what}: non-finite constant")));
            }
            for &(v, a) in &e.scalar_terms {
                if v.0 >= sc_used.len() || !a.is_finite() {
                    return Err(Error::Program(format!("{what}: bad scalar term")));
                }
                sc_used[v.0] = true;
            }
            for (v, c) in &e.matrix_terms {
                if v.0 >= mat_used.len() || c.dim() != self.matrix_vars[v.0].dim || !finite_matrix(c.as_matrix()) {
                    return Err(Error::Program(format!("{what}: bad trace term")));
                }
                mat_used[v.0] = true;
            }
            Ok(())
        };
        visit(&self.objective, "objective")?;
        for c in self.eq_constraints.iter().chain(&self.ineq_constraints) {
            visit(&c.expr, &c.label)?;
        }
        for c in &self.soc_constraints {
            visit(&c.expr.bound, &c.label)?;
            for e in &c.expr.entries {
                visit(e, &c.label)?;
            }
        }
        for c in &self.lmi_constraints {
            let m = &c.expr;
            if m.constant.dim() != m.dim || !finite_matrix(m.constant.as_matrix()) {
                return Err(Error::Program(format!("{}: bad constant block", c.label)));
            }
            for (v, h) in &m.scalar_terms {
                if v.0 >= sc_used.len() || h.dim() != m.dim || !finite_matrix(h.as_matrix()) {
                    return Err(Error::Program(format!("{}: bad scalar block", c.label)));
                }
                sc_used[v.0] = true;
            }
            for t in &m.congruence_terms {
                let ok = t.var.0 < mat_used.len()
                    && t.basis.nrows() == self.matrix_vars[t.var.0].dim
                    && t.basis.ncols() == m.dim
                    && t.coef.is_finite()
                    && finite_matrix(&t.basis);
                if !ok {
                    return Err(Error::Program(format!("{}: bad congruence term", c.label)));
                }
                mat_used[t.var.0] = true;
            }
        }
        if let Some(i) = mat_used.iter().position(|u| !u) {
            return Err(Error::Program(format!("matrix variable {} unused", self.matrix_vars[i].name)));
        }
        if let Some(i) = sc_used.iter().position(|u| !u) {
            return Err(Error::Program(format!("scalar variable {} unused", self.scalar_vars[i].name)));
        }
        Ok(())
    }

    /// Replace matrix variable `var` by `p · u u†` with a fresh scalar `p ≥ 0`.
    /// The matrix variable disappears and later handles shift down by one.
    pub fn restrict_matrix_var(&self, var: MatVar, u: &ComplexVector, scalar_name: &str) -> Result<(ConicProgram, ScalarVar)> {
        let dim = self.matrix_dim(var);
        if u.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: u.dim(),
            });
        }
        let mut out = self.clone();
        out.matrix_vars.remove(var.0);
        let p = out.add_scalar_var(scalar_name, Some(0.0));
        let shift = |v: MatVar| if v.0 > var.0 { MatVar(v.0 - 1) } else { v };
        let uu = u.as_dvector();
        let fix_scalar = |e: &mut AffineScalar| -> Result<()> {
            let mut kept = Vec::with_capacity(e.matrix_terms.len());
            for (v, c) in e.matrix_terms.drain(..) {
                if v == var {
                    e.scalar_terms.push((p, c.quad_form(u)?));
                } else {
                    kept.push((shift(v), c));
                }
            }
            e.matrix_terms = kept;
            Ok(())
        };
        fix_scalar(&mut out.objective)?;
        for c in out.eq_constraints.iter_mut().chain(out.ineq_constraints.iter_mut()) {
            fix_scalar(&mut c.expr)?;
        }
        for c in out.soc_constraints.iter_mut() {
            fix_scalar(&mut c.expr.bound)?;
            for e in c.expr.entries.iter_mut() {
                fix_scalar(e)?;
            }
        }
        for c in out.lmi_constraints.iter_mut() {
            let m = &mut c.expr;
            let mut kept = Vec::with_capacity(m.congruence_terms.len());
            for t in m.congruence_terms.drain(..) {
                if t.var == var {
                    // B† (p u u†) B = p (B†u)(B†u)†
                    let bu = ComplexVector::from_dvector(t.basis.adjoint() * uu)?;
                    m.scalar_terms.push((p, HermitianMatrix::outer(&bu).scale(t.coef)));
                } else {
                    kept.push(CongruenceTerm { var: shift(t.var), ..t });
                }
            }
            m.congruence_terms = kept;
        }
        Ok((out, p))
    }
}

fn finite_matrix(m: &DMatrix<C64>) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

#[cfg(test)]
mod tests;
