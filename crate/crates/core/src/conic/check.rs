//! Backend-independent residual recomputation.

use super::{AffineMatrix, AffineScalar, ConicProgram};
use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;

/// Signed slack of one constraint; negative means violated.
#[derive(Clone, Debug, PartialEq)]
pub struct SlackReport {
    pub label: String,
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ViolationReport {
    pub slacks: Vec<SlackReport>,
    /// `max(0, −min slack)`.
    pub max_violation: f64,
}

impl ViolationReport {
    pub fn worst(&self) -> Option<&SlackReport> {
        self.slacks
            .iter()
            .min_by(|a, b| a.slack.total_cmp(&b.slack))
    }
}

pub fn evaluate_scalar(e: &AffineScalar, mats: &[HermitianMatrix], scalars: &[f64]) -> Result<f64> {
    e.evaluate(mats, scalars)
}

pub fn evaluate_lmi(e: &AffineMatrix, mats: &[HermitianMatrix], scalars: &[f64]) -> Result<HermitianMatrix> {
    e.evaluate(mats, scalars)
}

/// Slacks of every constraint at the given point: equality rows report
/// `−|value|`, inequalities their value, cones `bound − ‖entries‖`, LMIs and
/// matrix variables their smallest eigenvalue, scalar bounds `x − lower`.
pub fn check_solution(p: &ConicProgram, mats: &[HermitianMatrix], scalars: &[f64]) -> Result<ViolationReport> {
    if mats.len() != p.matrix_vars.len() || scalars.len() != p.scalar_vars.len() {
        return Err(Error::Program("assignment does not match the program's variables".into()));
    }
    for (m, v) in mats.iter().zip(&p.matrix_vars) {
        if m.dim() != v.dim {
            return Err(Error::DimensionMismatch {
                expected: v.dim,
                found: m.dim(),
            });
        }
    }
    let mut slacks = Vec::new();
    for c in &p.eq_constraints {
        slacks.push(SlackReport {
            label: c.label.clone(),
            slack: -c.expr.evaluate(mats, scalars)?.abs(),
        });
    }
    for c in &p.ineq_constraints {
        slacks.push(SlackReport {
            label: c.label.clone(),
            slack: c.expr.evaluate(mats, scalars)?,
        });
    }
    for c in &p.soc_constraints {
        let mut sq = 0.0;
        for e in &c.expr.entries {
            let v = e.evaluate(mats, scalars)?;
            sq += v * v;
        }
        slacks.push(SlackReport {
            label: c.label.clone(),
            slack: c.expr.bound.evaluate(mats, scalars)? - sq.sqrt(),
        });
    }
    for c in &p.lmi_constraints {
        slacks.push(SlackReport {
            label: c.label.clone(),
            slack: c.expr.evaluate(mats, scalars)?.min_eigenvalue(),
        });
    }
    for (m, v) in mats.iter().zip(&p.matrix_vars) {
        slacks.push(SlackReport {
            label: format!("psd:{}", v.name),
            slack: m.min_eigenvalue(),
        });
    }
    for (x, v) in scalars.iter().zip(&p.scalar_vars) {
        if let Some(lb) = v.lower {
            slacks.push(SlackReport {
                label: format!("lower:{}", v.name),
                slack: x - lb,
            });
        }
    }
    let min = slacks.iter().map(|s| s.slack).fold(f64::INFINITY, f64::min);
    Ok(ViolationReport {
        slacks,
        max_violation: if min.is_finite() { (-min).max(0.0) } else { 0.0 },
    })
}
