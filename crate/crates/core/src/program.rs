//! Pieces shared by the bounded and outage formulations: design variables,
//! the SU energy-harvesting row, the power budget and lifting helpers.

use nalgebra::DMatrix;

use crate::conic::{AffineMatrix, AffineScalar, ConicProgram, MatVar, ScalarVar};
use crate::design::ProblemKind;
use crate::hermitian::{ComplexVector, HermitianMatrix, C64};
use crate::scenario::Scenario;

/// Lower bound on `t = 1/ρ`, a closed stand-in for `t > 1`.
pub const T_MIN: f64 = 1.0 + 1e-9;

/// Handles of the variables every formulation shares.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DesignVars {
    pub w: MatVar,
    pub sigma: MatVar,
    /// `t = 1/ρ`.
    pub t: ScalarVar,
    /// Auxiliary with `s (t − 1) ≥ 1`.
    pub s: ScalarVar,
    /// Common EH level, max-min problems only.
    pub tau: Option<ScalarVar>,
}

impl DesignVars {
    pub fn add(p: &mut ConicProgram, n_t: usize, kind: ProblemKind) -> Self {
        let w = p.add_matrix_var("W", n_t);
        let sigma = p.add_matrix_var("Sigma", n_t);
        let t = p.add_scalar_var("t", Some(T_MIN));
        let s = p.add_scalar_var("s", Some(0.0));
        let tau = match kind {
            ProblemKind::PowerMin => None,
            ProblemKind::MaxminEh => Some(p.add_scalar_var("tau", None)),
        };
        DesignVars { w, sigma, t, s, tau }
    }

    /// `Tr(C (W + Σ))`.
    pub fn total_trace(&self, c: &HermitianMatrix) -> AffineScalar {
        AffineScalar::trace(self.w, c.clone()).plus_trace(self.sigma, c.clone())
    }
}

/// Sets the objective: transmit power for power minimization, `−τ` for the
/// max-min problem.
pub fn set_objective(p: &mut ConicProgram, v: &DesignVars, n_t: usize) {
    match v.tau {
        None => p.minimize(v.total_trace(&HermitianMatrix::identity(n_t))),
        Some(tau) => p.minimize(AffineScalar::default().plus_var(tau, -1.0)),
    }
}

/// SU harvesting: `h†(W+Σ)h + σ_s² − (ψ_s/η)(1 + s) ≥ 0` with
/// `s ≥ 1/(t−1)` written as `‖(2, s − t + 1)‖ ≤ s + t − 1`.
pub fn add_su_harvesting(p: &mut ConicProgram, v: &DesignVars, sc: &Scenario, h: &ComplexVector) {
    let k = sc.psi_s / sc.eta;
    p.add_ineq(
        "su-eh",
        v.total_trace(&HermitianMatrix::outer(h))
            .plus_const(sc.sigma_s2 - k)
            .plus_var(v.s, -k),
    );
    p.add_soc(
        "su-eh-hyperbolic",
        vec![
            AffineScalar::constant(2.0),
            AffineScalar::var(v.s).plus_var(v.t, -1.0).plus_const(1.0),
        ],
        AffineScalar::var(v.s).plus_var(v.t, 1.0).plus_const(-1.0),
    );
}

/// `P_th − Tr(W + Σ) ≥ 0`.
pub fn add_power_budget(p: &mut ConicProgram, v: &DesignVars, sc: &Scenario) {
    let n = sc.n_t;
    p.add_ineq(
        "power-budget",
        v.total_trace(&HermitianMatrix::identity(n)).scaled(-1.0).plus_const(sc.p_th),
    );
}

/// `[I, g]`, so that `lift(g)† X lift(g) = [[X, Xg], [g†X, g†Xg]]`.
pub fn lift(g: &ComplexVector) -> DMatrix<C64> {
    let n = g.dim();
    let mut b = DMatrix::<C64>::zeros(n, n + 1);
    for i in 0..n {
        b[(i, i)] = C64::new(1.0, 0.0);
        b[(i, n)] = g.entries()[i];
    }
    b
}

/// `diag(top · I_n, corner)`.
pub fn bordered_diag(n: usize, top: f64, corner: f64) -> HermitianMatrix {
    let mut d = vec![top; n];
    d.push(corner);
    HermitianMatrix::from_real_diagonal(&d)
}

impl ConicProgram {
    /// Equality rows fixing matrix variable `var` to `value`.
    pub fn pin_matrix(&mut self, var: MatVar, value: &HermitianMatrix) {
        let n = self.matrix_dim(var);
        let id = AffineMatrix::zeros(n).plus_congruence(var, 1.0, DMatrix::identity(n, n));
        let name = self.matrix_vars[var.0].name.clone();
        for i in 0..n {
            for j in i..n {
                let e = id.entry(i, j);
                let z = value.get(i, j);
                self.add_eq(&format!("pin-{name}-re-{i}-{j}"), e.re.plus_const(-z.re));
                if i != j {
                    self.add_eq(&format!("pin-{name}-im-{i}-{j}"), e.im.plus_const(-z.im));
                }
            }
        }
    }
}
