//! Bounded-error (worst-case) subproblems for a fixed `β`: S-procedure LMIs
//! for secrecy, EHR harvesting and PU interference, assembled into the
//! power-minimization and max-min EH programs.

mod trust;

pub use trust::{shifted_quadratic, worst_case_quadratic, worst_case_sinr, Extremum};

use crate::conic::{AffineMatrix, AffineScalar, ConicProgram, ScalarVar};
use crate::design::ProblemKind;
use crate::error::{Error, Result};
use crate::hermitian::{ComplexVector, HermitianMatrix};
use crate::program::{add_power_budget, add_su_harvesting, bordered_diag, lift, set_objective, DesignVars};
use crate::scenario::{ChannelSet, Scenario};

/// Inner program for one value of `β`.
#[derive(Clone, Debug)]
pub struct WorstCaseSubproblem {
    pub kind: ProblemKind,
    pub beta: f64,
    pub program: ConicProgram,
    pub vars: DesignVars,
}

/// Right-hand side of an EHR harvesting constraint.
#[derive(Clone, Copy, Debug)]
pub enum EhTarget {
    /// Fixed level (already divided by `η`).
    Fixed(f64),
    /// `scale · τ`.
    Variable { var: ScalarVar, scale: f64 },
}

/// `h†(W + (1 − 2^R β)Σ)h + (1 − 2^R β)(σ_s² + σ_sp² t) ≥ 0`.
pub fn secrecy_row(v: &DesignVars, beta: f64, sc: &Scenario, h: &ComplexVector) -> AffineScalar {
    let a = 1.0 - sc.r_min.exp2() * beta;
    let hh = HermitianMatrix::outer(h);
    AffineScalar::trace(v.w, hh.clone())
        .plus_trace(v.sigma, hh.scale(a))
        .plus_const(a * sc.sigma_s2)
        .plus_var(v.t, a * sc.sigma_sp2)
}

/// `diag(ω I, (β−1)σ_e² − ω ξ²) − [I, ḡ]† (W − (β−1)Σ) [I, ḡ] ⪰ 0`.
pub fn secrecy_lmi(
    v: &DesignVars,
    omega: ScalarVar,
    beta: f64,
    sigma_e2: f64,
    g_bar: &ComplexVector,
    xi: f64,
) -> AffineMatrix {
    let n = g_bar.dim();
    let basis = lift(g_bar);
    AffineMatrix::constant(bordered_diag(n, 0.0, (beta - 1.0) * sigma_e2))
        .plus_scalar(omega, bordered_diag(n, 1.0, -xi * xi))
        .plus_congruence(v.w, -1.0, basis.clone())
        .plus_congruence(v.sigma, beta - 1.0, basis)
}

/// `[I, ḡ]† (W + Σ) [I, ḡ] + diag(μ I, σ_e² − target − μ ξ²) ⪰ 0`.
pub fn eh_lmi(
    v: &DesignVars,
    mu: ScalarVar,
    target: EhTarget,
    sigma_e2: f64,
    g_bar: &ComplexVector,
    xi: f64,
) -> AffineMatrix {
    let n = g_bar.dim();
    let basis = lift(g_bar);
    let fixed = match target {
        EhTarget::Fixed(x) => x,
        EhTarget::Variable { .. } => 0.0,
    };
    let mut m = AffineMatrix::constant(bordered_diag(n, 0.0, sigma_e2 - fixed))
        .plus_scalar(mu, bordered_diag(n, 1.0, -xi * xi))
        .plus_congruence(v.w, 1.0, basis.clone())
        .plus_congruence(v.sigma, 1.0, basis);
    if let EhTarget::Variable { var, scale } = target {
        m = m.plus_scalar(var, bordered_diag(n, 0.0, -scale));
    }
    m
}

/// `diag(δ I, P_In − δ ξ²) − [I, q̄]† (W + Σ) [I, q̄] ⪰ 0`.
pub fn interference_lmi(v: &DesignVars, delta: ScalarVar, p_in: f64, q_bar: &ComplexVector, xi: f64) -> AffineMatrix {
    let n = q_bar.dim();
    let basis = lift(q_bar);
    AffineMatrix::constant(bordered_diag(n, 0.0, p_in))
        .plus_scalar(delta, bordered_diag(n, 1.0, -xi * xi))
        .plus_congruence(v.w, -1.0, basis.clone())
        .plus_congruence(v.sigma, -1.0, basis)
}

/// Secrecy row plus one LMI per EHR; returns the multipliers `ω_k ≥ 0`.
pub fn build_secrecy_constraints(
    p: &mut ConicProgram,
    v: &DesignVars,
    beta: f64,
    sc: &Scenario,
    ch: &ChannelSet,
    xi_e: &[f64],
) -> Vec<ScalarVar> {
    p.add_ineq("secrecy", secrecy_row(v, beta, sc, &ch.h));
    ch.g_bar
        .iter()
        .zip(xi_e)
        .enumerate()
        .map(|(k, (g, &xi))| {
            let omega = p.add_scalar_var(&format!("omega{}", k + 1), Some(0.0));
            p.add_lmi(&format!("secrecy-ehr{}", k + 1), secrecy_lmi(v, omega, beta, sc.sigma_e2, g, xi));
            omega
        })
        .collect()
}

/// One harvesting LMI per EHR; returns the multipliers `μ_k ≥ 0`.
pub fn build_eh_lmis(
    p: &mut ConicProgram,
    v: &DesignVars,
    targets: &[EhTarget],
    sc: &Scenario,
    ch: &ChannelSet,
    xi_e: &[f64],
) -> Vec<ScalarVar> {
    ch.g_bar
        .iter()
        .zip(xi_e)
        .zip(targets)
        .enumerate()
        .map(|(k, ((g, &xi), &target))| {
            let mu = p.add_scalar_var(&format!("mu{}", k + 1), Some(0.0));
            p.add_lmi(&format!("eh-ehr{}", k + 1), eh_lmi(v, mu, target, sc.sigma_e2, g, xi));
            mu
        })
        .collect()
}

/// One interference LMI per PU; returns the multipliers `δ_i ≥ 0`.
pub fn build_interference_lmis(
    p: &mut ConicProgram,
    v: &DesignVars,
    sc: &Scenario,
    ch: &ChannelSet,
    xi_p: &[f64],
) -> Vec<ScalarVar> {
    ch.q_bar
        .iter()
        .zip(xi_p)
        .zip(&sc.p_in)
        .enumerate()
        .map(|(i, ((q, &xi), &p_in))| {
            let delta = p.add_scalar_var(&format!("delta{}", i + 1), Some(0.0));
            p.add_lmi(&format!("interference-pu{}", i + 1), interference_lmi(v, delta, p_in, q, xi));
            delta
        })
        .collect()
}

fn build(kind: ProblemKind, beta: f64, sc: &Scenario, ch: &ChannelSet) -> Result<WorstCaseSubproblem> {
    if !(beta >= 1.0) {
        return Err(Error::Domain(format!("beta must be at least 1, got {beta}")));
    }
    ch.check(sc)?;
    if kind == ProblemKind::MaxminEh && sc.n_ehr == 0 {
        return Err(Error::Scenario("max-min harvesting needs at least one EHR".into()));
    }
    let (xi_e, xi_p) = sc.bounded_radii()?;
    let mut p = ConicProgram::new();
    let v = DesignVars::add(&mut p, sc.n_t, kind);
    set_objective(&mut p, &v, sc.n_t);
    build_secrecy_constraints(&mut p, &v, beta, sc, ch, &xi_e);
    let targets: Vec<EhTarget> = match v.tau {
        None => sc.psi_e.iter().map(|&x| EhTarget::Fixed(x / sc.eta)).collect(),
        Some(tau) => vec![
            EhTarget::Variable {
                var: tau,
                scale: 1.0 / sc.eta,
            };
            sc.n_ehr
        ],
    };
    build_eh_lmis(&mut p, &v, &targets, sc, ch, &xi_e);
    build_interference_lmis(&mut p, &v, sc, ch, &xi_p);
    add_su_harvesting(&mut p, &v, sc, &ch.h);
    add_power_budget(&mut p, &v, sc);
    Ok(WorstCaseSubproblem {
        kind,
        beta,
        program: p,
        vars: v,
    })
}

/// Minimize `Tr(W + Σ)` for fixed `β`.
pub fn build_robust_power_min(beta: f64, sc: &Scenario, ch: &ChannelSet) -> Result<WorstCaseSubproblem> {
    build(ProblemKind::PowerMin, beta, sc, ch)
}

/// Maximize the common EHR harvesting level `τ` for fixed `β`; the per-EHR
/// minimum levels are not imposed.
pub fn build_robust_maxmin(beta: f64, sc: &Scenario, ch: &ChannelSet) -> Result<WorstCaseSubproblem> {
    build(ProblemKind::MaxminEh, beta, sc, ch)
}
