//! Outage-constrained subproblems for a fixed `z`, using Bernstein-type
//! safe approximations of quadratic chance constraints in a standard complex
//! Gaussian vector `e ~ CN(0, I)`.

use crate::conic::{AffineMatrix, AffineScalar, ComplexAffine, ConicProgram, MatVar, ScalarVar};
use crate::design::ProblemKind;
use crate::error::{Error, Result};
use crate::hermitian::{ComplexVector, HermitianMatrix};
use crate::program::{add_power_budget, add_su_harvesting, set_objective, DesignVars};
use crate::scenario::{ChannelSet, Scenario};

/// Smallest admissible `z`.
pub const Z_MIN: f64 = 1e-4;

/// `f(e) = e†Ae + 2 Re(e†b) + c` with every part affine in the design.
#[derive(Clone, Debug)]
pub struct GaussianQuadratic {
    pub a: AffineMatrix,
    pub b: Vec<ComplexAffine>,
    pub c: AffineScalar,
}

impl GaussianQuadratic {
    /// `(ḡ + S e)† (Σ_j coef_j X_j) (ḡ + S e) + constant`.
    pub fn shifted(terms: &[(MatVar, f64)], sqrt_cov: &HermitianMatrix, g_bar: &ComplexVector, constant: f64) -> Self {
        let n = g_bar.dim();
        let s = sqrt_cov.as_matrix();
        let mut a = AffineMatrix::zeros(n);
        let mut b = vec![ComplexAffine::default(); n];
        let mut c = AffineScalar::constant(constant);
        for &(var, coef) in terms {
            a = a.plus_congruence(var, coef, s.clone());
            for (i, bi) in b.iter_mut().enumerate() {
                // (S e_i)† X ḡ
                let col = ComplexVector::from_dvector(s.column(i).into_owned()).expect("n >= 1");
                *bi = std::mem::take(bi).plus(ComplexAffine::bilinear(var, coef, &col, g_bar));
            }
            c = c.plus_trace(var, HermitianMatrix::outer(g_bar).scale(coef));
        }
        GaussianQuadratic { a, b, c }
    }

    pub fn negated(self) -> Self {
        GaussianQuadratic {
            a: self.a.scaled(-1.0),
            b: self.b.into_iter().map(|x| x.scaled(-1.0)).collect(),
            c: self.c.scaled(-1.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.a.dim
    }
}

/// Slack handles of one Bernstein approximation.
#[derive(Clone, Copy, Debug)]
pub struct BernsteinRows {
    pub nu1: ScalarVar,
    pub nu2: ScalarVar,
}

/// Real coordinates whose Euclidean norm is `‖[vec(A); √2 b]‖`.
fn stacked_entries(f: &GaussianQuadratic) -> Vec<AffineScalar> {
    let n = f.dim();
    let r2 = std::f64::consts::SQRT_2;
    let mut out = Vec::with_capacity(n * n + 2 * n);
    for i in 0..n {
        out.push(f.a.entry(i, i).re);
        for j in i + 1..n {
            let e = f.a.entry(i, j);
            out.push(e.re.scaled(r2));
            out.push(e.im.scaled(r2));
        }
    }
    for bi in &f.b {
        out.push(bi.re.clone().scaled(r2));
        out.push(bi.im.clone().scaled(r2));
    }
    out
}

/// Sufficient condition for `Pr{f(e) ≥ 0} ≥ 1 − omega`:
/// `Tr(A) − √(−2 ln ω) ν₁ + ln(ω) ν₂ + c ≥ 0`, `‖[vec A; √2 b]‖ ≤ ν₁`,
/// `ν₂ I + A ⪰ 0`, `ν₂ ≥ 0`.
pub fn bernstein_lower(p: &mut ConicProgram, label: &str, f: &GaussianQuadratic, omega: f64) -> Result<BernsteinRows> {
    if !(omega > 0.0 && omega <= 1.0) {
        return Err(Error::Domain(format!("outage probability must lie in (0,1], got {omega}")));
    }
    let ln = omega.ln();
    let nu1 = p.add_scalar_var(&format!("{label}-nu1"), Some(0.0));
    let nu2 = p.add_scalar_var(&format!("{label}-nu2"), Some(0.0));
    p.add_ineq(
        label,
        f.a.trace()
            .plus(f.c.clone())
            .plus_var(nu1, -(-2.0 * ln).sqrt())
            .plus_var(nu2, ln),
    );
    p.add_soc(&format!("{label}-spread"), stacked_entries(f), AffineScalar::var(nu1));
    p.add_lmi(
        &format!("{label}-curvature"),
        f.a.clone().plus_scalar(nu2, HermitianMatrix::identity(f.dim())),
    );
    Ok(BernsteinRows { nu1, nu2 })
}

/// Sufficient condition for `Pr{f(e) ≤ 0} ≥ 1 − omega`: the lower form
/// applied to `−f`.
pub fn bernstein_upper(p: &mut ConicProgram, label: &str, f: &GaussianQuadratic, omega: f64) -> Result<BernsteinRows> {
    bernstein_lower(p, label, &f.clone().negated(), omega)
}

/// Per-link square roots of the error covariances.
#[derive(Clone, Debug)]
pub struct CovarianceRoots {
    pub ehr: Vec<HermitianMatrix>,
    pub pu: Vec<HermitianMatrix>,
}

impl CovarianceRoots {
    pub fn from_scenario(sc: &Scenario) -> Result<Self> {
        let (g, q) = sc.gaussian_covariances()?;
        Ok(CovarianceRoots {
            ehr: g.iter().map(|m| m.psd_sqrt()).collect::<Result<_>>()?,
            pu: q.iter().map(|m| m.psd_sqrt()).collect::<Result<_>>()?,
        })
    }
}

/// Secrecy outage per EHR: `f = g†((1 − 2^R z)Σ − 2^R z W)g − (2^R z − 1)σ_e²`
/// kept nonnegative with probability `1 − ϖ_r`.
pub fn build_outage_secrecy(
    p: &mut ConicProgram,
    v: &DesignVars,
    z: f64,
    sc: &Scenario,
    ch: &ChannelSet,
    roots: &CovarianceRoots,
) -> Result<Vec<BernsteinRows>> {
    let k2 = sc.r_min.exp2() * z;
    ch.g_bar
        .iter()
        .zip(&roots.ehr)
        .enumerate()
        .map(|(k, (g, s))| {
            let f = GaussianQuadratic::shifted(&[(v.sigma, 1.0 - k2), (v.w, -k2)], s, g, -(k2 - 1.0) * sc.sigma_e2);
            bernstein_lower(p, &format!("secrecy-ehr{}", k + 1), &f, sc.outage_probs.secrecy)
        })
        .collect()
}

/// Harvesting outage per EHR: `f = g†(W + Σ)g + σ_e² − target`.
pub fn build_outage_eh(
    p: &mut ConicProgram,
    v: &DesignVars,
    sc: &Scenario,
    ch: &ChannelSet,
    roots: &CovarianceRoots,
) -> Result<Vec<BernsteinRows>> {
    ch.g_bar
        .iter()
        .zip(&roots.ehr)
        .enumerate()
        .map(|(k, (g, s))| {
            let mut f = GaussianQuadratic::shifted(&[(v.w, 1.0), (v.sigma, 1.0)], s, g, sc.sigma_e2);
            f.c = match v.tau {
                None => f.c.plus_const(-sc.psi_e[k] / sc.eta),
                Some(tau) => f.c.plus_var(tau, -1.0 / sc.eta),
            };
            bernstein_lower(p, &format!("eh-ehr{}", k + 1), &f, sc.outage_probs.eh[k])
        })
        .collect()
}

/// Interference outage per PU: `f = q†(W + Σ)q − P_In ≤ 0`.
pub fn build_outage_interference(
    p: &mut ConicProgram,
    v: &DesignVars,
    sc: &Scenario,
    ch: &ChannelSet,
    roots: &CovarianceRoots,
) -> Result<Vec<BernsteinRows>> {
    ch.q_bar
        .iter()
        .zip(&roots.pu)
        .enumerate()
        .map(|(i, (q, s))| {
            let f = GaussianQuadratic::shifted(&[(v.w, 1.0), (v.sigma, 1.0)], s, q, -sc.p_in[i]);
            bernstein_upper(p, &format!("interference-pu{}", i + 1), &f, sc.outage_probs.interference[i])
        })
        .collect()
}

/// `h†((z−1)Σ + zW)h + (z−1)(σ_sp² t + σ_s²) = 0`, i.e. `z = 1/(1 + SINR_s)`.
pub fn z_definition(v: &DesignVars, z: f64, sc: &Scenario, h: &ComplexVector) -> AffineScalar {
    let hh = HermitianMatrix::outer(h);
    AffineScalar::trace(v.sigma, hh.scale(z - 1.0))
        .plus_trace(v.w, hh.scale(z))
        .plus_var(v.t, (z - 1.0) * sc.sigma_sp2)
        .plus_const((z - 1.0) * sc.sigma_s2)
}

/// Inner outage program for one `z`.
#[derive(Clone, Debug)]
pub struct OutageSubproblem {
    pub kind: ProblemKind,
    pub z: f64,
    pub program: ConicProgram,
    pub vars: DesignVars,
}

fn build(kind: ProblemKind, z: f64, sc: &Scenario, ch: &ChannelSet, roots: &CovarianceRoots) -> Result<OutageSubproblem> {
    if !(Z_MIN..=1.0).contains(&z) {
        return Err(Error::Domain(format!("z must lie in [{Z_MIN}, 1], got {z}")));
    }
    ch.check(sc)?;
    if kind == ProblemKind::MaxminEh && sc.n_ehr == 0 {
        return Err(Error::Scenario("max-min harvesting needs at least one EHR".into()));
    }
    let mut p = ConicProgram::new();
    let v = DesignVars::add(&mut p, sc.n_t, kind);
    set_objective(&mut p, &v, sc.n_t);
    p.add_eq("z-definition", z_definition(&v, z, sc, &ch.h));
    build_outage_secrecy(&mut p, &v, z, sc, ch, roots)?;
    build_outage_eh(&mut p, &v, sc, ch, roots)?;
    build_outage_interference(&mut p, &v, sc, ch, roots)?;
    add_su_harvesting(&mut p, &v, sc, &ch.h);
    add_power_budget(&mut p, &v, sc);
    Ok(OutageSubproblem {
        kind,
        z,
        program: p,
        vars: v,
    })
}

/// Minimize `Tr(W + Σ)` under outage constraints for fixed `z`.
pub fn build_outage_power_min(z: f64, sc: &Scenario, ch: &ChannelSet, roots: &CovarianceRoots) -> Result<OutageSubproblem> {
    build(ProblemKind::PowerMin, z, sc, ch, roots)
}

/// Maximize the common EHR harvesting level under outage constraints for
/// fixed `z`; per-EHR minimum levels are not imposed.
pub fn build_outage_maxmin(z: f64, sc: &Scenario, ch: &ChannelSet, roots: &CovarianceRoots) -> Result<OutageSubproblem> {
    build(ProblemKind::MaxminEh, z, sc, ch, roots)
}
