//! Ground-truth evaluation of a design on concrete channels: secrecy rate,
//! harvested energy and interference power.

use crate::design::Design;
use crate::error::Result;
use crate::hermitian::{check_dim, ComplexVector};
use crate::scenario::Scenario;

/// Receiver noise powers in watts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoisePowers {
    pub sigma_s2: f64,
    pub sigma_e2: f64,
    pub sigma_sp2: f64,
}

impl From<&Scenario> for NoisePowers {
    fn from(s: &Scenario) -> Self {
        Self {
            sigma_s2: s.sigma_s2,
            sigma_e2: s.sigma_e2,
            sigma_sp2: s.sigma_sp2,
        }
    }
}

/// Capacity of the SU link after power splitting.
pub fn su_capacity(design: &Design, h: &ComplexVector, noise: NoisePowers) -> Result<f64> {
    check_dim(design.n_t(), h.dim())?;
    let rho = design.rho;
    let signal = design.w_mat.quad_form(h)?;
    let an = design.sigma.quad_form(h)?;
    let sinr = rho * signal / (rho * (an + noise.sigma_s2) + noise.sigma_sp2);
    Ok((1.0 + sinr).log2())
}

/// Capacity of the eavesdropping link at an EHR with channel `g`.
pub fn eavesdropper_capacity(design: &Design, g: &ComplexVector, noise: NoisePowers) -> Result<f64> {
    check_dim(design.n_t(), g.dim())?;
    let signal = design.w_mat.quad_form(g)?;
    let an = design.sigma.quad_form(g)?;
    Ok((1.0 + signal / (an + noise.sigma_e2)).log2())
}

/// `min_k (C_s − C_{e,k})`, not clamped at zero. With no EHRs this is `C_s`.
pub fn secrecy_rate(
    design: &Design,
    h: &ComplexVector,
    g: &[ComplexVector],
    noise: NoisePowers,
) -> Result<f64> {
    let cs = su_capacity(design, h, noise)?;
    let mut worst_eve = 0.0f64;
    for gk in g {
        worst_eve = worst_eve.max(eavesdropper_capacity(design, gk, noise)?);
    }
    Ok(cs - worst_eve)
}

/// `E_s = (1−ρ) η (h†Wh + h†Σh + σ_s²)`.
pub fn harvested_energy_su(design: &Design, h: &ComplexVector, sigma_s2: f64, eta: f64) -> Result<f64> {
    let p = design.total_covariance();
    Ok((1.0 - design.rho) * eta * (p.quad_form(h)? + sigma_s2))
}

/// `E_{e,k} = η (g†Wg + g†Σg + σ_e²)`.
pub fn harvested_energy_ehr(design: &Design, g: &ComplexVector, sigma_e2: f64, eta: f64) -> Result<f64> {
    let p = design.total_covariance();
    Ok(eta * (p.quad_form(g)? + sigma_e2))
}

/// `q†(W + Σ)q`.
pub fn interference_power(design: &Design, q: &ComplexVector) -> Result<f64> {
    let v = design.total_covariance().quad_form(q)?;
    debug_assert!(v >= -1e-10 * (1.0 + design.transmit_power() * q.norm_sqr()));
    Ok(v)
}
