//! System constants, CSI-error models and seeded channel sampling.

mod calibrate;
mod sampling;
mod units;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{ComplexVector, HermitianMatrix};

pub use calibrate::{calibrate_radius, chi_square_cdf, chi_square_quantile, ln_gamma, regularized_gamma_p};
pub use sampling::{
    sample_bounded_error, sample_channels, sample_complex_gaussian, sample_gaussian_error, task_rng,
};
pub use units::{db_to_watts, dbm_to_watts, watts_to_db, watts_to_dbm};

/// Per-link CSI-error parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ErrorSpec {
    /// Norm-bounded errors: radii for each EHR link and each PU link.
    Bounded { xi_e: Vec<f64>, xi_p: Vec<f64> },
    /// Circular Gaussian errors with covariance `ε² I` per link.
    Gaussian { eps2_e: Vec<f64>, eps2_q: Vec<f64> },
}

impl ErrorSpec {
    pub fn zero(n_ehr: usize, n_pu: usize) -> Self {
        ErrorSpec::Bounded {
            xi_e: vec![0.0; n_ehr],
            xi_p: vec![0.0; n_pu],
        }
    }

    fn lens(&self) -> (usize, usize) {
        match self {
            ErrorSpec::Bounded { xi_e, xi_p } => (xi_e.len(), xi_p.len()),
            ErrorSpec::Gaussian { eps2_e, eps2_q } => (eps2_e.len(), eps2_q.len()),
        }
    }

    fn values(&self) -> impl Iterator<Item = f64> + '_ {
        let (a, b) = match self {
            ErrorSpec::Bounded { xi_e, xi_p } => (xi_e, xi_p),
            ErrorSpec::Gaussian { eps2_e, eps2_q } => (eps2_e, eps2_q),
        };
        a.iter().chain(b.iter()).copied()
    }
}

/// Maximum outage probabilities `ϖ_r`, `ϖ_{e,k}` and `ϖ_{I,i}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutageProbs {
    pub secrecy: f64,
    pub eh: Vec<f64>,
    pub interference: Vec<f64>,
}

/// Per-entry variances of the channel draws.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelVariances {
    pub h: f64,
    pub g: f64,
    pub q: f64,
}

impl Default for ChannelVariances {
    fn default() -> Self {
        Self { h: 1.0, g: 1.0, q: 0.1 }
    }
}

/// All system constants of one experiment, powers in watts.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Scenario {
    pub n_t: usize,
    pub n_pu: usize,
    pub n_ehr: usize,
    pub eta: f64,
    pub p_th: f64,
    pub p_in: Vec<f64>,
    pub psi_s: f64,
    pub psi_e: Vec<f64>,
    pub sigma_s2: f64,
    pub sigma_e2: f64,
    pub sigma_sp2: f64,
    pub r_min: f64,
    pub outage_probs: OutageProbs,
    pub error_spec: ErrorSpec,
    pub channel_var: ChannelVariances,
    pub rng_seed: u64,
}

/// On-disk scenario layout. Powers may be given in watts or with an explicit
/// `_db` / `_dbm` suffix; exactly one form per quantity.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    n_t: usize,
    n_pu: usize,
    n_ehr: usize,
    eta: f64,
    p_th: Option<f64>,
    p_th_db: Option<f64>,
    p_th_dbm: Option<f64>,
    p_in: Option<Vec<f64>>,
    p_in_db: Option<Vec<f64>>,
    p_in_dbm: Option<Vec<f64>>,
    psi_s: Option<f64>,
    psi_s_db: Option<f64>,
    psi_s_dbm: Option<f64>,
    psi_e: Option<Vec<f64>>,
    psi_e_db: Option<Vec<f64>>,
    psi_e_dbm: Option<Vec<f64>>,
    sigma_s2: f64,
    sigma_e2: f64,
    sigma_sp2: f64,
    r_min: f64,
    outage_probs: OutageProbs,
    error_spec: ErrorSpec,
    #[serde(default)]
    channel_var: ChannelVariances,
    #[serde(default)]
    rng_seed: u64,
}

fn one_power(name: &str, w: Option<f64>, db: Option<f64>, dbm: Option<f64>) -> Result<f64> {
    match (w, db, dbm) {
        (Some(x), None, None) => Ok(x),
        (None, Some(x), None) => Ok(db_to_watts(x)),
        (None, None, Some(x)) => Ok(dbm_to_watts(x)),
        _ => Err(Error::Scenario(format!(
            "exactly one of `{name}`, `{name}_db`, `{name}_dbm` must be given"
        ))),
    }
}

fn power_list(
    name: &str,
    w: Option<Vec<f64>>,
    db: Option<Vec<f64>>,
    dbm: Option<Vec<f64>>,
) -> Result<Vec<f64>> {
    match (w, db, dbm) {
        (Some(x), None, None) => Ok(x),
        (None, Some(x), None) => Ok(x.into_iter().map(db_to_watts).collect()),
        (None, None, Some(x)) => Ok(x.into_iter().map(dbm_to_watts).collect()),
        _ => Err(Error::Scenario(format!(
            "exactly one of `{name}`, `{name}_db`, `{name}_dbm` must be given"
        ))),
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let f: ScenarioFile = serde_json::from_str(text)?;
        let s = Scenario {
            n_t: f.n_t,
            n_pu: f.n_pu,
            n_ehr: f.n_ehr,
            eta: f.eta,
            p_th: one_power("p_th", f.p_th, f.p_th_db, f.p_th_dbm)?,
            p_in: power_list("p_in", f.p_in, f.p_in_db, f.p_in_dbm)?,
            psi_s: one_power("psi_s", f.psi_s, f.psi_s_db, f.psi_s_dbm)?,
            psi_e: power_list("psi_e", f.psi_e, f.psi_e_db, f.psi_e_dbm)?,
            sigma_s2: f.sigma_s2,
            sigma_e2: f.sigma_e2,
            sigma_sp2: f.sigma_sp2,
            r_min: f.r_min,
            outage_probs: f.outage_probs,
            error_spec: f.error_spec,
            channel_var: f.channel_var,
            rng_seed: f.rng_seed,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Serializes with every power in watts; the output parses back with
    /// [`Scenario::from_json`].
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// The simulation defaults: M = 2, K = 3, η = 1, P_In = −10 dB,
    /// P_th = 2 dBW, σ_s² = σ_e² = 0.1, σ_sp² = 0.01, ψ_s = 22 dBm,
    /// ψ_e = 23 dBm, all outage probabilities 0.05, Gaussian CSI errors with
    /// ε_e² = 0.001 and ε_q² = 0.0001.
    pub fn defaults(n_t: usize) -> Self {
        let (m, k) = (2, 3);
        Scenario {
            n_t,
            n_pu: m,
            n_ehr: k,
            eta: 1.0,
            p_th: db_to_watts(2.0),
            p_in: vec![db_to_watts(-10.0); m],
            psi_s: dbm_to_watts(22.0),
            psi_e: vec![dbm_to_watts(23.0); k],
            sigma_s2: 0.1,
            sigma_e2: 0.1,
            sigma_sp2: 0.01,
            r_min: 1.5,
            outage_probs: OutageProbs {
                secrecy: 0.05,
                eh: vec![0.05; k],
                interference: vec![0.05; m],
            },
            error_spec: ErrorSpec::Gaussian {
                eps2_e: vec![0.001; k],
                eps2_q: vec![0.0001; m],
            },
            channel_var: ChannelVariances::default(),
            rng_seed: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Scenario(msg));
        if self.n_t == 0 {
            return bad("n_t must be at least 1".into());
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return bad(format!("eta must lie in (0,1], got {}", self.eta));
        }
        if self.p_in.len() != self.n_pu {
            return bad(format!("p_in has {} entries, n_pu = {}", self.p_in.len(), self.n_pu));
        }
        if self.psi_e.len() != self.n_ehr {
            return bad(format!("psi_e has {} entries, n_ehr = {}", self.psi_e.len(), self.n_ehr));
        }
        let (ne, np) = self.error_spec.lens();
        if ne != self.n_ehr || np != self.n_pu {
            return bad(format!(
                "error_spec has ({ne}, {np}) links, expected ({}, {})",
                self.n_ehr, self.n_pu
            ));
        }
        let op = &self.outage_probs;
        if op.eh.len() != self.n_ehr || op.interference.len() != self.n_pu {
            return bad("outage_probs lengths must match n_ehr and n_pu".into());
        }
        let nonneg = [self.p_th, self.psi_s, self.sigma_s2, self.sigma_e2, self.sigma_sp2, self.r_min]
            .into_iter()
            .chain(self.p_in.iter().copied())
            .chain(self.psi_e.iter().copied())
            .chain(self.error_spec.values())
            .chain([self.channel_var.h, self.channel_var.g, self.channel_var.q]);
        for v in nonneg {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("powers, variances and radii must be finite and >= 0, got {v}"));
            }
        }
        for p in std::iter::once(op.secrecy).chain(op.eh.iter().copied()).chain(op.interference.iter().copied()) {
            if !(p > 0.0 && p <= 1.0) {
                return bad(format!("outage probabilities must lie in (0,1], got {p}"));
            }
        }
        Ok(())
    }

    /// Radii for the bounded model. Gaussian variances are converted with
    /// [`calibrate_radius`] using the matching outage probability.
    pub fn bounded_radii(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        match &self.error_spec {
            ErrorSpec::Bounded { xi_e, xi_p } => Ok((xi_e.clone(), xi_p.clone())),
            ErrorSpec::Gaussian { eps2_e, eps2_q } => {
                let xi_e = eps2_e
                    .iter()
                    .zip(&self.outage_probs.eh)
                    .map(|(&e, &w)| calibrate_radius(e, self.n_t, w))
                    .collect::<Result<_>>()?;
                let xi_p = eps2_q
                    .iter()
                    .zip(&self.outage_probs.interference)
                    .map(|(&e, &w)| calibrate_radius(e, self.n_t, w))
                    .collect::<Result<_>>()?;
                Ok((xi_e, xi_p))
            }
        }
    }

    /// Error covariances `ε² I` for the probabilistic model.
    pub fn gaussian_covariances(&self) -> Result<(Vec<HermitianMatrix>, Vec<HermitianMatrix>)> {
        match &self.error_spec {
            ErrorSpec::Gaussian { eps2_e, eps2_q } => {
                let cov = |e: &f64| HermitianMatrix::identity(self.n_t).scale(*e);
                Ok((eps2_e.iter().map(cov).collect(), eps2_q.iter().map(cov).collect()))
            }
            ErrorSpec::Bounded { .. } => Err(Error::Scenario(
                "the outage model needs Gaussian error variances in error_spec".into(),
            )),
        }
    }

    /// Same scenario with perfect knowledge of every channel.
    pub fn perfect_csi(&self) -> Self {
        Self {
            error_spec: ErrorSpec::zero(self.n_ehr, self.n_pu),
            ..self.clone()
        }
    }

    pub fn with_r_min(&self, r_min: f64) -> Self {
        Self { r_min, ..self.clone() }
    }

    pub fn with_n_t(&self, n_t: usize) -> Self {
        Self { n_t, ..self.clone() }
    }

    /// Resizes every per-EHR list to `k`, repeating the last entry when growing.
    pub fn with_n_ehr(&self, k: usize) -> Self {
        let resize = |v: &[f64]| -> Vec<f64> {
            let fill = v.last().copied().unwrap_or(0.0);
            (0..k).map(|i| v.get(i).copied().unwrap_or(fill)).collect()
        };
        let error_spec = match &self.error_spec {
            ErrorSpec::Bounded { xi_e, xi_p } => ErrorSpec::Bounded {
                xi_e: resize(xi_e),
                xi_p: xi_p.clone(),
            },
            ErrorSpec::Gaussian { eps2_e, eps2_q } => ErrorSpec::Gaussian {
                eps2_e: resize(eps2_e),
                eps2_q: eps2_q.clone(),
            },
        };
        Self {
            n_ehr: k,
            psi_e: resize(&self.psi_e),
            outage_probs: OutageProbs {
                eh: resize(&self.outage_probs.eh),
                ..self.outage_probs.clone()
            },
            error_spec,
            ..self.clone()
        }
    }
}

/// One channel realization: perfect `h`, estimated EHR and PU channels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSet {
    pub h: ComplexVector,
    pub g_bar: Vec<ComplexVector>,
    pub q_bar: Vec<ComplexVector>,
    pub error_spec: ErrorSpec,
}

impl ChannelSet {
    pub fn n_t(&self) -> usize {
        self.h.dim()
    }

    /// Checks vector dimensions against a scenario.
    pub fn check(&self, s: &Scenario) -> Result<()> {
        let dims_ok = self.h.dim() == s.n_t
            && self.g_bar.iter().chain(&self.q_bar).all(|v| v.dim() == s.n_t);
        if !dims_ok {
            return Err(Error::DimensionMismatch {
                expected: s.n_t,
                found: self.h.dim(),
            });
        }
        if self.g_bar.len() != s.n_ehr || self.q_bar.len() != s.n_pu {
            return Err(Error::Scenario(format!(
                "channel set has {} EHR and {} PU links, scenario expects {} and {}",
                self.g_bar.len(),
                self.q_bar.len(),
                s.n_ehr,
                s.n_pu
            )));
        }
        Ok(())
    }

    /// The first `k` EHR links.
    pub fn truncate_ehrs(&self, k: usize) -> Self {
        let mut c = self.clone();
        c.g_bar.truncate(k);
        let (ErrorSpec::Bounded { xi_e: per_ehr, .. } | ErrorSpec::Gaussian { eps2_e: per_ehr, .. }) =
            &mut c.error_spec;
        per_ehr.truncate(k);
        c
    }
}
