//! Independent checks of solved designs: exact worst cases over error balls,
//! Monte Carlo outage frequencies, and empirical CDFs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design::{Design, DesignStatus, ErrorModel, ProblemKind, Sense};
use crate::error::{Error, Result};
use crate::hermitian::{ComplexVector, HermitianMatrix};
use crate::metrics::{
    eavesdropper_capacity, harvested_energy_ehr, harvested_energy_su, interference_power, su_capacity, NoisePowers,
};
use crate::scenario::{sample_bounded_error, sample_gaussian_error, task_rng, ChannelSet, Scenario};
use crate::worstcase::{shifted_quadratic, worst_case_quadratic, worst_case_sinr};

/// Absolute slack allowed on exact constraint checks.
pub const EXACT_SLACK: f64 = 1e-6;
pub const DEFAULT_SAMPLES: usize = 10_000;
const Z95: f64 = 1.959_963_984_540_054;

/// Verdict on one constraint. Values not defined for a check are `None`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub name: String,
    /// Required level: a floor for rates and energies, a cap for
    /// interference and power.
    pub threshold: f64,
    pub exact_worst: Option<f64>,
    pub sampled_worst: Option<f64>,
    pub empirical_rate: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    /// Largest violation rate tolerated, before the binomial slack.
    pub allowed_rate: Option<f64>,
    pub pass: bool,
}

impl ConstraintCheck {
    fn deterministic(name: &str, threshold: f64, value: f64, floor: bool) -> Self {
        let pass = if floor {
            value >= threshold - EXACT_SLACK
        } else {
            value <= threshold + EXACT_SLACK
        };
        ConstraintCheck {
            name: name.into(),
            threshold,
            exact_worst: Some(value),
            sampled_worst: None,
            empirical_rate: None,
            ci_low: None,
            ci_high: None,
            allowed_rate: None,
            pass,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub problem: ProblemKind,
    pub model: ErrorModel,
    pub samples: usize,
    pub pass: bool,
    pub constraints: Vec<ConstraintCheck>,
}

impl ValidationReport {
    fn new(design: &Design, samples: usize, constraints: Vec<ConstraintCheck>) -> Self {
        ValidationReport {
            problem: design.problem,
            model: design.model,
            samples,
            pass: constraints.iter().all(|c| c.pass),
            constraints,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConstraintCheck> {
        self.constraints.iter().filter(|c| !c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&ConstraintCheck> {
        self.constraints.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// 95% Wilson score interval for `hits` successes in `n` trials.
pub fn wilson_interval(hits: usize, n: usize) -> (f64, f64) {
    let n = n as f64;
    let p = hits as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if hits == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if hits as f64 == n { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Rate check: passes iff `hits / n ≤ allowed + 3 √(allowed (1 − allowed) / n)`.
fn rate_check(name: String, threshold: f64, worst: f64, hits: usize, n: usize, allowed: f64) -> ConstraintCheck {
    let rate = hits as f64 / n as f64;
    let (lo, hi) = wilson_interval(hits, n);
    let sd = (allowed * (1.0 - allowed) / n as f64).sqrt();
    ConstraintCheck {
        name,
        threshold,
        exact_worst: None,
        sampled_worst: Some(worst),
        empirical_rate: Some(rate),
        ci_low: Some(lo),
        ci_high: Some(hi),
        allowed_rate: Some(allowed),
        pass: rate <= allowed + 3.0 * sd,
    }
}

fn require_optimal(design: &Design, sc: &Scenario, ch: &ChannelSet, n_samples: usize) -> Result<()> {
    if design.status != DesignStatus::Optimal {
        return Err(Error::Domain(format!(
            "only optimal designs can be validated, got {}",
            design.status.as_str()
        )));
    }
    if n_samples == 0 {
        return Err(Error::Domain("at least one validation sample is needed".into()));
    }
    ch.check(sc)?;
    if design.n_t() != sc.n_t {
        return Err(Error::DimensionMismatch {
            expected: sc.n_t,
            found: design.n_t(),
        });
    }
    Ok(())
}

/// Per-EHR harvesting floor: `ψ_{e,k}` for power minimization, the achieved
/// common level for the max-min problem.
fn eh_floor(design: &Design, sc: &Scenario, k: usize) -> f64 {
    match design.problem {
        ProblemKind::PowerMin => sc.psi_e[k],
        ProblemKind::MaxminEh => design.objective,
    }
}

/// SU harvesting and the power budget, which involve no uncertain channel.
fn nominal_checks(design: &Design, sc: &Scenario, ch: &ChannelSet) -> Result<Vec<ConstraintCheck>> {
    let es = harvested_energy_su(design, &ch.h, sc.sigma_s2, sc.eta)?;
    Ok(vec![
        ConstraintCheck::deterministic("su-eh", sc.psi_s, es, true),
        ConstraintCheck::deterministic("power-budget", sc.p_th, design.transmit_power(), false),
    ])
}

/// Worst-case checks over the error balls, exact through the trust-region
/// oracle and sampled with `n_samples` uniform draws per link.
pub fn validate_bounded(
    design: &Design,
    sc: &Scenario,
    ch: &ChannelSet,
    n_samples: usize,
    seed: u64,
) -> Result<ValidationReport> {
    require_optimal(design, sc, ch, n_samples)?;
    let (xi_e, xi_p) = sc.bounded_radii()?;
    let noise = NoisePowers::from(sc);
    let cs = su_capacity(design, &ch.h, noise)?;
    let total = design.total_covariance();
    let mut out = Vec::new();

    let ehr: Vec<[ConstraintCheck; 2]> = (0..sc.n_ehr)
        .into_par_iter()
        .map(|k| -> Result<[ConstraintCheck; 2]> {
            let g_bar = &ch.g_bar[k];
            let xi = xi_e[k];
            let sinr = worst_case_sinr(&design.w_mat, &design.sigma, sc.sigma_e2, g_bar, xi);
            let exact_rate = cs - (1.0 + sinr).log2();
            let (a, b, c) = shifted_quadratic(&total, g_bar);
            let min_quad = worst_case_quadratic(&a, &b, c, xi, Sense::Min).value;
            let exact_eh = sc.eta * (min_quad + sc.sigma_e2);

            let mut rng = task_rng(seed, k as u64);
            let (mut rate_min, mut eh_min) = (f64::INFINITY, f64::INFINITY);
            for _ in 0..n_samples {
                let g = g_bar.add(&sample_bounded_error(xi, sc.n_t, &mut rng))?;
                rate_min = rate_min.min(cs - eavesdropper_capacity(design, &g, noise)?);
                eh_min = eh_min.min(harvested_energy_ehr(design, &g, sc.sigma_e2, sc.eta)?);
            }
            let mut sec = ConstraintCheck::deterministic(&format!("secrecy-ehr{}", k + 1), sc.r_min, exact_rate, true);
            sec.sampled_worst = Some(rate_min);
            let mut eh = ConstraintCheck::deterministic(&format!("eh-ehr{}", k + 1), eh_floor(design, sc, k), exact_eh, true);
            eh.sampled_worst = Some(eh_min);
            Ok([sec, eh])
        })
        .collect::<Result<_>>()?;
    let (sec, eh): (Vec<_>, Vec<_>) = ehr.into_iter().map(|[a, b]| (a, b)).unzip();
    out.extend(sec);
    out.extend(eh);

    let pu: Vec<ConstraintCheck> = (0..sc.n_pu)
        .into_par_iter()
        .map(|i| -> Result<ConstraintCheck> {
            let (a, b, c) = shifted_quadratic(&total, &ch.q_bar[i]);
            let exact = worst_case_quadratic(&a, &b, c, xi_p[i], Sense::Max).value;
            let mut rng = task_rng(seed, (sc.n_ehr + i) as u64);
            let mut worst = f64::NEG_INFINITY;
            for _ in 0..n_samples {
                let q = ch.q_bar[i].add(&sample_bounded_error(xi_p[i], sc.n_t, &mut rng))?;
                worst = worst.max(interference_power(design, &q)?);
            }
            let mut c = ConstraintCheck::deterministic(&format!("interference-pu{}", i + 1), sc.p_in[i], exact, false);
            c.sampled_worst = Some(worst);
            Ok(c)
        })
        .collect::<Result<_>>()?;
    out.extend(pu);
    out.extend(nominal_checks(design, sc, ch)?);
    Ok(ValidationReport::new(design, n_samples, out))
}

/// Monte Carlo outage frequencies under the Gaussian error model. Each
/// link's channel is drawn `n_samples` times; for the max-min problem the
/// joint event `min_k E_k < τ` is also checked against
/// `1 − Π_k (1 − ϖ_{e,k})`.
pub fn validate_outage(
    design: &Design,
    sc: &Scenario,
    ch: &ChannelSet,
    n_samples: usize,
    seed: u64,
) -> Result<ValidationReport> {
    require_optimal(design, sc, ch, n_samples)?;
    let (cov_e, cov_q) = sc.gaussian_covariances()?;
    let roots_e: Vec<HermitianMatrix> = cov_e.iter().map(|m| m.psd_sqrt()).collect::<Result<_>>()?;
    let roots_q: Vec<HermitianMatrix> = cov_q.iter().map(|m| m.psd_sqrt()).collect::<Result<_>>()?;
    let noise = NoisePowers::from(sc);
    let cs = su_capacity(design, &ch.h, noise)?;
    let below = |v: f64, floor: f64| v < floor - 1e-9 * (1.0 + floor.abs());
    let n = n_samples;

    // Per EHR: secrecy values and harvested energies for every draw.
    let draws: Vec<(Vec<f64>, Vec<f64>)> = (0..sc.n_ehr)
        .into_par_iter()
        .map(|k| -> Result<(Vec<f64>, Vec<f64>)> {
            let mut rng = task_rng(seed, k as u64);
            let mut rates = Vec::with_capacity(n);
            let mut energies = Vec::with_capacity(n);
            for _ in 0..n {
                let g: ComplexVector = ch.g_bar[k].add(&sample_gaussian_error(&roots_e[k], &mut rng))?;
                rates.push(cs - eavesdropper_capacity(design, &g, noise)?);
                energies.push(harvested_energy_ehr(design, &g, sc.sigma_e2, sc.eta)?);
            }
            Ok((rates, energies))
        })
        .collect::<Result<_>>()?;

    let mut out = Vec::new();
    let min_of = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    for (k, (rates, _)) in draws.iter().enumerate() {
        let hits = rates.iter().filter(|&&r| below(r, sc.r_min)).count();
        out.push(rate_check(
            format!("secrecy-ehr{}", k + 1),
            sc.r_min,
            min_of(rates),
            hits,
            n,
            sc.outage_probs.secrecy,
        ));
    }
    for (k, (_, energies)) in draws.iter().enumerate() {
        let floor = eh_floor(design, sc, k);
        let hits = energies.iter().filter(|&&e| below(e, floor)).count();
        out.push(rate_check(
            format!("eh-ehr{}", k + 1),
            floor,
            min_of(energies),
            hits,
            n,
            sc.outage_probs.eh[k],
        ));
    }
    if design.problem == ProblemKind::MaxminEh && sc.n_ehr > 0 {
        let floor = design.objective;
        let joint_min: Vec<f64> = (0..n).map(|j| draws.iter().map(|(_, e)| e[j]).fold(f64::INFINITY, f64::min)).collect();
        let hits = joint_min.iter().filter(|&&e| below(e, floor)).count();
        let allowed = 1.0 - sc.outage_probs.eh.iter().map(|w| 1.0 - w).product::<f64>();
        out.push(rate_check("min-eh-joint".into(), floor, min_of(&joint_min), hits, n, allowed));
    }

    let pu: Vec<ConstraintCheck> = (0..sc.n_pu)
        .into_par_iter()
        .map(|i| -> Result<ConstraintCheck> {
            let mut rng = task_rng(seed, (sc.n_ehr + i) as u64);
            let cap = sc.p_in[i];
            let (mut hits, mut worst) = (0usize, f64::NEG_INFINITY);
            for _ in 0..n {
                let q = ch.q_bar[i].add(&sample_gaussian_error(&roots_q[i], &mut rng))?;
                let v = interference_power(design, &q)?;
                worst = worst.max(v);
                if v > cap + 1e-9 * (1.0 + cap) {
                    hits += 1;
                }
            }
            Ok(rate_check(
                format!("interference-pu{}", i + 1),
                cap,
                worst,
                hits,
                n,
                sc.outage_probs.interference[i],
            ))
        })
        .collect::<Result<_>>()?;
    out.extend(pu);
    out.extend(nominal_checks(design, sc, ch)?);
    Ok(ValidationReport::new(design, n_samples, out))
}

/// Dispatches on the design's error model.
pub fn validate(design: &Design, sc: &Scenario, ch: &ChannelSet, n_samples: usize, seed: u64) -> Result<ValidationReport> {
    match design.model {
        ErrorModel::Bounded => validate_bounded(design, sc, ch, n_samples, seed),
        ErrorModel::Outage => validate_outage(design, sc, ch, n_samples, seed),
    }
}

/// Right-continuous empirical distribution function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.sorted
    }

    /// Fraction of values `≤ v`.
    pub fn query(&self, v: f64) -> f64 {
        self.sorted.partition_point(|&x| x <= v) as f64 / self.len() as f64
    }

    /// Smallest sample `x` with `query(x) ≥ p`.
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.len();
        let idx = ((p * n as f64).ceil() as usize).clamp(1, n);
        self.sorted[idx - 1]
    }

    /// `(value, fraction ≤ value)` at every jump.
    pub fn steps(&self) -> Vec<(f64, f64)> {
        let n = self.len() as f64;
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (i, &x) in self.sorted.iter().enumerate() {
            let f = (i + 1) as f64 / n;
            match out.last_mut() {
                Some(last) if last.0 == x => last.1 = f,
                _ => out.push((x, f)),
            }
        }
        out
    }
}

pub fn empirical_cdf(values: &[f64]) -> Result<EmpiricalCdf> {
    if values.is_empty() {
        return Err(Error::Domain("empirical CDF of an empty list".into()));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Domain("empirical CDF input contains NaN".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(EmpiricalCdf { sorted })
}
