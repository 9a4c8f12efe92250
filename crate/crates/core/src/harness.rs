//! Experiment sweeps and CDF runs over seeded channel realizations, with
//! fixed-column CSV output.

use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design::{Design, DesignStatus, ErrorModel, ProblemKind};
use crate::error::{Error, Result};
use crate::scenario::{sample_channels, task_rng, ChannelSet, Scenario};
use crate::search::{solve_design, Formulation, GridSpec, SolveOptions, TracePoint, DEFAULT_CANDIDATES};
use crate::validation::{empirical_cdf, validate, DEFAULT_SAMPLES};

/// Swept scenario quantity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    RMin,
    Ehrs,
    Antennas,
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rmin" => Ok(Axis::RMin),
            "ehrs" => Ok(Axis::Ehrs),
            "antennas" => Ok(Axis::Antennas),
            _ => Err(Error::Domain(format!("axis must be rmin, ehrs or antennas, got `{s}`"))),
        }
    }
}

/// `a:b:step` (inclusive of `b` up to rounding) or a single number.
pub fn parse_values(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Domain(format!("values must be `a:b:step`, got `{s}`"));
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    match parts[..] {
        [x] if x.is_finite() => Ok(vec![x]),
        [a, b, step] if a.is_finite() && b.is_finite() && step > 0.0 && b >= a => {
            let n = ((b - a) / step + 1e-9).floor() as usize;
            // Integer multiples keep values free of accumulated drift.
            Ok((0..=n).map(|i| a + step * i as f64).collect())
        }
        _ => Err(bad()),
    }
}

/// Scenario with the axis quantity set to `value`.
pub fn scenario_at(base: &Scenario, axis: Axis, value: f64) -> Result<Scenario> {
    let count = || -> Result<usize> {
        if value >= 0.0 && value.fract() == 0.0 {
            Ok(value as usize)
        } else {
            Err(Error::Domain(format!("axis value {value} is not a count")))
        }
    };
    let sc = match axis {
        Axis::RMin => base.with_r_min(value),
        Axis::Ehrs => base.with_n_ehr(count()?),
        Axis::Antennas => base.with_n_t(count()?),
    };
    sc.validate()?;
    Ok(sc)
}

/// Options shared by sweeps and CDF runs.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub realizations: usize,
    pub seed: u64,
    /// Validation draws per constraint.
    pub samples: usize,
    pub grid: Option<GridSpec>,
    pub candidates: usize,
    /// Fill `solve_ms`; off by default so output is reproducible byte for byte.
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            realizations: 100,
            seed: 1,
            samples: DEFAULT_SAMPLES,
            grid: None,
            candidates: DEFAULT_CANDIDATES,
            timing: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub instance_id: usize,
    pub model: String,
    pub problem: String,
    pub axis_value: f64,
    pub n_t: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub objective_w: Option<f64>,
    pub rho: Option<f64>,
    pub search_param: Option<f64>,
    pub rank_w: Option<usize>,
    pub ratio_w: Option<f64>,
    pub rank_sigma: Option<usize>,
    pub status: String,
    pub validation_pass: Option<bool>,
    pub solve_ms: Option<u64>,
}

/// One solved and validated design.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub design: Design,
    pub validation_pass: Option<bool>,
    pub solve_ms: u64,
}

fn derived_seed(seed: u64, instance: usize, salt: u64) -> u64 {
    seed ^ (instance as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ salt.wrapping_mul(0xD1B5_4A32_D192_ED03)
}

/// Solves and validates one (problem, model) pair on one instance. Errors
/// from the solve become a numerical-failure design so a sweep keeps going.
pub fn solve_and_validate(
    problem: ProblemKind,
    model: ErrorModel,
    sc: &Scenario,
    ch: &ChannelSet,
    opts: &RunOptions,
    instance: usize,
) -> Result<Outcome> {
    let f = Formulation::new(problem, model, sc, ch)?;
    let mut solve_opts = SolveOptions {
        plan: None,
        candidates: opts.candidates,
        seed: derived_seed(opts.seed, instance, 1),
    };
    if let Some(g) = opts.grid {
        solve_opts.plan = Some(f.default_plan()?.with_grid(g));
    }
    let t0 = Instant::now();
    let design = match solve_design(&f, &solve_opts) {
        Ok((d, _)) => d,
        Err(e) => {
            log::warn!("instance {instance} {} {}: {e}", problem.as_str(), model.as_str());
            let z = crate::hermitian::HermitianMatrix::zeros(sc.n_t);
            let mut d = Design::new(problem, model, z.clone(), z, f64::NAN, f64::NAN, f64::NAN);
            d.status = DesignStatus::NumericalFailure;
            d
        }
    };
    let solve_ms = t0.elapsed().as_millis() as u64;
    let validation_pass = if design.status == DesignStatus::Optimal {
        let report = validate(&design, sc, ch, opts.samples, derived_seed(opts.seed, instance, 2))?;
        Some(report.pass)
    } else {
        None
    };
    Ok(Outcome {
        design,
        validation_pass,
        solve_ms,
    })
}

fn optimal<T>(d: &Design, v: T) -> Option<T> {
    (d.status == DesignStatus::Optimal).then_some(v)
}

/// Channel draw of realization `r`. Draws depend on the antenna count but
/// not on the number of EHRs: EHR sweeps truncate one draw made at the
/// largest count, so smaller instances are nested in larger ones.
pub fn realization_channels(sc: &Scenario, max_ehr: usize, seed: u64, r: usize) -> ChannelSet {
    let full = sc.with_n_ehr(max_ehr.max(sc.n_ehr));
    let mut rng = task_rng(seed, ((sc.n_t as u64) << 32) | r as u64);
    sample_channels(&full, &mut rng).truncate_ehrs(sc.n_ehr)
}

/// Runs every requested problem and model over `values × realizations`.
/// Rows come back in instance order, problems then models within an instance.
pub fn run_sweep(
    base: &Scenario,
    axis: Axis,
    values: &[f64],
    problems: &[ProblemKind],
    models: &[ErrorModel],
    opts: &RunOptions,
) -> Result<Vec<SweepRow>> {
    if values.is_empty() || problems.is_empty() || models.is_empty() {
        return Err(Error::Domain("sweep needs at least one value, problem and model".into()));
    }
    if opts.realizations == 0 {
        return Err(Error::Domain("sweep needs at least one realization".into()));
    }
    let scenarios: Vec<Scenario> = values.iter().map(|&v| scenario_at(base, axis, v)).collect::<Result<_>>()?;
    let max_ehr = scenarios.iter().map(|s| s.n_ehr).max().unwrap_or(0);
    let units: Vec<(usize, usize)> = (0..values.len())
        .flat_map(|a| (0..opts.realizations).map(move |r| (a, r)))
        .collect();
    let rows: Vec<Vec<SweepRow>> = units
        .par_iter()
        .map(|&(a, r)| -> Result<Vec<SweepRow>> {
            let sc = &scenarios[a];
            let ch = realization_channels(sc, max_ehr, opts.seed, r);
            let instance = a * opts.realizations + r;
            let mut out = Vec::new();
            for &problem in problems {
                for &model in models {
                    let o = solve_and_validate(problem, model, sc, &ch, opts, instance)?;
                    let d = &o.design;
                    out.push(SweepRow {
                        instance_id: instance,
                        model: model.as_str().into(),
                        problem: problem.as_str().into(),
                        axis_value: values[a],
                        n_t: sc.n_t,
                        k: sc.n_ehr,
                        m: sc.n_pu,
                        objective_w: optimal(d, d.objective),
                        rho: optimal(d, d.rho),
                        search_param: optimal(d, d.search_param),
                        rank_w: optimal(d, d.rank_w),
                        ratio_w: optimal(d, d.ratio_w),
                        rank_sigma: optimal(d, d.rank_sigma),
                        status: d.status.as_str().into(),
                        validation_pass: o.validation_pass,
                        solve_ms: opts.timing.then_some(o.solve_ms),
                    });
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// Per (model, problem, axis value) aggregate of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub model: String,
    pub problem: String,
    pub axis_value: f64,
    pub feasible: usize,
    pub infeasible: usize,
    pub failed: usize,
    /// Mean objective over feasible realizations.
    pub mean_objective_w: Option<f64>,
}

pub fn summarize(rows: &[SweepRow]) -> Vec<SummaryRow> {
    let mut out: Vec<SummaryRow> = Vec::new();
    let mut sums: Vec<f64> = Vec::new();
    for row in rows {
        let idx = match out
            .iter()
            .position(|s| s.model == row.model && s.problem == row.problem && s.axis_value == row.axis_value)
        {
            Some(i) => i,
            None => {
                out.push(SummaryRow {
                    model: row.model.clone(),
                    problem: row.problem.clone(),
                    axis_value: row.axis_value,
                    feasible: 0,
                    infeasible: 0,
                    failed: 0,
                    mean_objective_w: None,
                });
                sums.push(0.0);
                out.len() - 1
            }
        };
        let s = &mut out[idx];
        match row.objective_w {
            Some(v) => {
                s.feasible += 1;
                sums[idx] += v;
            }
            None if row.status == DesignStatus::Infeasible.as_str() => s.infeasible += 1,
            None => s.failed += 1,
        }
    }
    for (s, sum) in out.iter_mut().zip(sums) {
        s.mean_objective_w = (s.feasible > 0).then(|| sum / s.feasible as f64);
    }
    out
}

/// Label of the perfect-CSI baseline in CDF output.
pub const PERFECT_CSI: &str = "perfect";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CdfRow {
    pub instance_id: usize,
    pub model: String,
    pub problem: String,
    pub n_t: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub objective_w: Option<f64>,
    pub status: String,
    pub validation_pass: Option<bool>,
    /// Empirical CDF of this model's feasible objectives at this row's value.
    pub cdf: Option<f64>,
    pub solve_ms: Option<u64>,
}

/// Per-realization objectives of the perfect-CSI baseline, the bounded
/// model and the outage model on shared channel draws, with CDF columns.
/// Rows are grouped by model, each group in realization order.
pub fn run_cdf(base: &Scenario, problem: ProblemKind, opts: &RunOptions) -> Result<Vec<CdfRow>> {
    if opts.realizations < 10 {
        return Err(Error::Domain("a CDF run needs at least 10 realizations".into()));
    }
    base.validate()?;
    let perfect = base.perfect_csi();
    let per_real: Vec<[(Outcome, &'static str); 3]> = (0..opts.realizations)
        .into_par_iter()
        .map(|r| -> Result<[(Outcome, &'static str); 3]> {
            let ch = realization_channels(base, base.n_ehr, opts.seed, r);
            let mut perfect_ch = ch.clone();
            perfect_ch.error_spec = perfect.error_spec.clone();
            Ok([
                (solve_and_validate(problem, ErrorModel::Bounded, &perfect, &perfect_ch, opts, r)?, PERFECT_CSI),
                (solve_and_validate(problem, ErrorModel::Bounded, base, &ch, opts, r)?, ErrorModel::Bounded.as_str()),
                (solve_and_validate(problem, ErrorModel::Outage, base, &ch, opts, r)?, ErrorModel::Outage.as_str()),
            ])
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for m in 0..3 {
        let feasible: Vec<f64> = per_real
            .iter()
            .map(|o| &o[m].0.design)
            .filter(|d| d.status == DesignStatus::Optimal)
            .map(|d| d.objective)
            .collect();
        let cdf = empirical_cdf(&feasible).ok();
        for (r, o) in per_real.iter().enumerate() {
            let (out, label) = &o[m];
            let d = &out.design;
            let value = optimal(d, d.objective);
            rows.push(CdfRow {
                instance_id: r,
                model: (*label).into(),
                problem: problem.as_str().into(),
                n_t: base.n_t,
                k: base.n_ehr,
                m: base.n_pu,
                objective_w: value,
                status: d.status.as_str().into(),
                validation_pass: out.validation_pass,
                cdf: value.zip(cdf.as_ref()).map(|(v, c)| c.query(v)),
                solve_ms: opts.timing.then_some(out.solve_ms),
            });
        }
    }
    Ok(rows)
}

/// A solved design together with the channel draw it was solved on.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DesignFile {
    pub seed: u64,
    pub channels: ChannelSet,
    pub design: Design,
    #[serde(default)]
    pub trace: Vec<TracePoint>,
}

impl DesignFile {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Writes rows as CSV with a header line.
pub fn write_csv<W: Write, T: Serialize>(w: W, rows: &[T]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}
