//! Outer one-dimensional search over `β` (bounded model) or `z` (outage
//! model), inner conic solves, and beam-vector extraction.

use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conic::{solve, ConicProgram, ConicSolution, SolveStatus, DEFAULT_TOL};
use crate::design::{Design, DesignStatus, ErrorModel, Extraction, ProblemKind, Sense};
use crate::error::{Error, Result};
use crate::hermitian::{ComplexVector, HermitianMatrix, C64, DEFAULT_EPS_RANK};
use crate::outage::{build_outage_power_min, build_outage_maxmin, CovarianceRoots, Z_MIN};
use crate::program::DesignVars;
use crate::scenario::{sample_complex_gaussian, ChannelSet, Scenario};
use crate::worstcase::{build_robust_power_min, build_robust_maxmin};

pub const DEFAULT_GRID_POINTS: usize = 64;
pub const DEFAULT_CANDIDATES: usize = 100;

/// Tolerance of the final re-solve at the winning parameter. Rank
/// diagnostics compare eigenvalue ratios against `1e-6`, so the winner is
/// polished past the grid tolerance.
pub const POLISH_TOL: f64 = 1e-10;

/// Which outer variable is searched.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchParam {
    Beta,
    Z,
}

/// Placement of the grid points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridSpec {
    /// Points `lo, lo + step, …`, always ending at `hi`.
    Uniform { step: f64 },
    /// `points` values evenly spaced in `ln(param)`.
    Log { points: usize },
    /// `points` values evenly spaced in the parameter.
    Linear { points: usize },
}

impl FromStr for GridSpec {
    type Err = Error;

    /// `uniform:<step>` or `log:<n>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("grid must be `uniform:<step>` or `log:<n>`, got `{s}`"));
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "uniform" => {
                let step: f64 = arg.parse().map_err(|_| bad())?;
                if !(step > 0.0 && step.is_finite()) {
                    return Err(bad());
                }
                Ok(GridSpec::Uniform { step })
            }
            "log" => {
                let points: usize = arg.parse().map_err(|_| bad())?;
                if points < 2 {
                    return Err(bad());
                }
                Ok(GridSpec::Log { points })
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchPlan {
    pub param: SearchParam,
    pub lo: f64,
    pub hi: f64,
    pub grid: GridSpec,
    pub refine: bool,
    /// Golden-section stops once the bracket is narrower than this fraction
    /// of the initial bracket.
    pub refine_width: f64,
}

impl SearchPlan {
    /// Log-spaced `β` grid on [`beta_interval`].
    pub fn beta(sc: &Scenario, h: &ComplexVector) -> Result<Self> {
        let (lo, hi) = beta_interval(sc, h)?;
        Ok(SearchPlan {
            param: SearchParam::Beta,
            lo,
            hi,
            grid: GridSpec::Log {
                points: DEFAULT_GRID_POINTS,
            },
            refine: true,
            refine_width: 1e-3,
        })
    }

    /// Evenly spaced `z` grid on `[1e-4, 1]`.
    pub fn z() -> Self {
        SearchPlan {
            param: SearchParam::Z,
            lo: Z_MIN,
            hi: 1.0,
            grid: GridSpec::Linear {
                points: DEFAULT_GRID_POINTS,
            },
            refine: true,
            refine_width: 1e-3,
        }
    }

    pub fn with_grid(mut self, grid: GridSpec) -> Self {
        self.grid = grid;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo <= self.hi) {
            return Err(Error::Domain(format!("bad search interval [{}, {}]", self.lo, self.hi)));
        }
        if let GridSpec::Log { .. } = self.grid {
            if self.lo <= 0.0 {
                return Err(Error::Domain("log grid needs a positive interval".into()));
            }
        }
        Ok(())
    }

    fn log_scale(&self) -> bool {
        matches!(self.grid, GridSpec::Log { .. })
    }

    /// Grid values in increasing order; a single point for a degenerate
    /// interval.
    pub fn points(&self) -> Result<Vec<f64>> {
        self.validate()?;
        if self.lo == self.hi {
            return Ok(vec![self.lo]);
        }
        let spread = |n: usize, a: f64, b: f64| -> Vec<f64> {
            let n = n.max(2);
            (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
        };
        let pin = |mut v: Vec<f64>| {
            // Endpoints exactly, whatever the rounding inside.
            v[0] = self.lo;
            *v.last_mut().expect("at least two points") = self.hi;
            v
        };
        Ok(pin(match self.grid {
            GridSpec::Uniform { step } => {
                let n = ((self.hi - self.lo) / step).ceil() as usize;
                let mut v: Vec<f64> = (0..n).map(|i| self.lo + step * i as f64).collect();
                v.push(self.hi);
                v
            }
            GridSpec::Log { points } => spread(points, self.lo.ln(), self.hi.ln())
                .into_iter()
                .map(f64::exp)
                .collect(),
            GridSpec::Linear { points } => spread(points, self.lo, self.hi),
        }))
    }
}

/// `[1, 1 + P_th‖h‖²/σ_sp²]`.
pub fn beta_interval(sc: &Scenario, h: &ComplexVector) -> Result<(f64, f64)> {
    if !(sc.sigma_sp2 > 0.0) {
        return Err(Error::Domain("the beta interval needs sigma_sp2 > 0".into()));
    }
    Ok((1.0, 1.0 + sc.p_th * h.norm_sqr() / sc.sigma_sp2))
}

/// One evaluated grid or refinement point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub param: f64,
    pub status: DesignStatus,
    /// Problem objective (power or harvested level); NaN unless optimal,
    /// written as null.
    #[serde(with = "nan_as_null")]
    pub objective: f64,
    pub refinement: bool,
}

mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_nan() {
            s.serialize_none()
        } else {
            s.serialize_some(v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub design: Design,
    pub trace: Vec<TracePoint>,
}

fn status_of(s: SolveStatus) -> DesignStatus {
    match s {
        SolveStatus::Optimal => DesignStatus::Optimal,
        SolveStatus::Infeasible => DesignStatus::Infeasible,
        SolveStatus::Unbounded | SolveStatus::NumericalFailure => DesignStatus::NumericalFailure,
    }
}

/// Problem objective read off a solved program: the power, or `τ` for the
/// max-min problem.
fn problem_objective(sol: &ConicSolution, vars: &DesignVars) -> f64 {
    match vars.tau {
        Some(tau) => sol.scalar(tau),
        None => sol.objective,
    }
}

struct Evaluated {
    point: TracePoint,
    solved: Option<(ConicSolution, DesignVars)>,
}

fn evaluate<B>(builder: &B, param: f64, refinement: bool) -> Result<Evaluated>
where
    B: Fn(f64) -> Result<(ConicProgram, DesignVars)> + Sync,
{
    evaluate_at(builder, param, refinement, DEFAULT_TOL)
}

fn evaluate_at<B>(builder: &B, param: f64, refinement: bool, tol: f64) -> Result<Evaluated>
where
    B: Fn(f64) -> Result<(ConicProgram, DesignVars)> + Sync,
{
    let (program, vars) = builder(param)?;
    let sol = solve(&program, tol)?;
    let status = status_of(sol.status);
    let objective = if sol.is_optimal() {
        problem_objective(&sol, &vars)
    } else {
        f64::NAN
    };
    Ok(Evaluated {
        point: TracePoint {
            param,
            status,
            objective,
            refinement,
        },
        solved: sol.is_optimal().then_some((sol, vars)),
    })
}

/// Grid search with optional golden-section refinement around the winner.
///
/// Infeasible and numerically failed grid points are skipped. With no
/// optimal point at all the result is [`Error::AllInfeasible`], or
/// [`Error::NumericalFailure`] naming the first failing parameter when any
/// point failed numerically.
pub fn run_search<B>(plan: &SearchPlan, problem: ProblemKind, model: ErrorModel, builder: B) -> Result<SearchOutcome>
where
    B: Fn(f64) -> Result<(ConicProgram, DesignVars)> + Sync,
{
    let sense = problem.sense();
    let grid = plan.points()?;
    let evaluated: Vec<Evaluated> = grid
        .par_iter()
        .map(|&x| evaluate(&builder, x, false))
        .collect::<Result<_>>()?;

    let mut best: Option<usize> = None;
    for (i, e) in evaluated.iter().enumerate() {
        if e.solved.is_some() && best.is_none_or(|b| sense.better(e.point.objective, evaluated[b].point.objective)) {
            best = Some(i);
        }
    }
    let mut trace: Vec<TracePoint> = evaluated.iter().map(|e| e.point.clone()).collect();
    let Some(win) = best else {
        return Err(match evaluated.iter().find(|e| e.point.status == DesignStatus::NumericalFailure) {
            Some(e) => Error::NumericalFailure {
                param: e.point.param,
                msg: "no grid point solved to optimality".into(),
            },
            None => Error::AllInfeasible,
        });
    };

    let mut winner = evaluated.into_iter().nth(win).expect("index in range");
    if plan.refine && grid.len() > 2 {
        let lo = grid[win.saturating_sub(1)];
        let hi = grid[(win + 1).min(grid.len() - 1)];
        let (refined, points) = golden_section(plan, sense, lo, hi, &builder)?;
        trace.extend(points);
        if let Some(r) = refined {
            if sense.better(r.point.objective, winner.point.objective) {
                winner = r;
            }
        }
    }

    // The polished value replaces the winner's trace entry unless that would
    // let another entry beat it, so the winner stays the trace extremum.
    let polished = evaluate_at(&builder, winner.point.param, winner.point.refinement, POLISH_TOL)?;
    if polished.solved.is_some() {
        let slot = trace
            .iter()
            .position(|p| p == &winner.point)
            .expect("winner is in the trace");
        let beaten = trace
            .iter()
            .enumerate()
            .any(|(i, p)| i != slot && p.status == DesignStatus::Optimal && sense.better(p.objective, polished.point.objective));
        if !beaten {
            trace[slot] = polished.point.clone();
            winner = polished;
        }
    }
    let (sol, vars) = winner.solved.expect("winner is optimal");
    let t = sol.scalar(vars.t);
    let design = Design::new(
        problem,
        model,
        sol.matrix(vars.w).clone(),
        sol.matrix(vars.sigma).clone(),
        1.0 / t,
        winner.point.param,
        winner.point.objective,
    );
    Ok(SearchOutcome { design, trace })
}

/// Golden-section search on `[lo, hi]` (in log coordinates for log grids),
/// treating non-optimal points as worst possible. Returns the best point seen.
fn golden_section<B>(
    plan: &SearchPlan,
    sense: Sense,
    lo: f64,
    hi: f64,
    builder: &B,
) -> Result<(Option<Evaluated>, Vec<TracePoint>)>
where
    B: Fn(f64) -> Result<(ConicProgram, DesignVars)> + Sync,
{
    let (to, from): (fn(f64) -> f64, fn(f64) -> f64) = if plan.log_scale() {
        (f64::ln, f64::exp)
    } else {
        (|x| x, |x| x)
    };
    let (mut a, mut b) = (to(lo), to(hi));
    let stop = plan.refine_width * (b - a);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut trace = Vec::new();
    let mut best: Option<Evaluated> = None;
    // Signed score: lower is better.
    let score = |e: &Evaluated| match (e.solved.is_some(), sense) {
        (false, _) => f64::INFINITY,
        (true, Sense::Min) => e.point.objective,
        (true, Sense::Max) => -e.point.objective,
    };
    let probe = |x: f64, trace: &mut Vec<TracePoint>, best: &mut Option<Evaluated>| -> Result<f64> {
        let e = evaluate(builder, from(x), true)?;
        trace.push(e.point.clone());
        let s = score(&e);
        if s.is_finite() && best.as_ref().is_none_or(|b| s < score(b)) {
            *best = Some(e);
        }
        Ok(s)
    };
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = probe(c, &mut trace, &mut best)?;
    let mut fd = probe(d, &mut trace, &mut best)?;
    while b - a > stop && trace.len() < 64 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = probe(c, &mut trace, &mut best)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = probe(d, &mut trace, &mut best)?;
        }
    }
    Ok((best, trace))
}

/// The inner program family of one (problem, model, instance) triple.
#[derive(Clone, Debug)]
pub struct Formulation {
    pub problem: ProblemKind,
    pub model: ErrorModel,
    pub scenario: Scenario,
    pub channels: ChannelSet,
    roots: Option<CovarianceRoots>,
}

impl Formulation {
    pub fn new(problem: ProblemKind, model: ErrorModel, scenario: &Scenario, channels: &ChannelSet) -> Result<Self> {
        channels.check(scenario)?;
        let roots = match model {
            ErrorModel::Bounded => {
                scenario.bounded_radii()?;
                None
            }
            ErrorModel::Outage => Some(CovarianceRoots::from_scenario(scenario)?),
        };
        Ok(Formulation {
            problem,
            model,
            scenario: scenario.clone(),
            channels: channels.clone(),
            roots,
        })
    }

    pub fn build(&self, param: f64) -> Result<(ConicProgram, DesignVars)> {
        let (sc, ch) = (&self.scenario, &self.channels);
        match (self.model, &self.roots) {
            (ErrorModel::Bounded, _) => {
                let sp = match self.problem {
                    ProblemKind::PowerMin => build_robust_power_min(param, sc, ch)?,
                    ProblemKind::MaxminEh => build_robust_maxmin(param, sc, ch)?,
                };
                Ok((sp.program, sp.vars))
            }
            (ErrorModel::Outage, Some(roots)) => {
                let sp = match self.problem {
                    ProblemKind::PowerMin => build_outage_power_min(param, sc, ch, roots)?,
                    ProblemKind::MaxminEh => build_outage_maxmin(param, sc, ch, roots)?,
                };
                Ok((sp.program, sp.vars))
            }
            (ErrorModel::Outage, None) => unreachable!("roots are set for the outage model"),
        }
    }

    pub fn default_plan(&self) -> Result<SearchPlan> {
        match self.model {
            ErrorModel::Bounded => SearchPlan::beta(&self.scenario, &self.channels.h),
            ErrorModel::Outage => Ok(SearchPlan::z()),
        }
    }

    pub fn search(&self, plan: &SearchPlan) -> Result<SearchOutcome> {
        run_search(plan, self.problem, self.model, |x| self.build(x))
    }
}

/// Fills `design.w`: the principal eigenvector when `W` is numerically rank
/// one, Gaussian randomization otherwise.
pub fn extract_beamformer<R: Rng + ?Sized>(
    design: &Design,
    formulation: &Formulation,
    candidates: usize,
    rng: &mut R,
) -> Result<Design> {
    if design.ratio_w <= DEFAULT_EPS_RANK {
        return Ok(principal_beam(design));
    }
    gaussian_randomization(design, formulation, candidates, rng)
}

/// `w = √λ₁ v₁`.
pub fn principal_beam(design: &Design) -> Design {
    let eig = design.w_mat.eig();
    let lambda = eig.values[0].max(0.0);
    let mut out = design.clone();
    out.w = Some(eig.vectors[0].scale(C64::new(lambda.sqrt(), 0.0)));
    out.extraction = Extraction::Direct;
    out.rank_w = 1;
    out
}

/// Draws `candidates` directions from `CN(0, W)`, re-solves the inner
/// program at the design's search parameter with `W = p u u†`, and keeps the
/// best feasible candidate. Without one, the input comes back flagged.
pub fn gaussian_randomization<R: Rng + ?Sized>(
    design: &Design,
    formulation: &Formulation,
    candidates: usize,
    rng: &mut R,
) -> Result<Design> {
    if candidates == 0 {
        return Err(Error::Domain("randomization needs at least one candidate".into()));
    }
    let root = design.w_mat.psd_sqrt()?;
    let dirs: Vec<ComplexVector> = (0..candidates)
        .map(|_| {
            let e = sample_complex_gaussian(rng, design.n_t(), 1.0);
            let w = root.mul_vec(&e).expect("dimensions agree");
            w.scale(C64::new(1.0 / w.norm().max(f64::MIN_POSITIVE), 0.0))
        })
        .collect();
    let (program, vars) = formulation.build(design.search_param)?;
    let sense = design.problem.sense();
    let solved: Vec<Option<Design>> = dirs
        .par_iter()
        .map(|u| restricted_solve(design, &program, &vars, u))
        .collect::<Result<_>>()?;
    let mut best: Option<Design> = None;
    for d in solved.into_iter().flatten() {
        if best.as_ref().is_none_or(|b| sense.better(d.objective, b.objective)) {
            best = Some(d);
        }
    }
    Ok(best.unwrap_or_else(|| {
        let mut d = design.clone();
        d.extraction = Extraction::RankGtOne;
        d
    }))
}

fn restricted_solve(design: &Design, program: &ConicProgram, vars: &DesignVars, u: &ComplexVector) -> Result<Option<Design>> {
    let (restricted, p) = program.restrict_matrix_var(vars.w, u, "p")?;
    let sol = solve(&restricted, DEFAULT_TOL)?;
    if !sol.is_optimal() {
        return Ok(None);
    }
    // Σ follows W in the variable order, so its handle moved down by one.
    debug_assert!(vars.sigma.0 > vars.w.0);
    let sigma = sol.matrices[vars.sigma.0 - 1].clone();
    let power = sol.scalar(p);
    let w_mat = HermitianMatrix::outer(u).scale(power);
    let objective = match vars.tau {
        Some(tau) => sol.scalar(tau),
        None => sol.objective,
    };
    let mut d = Design::new(
        design.problem,
        design.model,
        w_mat,
        sigma,
        1.0 / sol.scalar(vars.t),
        design.search_param,
        objective,
    );
    d.w = Some(u.scale(C64::new(power.sqrt(), 0.0)));
    d.extraction = Extraction::Randomized;
    Ok(Some(d))
}

/// Options for [`solve_design`].
#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub plan: Option<SearchPlan>,
    pub candidates: usize,
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            plan: None,
            candidates: DEFAULT_CANDIDATES,
            seed: 0,
        }
    }
}

/// Search plus extraction. Infeasibility and numerical failure come back as a
/// design status rather than an error.
pub fn solve_design(formulation: &Formulation, opts: &SolveOptions) -> Result<(Design, Vec<TracePoint>)> {
    let plan = match &opts.plan {
        Some(p) => p.clone(),
        None => formulation.default_plan()?,
    };
    let n = formulation.scenario.n_t;
    let failed = |status| {
        let z = HermitianMatrix::zeros(n);
        let mut d = Design::new(formulation.problem, formulation.model, z.clone(), z, f64::NAN, f64::NAN, f64::NAN);
        d.status = status;
        d
    };
    match formulation.search(&plan) {
        Ok(out) => {
            let mut rng = crate::scenario::task_rng(opts.seed, 1 << 32);
            let d = extract_beamformer(&out.design, formulation, opts.candidates, &mut rng)?;
            Ok((d, out.trace))
        }
        Err(Error::AllInfeasible) => Ok((failed(DesignStatus::Infeasible), Vec::new())),
        Err(Error::NumericalFailure { param, msg }) => {
            log::warn!("numerical failure at {param}: {msg}");
            Ok((failed(DesignStatus::NumericalFailure), Vec::new()))
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests;
