use std::time::Instant;

use super::*;
use crate::conic::AffineScalar;
use crate::scenario::{task_rng, ErrorSpec};
use crate::testutil::*;

fn gaussian_scenario(n_t: usize) -> Scenario {
    Scenario::defaults(n_t)
}

#[test]
fn beta_interval_examples() {
    let mut sc = Scenario::defaults(1);
    sc.p_th = 1.0;
    sc.sigma_sp2 = 0.01;
    assert_eq!(beta_interval(&sc, &real_vec(&[1.0])).unwrap(), (1.0, 101.0));
    sc.p_th = 0.0;
    assert_eq!(beta_interval(&sc, &real_vec(&[1.0])).unwrap(), (1.0, 1.0));
    sc.sigma_sp2 = 0.0;
    assert!(beta_interval(&sc, &real_vec(&[1.0])).is_err());

    let sc = Scenario::defaults(4);
    let h = real_vec(&[1.0; 4]);
    let (_, hi) = beta_interval(&sc, &h).unwrap();
    assert!((hi - (1.0 + 1.585 * 4.0 / 0.01)).abs() < 0.05 * 4.0 / 0.01 * 0.01, "{hi}");
}

#[test]
fn grid_parsing_and_points() {
    assert_eq!("log:16".parse::<GridSpec>().unwrap(), GridSpec::Log { points: 16 });
    assert_eq!("uniform:0.5".parse::<GridSpec>().unwrap(), GridSpec::Uniform { step: 0.5 });
    for bad in ["log:1", "uniform:0", "uniform:-1", "cubic:3", "log", "log:x"] {
        assert!(bad.parse::<GridSpec>().is_err(), "{bad}");
    }
    let plan = SearchPlan {
        param: SearchParam::Beta,
        lo: 1.0,
        hi: 2.2,
        grid: GridSpec::Uniform { step: 0.5 },
        refine: false,
        refine_width: 1e-3,
    };
    assert_eq!(plan.points().unwrap(), vec![1.0, 1.5, 2.0, 2.2]);
    let pts = plan.clone().with_grid(GridSpec::Log { points: 64 }).points().unwrap();
    assert_eq!(pts.len(), 64);
    assert!((pts[0] - 1.0).abs() < 1e-15 && (pts[63] - 2.2).abs() < 1e-12);
    assert!(pts.windows(2).all(|w| w[0] < w[1]));
    let z = SearchPlan::z().points().unwrap();
    assert_eq!(z.len(), 64);
    assert_eq!((z[0], z[63]), (Z_MIN, 1.0));
}

/// `min x` subject to `x ≥ 2` plus dummy design variables.
fn constant_program(_: f64) -> Result<(ConicProgram, DesignVars)> {
    let mut p = ConicProgram::new();
    let v = DesignVars::add(&mut p, 1, ProblemKind::PowerMin);
    p.minimize(v.total_trace(&HermitianMatrix::identity(1)));
    p.add_ineq("floor", v.total_trace(&HermitianMatrix::identity(1)).plus_const(-2.0));
    p.add_ineq("t", AffineScalar::var(v.t).plus_var(v.s, 1.0).plus_const(-3.0));
    p.add_ineq("cap", AffineScalar::constant(10.0).plus_var(v.t, -1.0).plus_var(v.s, -1.0));
    Ok((p, v))
}

#[test]
fn constant_builder_gives_its_objective() {
    let plan = SearchPlan {
        param: SearchParam::Beta,
        lo: 1.0,
        hi: 5.0,
        grid: GridSpec::Log { points: 7 },
        refine: false,
        refine_width: 1e-3,
    };
    let out = run_search(&plan, ProblemKind::PowerMin, ErrorModel::Bounded, constant_program).unwrap();
    assert_eq!(out.trace.len(), 7);
    assert!((out.design.objective - 2.0).abs() < 1e-6);
    let best = out.trace.iter().map(|p| p.objective).fold(f64::INFINITY, f64::min);
    assert_eq!(out.design.objective, best);
    assert!(out.design.rho > 0.0 && out.design.rho < 1.0);
}

#[test]
fn all_infeasible_is_reported() {
    let plan = SearchPlan {
        param: SearchParam::Z,
        lo: 0.1,
        hi: 0.9,
        grid: GridSpec::Linear { points: 4 },
        refine: true,
        refine_width: 1e-3,
    };
    let infeasible = |_: f64| {
        let (mut p, v) = constant_program(0.0)?;
        p.add_ineq("never", v.total_trace(&HermitianMatrix::identity(1)).scaled(-1.0).plus_const(1.0));
        Ok((p, v))
    };
    let err = run_search(&plan, ProblemKind::PowerMin, ErrorModel::Outage, infeasible).unwrap_err();
    assert!(matches!(err, Error::AllInfeasible), "{err}");
}

fn small_plan(f: &Formulation, points: usize, refine: bool) -> SearchPlan {
    let mut plan = f.default_plan().unwrap();
    plan.grid = match plan.grid {
        GridSpec::Log { .. } => GridSpec::Log { points },
        _ => GridSpec::Linear { points },
    };
    plan.refine = refine;
    plan
}

#[test]
fn refinement_never_hurts() {
    let sc = bounded_scenario(3, 0.02, 0.01);
    let mut compared = 0;
    for idx in 0..20 {
        let ch = channels(&sc, 21, idx);
        let f = Formulation::new(ProblemKind::PowerMin, ErrorModel::Bounded, &sc, &ch).unwrap();
        let Ok(coarse) = f.search(&small_plan(&f, 12, false)) else {
            continue;
        };
        let fine = f.search(&small_plan(&f, 12, true)).unwrap();
        assert!(fine.design.objective <= coarse.design.objective + 1e-9);
        compared += 1;
    }
    assert!(compared >= 10, "{compared}");
}

#[test]
fn nested_grids_never_get_worse() {
    let sc = gaussian_scenario(3);
    let mut compared = 0;
    for idx in 0..6 {
        let ch = channels(&sc, 22, idx);
        for model in [ErrorModel::Bounded, ErrorModel::Outage] {
            let f = Formulation::new(ProblemKind::PowerMin, model, &sc, &ch).unwrap();
            let Ok(coarse) = f.search(&small_plan(&f, 9, false)) else {
                continue;
            };
            let fine = f.search(&small_plan(&f, 17, false)).unwrap();
            let c = coarse.design.objective;
            assert!(fine.design.objective <= c + 1e-6 * (1.0 + c), "{model:?}");
            compared += 1;
        }
    }
    assert!(compared >= 4, "{compared}");
}

#[test]
fn principal_beam_of_rank_one() {
    let u = complex_vec(&[(0.6, 0.0), (0.0, 0.8)]);
    let w_mat = HermitianMatrix::outer(&u).scale(2.0);
    let z = HermitianMatrix::zeros(2);
    let d = Design::new(ProblemKind::PowerMin, ErrorModel::Bounded, w_mat, z, 0.5, 1.0, 2.0);
    assert_eq!(d.rank_w, 1);
    let out = principal_beam(&d);
    let w = out.w.unwrap();
    // Equal up to a global phase: |⟨u, w⟩| = √2 ‖u‖².
    assert!((u.dot(&w).norm() - 2f64.sqrt()).abs() < 1e-12);
    assert!((w.norm() - 2f64.sqrt()).abs() < 1e-12);
    assert_eq!(out.extraction, Extraction::Direct);
}

#[test]
fn full_rank_input_goes_to_randomization() {
    let sc = bounded_scenario(3, 0.02, 0.01);
    let ch = channels(&sc, 23, 0);
    let f = Formulation::new(ProblemKind::PowerMin, ErrorModel::Bounded, &sc, &ch).unwrap();
    let out = f.search(&small_plan(&f, 12, false)).unwrap();
    let mut d = out.design.clone();
    d.w_mat = HermitianMatrix::identity(3);
    d.refresh_ranks();
    assert!(d.ratio_w > DEFAULT_EPS_RANK);
    let got = extract_beamformer(&d, &f, 4, &mut task_rng(1, 0)).unwrap();
    assert!(matches!(got.extraction, Extraction::Randomized | Extraction::RankGtOne));
}

#[test]
fn randomizing_a_rank_one_design_reproduces_it() {
    let sc = bounded_scenario(3, 0.02, 0.01);
    let ch = channels(&sc, 24, 0);
    let f = Formulation::new(ProblemKind::PowerMin, ErrorModel::Bounded, &sc, &ch).unwrap();
    let out = f.search(&small_plan(&f, 16, true)).unwrap();
    assert!(out.design.ratio_w <= DEFAULT_EPS_RANK, "{}", out.design.ratio_w);
    let got = gaussian_randomization(&out.design, &f, 1, &mut task_rng(2, 0)).unwrap();
    assert_eq!(got.extraction, Extraction::Randomized);
    let o = out.design.objective;
    assert!((got.objective - o).abs() < 1e-5 * (1.0 + o), "{} vs {o}", got.objective);
}

#[test]
fn more_candidates_never_hurt() {
    let sc = gaussian_scenario(3);
    let mut compared = 0;
    for idx in 0..20 {
        let ch = channels(&sc, 25, idx);
        let f = Formulation::new(ProblemKind::PowerMin, ErrorModel::Outage, &sc, &ch).unwrap();
        let Ok(out) = f.search(&small_plan(&f, 12, false)) else {
            continue;
        };
        // Synthetic rank-two input at the solved z.
        let mut d = out.design.clone();
        let mut rng = task_rng(25, idx);
        d.w_mat = d.w_mat.add(&random_psd(&mut rng, 3, 1, 0.1)).unwrap();
        d.refresh_ranks();
        let one = gaussian_randomization(&d, &f, 1, &mut task_rng(26, idx)).unwrap();
        let many = gaussian_randomization(&d, &f, 100, &mut task_rng(26, idx)).unwrap();
        if one.extraction == Extraction::Randomized {
            assert_eq!(many.extraction, Extraction::Randomized);
            assert!(many.objective <= one.objective + 1e-9);
            compared += 1;
        }
    }
    assert!(compared >= 5, "{compared}");
}

#[test]
fn bounded_designs_extract_directly() {
    let sc = bounded_scenario(3, 0.02, 0.01);
    let mut solved = 0;
    for idx in 0..4 {
        let ch = channels(&sc, 27, idx);
        let f = Formulation::new(ProblemKind::PowerMin, ErrorModel::Bounded, &sc, &ch).unwrap();
        let (d, _) = solve_design(&f, &SolveOptions::default()).unwrap();
        if d.status != DesignStatus::Optimal {
            continue;
        }
        solved += 1;
        assert_eq!(d.extraction, Extraction::Direct, "ratio {}", d.ratio_w);
        assert!(d.rho > 0.0 && d.rho < 1.0);
        assert!(d.rank_sigma <= 1, "{}", d.ratio_sigma);
    }
    assert!(solved >= 2, "{solved}");
}

#[test]
fn solve_design_maps_infeasibility_to_status() {
    let mut sc = bounded_scenario(3, 0.02, 0.01);
    sc.p_th = 1e-3;
    let ch = channels(&sc, 28, 0);
    let f = Formulation::new(ProblemKind::PowerMin, ErrorModel::Bounded, &sc, &ch).unwrap();
    let opts = SolveOptions {
        plan: Some(small_plan(&f, 6, false)),
        ..SolveOptions::default()
    };
    let (d, _) = solve_design(&f, &opts).unwrap();
    assert_eq!(d.status, DesignStatus::Infeasible);
}

#[test]
fn outage_model_needs_gaussian_errors() {
    let sc = bounded_scenario(3, 0.02, 0.01);
    let ch = channels(&sc, 29, 0);
    assert!(Formulation::new(ProblemKind::PowerMin, ErrorModel::Outage, &sc, &ch).is_err());
    let mut g = sc.clone();
    g.error_spec = ErrorSpec::Gaussian {
        eps2_e: vec![0.001; 3],
        eps2_q: vec![0.0001; 2],
    };
    assert!(Formulation::new(ProblemKind::MaxminEh, ErrorModel::Bounded, &g, &ch).is_ok());
}

/// Prints the wall time of one default-grid solve at the default size.
#[test]
#[ignore]
fn timing_default_size() {
    let sc = Scenario::defaults(4);
    let ch = channels(&sc, 30, 0);
    for model in [ErrorModel::Bounded, ErrorModel::Outage] {
        let f = Formulation::new(ProblemKind::PowerMin, model, &sc, &ch).unwrap();
        let t0 = Instant::now();
        let (d, trace) = solve_design(&f, &SolveOptions::default()).unwrap();
        println!("{model:?}: {:?} {} in {:?} ({} points)", d.status, d.objective, t0.elapsed(), trace.len());
    }
}

#[test]
#[ignore]
fn timing_single_inner_solve() {
    let sc = Scenario::defaults(4);
    let ch = channels(&sc, 30, 0);
    let f = Formulation::new(ProblemKind::PowerMin, ErrorModel::Bounded, &sc, &ch).unwrap();
    let t0 = Instant::now();
    let (p, _) = f.build(3.0).unwrap();
    let t1 = Instant::now();
    let s = solve(&p, DEFAULT_TOL).unwrap();
    let t2 = Instant::now();
    crate::conic::check_solution(&p, &s.matrices, &s.scalars).unwrap();
    let t3 = Instant::now();
    println!("build {:?} solve {:?} check {:?} iters {} {:?}", t1 - t0, t2 - t1, t3 - t2, s.iterations, s.status);
}
