use nalgebra::DMatrix;
use proptest::prelude::*;

use super::*;
use crate::hermitian::{ComplexVector, HermitianMatrix, C64};
use crate::scenario::{sample_complex_gaussian, task_rng};

fn herm_from(rng: &mut impl rand::Rng, n: usize) -> HermitianMatrix {
    let a: Vec<_> = (0..n).map(|_| sample_complex_gaussian(rng, n, 1.0)).collect();
    let mut m = DMatrix::<C64>::zeros(n, n);
    for (j, col) in a.iter().enumerate() {
        m.set_column(j, col.as_dvector());
    }
    HermitianMatrix::new(&m + m.adjoint()).unwrap()
}

#[test]
fn scalar_lower_bound_lp() {
    let mut p = ConicProgram::new();
    let x = p.add_scalar_var("x", None);
    p.minimize(AffineScalar::var(x));
    p.add_ineq("x>=3", AffineScalar::var(x).plus_const(-3.0));
    let s = solve_with_defaults(&p).unwrap();
    assert_eq!(s.status, SolveStatus::Optimal);
    assert!((s.scalar(x) - 3.0).abs() < 1e-7);
    assert!((s.objective - 3.0).abs() < 1e-7);
}

#[test]
fn decoupled_psd_diagonal() {
    let mut p = ConicProgram::new();
    let x = p.add_matrix_var("X", 2);
    p.minimize(AffineScalar::trace(x, HermitianMatrix::identity(2)));
    p.add_ineq(
        "x11>=1",
        AffineScalar::trace(x, HermitianMatrix::from_real_diagonal(&[1.0, 0.0])).plus_const(-1.0),
    );
    p.add_ineq(
        "x22>=2",
        AffineScalar::trace(x, HermitianMatrix::from_real_diagonal(&[0.0, 1.0])).plus_const(-2.0),
    );
    let s = solve_with_defaults(&p).unwrap();
    assert_eq!(s.status, SolveStatus::Optimal);
    assert!((s.objective - 3.0).abs() < 1e-6);
    let m = s.matrix(x);
    assert!(m.get(0, 1).norm() < 1e-6);
    assert!((m.get(0, 0).re - 1.0).abs() < 1e-6 && (m.get(1, 1).re - 2.0).abs() < 1e-6);
}

#[test]
fn soc_projection() {
    let mut p = ConicProgram::new();
    let x = p.add_scalar_var("x", None);
    let y = p.add_scalar_var("y", None);
    let t = p.add_scalar_var("t", None);
    p.minimize(AffineScalar::var(t));
    p.add_soc(
        "dist",
        vec![
            AffineScalar::var(x).plus_const(-1.0),
            AffineScalar::var(y).plus_const(-2.0),
        ],
        AffineScalar::var(t),
    );
    let s = solve_with_defaults(&p).unwrap();
    assert_eq!(s.status, SolveStatus::Optimal);
    assert!(s.scalar(t).abs() < 1e-6);
    assert!((s.scalar(x) - 1.0).abs() < 1e-4 && (s.scalar(y) - 2.0).abs() < 1e-4);
}

#[test]
fn infeasible_and_unbounded() {
    let mut p = ConicProgram::new();
    let x = p.add_scalar_var("x", None);
    p.minimize(AffineScalar::var(x));
    p.add_ineq("x>=3", AffineScalar::var(x).plus_const(-3.0));
    p.add_ineq("x<=1", AffineScalar::var(x).scaled(-1.0).plus_const(1.0));
    assert_eq!(solve_with_defaults(&p).unwrap().status, SolveStatus::Infeasible);

    let mut q = ConicProgram::new();
    let y = q.add_scalar_var("y", None);
    q.minimize(AffineScalar::var(y));
    q.add_ineq("y<=1", AffineScalar::var(y).scaled(-1.0).plus_const(1.0));
    assert_eq!(solve_with_defaults(&q).unwrap().status, SolveStatus::Unbounded);
}

#[test]
fn check_reports_signed_slack() {
    let mut p = ConicProgram::new();
    let x = p.add_scalar_var("x", None);
    p.minimize(AffineScalar::var(x));
    p.add_ineq("x>=3", AffineScalar::var(x).plus_const(-3.0));
    let r = check_solution(&p, &[], &[2.0]).unwrap();
    assert_eq!(r.slacks[0].slack, -1.0);
    assert_eq!(r.max_violation, 1.0);
    let r = check_solution(&p, &[], &[3.5]).unwrap();
    assert!(r.slacks.iter().all(|s| s.slack >= -1e-8));
    assert_eq!(r.max_violation, 0.0);
}

#[test]
fn min_eigenvalue_by_trace_program() {
    let mut rng = task_rng(11, 0);
    for n in [1, 2, 3, 5] {
        let c = herm_from(&mut rng, n);
        let mut p = ConicProgram::new();
        let x = p.add_matrix_var("X", n);
        p.minimize(AffineScalar::trace(x, c.clone()));
        p.add_eq("unit-trace", AffineScalar::trace(x, HermitianMatrix::identity(n)).plus_const(-1.0));
        let s = solve_with_defaults(&p).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        let lam = c.min_eigenvalue();
        assert!((s.objective - lam).abs() < 1e-6 * (1.0 + lam.abs()), "n {n}: {} vs {lam}", s.objective);
    }
}

/// min t s.t. [[X, v], [v†, t]] ⪰ 0 with X pinned to A gives t = v†A⁻¹v.
#[test]
fn schur_complement_with_pinned_matrix() {
    let mut rng = task_rng(12, 0);
    for n in [1, 2, 3] {
        let g = herm_from(&mut rng, n);
        let a = HermitianMatrix::new(g.as_matrix() * g.as_matrix() + DMatrix::identity(n, n)).unwrap();
        let v = sample_complex_gaussian(&mut rng, n, 1.0);
        let mut p = ConicProgram::new();
        let x = p.add_matrix_var("X", n);
        let t = p.add_scalar_var("t", None);
        p.minimize(AffineScalar::var(t));
        let mut basis = DMatrix::<C64>::zeros(n, n + 1);
        for i in 0..n {
            basis[(i, i)] = C64::new(1.0, 0.0);
        }
        let mut c0 = DMatrix::<C64>::zeros(n + 1, n + 1);
        for i in 0..n {
            c0[(i, n)] = v.entries()[i];
            c0[(n, i)] = v.entries()[i].conj();
        }
        let mut et = DMatrix::<C64>::zeros(n + 1, n + 1);
        et[(n, n)] = C64::new(1.0, 0.0);
        p.add_lmi(
            "schur",
            AffineMatrix::constant(HermitianMatrix::new(c0).unwrap())
                .plus_scalar(t, HermitianMatrix::new(et).unwrap())
                .plus_congruence(x, 1.0, basis),
        );
        let pin = AffineMatrix::zeros(n).plus_congruence(x, 1.0, DMatrix::identity(n, n));
        for i in 0..n {
            for j in i..n {
                let e = pin.entry(i, j);
                let z = a.get(i, j);
                p.add_eq(&format!("re{i}{j}"), e.re.plus_const(-z.re));
                if i != j {
                    p.add_eq(&format!("im{i}{j}"), e.im.plus_const(-z.im));
                }
            }
        }
        let s = solve_with_defaults(&p).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        let ainv = a.as_matrix().clone().try_inverse().unwrap();
        let want = (v.as_dvector().adjoint() * ainv * v.as_dvector())[(0, 0)].re;
        assert!((s.scalar(t) - want).abs() < 1e-6 * (1.0 + want), "{} vs {want}", s.scalar(t));
        assert!((s.matrix(x).sub(&a).unwrap().max_abs()) < 1e-6);
    }
}

#[test]
fn bilinear_entry_matches_direct_product() {
    let mut rng = task_rng(13, 0);
    let n = 3;
    let x = herm_from(&mut rng, n);
    let l = sample_complex_gaussian(&mut rng, n, 1.0);
    let r = sample_complex_gaussian(&mut rng, n, 1.0);
    let f = ComplexAffine::bilinear(MatVar(0), 0.7, &l, &r);
    let mats = [x.clone()];
    let want = (l.as_dvector().adjoint() * x.as_matrix() * r.as_dvector())[(0, 0)] * 0.7;
    let re = f.re.evaluate(&mats, &[]).unwrap();
    let im = f.im.evaluate(&mats, &[]).unwrap();
    assert!((re - want.re).abs() < 1e-12 && (im - want.im).abs() < 1e-12);
}

#[test]
fn congruence_coefficients_are_hermitian() {
    let mut rng = task_rng(14, 0);
    let n = 3;
    let b = DMatrix::from_fn(n, n + 1, |_, _| sample_complex_gaussian(&mut rng, 1, 1.0).entries()[0]);
    let e = AffineMatrix::constant(HermitianMatrix::identity(n + 1)).plus_congruence(MatVar(0), -1.5, b);
    for c in e.coefficient_matrices() {
        assert!((&c - c.adjoint()).camax() < 1e-12);
    }
}

#[test]
fn rank_one_restriction() {
    let mut rng = task_rng(15, 0);
    let n = 3;
    let v = sample_complex_gaussian(&mut rng, n, 1.0);
    let mut p = ConicProgram::new();
    let x = p.add_matrix_var("X", n);
    p.minimize(AffineScalar::trace(x, HermitianMatrix::identity(n)));
    p.add_lmi(
        "dominates",
        AffineMatrix::constant(HermitianMatrix::outer(&v).scale(-1.0)).plus_congruence(
            x,
            1.0,
            DMatrix::identity(n, n),
        ),
    );
    let full = solve_with_defaults(&p).unwrap();
    assert!((full.objective - v.norm_sqr()).abs() < 1e-6);

    let u = v.scale(C64::new(1.0 / v.norm(), 0.0));
    let (q, pv) = p.restrict_matrix_var(x, &u, "p").unwrap();
    assert!(q.matrix_vars.is_empty());
    let s = solve_with_defaults(&q).unwrap();
    assert_eq!(s.status, SolveStatus::Optimal);
    assert!((s.scalar(pv) - v.norm_sqr()).abs() < 1e-6);
}

#[test]
fn unused_variable_is_rejected() {
    let mut p = ConicProgram::new();
    let x = p.add_scalar_var("x", None);
    p.add_scalar_var("y", None);
    p.minimize(AffineScalar::var(x));
    assert!(p.validate().is_err());
    assert!(solve_with_defaults(&p).is_err());
}

#[test]
fn dump_rejects_garbage() {
    assert!(parse_dump("nonsense").is_err());
    assert!(parse_dump("conic-program v1\nscalar 0 x free\n").is_err());
    assert!(parse_dump("conic-program v1\nscalar 0 x maybe\nend\n").is_err());
    assert!(parse_dump("conic-program v1\n  const 1.0\nend\n").is_err());
}

fn arb_herm(n: usize) -> impl Strategy<Value = HermitianMatrix> {
    prop::collection::vec(-1e3f64..1e3, 2 * n * n).prop_map(move |v| {
        let m = DMatrix::from_fn(n, n, |i, j| C64::new(v[2 * (i * n + j)], v[2 * (i * n + j) + 1]));
        HermitianMatrix::new((&m + m.adjoint()) * C64::new(0.5, 0.0)).unwrap()
    })
}

fn arb_program() -> impl Strategy<Value = ConicProgram> {
    (1usize..4, any::<f64>().prop_filter("finite", |x| x.is_finite()), any::<u64>())
        .prop_flat_map(|(n, c, seed)| (Just(n), Just(c), Just(seed), arb_herm(n), arb_herm(n + 1)))
        .prop_map(|(n, c, seed, h, h1)| {
            let mut rng = task_rng(seed, 0);
            let mut p = ConicProgram::new();
            let w = p.add_matrix_var("W", n);
            let t = p.add_scalar_var("t", Some(1.0 + 1e-9));
            let s = p.add_scalar_var("s", None);
            p.minimize(AffineScalar::trace(w, HermitianMatrix::identity(n)).plus_const(c));
            p.add_eq("pin", AffineScalar::var(s).plus_const(-c / 3.0));
            p.add_ineq("row a", AffineScalar::trace(w, h.clone()).plus_var(t, -0.1).plus_const(c));
            p.add_soc(
                "cone",
                vec![AffineScalar::constant(2.0), AffineScalar::var(s).plus_var(t, -1.0).plus_const(1.0)],
                AffineScalar::var(s).plus_var(t, 1.0).plus_const(-1.0),
            );
            let b = DMatrix::from_fn(n, n + 1, |_, _| sample_complex_gaussian(&mut rng, 1, 1.0).entries()[0]);
            p.add_lmi(
                "lmi",
                AffineMatrix::constant(h1.clone())
                    .plus_scalar(t, HermitianMatrix::identity(n + 1))
                    .plus_congruence(w, -1.0 / 3.0, b),
            );
            p
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn dump_round_trip(p in arb_program()) {
        let text = p.dump();
        let q = parse_dump(&text).unwrap();
        prop_assert_eq!(&p, &q);
        prop_assert_eq!(text, q.dump());
    }
}

#[test]
fn vector_lengths_in_dump() {
    let v = ComplexVector::from_real(&[1.0, 2.0]).unwrap();
    let mut p = ConicProgram::new();
    let x = p.add_matrix_var("X", 2);
    p.minimize(AffineScalar::trace(x, HermitianMatrix::outer(&v)));
    let text = p.dump();
    assert!(text.starts_with("conic-program v1\nmatrix 0 X 2\nobjective\n"));
    assert!(text.ends_with("end\n"));
}
