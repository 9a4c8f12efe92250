//! Exact extrema of a Hermitian quadratic over a complex ball.

use nalgebra::DVector;

use crate::design::Sense;
use crate::hermitian::{ComplexVector, HermitianMatrix, C64};

const BISECTION_TOL: f64 = 1e-10;

/// Value and maximizing/minimizing point of
/// `f(δ) = δ†Aδ + 2 Re(b†δ) + c` over `‖δ‖ ≤ xi`.
#[derive(Clone, Debug)]
pub struct Extremum {
    pub value: f64,
    pub point: ComplexVector,
}

fn eval(a: &HermitianMatrix, b: &ComplexVector, c: f64, d: &DVector<C64>) -> f64 {
    let quad = (d.adjoint() * a.as_matrix() * d)[(0, 0)].re;
    let lin = (b.as_dvector().adjoint() * d)[(0, 0)].re;
    quad + 2.0 * lin + c
}

/// Trust-region solution: the minimizer is `δ = −(A + νI)⁻¹ b` for the
/// smallest admissible multiplier `ν ≥ max(0, −λ_min)`, with the hard case
/// (b orthogonal to the bottom eigenspace) completed along an eigenvector.
fn minimize(a: &HermitianMatrix, b: &ComplexVector, c: f64, xi: f64) -> Extremum {
    let n = a.dim();
    if xi == 0.0 {
        return Extremum {
            value: c,
            point: ComplexVector::zeros(n),
        };
    }
    let eig = a.eig();
    // ascending order
    let lam: Vec<f64> = eig.values.iter().rev().copied().collect();
    let vecs: Vec<DVector<C64>> = (0..n).rev().map(|j| eig.vectors[j].as_dvector().clone()).collect();
    let beta: Vec<C64> = vecs.iter().map(|v| (v.adjoint() * b.as_dvector())[(0, 0)]).collect();
    let scale = lam.iter().fold(0.0f64, |m, l| m.max(l.abs())).max(1e-300);
    let lam_min = lam[0];
    let bottom = |i: usize| lam[i] - lam_min <= 1e-12 * scale;

    let point_at = |nu: f64, skip_bottom: bool| -> DVector<C64> {
        let mut d = DVector::<C64>::zeros(n);
        for i in 0..n {
            if skip_bottom && bottom(i) {
                continue;
            }
            let den = lam[i] + nu;
            d -= &vecs[i] * (beta[i] / den);
        }
        d
    };
    let norm_at = |nu: f64| -> f64 {
        (0..n)
            .map(|i| beta[i].norm_sqr() / (lam[i] + nu).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let finish = |d: DVector<C64>| {
        let value = eval(a, b, c, &d);
        Extremum {
            value,
            point: ComplexVector::from_dvector(d).expect("non-empty"),
        }
    };

    let nu_lo = (-lam_min).max(0.0);
    let bnorm = b.norm();
    let bottom_mass: f64 = (0..n).filter(|&i| bottom(i)).map(|i| beta[i].norm_sqr()).sum();
    let degenerate = bottom_mass <= 1e-24 * (bnorm * bnorm + 1e-300);

    if lam_min > 1e-12 * scale && norm_at(0.0) <= xi {
        return finish(point_at(0.0, false));
    }
    if degenerate {
        let d = point_at(nu_lo, true);
        let r = d.norm();
        if r <= xi {
            // Hard case: move along the bottom eigenvector to the boundary,
            // which does not change the value when ν = 0 and lowers it otherwise.
            let fill = (xi * xi - r * r).max(0.0).sqrt();
            let v0 = &vecs[(0..n).find(|&i| bottom(i)).unwrap()];
            let d = d + v0 * C64::new(fill, 0.0);
            return finish(d);
        }
    }
    // ‖δ(ν)‖ decreases from above xi to below xi on (nu_lo, nu_hi].
    let mut lo = nu_lo;
    let mut hi = nu_lo + bnorm / xi + 1e-300;
    while norm_at(hi) > xi {
        hi = nu_lo + 2.0 * (hi - nu_lo);
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if norm_at(mid) > xi {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= BISECTION_TOL * (1.0 + hi) * 1e-4 {
            break;
        }
    }
    let mut d = point_at(hi, degenerate);
    // Snap onto the sphere; the bisection leaves it a hair inside.
    let r = d.norm();
    if r > 0.0 {
        d *= C64::new(xi / r, 0.0);
    }
    finish(d)
}

/// Exact minimum or maximum of `δ†Aδ + 2 Re(b†δ) + c` over `‖δ‖ ≤ xi`.
pub fn worst_case_quadratic(a: &HermitianMatrix, b: &ComplexVector, c: f64, xi: f64, sense: Sense) -> Extremum {
    match sense {
        Sense::Min => minimize(a, b, c, xi),
        Sense::Max => {
            let e = minimize(&a.scale(-1.0), &b.scale(C64::new(-1.0, 0.0)), -c, xi);
            Extremum {
                value: -e.value,
                point: e.point,
            }
        }
    }
}

/// Quadratic in the error `δ` of `(ḡ + δ)† X (ḡ + δ)`: returns `(X, Xḡ, ḡ†Xḡ)`.
pub fn shifted_quadratic(x: &HermitianMatrix, g_bar: &ComplexVector) -> (HermitianMatrix, ComplexVector, f64) {
    let b = x.mul_vec(g_bar).expect("dimensions agree");
    let c = x.quad_form(g_bar).expect("dimensions agree");
    (x.clone(), b, c)
}

/// `max_{‖g − ḡ‖ ≤ xi} g†Wg / (g†Σg + σ²)` by bisection on the level `γ`:
/// the worst SINR is the root of `max_g g†(W − γΣ)g − γσ² = 0`.
pub fn worst_case_sinr(w: &HermitianMatrix, sigma: &HermitianMatrix, noise: f64, g_bar: &ComplexVector, xi: f64) -> f64 {
    let phi = |gamma: f64| -> f64 {
        let m = w.add_scaled(-gamma, sigma).expect("dimensions agree");
        let (a, b, c) = shifted_quadratic(&m, g_bar);
        worst_case_quadratic(&a, &b, c, xi, Sense::Max).value - gamma * noise
    };
    if phi(0.0) <= 0.0 {
        return 0.0;
    }
    let reach = g_bar.norm() + xi;
    let lam_max = w.eigenvalues()[0].max(0.0);
    let mut hi = lam_max * reach * reach / noise.max(1e-300) + 1.0;
    while phi(hi) > 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= BISECTION_TOL * (1.0 + hi) {
            break;
        }
    }
    // The maximizer at the last level below the root attains an SINR in
    // [lo, max]; report that attained value.
    let m = w.add_scaled(-lo, sigma).expect("dimensions agree");
    let (a, b, c) = shifted_quadratic(&m, g_bar);
    let g = g_bar
        .add(&worst_case_quadratic(&a, &b, c, xi, Sense::Max).point)
        .expect("dimensions agree");
    let attained = w.quad_form(&g).expect("dimensions agree") / (sigma.quad_form(&g).expect("dimensions agree") + noise);
    attained.clamp(lo, hi)
}
