//! Chi-square quantiles and the uncertainty-radius calibration that maps a
//! Gaussian error variance to a bounded-error radius with the same coverage.

use crate::error::{Error, Result};

const QUANTILE_TOL: f64 = 1e-10;

const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let t = x + 7.5;
    let mut a = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Regularized lower incomplete gamma function `P(a, x)`.
pub fn regularized_gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let lg = ln_gamma(a);
    if x < a + 1.0 {
        // power series
        let mut sum = 1.0 / a;
        let mut term = sum;
        let mut ap = a;
        for _ in 0..10_000 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        (sum.ln() - x + a * x.ln() - lg).exp().min(1.0)
    } else {
        // continued fraction for Q(a, x), modified Lentz
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        let q = (-x + a * x.ln() - lg).exp() * h;
        (1.0 - q).clamp(0.0, 1.0)
    }
}

/// CDF of the central chi-square distribution with `dof` degrees of freedom.
pub fn chi_square_cdf(x: f64, dof: f64) -> f64 {
    regularized_gamma_p(dof / 2.0, x / 2.0)
}

/// Inverse CDF of the central chi-square distribution, by bisection to an
/// absolute tolerance of `1e-10`.
pub fn chi_square_quantile(p: f64, dof: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p) || dof <= 0.0 {
        return Err(Error::Domain(format!(
            "chi-square quantile needs p in [0,1) and dof > 0, got p = {p}, dof = {dof}"
        )));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = dof.max(1.0);
    while chi_square_cdf(hi, dof) < p {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > QUANTILE_TOL {
        let mid = 0.5 * (lo + hi);
        if chi_square_cdf(mid, dof) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Radius of the complex `n_t`-ball that contains a `CN(0, eps2 I)` error with
/// probability `1 - omega`: `sqrt(eps2 · F⁻¹_{2 n_t}(1 - omega) / 2)`.
pub fn calibrate_radius(eps2: f64, n_t: usize, omega: f64) -> Result<f64> {
    if !(omega > 0.0 && omega < 1.0) {
        return Err(Error::Domain(format!(
            "outage probability must lie in (0,1), got {omega}"
        )));
    }
    if eps2 < 0.0 || n_t == 0 {
        return Err(Error::Domain(format!(
            "calibration needs eps2 >= 0 and n_t >= 1, got eps2 = {eps2}, n_t = {n_t}"
        )));
    }
    if eps2 == 0.0 {
        return Ok(0.0);
    }
    let q = chi_square_quantile(1.0 - omega, 2.0 * n_t as f64)?;
    Ok((eps2 * q / 2.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// For integer `k`, `P(k, y) = 1 - e^{-y} Σ_{j<k} y^j / j!`.
    fn poisson_tail_cdf(x: f64, n_t: usize) -> f64 {
        let y = x / 2.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        for j in 1..n_t {
            term *= y / j as f64;
            sum += term;
        }
        1.0 - (-y).exp() * sum
    }

    fn oracle_quantile(p: f64, n_t: usize) -> f64 {
        let (mut lo, mut hi) = (0.0, 1000.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if poisson_tail_cdf(mid, n_t) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn ln_gamma_integers() {
        let mut f = 1.0f64;
        for n in 1..20 {
            assert!((ln_gamma(n as f64) - f.ln()).abs() < 1e-12, "n = {n}");
            f *= n as f64;
        }
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-13);
    }

    #[test]
    fn quantile_matches_closed_form_oracle() {
        for n_t in 1..=15 {
            for p in [0.05, 0.5, 0.9, 0.95, 0.99] {
                let q = chi_square_quantile(p, 2.0 * n_t as f64).unwrap();
                let o = oracle_quantile(p, n_t);
                assert!((q - o).abs() < 1e-8, "n_t = {n_t}, p = {p}: {q} vs {o}");
            }
        }
        let q20 = chi_square_quantile(0.95, 20.0).unwrap();
        assert!((q20 - 31.4104).abs() < 1e-4);
    }

    #[test]
    fn calibration_examples() {
        assert_eq!(calibrate_radius(0.0, 4, 0.05).unwrap(), 0.0);
        let xi = calibrate_radius(0.001, 10, 0.05).unwrap();
        assert!((xi - 0.12532).abs() < 1e-5, "{xi}");
        let xi = calibrate_radius(2.0, 1, 0.5).unwrap();
        assert!((xi - (2.0f64 * 2f64.ln()).sqrt()).abs() < 1e-9);
        assert!((xi - 1.17741).abs() < 1e-5);
    }

    #[test]
    fn calibration_domain_errors() {
        assert!(calibrate_radius(1.0, 2, 0.0).is_err());
        assert!(calibrate_radius(1.0, 2, 1.0).is_err());
        assert!(calibrate_radius(1.0, 2, 1.5).is_err());
    }

    #[test]
    fn calibration_is_monotone() {
        let eps = [0.0001, 0.001, 0.01, 0.1];
        let omegas = [0.2, 0.1, 0.05, 0.01];
        for n_t in [1, 4, 10] {
            for w in eps.windows(2) {
                assert!(calibrate_radius(w[0], n_t, 0.05).unwrap() < calibrate_radius(w[1], n_t, 0.05).unwrap());
            }
            for w in omegas.windows(2) {
                assert!(calibrate_radius(0.01, n_t, w[0]).unwrap() < calibrate_radius(0.01, n_t, w[1]).unwrap());
            }
        }
    }
}
