//! Seeded channel and CSI-error sampling.
//!
//! Every task draws from its own ChaCha stream derived from `(seed, index)`,
//! so results never depend on scheduling order.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;

use super::{ChannelSet, Scenario};
use crate::hermitian::{ComplexVector, HermitianMatrix, C64};

/// Independent RNG stream for task `index` under `seed`.
pub fn task_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `CN(0, var · I)` vector: real and imaginary parts each `N(0, var/2)`.
pub fn sample_complex_gaussian<R: Rng + ?Sized>(rng: &mut R, dim: usize, var: f64) -> ComplexVector {
    let sd = (var / 2.0).sqrt();
    let entries = (0..dim)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(sd * re, sd * im)
        })
        .collect();
    ComplexVector::new(entries).expect("dim >= 1")
}

/// Draws `h`, then `ḡ_1..ḡ_K`, then `q̄_1..q̄_M`.
pub fn sample_channels<R: Rng + ?Sized>(scenario: &Scenario, rng: &mut R) -> ChannelSet {
    let n = scenario.n_t;
    let v = scenario.channel_var;
    let h = sample_complex_gaussian(rng, n, v.h);
    let g_bar = (0..scenario.n_ehr)
        .map(|_| sample_complex_gaussian(rng, n, v.g))
        .collect();
    let q_bar = (0..scenario.n_pu)
        .map(|_| sample_complex_gaussian(rng, n, v.q))
        .collect();
    ChannelSet {
        h,
        g_bar,
        q_bar,
        error_spec: scenario.error_spec.clone(),
    }
}

/// Uniform point in the complex `n_t`-ball of radius `xi`.
pub fn sample_bounded_error<R: Rng + ?Sized>(xi: f64, n_t: usize, rng: &mut R) -> ComplexVector {
    let dir = sample_complex_gaussian(rng, n_t, 2.0);
    let norm = dir.norm();
    if xi == 0.0 || norm == 0.0 {
        return ComplexVector::zeros(n_t);
    }
    let u: f64 = rng.random();
    let r = xi * u.powf(1.0 / (2 * n_t) as f64);
    dir.scale(C64::new(r / norm, 0.0))
}

/// `cov_sqrt · ĝ` with `ĝ ~ CN(0, I)`.
pub fn sample_gaussian_error<R: Rng + ?Sized>(cov_sqrt: &HermitianMatrix, rng: &mut R) -> ComplexVector {
    let z = sample_complex_gaussian(rng, cov_sqrt.dim(), 1.0);
    cov_sqrt.mul_vec(&z).expect("dimensions agree")
}
