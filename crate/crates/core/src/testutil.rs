//! Fixtures shared by unit tests.

use nalgebra::DMatrix;
use rand::Rng;

use crate::hermitian::{ComplexVector, HermitianMatrix, C64};
use crate::scenario::{sample_channels, sample_complex_gaussian, task_rng, ChannelSet, ErrorSpec, Scenario};

/// Random Hermitian `G + G†`.
pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> HermitianMatrix {
    let m = DMatrix::from_fn(n, n, |_, _| sample_complex_gaussian(rng, 1, 1.0).entries()[0]);
    HermitianMatrix::new(&m + m.adjoint()).unwrap()
}

/// Random PSD matrix of the given rank, scaled by `scale`.
pub fn random_psd(rng: &mut impl Rng, n: usize, rank: usize, scale: f64) -> HermitianMatrix {
    let mut acc = HermitianMatrix::zeros(n);
    for _ in 0..rank {
        let v = sample_complex_gaussian(rng, n, 1.0);
        acc = acc.add(&HermitianMatrix::outer(&v)).unwrap();
    }
    acc.scale(scale)
}

pub fn real_vec(x: &[f64]) -> ComplexVector {
    ComplexVector::from_real(x).unwrap()
}

pub fn complex_vec(x: &[(f64, f64)]) -> ComplexVector {
    ComplexVector::new(x.iter().map(|&(a, b)| C64::new(a, b)).collect()).unwrap()
}

/// Default scenario with norm-bounded errors of the given radii.
pub fn bounded_scenario(n_t: usize, xi_e: f64, xi_p: f64) -> Scenario {
    let mut s = Scenario::defaults(n_t);
    s.error_spec = ErrorSpec::Bounded {
        xi_e: vec![xi_e; s.n_ehr],
        xi_p: vec![xi_p; s.n_pu],
    };
    s
}

pub fn channels(sc: &Scenario, seed: u64, index: u64) -> ChannelSet {
    sample_channels(sc, &mut task_rng(seed, index))
}

/// Single-antenna, single-EHR, single-PU scenario with the given data.
pub fn scalar_scenario(xi_e: f64, xi_p: f64) -> (Scenario, ChannelSet) {
    let mut s = Scenario::defaults(1);
    s.n_ehr = 1;
    s.n_pu = 1;
    s.r_min = 1.0;
    s.psi_s = 0.05;
    s.psi_e = vec![0.01];
    s.p_in = vec![0.1];
    s.p_th = 2.0;
    s.outage_probs.eh = vec![0.05];
    s.outage_probs.interference = vec![0.05];
    s.error_spec = ErrorSpec::Bounded {
        xi_e: vec![xi_e],
        xi_p: vec![xi_p],
    };
    let ch = ChannelSet {
        h: real_vec(&[1.0]),
        g_bar: vec![real_vec(&[0.3])],
        q_bar: vec![real_vec(&[0.3])],
        error_spec: s.error_spec.clone(),
    };
    (s, ch)
}
