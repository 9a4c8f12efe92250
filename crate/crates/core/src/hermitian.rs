//! Complex Hermitian linear algebra: PSD tests, eigendecomposition, matrix
//! square roots, numerical rank and the real symmetric embedding used to hand
//! complex LMIs to a real conic solver.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Relative asymmetry accepted when constructing a [`HermitianMatrix`].
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues above `-PSD_CLAMP * (1 + max eigenvalue)` are treated as zero.
pub const PSD_CLAMP: f64 = 1e-10;
/// Default relative threshold for [`HermitianMatrix::numerical_rank`].
pub const DEFAULT_EPS_RANK: f64 = 1e-6;

const RANK_FLOOR: f64 = 1e-12;

/// A dense complex column vector of dimension at least one.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexVector(DVector<C64>);

impl ComplexVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Domain("vector dimension must be at least 1".into()));
        }
        Ok(Self(DVector::from_vec(entries)))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DVector::zeros(dim.max(1)))
    }

    pub fn from_dvector(v: DVector<C64>) -> Result<Self> {
        Self::new(v.as_slice().to_vec())
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_dvector(&self) -> &DVector<C64> {
        &self.0
    }

    pub fn entries(&self) -> &[C64] {
        self.0.as_slice()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `self† other`.
    pub fn dot(&self, other: &ComplexVector) -> C64 {
        self.0.dotc(&other.0)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn add(&self, other: &ComplexVector) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self(&self.0 + &other.0))
    }
}

/// An `n × n` complex Hermitian matrix. Construction checks Hermitian
/// symmetry to a relative tolerance and then symmetrizes exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(DMatrix<C64>);

/// Eigen-pairs sorted by descending eigenvalue.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Vec<ComplexVector>,
}

/// Numerical rank together with the ratio `λ₂ / λ₁`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankInfo {
    pub rank: usize,
    pub ratio: f64,
}

impl HermitianMatrix {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::Domain("matrix dimension must be at least 1".into()));
        }
        let asym = max_asymmetry(&m);
        let scale = 1.0 + m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if asym > HERMITIAN_TOL * scale || !m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
        {
            return Err(Error::NotHermitian { asymmetry: asym });
        }
        Ok(Self::symmetrized(m))
    }

    /// Symmetrizes `(m + m†)/2` without checking. Use only for matrices that
    /// are Hermitian by construction up to rounding.
    pub(crate) fn symmetrized(m: DMatrix<C64>) -> Self {
        let adj = m.adjoint();
        Self((m + adj) * C64::new(0.5, 0.0))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        let v = DVector::from_iterator(d.len(), d.iter().map(|&x| C64::new(x, 0.0)));
        Self(DMatrix::from_diagonal(&v))
    }

    /// `v v†`.
    pub fn outer(v: &ComplexVector) -> Self {
        Self::symmetrized(&v.0 * v.0.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.0[(i, i)].re).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(&self.0 * C64::new(s, 0.0))
    }

    pub fn add(&self, other: &HermitianMatrix) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &HermitianMatrix) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self(&self.0 - &other.0))
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: f64, other: &HermitianMatrix) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self(&self.0 + &other.0 * C64::new(s, 0.0)))
    }

    /// `B† A B` for a complex `n × m` matrix `B`.
    pub fn congruence(&self, b: &DMatrix<C64>) -> Result<Self> {
        check_dim(self.dim(), b.nrows())?;
        Ok(Self::symmetrized(b.adjoint() * &self.0 * b))
    }

    /// `A v`.
    pub fn mul_vec(&self, v: &ComplexVector) -> Result<ComplexVector> {
        check_dim(self.dim(), v.dim())?;
        Ok(ComplexVector(&self.0 * &v.0))
    }

    /// `v† A v`. The imaginary residue of the Hermitian form is checked and
    /// dropped.
    pub fn quad_form(&self, v: &ComplexVector) -> Result<f64> {
        check_dim(self.dim(), v.dim())?;
        let z = v.0.dotc(&(&self.0 * &v.0));
        let scale = 1.0 + self.max_abs() * v.norm_sqr();
        debug_assert!(
            z.im.abs() <= 1e-12 * scale,
            "Hermitian form has imaginary residue {:e}",
            z.im
        );
        Ok(z.re)
    }

    /// `Re Tr(self · other)`, the exact inner product of two Hermitian matrices.
    pub fn inner(&self, other: &HermitianMatrix) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self
            .0
            .iter()
            .zip(other.0.transpose().iter())
            .map(|(a, b)| (a * b).re)
            .sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Real symmetric `2n × 2n` embedding `[[Re A, -Im A], [Im A, Re A]]`.
    pub fn real_embedding(&self) -> DMatrix<f64> {
        real_embedding_raw(&self.0)
    }

    /// Eigen-decomposition with eigenvalues in descending order.
    pub fn eig(&self) -> Eigen {
        let se = self.0.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| se.eigenvalues[b].total_cmp(&se.eigenvalues[a]));
        let values = order.iter().map(|&i| se.eigenvalues[i]).collect();
        let vectors = order
            .iter()
            .map(|&i| ComplexVector(se.eigenvectors.column(i).into_owned()))
            .collect();
        Eigen { values, vectors }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eig().values
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let se = self.0.clone().symmetric_eigenvalues();
        se.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }

    /// Hermitian PSD square root; eigenvalues down to `-PSD_CLAMP (1 + λ_max)`
    /// are clamped to zero.
    pub fn psd_sqrt(&self) -> Result<Self> {
        let eig = self.eig();
        let lmax = eig.values[0];
        let lmin = *eig.values.last().unwrap();
        if lmin < -PSD_CLAMP * (1.0 + lmax.max(0.0)) {
            return Err(Error::NotPsd { min_eig: lmin });
        }
        Ok(Self::from_eigen(&eig, |l| l.max(0.0).sqrt()))
    }

    /// `Σ f(λ_i) v_i v_i†`.
    pub fn from_eigen(eig: &Eigen, f: impl Fn(f64) -> f64) -> Self {
        let n = eig.vectors[0].dim();
        let mut m = DMatrix::<C64>::zeros(n, n);
        for (l, v) in eig.values.iter().zip(&eig.vectors) {
            let fl = f(*l);
            if fl != 0.0 {
                m += &v.0 * v.0.adjoint() * C64::new(fl, 0.0);
            }
        }
        Self::symmetrized(m)
    }

    /// Count of eigenvalues `≥ eps_rank · λ_max` and the ratio `λ₂/λ₁`.
    pub fn numerical_rank(&self, eps_rank: f64) -> RankInfo {
        rank_of_spectrum(&self.eigenvalues(), eps_rank)
    }
}

pub(crate) fn rank_of_spectrum(values: &[f64], eps_rank: f64) -> RankInfo {
    let lmax = values.first().copied().unwrap_or(0.0);
    if lmax <= RANK_FLOOR {
        return RankInfo { rank: 0, ratio: 0.0 };
    }
    let rank = values.iter().filter(|&&l| l >= eps_rank * lmax).count();
    let ratio = if values.len() > 1 {
        values[1].max(0.0) / lmax
    } else {
        0.0
    };
    RankInfo { rank, ratio }
}

pub(crate) fn real_embedding_raw(a: &DMatrix<C64>) -> DMatrix<f64> {
    let n = a.nrows();
    let mut r = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = a[(i, j)];
            r[(i, j)] = z.re;
            r[(i + n, j + n)] = z.re;
            r[(i, j + n)] = -z.im;
            r[(i + n, j)] = z.im;
        }
    }
    r
}

fn max_asymmetry(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixJson {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VectorJson {
    dim: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for HermitianMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.dim();
        let rows = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
            (0..n)
                .map(|i| (0..n).map(|j| f(&self.0[(i, j)])).collect())
                .collect()
        };
        MatrixJson {
            dim: n,
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HermitianMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = MatrixJson::deserialize(d)?;
        let n = raw.dim;
        let shape_ok = raw.re.len() == n
            && raw.im.len() == n
            && raw.re.iter().chain(raw.im.iter()).all(|r| r.len() == n);
        if !shape_ok {
            return Err(D::Error::custom("matrix rows do not match dim"));
        }
        let m = DMatrix::from_fn(n, n, |i, j| C64::new(raw.re[i][j], raw.im[i][j]));
        HermitianMatrix::new(m).map_err(D::Error::custom)
    }
}

impl Serialize for ComplexVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        VectorJson {
            dim: self.dim(),
            re: self.0.iter().map(|z| z.re).collect(),
            im: self.0.iter().map(|z| z.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = VectorJson::deserialize(d)?;
        if raw.re.len() != raw.dim || raw.im.len() != raw.dim {
            return Err(D::Error::custom("vector length does not match dim"));
        }
        ComplexVector::new(
            raw.re
                .iter()
                .zip(&raw.im)
                .map(|(&r, &i)| C64::new(r, i))
                .collect(),
        )
        .map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_hermitian(rng: &mut impl Rng, n: usize) -> HermitianMatrix {
        let m = DMatrix::from_fn(n, n, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        HermitianMatrix::symmetrized(m)
    }

    fn random_psd(rng: &mut impl Rng, n: usize) -> HermitianMatrix {
        let b = DMatrix::from_fn(n, n, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        HermitianMatrix::symmetrized(&b * b.adjoint())
    }

    /// Cyclic Jacobi eigenvalue iteration for real symmetric matrices; used as
    /// an independent spectrum oracle.
    fn jacobi_eigenvalues(mut a: DMatrix<f64>) -> Vec<f64> {
        let n = a.nrows();
        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|(i, j)| i != j)
                .map(|(i, j)| a[(i, j)] * a[(i, j)])
                .sum();
            if off < 1e-26 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    if a[(p, q)].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let cs = 1.0 / (t * t + 1.0).sqrt();
                    let sn = t * cs;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = cs * akp - sn * akq;
                        a[(k, q)] = sn * akp + cs * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = cs * apk - sn * aqk;
                        a[(q, k)] = sn * apk + cs * aqk;
                    }
                }
            }
        }
        let mut v: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
        v.sort_by(|x, y| y.total_cmp(x));
        v
    }

    fn cholesky_psd(a: &DMatrix<f64>, shift: f64) -> bool {
        let n = a.nrows();
        let shifted = a + DMatrix::<f64>::identity(n, n) * shift;
        shifted.cholesky().is_some()
    }

    #[test]
    fn embedding_of_real_scalar() {
        let a = HermitianMatrix::from_real_diagonal(&[1.0]);
        assert_eq!(a.real_embedding(), DMatrix::<f64>::identity(2, 2));
    }

    #[test]
    fn embedding_of_pauli_y() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]);
        let a = HermitianMatrix::new(m).unwrap();
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[
                0., 0., 0., 1., //
                0., 0., -1., 0., //
                0., -1., 0., 0., //
                1., 0., 0., 0.,
            ],
        );
        assert_eq!(a.real_embedding(), expected);
    }

    #[test]
    fn embedding_spectrum_doubles_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [3, 4] {
            let a = random_hermitian(&mut rng, n);
            let oracle = jacobi_eigenvalues(a.real_embedding());
            let ev = a.eigenvalues();
            for (i, l) in ev.iter().enumerate() {
                assert!((oracle[2 * i] - l).abs() < 1e-10, "{oracle:?} vs {ev:?}");
                assert!((oracle[2 * i + 1] - l).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn eig_identity() {
        let e = HermitianMatrix::identity(2).eig();
        assert_eq!(e.values.len(), 2);
        for l in e.values {
            assert!((l - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn eig_rank_one_outer_product() {
        let u = ComplexVector::new(vec![c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)]).unwrap();
        let e = HermitianMatrix::outer(&u).eig();
        assert!((e.values[0] - 1.0).abs() < 1e-12);
        assert!(e.values[1].abs() < 1e-12 && e.values[2].abs() < 1e-12);
        // collinear up to phase
        assert!((e.vectors[0].dot(&u).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_reconstructs_and_is_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=8 {
            let a = random_hermitian(&mut rng, n);
            let e = a.eig();
            for w in e.values.windows(2) {
                assert!(w[0] >= w[1]);
            }
            let back = HermitianMatrix::from_eigen(&e, |l| l);
            let lmax = e.values.iter().fold(0.0f64, |m, l| m.max(l.abs()));
            let err = (back.as_matrix() - a.as_matrix())
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!(err <= 1e-10 * (1.0 + lmax));
            for i in 0..n {
                for j in 0..n {
                    let d = e.vectors[i].dot(&e.vectors[j]);
                    let target = if i == j { 1.0 } else { 0.0 };
                    assert!((d - c(target, 0.0)).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn psd_sqrt_examples() {
        let s = HermitianMatrix::identity(2).scale(4.0).psd_sqrt().unwrap();
        assert!((s.as_matrix() - HermitianMatrix::identity(2).scale(2.0).as_matrix()).norm() < 1e-12);
        let z = HermitianMatrix::zeros(3).psd_sqrt().unwrap();
        assert_eq!(z.max_abs(), 0.0);

        // diag(1, 0.25) rotated by a unitary
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = DMatrix::from_fn(2, 2, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let q = g.qr().q();
        let d = HermitianMatrix::from_real_diagonal(&[1.0, 0.25]);
        let a = d.congruence(&q.adjoint()).unwrap();
        let s = a.psd_sqrt().unwrap();
        let ss = s.as_matrix() * s.as_matrix();
        assert!((ss - a.as_matrix()).norm() < 1e-9);
    }

    #[test]
    fn psd_sqrt_rejects_indefinite() {
        let a = HermitianMatrix::from_real_diagonal(&[1.0, -1e-3]);
        assert!(matches!(a.psd_sqrt(), Err(Error::NotPsd { .. })));
        // within tolerance is clamped
        let a = HermitianMatrix::from_real_diagonal(&[1.0, -1e-11]);
        assert!(a.psd_sqrt().is_ok());
    }

    #[test]
    fn numerical_rank_examples() {
        let u = ComplexVector::new(vec![c(0.0, 1.0), c(1.0, 0.0)]).unwrap();
        let r = HermitianMatrix::outer(&u).numerical_rank(1e-6);
        assert_eq!(r.rank, 1);
        assert!(r.ratio < 1e-15);

        let r = HermitianMatrix::identity(3).numerical_rank(1e-6);
        assert_eq!(r, RankInfo { rank: 3, ratio: 1.0 });

        let r = HermitianMatrix::from_real_diagonal(&[1.0, 1e-8, 0.0]).numerical_rank(1e-6);
        assert_eq!(r.rank, 1);
        assert!((r.ratio - 1e-8).abs() < 1e-20);

        let r = HermitianMatrix::zeros(2).numerical_rank(1e-6);
        assert_eq!(r, RankInfo { rank: 0, ratio: 0.0 });
    }

    #[test]
    fn construction_rejects_non_hermitian() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(1., 0.), c(0., 0.), c(1., 0.)]);
        assert!(matches!(HermitianMatrix::new(m), Err(Error::NotHermitian { .. })));
        let m = DMatrix::from_row_slice(2, 3, &[c(1., 0.); 6]);
        assert!(HermitianMatrix::new(m).is_err());
    }

    #[test]
    fn psd_tests_agree_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..1000 {
            let n = 1 + trial % 6;
            let a = random_hermitian(&mut rng, n);
            // shift so that roughly half are PSD
            let shift = rng.random_range(-0.5..2.0);
            let a = a.add_scaled(shift, &HermitianMatrix::identity(n)).unwrap();
            let lmin = a.min_eigenvalue();
            if lmin.abs() < 1e-9 {
                continue;
            }
            let by_eig = lmin >= 0.0;
            let by_chol = cholesky_psd(&a.real_embedding(), 0.0);
            assert_eq!(by_eig, by_chol, "trial {trial}: λmin = {lmin}");
        }
    }

    #[test]
    fn psd_sqrt_squares_back_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..1000 {
            let n = 1 + trial % 12;
            let a = random_psd(&mut rng, n);
            let s = a.psd_sqrt().unwrap();
            assert!(s.min_eigenvalue() >= -1e-12);
            let err = (s.as_matrix() * s.as_matrix() - a.as_matrix())
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!(err <= 1e-9 * (1.0 + a.trace()), "n = {n}: err {err:e}");
        }
    }

    #[test]
    fn json_shape() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., -2.), c(0., 2.), c(3., 0.)]);
        let a = HermitianMatrix::new(m).unwrap();
        let js = serde_json::to_value(&a).unwrap();
        assert_eq!(
            js,
            serde_json::json!({"dim": 2, "re": [[1.0, 0.0], [0.0, 3.0]], "im": [[0.0, -2.0], [2.0, 0.0]]})
        );
    }

    proptest! {
        #[test]
        fn json_round_trip(entries in proptest::collection::vec(-10.0f64..10.0, 18)) {
            let n = 3;
            let m = DMatrix::from_fn(n, n, |i, j| c(entries[i * n + j], entries[9 + i * n + j]));
            let a = HermitianMatrix::symmetrized(m);
            let back: HermitianMatrix = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
