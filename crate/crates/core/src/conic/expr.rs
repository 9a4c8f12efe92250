use nalgebra::DMatrix;

use super::{MatVar, ScalarVar};
use crate::error::Result;
use crate::hermitian::{ComplexVector, HermitianMatrix, C64};

/// `constant + Σ a_j x_j + Σ Tr(C_k X_k)` with every `C_k` Hermitian, so the
/// value is real.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AffineScalar {
    pub constant: f64,
    pub scalar_terms: Vec<(ScalarVar, f64)>,
    pub matrix_terms: Vec<(MatVar, HermitianMatrix)>,
}

impl AffineScalar {
    pub fn constant(c: f64) -> Self {
        Self {
            constant: c,
            ..Self::default()
        }
    }

    pub fn var(v: ScalarVar) -> Self {
        Self::default().plus_var(v, 1.0)
    }

    /// `Tr(C X)`.
    pub fn trace(v: MatVar, c: HermitianMatrix) -> Self {
        Self::default().plus_trace(v, c)
    }

    pub fn plus_const(mut self, c: f64) -> Self {
        self.constant += c;
        self
    }

    pub fn plus_var(mut self, v: ScalarVar, a: f64) -> Self {
        self.scalar_terms.push((v, a));
        self
    }

    pub fn plus_trace(mut self, v: MatVar, c: HermitianMatrix) -> Self {
        self.matrix_terms.push((v, c));
        self
    }

    pub fn plus(mut self, other: AffineScalar) -> Self {
        self.constant += other.constant;
        self.scalar_terms.extend(other.scalar_terms);
        self.matrix_terms.extend(other.matrix_terms);
        self
    }

    pub fn scaled(mut self, s: f64) -> Self {
        self.constant *= s;
        for t in &mut self.scalar_terms {
            t.1 *= s;
        }
        for t in &mut self.matrix_terms {
            t.1 = t.1.scale(s);
        }
        self
    }
}

/// Complex affine form `re + i·im`, used for entries such as `l† X r`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ComplexAffine {
    pub re: AffineScalar,
    pub im: AffineScalar,
}

impl ComplexAffine {
    /// `coef · l† X r`.
    pub fn bilinear(v: MatVar, coef: f64, l: &ComplexVector, r: &ComplexVector) -> Self {
        // l† X r = Tr(X r l†); split r l† into Hermitian and anti-Hermitian parts.
        let c: DMatrix<C64> = r.as_dvector() * l.as_dvector().adjoint();
        let ct = c.adjoint();
        let re = HermitianMatrix::symmetrized((&c + &ct).scale(0.5 * coef));
        let im = HermitianMatrix::symmetrized((&c - &ct) * C64::new(0.0, -0.5 * coef));
        Self {
            re: AffineScalar::trace(v, re),
            im: AffineScalar::trace(v, im),
        }
    }

    pub fn plus_const(mut self, z: C64) -> Self {
        self.re.constant += z.re;
        self.im.constant += z.im;
        self
    }

    pub fn scaled(self, s: f64) -> Self {
        Self {
            re: self.re.scaled(s),
            im: self.im.scaled(s),
        }
    }

    pub fn plus(self, other: ComplexAffine) -> Self {
        Self {
            re: self.re.plus(other.re),
            im: self.im.plus(other.im),
        }
    }
}

/// `coef · B† X B` for an `n × m` basis `B`.
#[derive(Clone, Debug, PartialEq)]
pub struct CongruenceTerm {
    pub var: MatVar,
    pub coef: f64,
    pub basis: DMatrix<C64>,
}

/// Hermitian-valued affine expression
/// `C_0 + Σ x_j H_j + Σ coef · B† X B`, Hermitian for every variable value.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMatrix {
    pub dim: usize,
    pub constant: HermitianMatrix,
    pub scalar_terms: Vec<(ScalarVar, HermitianMatrix)>,
    pub congruence_terms: Vec<CongruenceTerm>,
}

impl AffineMatrix {
    pub fn constant(c: HermitianMatrix) -> Self {
        Self {
            dim: c.dim(),
            constant: c,
            scalar_terms: Vec::new(),
            congruence_terms: Vec::new(),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::constant(HermitianMatrix::zeros(dim))
    }

    pub fn plus_scalar(mut self, v: ScalarVar, h: HermitianMatrix) -> Self {
        self.scalar_terms.push((v, h));
        self
    }

    pub fn plus_congruence(mut self, var: MatVar, coef: f64, basis: DMatrix<C64>) -> Self {
        self.congruence_terms.push(CongruenceTerm { var, coef, basis });
        self
    }

    pub fn scaled(mut self, s: f64) -> Self {
        self.constant = self.constant.scale(s);
        for t in &mut self.scalar_terms {
            t.1 = t.1.scale(s);
        }
        for t in &mut self.congruence_terms {
            t.coef *= s;
        }
        self
    }

    /// Entry `(i, j)` as a complex affine form.
    pub fn entry(&self, i: usize, j: usize) -> ComplexAffine {
        let c0 = self.constant.get(i, j);
        let mut out = ComplexAffine::default().plus_const(c0);
        for (v, h) in &self.scalar_terms {
            let z = h.get(i, j);
            out.re.scalar_terms.push((*v, z.re));
            out.im.scalar_terms.push((*v, z.im));
        }
        for t in &self.congruence_terms {
            let l = ComplexVector::from_dvector(t.basis.column(i).into_owned()).expect("non-empty basis");
            let r = ComplexVector::from_dvector(t.basis.column(j).into_owned()).expect("non-empty basis");
            out = out.plus(ComplexAffine::bilinear(t.var, t.coef, &l, &r));
        }
        out
    }

    /// Trace as a real affine form.
    pub fn trace(&self) -> AffineScalar {
        let mut out = AffineScalar::constant(self.constant.trace());
        for (v, h) in &self.scalar_terms {
            out.scalar_terms.push((*v, h.trace()));
        }
        for t in &self.congruence_terms {
            // Tr(B† X B) = Tr(X B B†)
            let bb = HermitianMatrix::symmetrized(&t.basis * t.basis.adjoint());
            out.matrix_terms.push((t.var, bb.scale(t.coef)));
        }
        out
    }

    /// Coefficient matrices of the scalar terms and congruence bases, all of
    /// which must be Hermitian for the expression to be Hermitian-valued.
    pub fn coefficient_matrices(&self) -> Vec<DMatrix<C64>> {
        let mut out = vec![self.constant.as_matrix().clone()];
        out.extend(self.scalar_terms.iter().map(|(_, h)| h.as_matrix().clone()));
        for t in &self.congruence_terms {
            let n = t.basis.nrows();
            // B† E B for each real basis direction E of the variable.
            for i in 0..n {
                for j in i..n {
                    let mut e = DMatrix::<C64>::zeros(n, n);
                    e[(i, j)] += C64::new(1.0, 0.0);
                    e[(j, i)] += C64::new(1.0, 0.0);
                    out.push(t.basis.adjoint() * &e * &t.basis * C64::new(t.coef, 0.0));
                    if i != j {
                        let mut e = DMatrix::<C64>::zeros(n, n);
                        e[(i, j)] = C64::new(0.0, 1.0);
                        e[(j, i)] = C64::new(0.0, -1.0);
                        out.push(t.basis.adjoint() * &e * &t.basis * C64::new(t.coef, 0.0));
                    }
                }
            }
        }
        out
    }

    /// Evaluate at concrete variable values.
    pub fn evaluate(&self, mats: &[HermitianMatrix], scalars: &[f64]) -> Result<HermitianMatrix> {
        let mut acc = self.constant.as_matrix().clone();
        for (v, h) in &self.scalar_terms {
            acc += h.as_matrix() * C64::new(scalars[v.0], 0.0);
        }
        for t in &self.congruence_terms {
            acc += t.basis.adjoint() * mats[t.var.0].as_matrix() * &t.basis * C64::new(t.coef, 0.0);
        }
        Ok(HermitianMatrix::symmetrized(acc))
    }
}

impl AffineScalar {
    pub fn evaluate(&self, mats: &[HermitianMatrix], scalars: &[f64]) -> Result<f64> {
        let mut v = self.constant;
        for (s, a) in &self.scalar_terms {
            v += a * scalars[s.0];
        }
        for (m, c) in &self.matrix_terms {
            v += c.inner(&mats[m.0])?;
        }
        Ok(v)
    }
}
