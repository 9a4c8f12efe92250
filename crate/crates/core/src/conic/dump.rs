//! Plain-text debug dump of a [`ConicProgram`] and its parser.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so
//! `parse_dump(&p.dump()) == p` exactly.
//!
//! ```text
//! conic-program v1
//! matrix 0 W 2
//! scalar 0 t lower 1.000000001
//! objective
//!   const 0.0
//!   trace 0 2 1.0 0.0 0.0 0.0 0.0 0.0 1.0 0.0
//! ineq power-budget
//!   ...
//! lmi 3 eh-1
//!   const 3 ...
//!   scalar 2 3 ...
//!   congruence 0 1.0 2 3 ...
//! end
//! ```
//! A Hermitian block is written as its order followed by the row-major
//! `re im` pairs of all entries.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use super::{
    AffineMatrix, AffineScalar, ConicProgram, CongruenceTerm, Labeled, MatVar, ScalarVar,
    SocConstraint,
};
use crate::error::{Error, Result};
use crate::hermitian::{HermitianMatrix, C64};

const HEADER: &str = "conic-program v1";

fn write_complex_entries(out: &mut String, m: &DMatrix<C64>) {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            let _ = write!(out, " {:?} {:?}", z.re, z.im);
        }
    }
}

fn write_herm(out: &mut String, h: &HermitianMatrix) {
    let _ = write!(out, " {}", h.dim());
    write_complex_entries(out, h.as_matrix());
}

fn write_scalar_terms(out: &mut String, e: &AffineScalar, indent: &str) {
    let _ = writeln!(out, "{indent}const {:?}", e.constant);
    for (v, a) in &e.scalar_terms {
        let _ = writeln!(out, "{indent}var {} {:?}", v.0, a);
    }
    for (v, c) in &e.matrix_terms {
        let _ = write!(out, "{indent}trace {}", v.0);
        write_herm(out, c);
        out.push('\n');
    }
}

impl ConicProgram {
    /// Human-readable listing of variables and constraints at full precision.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        out.push_str(HEADER);
        out.push('\n');
        for (i, v) in self.matrix_vars.iter().enumerate() {
            let _ = writeln!(out, "matrix {i} {} {}", v.name, v.dim);
        }
        for (i, v) in self.scalar_vars.iter().enumerate() {
            match v.lower {
                Some(lb) => {
                    let _ = writeln!(out, "scalar {i} {} lower {:?}", v.name, lb);
                }
                None => {
                    let _ = writeln!(out, "scalar {i} {} free", v.name);
                }
            }
        }
        out.push_str("objective\n");
        write_scalar_terms(&mut out, &self.objective, "  ");
        for c in &self.eq_constraints {
            let _ = writeln!(out, "eq {}", c.label);
            write_scalar_terms(&mut out, &c.expr, "  ");
        }
        for c in &self.ineq_constraints {
            let _ = writeln!(out, "ineq {}", c.label);
            write_scalar_terms(&mut out, &c.expr, "  ");
        }
        for c in &self.soc_constraints {
            let _ = writeln!(out, "soc {}", c.label);
            out.push_str("  bound\n");
            write_scalar_terms(&mut out, &c.expr.bound, "    ");
            for e in &c.expr.entries {
                out.push_str("  entry\n");
                write_scalar_terms(&mut out, e, "    ");
            }
        }
        for c in &self.lmi_constraints {
            let m = &c.expr;
            let _ = writeln!(out, "lmi {} {}", m.dim, c.label);
            out.push_str("  const");
            write_herm(&mut out, &m.constant);
            out.push('\n');
            for (v, h) in &m.scalar_terms {
                let _ = write!(out, "  scalar {}", v.0);
                write_herm(&mut out, h);
                out.push('\n');
            }
            for t in &m.congruence_terms {
                let _ = write!(
                    out,
                    "  congruence {} {:?} {} {}",
                    t.var.0,
                    t.coef,
                    t.basis.nrows(),
                    t.basis.ncols()
                );
                write_complex_entries(&mut out, &t.basis);
                out.push('\n');
            }
        }
        out.push_str("end\n");
        out
    }
}

enum Target {
    None,
    Objective,
    Eq,
    Ineq,
    SocBound,
    SocEntry,
    Lmi,
}

struct Tokens<'a> {
    it: std::str::SplitWhitespace<'a>,
    line: usize,
}

impl<'a> Tokens<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Dump {
            line: self.line,
            msg: msg.into(),
        }
    }

    fn next(&mut self) -> Result<&'a str> {
        let line = self.line;
        self.it.next().ok_or(Error::Dump {
            line,
            msg: "unexpected end of line".into(),
        })
    }

    fn f64(&mut self) -> Result<f64> {
        let t = self.next()?;
        t.parse().map_err(|_| self.err(format!("bad number {t:?}")))
    }

    fn usize(&mut self) -> Result<usize> {
        let t = self.next()?;
        t.parse().map_err(|_| self.err(format!("bad integer {t:?}")))
    }

    fn complex_matrix(&mut self, rows: usize, cols: usize) -> Result<DMatrix<C64>> {
        let mut m = DMatrix::<C64>::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let re = self.f64()?;
                let im = self.f64()?;
                m[(i, j)] = C64::new(re, im);
            }
        }
        Ok(m)
    }

    fn herm(&mut self) -> Result<HermitianMatrix> {
        let n = self.usize()?;
        let m = self.complex_matrix(n, n)?;
        HermitianMatrix::new(m).map_err(|e| self.err(e.to_string()))
    }

    fn finish(&mut self) -> Result<()> {
        match self.it.next() {
            None => Ok(()),
            Some(t) => Err(self.err(format!("trailing token {t:?}"))),
        }
    }
}

fn parse_scalar_term(tok: &mut Tokens, kw: &str, e: &mut AffineScalar) -> Result<()> {
    match kw {
        "const" => e.constant = tok.f64()?,
        "var" => {
            let v = tok.usize()?;
            let a = tok.f64()?;
            e.scalar_terms.push((ScalarVar(v), a));
        }
        "trace" => {
            let v = tok.usize()?;
            let h = tok.herm()?;
            e.matrix_terms.push((MatVar(v), h));
        }
        _ => return Err(tok.err(format!("unexpected keyword {kw:?}"))),
    }
    Ok(())
}

fn rest_of_line<'a>(line: &'a str, kw: &str) -> &'a str {
    line.trim_start()[kw.len()..].trim()
}

/// Parse the output of [`ConicProgram::dump`].
pub fn parse_dump(text: &str) -> Result<ConicProgram> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, l)) if l.trim() == HEADER => {}
        _ => {
            return Err(Error::Dump {
                line: 1,
                msg: format!("expected header {HEADER:?}"),
            })
        }
    }
    let mut p = ConicProgram::new();
    let mut target = Target::None;
    let mut ended = false;
    for (idx, line) in lines {
        let mut tok = Tokens {
            it: line.split_whitespace(),
            line: idx + 1,
        };
        let Some(kw) = tok.it.next() else { continue };
        if ended {
            return Err(tok.err("content after end"));
        }
        let indented = line.starts_with(' ');
        if !indented {
            match kw {
                "matrix" => {
                    let i = tok.usize()?;
                    let name = tok.next()?.to_string();
                    let dim = tok.usize()?;
                    tok.finish()?;
                    if i != p.matrix_vars.len() {
                        return Err(tok.err("matrix variables out of order"));
                    }
                    p.add_matrix_var(&name, dim);
                }
                "scalar" => {
                    let i = tok.usize()?;
                    let name = tok.next()?.to_string();
                    let lower = match tok.next()? {
                        "free" => None,
                        "lower" => Some(tok.f64()?),
                        t => return Err(tok.err(format!("bad bound {t:?}"))),
                    };
                    tok.finish()?;
                    if i != p.scalar_vars.len() {
                        return Err(tok.err("scalar variables out of order"));
                    }
                    p.add_scalar_var(&name, lower);
                }
                "objective" => target = Target::Objective,
                "eq" => {
                    p.add_eq(rest_of_line(line, kw), AffineScalar::default());
                    target = Target::Eq;
                }
                "ineq" => {
                    p.add_ineq(rest_of_line(line, kw), AffineScalar::default());
                    target = Target::Ineq;
                }
                "soc" => {
                    p.add_soc(rest_of_line(line, kw), Vec::new(), AffineScalar::default());
                    target = Target::None;
                }
                "lmi" => {
                    let dim = tok.usize()?;
                    let label = rest_of_line(rest_of_line(line, kw), &dim.to_string());
                    p.add_lmi(label, AffineMatrix::zeros(dim));
                    target = Target::Lmi;
                }
                "end" => ended = true,
                _ => return Err(tok.err(format!("unknown section {kw:?}"))),
            }
            continue;
        }
        match (&target, kw) {
            (_, "bound") if !p.soc_constraints.is_empty() => target = Target::SocBound,
            (_, "entry") if !p.soc_constraints.is_empty() => {
                p.soc_constraints.last_mut().unwrap().expr.entries.push(AffineScalar::default());
                target = Target::SocEntry;
            }
            (Target::Objective, _) => parse_scalar_term(&mut tok, kw, &mut p.objective)?,
            (Target::Eq, _) => parse_scalar_term(&mut tok, kw, &mut p.eq_constraints.last_mut().unwrap().expr)?,
            (Target::Ineq, _) => parse_scalar_term(&mut tok, kw, &mut p.ineq_constraints.last_mut().unwrap().expr)?,
            (Target::SocBound, _) => {
                let c: &mut Labeled<SocConstraint> = p.soc_constraints.last_mut().unwrap();
                parse_scalar_term(&mut tok, kw, &mut c.expr.bound)?
            }
            (Target::SocEntry, _) => {
                let c = p.soc_constraints.last_mut().unwrap();
                parse_scalar_term(&mut tok, kw, c.expr.entries.last_mut().unwrap())?
            }
            (Target::Lmi, _) => {
                let m = &mut p.lmi_constraints.last_mut().unwrap().expr;
                match kw {
                    "const" => m.constant = tok.herm()?,
                    "scalar" => {
                        let v = tok.usize()?;
                        let h = tok.herm()?;
                        m.scalar_terms.push((ScalarVar(v), h));
                    }
                    "congruence" => {
                        let var = MatVar(tok.usize()?);
                        let coef = tok.f64()?;
                        let r = tok.usize()?;
                        let c = tok.usize()?;
                        let basis = tok.complex_matrix(r, c)?;
                        m.congruence_terms.push(CongruenceTerm { var, coef, basis });
                    }
                    _ => return Err(tok.err(format!("unexpected keyword {kw:?}"))),
                }
            }
            (Target::None, _) => return Err(tok.err("term outside any section")),
        }
        tok.finish()?;
    }
    if !ended {
        return Err(Error::Dump {
            line: text.lines().count(),
            msg: "missing end".into(),
        });
    }
    Ok(p)
}
