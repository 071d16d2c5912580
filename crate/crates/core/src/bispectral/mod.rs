//! Exact verification of bispectral triples `(L, psi, B)`:
//! `L psi = psi F(z)` and `psi B = theta(x) psi`.
//!
//! `psi` is always of the form `e^{xz} R(x, z)` with `R` a matrix of
//! rational functions; the exponential is implicit in [`ExpKernelMatrix`].

mod fixtures;
mod ratfun;

use std::fmt;

use thiserror::Error;

use crate::exactla::QMatrix;
use crate::freealg::Scalar;
use crate::par;

pub use fixtures::{builtin_triple, nilpotent_triple, Triple, TripleFile, BUILTIN_TRIPLES};
pub use ratfun::{BiPoly, RatFunError, RationalFunction2};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BispectralError {
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("entry ({row}, {col}): {source}")]
    Entry {
        row: usize,
        col: usize,
        source: RatFunError,
    },
    #[error("a {side} operator coefficient depends on `{var}`")]
    WrongVariable { side: &'static str, var: char },
    #[error("matrix is not square: {0}")]
    Shape(String),
    #[error("unknown built-in triple `{0}`")]
    UnknownTriple(String),
    #[error("triple JSON: {0}")]
    Json(String),
}

/// Square matrix of bivariate rational functions, row-major.
#[derive(Clone, PartialEq)]
pub struct RatMatrix {
    n: usize,
    entries: Vec<RationalFunction2>,
}

impl RatMatrix {
    pub fn zeros(n: usize) -> RatMatrix {
        RatMatrix {
            n,
            entries: vec![RationalFunction2::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> RatMatrix {
        let mut m = RatMatrix::zeros(n);
        for i in 0..n {
            m.entries[i * n + i] = RationalFunction2::one();
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> RationalFunction2) -> RatMatrix {
        RatMatrix {
            n,
            entries: (0..n * n).map(|k| f(k / n, k % n)).collect(),
        }
    }

    pub fn from_constant(m: &QMatrix) -> RatMatrix {
        RatMatrix::from_fn(m.rows(), |i, j| RationalFunction2::constant(m.get(i, j).clone()))
    }

    /// Parses a square matrix of rational-function strings.
    pub fn parse(rows: &[Vec<String>]) -> Result<RatMatrix, BispectralError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(BispectralError::Shape(format!("{rows:?}")));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            for (j, s) in row.iter().enumerate() {
                entries.push(RationalFunction2::parse(s).map_err(|source| BispectralError::Entry {
                    row: i + 1,
                    col: j + 1,
                    source,
                })?);
            }
        }
        Ok(RatMatrix { n, entries })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// 0-based entry.
    pub fn get(&self, i: usize, j: usize) -> &RationalFunction2 {
        &self.entries[i * self.n + j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(RationalFunction2::is_zero)
    }

    pub fn uses_x(&self) -> bool {
        self.entries.iter().any(RationalFunction2::uses_x)
    }

    pub fn uses_z(&self) -> bool {
        self.entries.iter().any(RationalFunction2::uses_z)
    }

    fn check(&self, other: &RatMatrix) -> Result<(), BispectralError> {
        if self.n != other.n {
            return Err(BispectralError::SizeMismatch(self.n, other.n));
        }
        Ok(())
    }

    pub fn add(&self, other: &RatMatrix) -> Result<RatMatrix, BispectralError> {
        self.check(other)?;
        Ok(RatMatrix {
            n: self.n,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn sub(&self, other: &RatMatrix) -> Result<RatMatrix, BispectralError> {
        self.check(other)?;
        Ok(RatMatrix {
            n: self.n,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a.sub(b)).collect(),
        })
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix, BispectralError> {
        self.check(other)?;
        let n = self.n;
        let entries = par::map_range(n * n, |k| {
            let (i, j) = (k / n, k % n);
            (0..n).fold(RationalFunction2::zero(), |acc, l| {
                let a = self.get(i, l);
                let b = other.get(l, j);
                if a.is_zero() || b.is_zero() {
                    acc
                } else {
                    acc.add(&a.mul(b))
                }
            })
        });
        Ok(RatMatrix { n, entries })
    }

    pub fn scale(&self, s: &RationalFunction2) -> RatMatrix {
        RatMatrix {
            n: self.n,
            entries: self.entries.iter().map(|a| a.mul(s)).collect(),
        }
    }

    fn map(&self, f: impl Fn(&RationalFunction2) -> RationalFunction2 + Sync + Send) -> RatMatrix {
        RatMatrix {
            n: self.n,
            entries: par::map(&self.entries, f),
        }
    }

    /// Nonzero entries as `(row, col, value)`, 1-based.
    pub fn nonzero_entries(&self) -> Vec<(usize, usize, RationalFunction2)> {
        (0..self.n * self.n)
            .filter(|&k| !self.entries[k].is_zero())
            .map(|k| (k / self.n + 1, k % self.n + 1, self.entries[k].clone()))
            .collect()
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            write!(f, "{}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// `e^{xz} R(x, z)`.
#[derive(Clone, PartialEq)]
pub struct ExpKernelMatrix {
    r: RatMatrix,
}

impl ExpKernelMatrix {
    pub fn new(r: RatMatrix) -> ExpKernelMatrix {
        ExpKernelMatrix { r }
    }

    pub fn rational_part(&self) -> &RatMatrix {
        &self.r
    }

    pub fn size(&self) -> usize {
        self.r.n
    }

    /// `d/dx (e^{xz} R) = e^{xz} (z R + dR/dx)`.
    pub fn dx(&self) -> ExpKernelMatrix {
        ExpKernelMatrix {
            r: self.r.map(|a| a.times_z().add(&a.dx())),
        }
    }

    /// `d/dz (e^{xz} R) = e^{xz} (x R + dR/dz)`.
    pub fn dz(&self) -> ExpKernelMatrix {
        ExpKernelMatrix {
            r: self.r.map(|a| a.times_x().add(&a.dz())),
        }
    }

    /// `c(x) * self`.
    pub fn left_mul(&self, c: &RatMatrix) -> Result<ExpKernelMatrix, BispectralError> {
        Ok(ExpKernelMatrix { r: c.mul(&self.r)? })
    }

    /// `self * c(z)`.
    pub fn right_mul(&self, c: &RatMatrix) -> Result<ExpKernelMatrix, BispectralError> {
        Ok(ExpKernelMatrix { r: self.r.mul(c)? })
    }

    pub fn add(&self, other: &ExpKernelMatrix) -> Result<ExpKernelMatrix, BispectralError> {
        Ok(ExpKernelMatrix {
            r: self.r.add(&other.r)?,
        })
    }

    pub fn sub(&self, other: &ExpKernelMatrix) -> Result<ExpKernelMatrix, BispectralError> {
        Ok(ExpKernelMatrix {
            r: self.r.sub(&other.r)?,
        })
    }
}

impl fmt::Debug for ExpKernelMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e^(xz)*{:?}", self.r)
    }
}

/// Entrywise equality of the rational parts; the exponential cancels.
pub fn ekm_equal(a: &ExpKernelMatrix, b: &ExpKernelMatrix) -> bool {
    a == b
}

/// `sum_i a_i(x) d^i/dx^i`, coefficients acting on the left.
#[derive(Debug, Clone)]
pub struct LeftDiffOp {
    n: usize,
    terms: Vec<(usize, RatMatrix)>,
}

/// `sum_j d^j/dz^j . b_j(z)`, coefficients acting on the right.
#[derive(Debug, Clone)]
pub struct RightDiffOp {
    n: usize,
    terms: Vec<(usize, RatMatrix)>,
}

fn check_terms(
    terms: &[(usize, RatMatrix)],
    side: &'static str,
    forbidden: char,
) -> Result<usize, BispectralError> {
    let n = terms.first().map_or(0, |(_, m)| m.size());
    for (_, m) in terms {
        if m.size() != n {
            return Err(BispectralError::SizeMismatch(n, m.size()));
        }
        let bad = if forbidden == 'z' { m.uses_z() } else { m.uses_x() };
        if bad {
            return Err(BispectralError::WrongVariable { side, var: forbidden });
        }
    }
    Ok(n)
}

fn nth<F: Fn(&ExpKernelMatrix) -> ExpKernelMatrix>(m: &ExpKernelMatrix, order: usize, d: F) -> ExpKernelMatrix {
    (0..order).fold(m.clone(), |acc, _| d(&acc))
}

impl LeftDiffOp {
    /// Coefficients must not depend on `z`.
    pub fn new(terms: Vec<(usize, RatMatrix)>) -> Result<LeftDiffOp, BispectralError> {
        let n = check_terms(&terms, "left", 'z')?;
        Ok(LeftDiffOp { n, terms })
    }

    pub fn identity(n: usize) -> LeftDiffOp {
        LeftDiffOp {
            n,
            terms: vec![(0, RatMatrix::identity(n))],
        }
    }

    pub fn apply(&self, m: &ExpKernelMatrix) -> Result<ExpKernelMatrix, BispectralError> {
        if self.n != m.size() {
            return Err(BispectralError::SizeMismatch(self.n, m.size()));
        }
        let mut acc = ExpKernelMatrix::new(RatMatrix::zeros(self.n));
        for (order, a) in &self.terms {
            acc = acc.add(&nth(m, *order, ExpKernelMatrix::dx).left_mul(a)?)?;
        }
        Ok(acc)
    }
}

impl RightDiffOp {
    /// Coefficients must not depend on `x`.
    pub fn new(terms: Vec<(usize, RatMatrix)>) -> Result<RightDiffOp, BispectralError> {
        let n = check_terms(&terms, "right", 'x')?;
        Ok(RightDiffOp { n, terms })
    }

    pub fn identity(n: usize) -> RightDiffOp {
        RightDiffOp {
            n,
            terms: vec![(0, RatMatrix::identity(n))],
        }
    }

    pub fn apply(&self, m: &ExpKernelMatrix) -> Result<ExpKernelMatrix, BispectralError> {
        if self.n != m.size() {
            return Err(BispectralError::SizeMismatch(self.n, m.size()));
        }
        let mut acc = ExpKernelMatrix::new(RatMatrix::zeros(self.n));
        for (order, b) in &self.terms {
            acc = acc.add(&nth(m, *order, ExpKernelMatrix::dz).right_mul(b)?)?;
        }
        Ok(acc)
    }

    /// The operator acting as `self` followed by `other`, i.e.
    /// `psi . then = (psi . self) . other`. By Leibniz,
    /// `d^j(d^i psi . b_i) . c_j = sum_k C(j,k) d^{i+k} psi . (d^{j-k} b_i) c_j`.
    pub fn then(&self, other: &RightDiffOp) -> Result<RightDiffOp, BispectralError> {
        if self.n != other.n {
            return Err(BispectralError::SizeMismatch(self.n, other.n));
        }
        let mut acc: std::collections::BTreeMap<usize, RatMatrix> = std::collections::BTreeMap::new();
        for (i, b) in &self.terms {
            let mut db = b.clone();
            let mut derivs = vec![b.clone()];
            let max_j = other.terms.iter().map(|(j, _)| *j).max().unwrap_or(0);
            for _ in 0..max_j {
                db = db.map(RationalFunction2::dz);
                derivs.push(db.clone());
            }
            for (j, c) in &other.terms {
                let mut binom = Scalar::from_integer(1.into());
                for k in 0..=*j {
                    let coeff = derivs[j - k].mul(c)?.scale(&RationalFunction2::constant(binom.clone()));
                    let slot = acc.entry(i + k).or_insert_with(|| RatMatrix::zeros(self.n));
                    *slot = slot.add(&coeff)?;
                    binom = binom * Scalar::from_integer((j - k).into()) / Scalar::from_integer((k + 1).into());
                }
            }
        }
        Ok(RightDiffOp {
            n: self.n,
            terms: acc.into_iter().filter(|(_, m)| !m.is_zero()).collect(),
        })
    }
}

pub fn apply_left(l: &LeftDiffOp, m: &ExpKernelMatrix) -> Result<ExpKernelMatrix, BispectralError> {
    l.apply(m)
}

pub fn apply_right(m: &ExpKernelMatrix, b: &RightDiffOp) -> Result<ExpKernelMatrix, BispectralError> {
    b.apply(m)
}

/// Outcome of one eigen-equation check.
#[derive(Debug, Clone)]
pub struct EquationCheck {
    pub equation: &'static str,
    pub pass: bool,
    /// Nonzero entries of `lhs - rhs` (1-based positions, rational part).
    pub residuals: Vec<(usize, usize, RationalFunction2)>,
}

impl EquationCheck {
    fn compare(
        equation: &'static str,
        lhs: &ExpKernelMatrix,
        rhs: &ExpKernelMatrix,
    ) -> Result<EquationCheck, BispectralError> {
        let residuals = lhs.sub(rhs)?.r.nonzero_entries();
        Ok(EquationCheck {
            equation,
            pass: residuals.is_empty(),
            residuals,
        })
    }
}

#[derive(Debug, Clone)]
pub struct TripleReport {
    pub eigen: EquationCheck,
    pub dual: Option<EquationCheck>,
}

impl TripleReport {
    pub fn pass(&self) -> bool {
        self.eigen.pass && self.dual.as_ref().is_none_or(|d| d.pass)
    }
}

/// Checks `L psi = psi F` and, when both are given, `psi B = theta psi`.
pub fn verify_triple(
    l: &LeftDiffOp,
    psi: &ExpKernelMatrix,
    f: &RatMatrix,
    b: Option<&RightDiffOp>,
    theta: Option<&RatMatrix>,
) -> Result<TripleReport, BispectralError> {
    let eigen = EquationCheck::compare("L psi = psi F", &l.apply(psi)?, &psi.right_mul(f)?)?;
    let dual = match (b, theta) {
        (Some(b), Some(theta)) => Some(EquationCheck::compare(
            "psi B = theta psi",
            &b.apply(psi)?,
            &psi.left_mul(theta)?,
        )?),
        _ => None,
    };
    Ok(TripleReport { eigen, dual })
}

/// Scalar helper for building coefficient matrices.
pub(crate) fn rf_const(c: i64) -> RationalFunction2 {
    RationalFunction2::constant(Scalar::from_integer(c.into()))
}
