//! `M_N(Q[x])`: square matrices whose entries are polynomials in one
//! commuting variable, stored as a sparse map from power to coefficient
//! matrix.
//!
//! Indices in the public constructors ([`MatrixPolynomial::e`],
//! [`MatrixPolynomial::entry`]) are 1-based, matching the usual `e_{rs}`
//! notation; everything internal is 0-based.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactla::{QMatrix, RowEchelon};
use crate::freealg::{format_scalar, parse_scalar, Degree, Scalar};
use crate::par;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatPolyError {
    #[error("matrix size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("x-power {power} exceeds the degree bound {bound}")]
    DegreeOverflow { power: usize, bound: usize },
    #[error("index ({row}, {col}) out of range for size {size}")]
    IndexOutOfRange { row: usize, col: usize, size: usize },
    #[error("invalid matrix-polynomial literal: {0}")]
    Literal(String),
}

#[derive(Clone, PartialEq, Eq)]
pub struct MatrixPolynomial {
    n: usize,
    coeffs: BTreeMap<usize, QMatrix>,
}

impl MatrixPolynomial {
    pub fn zero(n: usize) -> MatrixPolynomial {
        assert!(n > 0, "matrix size must be positive");
        MatrixPolynomial {
            n,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> MatrixPolynomial {
        MatrixPolynomial::monomial(QMatrix::identity(n), 0)
    }

    /// The constant matrix `c * x^power`.
    pub fn monomial(c: QMatrix, power: usize) -> MatrixPolynomial {
        assert_eq!(c.rows(), c.cols(), "coefficient must be square");
        let mut p = MatrixPolynomial::zero(c.rows());
        if !c.is_zero() {
            p.coeffs.insert(power, c);
        }
        p
    }

    /// Elementary matrix `e_{rs}` (1-based).
    pub fn e(n: usize, r: usize, s: usize) -> Result<MatrixPolynomial, MatPolyError> {
        if r == 0 || s == 0 || r > n || s > n {
            return Err(MatPolyError::IndexOutOfRange {
                row: r,
                col: s,
                size: n,
            });
        }
        let mut m = QMatrix::zeros(n, n);
        m.set(r - 1, s - 1, Scalar::one());
        Ok(MatrixPolynomial::monomial(m, 0))
    }

    /// Upper shift `S_N = sum_s e_{s,s+1}`.
    pub fn shift(n: usize) -> MatrixPolynomial {
        let mut m = QMatrix::zeros(n, n);
        for s in 0..n.saturating_sub(1) {
            m.set(s, s + 1, Scalar::one());
        }
        MatrixPolynomial::monomial(m, 0)
    }

    /// `x^k * I`.
    pub fn x_pow(n: usize, k: usize) -> MatrixPolynomial {
        MatrixPolynomial::monomial(QMatrix::identity(n), k)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn xdeg(&self) -> Degree {
        match self.coeffs.keys().next_back() {
            Some(&k) => Degree::Finite(k),
            None => Degree::NegInfinity,
        }
    }

    /// Coefficient matrix of `x^k` (zero if absent).
    pub fn coeff(&self, k: usize) -> QMatrix {
        self.coeffs
            .get(&k)
            .cloned()
            .unwrap_or_else(|| QMatrix::zeros(self.n, self.n))
    }

    /// Stored `(power, coefficient)` pairs in increasing power.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &QMatrix)> {
        self.coeffs.iter().map(|(&k, m)| (k, m))
    }

    /// Coefficient of `x^k` at 1-based position `(r, s)`.
    pub fn entry(&self, k: usize, r: usize, s: usize) -> Scalar {
        match self.coeffs.get(&k) {
            Some(m) => m.get(r - 1, s - 1).clone(),
            None => Scalar::zero(),
        }
    }

    fn check(&self, other: &MatrixPolynomial) -> Result<(), MatPolyError> {
        if self.n != other.n {
            return Err(MatPolyError::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    fn insert_nonzero(&mut self, k: usize, m: QMatrix) {
        if m.is_zero() {
            self.coeffs.remove(&k);
        } else {
            self.coeffs.insert(k, m);
        }
    }

    pub fn checked_add(&self, other: &MatrixPolynomial) -> Result<MatrixPolynomial, MatPolyError> {
        self.check(other)?;
        let mut out = self.clone();
        for (&k, m) in &other.coeffs {
            let sum = match out.coeffs.get(&k) {
                Some(a) => a.checked_add(m).expect("same shape"),
                None => m.clone(),
            };
            out.insert_nonzero(k, sum);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &MatrixPolynomial) -> Result<MatrixPolynomial, MatPolyError> {
        self.checked_add(&other.scale(&-Scalar::one()))
    }

    pub fn checked_mul(&self, other: &MatrixPolynomial) -> Result<MatrixPolynomial, MatPolyError> {
        self.check(other)?;
        let mut acc: BTreeMap<usize, QMatrix> = BTreeMap::new();
        for (&i, a) in &self.coeffs {
            for (&j, b) in &other.coeffs {
                let prod = a.checked_mul(b).expect("same shape");
                let slot = acc
                    .entry(i + j)
                    .or_insert_with(|| QMatrix::zeros(self.n, self.n));
                *slot = slot.checked_add(&prod).expect("same shape");
            }
        }
        acc.retain(|_, m| !m.is_zero());
        Ok(MatrixPolynomial {
            n: self.n,
            coeffs: acc,
        })
    }

    pub fn scale(&self, s: &Scalar) -> MatrixPolynomial {
        if s.is_zero() {
            return MatrixPolynomial::zero(self.n);
        }
        MatrixPolynomial {
            n: self.n,
            coeffs: self.coeffs.iter().map(|(&k, m)| (k, m.scale(s))).collect(),
        }
    }

    pub fn pow(&self, e: usize) -> MatrixPolynomial {
        let mut out = MatrixPolynomial::identity(self.n);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Coefficient vector of length `N^2 (D+1)`: power-major, then row-major.
    pub fn flatten(&self, bound: usize) -> Result<Vec<Scalar>, MatPolyError> {
        if let Some(&k) = self.coeffs.keys().next_back() {
            if k > bound {
                return Err(MatPolyError::DegreeOverflow { power: k, bound });
            }
        }
        let nn = self.n * self.n;
        let mut v = vec![Scalar::zero(); nn * (bound + 1)];
        for (&k, m) in &self.coeffs {
            for r in 0..self.n {
                for c in 0..self.n {
                    v[k * nn + r * self.n + c] = m.get(r, c).clone();
                }
            }
        }
        Ok(v)
    }

    /// Inverse of [`flatten`](Self::flatten).
    pub fn unflatten(n: usize, v: &[Scalar]) -> MatrixPolynomial {
        let nn = n * n;
        assert_eq!(v.len() % nn, 0, "length must be a multiple of N^2");
        let mut p = MatrixPolynomial::zero(n);
        for (k, block) in v.chunks(nn).enumerate() {
            let m = QMatrix::from_rows(n, block.chunks(n).map(<[Scalar]>::to_vec).collect())
                .expect("square block");
            p.insert_nonzero(k, m);
        }
        p
    }

    pub fn to_literal(&self) -> MatrixPolynomialLiteral {
        MatrixPolynomialLiteral {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, m)| {
                    let rows = (0..self.n)
                        .map(|r| m.row(r).iter().map(format_scalar).collect())
                        .collect();
                    (k.to_string(), rows)
                })
                .collect(),
        }
    }

    pub fn from_literal(lit: &MatrixPolynomialLiteral) -> Result<MatrixPolynomial, MatPolyError> {
        if lit.n == 0 {
            return Err(MatPolyError::Literal("N must be positive".into()));
        }
        let mut p = MatrixPolynomial::zero(lit.n);
        for (key, rows) in &lit.coeffs {
            let k: usize = key
                .parse()
                .map_err(|_| MatPolyError::Literal(format!("bad power `{key}`")))?;
            if rows.len() != lit.n || rows.iter().any(|r| r.len() != lit.n) {
                return Err(MatPolyError::Literal(format!(
                    "coefficient of x^{k} is not {0}x{0}",
                    lit.n
                )));
            }
            let mut m = QMatrix::zeros(lit.n, lit.n);
            for (r, row) in rows.iter().enumerate() {
                for (c, cell) in row.iter().enumerate() {
                    let v = parse_scalar(cell)
                        .ok_or_else(|| MatPolyError::Literal(format!("bad rational `{cell}`")))?;
                    m.set(r, c, v);
                }
            }
            let m = p.coeff(k).checked_add(&m).expect("same shape");
            p.insert_nonzero(k, m);
        }
        Ok(p)
    }
}

/// Rank of the stacked flattenings of `family`.
pub fn family_rank(family: &[MatrixPolynomial], bound: usize) -> Result<usize, MatPolyError> {
    let Some(first) = family.first() else {
        return Ok(0);
    };
    for p in family {
        first.check(p)?;
    }
    let rows = par::map(family, |p| p.flatten(bound));
    let mut ech = RowEchelon::new(first.n * first.n * (bound + 1));
    for row in rows {
        ech.insert(&row?).expect("uniform width");
    }
    Ok(ech.rank())
}

/// JSON form `{"N": n, "coeffs": {"k": [["p/q", ...], ...]}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixPolynomialLiteral {
    #[serde(rename = "N")]
    pub n: usize,
    pub coeffs: BTreeMap<String, Vec<Vec<String>>>,
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl std::ops::$tr<&MatrixPolynomial> for &MatrixPolynomial {
            type Output = MatrixPolynomial;

            /// Panics on a size mismatch.
            fn $method(self, rhs: &MatrixPolynomial) -> MatrixPolynomial {
                self.$checked(rhs).expect("matrix size mismatch")
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl std::ops::Neg for &MatrixPolynomial {
    type Output = MatrixPolynomial;

    fn neg(self) -> MatrixPolynomial {
        self.scale(&-Scalar::one())
    }
}

impl fmt::Display for MatrixPolynomial {
    /// Sum of `c*e_rs*x^k` terms, lowest power first, e.g. `e12 + e22*x^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (&k, m) in &self.coeffs {
            for r in 0..self.n {
                for c in 0..self.n {
                    let v = m.get(r, c);
                    if v.is_zero() {
                        continue;
                    }
                    let neg = v < &Scalar::zero();
                    let abs = if neg { -v } else { v.clone() };
                    match (first, neg) {
                        (true, true) => write!(f, "-")?,
                        (true, false) => {}
                        (false, true) => write!(f, " - ")?,
                        (false, false) => write!(f, " + ")?,
                    }
                    first = false;
                    if !abs.is_one() {
                        write!(f, "{}*", format_scalar(&abs))?;
                    }
                    write!(f, "e{}{}", r + 1, c + 1)?;
                    match k {
                        0 => {}
                        1 => write!(f, "*x")?,
                        _ => write!(f, "*x^{k}")?,
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for MatrixPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatrixPolynomial[N={}]({self})", self.n)
    }
}
