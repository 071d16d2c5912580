use serde::{Deserialize, Serialize};

use crate::exactla::QMatrix;
use crate::freealg::Scalar;

use super::{
    rf_const, BispectralError, ExpKernelMatrix, LeftDiffOp, RatMatrix, RationalFunction2,
    RightDiffOp,
};

pub const BUILTIN_TRIPLES: &[&str] = &["calogero", "nilpotent2", "nilpotent3", "nilpotent4"];

const CALOGERO: &str = include_str!("../../data/calogero.json");

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorTerm {
    pub order: usize,
    pub coeff: Vec<Vec<String>>,
}

/// JSON fixture. `psi` is the rational part; the `e^{xz}` factor is implied.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TripleFile {
    pub name: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub psi: Vec<Vec<String>>,
    #[serde(rename = "L")]
    pub l: Vec<OperatorTerm>,
    #[serde(rename = "F")]
    pub f: Vec<Vec<String>>,
    #[serde(rename = "B", default)]
    pub b: Option<Vec<OperatorTerm>>,
    #[serde(default)]
    pub theta: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone)]
pub struct Triple {
    pub name: String,
    pub l: LeftDiffOp,
    pub psi: ExpKernelMatrix,
    pub f: RatMatrix,
    pub b: Option<RightDiffOp>,
    pub theta: Option<RatMatrix>,
}

fn terms(list: &[OperatorTerm]) -> Result<Vec<(usize, RatMatrix)>, BispectralError> {
    list.iter()
        .map(|t| Ok((t.order, RatMatrix::parse(&t.coeff)?)))
        .collect()
}

impl Triple {
    pub fn from_file(file: &TripleFile) -> Result<Triple, BispectralError> {
        let psi = RatMatrix::parse(&file.psi)?;
        if psi.size() != file.n {
            return Err(BispectralError::SizeMismatch(file.n, psi.size()));
        }
        Ok(Triple {
            name: file.name.clone(),
            l: LeftDiffOp::new(terms(&file.l)?)?,
            psi: ExpKernelMatrix::new(psi),
            f: RatMatrix::parse(&file.f)?,
            b: file
                .b
                .as_deref()
                .map(|b| terms(b).and_then(RightDiffOp::new))
                .transpose()?,
            theta: file.theta.as_deref().map(RatMatrix::parse).transpose()?,
        })
    }

    pub fn from_json(text: &str) -> Result<Triple, BispectralError> {
        let file: TripleFile =
            serde_json::from_str(text).map_err(|e| BispectralError::Json(e.to_string()))?;
        Triple::from_file(&file)
    }

    pub fn verify(&self) -> Result<super::TripleReport, BispectralError> {
        super::verify_triple(&self.l, &self.psi, &self.f, self.b.as_ref(), self.theta.as_ref())
    }
}

/// `x^-k` as a rational function.
fn inv_x_pow(k: usize) -> RationalFunction2 {
    RationalFunction2::parse("x")
        .expect("literal")
        .powi(-(k as i32))
        .expect("nonzero")
}

/// The family attached to a nilpotent matrix `s` with `s^d = 0`:
/// `psi = e^{xz} (I z + sum_{m=1}^{d} (-1)^m s^{m-1} x^{-m})`,
/// `L = -d^2/dx^2 + 2 sum_{m=1}^{d} (-1)^{m+1} m s^{m-1} x^{-m-1}`,
/// with eigenvalue `F = -z^2 I`.
pub fn nilpotent_triple(name: &str, s: &QMatrix, d: usize) -> Triple {
    let n = s.rows();
    let mut powers = vec![QMatrix::identity(n)];
    for m in 1..d {
        powers.push(powers[m - 1].checked_mul(s).expect("square"));
    }
    let entry = |m: &QMatrix, i: usize, j: usize| RationalFunction2::constant(m.get(i, j).clone());
    let psi = RatMatrix::from_fn(n, |i, j| {
        let mut acc = if i == j {
            RationalFunction2::parse("z").expect("literal")
        } else {
            RationalFunction2::zero()
        };
        for m in 1..=d {
            let sign = Scalar::from_integer(if m % 2 == 0 { 1.into() } else { (-1).into() });
            let c = entry(&powers[m - 1], i, j).mul(&inv_x_pow(m)).scale(&sign);
            acc = acc.add(&c);
        }
        acc
    });
    let potential = RatMatrix::from_fn(n, |i, j| {
        let mut acc = RationalFunction2::zero();
        for m in 1..=d {
            let c = if m % 2 == 1 { 2 * m as i64 } else { -2 * m as i64 };
            let term = entry(&powers[m - 1], i, j).mul(&inv_x_pow(m + 1)).mul(&rf_const(c));
            acc = acc.add(&term);
        }
        acc
    });
    let l = LeftDiffOp::new(vec![
        (2, RatMatrix::identity(n).scale(&rf_const(-1))),
        (0, potential),
    ])
    .expect("x-only coefficients");
    let f = RatMatrix::identity(n).scale(&RationalFunction2::parse("-z^2").expect("literal"));
    Triple {
        name: name.to_string(),
        l,
        psi: ExpKernelMatrix::new(psi),
        f,
        b: None,
        theta: None,
    }
}

/// Upper shift matrix of size `n`.
pub(crate) fn shift_matrix(n: usize) -> QMatrix {
    let mut s = QMatrix::zeros(n, n);
    for i in 0..n.saturating_sub(1) {
        s.set(i, i + 1, Scalar::from_integer(1.into()));
    }
    s
}

pub fn builtin_triple(name: &str) -> Result<Triple, BispectralError> {
    match name {
        "calogero" => Triple::from_json(CALOGERO),
        "nilpotent2" => Ok(nilpotent_triple(name, &shift_matrix(2), 2)),
        "nilpotent3" => Ok(nilpotent_triple(name, &shift_matrix(3), 3)),
        "nilpotent4" => Ok(nilpotent_triple(name, &shift_matrix(4), 4)),
        other => Err(BispectralError::UnknownTriple(other.to_string())),
    }
}
