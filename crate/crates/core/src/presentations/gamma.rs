//! Linear descriptions of a matrix-polynomial algebra: a list of ties
//! between coefficient slots, unconstrained from some degree on.
//!
//! A tie is written `cK[i,j] = <combination>`, where `cK[i,j]` is the
//! 1-based `(i, j)` entry of the coefficient of `x^K`, e.g.
//! `c3[2,1] = c2[2,2] + c2[1,1] - c1[1,2]` or `c0[2,1] = 0`.

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exactla::{nullspace, QMatrix, RowEchelon};
use crate::freealg::{parse_scalar, word_count_up_to, Scalar};
use crate::matpoly::MatrixPolynomial;

use super::{PresentationSpec, ResourceError};

/// On-disk form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GammaFile {
    #[serde(rename = "N")]
    pub n: usize,
    pub free_degree: usize,
    pub constraints: Vec<String>,
}

/// Coefficient slot: power of `x` and 1-based row/column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Slot {
    pub power: usize,
    pub row: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaConstraint {
    pub text: String,
    pub target: Slot,
    pub terms: Vec<(Scalar, Slot)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaSpec {
    n: usize,
    free_degree: usize,
    constraints: Vec<GammaConstraint>,
}

fn parse_slot(s: &str, n: usize) -> Result<Slot, String> {
    let bad = || format!("malformed slot `{s}`");
    let rest = s.strip_prefix('c').ok_or_else(bad)?;
    let (power, rest) = rest.split_once('[').ok_or_else(bad)?;
    let inner = rest.strip_suffix(']').ok_or_else(bad)?;
    let (row, col) = inner.split_once(',').ok_or_else(bad)?;
    let slot = Slot {
        power: power.trim().parse().map_err(|_| bad())?,
        row: row.trim().parse().map_err(|_| bad())?,
        col: col.trim().parse().map_err(|_| bad())?,
    };
    if slot.row == 0 || slot.col == 0 || slot.row > n || slot.col > n {
        return Err(format!("slot `{s}` outside a {n}x{n} matrix"));
    }
    Ok(slot)
}

fn parse_constraint(text: &str, n: usize) -> Result<GammaConstraint, String> {
    let (lhs, rhs) = text
        .split_once('=')
        .ok_or_else(|| format!("missing `=` in `{text}`"))?;
    let target = parse_slot(lhs.trim(), n)?;
    let rhs: String = rhs.chars().filter(|c| !c.is_whitespace()).collect();
    let mut terms = Vec::new();
    if rhs != "0" {
        // Split on signs that start a new term.
        let mut pieces = Vec::new();
        let mut start = 0;
        for (i, ch) in rhs.char_indices() {
            if (ch == '+' || ch == '-') && i > start {
                pieces.push(&rhs[start..i]);
                start = i;
            }
        }
        pieces.push(&rhs[start..]);
        for piece in pieces {
            let (sign, body) = match piece.as_bytes().first() {
                Some(b'-') => (-Scalar::one(), &piece[1..]),
                Some(b'+') => (Scalar::one(), &piece[1..]),
                _ => (Scalar::one(), piece),
            };
            let (coeff, slot) = match body.split_once('*') {
                Some((c, s)) => (
                    parse_scalar(c).ok_or_else(|| format!("bad coefficient `{c}` in `{text}`"))?,
                    s,
                ),
                None => (Scalar::one(), body),
            };
            terms.push((sign * coeff, parse_slot(slot, n)?));
        }
    }
    if terms.iter().any(|(_, s)| s.power > target.power) {
        return Err(format!("`{text}` ties a slot to a higher power"));
    }
    Ok(GammaConstraint {
        text: text.to_string(),
        target,
        terms,
    })
}

impl GammaSpec {
    pub fn from_file(file: &GammaFile) -> Result<GammaSpec, String> {
        if file.n == 0 {
            return Err("N must be positive".into());
        }
        let constraints = file
            .constraints
            .iter()
            .map(|t| parse_constraint(t, file.n))
            .collect::<Result<Vec<_>, _>>()?;
        let mut targets: Vec<Slot> = constraints.iter().map(|c| c.target).collect();
        targets.sort();
        if targets.windows(2).any(|w| w[0] == w[1]) {
            return Err("a slot is constrained twice".into());
        }
        if let Some(c) = constraints.iter().find(|c| c.target.power >= file.free_degree) {
            return Err(format!("`{}` constrains a free degree", c.text));
        }
        Ok(GammaSpec {
            n: file.n,
            free_degree: file.free_degree,
            constraints,
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn free_degree(&self) -> usize {
        self.free_degree
    }

    pub fn constraints(&self) -> &[GammaConstraint] {
        &self.constraints
    }

    fn slot_value(p: &MatrixPolynomial, s: Slot) -> Scalar {
        p.entry(s.power, s.row, s.col)
    }

    /// Whether `p` satisfies every tie. Errors on a size mismatch.
    pub fn membership(&self, p: &MatrixPolynomial) -> Result<bool, crate::matpoly::MatPolyError> {
        if p.size() != self.n {
            return Err(crate::matpoly::MatPolyError::SizeMismatch {
                left: self.n,
                right: p.size(),
            });
        }
        Ok(self.first_violation(p).is_none())
    }

    /// First violated tie, if any.
    pub fn first_violation(&self, p: &MatrixPolynomial) -> Option<&GammaConstraint> {
        self.constraints.iter().find(|c| {
            let rhs: Scalar = c
                .terms
                .iter()
                .map(|(k, s)| k * Self::slot_value(p, *s))
                .sum();
            Self::slot_value(p, c.target) != rhs
        })
    }

    /// Free parameters per degree `k <= max_degree`, read off the ties:
    /// `N^2` minus the number of ties whose target has power `k`.
    pub fn dims_per_degree(&self, max_degree: usize) -> Vec<usize> {
        (0..=max_degree)
            .map(|k| {
                self.n * self.n
                    - self
                        .constraints
                        .iter()
                        .filter(|c| c.target.power == k)
                        .count()
            })
            .collect()
    }

    fn slot_index(&self, s: Slot) -> usize {
        s.power * self.n * self.n + (s.row - 1) * self.n + (s.col - 1)
    }

    /// Constraint matrix on the flattened coordinates of degree `<= bound`.
    /// Slots above `bound` are zero there, so a tie whose target lies above
    /// the bound still constrains its right-hand side.
    fn constraint_matrix(&self, bound: usize) -> QMatrix {
        let width = self.n * self.n * (bound + 1);
        let rows: Vec<Vec<Scalar>> = self
            .constraints
            .iter()
            .map(|c| {
                let mut row = vec![Scalar::zero(); width];
                if c.target.power <= bound {
                    row[self.slot_index(c.target)] += Scalar::one();
                }
                for (k, s) in &c.terms {
                    if s.power <= bound {
                        row[self.slot_index(*s)] -= k;
                    }
                }
                row
            })
            .filter(|r| r.iter().any(|x| !x.is_zero()))
            .collect();
        QMatrix::from_rows(width, rows).expect("uniform width")
    }

    /// Basis of the members of degree `<= bound`.
    pub fn basis_up_to(&self, bound: usize) -> Vec<MatrixPolynomial> {
        let m = self.constraint_matrix(bound);
        let vecs = if m.rows() == 0 {
            (0..m.cols())
                .map(|i| {
                    let mut v = vec![Scalar::zero(); m.cols()];
                    v[i] = Scalar::one();
                    v
                })
                .collect()
        } else {
            nullspace(&m)
        };
        vecs.iter()
            .map(|v| MatrixPolynomial::unflatten(self.n, v))
            .collect()
    }

    /// Exact dimension of the members of degree `<= bound`.
    pub fn dim_up_to(&self, bound: usize) -> usize {
        let m = self.constraint_matrix(bound);
        m.cols() - crate::exactla::rank(&m)
    }
}

#[derive(Debug, Clone)]
pub struct CoverageReport {
    pub len: usize,
    pub degree: usize,
    /// Dimension of the span of all word images intersected with degree
    /// `<= degree`.
    pub span: usize,
    /// Dimension of the described algebra in degree `<= degree`.
    pub gamma: usize,
    /// Whether every spanned element of degree `<= degree` satisfies the ties.
    pub contained: bool,
    /// Spanned elements violating a tie (a basis of such a set).
    pub violations: Vec<MatrixPolynomial>,
    /// Described elements outside the span, completing it to the full space.
    pub witnesses: Vec<MatrixPolynomial>,
}

impl CoverageReport {
    pub fn equal(&self) -> bool {
        self.contained && self.span == self.gamma
    }
}

/// Compares the span of the images of all words of length `<= len` with the
/// spec's described algebra, in x-degree `<= degree`.
pub fn coverage_check(
    spec: &PresentationSpec,
    len: usize,
    degree: usize,
    ceiling: usize,
) -> Result<Option<CoverageReport>, ResourceError> {
    let Some(gamma) = spec.gamma.as_ref() else {
        return Ok(None);
    };
    let words = word_count_up_to(spec.n_vars(), len);
    if words > ceiling {
        return Err(ResourceError::Ceiling {
            count: words,
            ceiling,
        });
    }
    let n = spec.size();
    let nn = n * n;
    let images = spec.evaluate_all_words(len);
    let top = images
        .iter()
        .filter_map(|m| m.xdeg().finite())
        .max()
        .unwrap_or(0)
        .max(degree);
    let width = nn * (top + 1);
    // Reverse the coordinates so that the echelon pivots on the highest
    // power first; rows whose pivot falls in the last block then span the
    // intersection with low degree.
    let rows = crate::par::map(&images, |m| {
        let mut v = m.flatten(top).expect("within bound");
        v.reverse();
        v
    });
    let mut ech = RowEchelon::new(width);
    for row in &rows {
        ech.insert(row).expect("uniform width");
    }
    let low_start = width - nn * (degree + 1);
    let low: Vec<MatrixPolynomial> = ech
        .rows()
        .iter()
        .filter(|r| r.iter().position(|x| !x.is_zero()).expect("nonzero") >= low_start)
        .map(|r| {
            let mut v: Vec<Scalar> = r.iter().map(|x| Scalar::from_integer(x.clone())).collect();
            v.reverse();
            v.truncate(nn * (degree + 1));
            MatrixPolynomial::unflatten(n, &v)
        })
        .collect();

    let violations: Vec<MatrixPolynomial> = low
        .iter()
        .filter(|p| gamma.first_violation(p).is_some())
        .cloned()
        .collect();

    let mut span_ech = RowEchelon::new(nn * (degree + 1));
    for p in &low {
        span_ech
            .insert(&p.flatten(degree).expect("within bound"))
            .expect("uniform width");
    }
    let mut witnesses = Vec::new();
    for b in gamma.basis_up_to(degree) {
        if span_ech
            .insert(&b.flatten(degree).expect("within bound"))
            .expect("uniform width")
        {
            witnesses.push(b);
        }
    }
    Ok(Some(CoverageReport {
        len,
        degree,
        span: low.len(),
        gamma: gamma.dim_up_to(degree),
        contained: violations.is_empty(),
        violations,
        witnesses,
    }))
}
