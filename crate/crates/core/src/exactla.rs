//! Exact linear algebra over `Q`.
//!
//! Three engines live here:
//!
//! * [`rref`] — dense reduced row echelon form via fraction-free (Bareiss)
//!   forward elimination on integer rows, followed by a rational
//!   back-substitution. Row updates below the pivot are data-parallel.
//! * [`RowEchelon`] — an incremental dense echelon of primitive integer rows,
//!   for streaming rank and membership queries on tall families.
//! * [`SparseEchelon`] — the same idea for very wide, very sparse rows, where
//!   the pivot of a row is its *largest* nonzero column.
//!
//! All three pivot deterministically, so results never depend on the
//! parallel/serial mode.

use std::collections::HashMap;
use std::fmt;

use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use thiserror::Error;

use crate::freealg::{format_scalar, Scalar};
use crate::par;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinAlgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Dense matrix of exact rationals, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> QMatrix {
        QMatrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> QMatrix {
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    /// Builds a matrix from rows, which must all have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<Vec<Scalar>>) -> Result<QMatrix, LinAlgError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let n = rows.len();
        for row in rows {
            if row.len() != cols {
                return Err(LinAlgError::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(QMatrix {
            rows: n,
            cols,
            data,
        })
    }

    /// Convenience constructor from small integers (tests and fixtures).
    pub fn from_ints(rows: &[&[i64]]) -> QMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&v| Scalar::from_integer(v.into())).collect())
            .collect();
        QMatrix::from_rows(cols, rows).expect("rectangular literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = QMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn checked_add(&self, other: &QMatrix) -> Result<QMatrix, LinAlgError> {
        self.check_same_shape(other)?;
        Ok(QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn checked_sub(&self, other: &QMatrix) -> Result<QMatrix, LinAlgError> {
        self.check_same_shape(other)?;
        Ok(QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn checked_mul(&self, other: &QMatrix) -> Result<QMatrix, LinAlgError> {
        if self.cols != other.rows {
            return Err(LinAlgError::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Scalar) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// Matrix-vector product `self * v`.
    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>, LinAlgError> {
        if v.len() != self.cols {
            return Err(LinAlgError::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    fn check_same_shape(&self, other: &QMatrix) -> Result<(), LinAlgError> {
        if self.rows != other.rows {
            return Err(LinAlgError::DimensionMismatch {
                expected: self.rows,
                found: other.rows,
            });
        }
        if self.cols != other.cols {
            return Err(LinAlgError::DimensionMismatch {
                expected: self.cols,
                found: other.cols,
            });
        }
        Ok(())
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QMatrix{}x{}[", self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            let cells: Vec<String> = self.row(r).iter().map(format_scalar).collect();
            write!(f, "{}", cells.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Reduced row echelon form: pivots are 1, pivot columns are cleared above
/// and below, zero rows are dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub matrix: QMatrix,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Scales a rational row by the lcm of its denominators, yielding integers
/// spanning the same line.
pub fn clear_denominators(row: &[Scalar]) -> Vec<BigInt> {
    let lcm = row
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect()
}

/// Divides out the gcd of the entries and makes the first nonzero entry
/// positive. Leaves the zero vector untouched.
pub fn make_primitive(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return;
    }
    let negate = row.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    let g = if negate { -g } else { g };
    if !g.is_one() {
        for x in row.iter_mut() {
            *x = &*x / &g;
        }
    }
}

/// Fraction-free forward elimination. Returns the echelon rows (nonzero only)
/// and their pivot columns.
fn bareiss_forward(m: &QMatrix) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let mut rows: Vec<Vec<BigInt>> = (0..m.rows()).map(|r| clear_denominators(m.row(r))).collect();
    let n = rows.len();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..m.cols() {
        if r == n {
            break;
        }
        let Some(p) = (r..n).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let (head, tail) = rows.split_at_mut(r + 1);
        let pivot_row = &head[r];
        let pivot = pivot_row[c].clone();
        par::for_each_mut(tail, |row| {
            let factor = row[c].clone();
            for j in c..row.len() {
                let v = &pivot * &row[j] - &factor * &pivot_row[j];
                row[j] = v / &prev;
            }
            // Entries left of the pivot column are already zero.
        });
        prev = pivot;
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Reduced row echelon form of `m`.
pub fn rref(m: &QMatrix) -> Rref {
    let (int_rows, pivots) = bareiss_forward(m);
    let mut rows: Vec<Vec<Scalar>> = int_rows
        .into_iter()
        .zip(&pivots)
        .map(|(row, &c)| {
            let p = row[c].clone();
            row.into_iter().map(|x| BigRational::new(x, p.clone())).collect()
        })
        .collect();
    for k in (0..rows.len()).rev() {
        let c = pivots[k];
        let (above, rest) = rows.split_at_mut(k);
        let pivot_row = &rest[0];
        par::for_each_mut(above, |row| {
            let f = row[c].clone();
            if !f.is_zero() {
                for j in c..row.len() {
                    if !pivot_row[j].is_zero() {
                        row[j] -= &f * &pivot_row[j];
                    }
                }
            }
        });
    }
    let matrix = QMatrix::from_rows(m.cols(), rows).expect("rows keep their width");
    Rref { matrix, pivots }
}

/// Rank of `m` (forward elimination only).
pub fn rank(m: &QMatrix) -> usize {
    bareiss_forward(m).1.len()
}

/// Whether `v` lies in the row space of `m`.
pub fn in_row_span(m: &QMatrix, v: &[Scalar]) -> Result<bool, LinAlgError> {
    if v.len() != m.cols() {
        return Err(LinAlgError::DimensionMismatch {
            expected: m.cols(),
            found: v.len(),
        });
    }
    let mut ech = RowEchelon::new(m.cols());
    for r in 0..m.rows() {
        ech.insert(m.row(r))?;
    }
    ech.contains(v)
}

/// A basis of `{ v : m * v = 0 }`, one vector per free column, in increasing
/// free-column order.
pub fn nullspace(m: &QMatrix) -> Vec<Vec<Scalar>> {
    let red = rref(m);
    let mut is_pivot = vec![false; m.cols()];
    for &p in &red.pivots {
        is_pivot[p] = true;
    }
    (0..m.cols())
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![Scalar::zero(); m.cols()];
            v[f] = Scalar::one();
            for (i, &p) in red.pivots.iter().enumerate() {
                v[p] = -red.matrix.get(i, f).clone();
            }
            v
        })
        .collect()
}

/// Incremental echelon basis of a row space, stored as primitive integer
/// rows keyed by their leading (smallest) column.
#[derive(Debug, Clone)]
pub struct RowEchelon {
    cols: usize,
    rows: Vec<Vec<BigInt>>,
    pivot_of: Vec<Option<usize>>,
}

impl RowEchelon {
    pub fn new(cols: usize) -> RowEchelon {
        RowEchelon {
            cols,
            rows: Vec::new(),
            pivot_of: vec![None; cols],
        }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Leading columns of the stored rows, in insertion order.
    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|r| leading(r).expect("nonzero row")).collect()
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    fn check(&self, v: &[Scalar]) -> Result<(), LinAlgError> {
        if v.len() != self.cols {
            return Err(LinAlgError::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok(())
    }

    /// Reduces an integer row against the basis until its leading column is
    /// not a pivot (or it vanishes).
    pub fn reduce_int(&self, mut v: Vec<BigInt>) -> Vec<BigInt> {
        make_primitive(&mut v);
        while let Some(c) = leading(&v) {
            let Some(k) = self.pivot_of[c] else { break };
            let row = &self.rows[k];
            let a = row[c].clone();
            let b = v[c].clone();
            let g = a.gcd(&b);
            let (a, b) = (&a / &g, &b / &g);
            for j in c..self.cols {
                if row[j].is_zero() {
                    if !v[j].is_zero() {
                        v[j] = &v[j] * &a;
                    }
                } else {
                    v[j] = &v[j] * &a - &b * &row[j];
                }
            }
            make_primitive(&mut v);
        }
        v
    }

    /// Adds a row; returns `true` when the rank grew.
    pub fn insert(&mut self, v: &[Scalar]) -> Result<bool, LinAlgError> {
        self.check(v)?;
        Ok(self.insert_int(clear_denominators(v)))
    }

    pub fn insert_int(&mut self, v: Vec<BigInt>) -> bool {
        assert_eq!(v.len(), self.cols, "row width");
        let v = self.reduce_int(v);
        match leading(&v) {
            None => false,
            Some(c) => {
                self.pivot_of[c] = Some(self.rows.len());
                self.rows.push(v);
                true
            }
        }
    }

    pub fn contains(&self, v: &[Scalar]) -> Result<bool, LinAlgError> {
        self.check(v)?;
        Ok(leading(&self.reduce_int(clear_denominators(v))).is_none())
    }
}

fn leading(v: &[BigInt]) -> Option<usize> {
    v.iter().position(|x| !x.is_zero())
}

/// Sparse integer row: `(column, value)` pairs sorted by increasing column,
/// no zero values.
pub type SparseRow = Vec<(usize, BigInt)>;

/// Converts sparse rational entries (any order, duplicates summed) into a
/// primitive sparse integer row.
pub fn sparse_from_rational<I>(entries: I) -> SparseRow
where
    I: IntoIterator<Item = (usize, Scalar)>,
{
    let mut acc: std::collections::BTreeMap<usize, Scalar> = std::collections::BTreeMap::new();
    for (c, v) in entries {
        *acc.entry(c).or_insert_with(Scalar::zero) += v;
    }
    acc.retain(|_, v| !v.is_zero());
    let lcm = acc.values().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let mut row: SparseRow = acc
        .into_iter()
        .map(|(c, x)| (c, x.numer() * (&lcm / x.denom())))
        .collect();
    sparse_primitive(&mut row);
    row
}

/// Divides out the content and makes the pivot (last) entry positive.
fn sparse_primitive(row: &mut SparseRow) {
    let g = row.iter().fold(BigInt::zero(), |acc, (_, x)| acc.gcd(x));
    if g.is_zero() {
        return;
    }
    let g = if row.last().is_some_and(|(_, x)| x.is_negative()) { -g } else { g };
    if g.is_one() {
        return;
    }
    for (_, x) in row.iter_mut() {
        *x = &*x / &g;
    }
}

/// `a * u - b * w` for sparse rows.
fn sparse_combine(a: &BigInt, u: &SparseRow, b: &BigInt, w: &SparseRow) -> SparseRow {
    let mut out = Vec::with_capacity(u.len() + w.len());
    let (mut i, mut j) = (0, 0);
    while i < u.len() || j < w.len() {
        let take_u = j == w.len() || (i < u.len() && u[i].0 < w[j].0);
        let take_w = i == u.len() || (j < w.len() && w[j].0 < u[i].0);
        if take_u {
            out.push((u[i].0, a * &u[i].1));
            i += 1;
        } else if take_w {
            out.push((w[j].0, -(b * &w[j].1)));
            j += 1;
        } else {
            let v = a * &u[i].1 - b * &w[j].1;
            if !v.is_zero() {
                out.push((u[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Sparse row with machine-word entries, used while everything fits.
type SmallRow = Vec<(usize, i64)>;

fn to_small(row: &SparseRow) -> Option<SmallRow> {
    row.iter()
        .map(|(c, x)| i64::try_from(x).ok().map(|v| (*c, v)))
        .collect()
}

fn from_small(row: SmallRow) -> SparseRow {
    row.into_iter().map(|(c, x)| (c, BigInt::from(x))).collect()
}

/// `a * u - b * w` in machine words; `None` on overflow.
fn small_combine(a: i64, u: &SmallRow, b: i64, w: &SmallRow) -> Option<SmallRow> {
    let mut out = Vec::with_capacity(u.len() + w.len());
    let (mut i, mut j) = (0, 0);
    while i < u.len() || j < w.len() {
        if j == w.len() || (i < u.len() && u[i].0 < w[j].0) {
            out.push((u[i].0, a.checked_mul(u[i].1)?));
            i += 1;
        } else if i == u.len() || w[j].0 < u[i].0 {
            out.push((w[j].0, b.checked_mul(w[j].1)?.checked_neg()?));
            j += 1;
        } else {
            let v = a.checked_mul(u[i].1)?.checked_sub(b.checked_mul(w[j].1)?)?;
            if v != 0 {
                out.push((u[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Some(out)
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i64
}

/// Same normalisation as [`sparse_primitive`]. Entries never reach
/// `i64::MIN` because every product above is checked.
fn small_primitive(row: &mut SmallRow) {
    let g = row.iter().fold(0, |acc, (_, x)| gcd_i64(acc, *x));
    if g == 0 {
        return;
    }
    let g = if row.last().is_some_and(|(_, x)| *x < 0) { -g } else { g };
    if g != 1 {
        for (_, x) in row.iter_mut() {
            *x /= g;
        }
    }
}

/// Incremental echelon for wide sparse rows whose pivot is the largest
/// nonzero column. With columns indexed in increasing graded order this makes
/// the pivot of a polynomial its leading word.
///
/// Rows whose entries fit in `i64` are mirrored in machine words and reduced
/// there first; any overflow falls back to big integers, so results never
/// depend on the fast path.
#[derive(Debug, Clone, Default)]
pub struct SparseEchelon {
    rows: HashMap<usize, SparseRow>,
    small: HashMap<usize, SmallRow>,
}

impl SparseEchelon {
    pub fn new() -> SparseEchelon {
        SparseEchelon::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Pivot columns in increasing order.
    pub fn pivots(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self.rows.keys().copied().collect();
        p.sort_unstable();
        p
    }

    pub fn has_pivot(&self, col: usize) -> bool {
        self.rows.contains_key(&col)
    }

    pub fn row(&self, pivot: usize) -> Option<&SparseRow> {
        self.rows.get(&pivot)
    }

    /// Machine-word reduction. Returns the row reached so far and whether it
    /// is final (no pivot left to eliminate).
    fn reduce_small(&self, mut v: SmallRow) -> Result<SmallRow, SmallRow> {
        while let Some(&(c, lead)) = v.last() {
            if !self.rows.contains_key(&c) {
                break;
            }
            let Some(row) = self.small.get(&c) else { return Err(v) };
            let a = row.last().expect("nonzero row").1;
            let g = gcd_i64(a, lead);
            match small_combine(a / g, &v, lead / g, row) {
                Some(mut next) => {
                    small_primitive(&mut next);
                    v = next;
                }
                None => return Err(v),
            }
        }
        Ok(v)
    }

    fn reduce_big(&self, mut v: SparseRow) -> SparseRow {
        while let Some(&(c, ref lead)) = v.last() {
            let Some(row) = self.rows.get(&c) else { break };
            let a = row.last().expect("nonzero row").1.clone();
            let b = lead.clone();
            let g = a.gcd(&b);
            let (a, b) = (&a / &g, &b / &g);
            v = sparse_combine(&a, &v, &b, row);
            sparse_primitive(&mut v);
        }
        v
    }

    /// Reduces `v` until its last column is not a pivot, or it vanishes.
    pub fn reduce(&self, v: SparseRow) -> SparseRow {
        match to_small(&v) {
            Some(small) => match self.reduce_small(small) {
                Ok(done) => from_small(done),
                Err(partial) => self.reduce_big(from_small(partial)),
            },
            None => self.reduce_big(v),
        }
    }

    /// Adds a row; returns `true` when the rank grew.
    pub fn insert(&mut self, v: SparseRow) -> bool {
        let v = self.reduce(v);
        match v.last() {
            None => false,
            Some(&(c, _)) => {
                if let Some(small) = to_small(&v) {
                    self.small.insert(c, small);
                }
                self.rows.insert(c, v);
                true
            }
        }
    }

    pub fn contains(&self, v: SparseRow) -> bool {
        self.reduce(v).is_empty()
    }

    /// Number of pivots at columns `< bound`; with graded column order this
    /// is the dimension of the span intersected with the leading coordinates.
    pub fn rank_below(&self, bound: usize) -> usize {
        self.rows.keys().filter(|&&c| c < bound).count()
    }

    /// Brings every stored row to its fully reduced form w.r.t. the other
    /// pivots (no pivot column appears outside its own row), and returns the
    /// rows sorted by pivot.
    pub fn reduced_rows(&self) -> Vec<(usize, SparseRow)> {
        let mut done: HashMap<usize, SparseRow> = HashMap::new();
        let pivots = self.pivots();
        for &p in &pivots {
            let mut v = self.rows[&p].clone();
            // Reduce non-leading entries against lower pivots, highest first.
            loop {
                let target = v
                    .iter()
                    .rev()
                    .skip(1)
                    .find(|(c, _)| done.contains_key(c))
                    .map(|(c, x)| (*c, x.clone()));
                let Some((c, x)) = target else { break };
                let row = &done[&c];
                let a = row.last().expect("nonzero").1.clone();
                let g = a.gcd(&x);
                v = sparse_combine(&(&a / &g), &v, &(&x / &g), row);
                sparse_primitive(&mut v);
            }
            done.insert(p, v);
        }
        pivots.into_iter().map(|p| {
            let r = done.remove(&p).expect("pivot row");
            (p, r)
        }).collect()
    }
}
