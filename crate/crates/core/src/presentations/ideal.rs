use num::{BigInt, Integer, One};

use crate::exactla::{SparseEchelon, SparseRow};
use crate::freealg::{FreePolynomial, WordIndex};
use crate::par;

use super::ResourceError;

/// Number of products `u * g * v` with `len(u) + deg(g) + len(v) <= max_len`.
pub fn triple_count(gens: &[FreePolynomial], n_vars: usize, max_len: usize) -> usize {
    let mut total = 0usize;
    for g in gens {
        let Some(d) = g.degree().finite() else { continue };
        if d > max_len {
            continue;
        }
        for k in 0..=max_len - d {
            let per = n_vars.checked_pow(k as u32).unwrap_or(usize::MAX);
            total = total.saturating_add(per.saturating_mul(k + 1));
        }
    }
    total
}

/// The span of all `u * g * v` of total length `<= max_len`, kept as an
/// echelon basis in word coordinates whose pivots are leading words.
#[derive(Debug, Clone)]
pub struct TruncatedIdeal {
    index: WordIndex,
    echelon: SparseEchelon,
    triples: usize,
}

/// A generator in integer form: `(term length, term value in base n, coeff)`.
struct IntGen {
    degree: usize,
    terms: Vec<(usize, usize, BigInt)>,
}

fn int_gen(g: &FreePolynomial, n: usize) -> IntGen {
    let lcm = g.terms().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    let terms = g
        .terms()
        .map(|(w, c)| {
            let val = w
                .letters()
                .iter()
                .fold(0usize, |acc, &l| acc * n + l as usize);
            (w.len(), val, c.numer() * (&lcm / c.denom()))
        })
        .collect();
    IntGen {
        degree: g.degree().finite().expect("nonzero generator"),
        terms,
    }
}

impl TruncatedIdeal {
    /// Builds the truncated ideal, refusing when more than `ceiling`
    /// products would be enumerated.
    pub fn build(
        gens: &[FreePolynomial],
        n_vars: usize,
        max_len: usize,
        ceiling: usize,
    ) -> Result<TruncatedIdeal, ResourceError> {
        let count = triple_count(gens, n_vars, max_len);
        if count > ceiling {
            return Err(ResourceError::Ceiling { count, ceiling });
        }
        let index = WordIndex::new(n_vars, max_len);
        let pow: Vec<usize> = (0..=max_len).map(|k| n_vars.pow(k as u32)).collect();
        let int_gens: Vec<IntGen> = gens
            .iter()
            .filter(|g| !g.is_zero())
            .map(|g| int_gen(g, n_vars))
            .collect();
        let mut echelon = SparseEchelon::new();
        // Shorter flanks first: low-degree rows become pivots early and keep
        // the later reductions short.
        for k in 0..=max_len {
            for g in int_gens.iter().filter(|g| g.degree + k <= max_len) {
                for lu in 0..=k {
                    let lv = k - lu;
                    let rows = par::map_range(pow[lu] * pow[lv], |uv| {
                        let (u, v) = (uv / pow[lv], uv % pow[lv]);
                        let mut row: SparseRow = g
                            .terms
                            .iter()
                            .map(|(len, val, c)| {
                                let total = lu + len + lv;
                                let within = (u * pow[*len] + val) * pow[lv] + v;
                                (index.count_up_to(total) - pow[total] + within, c.clone())
                            })
                            .collect();
                        row.sort_unstable_by_key(|(c, _)| *c);
                        row
                    });
                    for row in rows {
                        echelon.insert(row);
                    }
                }
            }
        }
        Ok(TruncatedIdeal {
            index,
            echelon,
            triples: count,
        })
    }

    pub fn max_len(&self) -> usize {
        self.index.max_len()
    }

    pub fn triples(&self) -> usize {
        self.triples
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    /// Dimension of the truncated span intersected with words of length
    /// `<= len`.
    pub fn rank_up_to(&self, len: usize) -> usize {
        let len = len.min(self.max_len());
        self.echelon.rank_below(self.index.count_up_to(len))
    }

    /// Leading words of the echelon basis with length `<= len`.
    pub fn leading_words(&self, len: usize) -> Vec<crate::freealg::Word> {
        let bound = self.index.count_up_to(len.min(self.max_len()));
        self.echelon
            .pivots()
            .into_iter()
            .filter(|&c| c < bound)
            .map(|c| self.index.word(c))
            .collect()
    }

    /// Whether `p` lies in the truncated span. Polynomials longer than the
    /// truncation are never members.
    pub fn membership(&self, p: &FreePolynomial) -> bool {
        match p.degree().finite() {
            None => return true,
            Some(d) if d > self.max_len() => return false,
            Some(_) => {}
        }
        let row = crate::exactla::sparse_from_rational(
            p.terms().map(|(w, c)| (self.index.index(w), c.clone())),
        );
        self.echelon.contains(row)
    }

    /// Every element of an echelon basis, as free polynomials over `ctx`.
    pub fn basis_polynomials(
        &self,
        ctx: &std::sync::Arc<crate::freealg::VarContext>,
    ) -> Vec<FreePolynomial> {
        self.echelon
            .reduced_rows()
            .into_iter()
            .map(|(_, row)| {
                FreePolynomial::from_terms(
                    ctx,
                    row.into_iter()
                        .map(|(c, v)| (self.index.word(c), crate::freealg::Scalar::from_integer(v))),
                )
            })
            .collect()
    }
}

/// Upper bounds `#words(<= l) - rank(ideal ∩ words(<= l))` for `l <= up_to`.
pub fn quotient_upper_dims(ideal: &TruncatedIdeal, up_to: usize) -> Vec<usize> {
    (0..=up_to.min(ideal.max_len()))
        .map(|l| ideal.index.count_up_to(l) - ideal.rank_up_to(l))
        .collect()
}
