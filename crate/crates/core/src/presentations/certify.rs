use crate::exactla::RowEchelon;
use crate::freealg::{word_count_up_to, WordIndex};
use crate::matpoly::MatrixPolynomial;

use super::basis::predicted_basis_words;
use super::ideal::{quotient_upper_dims, TruncatedIdeal};
use super::{
    check_candidates, check_relations, ideal_generators, PresentationSpec, RelationCheck,
    ResourceError, DEFAULT_CEILING,
};

#[derive(Debug, Clone, Copy)]
pub struct CertifyOptions {
    /// Word-length bound `L`.
    pub len: usize,
    /// How far beyond `L` the ideal may be truncated while trying to close
    /// the sandwich.
    pub max_slack: usize,
    pub ceiling: usize,
}

impl CertifyOptions {
    pub fn new(len: usize) -> CertifyOptions {
        CertifyOptions {
            len,
            max_slack: 2,
            ceiling: DEFAULT_CEILING,
        }
    }
}

/// One row of the dimension table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimRow {
    pub len: usize,
    /// Rank of the images of all words of length `<= len`.
    pub lower: usize,
    /// Words of length `<= len` minus the truncated ideal's rank there.
    pub upper: usize,
    pub certified: bool,
    /// Number of predicted basis words of length `<= len`.
    pub basis_count: Option<usize>,
    /// Rank of their images.
    pub basis_rank: Option<usize>,
}

impl DimRow {
    /// Whether the predicted basis is independent and has the certified size.
    pub fn basis_matches(&self) -> Option<bool> {
        match (self.basis_count, self.basis_rank) {
            (Some(c), Some(r)) => Some(self.certified && c == r && c == self.lower),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CertificationReport {
    pub relations: Vec<RelationCheck>,
    /// Candidate relations that did not vanish and were left out.
    pub rejected: Vec<RelationCheck>,
    pub dims: Vec<DimRow>,
    /// Length at which the ideal was finally truncated (`None` when the
    /// relations did not vanish and nothing was computed).
    pub ideal_len: Option<usize>,
    pub triples: usize,
    /// Ideal length whose product count exceeded the ceiling, cutting the
    /// slack retries short.
    pub blocked_at: Option<usize>,
    pub basis_note: Option<&'static str>,
}

impl CertificationReport {
    pub fn relations_vanish(&self) -> bool {
        self.relations.iter().all(|r| r.zero)
    }

    pub fn certified(&self) -> bool {
        self.relations_vanish() && !self.dims.is_empty() && self.dims.iter().all(|d| d.certified)
    }
}

/// Ranks of the prefixes of `images` grouped by word length: entry `l` is
/// the rank of all images whose word has length `<= l`.
fn prefix_ranks(images: &[(usize, &MatrixPolynomial)], size: usize, up_to: usize) -> Vec<usize> {
    let bound = images
        .iter()
        .filter_map(|(_, m)| m.xdeg().finite())
        .max()
        .unwrap_or(0);
    let rows = crate::par::map(images, |(_, m)| m.flatten(bound).expect("within bound"));
    let mut ech = RowEchelon::new(size * size * (bound + 1));
    let mut out = vec![0; up_to + 1];
    let mut next = 0;
    for (l, slot) in out.iter_mut().enumerate() {
        while next < images.len() && images[next].0 <= l {
            ech.insert(&rows[next]).expect("uniform width");
            next += 1;
        }
        *slot = ech.rank();
    }
    out
}

/// Two-sided dimension certificate for the quotient algebra, per word
/// length.
pub fn certify(
    spec: &PresentationSpec,
    opts: CertifyOptions,
) -> Result<CertificationReport, ResourceError> {
    let relations = check_relations(spec);
    let rejected: Vec<RelationCheck> = check_candidates(spec).into_iter().filter(|c| !c.zero).collect();
    let basis_note = spec.basis_rule.and_then(|r| r.variant_note());
    let mut report = CertificationReport {
        relations,
        rejected,
        dims: Vec::new(),
        ideal_len: None,
        triples: 0,
        blocked_at: None,
        basis_note,
    };
    if !report.relations_vanish() {
        return Ok(report);
    }
    let words = word_count_up_to(spec.n_vars(), opts.len);
    if words > opts.ceiling {
        return Err(ResourceError::Ceiling {
            count: words,
            ceiling: opts.ceiling,
        });
    }
    let gens = ideal_generators(spec);
    let n = spec.n_vars();
    let l = opts.len;

    let all = spec.evaluate_all_words(l);
    let index = WordIndex::new(n, l);
    let tagged: Vec<(usize, &MatrixPolynomial)> =
        all.iter().enumerate().map(|(i, m)| (index.len_of(i), m)).collect();
    let lower = prefix_ranks(&tagged, spec.size(), l);

    let basis = spec.basis_rule.map(|rule| {
        let ws = predicted_basis_words(rule, l);
        let imgs: Vec<(usize, &MatrixPolynomial)> =
            ws.iter().map(|w| (w.len(), &all[index.index(w)])).collect();
        let ranks = prefix_ranks(&imgs, spec.size(), l);
        let counts: Vec<usize> = (0..=l).map(|k| ws.iter().filter(|w| w.len() <= k).count()).collect();
        (counts, ranks)
    });

    let mut upper = Vec::new();
    for slack in 0..=opts.max_slack {
        let ideal = match TruncatedIdeal::build(&gens, n, l + slack, opts.ceiling) {
            Ok(ideal) => ideal,
            Err(e) if slack == 0 => return Err(e),
            Err(_) => {
                report.blocked_at = Some(l + slack);
                break;
            }
        };
        upper = quotient_upper_dims(&ideal, l);
        report.ideal_len = Some(l + slack);
        report.triples = ideal.triples();
        if upper == lower {
            break;
        }
    }

    report.dims = (0..=l)
        .map(|k| DimRow {
            len: k,
            lower: lower[k],
            upper: upper[k],
            certified: lower[k] == upper[k],
            basis_count: basis.as_ref().map(|(c, _)| c[k]),
            basis_rank: basis.as_ref().map(|(_, r)| r[k]),
        })
        .collect();
    Ok(report)
}
