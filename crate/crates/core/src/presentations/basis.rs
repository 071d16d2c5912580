use serde::{Deserialize, Serialize};

use crate::freealg::Word;

/// Enumeration rule for the predicted basis of a built-in quotient algebra.
/// Letter indices refer to the declared variable order of the matching spec.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisRule {
    /// Variables `[a0, a1]`: `a1^k * {1, a0, a0 a1, a0 a1 a0}`.
    Thm1,
    /// Variables `[a2, a3]`: `a2^i (a3 a2)^n * {1, a3}` and
    /// `a2^i (a3 a2)^n a2` with `n >= 1`, for `i <= 2`.
    Thm2,
    /// Variables `[t1, t3, t4, t5]`: three sporadic words plus eight
    /// families built on powers of `t5`.
    Thm3,
}

impl BasisRule {
    /// Human-readable statement of any index-range choice the rule makes.
    pub fn variant_note(self) -> Option<&'static str> {
        match self {
            BasisRule::Thm3 => Some("family t1*t5^n*t4 taken with n >= 1"),
            _ => None,
        }
    }
}

fn push_if(out: &mut Vec<Word>, w: Word, max_len: usize) {
    if w.len() <= max_len {
        out.push(w);
    }
}

/// Predicted basis words of length `<= max_len`, sorted in graded
/// lexicographic order and without repetitions.
pub fn predicted_basis_words(rule: BasisRule, max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    match rule {
        BasisRule::Thm1 => {
            let (a0, a1) = (0, 1);
            for k in 0..=max_len {
                let head = Word::letter(a1).pow(k);
                for tail in [vec![], vec![a0], vec![a0, a1], vec![a0, a1, a0]] {
                    push_if(&mut out, head.concat(&Word::from_letters(tail)), max_len);
                }
            }
        }
        BasisRule::Thm2 => {
            let (a2, a3) = (0, 1);
            let pair = Word::from_letters([a3, a2]);
            for i in 0..=2 {
                for n in 0..=max_len / 2 {
                    let stem = Word::letter(a2).pow(i).concat(&pair.pow(n));
                    push_if(&mut out, stem.clone(), max_len);
                    push_if(&mut out, stem.concat(&Word::letter(a3)), max_len);
                    if n >= 1 {
                        push_if(&mut out, stem.concat(&Word::letter(a2)), max_len);
                    }
                }
            }
        }
        BasisRule::Thm3 => {
            let (t1, t3, t4, t5) = (0, 1, 2, 3);
            let w = |ls: &[usize]| Word::from_letters(ls.iter().copied());
            for s in [w(&[t4, t1]), w(&[t3]), w(&[t1])] {
                push_if(&mut out, s, max_len);
            }
            for n in 0..=max_len {
                let p = Word::letter(t5).pow(n);
                push_if(&mut out, p.clone(), max_len);
                push_if(&mut out, p.concat(&w(&[t4])), max_len);
                push_if(&mut out, p.concat(&w(&[t1, t4])), max_len);
                push_if(&mut out, w(&[t3]).concat(&p).concat(&w(&[t4])), max_len);
                if n >= 1 {
                    push_if(&mut out, p.concat(&w(&[t1])), max_len);
                    push_if(&mut out, w(&[t3]).concat(&p), max_len);
                    push_if(&mut out, w(&[t1]).concat(&p), max_len);
                    push_if(&mut out, w(&[t1]).concat(&p).concat(&w(&[t4])), max_len);
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}
