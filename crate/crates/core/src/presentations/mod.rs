//! Presentations of matrix-polynomial algebras: a free algebra, a list of
//! relations, and images of the generators in `M_N(Q[x])`.
//!
//! A [`PresentationSpec`] is loaded from JSON (three of them ship embedded in
//! the binary). From it we can evaluate free polynomials, check that the
//! relations vanish, bound the dimensions of the quotient algebra from both
//! sides, and compare the span of the generator words with a linear
//! description of the target algebra ([`GammaSpec`]).

mod basis;
mod certify;
mod gamma;
mod ideal;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::freealg::{AlgebraError, FreePolynomial, VarContext, Word, WordIndex};
use crate::matpoly::{MatPolyError, MatrixPolynomial, MatrixPolynomialLiteral};
use crate::par;

pub use basis::{predicted_basis_words, BasisRule};
pub use certify::{certify, CertificationReport, CertifyOptions, DimRow};
pub use gamma::{coverage_check, CoverageReport, GammaConstraint, GammaFile, GammaSpec, Slot};
pub use ideal::{quotient_upper_dims, triple_count, TruncatedIdeal};

/// Default ceiling on the number of `(u, g, v)` products a truncated ideal
/// may enumerate.
pub const DEFAULT_CEILING: usize = 200_000;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("spec JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("in `{text}`: {source}")]
    Parse { text: String, source: AlgebraError },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("image of `{0}`: {1}")]
    Image(String, MatPolyError),
    #[error("no image given for variable `{0}`")]
    MissingImage(String),
    #[error("image given for undeclared variable `{0}`")]
    ExtraImage(String),
    #[error("images have different sizes ({0} and {1})")]
    MixedSizes(usize, usize),
    #[error("gamma: {0}")]
    Gamma(String),
    #[error("unknown built-in spec `{0}` (expected thm1, thm2 or thm3)")]
    UnknownBuiltin(String),
    #[error("polynomial is over a different variable context")]
    ForeignPolynomial,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ResourceError {
    #[error("enumeration needs {count} items, above the ceiling of {ceiling}")]
    Ceiling { count: usize, ceiling: usize },
}

/// On-disk form of a spec.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpecFile {
    #[serde(default)]
    pub name: Option<String>,
    pub variables: Vec<String>,
    pub relations: Vec<String>,
    /// Relations that are admitted only if they evaluate to zero.
    #[serde(default)]
    pub candidates: Vec<String>,
    pub images: BTreeMap<String, MatrixPolynomialLiteral>,
    #[serde(default)]
    pub basis_rule: Option<BasisRule>,
    #[serde(default)]
    pub gamma: Option<gamma::GammaFile>,
    #[serde(default)]
    pub identities: Vec<IdentityFile>,
}

/// A claimed equality `expr == image`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityFile {
    pub name: String,
    pub expr: String,
    pub image: MatrixPolynomialLiteral,
    /// The originally published value, when `image` had to be corrected.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub printed_image: Option<MatrixPolynomialLiteral>,
}

#[derive(Debug, Clone)]
pub struct Relation {
    pub text: String,
    pub poly: FreePolynomial,
}

#[derive(Debug, Clone)]
pub struct Identity {
    pub name: String,
    pub expr: Relation,
    pub image: MatrixPolynomial,
    pub printed_image: Option<MatrixPolynomial>,
}

#[derive(Debug, Clone)]
pub struct PresentationSpec {
    pub name: String,
    pub ctx: Arc<VarContext>,
    pub relations: Vec<Relation>,
    pub candidates: Vec<Relation>,
    /// Images indexed by variable position.
    pub images: Vec<MatrixPolynomial>,
    pub basis_rule: Option<BasisRule>,
    pub gamma: Option<GammaSpec>,
    pub identities: Vec<Identity>,
}

const THM1: &str = include_str!("../../data/thm1.json");
const THM2: &str = include_str!("../../data/thm2.json");
const THM3: &str = include_str!("../../data/thm3.json");

fn parse_relation(ctx: &Arc<VarContext>, text: &str) -> Result<Relation, SpecError> {
    let poly = FreePolynomial::parse(ctx, text).map_err(|source| SpecError::Parse {
        text: text.to_string(),
        source,
    })?;
    Ok(Relation {
        text: text.to_string(),
        poly,
    })
}

fn image(name: &str, lit: &MatrixPolynomialLiteral) -> Result<MatrixPolynomial, SpecError> {
    MatrixPolynomial::from_literal(lit).map_err(|e| SpecError::Image(name.to_string(), e))
}

impl PresentationSpec {
    pub fn builtin(name: &str) -> Result<PresentationSpec, SpecError> {
        let text = match name {
            "thm1" => THM1,
            "thm2" => THM2,
            "thm3" => THM3,
            other => return Err(SpecError::UnknownBuiltin(other.to_string())),
        };
        PresentationSpec::from_json(text)
    }

    pub fn from_json(text: &str) -> Result<PresentationSpec, SpecError> {
        let file: SpecFile = serde_json::from_str(text)?;
        PresentationSpec::from_file(file)
    }

    pub fn from_file(file: SpecFile) -> Result<PresentationSpec, SpecError> {
        let ctx = VarContext::new(file.variables.iter().cloned())?;
        for key in file.images.keys() {
            if ctx.index_of(key).is_none() {
                return Err(SpecError::ExtraImage(key.clone()));
            }
        }
        let mut images = Vec::with_capacity(ctx.len());
        for name in ctx.names() {
            let lit = file
                .images
                .get(name)
                .ok_or_else(|| SpecError::MissingImage(name.clone()))?;
            let m = image(name, lit)?;
            if let Some(first) = images.first().map(MatrixPolynomial::size) {
                if first != m.size() {
                    return Err(SpecError::MixedSizes(first, m.size()));
                }
            }
            images.push(m);
        }
        let relations = file
            .relations
            .iter()
            .map(|t| parse_relation(&ctx, t))
            .collect::<Result<Vec<_>, _>>()?;
        let candidates = file
            .candidates
            .iter()
            .map(|t| parse_relation(&ctx, t))
            .collect::<Result<Vec<_>, _>>()?;
        let gamma = file
            .gamma
            .as_ref()
            .map(GammaSpec::from_file)
            .transpose()
            .map_err(SpecError::Gamma)?;
        let mut identities = Vec::with_capacity(file.identities.len());
        for id in &file.identities {
            identities.push(Identity {
                name: id.name.clone(),
                expr: parse_relation(&ctx, &id.expr)?,
                image: image(&id.name, &id.image)?,
                printed_image: id
                    .printed_image
                    .as_ref()
                    .map(|lit| image(&id.name, lit))
                    .transpose()?,
            });
        }
        Ok(PresentationSpec {
            name: file.name.unwrap_or_else(|| "custom".to_string()),
            ctx,
            relations,
            candidates,
            images,
            basis_rule: file.basis_rule,
            gamma,
            identities,
        })
    }

    /// Matrix size `N` of the images.
    pub fn size(&self) -> usize {
        self.images.first().map_or(1, MatrixPolynomial::size)
    }

    pub fn n_vars(&self) -> usize {
        self.ctx.len()
    }

    pub fn parse(&self, text: &str) -> Result<FreePolynomial, SpecError> {
        Ok(parse_relation(&self.ctx, text)?.poly)
    }

    /// Image of a single word (empty word maps to the identity).
    pub fn evaluate_word(&self, word: &Word) -> MatrixPolynomial {
        word.letters()
            .iter()
            .fold(MatrixPolynomial::identity(self.size()), |acc, &l| {
                &acc * &self.images[l as usize]
            })
    }

    /// Images of every word of length `<= max_len`, indexed as in
    /// [`WordIndex`]. Each word is one product away from its prefix, and
    /// every length level is evaluated in parallel.
    pub fn evaluate_all_words(&self, max_len: usize) -> Vec<MatrixPolynomial> {
        let index = WordIndex::new(self.n_vars(), max_len);
        let mut out = vec![MatrixPolynomial::identity(self.size())];
        for len in 1..=max_len {
            let start = index.count_up_to(len - 1);
            let end = index.count_up_to(len);
            let prev_start = if len == 1 { 0 } else { index.count_up_to(len - 2) };
            let n = self.n_vars();
            let level = par::map_range(end - start, |offset| {
                let parent = prev_start + offset / n;
                &out[parent] * &self.images[offset % n]
            });
            out.extend(level);
        }
        out
    }
}

/// Algebra homomorphism from the free algebra to `M_N(Q[x])` determined by
/// the generator images.
pub fn evaluate(spec: &PresentationSpec, p: &FreePolynomial) -> Result<MatrixPolynomial, SpecError> {
    if p.context() != &spec.ctx && **p.context() != *spec.ctx {
        return Err(SpecError::ForeignPolynomial);
    }
    let mut total = MatrixPolynomial::zero(spec.size());
    for (w, c) in p.terms() {
        total = &total + &spec.evaluate_word(w).scale(c);
    }
    Ok(total)
}

/// Outcome of evaluating one relation.
#[derive(Debug, Clone)]
pub struct RelationCheck {
    pub text: String,
    pub zero: bool,
    pub residual: MatrixPolynomial,
}

fn check_all(spec: &PresentationSpec, rels: &[Relation]) -> Vec<RelationCheck> {
    par::map(rels, |r| {
        let residual = evaluate(spec, &r.poly).expect("relation parsed in spec context");
        RelationCheck {
            text: r.text.clone(),
            zero: residual.is_zero(),
            residual,
        }
    })
}

/// Evaluates every declared relation.
pub fn check_relations(spec: &PresentationSpec) -> Vec<RelationCheck> {
    check_all(spec, &spec.relations)
}

/// Evaluates every candidate relation.
pub fn check_candidates(spec: &PresentationSpec) -> Vec<RelationCheck> {
    check_all(spec, &spec.candidates)
}

/// Generators of the ideal: the declared relations, plus every candidate
/// that vanishes, without duplicates.
pub fn ideal_generators(spec: &PresentationSpec) -> Vec<FreePolynomial> {
    let mut gens: Vec<FreePolynomial> = Vec::new();
    let admitted = spec
        .candidates
        .iter()
        .zip(check_candidates(spec))
        .filter(|(_, c)| c.zero)
        .map(|(r, _)| r);
    for r in spec.relations.iter().chain(admitted) {
        if !r.poly.is_zero() && !gens.contains(&r.poly) {
            gens.push(r.poly.clone());
        }
    }
    gens
}

#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub name: String,
    pub expr: String,
    pub holds: bool,
    /// Whether the expected image differs from the originally printed one.
    pub corrected: bool,
    pub value: MatrixPolynomial,
}

/// Checks every `expr == image` identity carried by the spec.
pub fn elimination_identities(spec: &PresentationSpec) -> Vec<IdentityCheck> {
    par::map(&spec.identities, |id| {
        let value = evaluate(spec, &id.expr.poly).expect("identity parsed in spec context");
        IdentityCheck {
            name: id.name.clone(),
            expr: id.expr.text.clone(),
            holds: value == id.image,
            corrected: id.printed_image.as_ref().is_some_and(|p| p != &id.image),
            value,
        }
    })
}
