//! The free algebra `Q<x_1, ..., x_n>`: words, polynomials, enumeration and a
//! small text grammar.
//!
//! Words are ordered graded-lexicographically on the declared variable order
//! (shorter words first, then letter by letter). Every ordered container in
//! this module uses that order, which is what makes row reduction downstream
//! deterministic.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::{BigInt, BigRational, One, Signed, Zero};
use thiserror::Error;

/// Exact rational coefficient. Always kept in lowest terms with a positive
/// denominator.
pub type Scalar = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("polynomials belong to different variable contexts")]
    ContextMismatch,
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown variable `{name}` at position {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("invalid variable name `{0}`")]
    InvalidVariable(String),
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
}

/// Parses `p`, `-p` or `p/q` into a scalar.
pub fn parse_scalar(text: &str) -> Option<Scalar> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

/// Formats a scalar as `p` or `p/q`.
pub fn format_scalar(s: &Scalar) -> String {
    if s.denom().is_one() {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

/// Degree of a polynomial. The zero polynomial has degree [`Degree::NegInfinity`],
/// which sorts below every finite degree and absorbs addition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(usize),
}

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }
}

impl std::ops::Add for Degree {
    type Output = Degree;

    fn add(self, rhs: Degree) -> Degree {
        match (self, rhs) {
            (Degree::Finite(a), Degree::Finite(b)) => Degree::Finite(a + b),
            _ => Degree::NegInfinity,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// An ordered list of variable names. Position in the list is the variable's
/// index and defines the letter order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarContext {
    names: Vec<String>,
}

fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl VarContext {
    pub fn new<I, S>(names: I) -> Result<Arc<VarContext>, AlgebraError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out: Vec<String> = Vec::new();
        for name in names {
            let name = name.into();
            if !is_identifier(&name) {
                return Err(AlgebraError::InvalidVariable(name));
            }
            if out.contains(&name) {
                return Err(AlgebraError::DuplicateVariable(name));
            }
            out.push(name);
        }
        if out.len() > u16::MAX as usize {
            return Err(AlgebraError::InvalidVariable("too many variables".into()));
        }
        Ok(Arc::new(VarContext { names: out }))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    /// Renders a word with this context's names, e.g. `a0*a1^2`. The empty
    /// word renders as `1`.
    pub fn format_word(&self, word: &Word) -> String {
        if word.is_empty() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        let letters = word.letters();
        let mut i = 0;
        while i < letters.len() {
            let mut j = i;
            while j < letters.len() && letters[j] == letters[i] {
                j += 1;
            }
            let name = self.name(letters[i] as usize);
            if j - i == 1 {
                parts.push(name.to_string());
            } else {
                parts.push(format!("{name}^{}", j - i));
            }
            i = j;
        }
        parts.join("*")
    }
}

/// A noncommutative monomial. The empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<u16>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn letter(index: usize) -> Word {
        Word(vec![index as u16])
    }

    pub fn from_letters<I: IntoIterator<Item = usize>>(letters: I) -> Word {
        Word(letters.into_iter().map(|l| l as u16).collect())
    }

    pub fn letters(&self) -> &[u16] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.0);
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    /// `self` repeated `k` times.
    pub fn pow(&self, k: usize) -> Word {
        Word(self.0.repeat(k))
    }

    pub fn push(&mut self, letter: usize) {
        self.0.push(letter as u16);
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Word) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Word) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Number of words of length at most `max_len` in `n_vars` letters.
pub fn word_count_up_to(n_vars: usize, max_len: usize) -> usize {
    (0..=max_len).map(|k| n_vars.pow(k as u32)).sum()
}

/// All words of length at most `max_len`, in graded lexicographic order.
pub fn words_up_to(n_vars: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut start = 0;
    for _ in 0..max_len {
        let end = out.len();
        for i in start..end {
            for v in 0..n_vars {
                let mut w = out[i].clone();
                w.push(v);
                out.push(w);
            }
        }
        start = end;
    }
    out
}

/// Dense index of a word among all words of length `<= max_len`; the index
/// order agrees with the graded lexicographic order.
#[derive(Debug, Clone)]
pub struct WordIndex {
    n_vars: usize,
    offsets: Vec<usize>,
}

impl WordIndex {
    pub fn new(n_vars: usize, max_len: usize) -> WordIndex {
        let mut offsets = Vec::with_capacity(max_len + 2);
        let mut acc = 0usize;
        for k in 0..=max_len + 1 {
            offsets.push(acc);
            acc += n_vars.pow(k as u32);
        }
        WordIndex { n_vars, offsets }
    }

    pub fn max_len(&self) -> usize {
        self.offsets.len() - 2
    }

    /// Number of indexed words of length `<= len`.
    pub fn count_up_to(&self, len: usize) -> usize {
        self.offsets[len + 1]
    }

    pub fn index(&self, word: &Word) -> usize {
        let within = word
            .letters()
            .iter()
            .fold(0usize, |acc, &l| acc * self.n_vars + l as usize);
        self.offsets[word.len()] + within
    }

    pub fn word(&self, index: usize) -> Word {
        let len = self.offsets.partition_point(|&o| o <= index) - 1;
        let mut rem = index - self.offsets[len];
        let mut letters = vec![0u16; len];
        for slot in letters.iter_mut().rev() {
            *slot = (rem % self.n_vars) as u16;
            rem /= self.n_vars;
        }
        Word(letters)
    }

    pub fn len_of(&self, index: usize) -> usize {
        self.offsets.partition_point(|&o| o <= index) - 1
    }
}

/// A finite `Q`-linear combination of words. Zero coefficients are never stored.
#[derive(Debug, Clone)]
pub struct FreePolynomial {
    ctx: Arc<VarContext>,
    terms: BTreeMap<Word, Scalar>,
}

impl PartialEq for FreePolynomial {
    fn eq(&self, other: &FreePolynomial) -> bool {
        self.same_context(other) && self.terms == other.terms
    }
}

impl FreePolynomial {
    pub fn zero(ctx: &Arc<VarContext>) -> FreePolynomial {
        FreePolynomial {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ctx: &Arc<VarContext>) -> FreePolynomial {
        FreePolynomial::monomial(ctx, Word::empty(), Scalar::one())
    }

    pub fn var(ctx: &Arc<VarContext>, index: usize) -> FreePolynomial {
        assert!(index < ctx.len(), "variable index out of range");
        FreePolynomial::monomial(ctx, Word::letter(index), Scalar::one())
    }

    pub fn monomial(ctx: &Arc<VarContext>, word: Word, coeff: Scalar) -> FreePolynomial {
        let mut p = FreePolynomial::zero(ctx);
        if !coeff.is_zero() {
            p.terms.insert(word, coeff);
        }
        p
    }

    pub fn from_terms<I>(ctx: &Arc<VarContext>, terms: I) -> FreePolynomial
    where
        I: IntoIterator<Item = (Word, Scalar)>,
    {
        let mut p = FreePolynomial::zero(ctx);
        for (w, c) in terms {
            p.add_term(w, c);
        }
        p
    }

    pub fn context(&self) -> &Arc<VarContext> {
        &self.ctx
    }

    fn same_context(&self, other: &FreePolynomial) -> bool {
        Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx == other.ctx
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, word: &Word) -> Scalar {
        self.terms.get(word).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Degree {
        match self.terms.keys().next_back() {
            Some(w) => Degree::Finite(w.len()),
            None => Degree::NegInfinity,
        }
    }

    /// Largest word of the support in graded lexicographic order.
    pub fn leading_word(&self) -> Option<&Word> {
        self.terms.keys().next_back()
    }

    fn add_term(&mut self, word: Word, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn checked_add(&self, other: &FreePolynomial) -> Result<FreePolynomial, AlgebraError> {
        if !self.same_context(other) {
            return Err(AlgebraError::ContextMismatch);
        }
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &FreePolynomial) -> Result<FreePolynomial, AlgebraError> {
        self.checked_add(&other.scale(&-Scalar::one()))
    }

    pub fn checked_mul(&self, other: &FreePolynomial) -> Result<FreePolynomial, AlgebraError> {
        if !self.same_context(other) {
            return Err(AlgebraError::ContextMismatch);
        }
        let mut out = FreePolynomial::zero(&self.ctx);
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                out.add_term(u.concat(v), a * b);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Scalar) -> FreePolynomial {
        if s.is_zero() {
            return FreePolynomial::zero(&self.ctx);
        }
        FreePolynomial {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(w, c)| (w.clone(), c * s)).collect(),
        }
    }

    /// `left * self * right` for words, which keeps coefficients untouched.
    pub fn flank(&self, left: &Word, right: &Word) -> FreePolynomial {
        FreePolynomial {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (left.concat(w).concat(right), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, k: usize) -> FreePolynomial {
        let mut out = FreePolynomial::one(&self.ctx);
        for _ in 0..k {
            out = out.checked_mul(self).expect("same context");
        }
        out
    }

    /// Set of variable indices occurring in the support.
    pub fn variables(&self) -> Vec<usize> {
        let mut seen: Vec<usize> = self
            .terms
            .keys()
            .flat_map(|w| w.letters().iter().map(|&l| l as usize))
            .collect();
        seen.sort_unstable();
        seen.dedup();
        seen
    }

    pub fn parse(ctx: &Arc<VarContext>, text: &str) -> Result<FreePolynomial, AlgebraError> {
        Parser::new(ctx, text).parse_poly()
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl std::ops::$tr<&FreePolynomial> for &FreePolynomial {
            type Output = FreePolynomial;

            /// Panics if the operands live in different variable contexts.
            fn $method(self, rhs: &FreePolynomial) -> FreePolynomial {
                self.$checked(rhs).expect("variable context mismatch")
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl fmt::Display for FreePolynomial {
    /// Terms are written leading word first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if w.is_empty() {
                write!(f, "{}", format_scalar(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", self.ctx.format_word(w))?;
            } else {
                write!(f, "{}*{}", format_scalar(&abs), self.ctx.format_word(w))?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    ctx: &'a Arc<VarContext>,
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(ctx: &'a Arc<VarContext>, text: &'a str) -> Parser<'a> {
        Parser {
            ctx,
            src: text.as_bytes(),
            pos: 0,
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, AlgebraError> {
        Err(AlgebraError::Syntax {
            pos: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Result<BigInt, AlgebraError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("digits parse"))
    }

    fn rational(&mut self) -> Result<Scalar, AlgebraError> {
        let num = self.digits()?;
        if self.eat(b'/') {
            let den = self.digits()?;
            if den.is_zero() {
                return self.err("zero denominator");
            }
            Ok(BigRational::new(num, den))
        } else {
            Ok(BigRational::from_integer(num))
        }
    }

    fn factor(&mut self) -> Result<Word, AlgebraError> {
        self.skip_ws();
        let start = self.pos;
        match self.src.get(self.pos) {
            Some(c) if c.is_ascii_alphabetic() => {}
            _ => return self.err("expected a variable"),
        }
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii name");
        let index = self
            .ctx
            .index_of(name)
            .ok_or_else(|| AlgebraError::UnknownVariable {
                name: name.to_string(),
                pos: start,
            })?;
        let mut exp = 1usize;
        if self.eat(b'^') {
            let e = self.digits()?;
            exp = match usize::try_from(e) {
                Ok(e) if e >= 1 => e,
                _ => return self.err("exponent must be a positive integer"),
            };
        }
        Ok(Word::letter(index).pow(exp))
    }

    fn term(&mut self) -> Result<(Word, Scalar), AlgebraError> {
        let mut coeff = Scalar::one();
        let mut word = Word::empty();
        if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            coeff = self.rational()?;
            if !self.eat(b'*') {
                return Ok((word, coeff));
            }
        }
        word = word.concat(&self.factor()?);
        while self.eat(b'*') {
            word = word.concat(&self.factor()?);
        }
        Ok((word, coeff))
    }

    fn parse_poly(mut self) -> Result<FreePolynomial, AlgebraError> {
        let mut out = FreePolynomial::zero(self.ctx);
        let mut sign = Scalar::one();
        if self.eat(b'-') {
            sign = -sign;
        } else {
            self.eat(b'+');
        }
        loop {
            let (w, c) = self.term()?;
            out.add_term(w, c * &sign);
            match self.peek() {
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    sign = Scalar::one();
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -Scalar::one();
                }
                Some(_) => return self.err("expected `+`, `-` or end of input"),
            }
        }
        Ok(out)
    }
}
