//! Polynomials and rational functions in two commuting variables `x`, `z`.
//!
//! A [`RationalFunction2`] keeps its denominator as a product of normalized
//! factors with multiplicities. Nothing is ever reduced by a gcd; only
//! powers of `x` and `z` are cancelled. Differentiating raises each factor's
//! exponent by one instead of squaring the whole denominator, which keeps
//! third-order operators on the examples at a modest size.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Signed, Zero};
use thiserror::Error;

use crate::freealg::{format_scalar, Scalar};

/// Polynomial in `x` and `z`: map from `(x power, z power)` to coefficient.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BiPoly {
    terms: BTreeMap<(u32, u32), Scalar>,
}

impl BiPoly {
    pub fn zero() -> BiPoly {
        BiPoly::default()
    }

    pub fn one() -> BiPoly {
        BiPoly::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> BiPoly {
        BiPoly::monomial(c, 0, 0)
    }

    pub fn monomial(c: Scalar, i: u32, j: u32) -> BiPoly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        BiPoly { terms }
    }

    pub fn x() -> BiPoly {
        BiPoly::monomial(Scalar::one(), 1, 0)
    }

    pub fn z() -> BiPoly {
        BiPoly::monomial(Scalar::one(), 0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), &Scalar)> {
        self.terms.iter().map(|(&k, v)| (k, v))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The value when the polynomial is constant.
    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    pub fn uses_x(&self) -> bool {
        self.terms.keys().any(|&(i, _)| i > 0)
    }

    pub fn uses_z(&self) -> bool {
        self.terms.keys().any(|&(_, j)| j > 0)
    }

    fn add_term(&mut self, k: (u32, u32), c: Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(k).or_insert_with(Scalar::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn scale(&self, s: &Scalar) -> BiPoly {
        if s.is_zero() {
            return BiPoly::zero();
        }
        BiPoly {
            terms: self.terms.iter().map(|(&k, v)| (k, v * s)).collect(),
        }
    }

    /// `x^a z^b * self`.
    pub fn shift(&self, a: u32, b: u32) -> BiPoly {
        BiPoly {
            terms: self
                .terms
                .iter()
                .map(|(&(i, j), v)| ((i + a, j + b), v.clone()))
                .collect(),
        }
    }

    /// Smallest `x` and `z` exponents over the support.
    pub fn monomial_content(&self) -> (u32, u32) {
        let a = self.terms.keys().map(|k| k.0).min().unwrap_or(0);
        let b = self.terms.keys().map(|k| k.1).min().unwrap_or(0);
        (a, b)
    }

    /// Divides by `x^a z^b`; the caller guarantees divisibility.
    fn unshift(&self, a: u32, b: u32) -> BiPoly {
        BiPoly {
            terms: self
                .terms
                .iter()
                .map(|(&(i, j), v)| ((i - a, j - b), v.clone()))
                .collect(),
        }
    }

    pub fn dx(&self) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&(i, j), v) in &self.terms {
            if i > 0 {
                out.add_term((i - 1, j), v * Scalar::from_integer(i.into()));
            }
        }
        out
    }

    pub fn dz(&self) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&(i, j), v) in &self.terms {
            if j > 0 {
                out.add_term((i, j - 1), v * Scalar::from_integer(j.into()));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> BiPoly {
        (0..k).fold(BiPoly::one(), |acc, _| &acc * self)
    }

    fn leading_coeff(&self) -> Option<&Scalar> {
        self.terms.values().next_back()
    }
}

impl std::ops::Add for &BiPoly {
    type Output = BiPoly;

    fn add(self, rhs: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (&k, v) in &rhs.terms {
            out.add_term(k, v.clone());
        }
        out
    }
}

impl std::ops::Sub for &BiPoly {
    type Output = BiPoly;

    fn sub(self, rhs: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (&k, v) in &rhs.terms {
            out.add_term(k, -v.clone());
        }
        out
    }
}

impl std::ops::Neg for &BiPoly {
    type Output = BiPoly;

    fn neg(self) -> BiPoly {
        self.scale(&-Scalar::one())
    }
}

impl std::ops::Mul for &BiPoly {
    type Output = BiPoly;

    fn mul(self, rhs: &BiPoly) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&(i, j), a) in &self.terms {
            for (&(k, l), b) in &rhs.terms {
                out.add_term((i + k, j + l), a * b);
            }
        }
        out
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, i: u32, j: u32) -> fmt::Result {
    let mut parts = Vec::new();
    for (name, e) in [("x", i), ("z", j)] {
        match e {
            0 => {}
            1 => parts.push(name.to_string()),
            _ => parts.push(format!("{name}^{e}")),
        }
    }
    write!(f, "{}", parts.join("*"))
}

impl fmt::Display for BiPoly {
    /// Highest-order terms first, e.g. `x^2*z - 2*x + 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (&(i, j), c)) in self.terms.iter().rev().enumerate() {
            let abs = c.abs();
            match (n, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if i == 0 && j == 0 {
                write!(f, "{}", format_scalar(&abs))?;
            } else {
                if !abs.is_one() {
                    write!(f, "{}*", format_scalar(&abs))?;
                }
                write_monomial(f, i, j)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BiPoly({self})")
    }
}

/// `num / prod(factor^exp)`. Factors are nonconstant, have a leading
/// coefficient of one, and are either `x`, `z`, or free of monomial content.
#[derive(Clone)]
pub struct RationalFunction2 {
    num: BiPoly,
    den: BTreeMap<BiPoly, u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatFunError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
}

/// Splits a nonzero polynomial into `c * x^a * z^b * g` and returns `c` and
/// the factor multiset.
fn factorize_trivially(p: &BiPoly) -> (Scalar, BTreeMap<BiPoly, u32>) {
    let (a, b) = p.monomial_content();
    let g = p.unshift(a, b);
    let mut factors = BTreeMap::new();
    if a > 0 {
        factors.insert(BiPoly::x(), a);
    }
    if b > 0 {
        factors.insert(BiPoly::z(), b);
    }
    let c = g.leading_coeff().expect("nonzero polynomial").clone();
    if g.as_constant().is_none() {
        factors.insert(g.scale(&c.recip()), 1);
    }
    (c, factors)
}

fn product(factors: &BTreeMap<BiPoly, u32>) -> BiPoly {
    factors
        .iter()
        .fold(BiPoly::one(), |acc, (f, &e)| &acc * &f.pow(e))
}

/// Product of the factors of `have` missing from `want` (as multisets):
/// `prod(want) / prod(have)` when `have` divides `want`.
fn cofactor(want: &BTreeMap<BiPoly, u32>, have: &BTreeMap<BiPoly, u32>) -> BiPoly {
    want.iter().fold(BiPoly::one(), |acc, (f, &e)| {
        let h = have.get(f).copied().unwrap_or(0);
        &acc * &f.pow(e - h)
    })
}

fn lcm(a: &BTreeMap<BiPoly, u32>, b: &BTreeMap<BiPoly, u32>) -> BTreeMap<BiPoly, u32> {
    let mut out = a.clone();
    for (f, &e) in b {
        let slot = out.entry(f.clone()).or_insert(0);
        *slot = (*slot).max(e);
    }
    out
}

impl RationalFunction2 {
    pub fn zero() -> RationalFunction2 {
        RationalFunction2::from_poly(BiPoly::zero())
    }

    pub fn one() -> RationalFunction2 {
        RationalFunction2::from_poly(BiPoly::one())
    }

    pub fn from_poly(p: BiPoly) -> RationalFunction2 {
        RationalFunction2 {
            num: p,
            den: BTreeMap::new(),
        }
    }

    pub fn constant(c: Scalar) -> RationalFunction2 {
        RationalFunction2::from_poly(BiPoly::constant(c))
    }

    pub fn new(num: BiPoly, den: BiPoly) -> Result<RationalFunction2, RatFunError> {
        if den.is_zero() {
            return Err(RatFunError::DivisionByZero);
        }
        let (c, den) = factorize_trivially(&den);
        let mut out = RationalFunction2 {
            num: num.scale(&c.recip()),
            den,
        };
        out.cancel_monomials();
        Ok(out)
    }

    pub fn numerator(&self) -> &BiPoly {
        &self.num
    }

    /// The denominator multiplied out.
    pub fn denominator(&self) -> BiPoly {
        product(&self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn uses_x(&self) -> bool {
        self.num.uses_x() || self.den.keys().any(BiPoly::uses_x)
    }

    pub fn uses_z(&self) -> bool {
        self.num.uses_z() || self.den.keys().any(BiPoly::uses_z)
    }

    fn cancel_monomials(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        let (a, b) = self.num.monomial_content();
        let ex = self.den.get(&BiPoly::x()).copied().unwrap_or(0).min(a);
        let ez = self.den.get(&BiPoly::z()).copied().unwrap_or(0).min(b);
        if ex == 0 && ez == 0 {
            return;
        }
        self.num = self.num.unshift(ex, ez);
        for (var, e) in [(BiPoly::x(), ex), (BiPoly::z(), ez)] {
            if e > 0 {
                let slot = self.den.get_mut(&var).expect("present");
                *slot -= e;
                if *slot == 0 {
                    self.den.remove(&var);
                }
            }
        }
    }

    pub fn scale(&self, s: &Scalar) -> RationalFunction2 {
        if s.is_zero() {
            return RationalFunction2::zero();
        }
        RationalFunction2 {
            num: self.num.scale(s),
            den: self.den.clone(),
        }
    }

    pub fn add(&self, other: &RationalFunction2) -> RationalFunction2 {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        let den = lcm(&self.den, &other.den);
        let num = &(&self.num * &cofactor(&den, &self.den)) + &(&other.num * &cofactor(&den, &other.den));
        let mut out = RationalFunction2 { num, den };
        out.cancel_monomials();
        out
    }

    pub fn sub(&self, other: &RationalFunction2) -> RationalFunction2 {
        self.add(&other.scale(&-Scalar::one()))
    }

    pub fn mul(&self, other: &RationalFunction2) -> RationalFunction2 {
        if self.is_zero() || other.is_zero() {
            return RationalFunction2::zero();
        }
        let mut den = self.den.clone();
        for (f, &e) in &other.den {
            *den.entry(f.clone()).or_insert(0) += e;
        }
        let mut out = RationalFunction2 {
            num: &self.num * &other.num,
            den,
        };
        out.cancel_monomials();
        out
    }

    pub fn recip(&self) -> Result<RationalFunction2, RatFunError> {
        if self.is_zero() {
            return Err(RatFunError::DivisionByZero);
        }
        let (c, den) = factorize_trivially(&self.num);
        let mut out = RationalFunction2 {
            num: product(&self.den).scale(&c.recip()),
            den,
        };
        out.cancel_monomials();
        Ok(out)
    }

    pub fn div(&self, other: &RationalFunction2) -> Result<RationalFunction2, RatFunError> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn powi(&self, e: i32) -> Result<RationalFunction2, RatFunError> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        Ok((0..e.unsigned_abs()).fold(RationalFunction2::one(), |acc, _| acc.mul(&base)))
    }

    /// Derivative along `d` (a derivation on polynomials). With
    /// `D = prod f_i^e_i` and `F = prod f_i`,
    /// `(n/D)' = (n' F - n sum_i e_i f_i' F/f_i) / (D F)`.
    fn derive(&self, d: impl Fn(&BiPoly) -> BiPoly) -> RationalFunction2 {
        if self.den.is_empty() {
            return RationalFunction2::from_poly(d(&self.num));
        }
        let radical: BTreeMap<BiPoly, u32> = self.den.keys().map(|f| (f.clone(), 1)).collect();
        let f_all = product(&radical);
        let mut num = &d(&self.num) * &f_all;
        for (f, &e) in &self.den {
            let df = d(f);
            if df.is_zero() {
                continue;
            }
            let mut others = radical.clone();
            others.remove(f);
            let term = &(&self.num * &df) * &product(&others);
            num = &num - &term.scale(&Scalar::from_integer(e.into()));
        }
        let den = self.den.iter().map(|(f, &e)| (f.clone(), e + 1)).collect();
        let mut out = RationalFunction2 { num, den };
        out.cancel_monomials();
        out
    }

    pub fn dx(&self) -> RationalFunction2 {
        self.derive(BiPoly::dx)
    }

    pub fn dz(&self) -> RationalFunction2 {
        self.derive(BiPoly::dz)
    }

    /// `x * self` and `z * self`, used by the exponential-kernel calculus.
    pub fn times_x(&self) -> RationalFunction2 {
        self.mul(&RationalFunction2::from_poly(BiPoly::x()))
    }

    pub fn times_z(&self) -> RationalFunction2 {
        self.mul(&RationalFunction2::from_poly(BiPoly::z()))
    }

    pub fn parse(text: &str) -> Result<RationalFunction2, RatFunError> {
        let mut p = Parser {
            src: text.as_bytes(),
            pos: 0,
        };
        let out = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return p.err("unexpected trailing input");
        }
        Ok(out)
    }
}

impl PartialEq for RationalFunction2 {
    /// Cross-multiplied equality over the common multiple of the
    /// denominators.
    fn eq(&self, other: &RationalFunction2) -> bool {
        let den = lcm(&self.den, &other.den);
        &self.num * &cofactor(&den, &self.den) == &other.num * &cofactor(&den, &other.den)
    }
}

impl fmt::Display for RationalFunction2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        let parts: Vec<String> = self
            .den
            .iter()
            .map(|(p, &e)| {
                let base = if p.num_terms() == 1 {
                    p.to_string()
                } else {
                    format!("({p})")
                };
                if e == 1 {
                    base
                } else {
                    format!("{base}^{e}")
                }
            })
            .collect();
        write!(f, "({})/({})", self.num, parts.join("*"))
    }
}

impl fmt::Debug for RationalFunction2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction2({self})")
    }
}

/// Grammar: sums and differences of products and quotients of powers; a
/// power is an atom (integer, `x`, `z`, or parenthesised expression) with an
/// optional integer exponent, which may be negative (`z^-1`, `z^(-3)`).
struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, message: &str) -> Result<T, RatFunError> {
        Err(RatFunError::Syntax {
            pos: self.pos,
            message: message.to_string(),
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

    fn integer(&mut self) -> Result<num::BigInt, RatFunError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        Ok(s.parse().expect("digits"))
    }

    fn expr(&mut self) -> Result<RationalFunction2, RatFunError> {
        let mut acc = RationalFunction2::zero();
        let mut negative = self.eat(b'-');
        if !negative {
            self.eat(b'+');
        }
        loop {
            let t = self.term()?;
            acc = if negative { acc.sub(&t) } else { acc.add(&t) };
            match self.peek() {
                Some(b'+') => negative = false,
                Some(b'-') => negative = true,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<RationalFunction2, RatFunError> {
        let mut acc = self.power()?;
        loop {
            if self.eat(b'*') {
                acc = acc.mul(&self.power()?);
            } else if self.eat(b'/') {
                let d = self.power()?;
                acc = acc.div(&d).or_else(|_| self.err("division by zero"))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn exponent(&mut self) -> Result<i32, RatFunError> {
        let paren = self.eat(b'(');
        let neg = self.eat(b'-');
        let e = self.integer()?;
        if paren && !self.eat(b')') {
            return self.err("expected `)`");
        }
        let e: i32 = match i32::try_from(e) {
            Ok(e) => e,
            Err(_) => return self.err("exponent too large"),
        };
        Ok(if neg { -e } else { e })
    }

    fn power(&mut self) -> Result<RationalFunction2, RatFunError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let e = self.exponent()?;
            return base.powi(e).or_else(|_| self.err("zero to a negative power"));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RationalFunction2, RatFunError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            Some(b'x') => {
                self.pos += 1;
                Ok(RationalFunction2::from_poly(BiPoly::x()))
            }
            Some(b'z') => {
                self.pos += 1;
                Ok(RationalFunction2::from_poly(BiPoly::z()))
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(self.power()?.scale(&-Scalar::one()))
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(RationalFunction2::constant(Scalar::from_integer(n)))
            }
            _ => self.err("expected a number, `x`, `z` or `(`"),
        }
    }
}
