//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Terms are kept in a `BTreeMap` keyed by [`MultiIndex`], whose ordering is
//! graded lexicographic: lower total degree first, and within one degree the
//! larger power of `x1` first (then `x2`, ...). So the monomials of degree at
//! most two in two variables come out as `1, x1, x2, x1^2, x1*x2, x2^2`.
//! Zero coefficients are never stored, which makes structural equality the
//! same as polynomial equality.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::rational::{parse_rational, JsonInt, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("variable x{index} out of range for dimension {dim}")]
    VariableOutOfRange { index: usize, dim: usize },
    #[error("invalid polynomial: {0}")]
    Invalid(String),
}

/// Exponent vector of a monomial `x^α`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    /// Unit vector `e_j` (0-based `j`).
    pub fn unit(dim: usize, j: usize) -> Self {
        let mut e = vec![0; dim];
        e[j] = 1;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), other.dim());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, k: u32) -> MultiIndex {
        MultiIndex(self.0.iter().map(|a| a * k).collect())
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Monomial value `t^α`.
    pub fn eval(&self, point: &[Rational]) -> Rational {
        let mut acc = Rational::one();
        for (e, t) in self.0.iter().zip(point) {
            if *e > 0 {
                acc *= num_traits::pow(t.clone(), *e as usize);
            }
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(point)
            .map(|(e, t)| t.powi(*e as i32))
            .product()
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// All exponent vectors of total degree exactly `k`, in graded-lex order.
pub fn monomials_of_degree(dim: usize, k: u32) -> Vec<MultiIndex> {
    fn rec(dim: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if prefix.len() + 1 == dim {
            prefix.push(left);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in (0..=left).rev() {
            prefix.push(e);
            rec(dim, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if dim == 0 {
        if k == 0 {
            out.push(MultiIndex(vec![]));
        }
        return out;
    }
    rec(dim, k, &mut Vec::with_capacity(dim), &mut out);
    out
}

/// All exponent vectors of total degree at most `n`, in graded-lex order.
pub fn monomials_up_to(dim: usize, n: u32) -> Vec<MultiIndex> {
    (0..=n).flat_map(|k| monomials_of_degree(dim, k)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<MultiIndex, Rational>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Polynomial {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Rational::one())
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        Self::monomial(MultiIndex::zero(dim), c)
    }

    /// The coordinate `x_{j+1}` (0-based `j`).
    pub fn var(dim: usize, j: usize) -> Self {
        Self::monomial(MultiIndex::unit(dim, j), Rational::one())
    }

    pub fn monomial(exp: MultiIndex, c: Rational) -> Self {
        let dim = exp.dim();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Polynomial { dim, terms }
    }

    /// Builds a polynomial from possibly repeated or zero terms.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (MultiIndex, Rational)>,
    {
        let mut p = Polynomial::zero(dim);
        for (e, c) in terms {
            if e.dim() != dim {
                return Err(PolyError::DimensionMismatch(dim, e.dim()));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: MultiIndex, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &MultiIndex) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&MultiIndex::zero(self.dim))
    }

    /// Total degree; `-1` for the zero polynomial.
    pub fn total_degree(&self) -> i64 {
        // the map is graded, so the last key has the largest degree
        self.terms
            .keys()
            .next_back()
            .map_or(-1, |e| e.degree() as i64)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(MultiIndex::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|k| k == d),
        }
    }

    fn check_dim(&self, other: &Polynomial) -> Result<(), PolyError> {
        if self.dim != other.dim {
            return Err(PolyError::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_dim(other)?;
        let mut out = Polynomial::zero(self.dim);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(e1.add(e2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.dim);
        }
        Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect(),
        }
    }

    /// Multiplies by the monomial `x^e`.
    pub fn shift_by(&self, e: &MultiIndex) -> Polynomial {
        Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(a, c)| (a.add(e), c.clone())).collect(),
        }
    }

    /// `p^n` by repeated squaring; `p^0 = 1`.
    pub fn pow(&self, mut n: u32) -> Polynomial {
        let mut result = Polynomial::one(self.dim);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational, PolyError> {
        if point.len() != self.dim {
            return Err(PolyError::DimensionMismatch(self.dim, point.len()));
        }
        Ok(self
            .terms
            .iter()
            .fold(Rational::zero(), |acc, (e, c)| acc + c * e.eval(point)))
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| crate::rational::to_f64(c) * e.eval_f64(point))
            .sum()
    }

    /// True when every coefficient is `≥ 0`.
    pub fn has_nonneg_coefficients(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    /// Parses with the dimension inferred from the highest variable index
    /// (at least 1).
    pub fn parse(text: &str) -> Result<Polynomial, PolyError> {
        let raw = parse_terms(text)?;
        let dim = raw
            .iter()
            .flat_map(|(_, f)| f.iter().map(|(v, _)| *v + 1))
            .max()
            .unwrap_or(1);
        assemble(dim, raw)
    }

    pub fn parse_with_dim(text: &str, dim: usize) -> Result<Polynomial, PolyError> {
        let raw = parse_terms(text)?;
        if let Some(v) = raw.iter().flat_map(|(_, f)| f.iter().map(|(v, _)| *v)).max() {
            if v >= dim {
                return Err(PolyError::VariableOutOfRange { index: v + 1, dim });
            }
        }
        assemble(dim, raw)
    }

    /// Same polynomial viewed in a larger ambient dimension.
    pub fn embed(&self, dim: usize) -> Result<Polynomial, PolyError> {
        if dim < self.dim
            && self.terms.keys().any(|e| e.0[dim..].iter().any(|&k| k > 0)) {
                return Err(PolyError::DimensionMismatch(self.dim, dim));
            }
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut v = e.0.clone();
                v.resize(dim, 0);
                (MultiIndex(v), c.clone())
            })
            .collect();
        Ok(Polynomial { dim, terms })
    }
}

type RawTerm = (Rational, Vec<(usize, u32)>);

fn assemble(dim: usize, raw: Vec<RawTerm>) -> Result<Polynomial, PolyError> {
    let mut p = Polynomial::zero(dim);
    for (c, factors) in raw {
        let mut e = vec![0u32; dim];
        for (v, k) in factors {
            e[v] += k;
        }
        p.add_term(MultiIndex(e), c);
    }
    Ok(p)
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, PolyError> {
        Err(PolyError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn digits(&mut self) -> &'a str {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap()
    }

    fn coefficient(&mut self) -> Result<Rational, PolyError> {
        let start = self.pos;
        self.digits();
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            self.digits();
        }
        self.skip_ws();
        if self.src.get(self.pos) == Some(&b'/') {
            self.pos += 1;
            self.skip_ws();
            if self.digits().is_empty() {
                return self.err("expected denominator");
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        parse_rational(text).map_err(|msg| PolyError::Syntax { pos: start, msg })
    }

    fn factor(&mut self) -> Result<(usize, u32), PolyError> {
        let var = match self.src.get(self.pos) {
            Some(b'x') => {
                self.pos += 1;
                let d = self.digits();
                if d.is_empty() {
                    0
                } else {
                    match d.parse::<usize>() {
                        Ok(i) if i >= 1 => i - 1,
                        _ => return self.err("variable index must be ≥ 1"),
                    }
                }
            }
            Some(b'y') => {
                self.pos += 1;
                1
            }
            Some(b'z') => {
                self.pos += 1;
                2
            }
            _ => return self.err("expected variable"),
        };
        let mut k = 1;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let d = self.digits();
            k = match d.parse::<u32>() {
                Ok(k) => k,
                Err(_) => return self.err("expected exponent"),
            };
        }
        Ok((var, k))
    }
}

fn parse_terms(text: &str) -> Result<Vec<RawTerm>, PolyError> {
    let mut lx = Lexer {
        src: text.as_bytes(),
        pos: 0,
    };
    let mut out = Vec::new();
    let mut first = true;
    loop {
        let mut negative = false;
        match lx.peek() {
            None if first => return lx.err("empty polynomial"),
            None => break,
            Some(b'+') => {
                lx.pos += 1;
            }
            Some(b'-') => {
                lx.pos += 1;
                negative = true;
            }
            Some(_) if first => {}
            Some(_) => return lx.err("expected '+' or '-'"),
        }
        first = false;
        let mut coeff = Rational::one();
        let mut factors = Vec::new();
        let mut have_coeff = false;
        match lx.peek() {
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                coeff = lx.coefficient()?;
                have_coeff = true;
            }
            _ => {}
        }
        loop {
            match lx.peek() {
                Some(b'*') if have_coeff || !factors.is_empty() => {
                    lx.pos += 1;
                    lx.skip_ws();
                    factors.push(lx.factor()?);
                }
                Some(b'x' | b'y' | b'z') => {
                    if !factors.is_empty() {
                        return lx.err("factors must be separated by '*'");
                    }
                    factors.push(lx.factor()?);
                }
                _ => break,
            }
        }
        if !have_coeff && factors.is_empty() {
            return lx.err("expected coefficient or variable");
        }
        if negative {
            coeff = -coeff;
        }
        out.push((coeff, factors));
    }
    Ok(out)
}

impl FromStr for Polynomial {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Polynomial::parse(s)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let vars: Vec<String> = e
                .0
                .iter()
                .enumerate()
                .filter(|(_, k)| **k > 0)
                .map(|(v, k)| {
                    if *k == 1 {
                        format!("x{}", v + 1)
                    } else {
                        format!("x{}^{}", v + 1, k)
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{abs}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    /// Panics on dimension mismatch; use [`Polynomial::checked_add`] otherwise.
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("polynomial dimension mismatch")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.checked_sub(rhs).expect("polynomial dimension mismatch")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("polynomial dimension mismatch")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: Vec<u32>,
    num: JsonInt,
    den: JsonInt,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    dim: usize,
    terms: Vec<TermJson>,
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyJson {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermJson {
                    exp: e.0.clone(),
                    num: JsonInt(c.numer().clone()),
                    den: JsonInt(c.denom().clone()),
                })
                .collect(),
        }
        .serialize(s)
    }
}

/// Accepts the structured `{"dim", "terms"}` form or a string in the text
/// grammar.
impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Json(PolyJson),
        }
        use serde::de::Error;
        match Repr::deserialize(d)? {
            Repr::Text(t) => Polynomial::parse(&t).map_err(D::Error::custom),
            Repr::Json(j) => {
                let mut terms = Vec::with_capacity(j.terms.len());
                for t in j.terms {
                    if t.den.0.is_zero() {
                        return Err(D::Error::custom("zero denominator"));
                    }
                    if t.exp.len() != j.dim {
                        return Err(D::Error::custom(format!(
                            "exponent length {} does not match dim {}",
                            t.exp.len(),
                            j.dim
                        )));
                    }
                    terms.push((MultiIndex(t.exp), BigRational::new(t.num.0, t.den.0)));
                }
                Polynomial::from_terms(j.dim, terms).map_err(D::Error::custom)
            }
        }
    }
}

/// Binomial coefficient as an exact integer.
pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}
