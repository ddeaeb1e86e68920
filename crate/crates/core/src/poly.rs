//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Terms are kept in a map from exponent vectors to nonzero coefficients,
//! ordered graded-lexicographically so printing is canonical. This is the
//! substrate every other module computes in: vector-field components,
//! chart substitutions and the univariate kernel polynomials all reduce
//! to operations defined here.

use num::{BigInt, BigRational, One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

/// Exact rational scalar used throughout the crate.
pub type Rat = BigRational;

/// Hard cap on the number of variables (the formulas never need more).
pub const MAX_VARS: usize = 16;

/// Convenience constructor for small rationals.
pub fn rat(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// Convenience constructor for small fractions.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("variable z{index} out of range (num_vars = {num_vars})")]
    VarOutOfRange { index: usize, num_vars: usize },
    #[error("denominator zero at byte {offset}")]
    ZeroDenominator { offset: usize },
    #[error("substitution image count {got} does not match num_vars {want}")]
    ImageCountMismatch { got: usize, want: usize },
    #[error("term {term} not divisible by variable {var} to power {power}")]
    NotDivisible {
        term: String,
        var: usize,
        power: u32,
    },
    #[error("too many variables: {0} > {MAX_VARS}")]
    TooManyVars(usize),
}

/// Exponent vector of a single term; one entry per variable.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u16>);

impl Monomial {
    pub fn constant(num_vars: usize) -> Self {
        Monomial(vec![0; num_vars])
    }

    pub fn var(num_vars: usize, index: usize) -> Self {
        let mut e = vec![0; num_vars];
        e[index] = 1;
        Monomial(e)
    }

    /// Sum of all exponents.
    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    /// Sum of the exponents of the first `d` variables.
    pub fn prefix_degree(&self, d: usize) -> u32 {
        self.0.iter().take(d).map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
                .collect(),
        )
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    /// Graded-lexicographic order: total degree first, then lexicographic.
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

/// Sparse multivariate polynomial over the rationals.
///
/// Invariants: no stored zero coefficient; every exponent vector has
/// length `num_vars`; the zero polynomial is the empty map.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiPoly {
    num_vars: usize,
    terms: BTreeMap<Monomial, Rat>,
}

impl MultiPoly {
    pub fn zero(num_vars: usize) -> Self {
        assert!(num_vars <= MAX_VARS, "too many variables");
        MultiPoly {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, c: Rat) -> Self {
        let mut p = Self::zero(num_vars);
        p.add_term(Monomial::constant(num_vars), c);
        p
    }

    pub fn one(num_vars: usize) -> Self {
        Self::constant(num_vars, Rat::one())
    }

    /// The variable `z_{index+1}` as a polynomial.
    pub fn var(num_vars: usize, index: usize) -> Self {
        assert!(index < num_vars);
        let mut p = Self::zero(num_vars);
        p.add_term(Monomial::var(num_vars, index), Rat::one());
        p
    }

    /// A single term `c * z^exps`.
    pub fn monomial(num_vars: usize, exps: &[u16], c: Rat) -> Self {
        assert_eq!(exps.len(), num_vars);
        let mut p = Self::zero(num_vars);
        p.add_term(Monomial(exps.to_vec()), c);
        p
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Iterate terms in graded-lex ascending order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    /// Maximum total degree, or `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    /// Coefficient of an exponent vector (zero if absent).
    pub fn coeff(&self, exps: &[u16]) -> Rat {
        self.terms
            .get(&Monomial(exps.to_vec()))
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    /// Add `c * z^m` in place, keeping the no-zero-coefficient invariant.
    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        debug_assert_eq!(m.0.len(), self.num_vars);
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.num_vars);
        }
        MultiPoly {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.num_vars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Replace variable `i` by `images[i]`, fully expanded.
    ///
    /// All images must share one variable count; the result lives in that
    /// variable count. This is the workhorse behind every chart map.
    pub fn substitute(&self, images: &[MultiPoly]) -> Result<MultiPoly, PolyError> {
        if images.len() != self.num_vars {
            return Err(PolyError::ImageCountMismatch {
                got: images.len(),
                want: self.num_vars,
            });
        }
        let out_vars = images.first().map_or(0, |p| p.num_vars);
        assert!(images.iter().all(|p| p.num_vars == out_vars));
        // Cache powers of each image up to the largest exponent used.
        let mut max_exp = vec![0u16; self.num_vars];
        for m in self.terms.keys() {
            for (i, &e) in m.0.iter().enumerate() {
                max_exp[i] = max_exp[i].max(e);
            }
        }
        let mut powers: Vec<Vec<MultiPoly>> = Vec::with_capacity(self.num_vars);
        for (i, img) in images.iter().enumerate() {
            let mut tower = vec![MultiPoly::one(out_vars)];
            for e in 1..=max_exp[i] {
                let next = &tower[(e - 1) as usize] * img;
                tower.push(next);
            }
            powers.push(tower);
        }
        let mut out = MultiPoly::zero(out_vars);
        for (m, c) in &self.terms {
            let mut prod = MultiPoly::constant(out_vars, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    prod = &prod * &powers[i][e as usize];
                }
            }
            out = &out + &prod;
        }
        Ok(out)
    }

    /// Minimum over terms of the degree in the first `d` variables;
    /// `None` means +infinity (zero polynomial).
    pub fn vanish_order(&self, d: usize) -> Option<u32> {
        assert!(d >= 1 && d <= self.num_vars);
        self.terms.keys().map(|m| m.prefix_degree(d)).min()
    }

    /// Minimum exponent of a single variable over all terms; `None` for zero.
    pub fn vanish_order_var(&self, var: usize) -> Option<u32> {
        assert!(var < self.num_vars);
        self.terms.keys().map(|m| m.0[var] as u32).min()
    }

    /// Exact division by `z_var^e`.
    pub fn divide_monomial_power(&self, var: usize, e: u32) -> Result<MultiPoly, PolyError> {
        assert!(var < self.num_vars);
        let mut out = MultiPoly::zero(self.num_vars);
        for (m, c) in &self.terms {
            if (m.0[var] as u32) < e {
                return Err(PolyError::NotDivisible {
                    term: format_term(m, c, false),
                    var,
                    power: e,
                });
            }
            let mut exps = m.0.clone();
            exps[var] -= e as u16;
            out.add_term(Monomial(exps), c.clone());
        }
        Ok(out)
    }

    /// Formal partial derivative with respect to `z_var`.
    pub fn derivative(&self, var: usize) -> MultiPoly {
        assert!(var < self.num_vars);
        let mut out = MultiPoly::zero(self.num_vars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e > 0 {
                let mut exps = m.0.clone();
                exps[var] = e - 1;
                out.add_term(Monomial(exps), c * rat(e as i64));
            }
        }
        out
    }

    /// Set the listed variables to zero, keeping the variable count.
    pub fn restrict_zero(&self, vars: &[usize]) -> MultiPoly {
        let mut out = MultiPoly::zero(self.num_vars);
        for (m, c) in &self.terms {
            if vars.iter().all(|&v| m.0[v] == 0) {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    /// Coefficient of `z_var^e` as a polynomial in the remaining variables
    /// (the variable count is preserved; the extracted variable is flattened).
    pub fn coeff_of_var_power(&self, var: usize, e: u16) -> MultiPoly {
        let mut out = MultiPoly::zero(self.num_vars);
        for (m, c) in &self.terms {
            if m.0[var] == e {
                let mut exps = m.0.clone();
                exps[var] = 0;
                out.add_term(Monomial(exps), c.clone());
            }
        }
        out
    }

    /// Evaluate at a full point.
    pub fn eval(&self, point: &[Rat]) -> Rat {
        assert_eq!(point.len(), self.num_vars);
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t *= &point[i];
                }
            }
            acc += t;
        }
        acc
    }

    /// Parse the `z1`-based textual form (grammar owned by the CLI module).
    pub fn parse(text: &str, num_vars: usize) -> Result<MultiPoly, PolyError> {
        if num_vars > MAX_VARS {
            return Err(PolyError::TooManyVars(num_vars));
        }
        Parser::new(text, num_vars).parse()
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, other: Self) -> MultiPoly {
        assert_eq!(self.num_vars, other.num_vars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, other: Self) -> MultiPoly {
        assert_eq!(self.num_vars, other.num_vars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, other: Self) -> MultiPoly {
        assert_eq!(self.num_vars, other.num_vars);
        let mut out = MultiPoly::zero(self.num_vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

fn format_term(m: &Monomial, c: &Rat, suppress_unit: bool) -> String {
    let mut parts: Vec<String> = Vec::new();
    let unit = c.abs().is_one();
    if !unit || !suppress_unit || m.total_degree() == 0 {
        parts.push(format!("{}", c.abs()));
    }
    for (i, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(format!("z{}", i + 1)),
            _ => parts.push(format!("z{}^{}", i + 1, e)),
        }
    }
    parts.join("*")
}

impl fmt::Display for MultiPoly {
    /// Canonical printing: graded-lex descending, `p/q` rationals,
    /// explicit `*` between factors. Reparses to the same polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            write!(f, "{}", format_term(m, c, true))?;
        }
        Ok(())
    }
}

/// Recursive-descent parser for the polynomial expression grammar:
/// `expr := term (('+'|'-') term)*`, `term := coeff ('*'? factor)*`,
/// `factor := var ('^' nat)?`, `var := 'z' nat`, `coeff := int ('/' nat)?`.
struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    num_vars: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, num_vars: usize) -> Self {
        Parser {
            bytes: text.as_bytes(),
            pos: 0,
            num_vars,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn err(&self, message: &str) -> PolyError {
        PolyError::Parse {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn parse(mut self) -> Result<MultiPoly, PolyError> {
        let mut acc = MultiPoly::zero(self.num_vars);
        let mut sign = Rat::one();
        // Optional leading sign.
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                sign = -sign;
            }
            Some(b'+') => {
                self.pos += 1;
            }
            _ => {}
        }
        loop {
            let term = self.parse_term()?;
            acc = &acc + &term.scale(&sign);
            match self.peek() {
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    sign = Rat::one();
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -rat(1);
                }
                Some(_) => return Err(self.err("expected '+' or '-'")),
            }
        }
        Ok(acc)
    }

    fn parse_term(&mut self) -> Result<MultiPoly, PolyError> {
        let mut acc;
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let coeff = self.parse_coeff()?;
                acc = MultiPoly::constant(self.num_vars, coeff);
            }
            Some(b'z') => {
                acc = MultiPoly::one(self.num_vars);
            }
            _ => return Err(self.err("expected coefficient or variable")),
        }
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let f = self.parse_factor()?;
                    acc = &acc * &f;
                }
                Some(b'z') => {
                    let f = self.parse_factor()?;
                    acc = &acc * &f;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn parse_factor(&mut self) -> Result<MultiPoly, PolyError> {
        match self.peek() {
            Some(b'z') => {
                self.pos += 1;
                let idx = self.parse_nat()? as usize;
                if idx == 0 || idx > self.num_vars {
                    return Err(PolyError::VarOutOfRange {
                        index: idx,
                        num_vars: self.num_vars,
                    });
                }
                let exp = if self.peek() == Some(b'^') {
                    self.pos += 1;
                    self.parse_nat()?
                } else {
                    1
                };
                Ok(MultiPoly::var(self.num_vars, idx - 1).pow(exp as u32))
            }
            _ => Err(self.err("expected variable")),
        }
    }

    fn parse_coeff(&mut self) -> Result<Rat, PolyError> {
        let num = self.parse_nat()?;
        if self.peek() == Some(b'/') {
            let slash_pos = self.pos;
            self.pos += 1;
            let den = self.parse_nat()?;
            if den == 0 {
                return Err(PolyError::ZeroDenominator { offset: slash_pos });
            }
            Ok(Rat::new(BigInt::from(num), BigInt::from(den)))
        } else {
            Ok(Rat::from(BigInt::from(num)))
        }
    }

    fn parse_nat(&mut self) -> Result<u64, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected number"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("number too large"))
    }
}
