//! Dense univariate polynomials over the rationals.
//!
//! Used for the kernel families in one variable x and for the coefficient
//! functions p_ij(z3) of the n = 3 normal-form engine. Dense storage keeps
//! division, Taylor shifts and square-root extraction straightforward.

use crate::poly::{rat, MultiPoly, Rat};
use num::{BigInt, One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Univariate polynomial; `coeffs[i]` is the coefficient of `x^i`.
/// No trailing zero coefficients are stored; zero is the empty vector.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UniPoly {
    coeffs: Vec<Rat>,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rat) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn x() -> Self {
        Self::from_coeffs(vec![Rat::zero(), Rat::one()])
    }

    /// `c * x^e`.
    pub fn monomial(e: usize, c: Rat) -> Self {
        let mut coeffs = vec![Rat::zero(); e + 1];
        coeffs[e] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Rat::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn leading_coeff(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        UniPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(Rat::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::from_coeffs(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * rat((i + 1) as i64))
                .collect(),
        )
    }

    /// Taylor shift: returns q with q(y) = p(a + y).
    ///
    /// The coefficient of y^m is p^(m)(a)/m!, which is how the kernel sums
    /// evaluate derivatives without forming factorials.
    pub fn shift(&self, a: &Rat) -> Self {
        let mut out = Self::zero();
        let base = Self::from_coeffs(vec![a.clone(), Rat::one()]); // a + y
        let mut power = Self::constant(Rat::one());
        for c in &self.coeffs {
            out = &out + &power.scale(c);
            power = &power * &base;
        }
        out
    }

    /// Polynomial division: returns (quotient, remainder).
    pub fn div_rem(&self, divisor: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let dd = divisor.degree().unwrap();
        let lead = divisor.leading_coeff();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rat::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1 - dd;
            let factor = rem.last().unwrap() / &lead;
            if !factor.is_zero() {
                for (i, c) in divisor.coeffs.iter().enumerate() {
                    let v = &rem[k + i] - &(c * &factor);
                    rem[k + i] = v;
                }
                quot[k] = factor;
            }
            rem.pop();
        }
        (Self::from_coeffs(quot), Self::from_coeffs(rem))
    }

    /// Exact division; `None` if the remainder is nonzero.
    pub fn exact_div(&self, divisor: &UniPoly) -> Option<UniPoly> {
        let (q, r) = self.div_rem(divisor);
        r.is_zero().then_some(q)
    }

    /// Square root in Q[x] if this polynomial is a perfect square.
    pub fn sqrt_exact(&self) -> Option<UniPoly> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        let deg = self.degree().unwrap();
        if deg % 2 != 0 {
            return None;
        }
        let lead = rat_sqrt(&self.leading_coeff())?;
        // Coefficient matching from the top degree downward.
        let half = deg / 2;
        let mut s = vec![Rat::zero(); half + 1];
        s[half] = lead;
        for i in (0..half).rev() {
            // Coefficient of x^(half+i) in s^2 must match self.
            let mut acc = Rat::zero();
            for j in (i + 1)..=half {
                let other = half + i - j;
                if other > j {
                    continue;
                }
                let prod = &s[j] * &s[other];
                acc += if other == j { prod } else { prod * rat(2) };
            }
            let target = self.coeff(half + i);
            s[i] = (target - acc) / (rat(2) * &s[half]);
        }
        let cand = Self::from_coeffs(s);
        (&(&cand * &cand) == self).then_some(cand)
    }

    /// Whether self = c * other for a constant c (reports c); both nonzero.
    pub fn constant_multiple_of(&self, other: &UniPoly) -> Option<Rat> {
        if self.is_zero() || other.is_zero() {
            return None;
        }
        let c = self.leading_coeff() / other.leading_coeff();
        (self == &other.scale(&c)).then_some(c)
    }

    /// View as a `MultiPoly` in `num_vars` variables, placed at variable `var`.
    pub fn to_multi(&self, num_vars: usize, var: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(num_vars);
        for (i, c) in self.coeffs.iter().enumerate() {
            let mut exps = vec![0u16; num_vars];
            exps[var] = i as u16;
            out = &out + &MultiPoly::monomial(num_vars, &exps, c.clone());
        }
        out
    }

    /// Extract from a `MultiPoly` that uses only variable `var`.
    /// Returns `None` if any other variable occurs.
    pub fn from_multi(p: &MultiPoly, var: usize) -> Option<UniPoly> {
        let mut coeffs: Vec<Rat> = Vec::new();
        for (m, c) in p.terms() {
            for (i, &e) in m.0.iter().enumerate() {
                if i != var && e != 0 {
                    return None;
                }
            }
            let e = m.0[var] as usize;
            if coeffs.len() <= e {
                coeffs.resize(e + 1, Rat::zero());
            }
            coeffs[e] = c.clone();
        }
        Some(Self::from_coeffs(coeffs))
    }

    /// Render using the given variable name.
    pub fn display_with(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else if c.is_negative() {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let a = c.abs();
            match i {
                0 => out.push_str(&format!("{a}")),
                _ => {
                    if !a.is_one() {
                        out.push_str(&format!("{a}*"));
                    }
                    out.push_str(var);
                    if i > 1 {
                        out.push_str(&format!("^{i}"));
                    }
                }
            }
        }
        out
    }
}

/// Exact square root of a non-negative rational, if it exists.
pub fn rat_sqrt(r: &Rat) -> Option<Rat> {
    if r.is_negative() {
        return None;
    }
    let num = int_sqrt(r.numer())?;
    let den = int_sqrt(r.denom())?;
    Some(Rat::new(num, den))
}

fn int_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let s = n.sqrt();
    (&s * &s == *n).then_some(s)
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, other: Self) -> UniPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![Rat::zero(); len];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        UniPoly::from_coeffs(coeffs)
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, other: Self) -> UniPoly {
        self + &(-other)
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, other: Self) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        UniPoly::from_coeffs(coeffs)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with("x"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ratio;

    fn up(coeffs: &[i64]) -> UniPoly {
        UniPoly::from_coeffs(coeffs.iter().map(|&c| rat(c)).collect())
    }

    #[test]
    fn shift_gives_taylor_coefficients() {
        // p(x) = x^3: p(1+y) = 1 + 3y + 3y^2 + y^3
        let p = UniPoly::monomial(3, rat(1));
        assert_eq!(p.shift(&rat(1)), up(&[1, 3, 3, 1]));
    }

    #[test]
    fn div_rem_exact_and_remainder() {
        let p = up(&[-1, 0, 1]); // x^2 - 1
        let d = up(&[1, 1]); // x + 1
        let (q, r) = p.div_rem(&d);
        assert_eq!(q, up(&[-1, 1]));
        assert!(r.is_zero());
        let (_, r2) = up(&[1, 0, 1]).div_rem(&d);
        assert_eq!(r2, up(&[2]));
    }

    #[test]
    fn sqrt_perfect_square() {
        let s = up(&[1, 2]); // 1 + 2x
        let sq = &s * &s;
        let root = sq.sqrt_exact().unwrap();
        // Normalized to positive leading coefficient by construction.
        assert_eq!(root, s);
        assert!(up(&[0, 1]).sqrt_exact().is_none()); // x: odd degree
        assert!(up(&[0, 0, 2]).sqrt_exact().is_none()); // 2x^2: 2 not a square
    }

    #[test]
    fn sqrt_with_fractions() {
        let s = UniPoly::from_coeffs(vec![ratio(1, 2), rat(3)]);
        let sq = &s * &s;
        assert_eq!(sq.sqrt_exact().unwrap(), s);
    }

    #[test]
    fn multi_roundtrip() {
        let p = up(&[1, 0, -4]);
        let m = p.to_multi(3, 2);
        assert_eq!(UniPoly::from_multi(&m, 2).unwrap(), p);
        assert_eq!(m.to_string(), "-4*z3^2 + 1");
    }

    #[test]
    fn constant_multiple_detection() {
        let p = up(&[1, 2]);
        assert_eq!(up(&[3, 6]).constant_multiple_of(&p), Some(rat(3)));
        assert_eq!(up(&[3, 5]).constant_multiple_of(&p), None);
    }
}
