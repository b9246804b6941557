//! Truncated power and Laurent series in the deformation parameter `h`.
//!
//! An [`HSeries`] stores exact rational coefficients for the exponents it
//! knows about, together with an explicit truncation order: every exponent
//! greater than [`HSeries::order`] is unknown. Arithmetic propagates the
//! order so that loss of precision is always visible in the result.
//!
//! ```
//! use qdp::series::HSeries;
//!
//! let one_plus_h = HSeries::from_ints(0, &[1, 1], 2);
//! let one_minus_h = HSeries::from_ints(0, &[1, -1], 2);
//! let prod = &one_plus_h * &one_minus_h;
//! assert_eq!(prod, HSeries::from_ints(0, &[1, 0, -1], 2));
//! ```

use std::cmp::{max, min};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rationals in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Builds a rational from a pair of machine integers.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p"` or `"p/q"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let parsed = match t.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).ok();
            let q = BigInt::from_str(q.trim()).ok();
            match (p, q) {
                (Some(p), Some(q)) if !q.is_zero() => Some(Rational::new(p, q)),
                _ => None,
            }
        }
        None => BigInt::from_str(t).ok().map(Rational::from_integer),
    };
    parsed.ok_or_else(|| Error::Parse {
        pos: 0,
        msg: format!("not a rational number: {s:?}"),
    })
}

/// h-adic valuation: an integer, or `Infinity` for the zero series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }

    /// `self >= n`, with infinity dominating everything.
    pub fn at_least(self, n: i64) -> bool {
        self >= Valuation::Finite(n)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_i64(*v),
            Valuation::Infinity => s.serialize_str("inf"),
        }
    }
}

/// A truncated series `Σ c_k h^k`, `v_min ≤ k ≤ order`.
///
/// Stored trimmed: the first and last stored coefficients are nonzero, and
/// the zero series has no coefficients and `v_min = order + 1`. Equality is
/// structural on this canonical form, so it compares truncation orders too.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HSeries {
    v_min: i64,
    order: i64,
    coeffs: Vec<Rational>,
}

impl HSeries {
    pub fn zero(order: i64) -> Self {
        HSeries {
            v_min: order + 1,
            order,
            coeffs: Vec::new(),
        }
    }

    pub fn one(order: i64) -> Self {
        Self::constant(Rational::one(), order)
    }

    pub fn constant(c: Rational, order: i64) -> Self {
        Self::monomial(c, 0, order)
    }

    /// `c·h^exp`, truncated at `order`.
    pub fn monomial(c: Rational, exp: i64, order: i64) -> Self {
        Self::from_coeffs(exp, vec![c], order)
    }

    /// `h^exp` with coefficient one.
    pub fn h_pow(exp: i64, order: i64) -> Self {
        Self::monomial(Rational::one(), exp, order)
    }

    /// Dense coefficients starting at exponent `v_min`; entries beyond
    /// `order` are discarded.
    pub fn from_coeffs(v_min: i64, coeffs: Vec<Rational>, order: i64) -> Self {
        let mut s = HSeries {
            v_min,
            order,
            coeffs,
        };
        s.normalize();
        s
    }

    pub fn from_ints(v_min: i64, coeffs: &[i64], order: i64) -> Self {
        Self::from_coeffs(
            v_min,
            coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect(),
            order,
        )
    }

    fn normalize(&mut self) {
        let keep = (self.order - self.v_min + 1).max(0) as usize;
        self.coeffs.truncate(keep);
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == self.coeffs.len() {
            self.coeffs.clear();
            self.v_min = self.order + 1;
        } else {
            self.coeffs.drain(..lead);
            self.v_min += lead as i64;
        }
    }

    pub fn v_min(&self) -> i64 {
        self.v_min
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True when `self` is exactly `1` up to its order.
    pub fn is_one(&self) -> bool {
        self.v_min == 0 && self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn valuation(&self) -> Valuation {
        if self.is_zero() {
            Valuation::Infinity
        } else {
            Valuation::Finite(self.v_min)
        }
    }

    /// A lower bound for the valuation that is valid for the unknown tail
    /// too: the valuation if nonzero, `order + 1` otherwise.
    fn val_bound(&self) -> i64 {
        if self.is_zero() {
            self.order + 1
        } else {
            self.v_min
        }
    }

    /// Coefficient of `h^k` (zero outside the stored range).
    pub fn coeff(&self, k: i64) -> Rational {
        if k < self.v_min || k > self.order {
            return Rational::zero();
        }
        self.coeffs
            .get((k - self.v_min) as usize)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// `(exponent, coefficient)` pairs of the nonzero terms.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.v_min + i as i64, c))
    }

    /// Lowers the truncation order to `min(self.order, order)`.
    pub fn truncate(&self, order: i64) -> Self {
        if order >= self.order {
            return self.clone();
        }
        Self::from_coeffs(self.v_min, self.coeffs.clone(), order)
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero(self.order);
        }
        HSeries {
            v_min: self.v_min,
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    /// Multiplication by `h^k` for any integer `k` (Laurent shift).
    pub fn shift(&self, k: i64) -> Self {
        HSeries {
            v_min: self.v_min + k,
            order: self.order + k,
            coeffs: self.coeffs.clone(),
        }
    }

    /// Division by `h^k` inside `k[[h]]`: fails unless the valuation is at
    /// least `k`.
    pub fn div_h(&self, k: i64) -> Result<Self> {
        if !self.is_zero() && self.v_min < k {
            return Err(Error::NotDivisible {
                context: format!("{self} is not divisible by h^{k}"),
            });
        }
        let mut out = self.shift(-k);
        if out.is_zero() {
            out.v_min = out.order + 1;
        }
        Ok(out)
    }

    /// `exp(a)` for `valuation(a) ≥ 1`.
    pub fn exp(&self) -> Result<Self> {
        if !self.valuation().at_least(1) {
            return Err(Error::NotTopologicallyNilpotent {
                context: format!("exp({self})"),
            });
        }
        let order = self.order;
        let mut sum = Self::one(order);
        let mut power = Self::one(order);
        let mut k: i64 = 1;
        loop {
            power = (&power * self).scale(&rat(1, k)).truncate(order);
            if power.is_zero() {
                break;
            }
            sum = &sum + &power;
            k += 1;
        }
        Ok(sum.truncate(order))
    }

    /// Dense coefficients for exponents `v_min..=order` (serialization form).
    pub fn dense(&self) -> (i64, Vec<Rational>) {
        if self.is_zero() {
            return (self.order + 1, Vec::new());
        }
        let len = (self.order - self.v_min + 1) as usize;
        let mut out = self.coeffs.clone();
        out.resize(len, Rational::zero());
        (self.v_min, out)
    }

    /// True when every stored coefficient is zero up to `min(order, cutoff)`.
    pub fn vanishes_through(&self, cutoff: i64) -> bool {
        self.val_bound() > min(self.order, cutoff)
    }
}

impl Add for &HSeries {
    type Output = HSeries;
    fn add(self, rhs: &HSeries) -> HSeries {
        let order = min(self.order, rhs.order);
        if self.is_zero() {
            return rhs.truncate(order);
        }
        if rhs.is_zero() {
            return self.truncate(order);
        }
        let lo = min(self.v_min, rhs.v_min);
        let hi = min(
            order,
            max(
                self.v_min + self.coeffs.len() as i64,
                rhs.v_min + rhs.coeffs.len() as i64,
            ) - 1,
        );
        let coeffs = (lo..=hi).map(|k| self.coeff(k) + rhs.coeff(k)).collect();
        HSeries::from_coeffs(lo, coeffs, order)
    }
}

impl Sub for &HSeries {
    type Output = HSeries;
    fn sub(self, rhs: &HSeries) -> HSeries {
        self + &(-rhs)
    }
}

impl Neg for &HSeries {
    type Output = HSeries;
    fn neg(self) -> HSeries {
        HSeries {
            v_min: self.v_min,
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &HSeries {
    type Output = HSeries;
    fn mul(self, rhs: &HSeries) -> HSeries {
        let order = min(self.order + rhs.val_bound(), rhs.order + self.val_bound());
        if self.is_zero() || rhs.is_zero() {
            return HSeries::zero(order);
        }
        let v_min = self.v_min + rhs.v_min;
        let len = ((order - v_min + 1).max(0) as usize)
            .min(self.coeffs.len() + rhs.coeffs.len() - 1);
        let mut coeffs = vec![Rational::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len || a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                coeffs[i + j] += a * b;
            }
        }
        HSeries::from_coeffs(v_min, coeffs, order)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for HSeries {
            type Output = HSeries;
            fn $m(self, rhs: HSeries) -> HSeries {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for HSeries {
    type Output = HSeries;
    fn neg(self) -> HSeries {
        -&self
    }
}

fn fmt_rational_coeff(f: &mut fmt::Formatter<'_>, c: &Rational, first: bool, bare: bool) -> fmt::Result {
    let neg = c.is_negative();
    let mag = c.abs();
    if first {
        if neg {
            write!(f, "-")?;
        }
    } else if neg {
        write!(f, " - ")?;
    } else {
        write!(f, " + ")?;
    }
    if !bare || !mag.is_one() {
        write!(f, "{mag}")?;
        if bare {
            write!(f, "*")?;
        }
    }
    Ok(())
}

impl fmt::Display for HSeries {
    /// Prints in the element-expression syntax, e.g. `1 - 1/2*h^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (k, c)) in self.terms().enumerate() {
            let first = idx == 0;
            match k {
                0 => fmt_rational_coeff(f, c, first, false)?,
                _ => {
                    fmt_rational_coeff(f, c, first, true)?;
                    if k == 1 {
                        write!(f, "h")?;
                    } else {
                        write!(f, "h^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    v_min: i64,
    order: i64,
    coeffs: Vec<String>,
}

impl Serialize for HSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (v_min, dense) = self.dense();
        SeriesRepr {
            v_min,
            order: self.order,
            coeffs: dense.iter().map(|c| c.to_string()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = SeriesRepr::deserialize(d)?;
        HSeries::try_from(repr).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<SeriesRepr> for HSeries {
    type Error = Error;
    fn try_from(repr: SeriesRepr) -> Result<Self> {
        if repr.v_min > repr.order + 1 {
            return Err(Error::Manifest(format!(
                "series with v_min {} > order + 1 = {}",
                repr.v_min,
                repr.order + 1
            )));
        }
        let coeffs = repr
            .coeffs
            .iter()
            .map(|c| parse_rational(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(HSeries::from_coeffs(repr.v_min, coeffs, repr.order))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: i64, c: &[i64], n: i64) -> HSeries {
        HSeries::from_ints(v, c, n)
    }

    #[test]
    fn add_cancels() {
        let a = s(0, &[1, 1], 4);
        let b = s(0, &[-1], 4);
        assert_eq!(&a + &b, HSeries::h_pow(1, 4));
        let z = HSeries::zero(4);
        assert_eq!(&z + &a, a);
        let c = s(1, &[1, 0, -1], 4);
        let d = HSeries::h_pow(3, 4);
        assert_eq!(&c + &d, HSeries::h_pow(1, 4));
    }

    #[test]
    fn add_takes_min_order() {
        let a = s(0, &[1, 2, 3], 5);
        let b = s(0, &[1], 2);
        assert_eq!((&a + &b).order(), 2);
    }

    #[test]
    fn mul_examples() {
        let a = s(0, &[1, 1], 2);
        let b = s(0, &[1, -1], 2);
        assert_eq!(&a * &b, s(0, &[1, 0, -1], 2));
        let h = HSeries::h_pow(1, 4);
        let hinv = HSeries::h_pow(-1, 4);
        let one = &h * &hinv;
        assert!(one.is_one());
        assert_eq!(one.order(), 3);
    }

    #[test]
    fn exp_square_matches_frozen_coefficients() {
        // coefficients of e^{2h} up to h^4: 1, 2, 2, 4/3, 2/3
        let trunc: Vec<Rational> = [1i64, 1, 2, 6, 24].iter().map(|f| rat(1, *f)).collect();
        let e = HSeries::from_coeffs(0, trunc, 4);
        let sq = &e * &e;
        let want = HSeries::from_coeffs(
            0,
            vec![rat(1, 1), rat(2, 1), rat(2, 1), rat(4, 3), rat(2, 3)],
            4,
        );
        assert_eq!(sq, want);
    }

    #[test]
    fn div_h_examples() {
        assert_eq!(HSeries::h_pow(2, 5).div_h(1).unwrap(), HSeries::h_pow(1, 4));
        assert!(matches!(
            s(0, &[1, 1], 5).div_h(1),
            Err(Error::NotDivisible { .. })
        ));
        let a = s(3, &[1, 0, -1], 6);
        assert_eq!(a.div_h(3).unwrap(), s(0, &[1, 0, -1], 3));
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(s(3, &[1, 0, -1], 6).valuation(), Valuation::Finite(3));
        assert_eq!(HSeries::zero(6).valuation(), Valuation::Infinity);
        assert_eq!(s(-1, &[1, 1], 6).valuation(), Valuation::Finite(-1));
    }

    #[test]
    fn exp_examples() {
        let e = HSeries::h_pow(1, 3).exp().unwrap();
        assert_eq!(
            e,
            HSeries::from_coeffs(0, vec![rat(1, 1), rat(1, 1), rat(1, 2), rat(1, 6)], 3)
        );
        assert_eq!(HSeries::zero(3).exp().unwrap(), HSeries::one(3));
        assert!(matches!(
            s(0, &[1, 1], 3).exp(),
            Err(Error::NotTopologicallyNilpotent { .. })
        ));
    }

    #[test]
    fn display_and_json() {
        let a = HSeries::from_coeffs(0, vec![rat(1, 1), rat(0, 1), rat(-1, 2)], 3);
        assert_eq!(a.to_string(), "1 - 1/2*h^2");
        let js = serde_json::to_string(&a).unwrap();
        assert_eq!(js, r#"{"v_min":0,"order":3,"coeffs":["1","0","-1/2","0"]}"#);
        let back: HSeries = serde_json::from_str(&js).unwrap();
        assert_eq!(back, a);
        let z = HSeries::zero(2);
        assert_eq!(serde_json::to_string(&z).unwrap(), r#"{"v_min":3,"order":2,"coeffs":[]}"#);
    }

    #[test]
    fn zero_product_order_is_honest() {
        let z = HSeries::zero(3);
        let h2 = HSeries::h_pow(2, 8);
        assert_eq!((&z * &h2).order(), 5);
    }
}
