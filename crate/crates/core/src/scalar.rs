// SPDX-License-Identifier: Apache-2.0

//! Scalar rings shared by every kernel.
//!
//! The kernels are written once against [`Scalar`]. Plugging in `f64`,
//! [`Rational`], the counting scalar, the netlist tracer or the fixed-point
//! model changes what an evaluation produces without touching the kernel code.

use std::fmt::Debug;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

/// Exact rational scalar used for equivalence tests.
pub type Rational = Ratio<i128>;

/// Sign attached to one operand of a multi-input adder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn combine(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn from_entry(entry: i8) -> Option<Sign> {
        match entry {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

/// Ring operations a kernel needs.
///
/// Negation is a sign change, not an addition. A subtraction is one addition.
pub trait Scalar: Clone + Debug {
    fn zero() -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;

    /// Signed sum realized as a single adder of fan-in `terms.len()`.
    ///
    /// Accumulation order is fixed: start from the first `Plus` term, then
    /// fold the remaining terms in their given order. A sum with no `Plus`
    /// term adds the magnitudes in order and negates once at the end.
    /// An empty sum is zero.
    #[inline(always)]
    fn sum(terms: &[(Sign, &Self)]) -> Self {
        fold_sum(terms)
    }
}

/// Scalars that can embed an arbitrary real constant without extra context.
pub trait EmbedConstant: Scalar {
    fn from_real(c: f64) -> Self;

    fn one() -> Self {
        Self::from_real(1.0)
    }
}

/// Two-input fold behind [`Scalar::sum`]; fan-in `n` costs `n - 1` additions.
#[inline(always)]
pub fn fold_sum<T: Scalar>(terms: &[(Sign, &T)]) -> T {
    let Some(lead) = terms.iter().position(|(s, _)| *s == Sign::Plus) else {
        let mut rest = terms.iter();
        let Some((_, first)) = rest.next() else {
            return T::zero();
        };
        return rest.fold((*first).clone(), |acc, (_, t)| acc.add(t)).neg();
    };
    let mut acc = terms[lead].1.clone();
    for (i, (sign, t)) in terms.iter().enumerate() {
        if i == lead {
            continue;
        }
        acc = match sign {
            Sign::Plus => acc.add(t),
            Sign::Minus => acc.sub(t),
        };
    }
    acc
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
}

impl EmbedConstant for f64 {
    fn from_real(c: f64) -> Self {
        c
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Ratio::from_integer(0)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
}

impl EmbedConstant for Rational {
    /// Exact conversion; every finite binary64 value is a dyadic rational.
    ///
    /// Panics when the value does not fit an `i128` ratio (|exponent| too large)
    /// or is not finite.
    fn from_real(c: f64) -> Self {
        rational_from_f64(c).unwrap_or_else(|| panic!("{c} is not representable as Ratio<i128>"))
    }
}

/// Exact dyadic conversion of a finite `f64`, if it fits in `i128`.
pub fn rational_from_f64(c: f64) -> Option<Rational> {
    if !c.is_finite() {
        return None;
    }
    if c == 0.0 {
        return Some(Ratio::from_integer(0));
    }
    let bits = c.to_bits();
    let negative = bits >> 63 == 1;
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mantissa, exp) = if exp_bits == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp_bits - 1075) };
    let tz = mantissa.trailing_zeros() as i32;
    let mut m = (mantissa >> tz) as i128;
    let exp = exp + tz;
    if negative {
        m = -m;
    }
    if exp >= 0 {
        if exp > 126 - 53 {
            return None;
        }
        Some(Ratio::from_integer(m << exp))
    } else {
        if -exp > 126 {
            return None;
        }
        Some(Ratio::new_raw(m, 1i128 << (-exp)))
    }
}

/// Lossy conversion back to binary64, for reporting.
pub fn rational_to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embed_zero_and_one() {
        assert_eq!(Rational::from_real(0.0), Rational::zero());
        assert_eq!(Rational::one(), Ratio::from_integer(1));
        assert_eq!(f64::from_real(0.0), f64::zero());
        assert_eq!(<f64 as EmbedConstant>::one(), 1.0);
    }

    #[test]
    fn dyadic_conversion_is_exact() {
        assert_eq!(Rational::from_real(0.75), Ratio::new(3, 4));
        assert_eq!(Rational::from_real(-2.5), Ratio::new(-5, 2));
        assert_eq!(Rational::from_real(1024.0), Ratio::from_integer(1024));
        let third = 1.0f64 / 3.0;
        assert_eq!(rational_to_f64(&Rational::from_real(third)), third);
        assert!(rational_from_f64(f64::NAN).is_none());
        assert!(rational_from_f64(1e300).is_none());
    }

    #[test]
    fn sum_order_and_signs() {
        let a = 5.0f64;
        let b = 2.0f64;
        let c = 1.0f64;
        assert_eq!(f64::sum(&[(Sign::Minus, &a), (Sign::Plus, &b), (Sign::Minus, &c)]), -4.0);
        assert_eq!(f64::sum(&[(Sign::Minus, &a), (Sign::Minus, &b)]), -7.0);
        assert_eq!(f64::sum(&[(Sign::Plus, &c)]), 1.0);
        assert_eq!(f64::sum(&[]), 0.0);
    }
}
