// SPDX-License-Identifier: Apache-2.0

//! Quaternions over an abstract scalar and the direct Hamilton product.

use std::ops::{Add, Sub};

use crate::scalar::{EmbedConstant, Scalar, Sign};

/// `q0 + q1 i + q2 j + q3 k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Quaternion<T> {
    pub q0: T,
    pub q1: T,
    pub q2: T,
    pub q3: T,
}

impl<T> Quaternion<T> {
    pub const fn new(q0: T, q1: T, q2: T, q3: T) -> Self {
        Quaternion { q0, q1, q2, q3 }
    }

    pub fn from_array([q0, q1, q2, q3]: [T; 4]) -> Self {
        Quaternion { q0, q1, q2, q3 }
    }

    pub fn into_array(self) -> [T; 4] {
        [self.q0, self.q1, self.q2, self.q3]
    }

    pub fn components(&self) -> [&T; 4] {
        [&self.q0, &self.q1, &self.q2, &self.q3]
    }

    pub fn map<U>(self, mut f: impl FnMut(T) -> U) -> Quaternion<U> {
        Quaternion::new(f(self.q0), f(self.q1), f(self.q2), f(self.q3))
    }
}

impl<T: Scalar> Quaternion<T> {
    pub fn zero() -> Self {
        Quaternion::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Quaternion::new(self.q0.add(&rhs.q0), self.q1.add(&rhs.q1), self.q2.add(&rhs.q2), self.q3.add(&rhs.q3))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Quaternion::new(self.q0.sub(&rhs.q0), self.q1.sub(&rhs.q1), self.q2.sub(&rhs.q2), self.q3.sub(&rhs.q3))
    }

    pub fn scale(&self, c: &T) -> Self {
        Quaternion::new(c.mul(&self.q0), c.mul(&self.q1), c.mul(&self.q2), c.mul(&self.q3))
    }

    pub fn conj(&self) -> Self {
        Quaternion::new(self.q0.clone(), self.q1.neg(), self.q2.neg(), self.q3.neg())
    }
}

impl<T: EmbedConstant> Quaternion<T> {
    pub fn one() -> Self {
        Quaternion::new(T::one(), T::zero(), T::zero(), T::zero())
    }

    pub fn from_reals(q: [f64; 4]) -> Self {
        Quaternion::from_array(q.map(T::from_real))
    }
}

impl Quaternion<f64> {
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (0..4).map(|k| (self.components()[k] - other.components()[k]).abs()).fold(0.0, f64::max)
    }
}

impl<T: Scalar> Add for Quaternion<T> {
    type Output = Quaternion<T>;
    fn add(self, rhs: Self) -> Self::Output {
        Quaternion::add(&self, &rhs)
    }
}

impl<T: Scalar> Sub for Quaternion<T> {
    type Output = Quaternion<T>;
    fn sub(self, rhs: Self) -> Self::Output {
        Quaternion::sub(&self, &rhs)
    }
}

/// Constant i-quaternion `alpha + beta i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IQuaternion<T> {
    pub alpha: T,
    pub beta: T,
}

/// Constant j-quaternion `gamma + delta j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JQuaternion<T> {
    pub gamma: T,
    pub delta: T,
}

impl<T> IQuaternion<T> {
    pub const fn new(alpha: T, beta: T) -> Self {
        IQuaternion { alpha, beta }
    }
}

impl<T> JQuaternion<T> {
    pub const fn new(gamma: T, delta: T) -> Self {
        JQuaternion { gamma, delta }
    }
}

impl<T: EmbedConstant> IQuaternion<T> {
    pub fn from_reals(alpha: f64, beta: f64) -> Self {
        IQuaternion::new(T::from_real(alpha), T::from_real(beta))
    }
}

impl<T: EmbedConstant> JQuaternion<T> {
    pub fn from_reals(gamma: f64, delta: f64) -> Self {
        JQuaternion::new(T::from_real(gamma), T::from_real(delta))
    }
}

/// `(alpha, beta, 0, 0)`.
pub fn embed_i<T: Scalar>(s: &IQuaternion<T>) -> Quaternion<T> {
    Quaternion::new(s.alpha.clone(), s.beta.clone(), T::zero(), T::zero())
}

/// `(gamma, 0, delta, 0)`.
pub fn embed_j<T: Scalar>(t: &JQuaternion<T>) -> Quaternion<T> {
    Quaternion::new(t.gamma.clone(), T::zero(), t.delta.clone(), T::zero())
}

// Left-multiplication matrix L(p) with p * q = L(p) [q0 q1 q2 q3]^T.
// Entry (r, c) is SIGN[r][c] * p[INDEX[r][c]]; column 0 is positive in every row.
const LEFT_INDEX: [[usize; 4]; 4] = [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]];
const LEFT_SIGN: [[Sign; 4]; 4] = {
    use Sign::{Minus as M, Plus as P};
    [[P, M, M, M], [P, P, M, P], [P, P, P, M], [P, M, P, P]]
};

/// Hamilton product `p * q` through the 4x4 vector-matrix form.
///
/// Each output row multiplies all four entries (16 multiplications) and
/// accumulates them left to right with two-input adders (12 additions).
pub fn mul_direct<T: Scalar>(p: &Quaternion<T>, q: &Quaternion<T>) -> Quaternion<T> {
    let p = p.components();
    let x = q.components();
    let row = |r: usize| {
        let mut acc = p[LEFT_INDEX[r][0]].mul(x[0]);
        for c in 1..4 {
            let prod = p[LEFT_INDEX[r][c]].mul(x[c]);
            acc = match LEFT_SIGN[r][c] {
                Sign::Plus => acc.add(&prod),
                Sign::Minus => acc.sub(&prod),
            };
        }
        acc
    };
    Quaternion::new(row(0), row(1), row(2), row(3))
}

/// `q0^2 + q1^2 + q2^2 + q3^2`.
pub fn norm_sq<T: Scalar>(q: &Quaternion<T>) -> T {
    q.components().iter().map(|c| c.mul(c)).reduce(|a, b| a.add(&b)).unwrap_or_else(T::zero)
}
