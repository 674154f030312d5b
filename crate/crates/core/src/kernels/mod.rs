// SPDX-License-Identifier: Apache-2.0

//! Multiplication by constant i- and j-quaternions with reduced multiplier count.
//!
//! Every kernel is a [`FactorMatrices`] pipeline: signed pre-additions, one
//! multiplication per diagonal entry, signed post-additions, then an output
//! permutation. The diagonal constants are computed once per constant
//! operand and stored in a plan.
//!
//! On a pair `(x0, x1)` the building block computes
//! `(c x0 - e x1, e x0 + c x1)` with three products
//! `c (x0 - x1)`, `(c + e) x0`, `(c - e) x1`. Left multiplication by
//! `alpha + beta i` applies it to the pairs `(q0, q1)` and `(q2, q3)`;
//! right multiplication by `gamma + delta j` applies it to `(q0, q2)` and
//! `(q1, q3)`. The two-sided kernel is the Kronecker product of both.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::quaternion::{IQuaternion, JQuaternion, Quaternion};
use crate::scalar::Scalar;
use crate::scalar::Sign::{Minus, Plus};

mod factored;

pub use factored::{apply_factored, FactorMatrices, SignMatrix};

/// Kernel selector shared by the instrumentation, fixed-point and CLI layers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KernelId {
    /// Full Hamilton product, the 16-multiplication baseline.
    Direct,
    /// `s q` with `s` an i-quaternion.
    Sq,
    /// `q t` with `t` a j-quaternion.
    Qt,
    /// `s q t`.
    Sqt,
}

impl KernelId {
    pub const ALL: [KernelId; 4] = [KernelId::Direct, KernelId::Sq, KernelId::Qt, KernelId::Sqt];

    pub fn name(self) -> &'static str {
        match self {
            KernelId::Direct => "direct",
            KernelId::Sq => "sq",
            KernelId::Qt => "qt",
            KernelId::Sqt => "sqt",
        }
    }

    /// Evaluates the kernel on `q` for constants `s` and `t`.
    ///
    /// `Direct` computes the full product `embed_i(s) * q`; `t` is ignored by
    /// `Direct` and `Sq`, `s` by `Qt`.
    pub fn eval<T: Scalar>(self, s: &IQuaternion<T>, t: &JQuaternion<T>, q: &Quaternion<T>) -> Quaternion<T> {
        match self {
            KernelId::Direct => crate::quaternion::mul_direct(&crate::quaternion::embed_i(s), q),
            KernelId::Sq => left_mul(&precompute_left(s), q),
            KernelId::Qt => right_mul(q, &precompute_right(t)),
            KernelId::Sqt => two_sided_mul(&precompute_two_sided(s, t), q),
        }
    }
}

impl fmt::Display for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "direct" => Ok(KernelId::Direct),
            "sq" => Ok(KernelId::Sq),
            "qt" => Ok(KernelId::Qt),
            "sqt" => Ok(KernelId::Sqt),
            other => Err(Error::UnknownKernel(other.to_string())),
        }
    }
}

#[rustfmt::skip]
static PAIR_PRE_LEFT: [SignMatrix; 1] = [SignMatrix::from_static(6, 4, &[
    1, -1, 0,  0,
    1,  0, 0,  0,
    0,  1, 0,  0,
    0,  0, 1, -1,
    0,  0, 1,  0,
    0,  0, 0,  1,
])];

#[rustfmt::skip]
static PAIR_PRE_RIGHT: [SignMatrix; 1] = [SignMatrix::from_static(6, 4, &[
    1, 0, -1,  0,
    1, 0,  0,  0,
    0, 0,  1,  0,
    0, 1,  0, -1,
    0, 1,  0,  0,
    0, 0,  0,  1,
])];

// Rows yield (out1, out0) of the first pair, then of the second pair.
#[rustfmt::skip]
static PAIR_POST: SignMatrix = SignMatrix::from_static(4, 6, &[
    -1, 1, 0,  0, 0, 0,
     1, 0, 1,  0, 0, 0,
     0, 0, 0, -1, 1, 0,
     0, 0, 0,  1, 0, 1,
]);

static LEFT_PERM: [usize; 4] = [1, 0, 3, 2];
static RIGHT_PERM: [usize; 4] = [1, 3, 0, 2];
static IDENTITY_PERM: [usize; 4] = [0, 1, 2, 3];

// Two-sided pre-additions. Product slot 3b + a carries the i-side row `a`
// and the j-side row `b` of the pair pre-adder [[1, -1], [1, 0], [0, 1]]:
//   slot: 0           1        2        3        4   5   6        7   8
//   u:    q0-q1-q2+q3 q0-q2    q1-q3    q0-q1    q0  q1  q2-q3    q2  q3
//
// Budget form: six two-input adders. The single-difference terms come from
// one parallel level; the cross term is accumulated onto q0-q1 through two
// further adders.
#[rustfmt::skip]
static SQT_PRE_BUDGET: [SignMatrix; 3] = [
    // -> [q0-q1, q2-q3, q0-q2, q1-q3, q0, q1, q2, q3]
    SignMatrix::from_static(8, 4, &[
        1, -1,  0,  0,
        0,  0,  1, -1,
        1,  0, -1,  0,
        0,  1,  0, -1,
        1,  0,  0,  0,
        0,  1,  0,  0,
        0,  0,  1,  0,
        0,  0,  0,  1,
    ]),
    // -> previous 8, then (q0-q1)-q2
    SignMatrix::from_static(9, 8, &[
        1, 0, 0, 0, 0, 0,  0, 0,
        0, 1, 0, 0, 0, 0,  0, 0,
        0, 0, 1, 0, 0, 0,  0, 0,
        0, 0, 0, 1, 0, 0,  0, 0,
        0, 0, 0, 0, 1, 0,  0, 0,
        0, 0, 0, 0, 0, 1,  0, 0,
        0, 0, 0, 0, 0, 0,  1, 0,
        0, 0, 0, 0, 0, 0,  0, 1,
        1, 0, 0, 0, 0, 0, -1, 0,
    ]),
    SignMatrix::from_static(9, 9, &[
        0, 0, 0, 0, 0, 0, 0, 1, 1,
        0, 0, 1, 0, 0, 0, 0, 0, 0,
        0, 0, 0, 1, 0, 0, 0, 0, 0,
        1, 0, 0, 0, 0, 0, 0, 0, 0,
        0, 0, 0, 0, 1, 0, 0, 0, 0,
        0, 0, 0, 0, 0, 1, 0, 0, 0,
        0, 1, 0, 0, 0, 0, 0, 0, 0,
        0, 0, 0, 0, 0, 0, 1, 0, 0,
        0, 0, 0, 0, 0, 0, 0, 1, 0,
    ]),
];

// Fully shared form, (A_j (x) I3)(I2 (x) A_i): five two-input adders.
#[rustfmt::skip]
static SQT_PRE_SHARED: [SignMatrix; 2] = [
    // -> [q0-q1, q0, q1, q2-q3, q2, q3]
    SignMatrix::from_static(6, 4, &[
        1, -1, 0,  0,
        1,  0, 0,  0,
        0,  1, 0,  0,
        0,  0, 1, -1,
        0,  0, 1,  0,
        0,  0, 0,  1,
    ]),
    SignMatrix::from_static(9, 6, &[
        1, 0, 0, -1,  0,  0,
        0, 1, 0,  0, -1,  0,
        0, 0, 1,  0,  0, -1,
        1, 0, 0,  0,  0,  0,
        0, 1, 0,  0,  0,  0,
        0, 0, 1,  0,  0,  0,
        0, 0, 0,  1,  0,  0,
        0, 0, 0,  0,  1,  0,
        0, 0, 0,  0,  0,  1,
    ]),
];

// Row for output (i', j') holds B[i'][a] * B[j'][b] at slot 3b + a, where
// B = [[1, 0, 1], [-1, 1, 0]]. Every row is a single four-input adder.
#[rustfmt::skip]
static SQT_POST: SignMatrix = SignMatrix::from_static(4, 9, &[
     1,  0,  1,   0, 0, 0,   1, 0, 1,
    -1,  1,  0,   0, 0, 0,  -1, 1, 0,
    -1,  0, -1,   1, 0, 1,   0, 0, 0,
     1, -1,  0,  -1, 1, 0,   0, 0, 0,
]);

/// Pre-addition strategy for the two-sided kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SqtPreAdd {
    /// Six two-input pre-adders plus four four-input post-adders.
    #[default]
    Budget,
    /// Cross term shared from the i-side differences: five two-input pre-adders.
    Shared,
}

/// Constants of `alpha + beta i`, laid out as the diagonal
/// `(alpha, d1, d2, alpha, d1, d2)` with `d1 = alpha + beta`, `d2 = alpha - beta`.
#[derive(Clone, Debug, PartialEq)]
pub struct LeftPlan<T> {
    diag: [T; 6],
}

/// Constants of `gamma + delta j`: `(gamma, e1, e2, gamma, e1, e2)` with
/// `e1 = gamma + delta`, `e2 = gamma - delta`.
#[derive(Clone, Debug, PartialEq)]
pub struct RightPlan<T> {
    diag: [T; 6],
}

/// Nine products `{gamma, e1, e2}[b] * {alpha, d1, d2}[a]` at slot `3b + a`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoSidedPlan<T> {
    diag: [T; 9],
}

impl<T: Clone> LeftPlan<T> {
    pub fn from_constants(alpha: T, d1: T, d2: T) -> Self {
        LeftPlan { diag: [alpha.clone(), d1.clone(), d2.clone(), alpha, d1, d2] }
    }
    pub fn alpha(&self) -> &T {
        &self.diag[0]
    }
    pub fn d1(&self) -> &T {
        &self.diag[1]
    }
    pub fn d2(&self) -> &T {
        &self.diag[2]
    }
    pub fn factors(&self) -> FactorMatrices<'_, T> {
        FactorMatrices::borrowed(&PAIR_PRE_LEFT, &self.diag, &PAIR_POST, &LEFT_PERM)
    }
}

impl<T: Clone> RightPlan<T> {
    pub fn from_constants(gamma: T, e1: T, e2: T) -> Self {
        RightPlan { diag: [gamma.clone(), e1.clone(), e2.clone(), gamma, e1, e2] }
    }
    pub fn gamma(&self) -> &T {
        &self.diag[0]
    }
    pub fn e1(&self) -> &T {
        &self.diag[1]
    }
    pub fn e2(&self) -> &T {
        &self.diag[2]
    }
    pub fn factors(&self) -> FactorMatrices<'_, T> {
        FactorMatrices::borrowed(&PAIR_PRE_RIGHT, &self.diag, &PAIR_POST, &RIGHT_PERM)
    }
}

impl<T: Clone> TwoSidedPlan<T> {
    pub fn from_constants(diag: [T; 9]) -> Self {
        TwoSidedPlan { diag }
    }
    pub fn constants(&self) -> &[T; 9] {
        &self.diag
    }
    pub fn factors(&self, pre: SqtPreAdd) -> FactorMatrices<'_, T> {
        let stages: &'static [SignMatrix] = match pre {
            SqtPreAdd::Budget => &SQT_PRE_BUDGET,
            SqtPreAdd::Shared => &SQT_PRE_SHARED,
        };
        FactorMatrices::borrowed(stages, &self.diag, &SQT_POST, &IDENTITY_PERM)
    }
}

pub fn precompute_left<T: Scalar>(s: &IQuaternion<T>) -> LeftPlan<T> {
    LeftPlan::from_constants(s.alpha.clone(), s.alpha.add(&s.beta), s.alpha.sub(&s.beta))
}

pub fn precompute_right<T: Scalar>(t: &JQuaternion<T>) -> RightPlan<T> {
    RightPlan::from_constants(t.gamma.clone(), t.gamma.add(&t.delta), t.gamma.sub(&t.delta))
}

/// The nine products are the only multiplications done ahead of time.
pub fn precompute_two_sided<T: Scalar>(s: &IQuaternion<T>, t: &JQuaternion<T>) -> TwoSidedPlan<T> {
    let left = precompute_left(s);
    let right = precompute_right(t);
    let ks = [left.alpha(), left.d1(), left.d2()];
    let kt = [right.gamma(), right.e1(), right.e2()];
    let diag = std::array::from_fn(|slot| ks[slot % 3].mul(kt[slot / 3]));
    TwoSidedPlan { diag }
}

// The runtime kernels below are the factorized pipelines written out. They
// issue the same scalar operations, in the same order, as `apply_factored`
// on the matching `factors()`, so counting and tracing see identical
// structure.

#[inline]
fn diff<T: Scalar>(a: &T, b: &T) -> T {
    T::sum(&[(Plus, a), (Minus, b)])
}

/// Post-addition and output order shared by the one-sided kernels: the
/// pair rows `(-m0 + m1, m0 + m2)` for each half.
#[inline]
fn pair_post<T: Scalar>(m: [T; 6]) -> [T; 4] {
    [
        T::sum(&[(Minus, &m[0]), (Plus, &m[1])]),
        T::sum(&[(Plus, &m[0]), (Plus, &m[2])]),
        T::sum(&[(Minus, &m[3]), (Plus, &m[4])]),
        T::sum(&[(Plus, &m[3]), (Plus, &m[5])]),
    ]
}

#[inline]
fn products<T: Scalar, const N: usize>(diag: &[T; N], v: [&T; N]) -> [T; N] {
    std::array::from_fn(|i| diag[i].mul(v[i]))
}

/// `s q`: six multiplications, six two-input additions.
#[inline]
pub fn left_mul<T: Scalar>(plan: &LeftPlan<T>, q: &Quaternion<T>) -> Quaternion<T> {
    let v0 = diff(&q.q0, &q.q1);
    let v3 = diff(&q.q2, &q.q3);
    let m = products(&plan.diag, [&v0, &q.q0, &q.q1, &v3, &q.q2, &q.q3]);
    let [y0, y1, y2, y3] = pair_post(m);
    Quaternion::new(y1, y0, y3, y2)
}

/// `q t`: six multiplications, six two-input additions.
#[inline]
pub fn right_mul<T: Scalar>(q: &Quaternion<T>, plan: &RightPlan<T>) -> Quaternion<T> {
    let v0 = diff(&q.q0, &q.q2);
    let v3 = diff(&q.q1, &q.q3);
    let m = products(&plan.diag, [&v0, &q.q0, &q.q2, &v3, &q.q1, &q.q3]);
    let [y0, y1, y2, y3] = pair_post(m);
    Quaternion::new(y1, y3, y0, y2)
}

#[inline]
fn sqt_post<T: Scalar>(p: [T; 9]) -> Quaternion<T> {
    Quaternion::new(
        T::sum(&[(Plus, &p[0]), (Plus, &p[2]), (Plus, &p[6]), (Plus, &p[8])]),
        T::sum(&[(Minus, &p[0]), (Plus, &p[1]), (Minus, &p[6]), (Plus, &p[7])]),
        T::sum(&[(Minus, &p[0]), (Minus, &p[2]), (Plus, &p[3]), (Plus, &p[5])]),
        T::sum(&[(Plus, &p[0]), (Minus, &p[1]), (Minus, &p[3]), (Plus, &p[4])]),
    )
}

/// `s q t`: nine multiplications, six two-input and four four-input adders.
#[inline]
pub fn two_sided_mul<T: Scalar>(plan: &TwoSidedPlan<T>, q: &Quaternion<T>) -> Quaternion<T> {
    let q01 = diff(&q.q0, &q.q1);
    let q23 = diff(&q.q2, &q.q3);
    let q02 = diff(&q.q0, &q.q2);
    let q13 = diff(&q.q1, &q.q3);
    let q012 = diff(&q01, &q.q2);
    let cross = T::sum(&[(Plus, &q.q3), (Plus, &q012)]);
    let p = products(&plan.diag, [&cross, &q02, &q13, &q01, &q.q0, &q.q1, &q23, &q.q2, &q.q3]);
    sqt_post(p)
}

/// `s q t` with the shared pre-addition stage (five two-input pre-adders).
#[inline]
pub fn two_sided_mul_shared<T: Scalar>(plan: &TwoSidedPlan<T>, q: &Quaternion<T>) -> Quaternion<T> {
    let q01 = diff(&q.q0, &q.q1);
    let q23 = diff(&q.q2, &q.q3);
    let cross = diff(&q01, &q23);
    let q02 = diff(&q.q0, &q.q2);
    let q13 = diff(&q.q1, &q.q3);
    let p = products(&plan.diag, [&cross, &q02, &q13, &q01, &q.q0, &q.q1, &q23, &q.q2, &q.q3]);
    sqt_post(p)
}
