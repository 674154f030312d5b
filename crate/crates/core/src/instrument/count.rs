// SPDX-License-Identifier: Apache-2.0

use std::cell::Cell;
use std::ops::{Add, Mul};
use std::rc::Rc;

use serde::Serialize;

use crate::kernels::{precompute_two_sided, two_sided_mul_shared, KernelId, SqtPreAdd};
use crate::quaternion::{IQuaternion, JQuaternion, Quaternion};
use crate::scalar::{EmbedConstant, Scalar};

/// Arithmetic tally of one evaluation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct OpCount {
    /// Multiplications (by constants, for the factorized kernels).
    pub mul_count: u64,
    /// Two-input additions; a subtraction is one addition.
    pub add_count: u64,
    /// Sign changes. Informational, free in hardware.
    pub neg_count: u64,
}

impl OpCount {
    pub const fn new(mul_count: u64, add_count: u64) -> Self {
        OpCount { mul_count, add_count, neg_count: 0 }
    }
}

impl Add for OpCount {
    type Output = OpCount;
    fn add(self, rhs: OpCount) -> OpCount {
        OpCount {
            mul_count: self.mul_count + rhs.mul_count,
            add_count: self.add_count + rhs.add_count,
            neg_count: self.neg_count + rhs.neg_count,
        }
    }
}

impl Mul<u64> for OpCount {
    type Output = OpCount;
    fn mul(self, k: u64) -> OpCount {
        OpCount { mul_count: self.mul_count * k, add_count: self.add_count * k, neg_count: self.neg_count * k }
    }
}

/// Shared counter that [`Counted`] values report to.
#[derive(Clone, Debug, Default)]
pub struct Tally(Rc<Cell<OpCount>>);

impl Tally {
    pub fn new() -> Self {
        Tally::default()
    }

    pub fn get(&self) -> OpCount {
        self.0.get()
    }

    pub fn reset(&self) {
        self.0.set(OpCount::default());
    }

    /// A tracked variable.
    pub fn input(&self, value: f64) -> Counted {
        Counted { value, tally: Some(self.clone()) }
    }

    fn bump(&self, f: impl FnOnce(&mut OpCount)) {
        let mut c = self.0.get();
        f(&mut c);
        self.0.set(c);
    }
}

/// Binary64 value that reports each operation to its [`Tally`].
///
/// Values created by [`EmbedConstant::from_real`] carry no tally: arithmetic
/// between such constants is precomputation and is not counted.
#[derive(Clone, Debug)]
pub struct Counted {
    value: f64,
    tally: Option<Tally>,
}

impl Counted {
    pub fn value(&self) -> f64 {
        self.value
    }

    fn binary(&self, rhs: &Self, value: f64, f: impl FnOnce(&mut OpCount)) -> Self {
        let tally = self.tally.as_ref().or(rhs.tally.as_ref()).cloned();
        if let Some(t) = &tally {
            t.bump(f);
        }
        Counted { value, tally }
    }
}

impl Scalar for Counted {
    fn zero() -> Self {
        Counted { value: 0.0, tally: None }
    }
    fn add(&self, rhs: &Self) -> Self {
        self.binary(rhs, self.value + rhs.value, |c| c.add_count += 1)
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.binary(rhs, self.value - rhs.value, |c| c.add_count += 1)
    }
    fn neg(&self) -> Self {
        if let Some(t) = &self.tally {
            t.bump(|c| c.neg_count += 1);
        }
        Counted { value: -self.value, tally: self.tally.clone() }
    }
    fn mul(&self, rhs: &Self) -> Self {
        self.binary(rhs, self.value * rhs.value, |c| c.mul_count += 1)
    }
}

impl EmbedConstant for Counted {
    fn from_real(c: f64) -> Self {
        Counted { value: c, tally: None }
    }
}

/// Tallies one evaluation of `kernel` on a tracked input. Plan construction
/// happens on untracked constants and is excluded.
pub fn count_ops(kernel: KernelId) -> OpCount {
    count_ops_with(kernel, SqtPreAdd::Budget)
}

/// As [`count_ops`], choosing the pre-addition form of the two-sided kernel.
pub fn count_ops_with(kernel: KernelId, pre: SqtPreAdd) -> OpCount {
    let tally = Tally::new();
    let q = Quaternion::new(tally.input(0.25), tally.input(-0.5), tally.input(0.75), tally.input(-1.0));
    let s = IQuaternion::<Counted>::from_reals(0.6, -0.8);
    let t = JQuaternion::<Counted>::from_reals(-0.28, 0.96);
    match (kernel, pre) {
        (KernelId::Sqt, SqtPreAdd::Shared) => {
            two_sided_mul_shared(&precompute_two_sided(&s, &t), &q);
        }
        _ => {
            kernel.eval(&s, &t, &q);
        }
    }
    tally.get()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quaternion::mul_direct;

    #[test]
    fn kernel_counts() {
        assert_eq!(count_ops(KernelId::Direct), OpCount::new(16, 12));
        assert_eq!(count_ops(KernelId::Sq), OpCount::new(6, 6));
        assert_eq!(count_ops(KernelId::Qt), OpCount::new(6, 6));
        assert_eq!(count_ops(KernelId::Sqt), OpCount::new(9, 18));
        assert_eq!(count_ops_with(KernelId::Sqt, SqtPreAdd::Shared), OpCount::new(9, 17));
    }

    #[test]
    fn direct_product_of_two_variables() {
        let tally = Tally::new();
        let p = Quaternion::new(tally.input(1.0), tally.input(2.0), tally.input(3.0), tally.input(4.0));
        let q = p.clone();
        let y = mul_direct(&p, &q);
        assert_eq!(tally.get(), OpCount::new(16, 12));
        assert_eq!(y.q0.value(), 1.0 - 4.0 - 9.0 - 16.0);
    }

    #[test]
    fn constant_arithmetic_is_free() {
        let a = Counted::from_real(2.0);
        let b = Counted::from_real(3.0);
        let tally = Tally::new();
        let x = tally.input(5.0);
        let _ = a.add(&b).mul(&a);
        assert_eq!(tally.get(), OpCount::default());
        let y = a.mul(&x).neg();
        assert_eq!(y.value(), -10.0);
        assert_eq!(tally.get(), OpCount { mul_count: 1, add_count: 0, neg_count: 1 });
        tally.reset();
        assert_eq!(tally.get(), OpCount::default());
    }

    #[test]
    fn counts_do_not_depend_on_values() {
        for (s, t) in [((0.0, 0.0), (0.0, 0.0)), ((1.0, 0.0), (1.0, 0.0)), ((-3.5, 2.0), (0.5, 7.0))] {
            let tally = Tally::new();
            let q = Quaternion::new(tally.input(0.0), tally.input(0.0), tally.input(1.0), tally.input(-1.0));
            let s = IQuaternion::<Counted>::from_reals(s.0, s.1);
            let t = JQuaternion::<Counted>::from_reals(t.0, t.1);
            KernelId::Sqt.eval(&s, &t, &q);
            assert_eq!(tally.get().mul_count, 9);
            assert_eq!(tally.get().add_count, 18);
        }
    }

    #[test]
    fn budget_arithmetic() {
        assert_eq!(OpCount::new(9, 18) * 2 + OpCount::new(1, 1), OpCount::new(19, 37));
    }
}
