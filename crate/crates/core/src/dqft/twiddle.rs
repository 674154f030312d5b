// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::TAU;

use crate::kernels::{precompute_left, precompute_right, LeftPlan, RightPlan};
use crate::quaternion::{IQuaternion, JQuaternion};
use crate::scalar::EmbedConstant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Inverse,
}

/// `(cos(2 pi k / n), -+sin(2 pi k / n))` with `k` already reduced mod `n`.
/// Index 0 is exactly `(1, 0)`.
pub(crate) fn unit_root(k: usize, n: usize, direction: Direction) -> (f64, f64) {
    if k == 0 {
        return (1.0, 0.0);
    }
    let theta = TAU * k as f64 / n as f64;
    let sin = match direction {
        Direction::Forward => -theta.sin(),
        Direction::Inverse => theta.sin(),
    };
    (theta.cos(), sin)
}

/// Exponentials of a transform of size `rows x cols`, stored as kernel plans.
///
/// `left(m, v)` is the i-quaternion `cos(2 pi m v / M) -+ sin(2 pi m v / M) i`
/// and `right(n, u)` the matching j-quaternion over `N`; the sine sign is
/// negative for the forward direction.
#[derive(Clone, Debug)]
pub struct TwiddleTables<T> {
    rows: usize,
    cols: usize,
    direction: Direction,
    left: Vec<IQuaternion<T>>,
    right: Vec<JQuaternion<T>>,
    left_plans: Vec<LeftPlan<T>>,
    right_plans: Vec<RightPlan<T>>,
}

impl<T: EmbedConstant> TwiddleTables<T> {
    pub fn new(rows: usize, cols: usize, direction: Direction) -> Self {
        let left: Vec<IQuaternion<T>> = (0..rows * rows)
            .map(|idx| {
                let (m, v) = (idx / rows, idx % rows);
                let (c, s) = unit_root(m * v % rows, rows, direction);
                IQuaternion::from_reals(c, s)
            })
            .collect();
        let right: Vec<JQuaternion<T>> = (0..cols * cols)
            .map(|idx| {
                let (n, u) = (idx / cols, idx % cols);
                let (c, s) = unit_root(n * u % cols, cols, direction);
                JQuaternion::from_reals(c, s)
            })
            .collect();
        let left_plans = left.iter().map(precompute_left).collect();
        let right_plans = right.iter().map(precompute_right).collect();
        TwiddleTables { rows, cols, direction, left, right, left_plans, right_plans }
    }
}

impl<T> TwiddleTables<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn left(&self, m: usize, v: usize) -> &IQuaternion<T> {
        &self.left[m * self.rows + v]
    }

    pub fn right(&self, n: usize, u: usize) -> &JQuaternion<T> {
        &self.right[n * self.cols + u]
    }

    pub fn left_plan(&self, m: usize, v: usize) -> &LeftPlan<T> {
        &self.left_plans[m * self.rows + v]
    }

    pub fn right_plan(&self, n: usize, u: usize) -> &RightPlan<T> {
        &self.right_plans[n * self.cols + u]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_norm_and_exact_zero_index() {
        for (m, n) in [(1, 1), (3, 5), (8, 8), (16, 7)] {
            for dir in [Direction::Forward, Direction::Inverse] {
                let tw = TwiddleTables::<f64>::new(m, n, dir);
                for a in 0..m {
                    for b in 0..m {
                        let s = tw.left(a, b);
                        assert!((s.alpha * s.alpha + s.beta * s.beta - 1.0).abs() <= 1e-15);
                    }
                    assert_eq!(*tw.left(0, a), IQuaternion::new(1.0, 0.0));
                    assert_eq!(*tw.left(a, 0), IQuaternion::new(1.0, 0.0));
                }
                for a in 0..n {
                    for b in 0..n {
                        let t = tw.right(a, b);
                        assert!((t.gamma * t.gamma + t.delta * t.delta - 1.0).abs() <= 1e-15);
                    }
                    assert_eq!(*tw.right(0, a), JQuaternion::new(1.0, 0.0));
                    assert_eq!(*tw.right(a, 0), JQuaternion::new(1.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn forward_and_inverse_are_conjugate() {
        let f = TwiddleTables::<f64>::new(4, 4, Direction::Forward);
        let i = TwiddleTables::<f64>::new(4, 4, Direction::Inverse);
        assert_eq!(*f.left(1, 1), IQuaternion::new((TAU / 4.0).cos(), -1.0));
        assert_eq!(f.left(1, 1).beta, -i.left(1, 1).beta);
        assert_eq!(f.right(1, 3).delta, -i.right(1, 3).delta);
        assert_eq!(f.left_plan(1, 1).d1(), &((TAU / 4.0).cos() - 1.0));
    }
}
