// SPDX-License-Identifier: Apache-2.0

//! Factorized matrix-vector evaluation: permutation . post-add . diagonal . pre-add.

use std::borrow::Cow;

use crate::error::{Error, Result};
use crate::quaternion::Quaternion;
use crate::scalar::{Scalar, Sign};

/// Dense row-major matrix with entries in {-1, 0, 1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignMatrix {
    rows: usize,
    cols: usize,
    entries: Cow<'static, [i8]>,
}

impl SignMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<i8>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!("{rows}x{cols} matrix given {} entries", entries.len())));
        }
        if let Some(bad) = entries.iter().find(|e| !(-1..=1).contains(*e)) {
            return Err(Error::Shape(format!("entry {bad} is not in {{-1, 0, 1}}")));
        }
        Ok(SignMatrix { rows, cols, entries: Cow::Owned(entries) })
    }

    pub(crate) const fn from_static(rows: usize, cols: usize, entries: &'static [i8]) -> Self {
        SignMatrix { rows, cols, entries: Cow::Borrowed(entries) }
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0; n * n];
        for k in 0..n {
            entries[k * n + k] = 1;
        }
        SignMatrix { rows: n, cols: n, entries: Cow::Owned(entries) }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[i8] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    /// Fan-in of each row (number of non-zero entries).
    pub fn fan_in(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.rows).map(|r| self.row(r).iter().filter(|e| **e != 0).count())
    }

    /// Each row becomes one signed sum over its non-zero columns, in column order.
    /// Rows with a single `+1` are wires and perform no arithmetic.
    pub fn apply<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let terms: Vec<(Sign, &T)> =
                    self.row(r).iter().zip(x).filter_map(|(e, v)| Sign::from_entry(*e).map(|s| (s, v))).collect();
                T::sum(&terms)
            })
            .collect()
    }

    fn check_stage(&self, expected_cols: usize, what: &str) -> Result<()> {
        if self.cols != expected_cols {
            return Err(Error::Shape(format!("{what} has {} columns but receives {expected_cols} values", self.cols)));
        }
        Ok(())
    }
}

/// The four stages of a factorized constant-multiplication scheme.
#[derive(Clone, Debug)]
pub struct FactorMatrices<'a, T: Clone> {
    pre: Cow<'a, [SignMatrix]>,
    diag: Cow<'a, [T]>,
    post: Cow<'a, SignMatrix>,
    perm: Cow<'a, [usize]>,
}

impl<'a, T: Clone> FactorMatrices<'a, T> {
    /// Validates that the stages compose on a 4-vector.
    ///
    /// `pre` is applied first-to-last; an empty chain passes the input through.
    /// `perm[i]` names the post-addition row that becomes output `i`.
    pub fn new(pre: Vec<SignMatrix>, diag: Vec<T>, post: SignMatrix, perm: Vec<usize>) -> Result<Self> {
        let mut width = 4;
        for (k, stage) in pre.iter().enumerate() {
            stage.check_stage(width, &format!("pre-addition stage {k}"))?;
            width = stage.rows;
        }
        if diag.len() != width {
            return Err(Error::Shape(format!("diagonal has {} entries but pre-addition yields {width}", diag.len())));
        }
        post.check_stage(width, "post-addition matrix")?;
        if post.rows != 4 {
            return Err(Error::Shape(format!("post-addition yields {} values, not 4", post.rows)));
        }
        let mut seen = [false; 4];
        if perm.len() != 4 || perm.iter().any(|&p| p >= 4 || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::Shape(format!("{perm:?} is not a permutation of 0..4")));
        }
        Ok(FactorMatrices {
            pre: Cow::Owned(pre),
            diag: Cow::Owned(diag),
            post: Cow::Owned(post),
            perm: Cow::Owned(perm),
        })
    }

    pub(crate) fn borrowed(pre: &'a [SignMatrix], diag: &'a [T], post: &'a SignMatrix, perm: &'a [usize]) -> Self {
        FactorMatrices {
            pre: Cow::Borrowed(pre),
            diag: Cow::Borrowed(diag),
            post: Cow::Borrowed(post),
            perm: Cow::Borrowed(perm),
        }
    }

    pub fn pre(&self) -> &[SignMatrix] {
        &self.pre
    }

    pub fn diag(&self) -> &[T] {
        &self.diag
    }

    pub fn post(&self) -> &SignMatrix {
        &self.post
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }
}

/// Evaluates `P . A_post . D . A_pre x`. Only the diagonal stage multiplies.
pub fn apply_factored<T: Scalar>(m: &FactorMatrices<'_, T>, x: &Quaternion<T>) -> Quaternion<T> {
    let mut v: Vec<T> = x.components().into_iter().cloned().collect();
    for stage in m.pre.iter() {
        v = stage.apply(&v);
    }
    let prods: Vec<T> = m.diag.iter().zip(&v).map(|(c, x)| c.mul(x)).collect();
    let y = m.post.apply(&prods);
    let p = &m.perm;
    Quaternion::new(y[p[0]].clone(), y[p[1]].clone(), y[p[2]].clone(), y[p[3]].clone())
}
