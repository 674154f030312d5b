// SPDX-License-Identifier: Apache-2.0

//! Two-sided discrete quaternion Fourier transform of colour images.
//!
//! ```text
//! F(v, u) = sum_m sum_n  s(m, v) f(m, n) t(n, u)
//! s(m, v) = cos(2 pi m v / M) - sin(2 pi m v / M) i
//! t(n, u) = cos(2 pi n u / N) - sin(2 pi n u / N) j
//! ```
//!
//! The inverse conjugates both exponentials and scales by `1 / (M N)`.
//! Every term of the naive double sum is one two-sided kernel call. The
//! row-column method first sums left kernels over `m`, then right kernels
//! over `n`. Both accumulate in index order, so results are reproducible.

use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instrument::{count_ops, OpCount};
use crate::kernels::{left_mul, precompute_two_sided, right_mul, two_sided_mul, KernelId, TwoSidedPlan};
use crate::quaternion::{embed_i, embed_j, mul_direct, Quaternion};
use crate::scalar::{EmbedConstant, Scalar};

mod io;
mod twiddle;

pub use io::{
    qimage_to_rgb, read_ppm, read_spectrum, rgb_to_qimage, write_ppm, write_spectrum, RgbImage, SPECTRUM_MAGIC,
};
pub use twiddle::{Direction, TwiddleTables};

/// `rows x cols` grid of quaternions in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct QImage<T = f64> {
    rows: usize,
    cols: usize,
    data: Vec<Quaternion<T>>,
}

impl<T> QImage<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<Quaternion<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape(format!("image must be at least 1x1, got {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::Shape(format!("{rows}x{cols} image given {} pixels", data.len())));
        }
        Ok(QImage { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Quaternion<T>) -> Result<Self> {
        let data = (0..rows * cols).map(|idx| f(idx / cols, idx % cols)).collect();
        QImage::new(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> &Quaternion<T> {
        &self.data[row * self.cols + col]
    }

    pub fn pixels(&self) -> &[Quaternion<T>] {
        &self.data
    }
}

impl QImage<f64> {
    pub fn max_abs_diff(&self, other: &QImage<f64>) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    /// Double sum with one two-sided kernel per term. O(M^2 N^2).
    Naive,
    /// Left kernels along columns, then right kernels along rows.
    RowCol,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Method::Naive),
            "rowcol" => Ok(Method::RowCol),
            other => Err(Error::InvalidArgument(format!("unknown method `{other}`"))),
        }
    }
}

/// What performs the constant multiplications inside a transform.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Multiplier {
    /// The factorized kernels with precomputed plans.
    #[default]
    Kernels,
    /// Full Hamilton products of the embedded exponentials.
    Direct,
}

pub fn dqft_forward(img: &QImage, method: Method) -> QImage {
    transform(img, Direction::Forward, method, Multiplier::Kernels)
}

pub fn dqft_inverse(spectrum: &QImage, method: Method) -> QImage {
    transform(spectrum, Direction::Inverse, method, Multiplier::Kernels)
}

/// The transform over any scalar that can embed the exponentials.
pub fn transform<T: EmbedConstant>(
    img: &QImage<T>,
    direction: Direction,
    method: Method,
    multiplier: Multiplier,
) -> QImage<T> {
    let tw = TwiddleTables::<T>::new(img.rows, img.cols, direction);
    let out = match method {
        Method::Naive => naive(img, &tw, multiplier),
        Method::RowCol => row_col(img, &tw, multiplier),
    };
    match direction {
        Direction::Forward => out,
        Direction::Inverse => {
            let scale = T::from_real(1.0 / (img.rows * img.cols) as f64);
            let data = out.data.iter().map(|q| q.scale(&scale)).collect();
            QImage { data, ..out }
        }
    }
}

fn accumulate<T: Scalar>(terms: impl Iterator<Item = Quaternion<T>>) -> Quaternion<T> {
    terms.reduce(|acc, x| acc.add(&x)).unwrap_or_else(Quaternion::zero)
}

fn naive<T: EmbedConstant>(img: &QImage<T>, tw: &TwiddleTables<T>, multiplier: Multiplier) -> QImage<T> {
    let (rows, cols) = (img.rows, img.cols);
    let plans: Vec<TwoSidedPlan<T>> = match multiplier {
        Multiplier::Kernels => (0..rows * rows * cols * cols)
            .map(|idx| {
                let (mv, nu) = (idx / (cols * cols), idx % (cols * cols));
                precompute_two_sided(tw.left(mv / rows, mv % rows), tw.right(nu / cols, nu % cols))
            })
            .collect(),
        Multiplier::Direct => Vec::new(),
    };
    let term = |m: usize, v: usize, n: usize, u: usize| {
        let f = img.get(m, n);
        match multiplier {
            Multiplier::Kernels => {
                let plan = &plans[(m * rows + v) * cols * cols + n * cols + u];
                two_sided_mul(plan, f)
            }
            Multiplier::Direct => mul_direct(&mul_direct(&embed_i(tw.left(m, v)), f), &embed_j(tw.right(n, u))),
        }
    };
    let data = (0..rows * cols)
        .map(|idx| {
            let (v, u) = (idx / cols, idx % cols);
            accumulate((0..rows).flat_map(|m| (0..cols).map(move |n| (m, n))).map(|(m, n)| term(m, v, n, u)))
        })
        .collect();
    QImage { rows, cols, data }
}

fn row_col<T: EmbedConstant>(img: &QImage<T>, tw: &TwiddleTables<T>, multiplier: Multiplier) -> QImage<T> {
    let (rows, cols) = (img.rows, img.cols);
    let partial: Vec<Quaternion<T>> = (0..rows * cols)
        .map(|idx| {
            let (v, n) = (idx / cols, idx % cols);
            accumulate((0..rows).map(|m| match multiplier {
                Multiplier::Kernels => left_mul(tw.left_plan(m, v), img.get(m, n)),
                Multiplier::Direct => mul_direct(&embed_i(tw.left(m, v)), img.get(m, n)),
            }))
        })
        .collect();
    let data = (0..rows * cols)
        .map(|idx| {
            let (v, u) = (idx / cols, idx % cols);
            accumulate((0..cols).map(|n| {
                let g = &partial[v * cols + n];
                match multiplier {
                    Multiplier::Kernels => right_mul(g, tw.right_plan(n, u)),
                    Multiplier::Direct => mul_direct(g, &embed_j(tw.right(n, u))),
                }
            }))
        })
        .collect();
    QImage { rows, cols, data }
}

/// Arithmetic of one forward transform with the kernels and with direct products.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DqftBudget {
    /// Kernel invocations (equal for both variants).
    pub kernel_calls: u64,
    pub kernel: OpCount,
    pub baseline: OpCount,
}

impl DqftBudget {
    pub fn mult_ratio(&self) -> (u64, u64) {
        (self.kernel.mul_count, self.baseline.mul_count)
    }
}

/// Analytic operation budget of a forward transform.
///
/// Naive: `M^2 N^2` two-sided kernel calls. Row-column: `M^2 N` left and
/// `M N^2` right kernel calls. The baseline charges one direct Hamilton
/// product (16 multiplications, 12 additions) per kernel call. Both sides
/// include the accumulation, four scalar additions per quaternion sum.
pub fn dqft_op_budget(rows: usize, cols: usize, method: Method) -> Result<DqftBudget> {
    if rows == 0 || cols == 0 {
        return Err(Error::Shape(format!("transform must be at least 1x1, got {rows}x{cols}")));
    }
    let (m, n) = (rows as u64, cols as u64);
    let direct = count_ops(KernelId::Direct);
    let (kernel_calls, kernel, accumulation) = match method {
        Method::Naive => {
            let calls = m * m * n * n;
            (calls, count_ops(KernelId::Sqt) * calls, OpCount::new(0, 4 * m * n * (m * n - 1)))
        }
        Method::RowCol => {
            let (left, right) = (m * m * n, m * n * n);
            let kernels = count_ops(KernelId::Sq) * left + count_ops(KernelId::Qt) * right;
            (left + right, kernels, OpCount::new(0, 4 * m * n * (m - 1) + 4 * m * n * (n - 1)))
        }
    };
    Ok(DqftBudget { kernel_calls, kernel: kernel + accumulation, baseline: direct * kernel_calls + accumulation })
}
