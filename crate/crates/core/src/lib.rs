// SPDX-License-Identifier: Apache-2.0

//! Hardware-oriented multiplication of quaternions by constant i- and
//! j-quaternions.
//!
//! * [`quaternion`]: quaternion type and the direct 16-multiplication product.
//! * [`kernels`]: the factorized `s q`, `q t` and `s q t` kernels and their
//!   precomputed plans.
//! * [`instrument`]: operation counting, dataflow netlists and cost reports.
//! * [`fixedpoint`]: fixed-point evaluation and word-length error sweeps.
//! * [`dqft`]: two-sided quaternion Fourier transform of colour images.
//! * [`cli`]: the command implementations behind the `quatkern` binary.

pub mod cli;
pub mod dqft;
pub mod error;
pub mod fixedpoint;
pub mod instrument;
pub mod kernels;
pub mod quaternion;
pub mod scalar;

pub use error::{Error, Result};
pub use kernels::{
    apply_factored, left_mul, precompute_left, precompute_right, precompute_two_sided, right_mul, two_sided_mul,
    FactorMatrices, KernelId, LeftPlan, RightPlan, SignMatrix, TwoSidedPlan,
};
pub use quaternion::{embed_i, embed_j, mul_direct, norm_sq, IQuaternion, JQuaternion, Quaternion};
pub use scalar::{EmbedConstant, Rational, Scalar, Sign};
