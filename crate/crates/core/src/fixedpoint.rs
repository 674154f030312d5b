// SPDX-License-Identifier: Apache-2.0

//! Fixed-point evaluation of the kernels and word-length error sweeps.
//!
//! Values are two's-complement integers scaled by `2^-fraction_bits`.
//! Products are formed exactly and rounded once, to nearest with ties to
//! even, back to `fraction_bits`. Sums are exact until they leave the
//! representable range.

use std::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::{
    left_mul, precompute_left, precompute_right, precompute_two_sided, right_mul, two_sided_mul, KernelId, LeftPlan,
    RightPlan, TwoSidedPlan,
};
use crate::quaternion::{embed_i, mul_direct, IQuaternion, JQuaternion, Quaternion};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum OverflowPolicy {
    #[default]
    Saturate,
    Error,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FixedPointFormat {
    integer_bits: u32,
    fraction_bits: u32,
    overflow: OverflowPolicy,
}

impl FixedPointFormat {
    /// `integer_bits` includes the sign bit.
    pub fn new(integer_bits: u32, fraction_bits: u32, overflow: OverflowPolicy) -> Result<Self> {
        if integer_bits == 0 {
            return Err(Error::Format("at least one integer (sign) bit is required".into()));
        }
        if integer_bits + fraction_bits > 64 {
            return Err(Error::Format(format!("{integer_bits}+{fraction_bits} bits exceed 64")));
        }
        Ok(FixedPointFormat { integer_bits, fraction_bits, overflow })
    }

    pub fn integer_bits(&self) -> u32 {
        self.integer_bits
    }

    pub fn fraction_bits(&self) -> u32 {
        self.fraction_bits
    }

    pub fn overflow(&self) -> OverflowPolicy {
        self.overflow
    }

    pub fn total_bits(&self) -> u32 {
        self.integer_bits + self.fraction_bits
    }

    pub fn min_raw(&self) -> i64 {
        (-(1i128 << (self.total_bits() - 1))) as i64
    }

    pub fn max_raw(&self) -> i64 {
        ((1i128 << (self.total_bits() - 1)) - 1) as i64
    }

    /// `2^-fraction_bits`.
    pub fn step(&self) -> f64 {
        (-(self.fraction_bits as f64)).exp2()
    }

    pub fn min_value(&self) -> f64 {
        self.min_raw() as f64 * self.step()
    }

    pub fn max_value(&self) -> f64 {
        self.max_raw() as f64 * self.step()
    }

    /// Clamps into range; the flag reports whether clamping was needed.
    fn fit(&self, raw: i128) -> (i64, bool) {
        let (lo, hi) = (self.min_raw() as i128, self.max_raw() as i128);
        if raw < lo {
            (lo as i64, true)
        } else if raw > hi {
            (hi as i64, true)
        } else {
            (raw as i64, false)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FixedPointValue {
    raw: i64,
    format: FixedPointFormat,
}

impl FixedPointValue {
    pub fn raw(&self) -> i64 {
        self.raw
    }

    pub fn format(&self) -> FixedPointFormat {
        self.format
    }

    pub fn to_f64(&self) -> f64 {
        self.raw as f64 * self.format.step()
    }
}

/// Round-to-nearest-even of `x * 2^f`, saturated or rejected per the format's policy.
pub fn quantize(x: f64, format: FixedPointFormat) -> Result<FixedPointValue> {
    let (raw, overflowed) = quantize_raw(x, format);
    if overflowed && format.overflow == OverflowPolicy::Error {
        return Err(Error::Overflow);
    }
    Ok(FixedPointValue { raw, format })
}

fn quantize_raw(x: f64, format: FixedPointFormat) -> (i64, bool) {
    if x.is_nan() {
        return (0, true);
    }
    let scaled = (x * (format.fraction_bits as f64).exp2()).round_ties_even();
    // Values beyond i128 saturate in the cast and are clamped by `fit` anyway.
    format.fit(scaled as i128)
}

/// `x / 2^f`, rounded to nearest with ties to even.
fn shift_round_even(x: i128, f: u32) -> i128 {
    if f == 0 {
        return x;
    }
    let q = x >> f;
    let rem = x - (q << f);
    let half = 1i128 << (f - 1);
    if rem > half || (rem == half && q & 1 == 1) {
        q + 1
    } else {
        q
    }
}

/// Fixed-point scalar used to run the generic kernels.
///
/// `overflowed` is sticky: it is set when this value or any operand it was
/// computed from left the representable range.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fx {
    raw: i64,
    // `None` only for `zero()`, which is the same in every format.
    format: Option<FixedPointFormat>,
    overflowed: bool,
}

impl Fx {
    pub fn quantize(x: f64, format: FixedPointFormat) -> Fx {
        let (raw, overflowed) = quantize_raw(x, format);
        Fx { raw, format: Some(format), overflowed }
    }

    pub fn raw(&self) -> i64 {
        self.raw
    }

    pub fn overflowed(&self) -> bool {
        self.overflowed
    }

    pub fn to_f64(&self) -> f64 {
        self.format.map_or(0.0, |f| self.raw as f64 * f.step())
    }

    fn combine(&self, rhs: &Fx, op: impl FnOnce(i128, i128, u32) -> i128) -> Fx {
        let Some(format) = self.format.or(rhs.format) else {
            return Fx::zero();
        };
        let value = op(self.raw as i128, rhs.raw as i128, format.fraction_bits);
        let (raw, clipped) = format.fit(value);
        Fx { raw, format: Some(format), overflowed: self.overflowed || rhs.overflowed || clipped }
    }
}

impl Scalar for Fx {
    fn zero() -> Self {
        Fx { raw: 0, format: None, overflowed: false }
    }
    fn add(&self, rhs: &Self) -> Self {
        self.combine(rhs, |a, b, _| a + b)
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.combine(rhs, |a, b, _| a - b)
    }
    fn neg(&self) -> Self {
        let zero = Fx { raw: 0, ..*self };
        zero.sub(self)
    }
    fn mul(&self, rhs: &Self) -> Self {
        self.combine(rhs, |a, b, f| shift_round_even(a * b, f))
    }
}

/// Fixed-point result of one kernel evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct FxpEval {
    pub result: Quaternion<f64>,
    /// Per-component `|fixed - binary64|`.
    pub error: [f64; 4],
    pub overflowed: bool,
}

impl FxpEval {
    pub fn max_error(&self) -> f64 {
        self.error.iter().copied().fold(0.0, f64::max)
    }
}

/// Runs `kernel` entirely in `format` and compares with the binary64 kernel.
///
/// Plan constants are computed in binary64 and quantized once, as a
/// constant ROM would hold them. With [`OverflowPolicy::Error`] any
/// overflow in quantization or arithmetic is returned as [`Error::Overflow`].
pub fn fxp_kernel_eval(
    kernel: KernelId,
    s: &IQuaternion<f64>,
    t: &JQuaternion<f64>,
    q: &Quaternion<f64>,
    format: FixedPointFormat,
) -> Result<FxpEval> {
    let fx = |x: f64| Fx::quantize(x, format);
    let qx = q.map(fx);
    let y = match kernel {
        KernelId::Direct => mul_direct(&embed_i(s).map(fx), &qx),
        KernelId::Sq => {
            let p = precompute_left(s);
            left_mul(&LeftPlan::from_constants(fx(*p.alpha()), fx(*p.d1()), fx(*p.d2())), &qx)
        }
        KernelId::Qt => {
            let p = precompute_right(t);
            right_mul(&qx, &RightPlan::from_constants(fx(*p.gamma()), fx(*p.e1()), fx(*p.e2())))
        }
        KernelId::Sqt => {
            let p = precompute_two_sided(s, t);
            two_sided_mul(&TwoSidedPlan::from_constants(p.constants().map(fx)), &qx)
        }
    };
    let overflowed = y.components().iter().any(|c| c.overflowed());
    if overflowed && format.overflow == OverflowPolicy::Error {
        return Err(Error::Overflow);
    }
    let reference = kernel.eval(s, t, q);
    let result = y.map(|c| c.to_f64());
    let error = std::array::from_fn(|k| (result.components()[k] - reference.components()[k]).abs());
    Ok(FxpEval { result, error, overflowed })
}

/// Parameters of a word-length sweep.
#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub kernel: KernelId,
    /// Fixed constants, or `None` to draw `s` and `t` per trial from [-1, 1).
    pub constants: Option<(IQuaternion<f64>, JQuaternion<f64>)>,
    pub integer_bits: u32,
    pub fraction_bits: Vec<u32>,
    pub trials: usize,
    pub seed: u64,
}

impl SweepConfig {
    pub fn new(kernel: KernelId, fraction_bits: Vec<u32>, trials: usize, seed: u64) -> Self {
        SweepConfig { kernel, constants: None, integer_bits: DEFAULT_INTEGER_BITS, fraction_bits, trials, seed }
    }
}

/// Headroom for the two-sided kernel, whose products reach |16| for operands in [-1, 1).
pub const DEFAULT_INTEGER_BITS: u32 = 6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub fraction_bits: u32,
    pub max_abs_err: f64,
    pub rms_err: f64,
    /// Trials in which some value saturated.
    pub overflows: usize,
}

/// Error statistics per fraction width over uniform random inputs in [-1, 1).
///
/// The same input sample is reused for every width; results depend only on
/// the configuration.
pub fn error_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    if config.trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    if config.fraction_bits.is_empty() {
        return Err(Error::InvalidArgument("no fraction widths to sweep".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut unit = move || rng.gen_range(-1.0..1.0);
    let samples: Vec<_> = (0..config.trials)
        .map(|_| {
            let (s, t) = match config.constants {
                Some(c) => c,
                None => (IQuaternion::new(unit(), unit()), JQuaternion::new(unit(), unit())),
            };
            (s, t, Quaternion::new(unit(), unit(), unit(), unit()))
        })
        .collect();

    config
        .fraction_bits
        .iter()
        .map(|&f| {
            let format = FixedPointFormat::new(config.integer_bits, f, OverflowPolicy::Saturate)?;
            let mut max_abs_err = 0.0f64;
            let mut sum_sq = 0.0;
            let mut overflows = 0;
            for (s, t, q) in &samples {
                let eval = fxp_kernel_eval(config.kernel, s, t, q, format)?;
                max_abs_err = max_abs_err.max(eval.max_error());
                sum_sq += eval.error.iter().map(|e| e * e).sum::<f64>();
                overflows += usize::from(eval.overflowed);
            }
            let rms_err = (sum_sq / (4 * samples.len()) as f64).sqrt();
            Ok(SweepRow { fraction_bits: f, max_abs_err, rms_err, overflows })
        })
        .collect()
}

pub const CSV_HEADER: &str = "fraction_bits,max_abs_err,rms_err,overflows";

pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{},{:e},{:e},{}", r.fraction_bits, r.max_abs_err, r.rms_err, r.overflows);
    }
    out
}
