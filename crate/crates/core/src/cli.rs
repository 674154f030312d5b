// SPDX-License-Identifier: Apache-2.0

//! Command implementations behind the `quatkern` binary.
//!
//! Exit codes: 0 success, 1 runtime or check failure, 2 usage error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dqft::{self, Method, Multiplier, QImage};
use crate::error::{Error, Result};
use crate::fixedpoint::{error_sweep, sweep_to_csv, SweepConfig, DEFAULT_INTEGER_BITS};
use crate::instrument::{
    build_graph, build_graph_with, cost_report, count_ops, count_ops_with, export_graph, ExportFormat, OpCount,
};
use crate::kernels::{
    left_mul, precompute_left, precompute_right, precompute_two_sided, right_mul, two_sided_mul, two_sided_mul_shared,
    KernelId, SqtPreAdd,
};
use crate::quaternion::{embed_i, embed_j, mul_direct, IQuaternion, JQuaternion, Quaternion};
use crate::scalar::{rational_to_f64, Rational, Scalar};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

/// Maximum componentwise error tolerated between a kernel and the direct
/// product in binary64 with inputs in [-1, 1).
pub const F64_TOLERANCE: f64 = 1e-13;

#[derive(Debug, Parser)]
#[command(name = "quatkern", version, about = "Constant quaternion multiplication kernels")]
pub struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check every kernel against direct Hamilton products.
    Verify {
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long)]
        json: bool,
    },
    /// Operation counts and netlist costs next to the reference figures.
    Count {
        #[arg(long)]
        json: bool,
    },
    /// Export a kernel netlist.
    Netlist {
        #[arg(long)]
        kernel: KernelArg,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fixed-point error sweep over fraction widths, as CSV.
    Fxp {
        #[arg(long, default_value = "sq")]
        kernel: KernelArg,
        #[arg(long, default_value_t = 8)]
        frac_min: u32,
        #[arg(long, default_value_t = 24)]
        frac_max: u32,
        #[arg(long, default_value_t = 4)]
        frac_step: u32,
        #[arg(long, default_value_t = DEFAULT_INTEGER_BITS)]
        integer_bits: u32,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Transform a P6 PPM into a spectrum, or a spectrum back into a PPM.
    Dqft {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value_t = DirectionArg::Forward)]
        direction: DirectionArg,
        #[arg(long, value_enum, default_value_t = MethodArg::Rowcol)]
        method: MethodArg,
    },
    /// Time kernel-based against direct-product transforms of random images.
    Bench {
        /// Square image sizes.
        #[arg(long, value_delimiter = ',', default_value = "4,8,16", value_parser = clap::value_parser!(u64).range(1..))]
        sizes: Vec<u64>,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
        reps: u64,
        #[arg(long, value_enum, default_value_t = MethodArg::Rowcol)]
        method: MethodArg,
        #[arg(long)]
        json: bool,
    },
}

/// Kernel names accepted on the command line.
#[derive(Clone, Copy, Debug)]
pub struct KernelArg(pub KernelId);

impl std::str::FromStr for KernelArg {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.parse().map(KernelArg)
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FormatArg {
    Dot,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DirectionArg {
    Forward,
    Inverse,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum MethodArg {
    Naive,
    Rowcol,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Naive => Method::Naive,
            MethodArg::Rowcol => Method::RowCol,
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, A>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match execute(&cli, out) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILURE,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::InvalidArgument(_) | Error::UnknownKernel(_) | Error::UnknownFormat(_) => EXIT_USAGE,
                _ => EXIT_FAILURE,
            }
        }
    }
}

/// Runs a parsed command. `Ok(false)` is a failed check.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<bool> {
    match &cli.command {
        Command::Verify { trials, json } => {
            let report = verify(*trials, cli.seed);
            let text = if *json { to_json(&report)? } else { report.to_text() };
            out.write_all(text.as_bytes())?;
            Ok(report.passed)
        }
        Command::Count { json } => {
            let rows = count_table()?;
            let text = if *json { to_json(&rows)? } else { count_text(&rows) };
            out.write_all(text.as_bytes())?;
            Ok(rows.iter().all(|r| r.status != Status::Mismatch))
        }
        Command::Netlist { kernel, format, out: path } => {
            let format = match format {
                FormatArg::Dot => ExportFormat::Dot,
                FormatArg::Json => ExportFormat::Json,
            };
            let text = export_graph(&build_graph(kernel.0)?, format)?;
            emit(path.as_deref(), out, &text)?;
            Ok(true)
        }
        Command::Fxp { kernel, frac_min, frac_max, frac_step, integer_bits, trials, out: path } => {
            let widths = fraction_range(*frac_min, *frac_max, *frac_step, *integer_bits)?;
            let mut config = SweepConfig::new(kernel.0, widths, *trials as usize, cli.seed);
            config.integer_bits = *integer_bits;
            let rows = error_sweep(&config)?;
            emit(path.as_deref(), out, &sweep_to_csv(&rows))?;
            Ok(true)
        }
        Command::Dqft { input, output, direction, method } => {
            run_dqft(input, output, *direction, (*method).into())?;
            Ok(true)
        }
        Command::Bench { sizes, reps, method, json } => {
            let rows = bench(sizes, *reps, (*method).into(), cli.seed)?;
            let text = if *json { to_json(&rows)? } else { bench_text(&rows) };
            out.write_all(text.as_bytes())?;
            Ok(true)
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

fn emit(path: Option<&Path>, out: &mut dyn Write, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn fraction_range(min: u32, max: u32, step: u32, integer_bits: u32) -> Result<Vec<u32>> {
    if step == 0 {
        return Err(Error::InvalidArgument("--frac-step must be positive".into()));
    }
    if min > max {
        return Err(Error::InvalidArgument(format!("--frac-min {min} exceeds --frac-max {max}")));
    }
    if integer_bits == 0 || integer_bits + max > 64 {
        return Err(Error::InvalidArgument(format!(
            "{integer_bits} integer bits and up to {max} fraction bits do not fit a 64-bit word"
        )));
    }
    Ok((min..=max).step_by(step as usize).collect())
}

// ---------------------------------------------------------------- verify

#[derive(Clone, Debug, Serialize)]
pub struct VerifyRow {
    pub kernel: String,
    /// Largest componentwise deviation over exact rational inputs.
    pub rational_max_err: f64,
    pub f64_max_err: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub trials: u64,
    pub seed: u64,
    pub f64_tolerance: f64,
    pub rows: Vec<VerifyRow>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn to_text(&self) -> String {
        let mut s = format!("trials {} seed {}\n", self.trials, self.seed);
        let _ = writeln!(s, "{:<12} {:>14} {:>14}  status", "kernel", "rational_max", "f64_max");
        for r in &self.rows {
            let status = if r.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "{:<12} {:>14.3e} {:>14.3e}  {status}", r.kernel, r.rational_max_err, r.f64_max_err);
        }
        let _ = writeln!(s, "{}", if self.passed { "all kernels agree" } else { "kernel disagreement" });
        s
    }
}

#[derive(Clone, Copy)]
enum Checked {
    Left,
    Right,
    TwoSided,
    TwoSidedShared,
}

impl Checked {
    const ALL: [Checked; 4] = [Checked::Left, Checked::Right, Checked::TwoSided, Checked::TwoSidedShared];

    fn name(self) -> &'static str {
        match self {
            Checked::Left => "sq",
            Checked::Right => "qt",
            Checked::TwoSided => "sqt",
            Checked::TwoSidedShared => "sqt_shared",
        }
    }

    /// Kernel output and the direct-product reference.
    fn pair<T: Scalar>(
        self,
        s: &IQuaternion<T>,
        t: &JQuaternion<T>,
        q: &Quaternion<T>,
    ) -> (Quaternion<T>, Quaternion<T>) {
        let (es, et) = (embed_i(s), embed_j(t));
        match self {
            Checked::Left => (left_mul(&precompute_left(s), q), mul_direct(&es, q)),
            Checked::Right => (right_mul(q, &precompute_right(t)), mul_direct(q, &et)),
            Checked::TwoSided => (two_sided_mul(&precompute_two_sided(s, t), q), mul_direct(&mul_direct(&es, q), &et)),
            Checked::TwoSidedShared => {
                (two_sided_mul_shared(&precompute_two_sided(s, t), q), mul_direct(&mul_direct(&es, q), &et))
            }
        }
    }
}

const DYADIC_BITS: u32 = 20;

fn dyadic(rng: &mut ChaCha8Rng) -> Rational {
    let scale = 1i64 << DYADIC_BITS;
    Rational::new(rng.gen_range(-scale..scale) as i128, scale as i128)
}

/// Runs every kernel against the direct product on `trials` random rational
/// and binary64 inputs drawn from [-1, 1).
pub fn verify(trials: u64, seed: u64) -> VerifyReport {
    let mut rows = Vec::new();
    for (idx, kernel) in Checked::ALL.into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(idx as u64));
        let mut rational_max = Rational::from_integer(0);
        for _ in 0..trials {
            let s = IQuaternion::new(dyadic(&mut rng), dyadic(&mut rng));
            let t = JQuaternion::new(dyadic(&mut rng), dyadic(&mut rng));
            let q = Quaternion::new(dyadic(&mut rng), dyadic(&mut rng), dyadic(&mut rng), dyadic(&mut rng));
            let (got, want) = kernel.pair(&s, &t, &q);
            for (a, b) in got.components().into_iter().zip(want.components()) {
                let d = if a > b { a - b } else { b - a };
                if d > rational_max {
                    rational_max = d;
                }
            }
        }
        let mut f64_max = 0.0f64;
        for _ in 0..trials {
            let mut u = || rng.gen_range(-1.0..1.0);
            let s = IQuaternion::new(u(), u());
            let t = JQuaternion::new(u(), u());
            let q = Quaternion::new(u(), u(), u(), u());
            let (got, want) = kernel.pair(&s, &t, &q);
            f64_max = f64_max.max(got.max_abs_diff(&want));
        }
        let passed = rational_max == Rational::from_integer(0) && f64_max <= F64_TOLERANCE;
        rows.push(VerifyRow {
            kernel: kernel.name().into(),
            rational_max_err: rational_to_f64(&rational_max),
            f64_max_err: f64_max,
            passed,
        });
    }
    let passed = rows.iter().all(|r| r.passed);
    VerifyReport { trials, seed, f64_tolerance: F64_TOLERANCE, rows, passed }
}

// ---------------------------------------------------------------- count

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Match,
    Mismatch,
    /// No reference figure to compare with.
    Unclaimed,
}

/// Reference resource figures for one kernel.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Claim {
    pub multipliers: u64,
    pub two_input_adders: u64,
    /// Adder histogram by fan-in, when one is given.
    pub adders: Option<Vec<(usize, usize)>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CountRow {
    pub kernel: String,
    pub ops: OpCount,
    pub multipliers: usize,
    pub adders: Vec<(usize, usize)>,
    pub two_input_equivalent: usize,
    pub mult_levels: usize,
    pub add_levels: usize,
    pub claim: Option<Claim>,
    pub status: Status,
}

pub fn claim(kernel: KernelId) -> Claim {
    match kernel {
        KernelId::Direct => Claim { multipliers: 16, two_input_adders: 12, adders: None },
        KernelId::Sq | KernelId::Qt => Claim { multipliers: 6, two_input_adders: 6, adders: None },
        KernelId::Sqt => Claim { multipliers: 9, two_input_adders: 18, adders: Some(vec![(2, 6), (4, 4)]) },
    }
}

/// One row per kernel, plus the shared pre-addition variant of `sqt`.
pub fn count_table() -> Result<Vec<CountRow>> {
    let mut rows = Vec::new();
    for kernel in KernelId::ALL {
        let ops = count_ops(kernel);
        let cost = cost_report(&build_graph(kernel)?);
        let claim = claim(kernel);
        let adders: Vec<_> = cost.adders.into_iter().collect();
        let matches = ops.mul_count == claim.multipliers
            && ops.add_count == claim.two_input_adders
            && cost.multipliers as u64 == claim.multipliers
            && cost.two_input_equivalent as u64 == claim.two_input_adders
            && claim.adders.as_ref().is_none_or(|h| *h == adders);
        rows.push(CountRow {
            kernel: kernel.name().into(),
            ops,
            multipliers: cost.multipliers,
            adders,
            two_input_equivalent: cost.two_input_equivalent,
            mult_levels: cost.depth.mult_levels,
            add_levels: cost.depth.add_levels,
            claim: Some(claim),
            status: if matches { Status::Match } else { Status::Mismatch },
        });
    }
    let shared = cost_report(&build_graph_with(KernelId::Sqt, SqtPreAdd::Shared)?);
    rows.push(CountRow {
        kernel: "sqt_shared".into(),
        ops: count_ops_with(KernelId::Sqt, SqtPreAdd::Shared),
        multipliers: shared.multipliers,
        adders: shared.adders.into_iter().collect(),
        two_input_equivalent: shared.two_input_equivalent,
        mult_levels: shared.depth.mult_levels,
        add_levels: shared.depth.add_levels,
        claim: None,
        status: Status::Unclaimed,
    });
    Ok(rows)
}

fn histogram(h: &[(usize, usize)]) -> String {
    let inner: Vec<_> = h.iter().map(|(f, n)| format!("{f}:{n}")).collect();
    format!("{{{}}}", inner.join(","))
}

fn count_text(rows: &[CountRow]) -> String {
    let mut s = format!(
        "{:<11} {:>5} {:>5} {:>12} {:>6} {:>6}  {:<18} {}\n",
        "kernel", "mults", "adds", "adders", "2-in", "depth", "claimed", "status"
    );
    for r in rows {
        let claimed = match &r.claim {
            Some(c) => match &c.adders {
                Some(h) => format!("{} / {} {}", c.multipliers, c.two_input_adders, histogram(h)),
                None => format!("{} / {}", c.multipliers, c.two_input_adders),
            },
            None => "-".into(),
        };
        let status = match r.status {
            Status::Match => "MATCH",
            Status::Mismatch => "MISMATCH",
            Status::Unclaimed => "(alternative pre-addition)",
        };
        let _ = writeln!(
            s,
            "{:<11} {:>5} {:>5} {:>12} {:>6} {:>6}  {:<18} {}",
            r.kernel,
            r.ops.mul_count,
            r.ops.add_count,
            histogram(&r.adders),
            r.two_input_equivalent,
            format!("{}/{}", r.mult_levels, r.add_levels),
            claimed,
            status
        );
    }
    s
}

// ---------------------------------------------------------------- dqft

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn run_dqft(input: &Path, output: &Path, direction: DirectionArg, method: Method) -> Result<()> {
    match direction {
        DirectionArg::Forward => {
            let img = dqft::rgb_to_qimage(&dqft::read_ppm(open(input)?)?)?;
            let spectrum = dqft::dqft_forward(&img, method);
            dqft::write_spectrum(create(output)?, &spectrum)
        }
        DirectionArg::Inverse => {
            let spectrum = dqft::read_spectrum(open(input)?)?;
            let img = dqft::dqft_inverse(&spectrum, method);
            dqft::write_ppm(create(output)?, &dqft::qimage_to_rgb(&img))
        }
    }
}

// ---------------------------------------------------------------- bench

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub size: u64,
    pub method: String,
    pub kernel_ms: f64,
    pub direct_ms: f64,
    pub kernel_calls: u64,
    pub kernel_ops: OpCount,
    pub baseline_ops: OpCount,
}

fn best_of<F: FnMut()>(reps: u64, mut f: F) -> f64 {
    (0..reps)
        .map(|_| {
            let start = Instant::now();
            f();
            start.elapsed().as_secs_f64() * 1e3
        })
        .fold(f64::INFINITY, f64::min)
}

/// Best-of-`reps` wall times of the forward transform on a random square image.
pub fn bench(sizes: &[u64], reps: u64, method: Method, seed: u64) -> Result<Vec<BenchRow>> {
    if sizes.is_empty() || reps == 0 {
        return Err(Error::InvalidArgument("bench needs at least one size and one repetition".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sizes
        .iter()
        .map(|&size| {
            let n = size as usize;
            let budget = dqft::dqft_op_budget(n, n, method)?;
            let img = QImage::from_fn(n, n, |_, _| {
                Quaternion::new(0.0, rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0))
            })?;
            let run = |m: Multiplier| {
                best_of(reps, || {
                    std::hint::black_box(dqft::transform(&img, dqft::Direction::Forward, method, m));
                })
            };
            Ok(BenchRow {
                size,
                method: method_name(method).into(),
                kernel_ms: run(Multiplier::Kernels),
                direct_ms: run(Multiplier::Direct),
                kernel_calls: budget.kernel_calls,
                kernel_ops: budget.kernel,
                baseline_ops: budget.baseline,
            })
        })
        .collect()
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Naive => "naive",
        Method::RowCol => "rowcol",
    }
}

fn bench_text(rows: &[BenchRow]) -> String {
    let mut s = format!(
        "{:>5} {:<7} {:>11} {:>11} {:>12} {:>12} {:>12} {:>12}\n",
        "size", "method", "kernel_ms", "direct_ms", "kernel_mul", "direct_mul", "kernel_add", "direct_add"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:>5} {:<7} {:>11.3} {:>11.3} {:>12} {:>12} {:>12} {:>12}",
            r.size,
            r.method,
            r.kernel_ms,
            r.direct_ms,
            r.kernel_ops.mul_count,
            r.baseline_ops.mul_count,
            r.kernel_ops.add_count,
            r.baseline_ops.add_count
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (u8, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("quatkern").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn verify_small_run_passes_deterministically() {
        let a = verify(200, 3);
        assert!(a.passed);
        assert!(a.rows.iter().all(|r| r.rational_max_err == 0.0));
        assert_eq!(a.to_text(), verify(200, 3).to_text());
    }

    #[test]
    fn count_table_matches_claims() {
        let rows = count_table().unwrap();
        assert_eq!(rows.len(), 5);
        assert!(rows[..4].iter().all(|r| r.status == Status::Match));
        assert_eq!(rows[3].adders, vec![(2, 6), (4, 4)]);
        assert_eq!(rows[4].adders, vec![(2, 5), (4, 4)]);
        assert_eq!(rows[4].status, Status::Unclaimed);
    }

    #[test]
    fn ranges() {
        assert_eq!(fraction_range(8, 24, 4, 6).unwrap(), vec![8, 12, 16, 20, 24]);
        assert_eq!(fraction_range(5, 5, 1, 6).unwrap(), vec![5]);
        assert!(fraction_range(9, 8, 1, 6).is_err());
        assert!(fraction_range(8, 9, 0, 6).is_err());
        assert!(fraction_range(8, 60, 4, 6).is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_args(&["verify", "--trials", "0"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["netlist", "--kernel", "nope"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["fxp", "--frac-min", "9", "--frac-max", "8"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["bench", "--reps", "0"]).0, EXIT_USAGE);
        assert_eq!(run_args(&[]).0, EXIT_USAGE);
        assert_eq!(run_args(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn bench_budget_columns() {
        let rows = bench(&[2, 3], 1, Method::RowCol, 0).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].kernel_ops, dqft::dqft_op_budget(3, 3, Method::RowCol).unwrap().kernel);
    }
}
