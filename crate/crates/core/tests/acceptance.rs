// SPDX-License-Identifier: Apache-2.0

//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use quatkern::dqft::{dqft_forward, dqft_inverse, dqft_op_budget, Method, QImage};
use quatkern::fixedpoint::{error_sweep, SweepConfig};
use quatkern::instrument::{
    bindings, build_graph, build_graph_with, cost_report, count_ops, evaluate_graph, export_graph, ExportFormat,
};
use quatkern::kernels::SqtPreAdd;
use quatkern::{
    apply_factored, embed_i, embed_j, left_mul, mul_direct, precompute_left, precompute_right, precompute_two_sided,
    right_mul, two_sided_mul, IQuaternion, JQuaternion, KernelId, Quaternion, Rational,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: u64) -> Result<(), String> {
    ensure(elapsed <= Duration::from_secs(limit_s), || format!("took {elapsed:.2?}, limit {limit_s}s"))
}

/// Product of basis quaternions `e_a e_b = sign * e_c`, from i^2 = j^2 = k^2 = ijk = -1.
fn basis(a: usize, b: usize) -> (i128, usize) {
    const TABLE: [[(i128, usize); 4]; 4] = [
        [(1, 0), (1, 1), (1, 2), (1, 3)],
        [(1, 1), (-1, 0), (1, 3), (-1, 2)],
        [(1, 2), (-1, 3), (-1, 0), (1, 1)],
        [(1, 3), (1, 2), (-1, 1), (-1, 0)],
    ];
    TABLE[a][b]
}

/// Brute-force Hamilton product over integers, independent of the library.
fn oracle_product(p: [i128; 4], q: [i128; 4]) -> [i128; 4] {
    let mut out = [0; 4];
    for (a, pa) in p.iter().enumerate() {
        for (b, qb) in q.iter().enumerate() {
            let (sign, c) = basis(a, b);
            out[c] += sign * pa * qb;
        }
    }
    out
}

fn dyadic(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(rng.gen_range(-(1i128 << 20)..(1i128 << 20)), 1 << 20)
}

fn rational_quat(rng: &mut ChaCha8Rng) -> Quaternion<Rational> {
    Quaternion::new(dyadic(rng), dyadic(rng), dyadic(rng), dyadic(rng))
}

fn unit_quat(rng: &mut ChaCha8Rng) -> Quaternion<f64> {
    Quaternion::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    )
}

fn operation_counts() -> Check {
    let start = Instant::now();
    let expected = [(KernelId::Direct, 16, 12), (KernelId::Sq, 6, 6), (KernelId::Qt, 6, 6), (KernelId::Sqt, 9, 18)];
    for (kernel, mults, adds) in expected {
        let ops = count_ops(kernel);
        ensure(ops.mul_count == mults && ops.add_count == adds, || format!("{kernel} tally {ops:?}"))?;
        let cost = cost_report(&build_graph(kernel).map_err(|e| e.to_string())?);
        ensure(cost.multipliers as u64 == mults && cost.two_input_equivalent as u64 == adds, || {
            format!("{kernel} netlist {cost:?}")
        })?;
        if kernel == KernelId::Sqt {
            let hist: Vec<_> = cost.adders.into_iter().collect();
            ensure(hist == [(2, 6), (4, 4)], || format!("sqt adder histogram {hist:?}"))?;
        }
    }
    within(start.elapsed(), 1)?;
    Ok(format!("16/12, 6/6, 6/6, 9 with {{2:6,4:4}} = 18 in {:.2?}", start.elapsed()))
}

fn oracle_equivalence() -> Check {
    const TRIALS: usize = 100_000;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_f64 = 0.0f64;
    for _ in 0..TRIALS {
        let s = IQuaternion::new(dyadic(&mut rng), dyadic(&mut rng));
        let t = JQuaternion::new(dyadic(&mut rng), dyadic(&mut rng));
        let q = rational_quat(&mut rng);
        let (es, et) = (embed_i(&s), embed_j(&t));
        ensure(left_mul(&precompute_left(&s), &q) == mul_direct(&es, &q), || format!("sq differs at s={s:?} q={q:?}"))?;
        ensure(right_mul(&q, &precompute_right(&t)) == mul_direct(&q, &et), || {
            format!("qt differs at t={t:?} q={q:?}")
        })?;
        ensure(two_sided_mul(&precompute_two_sided(&s, &t), &q) == mul_direct(&mul_direct(&es, &q), &et), || {
            format!("sqt differs at s={s:?} t={t:?} q={q:?}")
        })?;

        let s = IQuaternion::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let t = JQuaternion::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let q = unit_quat(&mut rng);
        let (es, et) = (embed_i(&s), embed_j(&t));
        worst_f64 = worst_f64
            .max(left_mul(&precompute_left(&s), &q).max_abs_diff(&mul_direct(&es, &q)))
            .max(right_mul(&q, &precompute_right(&t)).max_abs_diff(&mul_direct(&q, &et)))
            .max(two_sided_mul(&precompute_two_sided(&s, &t), &q).max_abs_diff(&mul_direct(&mul_direct(&es, &q), &et)));
    }
    ensure(worst_f64 <= 1e-13, || format!("binary64 error {worst_f64:e}"))?;
    within(start.elapsed(), 30)?;
    Ok(format!(
        "{TRIALS} inputs per kernel exact over rationals, binary64 max error {worst_f64:e} in {:.2?}",
        start.elapsed()
    ))
}

fn factored_reconstruction() -> Check {
    let expected = oracle_product([2, 3, 0, 0], [1, 2, 3, 4]);
    ensure(expected == [-4, 7, -6, 17], || format!("oracle gives {expected:?}"))?;
    let r = |n: i128| Rational::from_integer(n);
    let plan = precompute_left(&IQuaternion::new(r(2), r(3)));
    let got = apply_factored(&plan.factors(), &Quaternion::from_array([1, 2, 3, 4].map(r)));
    ensure(got == Quaternion::from_array(expected.map(r)), || format!("worked instance gives {got:?}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10_000 {
        let s = IQuaternion::new(dyadic(&mut rng), dyadic(&mut rng));
        let q = rational_quat(&mut rng);
        let plan = precompute_left(&s);
        ensure(apply_factored(&plan.factors(), &q) == mul_direct(&embed_i(&s), &q), || {
            format!("differs at s={s:?} q={q:?}")
        })?;
    }
    Ok("10000 random (s, q) and (2,3)(1,2,3,4) = (-4,7,-6,17)".into())
}

fn netlist_fidelity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let graphs: Vec<_> = KernelId::ALL
        .into_iter()
        .map(|k| (k, build_graph(k)))
        .chain([(KernelId::Sqt, build_graph_with(KernelId::Sqt, SqtPreAdd::Shared))])
        .map(|(k, g)| g.map(|g| (k, g)))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    for _ in 0..1000 {
        let s = IQuaternion::new(dyadic(&mut rng), dyadic(&mut rng));
        let t = JQuaternion::new(dyadic(&mut rng), dyadic(&mut rng));
        let q = rational_quat(&mut rng);
        for (kernel, g) in &graphs {
            let got = evaluate_graph(g, &q, &bindings(*kernel, &s, &t)).map_err(|e| e.to_string())?;
            ensure(got == kernel.eval(&s, &t, &q), || format!("{} netlist differs at q={q:?}", g.name))?;
        }
    }
    for kernel in KernelId::ALL {
        for (format, flag) in [(ExportFormat::Json, "json"), (ExportFormat::Dot, "dot")] {
            let a = export_graph(&build_graph(kernel).unwrap(), format).map_err(|e| e.to_string())?;
            let b = export_graph(&build_graph(kernel).unwrap(), format).map_err(|e| e.to_string())?;
            let out = Command::new(env!("CARGO_BIN_EXE_quatkern"))
                .args(["netlist", "--kernel", kernel.name(), "--format", flag])
                .output()
                .map_err(|e| e.to_string())?;
            ensure(a == b && out.status.success() && out.stdout == a.as_bytes(), || {
                format!("{kernel} {flag} export not byte-identical")
            })?;
        }
    }
    Ok("1000 rational inputs exact for every netlist; exports byte-identical across builds and processes".into())
}

fn dqft_properties() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut random_image = |n: usize| QImage::from_fn(n, n, |_, _| unit_quat(&mut rng)).unwrap();

    let mut worst_round_trip = 0.0f64;
    for n in [8, 16] {
        let f = random_image(n);
        let back = dqft_inverse(&dqft_forward(&f, Method::RowCol), Method::RowCol);
        worst_round_trip = worst_round_trip.max(back.max_abs_diff(&f));
    }
    ensure(worst_round_trip <= 1e-9, || format!("round trip error {worst_round_trip:e}"))?;

    let mut worst_methods = 0.0f64;
    for n in [4, 8] {
        let f = random_image(n);
        worst_methods =
            worst_methods.max(dqft_forward(&f, Method::Naive).max_abs_diff(&dqft_forward(&f, Method::RowCol)));
    }
    ensure(worst_methods <= 1e-10, || format!("naive vs row-column {worst_methods:e}"))?;

    let c = Quaternion::new(0.25, -0.5, 0.75, 1.0);
    for n in [4, 8] {
        let f = QImage::from_fn(n, n, |_, _| c).unwrap();
        for method in [Method::Naive, Method::RowCol] {
            let spec = dqft_forward(&f, method);
            let mn = (n * n) as f64;
            let dc = spec.get(0, 0).max_abs_diff(&c.scale(&mn));
            let leak = spec.pixels()[1..].iter().map(|q| q.max_abs_diff(&Quaternion::zero())).fold(0.0, f64::max);
            ensure(dc <= 1e-12 && leak <= 1e-12, || {
                format!("{n}x{n} constant image: dc error {dc:e}, leakage {leak:e}")
            })?;
        }
    }
    within(start.elapsed(), 60)?;
    Ok(format!(
        "round trip {worst_round_trip:e}, naive vs row-column {worst_methods:e}, constant image concentrated, in {:.2?}",
        start.elapsed()
    ))
}

fn budget_ratios() -> Check {
    for (rows, cols) in [(1, 1), (4, 4), (8, 8), (3, 5)] {
        let naive = dqft_op_budget(rows, cols, Method::Naive).map_err(|e| e.to_string())?;
        let (k, b) = naive.mult_ratio();
        ensure(k * 16 == b * 9 && k == 9 * naive.kernel_calls, || format!("naive {rows}x{cols}: {k}/{b}"))?;
        let rowcol = dqft_op_budget(rows, cols, Method::RowCol).map_err(|e| e.to_string())?;
        let (k, b) = rowcol.mult_ratio();
        ensure(k * 16 == b * 6 && k == 6 * rowcol.kernel_calls, || format!("row-column {rows}x{cols}: {k}/{b}"))?;
    }
    Ok("naive 9/16, row-column 6/16".into())
}

fn fixed_point() -> Check {
    let start = Instant::now();
    let widths = vec![8, 12, 16, 20, 24];
    let rows = error_sweep(&SweepConfig::new(KernelId::Sq, widths, 10_000, 7)).map_err(|e| e.to_string())?;
    for r in &rows {
        let bound = 8.0 * 2f64.powi(-(r.fraction_bits as i32));
        ensure(r.max_abs_err <= bound, || {
            format!("f={} max error {:e} exceeds {bound:e}", r.fraction_bits, r.max_abs_err)
        })?;
    }
    let at = |f: u32| rows.iter().find(|r| r.fraction_bits == f).unwrap().max_abs_err;
    ensure(at(24) < at(12), || format!("f=24 error {:e} not below f=12 error {:e}", at(24), at(12)))?;
    within(start.elapsed(), 30)?;
    Ok(format!("f=12 max {:e}, f=24 max {:e}, in {:.2?}", at(12), at(24), start.elapsed()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("operation counts", operation_counts),
        ("oracle equivalence", oracle_equivalence),
        ("factored reconstruction", factored_reconstruction),
        ("netlist fidelity", netlist_fidelity),
        ("transform properties", dqft_properties),
        ("transform budget ratios", budget_ratios),
        ("fixed-point error", fixed_point),
    ];
    let mut failed = 0;
    for (idx, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", idx + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{}] {name}: {detail}", idx + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
