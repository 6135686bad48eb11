//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the lines print in order
//! and the process exits nonzero when any criterion fails.

use std::f64::consts::{PI, TAU};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shiftcorr::arith::{sieve, squarefree_count};
use shiftcorr::constants::{density_oracle, singular_series};
use shiftcorr::correlation::{
    correlate_circular_with, correlate_linear, embed, norm_expansion_check, pointwise_products,
    spectrum_factorization_check, zero_padded_pair, CircularMethod,
};
use shiftcorr::harness::{self, Records};
use shiftcorr::spectral::{
    dft_forward, dft_inverse, parseval_energy_exact, quadrature_energy, sup_twisted_sum,
};
use shiftcorr::{
    verify, ArithFn, ExperimentKind, ExperimentSpec, ReportFormat, RunOptions, TupleSpec,
};

type Outcome = Result<(bool, String), Box<dyn std::error::Error>>;
type Criterion = (&'static str, fn() -> Outcome);

fn factor_counts(mut n: u64) -> (u32, u32, bool) {
    let (mut distinct, mut total, mut squarefree) = (0, 0, true);
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            distinct += 1;
            while n.is_multiple_of(p) {
                n /= p;
                total += 1;
            }
            if total > distinct {
                squarefree = false;
            }
        }
        p += 1;
    }
    if n > 1 {
        distinct += 1;
        total += 1;
    }
    (distinct, total, squarefree)
}

fn c1_sieve_exactness() -> Outcome {
    let start = Instant::now();
    let n = 100_000u64;
    let mu = sieve(ArithFn::Mobius, 1, n)?;
    let la = sieve(ArithFn::Liouville, 1, n)?;
    let mut mismatches = 0;
    for k in 1..=n {
        let (d, t, s) = factor_counts(k);
        let want_mu = if !s {
            0
        } else if d % 2 == 0 {
            1
        } else {
            -1
        };
        let want_la = if t % 2 == 0 { 1 } else { -1 };
        if mu.get(k) != Some(want_mu) || la.get(k) != Some(want_la) {
            mismatches += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((
        mismatches == 0 && secs < 5.0,
        format!("{mismatches} mismatches for n <= {n}, {secs:.2} s"),
    ))
}

fn c2_squarefree_density() -> Outcome {
    let start = Instant::now();
    let density = 6.0 / (PI * PI);
    let sq = sieve(ArithFn::MobiusSquared, 1, 10_000_000)?;
    let mut ok = true;
    let mut worst = 0.0f64;
    for e in 3..=7 {
        let x = 10u64.pow(e);
        let q = squarefree_count(x)?;
        let counted = sq.slice(1, x).iter().filter(|&&v| v == 1).count() as u64;
        let dev = (q as f64 - density * x as f64).abs();
        worst = worst.max(dev / (x as f64).sqrt());
        ok &= q == counted && dev <= 3.0 * (x as f64).sqrt();
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((
        ok && secs < 60.0,
        format!("max |Q(x) − 6x/π²|/√x = {worst:.4} (bound 3), formula = sieve count, {secs:.2} s"),
    ))
}

fn c3_euler_product() -> Outcome {
    let one = singular_series(&TupleSpec::shifts(&[0])?, 1_000_000)?;
    let gap = (one.value - 6.0 / (PI * PI)).abs();
    let pair = TupleSpec::shifts(&[0, 1])?;
    let product = singular_series(&pair, 100_000)?;
    let counted = density_oracle(&pair, 1_000_000)?;
    let rel = (counted - product.value).abs() / product.value;
    Ok((
        gap < 1e-6 && rel < 0.01,
        format!(
            "k=1: |product − 6/π²| = {gap:.2e}; pair (0,1): product {:.6} vs counted {counted:.6}, rel {rel:.2e}",
            product.value
        ),
    ))
}

fn c4_dft_round_trip_parseval() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4096);
    let mut worst_trip = 0.0f64;
    let mut worst_parseval = 0.0f64;
    for _ in 0..5 {
        let v: Vec<f64> = (0..4096)
            .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
            .collect();
        let spectrum = dft_forward(&v)?;
        let back = dft_inverse(&spectrum);
        let trip = v
            .iter()
            .zip(&back)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let freq: f64 = spectrum.coefficients().iter().map(|z| z.norm_sqr()).sum();
        let time = v.len() as f64 * v.iter().map(|a| a * a).sum::<f64>();
        worst_trip = worst_trip.max(trip);
        worst_parseval = worst_parseval.max((freq - time).abs() / time);
    }
    Ok((
        worst_trip < 1e-9 && worst_parseval < 1e-9,
        format!("round-trip {worst_trip:.2e}, Parseval relative {worst_parseval:.2e}"),
    ))
}

fn c5_correlation_theorem() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mu = sieve(ArithFn::Mobius, 1, 4097)?;
    let la = sieve(ArithFn::Liouville, 1, 4097)?;
    let mut ok = true;
    let mut worst = 0.0f64;
    for n in [256usize, 1024, 4096] {
        let fm: Vec<i64> = embed(&mu, n)?;
        let fl: Vec<i64> = embed(&la, n)?;
        let to_f = |v: &[i64]| v.iter().map(|&a| a as f64).collect::<Vec<f64>>();
        let r1: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r2: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for (f, g) in [
            (to_f(&fm), to_f(&fm)),
            (to_f(&fl), to_f(&fl)),
            (to_f(&fm), to_f(&fl)),
            (r1, r2),
        ] {
            let dev = spectrum_factorization_check(&f, &g)?;
            worst = worst.max(dev / n as f64);
            ok &= dev <= 1e-6 * n as f64;
        }
        for (f, g) in [(&fm, &fm), (&fl, &fl), (&fm, &fl)] {
            let a = correlate_circular_with(f, g, CircularMethod::Direct)?;
            let b = correlate_circular_with(f, g, CircularMethod::Fft)?;
            ok &= a.values == b.values;
        }
    }
    Ok((
        ok,
        format!("max deviation/N = {worst:.2e} (bound 1e-6); FFT = direct exactly: {ok}"),
    ))
}

fn c6_zero_padding() -> Outcome {
    let mu = sieve(ArithFn::Mobius, 1, 8192)?;
    let la = sieve(ArithFn::Liouville, 1, 8192)?;
    let mut ok = true;
    for x in [100u64, 1000, 4096] {
        for (f, g) in [(&mu, &mu), (&la, &la), (&mu, &la)] {
            let (fp, gp) = zero_padded_pair(f, g, x)?;
            let circ = correlate_circular_with(&fp, &gp, CircularMethod::Auto)?;
            // Direct double sum as the oracle for the linear side.
            let oracle: Vec<i64> = (0..x)
                .map(|t| {
                    (1..x)
                        .map(|n| (f.get(n).unwrap() * g.get(n + t).unwrap()) as i64)
                        .sum()
                })
                .collect();
            let lin = correlate_linear(f, g, x, x - 1)?;
            ok &= circ.values[..x as usize] == oracle[..] && lin.values == oracle;
        }
    }
    Ok((
        ok,
        format!("circular on 2x equals linear for all t < x, x ∈ {{100, 1000, 4096}}: {ok}"),
    ))
}

fn c7_circular_sum_identity() -> Outcome {
    let n = 4096;
    let mu = sieve(ArithFn::Mobius, 1, n as u64)?;
    let f = embed(&mu, n)?;
    let series = correlate_circular_with(&f, &f, CircularMethod::Auto)?;
    let lhs: i64 = series.values.iter().sum();
    let f0: i64 = f.iter().sum();
    let spectral_f0 =
        dft_forward(&f.iter().map(|&v| v as f64).collect::<Vec<_>>())?.coefficients()[0];
    let ok = lhs == f0 * f0 && spectral_f0.re.round() as i64 == f0 && spectral_f0.im.abs() < 1e-9;
    Ok((ok, format!("Σ_t R(t) = {lhs}, f̂(0)ĝ(0) = {}", f0 * f0)))
}

fn c8_parseval_integral() -> Outcome {
    let la = sieve(ArithFn::Liouville, 1, 100_010)?;
    let mu = sieve(ArithFn::Mobius, 1, 100_010)?;
    let mut ok = true;
    let mut detail = Vec::new();
    for x in [1000u64, 10_000, 100_000] {
        let e = parseval_energy_exact(&pointwise_products(&la, &la, 1, x)?);
        ok &= e == (x - 1) as u128;
        let m = parseval_energy_exact(&pointwise_products(&mu, &mu, 1, x)?);
        let pairs = (1..x)
            .filter(|&n| mu.get(n) != Some(0) && mu.get(n + 1) != Some(0))
            .count();
        ok &= m == pairs as u128;
        detail.push(format!("x={x}: λ {e}, μ {m}"));
    }
    let w: Vec<f64> = pointwise_products(&mu, &mu, 1, 2048)?
        .iter()
        .map(|&v| v as f64)
        .collect();
    let exact: f64 = w.iter().map(|v| v * v).sum();
    let quad = quadrature_energy(&w, 4 * 2048)?;
    let rel = (quad - exact).abs() / exact;
    ok &= rel < 1e-3;
    Ok((
        ok,
        format!("{}; quadrature at 2048 rel {rel:.2e}", detail.join(", ")),
    ))
}

fn c9_norm_expansion() -> Outcome {
    let mu = sieve(ArithFn::Mobius, 1, 10_010)?;
    let mut diffs = Vec::new();
    for t in [1u64, 2, 7] {
        diffs.push(norm_expansion_check(&mu, t, 10_000)?.diff);
    }
    Ok((
        diffs.iter().all(|&d| d == 0),
        format!("diff for t = 1, 2, 7: {diffs:?}"),
    ))
}

fn c10_empirical_decay() -> Outcome {
    let grid = vec![1000u64, 10_000, 100_000, 1_000_000];
    let mut spec = ExperimentSpec::new(ExperimentKind::DecayFit, grid.clone());
    spec.shifts = vec![1, 2, 3];
    let report = harness::run(&spec, &RunOptions::default())?;
    let Records::DecayFit(rows) = &report.records else {
        return Ok((false, "unexpected record kind".into()));
    };

    // Direct summation oracle for R(10^5, t).
    let mu = sieve(ArithFn::Mobius, 1, 100_003)?;
    let mut ok = true;
    let mut lines = Vec::new();
    for (i, &t) in spec.shifts.iter().enumerate() {
        let oracle: i64 = (1..100_000u64)
            .map(|n| (mu.get(n).unwrap() * mu.get(n + t).unwrap()) as i64)
            .sum();
        let at = rows.iter().find(|r| r.t == t && r.x == 100_000).unwrap();
        let ratio = oracle.unsigned_abs() as f64 / 1e5;
        let fit = &report.fits[i];
        let slope = fit.window_max_slope.unwrap_or(f64::NAN);
        let maxima: Vec<String> = rows
            .iter()
            .filter(|r| r.t == t && r.x > 1000)
            .map(|r| format!("{:.4}", r.window_max_abs_r_over_x))
            .collect();
        ok &= at.r == oracle && ratio <= 0.05 && slope <= 0.0;
        lines.push(format!(
            "t={t}: |R|/x={ratio:.5}, decade maxima [{}], trend slope {slope:.3}, c={:.3} (max resid {:.3})",
            maxima.join(", "),
            fit.c,
            fit.max_residual
        ));
    }
    Ok((ok, lines.join("; ")))
}

fn c11_twisted_sum() -> Outcome {
    let x = 100_000u64;
    let mu = sieve(ArithFn::Mobius, 1, x)?;
    let s = sup_twisted_sum(&mu, x, 50, 200, 11)?;
    // Recompute the maximizing sum with plain floating phases.
    let (mut re, mut im) = (0.0f64, 0.0f64);
    for n in 1..x {
        let v = mu.get(n).unwrap() as f64;
        let phase = TAU * (s.argmax_alpha * n as f64).fract();
        re += v * phase.cos();
        im += v * phase.sin();
    }
    let direct = re.hypot(im);
    let threshold = x as f64 / (x as f64).ln();
    let ok = s.sup <= threshold && (direct - s.sup).abs() <= 1e-6 * s.sup.max(1.0);
    Ok((
        ok,
        format!(
            "sup = {:.3} at α = {:.6} over {} points, threshold {threshold:.1}, ratio {:.4}",
            s.sup,
            s.argmax_alpha,
            s.evaluated,
            s.sup / threshold
        ),
    ))
}

fn c12_determinism() -> Outcome {
    let mut specs = Vec::new();
    let mut s = ExperimentSpec::new(ExperimentKind::DecayFit, vec![1000, 10_000, 100_000]);
    s.shifts = vec![1, 2, 3];
    specs.push(s);
    specs.push(ExperimentSpec::new(
        ExperimentKind::AverageSweep,
        vec![1000, 5000, 20_000],
    ));
    let mut s = ExperimentSpec::new(ExperimentKind::SupTwisted, vec![10_000, 50_000]);
    s.seed = 42;
    specs.push(s);
    let mut s = ExperimentSpec::new(ExperimentKind::KtupleSweep, vec![1000, 10_000, 100_000]);
    s.tuples = vec![vec![0, 1], vec![0, 1, 2], vec![0, 2, 6]];
    specs.push(s);
    let mut s = ExperimentSpec::new(ExperimentKind::ParsevalSuite, vec![2048, 100_000]);
    s.shifts = vec![1, 2];
    specs.push(s);
    let mut s = ExperimentSpec::new(ExperimentKind::ConstantsSuite, vec![10_000, 100_000]);
    s.tuples = vec![vec![0], vec![0, 1], vec![0, 1, 2, 3]];
    specs.push(s);

    let mut ok = true;
    let mut bytes = 0;
    for spec in &specs {
        let one = harness::run(
            spec,
            &RunOptions {
                threads: 1,
                ..RunOptions::default()
            },
        )?;
        let eight = harness::run(
            spec,
            &RunOptions {
                threads: 8,
                ..RunOptions::default()
            },
        )?;
        for format in [ReportFormat::Csv, ReportFormat::Json] {
            let a = one.to_bytes(format)?;
            ok &= a == eight.to_bytes(format)?;
            bytes += a.len();
        }
        ok &= one.fits_csv()? == eight.fits_csv()?;
    }
    Ok((
        ok,
        format!(
            "{} sweeps × 2 formats at 1 and 8 threads, {bytes} bytes compared",
            specs.len()
        ),
    ))
}

fn c13_verify_suite() -> Outcome {
    let start = Instant::now();
    let outcomes = verify::run_all();
    let secs = start.elapsed().as_secs_f64();
    let failed: Vec<&str> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.name)
        .collect();
    Ok((
        failed.is_empty() && secs < 600.0,
        format!("{} checks, failed {failed:?}, {secs:.1} s", outcomes.len()),
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 13] = [
        ("sieve exactness", c1_sieve_exactness),
        ("squarefree density", c2_squarefree_density),
        ("Euler product", c3_euler_product),
        ("DFT round-trip and Parseval", c4_dft_round_trip_parseval),
        ("correlation theorem", c5_correlation_theorem),
        ("zero padding", c6_zero_padding),
        ("circular sum identity", c7_circular_sum_identity),
        ("Parseval integral", c8_parseval_integral),
        ("norm expansion", c9_norm_expansion),
        ("empirical decay", c10_empirical_decay),
        ("twisted sum smallness", c11_twisted_sum),
        ("determinism", c12_determinism),
        ("verify suite", c13_verify_suite),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (passed, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        let status = if passed { "PASS" } else { "FAIL" };
        println!(
            "{status} [{:>2}] {name}: {detail} ({:.2} s)",
            i + 1,
            start.elapsed().as_secs_f64()
        );
        failures += usize::from(!passed);
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
