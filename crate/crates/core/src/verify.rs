//! Self-contained invariant suite.
//!
//! Every check recomputes a quantity two independent ways (or against a
//! hand-checked value) and reports the outcome. Nothing here reads files
//! other than a temporary table written by the round-trip check.

use std::time::Instant;

use rustfft::num_complex::Complex64;
use serde::Serialize;

use crate::arith::{
    partial_sums, read_table, sieve, squarefree_count, write_table, ArithFn, SieveConfig,
};
use crate::constants::{
    density_oracle, omega_p, omega_p_enumerated, singular_series, OmegaReading, SQUAREFREE_DENSITY,
};
use crate::correlation::{
    correlate_circular_with, correlate_linear, embed, norm_expansion_check,
    spectrum_factorization_check, zero_padded_pair, CircularMethod, TupleSpec,
};
use crate::harness::fit_decay;
use crate::spectral::{
    dft_forward, dft_forward_direct, dft_forward_fft, dft_inverse, geometric_sum,
    geometric_sum_bound, parseval_energy, quadrature_energy, sup_twisted_sum,
};
use crate::Result;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

type Check = (&'static str, fn() -> Result<(bool, String)>);

const CHECKS: &[Check] = &[
    ("sieve_trial_division", sieve_trial_division),
    ("sieve_segmentation", sieve_segmentation),
    ("squarefree_count", squarefree_counts),
    ("partial_sums", partial_sum_examples),
    ("dft_examples", dft_examples),
    ("dft_round_trip", dft_round_trip),
    ("dft_fft_vs_direct", dft_fft_vs_direct),
    ("parseval_and_symmetry", parseval_and_symmetry),
    ("geometric_bound", geometric_bound),
    ("quadrature_energy", quadrature_check),
    ("circular_sum_identity", circular_sum_identity),
    ("circular_fft_vs_direct", circular_fft_vs_direct),
    ("spectrum_factorization", spectrum_factorization),
    ("zero_padding", zero_padding),
    ("norm_expansion", norm_expansion),
    ("omega_examples", omega_examples),
    ("squarefree_density_product", density_product),
    ("pair_density", pair_density),
    ("table_round_trip", table_round_trip),
    ("planted_decay_fit", planted_fit),
    ("sup_determinism", sup_determinism),
];

/// Names of the checks in the order [`run_all`] runs them.
pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|(n, _)| *n).collect()
}

/// Runs every check; errors count as failures.
pub fn run_all() -> Vec<CheckOutcome> {
    run_with(|_| {})
}

/// Like [`run_all`], calling `progress` after each check.
pub fn run_with(mut progress: impl FnMut(&CheckOutcome)) -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|&(name, f)| {
            let start = Instant::now();
            let (passed, detail) = match f() {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            let outcome = CheckOutcome {
                name,
                passed,
                detail,
                seconds: start.elapsed().as_secs_f64(),
            };
            progress(&outcome);
            outcome
        })
        .collect()
}

fn factor(mut n: u64) -> (u32, u32, bool) {
    let (mut distinct, mut total, mut squarefree) = (0, 0, true);
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            distinct += 1;
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            total += e;
            squarefree &= e == 1;
        }
        p += 1;
    }
    if n > 1 {
        distinct += 1;
        total += 1;
    }
    (distinct, total, squarefree)
}

fn sieve_trial_division() -> Result<(bool, String)> {
    let n = 100_000;
    let mu = sieve(ArithFn::Mobius, 1, n)?;
    let la = sieve(ArithFn::Liouville, 1, n)?;
    let sq = sieve(ArithFn::MobiusSquared, 1, n)?;
    let mut bad = 0;
    for k in 1..=n {
        let (d, t, s) = factor(k);
        let want_mu = if s {
            if d % 2 == 0 {
                1
            } else {
                -1
            }
        } else {
            0
        };
        let want_la = if t % 2 == 0 { 1 } else { -1 };
        if mu.get(k) != Some(want_mu) || la.get(k) != Some(want_la) || sq.get(k) != Some(s as i8) {
            bad += 1;
        }
    }
    Ok((bad == 0, format!("{bad} mismatches on [1, {n}]")))
}

fn sieve_segmentation() -> Result<(bool, String)> {
    let start = (1u64 << 40) - 5000;
    let whole = sieve(ArithFn::Mobius, start, 20_000)?;
    let small = SieveConfig { segment_len: 777 }.sieve(ArithFn::Mobius, start, 20_000)?;
    let shifted = sieve(ArithFn::Mobius, start + 1234, 5000)?;
    let ok = whole == small && shifted.values() == whole.slice(start + 1234, start + 6234);
    Ok((
        ok,
        format!("segment lengths 2^20 and 777 and offset windows agree near 2^40: {ok}"),
    ))
}

fn squarefree_counts() -> Result<(bool, String)> {
    let sq = sieve(ArithFn::MobiusSquared, 1, 1_000_000)?;
    let mut worst = 0u64;
    let mut ok = squarefree_count(10)? == 6;
    for x in [2u64, 3, 100, 1000, 65_537, 1_000_000] {
        let direct = sq.slice(1, x).iter().filter(|&&v| v != 0).count() as u64;
        let formula = squarefree_count(x)?;
        worst = worst.max(direct.abs_diff(formula));
        ok &= direct == formula;
    }
    Ok((ok, format!("max |Q_formula − Q_sieve| = {worst}")))
}

fn partial_sum_examples() -> Result<(bool, String)> {
    let mu = sieve(ArithFn::Mobius, 1, 1000)?;
    let s = partial_sums(&mu, &[11, 2, 1])?;
    let got: Vec<i64> = s.checkpoints.iter().map(|c| c.1).collect();
    // Σ_{n<1} = 0, μ(1) = 1, and M(10) = −1.
    Ok((got == [0, 1, -1], format!("sums at 1, 2, 11: {got:?}")))
}

fn dft_examples() -> Result<(bool, String)> {
    let w = dft_forward(&[0.0, 1.0, 0.0, 0.0])?;
    let want = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    let err = w
        .coefficients()
        .iter()
        .zip(&want)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let c = dft_forward(&[1.0; 8])?;
    let err2 = c
        .coefficients()
        .iter()
        .enumerate()
        .map(|(s, z)| (z - Complex64::new(if s == 0 { 8.0 } else { 0.0 }, 0.0)).norm())
        .fold(0.0, f64::max);
    let e = err.max(err2);
    Ok((
        e < 1e-12,
        format!("max error {e:.3e} on δ₁ (N=4) and constant (N=8)"),
    ))
}

fn lcg(seed: u64, n: usize) -> Vec<f64> {
    let mut s = seed;
    (0..n)
        .map(|_| {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        })
        .collect()
}

fn dft_round_trip() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for n in [1usize, 7, 64, 1000, 4099, 10_000] {
        let v = lcg(n as u64, n);
        let back = dft_inverse(&dft_forward(&v)?);
        let e = v
            .iter()
            .zip(&back)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        worst = worst.max(e);
    }
    Ok((worst < 1e-9, format!("max round-trip error {worst:.3e}")))
}

fn dft_fft_vs_direct() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for n in [97usize, 360, 1024, 4096] {
        let v = lcg(n as u64 + 1, n);
        let a = dft_forward_fft(&v)?;
        let b = dft_forward_direct(&v)?;
        let e = a
            .coefficients()
            .iter()
            .zip(b.coefficients())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        worst = worst.max(e);
    }
    Ok((worst < 1e-8, format!("max |FFT − direct| = {worst:.3e}")))
}

fn parseval_and_symmetry() -> Result<(bool, String)> {
    let mu = sieve(ArithFn::Mobius, 1, 5000)?;
    let v: Vec<f64> = embed(&mu, 5000)?.iter().map(|&a| a as f64).collect();
    let w = dft_forward(&v)?;
    let time = parseval_energy(&v);
    let freq = w.energy() / v.len() as f64;
    let rel = (time - freq).abs() / time;
    let asym = w.conjugate_asymmetry();
    Ok((
        rel < 1e-12 && asym < 1e-8,
        format!("Parseval relative gap {rel:.3e}, conjugate asymmetry {asym:.3e}"),
    ))
}

fn geometric_bound() -> Result<(bool, String)> {
    let mut ok = true;
    let mut worst_ratio = 0.0f64;
    for (alpha, terms) in [
        (0.5, 1000u64),
        (1.0 / 3.0, 999),
        (0.001, 10_000),
        (0.0, 50),
        (0.2718, 777),
    ] {
        let s = geometric_sum(alpha, terms).norm();
        let bound = geometric_sum_bound(alpha, terms);
        ok &= s <= bound + 1e-9;
        worst_ratio = worst_ratio.max(s / bound);
    }
    Ok((ok, format!("max |S|/bound = {worst_ratio:.4}")))
}

fn quadrature_check() -> Result<(bool, String)> {
    let mu = sieve(ArithFn::Mobius, 1, 3000)?;
    let w: Vec<f64> = mu.values()[..2999].iter().map(|&v| v as f64).collect();
    let q = quadrature_energy(&w, 4 * w.len())?;
    let e = parseval_energy(&w);
    let rel = (q - e).abs() / e;
    Ok((
        rel < 1e-10,
        format!("quadrature {q:.6} vs energy {e}, relative gap {rel:.3e}"),
    ))
}

fn circular_sum_identity() -> Result<(bool, String)> {
    let n = 10_000usize;
    let mu = sieve(ArithFn::Mobius, 1, n as u64)?;
    let f = embed(&mu, n)?;
    let series = correlate_circular_with(&f, &f, CircularMethod::Auto)?;
    let m: i64 = f.iter().sum();
    let q: i64 = f.iter().map(|v| v * v).sum();
    let lhs: i64 = series.values[1..].iter().sum();
    Ok((
        lhs == m * m - q,
        format!("Σ_{{t≠0}} R(t) = {lhs}, M² − Q = {}", m * m - q),
    ))
}

fn circular_fft_vs_direct() -> Result<(bool, String)> {
    let mut ok = true;
    for n in [1usize, 2, 97, 1000, 4096] {
        let mu = sieve(ArithFn::Mobius, 1, n as u64 + 1)?;
        let la = sieve(ArithFn::Liouville, 1, n as u64 + 1)?;
        let f = embed(&mu, n)?;
        let g = embed(&la, n)?;
        let a = correlate_circular_with(&f, &g, CircularMethod::Direct)?;
        let b = correlate_circular_with(&f, &g, CircularMethod::Fft)?;
        ok &= a.values == b.values;
    }
    Ok((ok, format!("exact agreement on all periods: {ok}")))
}

fn spectrum_factorization() -> Result<(bool, String)> {
    let f = lcg(11, 600);
    let g = lcg(12, 600);
    let e = spectrum_factorization_check(&f, &g)?;
    Ok((e < 1e-8, format!("max |R̂ − conj(f̂)ĝ| = {e:.3e}")))
}

fn zero_padding() -> Result<(bool, String)> {
    let x = 3000u64;
    let mu = sieve(ArithFn::Mobius, 1, 2 * x)?;
    let (f, g) = zero_padded_pair(&mu, &mu, x)?;
    let circ = correlate_circular_with(&f, &g, CircularMethod::Fft)?;
    let lin = correlate_linear(&mu, &mu, x, x - 1)?;
    let ok = circ.values[..x as usize] == lin.values[..];
    Ok((
        ok,
        format!("circular on period 2x equals linear for all t < x: {ok}"),
    ))
}

fn norm_expansion() -> Result<(bool, String)> {
    let mu = sieve(ArithFn::Mobius, 1, 20_100)?;
    let mut worst = 0i128;
    for t in [0u64, 1, 2, 7, 100] {
        let e = norm_expansion_check(&mu, t, 20_000)?;
        worst = worst.max(e.diff.abs());
    }
    Ok((worst == 0, format!("max |lhs − rhs| = {worst}")))
}

fn omega_examples() -> Result<(bool, String)> {
    let one = TupleSpec::shifts(&[0])?;
    let two = TupleSpec::shifts(&[0, 1])?;
    let got = [omega_p(&one, 2)?, omega_p(&two, 2)?, omega_p(&one, 3)?];
    let mut ok = got == [1, 2, 1];
    let wide = TupleSpec::new(vec![0, 4, 9], 6)?;
    for p in [2u64, 3, 5, 7, 11] {
        for reading in [OmegaReading::Union, OmegaReading::Conjunction] {
            ok &= crate::constants::omega_p_with(&wide, p, reading)?
                == omega_p_enumerated(&wide, p, reading)?;
        }
    }
    Ok((
        ok,
        format!("ϖ values {got:?}; closed form agrees with enumeration: {ok}"),
    ))
}

fn density_product() -> Result<(bool, String)> {
    let r = singular_series(&TupleSpec::shifts(&[0])?, 1_000_000)?;
    let gap = (r.value - SQUAREFREE_DENSITY).abs();
    Ok((
        gap < 1e-6,
        format!("product {:.9} vs 6/π², gap {gap:.3e}", r.value),
    ))
}

fn pair_density() -> Result<(bool, String)> {
    let tuple = TupleSpec::shifts(&[0, 1])?;
    let r = singular_series(&tuple, 100_000)?;
    let d = density_oracle(&tuple, 1_000_000)?;
    let rel = (d - r.value).abs() / r.value;
    Ok((
        rel < 0.01,
        format!(
            "product {:.6} vs counted {d:.6}, relative gap {rel:.3e}",
            r.value
        ),
    ))
}

fn table_round_trip() -> Result<(bool, String)> {
    let table = sieve(ArithFn::Liouville, 123_456, 10_000)?;
    let mut bytes = Vec::new();
    write_table(&mut bytes, &table)?;
    let back = read_table(&bytes[..])?;
    let ok = back == table && bytes.len() == 22 + 10_000;
    Ok((
        ok,
        format!("{} bytes, identical after re-read: {ok}", bytes.len()),
    ))
}

fn planted_fit() -> Result<(bool, String)> {
    let pts: Vec<(f64, f64)> = [1e3f64, 1e4, 1e5, 1e6, 1e7]
        .iter()
        .map(|&x| (x, 0.5 * x / x.ln().powf(1.5)))
        .collect();
    let fit = fit_decay(&pts)?;
    let ok = (fit.c - 1.5).abs() < 1e-9 && (fit.log_c.exp() - 0.5).abs() < 1e-9;
    Ok((
        ok,
        format!("recovered c = {:.12}, C = {:.12}", fit.c, fit.log_c.exp()),
    ))
}

fn sup_determinism() -> Result<(bool, String)> {
    let mu = sieve(ArithFn::Mobius, 1, 20_000)?;
    let a = sup_twisted_sum(&mu, 20_000, 20, 50, 7)?;
    let b = sup_twisted_sum(&mu, 20_000, 20, 50, 7)?;
    let ok = a == b && a.sup > 0.0;
    Ok((
        ok,
        format!(
            "sup {:.6} at α = {:.9}, repeatable: {ok}",
            a.sup, a.argmax_alpha
        ),
    ))
}
