//! N-point discrete Fourier transform, twisted exponential sums and
//! Parseval energies.
//!
//! Convention: the forward transform uses the kernel `e^{+2πisn/N}` and the
//! inverse uses `e^{−2πisn/N}` with the factor `1/N`, on indices
//! `0 .. N−1`. Arithmetic tables are embedded with slot 0 set to zero, so
//! `f̂(s) = Σ_{1≤n<N} f(n)·e^{2πisn/N}`.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::arith::ArithmeticTable;
use crate::numeric::{gcd, unit_root, CompensatedComplex, CompensatedSum};
use crate::{Error, Result};

/// Lengths at or below this use direct summation unless they factor into
/// small primes.
pub const DIRECT_LIMIT: usize = 4096;

const SMOOTH_BOUND: usize = 13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Convention {
    /// Forward kernel `e^{+2πisn/N}`, inverse `e^{−2πisn/N}/N`.
    ForwardPositive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    coefficients: Vec<Complex64>,
    convention: Convention,
}

impl Spectrum {
    pub fn from_coefficients(coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::invalid("a spectrum needs at least one coefficient"));
        }
        Ok(Self {
            coefficients,
            convention: Convention::ForwardPositive,
        })
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// `Σ_s |f̂(s)|²`.
    pub fn energy(&self) -> f64 {
        self.coefficients
            .iter()
            .map(|c| c.norm_sqr())
            .collect::<CompensatedSum>()
            .value()
    }

    /// `max_s |f̂(N−s) − conj(f̂(s))|`; zero for real input.
    pub fn conjugate_asymmetry(&self) -> f64 {
        let n = self.len();
        (1..n)
            .map(|s| (self.coefficients[n - s] - self.coefficients[s].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// CSV with header `s,re,im,magnitude`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        #[derive(Serialize)]
        struct Row {
            s: usize,
            re: f64,
            im: f64,
            magnitude: f64,
        }
        let mut out = csv::Writer::from_writer(w);
        for (s, c) in self.coefficients.iter().enumerate() {
            out.serialize(Row {
                s,
                re: c.re,
                im: c.im,
                magnitude: c.norm(),
            })?;
        }
        out.flush()?;
        Ok(())
    }
}

fn largest_prime_factor(mut n: usize) -> usize {
    let mut largest = 1;
    let mut d = 2;
    while d * d <= n {
        while n.is_multiple_of(d) {
            largest = d;
            n /= d;
        }
        d += 1;
    }
    largest.max(n)
}

/// Whether [`dft_forward`] routes length `n` through the FFT.
pub fn uses_fft(n: usize) -> bool {
    n > DIRECT_LIMIT || (n > 1 && largest_prime_factor(n) <= SMOOTH_BOUND)
}

/// In-place unnormalized transform with kernel `e^{+2πisn/N}`.
pub(crate) fn fft_positive(buf: &mut [Complex64]) {
    FftPlanner::new().plan_fft_inverse(buf.len()).process(buf);
}

/// In-place unnormalized transform with kernel `e^{−2πisn/N}`.
pub(crate) fn fft_negative(buf: &mut [Complex64]) {
    FftPlanner::new().plan_fft_forward(buf.len()).process(buf);
}

fn to_complex(values: &[f64]) -> Vec<Complex64> {
    values.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

/// `f̂(s) = Σ_{n<N} f(n)·e^{2πisn/N}`, by FFT for smooth or large `N` and by
/// direct summation otherwise.
pub fn dft_forward(values: &[f64]) -> Result<Spectrum> {
    if uses_fft(values.len()) {
        dft_forward_fft(values)
    } else {
        dft_forward_direct(values)
    }
}

pub fn dft_forward_fft(values: &[f64]) -> Result<Spectrum> {
    if values.is_empty() {
        return Err(Error::invalid("DFT length must be at least 1"));
    }
    let mut buf = to_complex(values);
    fft_positive(&mut buf);
    Spectrum::from_coefficients(buf)
}

/// O(N²) evaluation of the forward transform with exactly reduced angles
/// and compensated sums.
pub fn dft_forward_direct(values: &[f64]) -> Result<Spectrum> {
    if values.is_empty() {
        return Err(Error::invalid("DFT length must be at least 1"));
    }
    Spectrum::from_coefficients(direct_transform(&to_complex(values), false))
}

fn direct_transform(input: &[Complex64], negative: bool) -> Vec<Complex64> {
    let n = input.len();
    let roots: Vec<Complex64> = (0..n as u64)
        .map(|k| {
            let w = unit_root(k, n as u64);
            if negative {
                w.conj()
            } else {
                w
            }
        })
        .collect();
    (0..n)
        .into_par_iter()
        .map(|s| {
            let mut acc = CompensatedComplex::default();
            for (j, &v) in input.iter().enumerate() {
                if v != Complex64::new(0.0, 0.0) {
                    acc.add(v * roots[(s * j) % n]);
                }
            }
            acc.value()
        })
        .collect()
}

/// Real part of `(1/N)·Σ_s f̂(s)·e^{−2πisn/N}`.
pub fn dft_inverse(spectrum: &Spectrum) -> Vec<f64> {
    let n = spectrum.len();
    let raw = if uses_fft(n) {
        let mut buf = spectrum.coefficients.clone();
        fft_negative(&mut buf);
        buf
    } else {
        direct_transform(&spectrum.coefficients, true)
    };
    raw.into_iter().map(|c| c.re / n as f64).collect()
}

/// A twisted exponential sum `Σ_{1≤n<x} f(n)·e^{2πiαn}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwistedSumValue {
    /// `α` reduced into `[0, 1)`.
    pub alpha: f64,
    pub x: u64,
    pub re: f64,
    pub im: f64,
}

impl TwistedSumValue {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn magnitude(&self) -> f64 {
        self.value().norm()
    }

    /// `|value| / (x/(log x)^c)`.
    pub fn normalized(&self, c: f64) -> f64 {
        let x = self.x as f64;
        self.magnitude() * x.ln().powf(c) / x
    }
}

fn reduce_alpha(alpha: f64) -> Result<f64> {
    if !alpha.is_finite() {
        return Err(Error::invalid(format!("alpha must be finite, got {alpha}")));
    }
    let r = alpha.rem_euclid(1.0);
    Ok(if r >= 1.0 { 0.0 } else { r })
}

/// `Σ_{1≤n<x} f(n)·e^{2πiαn}` for real `α`, summed in ascending `n`.
pub fn twisted_sum(table: &ArithmeticTable, alpha: f64, x: u64) -> Result<TwistedSumValue> {
    let alpha = reduce_alpha(alpha)?;
    table.require(1, x)?;
    let mut acc = CompensatedComplex::default();
    for (i, &v) in table.slice(1, x).iter().enumerate() {
        if v != 0 {
            let n = (i + 1) as f64;
            let angle = TAU * (alpha * n).fract();
            acc.add(Complex64::new(angle.cos(), angle.sin()) * v as f64);
        }
    }
    let z = acc.value();
    Ok(TwistedSumValue {
        alpha,
        x,
        re: z.re,
        im: z.im,
    })
}

/// Integer sums of `f(n)` over `n < x` in each residue class mod `q`.
fn residue_sums(table: &ArithmeticTable, q: u64, x: u64) -> Vec<i64> {
    let mut sums = vec![0i64; q as usize];
    for (i, &v) in table.slice(1, x).iter().enumerate() {
        sums[((i as u64 + 1) % q) as usize] += v as i64;
    }
    sums
}

fn rational_from_residues(sums: &[i64], a: u64) -> Complex64 {
    let q = sums.len() as u64;
    let mut acc = CompensatedComplex::default();
    for (r, &s) in sums.iter().enumerate() {
        if s != 0 {
            acc.add(unit_root(a * r as u64, q) * s as f64);
        }
    }
    acc.value()
}

/// Twisted sum at the rational point `α = a/q`, with the phase of every term
/// reduced exactly in integers.
pub fn twisted_sum_rational(
    table: &ArithmeticTable,
    a: u64,
    q: u64,
    x: u64,
) -> Result<TwistedSumValue> {
    if q == 0 {
        return Err(Error::invalid("denominator q must be positive"));
    }
    table.require(1, x)?;
    let a = a % q;
    let z = rational_from_residues(&residue_sums(table, q, x), a);
    Ok(TwistedSumValue {
        alpha: a as f64 / q as f64,
        x,
        re: z.re,
        im: z.im,
    })
}

/// Supremum of `|Σ_{n<x} f(n)e^{2πiαn}|` over a finite α-grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupTwistedSum {
    pub x: u64,
    pub q_bound: u64,
    pub random_samples: usize,
    pub seed: u64,
    /// Number of α values evaluated.
    pub evaluated: usize,
    pub argmax_alpha: f64,
    /// `(a, q)` when the maximizer is a Farey fraction.
    pub argmax_fraction: Option<(u64, u64)>,
    pub sup: f64,
    /// `sup·log x / x`.
    pub ratio_c1: f64,
    /// `sup·(log x)² / x`.
    pub ratio_c2: f64,
}

/// Maximizes the twisted sum over all reduced fractions `a/q` with
/// `q <= q_bound` (in order of `q`, then `a`) followed by `random_samples`
/// uniform α drawn from a ChaCha8 stream seeded with `seed`. Ties keep the
/// first maximizer.
pub fn sup_twisted_sum(
    table: &ArithmeticTable,
    x: u64,
    q_bound: u64,
    random_samples: usize,
    seed: u64,
) -> Result<SupTwistedSum> {
    if q_bound == 0 {
        return Err(Error::invalid("denominator bound Q must be at least 1"));
    }
    table.require(1, x)?;

    let farey: Vec<(u64, u64, f64)> = (1..=q_bound)
        .into_par_iter()
        .flat_map_iter(|q| {
            let sums = residue_sums(table, q, x);
            (0..q)
                .filter(move |&a| gcd(a, q) == 1)
                .map(move |a| (a, q, rational_from_residues(&sums, a).norm()))
                .collect::<Vec<_>>()
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alphas: Vec<f64> = (0..random_samples).map(|_| rng.gen::<f64>()).collect();
    let random: Vec<(f64, f64)> = alphas
        .par_iter()
        .map(|&a| twisted_sum(table, a, x).map(|v| (v.alpha, v.magnitude())))
        .collect::<Result<_>>()?;

    let mut best = (0.0, Some((0, 1)), f64::NEG_INFINITY);
    for &(a, q, m) in &farey {
        if m > best.2 {
            best = (a as f64 / q as f64, Some((a, q)), m);
        }
    }
    for &(alpha, m) in &random {
        if m > best.2 {
            best = (alpha, None, m);
        }
    }
    let logx = (x as f64).ln();
    Ok(SupTwistedSum {
        x,
        q_bound,
        random_samples,
        seed,
        evaluated: farey.len() + random.len(),
        argmax_alpha: best.0,
        argmax_fraction: best.1,
        sup: best.2,
        ratio_c1: best.2 * logx / x as f64,
        ratio_c2: best.2 * logx * logx / x as f64,
    })
}

/// `∫₀¹ |Σ_n w(n)e^{2πinα}|² dα`, evaluated by orthogonality as `Σ_n w(n)²`.
pub fn parseval_energy(weights: &[f64]) -> f64 {
    weights
        .iter()
        .map(|w| w * w)
        .collect::<CompensatedSum>()
        .value()
}

/// Exact integer form of [`parseval_energy`].
pub fn parseval_energy_exact(weights: &[i64]) -> u128 {
    weights
        .iter()
        .map(|&w| (w as i128 * w as i128) as u128)
        .sum()
}

/// Trapezoid rule for `∫₀¹ |Σ_n w(n)e^{2πinα}|² dα` on `samples` equal
/// subintervals. `S(α)` is evaluated at the nodes `j/samples` by folding the
/// weights modulo `samples` and running one transform.
pub fn quadrature_energy(weights: &[f64], samples: usize) -> Result<f64> {
    if samples == 0 {
        return Err(Error::invalid("quadrature needs at least one sample"));
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); samples];
    for (n, &w) in weights.iter().enumerate() {
        buf[n % samples].re += w;
    }
    fft_positive(&mut buf);
    // Periodic integrand: the endpoint halves combine into one full node.
    let total: CompensatedSum = buf.iter().map(|c| c.norm_sqr()).collect();
    Ok(total.value() / samples as f64)
}

/// `‖α‖`, the distance from `α` to the nearest integer.
pub fn distance_to_integer(alpha: f64) -> f64 {
    let r = alpha.rem_euclid(1.0);
    r.min(1.0 - r)
}

/// `Σ_{0≤n<terms} e^{2πinα}` by direct compensated summation.
pub fn geometric_sum(alpha: f64, terms: u64) -> Complex64 {
    let alpha = alpha.rem_euclid(1.0);
    let mut acc = CompensatedComplex::default();
    for n in 0..terms {
        let angle = TAU * (alpha * n as f64).fract();
        acc.add(Complex64::new(angle.cos(), angle.sin()));
    }
    acc.value()
}

/// Upper bound `min(terms, π/(2‖α‖))` for [`geometric_sum`].
pub fn geometric_sum_bound(alpha: f64, terms: u64) -> f64 {
    let d = distance_to_integer(alpha);
    if d == 0.0 {
        terms as f64
    } else {
        (PI / (2.0 * d)).min(terms as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{partial_sums, sieve, ArithFn};
    use proptest::prelude::*;
    use rand::Rng;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn constant_and_alternating_inputs() {
        for s in [
            dft_forward(&[1.0; 4]).unwrap(),
            dft_forward_direct(&[1.0; 4]).unwrap(),
        ] {
            let want = [4.0, 0.0, 0.0, 0.0];
            for (c, w) in s.coefficients().iter().zip(want) {
                assert!(close(*c, Complex64::new(w, 0.0), 1e-12));
            }
        }
        let s = dft_forward(&[1.0, -1.0, 1.0, -1.0]).unwrap();
        let want = [0.0, 0.0, 4.0, 0.0];
        for (c, w) in s.coefficients().iter().zip(want) {
            assert!(close(*c, Complex64::new(w, 0.0), 1e-12));
        }
        assert_eq!(s.convention(), Convention::ForwardPositive);
    }

    #[test]
    fn forward_sign_is_positive() {
        // f = δ₁ gives f̂(s) = e^{+2πis/N}.
        let s = dft_forward_direct(&[0.0, 1.0, 0.0]).unwrap();
        assert!(close(s.coefficients()[1], unit_root(1, 3), 1e-15));
        let s = dft_forward_fft(&[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(close(s.coefficients()[1], Complex64::new(0.0, 1.0), 1e-15));
    }

    #[test]
    fn empty_input_rejected() {
        assert!(dft_forward(&[]).is_err());
        assert!(Spectrum::from_coefficients(vec![]).is_err());
    }

    #[test]
    fn inverse_examples() {
        let v = [1.0, -1.0, 0.0, 1.0];
        let back = dft_inverse(&dft_forward(&v).unwrap());
        for (a, b) in back.iter().zip(v) {
            assert!((a - b).abs() < 1e-12);
        }
        let n = 7;
        let mut c = vec![Complex64::new(0.0, 0.0); n];
        c[0] = Complex64::new(n as f64, 0.0);
        let ones = dft_inverse(&Spectrum::from_coefficients(c).unwrap());
        assert!(ones.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn mobius_spectrum_passes_parseval_and_matches_direct() {
        let mu = sieve(ArithFn::Mobius, 1, 1023).unwrap();
        let mut v = vec![0.0; 1024];
        for n in 1..1024 {
            v[n] = mu.get(n as u64).unwrap() as f64;
        }
        let fast = dft_forward(&v).unwrap();
        let slow = dft_forward_direct(&v).unwrap();
        let energy = parseval_energy(&v);
        assert!((fast.energy() - 1024.0 * energy).abs() <= 1e-9 * 1024.0 * energy);
        let scale = fast
            .coefficients()
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        for (a, b) in fast.coefficients().iter().zip(slow.coefficients()) {
            assert!(close(*a, *b, 1e-9 * scale));
        }
        assert!(fast.conjugate_asymmetry() < 1e-9);
    }

    #[test]
    fn non_smooth_lengths_take_direct_path_and_agree() {
        assert!(!uses_fft(1009) && uses_fft(1024) && uses_fft(5003) && !uses_fft(1));
        let v: Vec<f64> = (0..1009).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect();
        let a = dft_forward(&v).unwrap();
        let b = dft_forward_fft(&v).unwrap();
        for (x, y) in a.coefficients().iter().zip(b.coefficients()) {
            assert!(close(*x, *y, 1e-9 * 1009.0 * 6.0));
        }
    }

    #[test]
    fn spectrum_csv_header() {
        let s = dft_forward(&[1.0, 0.0]).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(
            text.starts_with("s,re,im,magnitude\n0,1.0,0.0,1.0\n"),
            "{text}"
        );
    }

    #[test]
    fn twisted_sum_examples() {
        let mu = sieve(ArithFn::Mobius, 1, 200).unwrap();
        let m = partial_sums(&mu, &[150]).unwrap().checkpoints[0].1;
        let v = twisted_sum(&mu, 0.0, 150).unwrap();
        assert_eq!((v.re, v.im), (m as f64, 0.0));
        // −μ(1) + μ(2) − μ(3) + μ(4) = −1 − 1 + 1 + 0.
        let v = twisted_sum(&mu, 0.5, 5).unwrap();
        assert!((v.re + 1.0).abs() < 1e-12 && v.im.abs() < 1e-12);
        let r = twisted_sum_rational(&mu, 1, 2, 5).unwrap();
        assert!((r.re + 1.0).abs() < 1e-12 && r.im.abs() < 1e-12);
        // α is reduced mod 1.
        let v2 = twisted_sum(&mu, 3.5, 5).unwrap();
        assert_eq!(v2.alpha, 0.5);
        assert!(matches!(
            twisted_sum(&mu, 0.1, 202),
            Err(Error::Coverage { .. })
        ));
    }

    #[test]
    fn rational_and_real_paths_agree() {
        let la = sieve(ArithFn::Liouville, 1, 5000).unwrap();
        for (a, q) in [(1, 3), (2, 7), (5, 12), (0, 1)] {
            let exact = twisted_sum_rational(&la, a, q, 5000).unwrap();
            let real = twisted_sum(&la, a as f64 / q as f64, 5000).unwrap();
            assert!(close(exact.value(), real.value(), 1e-8), "{a}/{q}");
        }
    }

    #[test]
    fn golden_ratio_twist_is_small() {
        let x = 100_000;
        let mu = sieve(ArithFn::Mobius, 1, x).unwrap();
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        let v = twisted_sum(&mu, phi, x).unwrap();
        assert!(v.magnitude() <= x as f64 / (x as f64).ln());
        assert!(v.magnitude() <= (x - 1) as f64);
    }

    #[test]
    fn sup_over_zero_only_is_mertens() {
        let mu = sieve(ArithFn::Mobius, 1, 1000).unwrap();
        let m = partial_sums(&mu, &[1000]).unwrap().checkpoints[0].1;
        let s = sup_twisted_sum(&mu, 1000, 1, 0, 7).unwrap();
        assert_eq!(s.sup, m.unsigned_abs() as f64);
        assert_eq!(s.argmax_fraction, Some((0, 1)));
        assert_eq!(s.evaluated, 1);
        assert!(sup_twisted_sum(&mu, 1000, 0, 0, 7).is_err());
    }

    #[test]
    fn sup_is_deterministic() {
        let mu = sieve(ArithFn::Mobius, 1, 10_000).unwrap();
        let a = sup_twisted_sum(&mu, 10_000, 20, 100, 42).unwrap();
        let b = sup_twisted_sum(&mu, 10_000, 20, 100, 42).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        // 1 + Σ_{2≤q≤20} φ(q) Farey points.
        let farey: usize = (1..=20u64)
            .map(|q| (0..q).filter(|&a| gcd(a, q) == 1).count())
            .sum();
        assert_eq!(a.evaluated, farey + 100);
    }

    #[test]
    fn parseval_energies() {
        let x = 1000u64;
        let t = 3u64;
        let la = sieve(ArithFn::Liouville, 1, x + t).unwrap();
        let w: Vec<i64> = (1..x)
            .map(|n| (la.get(n).unwrap() * la.get(n + t).unwrap()) as i64)
            .collect();
        assert_eq!(parseval_energy_exact(&w), (x - 1) as u128);
        assert_eq!(parseval_energy(&[0.0; 10]), 0.0);
    }

    #[test]
    fn quadrature_matches_parseval() {
        let x = 2048u64;
        let mu = sieve(ArithFn::Mobius, 1, x + 1).unwrap();
        let w: Vec<f64> = (1..x)
            .map(|n| (mu.get(n).unwrap() * mu.get(n + 1).unwrap()) as f64)
            .collect();
        let q = quadrature_energy(&w, 4 * x as usize).unwrap();
        let e = parseval_energy(&w);
        assert!((q - e).abs() <= 1e-3 * e, "{q} vs {e}");
        assert!(quadrature_energy(&w, 0).is_err());
    }

    #[test]
    fn geometric_sum_bound_holds() {
        assert!(close(
            geometric_sum(0.0, 50),
            Complex64::new(50.0, 0.0),
            1e-12
        ));
        let n = 257;
        for k in 1..n {
            let alpha = k as f64 / n as f64 + 1e-4;
            let s = geometric_sum(alpha, n);
            assert!(s.norm() <= geometric_sum_bound(alpha, n) + 1e-6);
            assert!(s.norm() <= PI / (2.0 * distance_to_integer(alpha)) + 1e-6);
        }
        assert_eq!(distance_to_integer(0.75), 0.25);
        assert_eq!(distance_to_integer(-0.1), distance_to_integer(0.9));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn round_trip(seed in any::<u64>(), n in 1usize..600) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v: Vec<f64> = (0..n).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
            let back = dft_inverse(&dft_forward(&v).unwrap());
            let err = back.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            prop_assert!(err <= 1e-9 * n as f64);
        }

        #[test]
        fn linearity(seed in any::<u64>(), n in 1usize..300, a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mix: Vec<f64> = u.iter().zip(&v).map(|(p, q)| a * p + b * q).collect();
            let (fu, fv, fm) = (dft_forward(&u).unwrap(), dft_forward(&v).unwrap(), dft_forward(&mix).unwrap());
            let scale = n as f64 * (a.abs() + b.abs() + 1.0);
            for s in 0..n {
                let want = fu.coefficients()[s] * a + fv.coefficients()[s] * b;
                prop_assert!((fm.coefficients()[s] - want).norm() <= 1e-9 * scale);
            }
        }

        #[test]
        fn parseval_and_symmetry(seed in any::<u64>(), n in 1usize..700) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let s = dft_forward(&v).unwrap();
            let e = parseval_energy(&v);
            prop_assert!((s.energy() - n as f64 * e).abs() <= 1e-9 * (n as f64 * e).max(1e-300));
            prop_assert!(s.conjugate_asymmetry() <= 1e-9 * n as f64);
        }
    }
}
