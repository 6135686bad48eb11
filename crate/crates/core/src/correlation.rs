//! Shift correlations of arithmetic tables in exact integer arithmetic, and
//! the spectral identities that relate them to the DFT.
//!
//! Linear correlations follow the strict bound `1 <= n < x` and read the
//! second factor beyond `x`: `R(t) = Σ_{1≤n<x} f(n)·g(n+t)` needs `g` on
//! `[1, x + t)`. Circular correlations act on plain sequences of one period
//! `N` with wraparound indices.

use std::io::Write;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::Serialize;

use crate::arith::{ArithFn, ArithmeticTable};
use crate::numeric::CompensatedSum;
use crate::spectral::{dft_forward, fft_negative, fft_positive};
use crate::{Error, Result};

/// Sequences up to this length are circularly correlated directly.
pub const CIRCULAR_DIRECT_LIMIT: usize = 1 << 12;

/// Linear correlations with at most this many `(n, t)` products are summed
/// directly; larger ones go through a zero-padded FFT.
const LINEAR_DIRECT_WORK: u64 = 1 << 26;

/// FFT results must round to integers within this distance.
const ROUNDING_SLACK: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Mode {
    Linear,
    Circular,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Linear => "LINEAR",
            Mode::Circular => "CIRCULAR",
        }
    }
}

/// Strictly increasing offsets `a₀ < … < a_{k−1}` and a linear coefficient
/// `q` for arguments of the form `q·n + a_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TupleSpec {
    offsets: Vec<u64>,
    q: u64,
}

impl TupleSpec {
    pub fn new(offsets: Vec<u64>, q: u64) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::invalid("a tuple needs at least one offset"));
        }
        if offsets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!(
                "tuple offsets {offsets:?} must be strictly increasing"
            )));
        }
        if q == 0 {
            return Err(Error::invalid("tuple coefficient q must be at least 1"));
        }
        Ok(Self { offsets, q })
    }

    /// Offsets with `q = 1`.
    pub fn shifts(offsets: &[u64]) -> Result<Self> {
        Self::new(offsets.to_vec(), 1)
    }

    pub fn offsets(&self) -> &[u64] {
        &self.offsets
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn k(&self) -> usize {
        self.offsets.len()
    }

    pub fn last(&self) -> u64 {
        *self.offsets.last().unwrap()
    }

    /// One past the largest argument `q·(x−1) + a_{k−1}` reached for `n < x`.
    pub fn reach(&self, x: u64) -> Result<u64> {
        self.q
            .checked_mul(x.saturating_sub(1))
            .and_then(|v| v.checked_add(self.last() + 1))
            .ok_or_else(|| Error::Sizing(format!("tuple arguments overflow for x = {x}")))
    }

    /// Offsets joined with `;`, as used in CSV output.
    pub fn label(&self) -> String {
        join_offsets(&self.offsets)
    }
}

fn join_offsets(offsets: &[u64]) -> String {
    offsets
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(";")
}

/// Values `R(t)` over a set of shifts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorrelationSeries {
    pub mode: Mode,
    /// Range bound for linear series, period for circular ones.
    pub x: u64,
    pub shifts: Vec<u64>,
    pub values: Vec<i64>,
    /// Function of the left factor (when it came from a table) and the
    /// offsets of the fixed left factors, `a₀ < … < a_{k−2}`.
    pub left_function: Option<ArithFn>,
    pub left_offsets: Vec<u64>,
    pub right_function: Option<ArithFn>,
}

impl CorrelationSeries {
    /// A series with shifts `0 .. values.len()` and no function labels.
    pub fn from_values(mode: Mode, x: u64, values: Vec<i64>) -> Result<Self> {
        let series = Self {
            mode,
            x,
            shifts: (0..values.len() as u64).collect(),
            values,
            left_function: None,
            left_offsets: vec![0],
            right_function: None,
        };
        series.check_bounds()?;
        Ok(series)
    }

    fn check_bounds(&self) -> Result<()> {
        let limit = match self.mode {
            Mode::Linear => self.x.saturating_sub(1),
            Mode::Circular => self.x,
        };
        if let Some((t, v)) = self
            .shifts
            .iter()
            .zip(&self.values)
            .find(|(_, v)| v.unsigned_abs() > limit)
        {
            return Err(Error::invalid(format!(
                "|R({t})| = {} exceeds the bound {limit} for x = {}",
                v.unsigned_abs(),
                self.x
            )));
        }
        Ok(())
    }

    /// Number of factors in each product.
    pub fn k(&self) -> usize {
        self.left_offsets.len() + 1
    }

    pub fn get(&self, t: u64) -> Option<i64> {
        self.shifts
            .iter()
            .position(|&s| s == t)
            .map(|i| self.values[i])
    }

    fn rows(&self) -> Vec<SeriesRow> {
        let offsets = join_offsets(&self.left_offsets);
        self.shifts
            .iter()
            .zip(&self.values)
            .map(|(&t, &r)| SeriesRow {
                t,
                r,
                r_over_x: r as f64 / self.x as f64,
                mode: self.mode.as_str(),
                k: self.k(),
                offsets: offsets.clone(),
            })
            .collect()
    }

    /// CSV with columns `t,R,R_over_x,mode,k,offsets`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for row in self.rows() {
            out.serialize(row)?;
        }
        out.flush()?;
        Ok(())
    }

    /// JSON mirror of the CSV rows plus the series metadata.
    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        #[derive(Serialize)]
        struct Doc {
            schema_version: u32,
            mode: Mode,
            x: u64,
            left_function: Option<ArithFn>,
            right_function: Option<ArithFn>,
            rows: Vec<SeriesRow>,
        }
        let doc = Doc {
            schema_version: 1,
            mode: self.mode,
            x: self.x,
            left_function: self.left_function,
            right_function: self.right_function,
            rows: self.rows(),
        };
        serde_json::to_writer_pretty(w, &doc)?;
        Ok(())
    }
}

#[derive(Serialize)]
struct SeriesRow {
    t: u64,
    #[serde(rename = "R")]
    r: i64,
    #[serde(rename = "R_over_x")]
    r_over_x: f64,
    mode: &'static str,
    k: usize,
    offsets: String,
}

fn as_i64(values: &[i8]) -> Vec<i64> {
    values.iter().map(|&v| v as i64).collect()
}

/// `R(t) = Σ_{1≤n<x} f(n)·g(n+t)` for `t = 0 ..= t_max`.
///
/// `f` must cover `[1, x)` and `g` must cover `[1, x + t_max)`.
pub fn correlate_linear(
    f: &ArithmeticTable,
    g: &ArithmeticTable,
    x: u64,
    t_max: u64,
) -> Result<CorrelationSeries> {
    if x == 0 {
        return Err(Error::invalid("range bound x must be at least 1"));
    }
    let g_end = x
        .checked_add(t_max)
        .ok_or_else(|| Error::Sizing("x + t_max overflows".into()))?;
    f.require(1, x)?;
    g.require(1, g_end)?;

    let fv = f.slice(1, x);
    let work = (x - 1).saturating_mul(t_max + 1);
    let values = if work <= LINEAR_DIRECT_WORK {
        (0..=t_max)
            .into_par_iter()
            .map(|t| dot(fv, g.slice(1 + t, x + t)))
            .collect()
    } else {
        linear_fft(&as_i64(fv), &as_i64(g.slice(1, g_end)), t_max as usize)?
    };
    Ok(CorrelationSeries {
        mode: Mode::Linear,
        x,
        shifts: (0..=t_max).collect(),
        values,
        left_function: Some(f.function()),
        left_offsets: vec![0],
        right_function: Some(g.function()),
    })
}

fn dot(a: &[i8], b: &[i8]) -> i64 {
    a.iter().zip(b).map(|(&p, &q)| (p * q) as i64).sum()
}

/// `R(t) = Σ_i a[i]·b[i+t]` for `t <= t_max`, with `b` long enough that no
/// index wraps.
fn linear_fft(a: &[i64], b: &[i64], t_max: usize) -> Result<Vec<i64>> {
    let n = b.len().max(a.len() + t_max).next_power_of_two();
    let mut fa = vec![Complex64::new(0.0, 0.0); n];
    let mut fb = fa.clone();
    for (d, &v) in fa.iter_mut().zip(a) {
        d.re = v as f64;
    }
    for (d, &v) in fb.iter_mut().zip(b) {
        d.re = v as f64;
    }
    let r = circular_fft_complex(fa, fb);
    round_all(&r[..=t_max])
}

/// Circular correlation via `conj(f̂)·ĝ` and the inverse transform.
fn circular_fft_complex(mut fa: Vec<Complex64>, mut fb: Vec<Complex64>) -> Vec<f64> {
    let n = fa.len();
    fft_positive(&mut fa);
    fft_positive(&mut fb);
    let mut prod: Vec<Complex64> = fa.iter().zip(&fb).map(|(p, q)| p.conj() * q).collect();
    fft_negative(&mut prod);
    prod.into_iter().map(|c| c.re / n as f64).collect()
}

fn round_all(values: &[f64]) -> Result<Vec<i64>> {
    values
        .iter()
        .enumerate()
        .map(|(t, &v)| {
            let r = v.round();
            if (v - r).abs() > ROUNDING_SLACK {
                Err(Error::Internal(format!(
                    "FFT correlation at shift {t} is {v}, too far from an integer"
                )))
            } else {
                Ok(r as i64)
            }
        })
        .collect()
}

/// Which evaluation route [`correlate_circular_with`] takes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CircularMethod {
    /// Direct for `N <= CIRCULAR_DIRECT_LIMIT`, FFT above.
    Auto,
    Direct,
    Fft,
}

/// `R(t) = Σ_{n<N} f(n)·g((n+t) mod N)` for `t = 0 .. N−1`.
pub fn correlate_circular(f: &[i64], g: &[i64]) -> Result<CorrelationSeries> {
    correlate_circular_with(f, g, CircularMethod::Auto)
}

pub fn correlate_circular_with(
    f: &[i64],
    g: &[i64],
    method: CircularMethod,
) -> Result<CorrelationSeries> {
    if f.len() != g.len() {
        return Err(Error::invalid(format!(
            "circular correlation needs equal lengths, got {} and {}",
            f.len(),
            g.len()
        )));
    }
    if f.is_empty() {
        return Err(Error::invalid(
            "circular correlation needs a period of at least 1",
        ));
    }
    let n = f.len();
    let direct = match method {
        CircularMethod::Auto => n <= CIRCULAR_DIRECT_LIMIT,
        CircularMethod::Direct => true,
        CircularMethod::Fft => false,
    };
    let values = if direct {
        (0..n)
            .into_par_iter()
            .map(|t| {
                let (head, tail) = g.split_at(t);
                // g((n + t) mod N) walks tail then wraps to head.
                f.iter()
                    .zip(tail.iter().chain(head))
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    } else {
        let to_c = |v: &[i64]| v.iter().map(|&a| Complex64::new(a as f64, 0.0)).collect();
        round_all(&circular_fft_complex(to_c(f), to_c(g)))?
    };
    Ok(CorrelationSeries {
        mode: Mode::Circular,
        x: n as u64,
        shifts: (0..n as u64).collect(),
        values,
        left_function: None,
        left_offsets: vec![0],
        right_function: None,
    })
}

/// Length-`n` sequence with slot `i` holding `f(i)` and slot 0 zero.
pub fn embed(table: &ArithmeticTable, n: usize) -> Result<Vec<i64>> {
    table.require(1, n as u64)?;
    let mut v = vec![0i64; n];
    for (slot, &val) in v.iter_mut().skip(1).zip(table.slice(1, n as u64)) {
        *slot = val as i64;
    }
    Ok(v)
}

/// Period-`2x` sequences for the zero-padding construction: `f` is kept on
/// `[1, x)` and zeroed on `[x, 2x)`, while `g` keeps its true values on
/// `[1, 2x)`. Their circular correlation at `t < x` equals the linear
/// `R(t)` exactly, since `n + t < 2x` never wraps.
pub fn zero_padded_pair(
    f: &ArithmeticTable,
    g: &ArithmeticTable,
    x: u64,
) -> Result<(Vec<i64>, Vec<i64>)> {
    let period = x
        .checked_mul(2)
        .and_then(|p| usize::try_from(p).ok())
        .ok_or_else(|| Error::Sizing(format!("period 2x for x = {x} is too large")))?;
    let mut fp = embed(f, x as usize)?;
    fp.resize(period, 0);
    let gp = embed(g, period)?;
    Ok((fp, gp))
}

/// `Σ_{1≤n<x} Π_i f(q·n + a_i)` by direct product summation.
pub fn correlate_ktuple(table: &ArithmeticTable, tuple: &TupleSpec, x: u64) -> Result<i64> {
    let reach = tuple.reach(x)?;
    table.require(1, reach)?;
    let q = tuple.q();
    let total = (1..x)
        .into_par_iter()
        .map(|n| {
            let mut p = 1i64;
            for &a in tuple.offsets() {
                p *= table.get(q * n + a).unwrap() as i64;
                if p == 0 {
                    break;
                }
            }
            p
        })
        .sum();
    Ok(total)
}

/// `Σ_{1≤n<x} Π_b w(n+b)² · Π_c s(n+c)`, where `b` runs over
/// `squared_offsets` and `c` over `plain_offsets`. The weight table enters
/// squared, so either a μ or a μ² table gives the squarefree indicator.
pub fn correlate_nonlinear(
    weight_table: &ArithmeticTable,
    sign_table: &ArithmeticTable,
    squared_offsets: &[u64],
    plain_offsets: &[u64],
    x: u64,
) -> Result<i64> {
    for (name, offs) in [("squared", squared_offsets), ("plain", plain_offsets)] {
        if offs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!(
                "{name} offsets {offs:?} must be strictly increasing"
            )));
        }
    }
    if squared_offsets.is_empty() && plain_offsets.is_empty() {
        return Err(Error::invalid("at least one factor is required"));
    }
    if let Some(o) = squared_offsets.iter().find(|o| plain_offsets.contains(o)) {
        return Err(Error::invalid(format!(
            "offset {o} appears among both squared and plain factors"
        )));
    }
    let reach = |offs: &[u64]| offs.last().map_or(Ok(1), |&a| x.checked_add(a).ok_or(()));
    let (wr, sr) = match (reach(squared_offsets), reach(plain_offsets)) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return Err(Error::Sizing(format!("offsets overflow for x = {x}"))),
    };
    if !squared_offsets.is_empty() {
        weight_table.require(1, wr)?;
    }
    if !plain_offsets.is_empty() {
        sign_table.require(1, sr)?;
    }

    let total = (1..x.max(1))
        .into_par_iter()
        .map(|n| {
            let mut p = 1i64;
            for &b in squared_offsets {
                let v = weight_table.get(n + b).unwrap() as i64;
                p *= v * v;
            }
            if p != 0 {
                for &c in plain_offsets {
                    p *= sign_table.get(n + c).unwrap() as i64;
                }
            }
            p
        })
        .sum();
    Ok(total)
}

/// Linear correlation of two different functions, e.g. `Σ λ(n)μ(n+t)`.
pub fn crosscorrelate(
    f: &ArithmeticTable,
    g: &ArithmeticTable,
    x: u64,
    t_max: u64,
) -> Result<CorrelationSeries> {
    if f.function() == g.function() {
        return Err(Error::invalid(format!(
            "crosscorrelation needs two different functions, got {} twice",
            f.function()
        )));
    }
    correlate_linear(f, g, x, t_max)
}

fn require_full_shift_range(series: &CorrelationSeries) -> Result<()> {
    let complete = series.shifts.len() as u64 >= series.x
        && series
            .shifts
            .iter()
            .take(series.x as usize)
            .copied()
            .eq(0..series.x);
    if complete {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "averaging needs every shift 0 .. {} in order",
            series.x.saturating_sub(1)
        )))
    }
}

/// `(1/x)·Σ_{1≤t<x} R(t)`. The series must hold every shift below `x`.
pub fn uniform_average(series: &CorrelationSeries) -> Result<f64> {
    require_full_shift_range(series)?;
    let total: i128 = series.values[1..series.x as usize]
        .iter()
        .map(|&v| v as i128)
        .sum();
    Ok(total as f64 / series.x as f64)
}

/// `(1/x)·Σ_{0≤t<x} R(t)`, the same average with the `t = 0` term kept.
pub fn uniform_average_with_zero(series: &CorrelationSeries) -> Result<f64> {
    require_full_shift_range(series)?;
    let total: i128 = series.values[..series.x as usize]
        .iter()
        .map(|&v| v as i128)
        .sum();
    Ok(total as f64 / series.x as f64)
}

/// `(1/x)·Σ_{1≤t<x} R(t)/t`, compensated and summed in ascending `t`.
pub fn harmonic_average(series: &CorrelationSeries) -> Result<f64> {
    require_full_shift_range(series)?;
    let acc: CompensatedSum = (1..series.x as usize)
        .map(|t| series.values[t] as f64 / t as f64)
        .collect();
    Ok(acc.value() / series.x as f64)
}

/// Computes `R̂` two ways, as the DFT of the directly evaluated circular
/// correlation and as `conj(f̂)·ĝ`, and returns `max_s |difference|`.
pub fn spectrum_factorization_check(f: &[f64], g: &[f64]) -> Result<f64> {
    if f.len() != g.len() || f.is_empty() {
        return Err(Error::invalid(
            "factorization check needs two equal, non-empty lengths",
        ));
    }
    let n = f.len();
    let r: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|t| {
            let acc: CompensatedSum = (0..n).map(|i| f[i] * g[(i + t) % n]).collect();
            acc.value()
        })
        .collect();
    let via_series = dft_forward(&r)?;
    let fh = dft_forward(f)?;
    let gh = dft_forward(g)?;
    Ok(via_series
        .coefficients()
        .iter()
        .zip(fh.coefficients().iter().zip(gh.coefficients()))
        .map(|(r, (a, b))| (r - a.conj() * b).norm())
        .fold(0.0, f64::max))
}

/// `a_n = f(n)·g(n+t)` for `1 <= n < x`.
pub fn pointwise_products(
    f: &ArithmeticTable,
    g: &ArithmeticTable,
    t: u64,
    x: u64,
) -> Result<Vec<i64>> {
    f.require(1, x)?;
    g.require(1 + t, x + t)?;
    Ok(f.slice(1, x)
        .iter()
        .zip(g.slice(1 + t, x + t))
        .map(|(&a, &b)| (a * b) as i64)
        .collect())
}

/// Both sides of `R(t)² = Σ_n a_n² + Σ_{m≠n} a_m·a_n` with
/// `a_n = f(n)f(n+t)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NormExpansion {
    /// `R(t)²` from the linear correlation.
    pub lhs: i128,
    /// `Σ_{n<x} f²(n)f²(n+t)` from the squared values.
    pub diagonal: i128,
    /// `Σ_{m≠n} a_m a_n` accumulated as `2·Σ_n a_n·Σ_{m<n} a_m`.
    pub off_diagonal: i128,
    pub rhs: i128,
    pub diff: i128,
}

pub fn norm_expansion_check(table: &ArithmeticTable, t: u64, x: u64) -> Result<NormExpansion> {
    let r = correlate_linear(table, table, x, t)?.values[t as usize] as i128;
    let a = pointwise_products(table, table, t, x)?;
    let squares: Vec<i64> = table
        .slice(1, x + t)
        .iter()
        .map(|&v| (v * v) as i64)
        .collect();
    let diagonal: i128 = (0..a.len())
        .map(|i| (squares[i] * squares[i + t as usize]) as i128)
        .sum();
    let mut prefix = 0i128;
    let mut cross = 0i128;
    for &v in &a {
        cross += v as i128 * prefix;
        prefix += v as i128;
    }
    let off_diagonal = 2 * cross;
    let lhs = r * r;
    let rhs = diagonal + off_diagonal;
    Ok(NormExpansion {
        lhs,
        diagonal,
        off_diagonal,
        rhs,
        diff: lhs - rhs,
    })
}
