//! Segmented sieving of μ(n), λ(n) and μ²(n), and the exact sums built on
//! top of the resulting tables.

mod io;

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::numeric::CompensatedSum;
use crate::{Error, Result};

pub use io::{load_table, read_table, save_table, write_table, TABLE_MAGIC, TABLE_VERSION};

/// Default number of integers sieved per segment.
pub const DEFAULT_SEGMENT_LEN: usize = 1 << 20;

/// Exclusive upper limit on sieved integers. Keeps the base-prime sieve at
/// most 2^24 entries.
pub const MAX_SIEVE_END: u64 = 1 << 48;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ArithFn {
    Mobius,
    Liouville,
    MobiusSquared,
}

impl ArithFn {
    /// Identifier byte used in the table file format.
    pub fn id(self) -> u8 {
        match self {
            ArithFn::Mobius => 0,
            ArithFn::Liouville => 1,
            ArithFn::MobiusSquared => 2,
        }
    }

    pub fn from_id(id: u8) -> Option<Self> {
        match id {
            0 => Some(ArithFn::Mobius),
            1 => Some(ArithFn::Liouville),
            2 => Some(ArithFn::MobiusSquared),
            _ => None,
        }
    }

    /// Whether `v` is a value this function can take.
    pub fn admits(self, v: i8) -> bool {
        match self {
            ArithFn::Mobius => (-1..=1).contains(&v),
            ArithFn::Liouville => v == 1 || v == -1,
            ArithFn::MobiusSquared => v == 0 || v == 1,
        }
    }
}

impl fmt::Display for ArithFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArithFn::Mobius => "mobius",
            ArithFn::Liouville => "liouville",
            ArithFn::MobiusSquared => "mobius2",
        })
    }
}

impl std::str::FromStr for ArithFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mobius" | "mu" => Ok(ArithFn::Mobius),
            "liouville" | "lambda" => Ok(ArithFn::Liouville),
            "mobius2" | "mobius_squared" | "mu2" => Ok(ArithFn::MobiusSquared),
            other => Err(Error::invalid(format!(
                "unknown function '{other}' (expected mobius, liouville or mobius2)"
            ))),
        }
    }
}

/// Values of one arithmetic function on the contiguous range
/// `start .. start + len`. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArithmeticTable {
    function: ArithFn,
    start: u64,
    values: Vec<i8>,
}

impl ArithmeticTable {
    /// Wraps precomputed values, checking the value domain and range.
    pub fn new(function: ArithFn, start: u64, values: Vec<i8>) -> Result<Self> {
        check_range(start, values.len() as u64)?;
        if let Some((i, &v)) = values
            .iter()
            .enumerate()
            .find(|(_, &v)| !function.admits(v))
        {
            return Err(Error::invalid(format!(
                "value {v} at n = {} is not admissible for {function}",
                start + i as u64
            )));
        }
        Ok(Self {
            function,
            start,
            values,
        })
    }

    pub fn function(&self) -> ArithFn {
        self.function
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    /// One past the last covered integer.
    pub fn end(&self) -> u64 {
        self.start + self.values.len() as u64
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn get(&self, n: u64) -> Option<i8> {
        n.checked_sub(self.start)
            .and_then(|i| self.values.get(usize::try_from(i).ok()?))
            .copied()
    }

    pub fn covers(&self, lo: u64, hi: u64) -> bool {
        lo >= hi || (lo >= self.start && hi <= self.end())
    }

    /// Errors with the required range when `[lo, hi)` is not covered.
    pub fn require(&self, lo: u64, hi: u64) -> Result<()> {
        if self.covers(lo, hi) {
            Ok(())
        } else {
            Err(Error::Coverage {
                function: self.function.to_string(),
                have_lo: self.start,
                have_hi: self.end(),
                need_lo: lo,
                need_hi: hi,
            })
        }
    }

    /// Values for `n` in `[lo, hi)`. Panics if not covered; call
    /// [`require`](Self::require) first.
    pub fn slice(&self, lo: u64, hi: u64) -> &[i8] {
        if lo >= hi {
            return &[];
        }
        let a = (lo - self.start) as usize;
        let b = (hi - self.start) as usize;
        &self.values[a..b]
    }
}

/// Exact prefix sums `Σ_{n<x} f(n)` at increasing checkpoints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartialSumSeries {
    pub function: ArithFn,
    pub checkpoints: Vec<(u64, i64)>,
}

/// Sieve configuration. Segments are processed in parallel on the current
/// rayon pool; the output does not depend on the segment length or the
/// number of threads.
#[derive(Clone, Copy, Debug)]
pub struct SieveConfig {
    pub segment_len: usize,
}

impl Default for SieveConfig {
    fn default() -> Self {
        Self {
            segment_len: DEFAULT_SEGMENT_LEN,
        }
    }
}

/// Sieves `function` on `start .. start + length` with the default segment
/// length.
pub fn sieve(function: ArithFn, start: u64, length: u64) -> Result<ArithmeticTable> {
    SieveConfig::default().sieve(function, start, length)
}

impl SieveConfig {
    pub fn sieve(&self, function: ArithFn, start: u64, length: u64) -> Result<ArithmeticTable> {
        let end = check_range(start, length)?;
        if length == 0 {
            return Err(Error::Sizing("table length must be at least 1".into()));
        }
        let len = usize::try_from(length)
            .map_err(|_| Error::Sizing(format!("length {length} does not fit in memory")))?;
        let seg = self.segment_len.max(1);
        let base = primes_up_to((end - 1).isqrt());

        let mut values = vec![0i8; len];
        values
            .par_chunks_mut(seg)
            .enumerate()
            .for_each(|(i, chunk)| {
                let lo = start + (i * seg) as u64;
                sieve_segment(function, lo, chunk, &base);
            });
        Ok(ArithmeticTable {
            function,
            start,
            values,
        })
    }
}

fn check_range(start: u64, length: u64) -> Result<u64> {
    if start == 0 {
        return Err(Error::Sizing(
            "start must be at least 1: the functions are defined on n >= 1".into(),
        ));
    }
    match start.checked_add(length) {
        Some(end) if end <= MAX_SIEVE_END => Ok(end),
        _ => Err(Error::Sizing(format!(
            "range start {start} + length {length} exceeds the sieve limit {MAX_SIEVE_END}"
        ))),
    }
}

/// First multiple of `m` that is `>= lo`, as an offset from `lo`.
fn first_offset(lo: u64, m: u64) -> usize {
    (lo.div_ceil(m) * m - lo) as usize
}

fn sieve_segment(function: ArithFn, lo: u64, out: &mut [i8], primes: &[u64]) {
    let hi = lo + out.len() as u64;
    match function {
        ArithFn::MobiusSquared => {
            out.fill(1);
            for &p in primes {
                let p2 = p * p;
                if p2 >= hi {
                    break;
                }
                let mut i = first_offset(lo, p2);
                while i < out.len() {
                    out[i] = 0;
                    i += p2 as usize;
                }
            }
        }
        ArithFn::Mobius => {
            // prod[i] accumulates the distinct small primes of lo + i; a
            // squarefree n with prod < n has exactly one prime factor above
            // the base-prime bound.
            out.fill(1);
            let mut prod = vec![1u64; out.len()];
            for &p in primes {
                if p >= hi {
                    break;
                }
                let mut i = first_offset(lo, p);
                while i < out.len() {
                    out[i] = -out[i];
                    prod[i] *= p;
                    i += p as usize;
                }
                let p2 = p * p;
                if p2 < hi {
                    let mut i = first_offset(lo, p2);
                    while i < out.len() {
                        out[i] = 0;
                        i += p2 as usize;
                    }
                }
            }
            for (i, v) in out.iter_mut().enumerate() {
                if *v != 0 && prod[i] != lo + i as u64 {
                    *v = -*v;
                }
            }
        }
        ArithFn::Liouville => {
            // Every prime power p^k dividing n flips the sign once, so the
            // total number of flips from p is its multiplicity.
            out.fill(1);
            let mut prod = vec![1u64; out.len()];
            for &p in primes {
                if p >= hi {
                    break;
                }
                let mut pk = p;
                loop {
                    let mut i = first_offset(lo, pk);
                    while i < out.len() {
                        out[i] = -out[i];
                        prod[i] *= p;
                        i += pk as usize;
                    }
                    match pk.checked_mul(p) {
                        Some(next) if next < hi => pk = next,
                        _ => break,
                    }
                }
            }
            for (i, v) in out.iter_mut().enumerate() {
                if prod[i] != lo + i as u64 {
                    *v = -*v;
                }
            }
        }
    }
}

/// Primes `p <= n` by the sieve of Eratosthenes.
pub(crate) fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Prefix sums `Σ_{n<x} f(n)` for each checkpoint `x`.
///
/// Checkpoints are sorted and deduplicated. Each must satisfy
/// `1 <= x <= table.end()`, and any `x > 1` requires the table to start at 1.
pub fn partial_sums(table: &ArithmeticTable, checkpoints: &[u64]) -> Result<PartialSumSeries> {
    let mut xs = checkpoints.to_vec();
    xs.sort_unstable();
    xs.dedup();
    let hi = if table.start() == 1 { table.end() } else { 1 };
    if let Some(&bad) = xs.iter().find(|&&x| x == 0 || x > hi) {
        return Err(Error::Checkpoint {
            checkpoint: bad,
            hi,
        });
    }

    let mut out = Vec::with_capacity(xs.len());
    let mut acc = 0i64;
    let mut upto = 1u64;
    for x in xs {
        acc += table.slice(upto, x).iter().map(|&v| v as i64).sum::<i64>();
        upto = x;
        out.push((x, acc));
    }
    Ok(PartialSumSeries {
        function: table.function(),
        checkpoints: out,
    })
}

/// `Σ_{n<x} f(n)/n` with compensated summation in ascending `n`; the
/// accumulated rounding error stays well below `1e-12` relative for tables
/// that fit in memory.
pub fn harmonic_sum(table: &ArithmeticTable, x: u64) -> Result<f64> {
    if x == 0 {
        return Err(Error::Checkpoint {
            checkpoint: 0,
            hi: table.end(),
        });
    }
    table.require(1, x)?;
    let mut acc = CompensatedSum::default();
    for (i, &v) in table.slice(1, x).iter().enumerate() {
        if v != 0 {
            acc.add(v as f64 / (i + 1) as f64);
        }
    }
    Ok(acc.value())
}

/// The number of squarefree `n < x`, via `Σ_{d² < x} μ(d)·⌊(x−1)/d²⌋`.
pub fn squarefree_count(x: u64) -> Result<u64> {
    if x < 2 {
        return Err(Error::invalid(format!(
            "squarefree_count needs x >= 2, got {x}"
        )));
    }
    if x > MAX_SIEVE_END {
        return Err(Error::Sizing(format!(
            "x = {x} exceeds the sieve limit {MAX_SIEVE_END}"
        )));
    }
    let m = x - 1;
    let root = m.isqrt();
    let mu = sieve(ArithFn::Mobius, 1, root)?;
    let total: i128 = mu
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let d = (i + 1) as u64;
            v as i128 * (m / (d * d)) as i128
        })
        .sum();
    u64::try_from(total).map_err(|_| Error::Internal(format!("negative squarefree count {total}")))
}
