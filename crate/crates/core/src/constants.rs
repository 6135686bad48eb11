//! Truncated Euler products for the density of integers `n` at which all of
//! `q·n + a_i` are squarefree, and the counting oracles that check them.
//!
//! The local factor at `p` is `1 − ϖ(p)/p²`, where `ϖ(p)` counts residues
//! `m mod p²` for which some `q·m + a_i ≡ 0 (mod p²)`. For the single tuple
//! `(0)` the product is `Π(1 − 1/p²) = 6/π²`.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{is_prime, primes_up_to, sieve, ArithFn, ArithmeticTable};
use crate::correlation::TupleSpec;
use crate::numeric::gcd;
use crate::{Error, Result};

/// `6/π²`, the density of squarefree integers.
pub const SQUAREFREE_DENSITY: f64 = 0.607_927_101_854_026_6;

/// Moduli `p²` up to this size are handled by enumerating residues.
pub const ENUMERATION_LIMIT: u64 = 1_000_000;

/// How the residue count `ϖ(p)` combines the offsets.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OmegaReading {
    /// Residues killed by at least one offset. Gives `6/π²` for `k = 1`.
    #[default]
    Union,
    /// Residues killed by every offset simultaneously.
    Conjunction,
}

/// `ϖ(p)` under the union reading.
pub fn omega_p(tuple: &TupleSpec, p: u64) -> Result<u64> {
    omega_p_with(tuple, p, OmegaReading::Union)
}

pub fn omega_p_with(tuple: &TupleSpec, p: u64, reading: OmegaReading) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    let p2 = p
        .checked_mul(p)
        .ok_or_else(|| Error::Sizing(format!("p² overflows for p = {p}")))?;
    if p2 <= ENUMERATION_LIMIT {
        Ok(enumerate_residues(tuple, p2, reading))
    } else {
        Ok(count_residues(tuple, p2, reading))
    }
}

/// Brute-force count over all `m mod p²`, for any `p`.
pub fn omega_p_enumerated(tuple: &TupleSpec, p: u64, reading: OmegaReading) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    Ok(enumerate_residues(tuple, p * p, reading))
}

fn enumerate_residues(tuple: &TupleSpec, modulus: u64, reading: OmegaReading) -> u64 {
    let q = (tuple.q() % modulus) as u128;
    let md = modulus as u128;
    let targets: Vec<u128> = tuple
        .offsets()
        .iter()
        .map(|&a| (md - (a as u128 % md)) % md)
        .collect();
    (0..md)
        .filter(|&m| {
            let qm = q * m % md;
            match reading {
                OmegaReading::Union => targets.contains(&qm),
                OmegaReading::Conjunction => targets.iter().all(|&t| t == qm),
            }
        })
        .count() as u64
}

/// `q·m ≡ −a (mod p²)` is solvable iff `g = gcd(q, p²)` divides `a`, and
/// then has exactly `g` solutions; distinct `a mod p²` give disjoint
/// solution sets.
fn count_residues(tuple: &TupleSpec, modulus: u64, reading: OmegaReading) -> u64 {
    let g = gcd(tuple.q() % modulus, modulus);
    let mut residues: Vec<u64> = tuple.offsets().iter().map(|&a| a % modulus).collect();
    residues.sort_unstable();
    residues.dedup();
    match reading {
        OmegaReading::Union => g * residues.iter().filter(|&&r| r % g == 0).count() as u64,
        OmegaReading::Conjunction => {
            if residues.len() == 1 && residues[0].is_multiple_of(g) {
                g
            } else {
                0
            }
        }
    }
}

/// A truncated Euler product `Π_{p≤P}(1 − ϖ(p)/p²)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EulerProductResult {
    pub offsets: Vec<u64>,
    pub q: u64,
    pub prime_bound: u64,
    pub value: f64,
    /// Upper bound on the distance to the infinite product.
    pub tail_bound: f64,
    /// The first prime with `ϖ(p) = p²`, which forces the product to 0.
    pub obstruction: Option<u64>,
    pub oracle_density: Option<f64>,
    pub oracle_x: Option<u64>,
    #[serde(skip)]
    pub reading: OmegaReading,
}

impl EulerProductResult {
    /// Attaches the exact counting density at `x`.
    pub fn with_oracle(mut self, x: u64) -> Result<Self> {
        let tuple = TupleSpec::new(self.offsets.clone(), self.q)?;
        self.oracle_density = Some(density_oracle(&tuple, x)?);
        self.oracle_x = Some(x);
        Ok(self)
    }

    /// `|oracle − value| / value`, when an oracle is attached.
    pub fn relative_gap(&self) -> Option<f64> {
        self.oracle_density
            .map(|d| (d - self.value).abs() / self.value)
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }
}

pub fn singular_series(tuple: &TupleSpec, prime_bound: u64) -> Result<EulerProductResult> {
    singular_series_with(tuple, prime_bound, OmegaReading::Union)
}

/// Evaluates the local factors in parallel and multiplies them in ascending
/// prime order.
pub fn singular_series_with(
    tuple: &TupleSpec,
    prime_bound: u64,
    reading: OmegaReading,
) -> Result<EulerProductResult> {
    if prime_bound < 2 {
        return Err(Error::invalid(format!(
            "prime bound must be at least 2, got {prime_bound}"
        )));
    }
    if prime_bound > 1 << 32 {
        return Err(Error::Sizing(format!(
            "prime bound {prime_bound} is too large"
        )));
    }
    let primes = primes_up_to(prime_bound);
    let omegas: Vec<u64> = primes
        .par_iter()
        .map(|&p| omega_p_with(tuple, p, reading))
        .collect::<Result<_>>()?;

    let mut value = 1.0f64;
    let mut obstruction = None;
    for (&p, &w) in primes.iter().zip(&omegas) {
        let p2 = p * p;
        if w == p2 {
            obstruction = Some(p);
            value = 0.0;
            break;
        }
        value *= 1.0 - w as f64 / p2 as f64;
    }

    // Σ_{p>P} ϖ(p)/p² with ϖ(p) <= k whenever p does not divide q.
    let k = tuple.k() as f64;
    let mut tail_bound = k / (prime_bound - 1) as f64;
    let mut rest = tuple.q();
    let mut d = 2;
    while d * d <= rest {
        if rest.is_multiple_of(d) {
            while rest.is_multiple_of(d) {
                rest /= d;
            }
            if d > prime_bound {
                tail_bound += omega_p_with(tuple, d, reading)? as f64 / (d * d) as f64;
            }
        }
        d += 1;
    }
    if rest > 1 && rest > prime_bound {
        tail_bound += omega_p_with(tuple, rest, reading)? as f64 / (rest as f64 * rest as f64);
    }

    Ok(EulerProductResult {
        offsets: tuple.offsets().to_vec(),
        q: tuple.q(),
        prime_bound,
        value,
        tail_bound,
        obstruction,
        oracle_density: None,
        oracle_x: None,
        reading,
    })
}

/// `#{1 <= n < x : q·n + a_i squarefree for all i}`, read from `table`
/// (values are squared, so a μ or μ² table both work).
pub fn density_count(table: &ArithmeticTable, tuple: &TupleSpec, x: u64) -> Result<u64> {
    table.require(1, tuple.reach(x)?)?;
    let q = tuple.q();
    let count = (1..x)
        .into_par_iter()
        .filter(|&n| {
            tuple
                .offsets()
                .iter()
                .all(|&a| table.get(q * n + a).unwrap() != 0)
        })
        .count();
    Ok(count as u64)
}

/// [`density_count`] over a freshly sieved μ² table, divided by `x`.
pub fn density_oracle(tuple: &TupleSpec, x: u64) -> Result<f64> {
    if x == 0 {
        return Err(Error::invalid("oracle needs x >= 1"));
    }
    let reach = tuple.reach(x)?;
    let table = sieve(ArithFn::MobiusSquared, 1, reach - 1)?;
    Ok(density_count(&table, tuple, x)? as f64 / x as f64)
}
