//! Reproducible experiment sweeps.
//!
//! An [`ExperimentSpec`] (usually read from a JSON config) names one kind of
//! sweep over a grid of `x` values. [`run`] sieves the tables it needs once,
//! evaluates every grid point with the exact routines from the other
//! modules, and returns an [`ExperimentReport`]. Points are independent jobs
//! scheduled on a rayon pool and collected in spec order, so the report
//! bytes never depend on the thread count. Wall-clock timings are kept
//! outside the serialized report for the same reason.

mod fit;
mod report;

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{sieve, ArithFn, ArithmeticTable, DEFAULT_SEGMENT_LEN};
use crate::constants::{density_count, singular_series};
use crate::correlation::{
    correlate_circular, correlate_ktuple, correlate_linear, embed, harmonic_average,
    pointwise_products, uniform_average, uniform_average_with_zero, TupleSpec,
};
use crate::numeric::least_squares;
use crate::spectral::{parseval_energy_exact, quadrature_energy, sup_twisted_sum, Convention};
use crate::{Error, Result};

pub use fit::{fit_decay, DecayFit};
pub use report::{
    AverageRecord, ConstantsRecord, DecayRecord, FitRecord, KtupleRecord, ParsevalRecord,
    PointTiming, Records, SupRecord,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Default memory budget: 2 GiB.
pub const DEFAULT_BUDGET_BYTES: u64 = 2 << 30;

/// Largest `x` for which the Parseval suite also runs trapezoid quadrature.
pub const QUADRATURE_LIMIT: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ExperimentKind {
    DecayFit,
    AverageSweep,
    SupTwisted,
    KtupleSweep,
    ParsevalSuite,
    ConstantsSuite,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

fn default_function() -> ArithFn {
    ArithFn::Mobius
}
fn default_q() -> u64 {
    1
}
fn default_q_bound() -> u64 {
    50
}
fn default_samples() -> usize {
    200
}
fn default_prime_bound() -> u64 {
    100_000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub x_grid: Vec<u64>,
    #[serde(default)]
    pub shifts: Vec<u64>,
    #[serde(default)]
    pub tuples: Vec<Vec<u64>>,
    #[serde(default = "default_q")]
    pub q: u64,
    #[serde(default = "default_function")]
    pub function: ArithFn,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_q_bound")]
    pub q_bound: u64,
    #[serde(default = "default_samples")]
    pub random_samples: usize,
    #[serde(default = "default_prime_bound")]
    pub prime_bound: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: ReportFormat,
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind, x_grid: Vec<u64>) -> Self {
        Self {
            kind,
            x_grid,
            shifts: Vec::new(),
            tuples: Vec::new(),
            q: default_q(),
            function: default_function(),
            seed: 0,
            q_bound: default_q_bound(),
            random_samples: default_samples(),
            prime_bound: default_prime_bound(),
            output: None,
            format: ReportFormat::Csv,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    fn tuple_specs(&self) -> Result<Vec<TupleSpec>> {
        self.tuples
            .iter()
            .map(|t| TupleSpec::new(t.clone(), self.q))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.x_grid.is_empty() {
            return Err(Error::invalid("x_grid must not be empty"));
        }
        if self.x_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("x_grid must be strictly increasing"));
        }
        if self.x_grid[0] < 2 {
            return Err(Error::invalid("every x in x_grid must be at least 2"));
        }
        match self.kind {
            ExperimentKind::DecayFit => {
                if self.shifts.is_empty() {
                    return Err(Error::invalid("DECAY_FIT needs at least one shift"));
                }
                if self.x_grid.len() < 3 {
                    return Err(Error::invalid("DECAY_FIT needs at least 3 grid points"));
                }
            }
            ExperimentKind::ParsevalSuite if self.shifts.is_empty() => {
                return Err(Error::invalid("PARSEVAL_SUITE needs at least one shift"));
            }
            ExperimentKind::KtupleSweep | ExperimentKind::ConstantsSuite => {
                if self.tuples.is_empty() {
                    return Err(Error::invalid("this experiment needs at least one tuple"));
                }
                self.tuple_specs()?;
                if self.kind == ExperimentKind::ConstantsSuite && self.prime_bound < 2 {
                    return Err(Error::invalid("prime_bound must be at least 2"));
                }
            }
            ExperimentKind::SupTwisted if self.q_bound == 0 => {
                return Err(Error::invalid("q_bound must be at least 1"));
            }
            _ => {}
        }
        Ok(())
    }

    fn x_max(&self) -> u64 {
        *self.x_grid.last().unwrap()
    }

    fn max_shift(&self) -> u64 {
        self.shifts.iter().copied().max().unwrap_or(0)
    }

    fn tuple_reach(&self) -> Result<u64> {
        let mut reach = 1;
        for t in self.tuple_specs()? {
            reach = reach.max(t.reach(self.x_max())?);
        }
        Ok(reach)
    }

    /// Rough peak memory of [`run`] in bytes.
    pub fn estimate_bytes(&self) -> Result<u64> {
        let x = self.x_max();
        let sieve_work = DEFAULT_SEGMENT_LEN as u64 * 9 * rayon::current_num_threads() as u64;
        let body = match self.kind {
            ExperimentKind::DecayFit => x.saturating_add(self.max_shift()),
            ExperimentKind::AverageSweep => {
                // Table to 2x, the full linear series, and three complex FFT buffers.
                let fft = (2 * x).next_power_of_two();
                2 * x + 8 * x + 3 * 16 * fft
            }
            ExperimentKind::SupTwisted => x,
            ExperimentKind::KtupleSweep => self.tuple_reach()?,
            ExperimentKind::ParsevalSuite => {
                let n = x + self.max_shift();
                2 * n + 8 * n + if x <= QUADRATURE_LIMIT { 16 * 4 * x } else { 0 }
            }
            ExperimentKind::ConstantsSuite => {
                self.prime_bound + 8 * self.prime_bound / 2 + self.tuple_reach()?
            }
        };
        Ok(body.saturating_add(sieve_work))
    }
}

/// Execution options that do not change the report contents.
#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    /// Worker threads; 0 uses the current rayon pool.
    pub threads: usize,
    pub budget_bytes: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            threads: 0,
            budget_bytes: DEFAULT_BUDGET_BYTES,
        }
    }
}

/// Summation and transform conventions behind every number in a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Conventions {
    pub summation: &'static str,
    pub shift_average: &'static str,
    pub dft_sign: Convention,
    pub tables: Vec<TableRange>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRange {
    pub function: ArithFn,
    pub start: u64,
    pub end: u64,
}

impl From<&ArithmeticTable> for TableRange {
    fn from(t: &ArithmeticTable) -> Self {
        Self {
            function: t.function(),
            start: t.start(),
            end: t.end(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub spec: ExperimentSpec,
    pub conventions: Conventions,
    pub records: Records,
    pub fits: Vec<FitRecord>,
    #[serde(skip)]
    pub timings: Vec<PointTiming>,
}

/// Runs `spec`, refusing when the memory estimate exceeds the budget.
pub fn run(spec: &ExperimentSpec, opts: &RunOptions) -> Result<ExperimentReport> {
    spec.validate()?;
    let estimate_bytes = spec.estimate_bytes()?;
    if estimate_bytes > opts.budget_bytes {
        return Err(Error::Budget {
            estimate_bytes,
            budget_bytes: opts.budget_bytes,
        });
    }
    if opts.threads == 0 {
        run_inner(spec)
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| Error::Internal(format!("thread pool: {e}")))?
            .install(|| run_inner(spec))
    }
}

fn run_inner(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let (records, fits, tables, timings) = match spec.kind {
        ExperimentKind::DecayFit => decay_fit(spec)?,
        ExperimentKind::AverageSweep => average_sweep(spec)?,
        ExperimentKind::SupTwisted => sup_twisted(spec)?,
        ExperimentKind::KtupleSweep => ktuple_sweep(spec)?,
        ExperimentKind::ParsevalSuite => parseval_suite(spec)?,
        ExperimentKind::ConstantsSuite => constants_suite(spec)?,
    };
    Ok(ExperimentReport {
        schema_version: SCHEMA_VERSION,
        spec: spec.clone(),
        conventions: Conventions {
            summation: "STRICT: 1 <= n < x",
            shift_average: "1 <= t < x (with-zero variant labelled separately)",
            dft_sign: Convention::ForwardPositive,
            tables,
        },
        records,
        fits,
        timings,
    })
}

type Outcome = (Records, Vec<FitRecord>, Vec<TableRange>, Vec<PointTiming>);

fn timed<T>(label: String, f: impl FnOnce() -> Result<T>) -> Result<(T, PointTiming)> {
    let start = Instant::now();
    let value = f()?;
    Ok((
        value,
        PointTiming {
            label,
            seconds: start.elapsed().as_secs_f64(),
        },
    ))
}

fn split<T>(items: Vec<(T, PointTiming)>) -> (Vec<T>, Vec<PointTiming>) {
    items.into_iter().unzip()
}

fn literature_form(x: f64) -> f64 {
    x * x.ln().ln() / x.ln()
}

fn sqrt_loglog_form(x: f64) -> f64 {
    x / x.ln().ln().sqrt()
}

fn fit_record(label: String, points: &[(f64, f64)]) -> Result<FitRecord> {
    let fit = fit_decay(points)?;
    Ok(FitRecord {
        label,
        log_c: fit.log_c,
        c: fit.c,
        max_residual: fit.max_residual,
        points_used: fit.points_used,
        zeros_excluded: fit.zeros_excluded,
        window_max_slope: None,
    })
}

fn decay_fit(spec: &ExperimentSpec) -> Result<Outcome> {
    let x_max = spec.x_max();
    let table = sieve(spec.function, 1, x_max + spec.max_shift())?;
    let grid = &spec.x_grid;

    let per_shift: Vec<(Vec<DecayRecord>, PointTiming)> = spec
        .shifts
        .par_iter()
        .map(|&t| {
            timed(format!("t={t}"), || {
                // One pass over n accumulates R(y, t) for every y <= x_max.
                let v = table.values();
                let mut rows = Vec::with_capacity(grid.len());
                let mut acc = 0i64;
                let mut gi = 0;
                let mut window_max = 0.0f64;
                for y in 1..=x_max {
                    // Here acc = R(y, t) = Σ_{n<y} f(n) f(n+t).
                    if gi > 0 || y == grid[0] {
                        window_max = window_max.max(acc.unsigned_abs() as f64 / y as f64);
                    }
                    if y == grid[gi] {
                        let xf = y as f64;
                        rows.push(DecayRecord {
                            function: spec.function,
                            t,
                            x: y,
                            r: acc,
                            r_over_x: acc as f64 / xf,
                            window_lo: if gi == 0 { y } else { grid[gi - 1] },
                            window_max_abs_r_over_x: window_max,
                            fitted_form: 0.0,
                            literature_form: literature_form(xf),
                            sqrt_loglog_form: sqrt_loglog_form(xf),
                        });
                        // The next window starts at this grid point.
                        window_max = acc.unsigned_abs() as f64 / xf;
                        gi += 1;
                        if gi == grid.len() {
                            break;
                        }
                    }
                    let n = y as usize;
                    acc += (v[n - 1] * v[n - 1 + t as usize]) as i64;
                }
                Ok(rows)
            })
        })
        .collect::<Result<_>>()?;
    let (mut blocks, timings) = split(per_shift);

    let mut fits = Vec::new();
    for (rows, &t) in blocks.iter_mut().zip(&spec.shifts) {
        let points: Vec<(f64, f64)> = rows
            .iter()
            .map(|r| (r.x as f64, r.r.unsigned_abs() as f64))
            .collect();
        let mut fit = fit_record(format!("t={t}"), &points)?;
        let decay = fit_decay(&points)?;
        for r in rows.iter_mut() {
            r.fitted_form = decay.predict(r.x as f64);
        }
        fit.window_max_slope = window_slope(rows);
        fits.push(fit);
    }
    let records = Records::DecayFit(blocks.into_iter().flatten().collect());
    Ok((records, fits, vec![(&table).into()], timings))
}

/// Least-squares slope of `log(window max)` against `log x` over the
/// windows after the first grid point.
pub(crate) fn window_slope(rows: &[DecayRecord]) -> Option<f64> {
    let usable: Vec<&DecayRecord> = rows
        .iter()
        .skip(1)
        .filter(|r| r.window_max_abs_r_over_x > 0.0)
        .collect();
    if usable.len() < 2 {
        return None;
    }
    let z: Vec<f64> = usable.iter().map(|r| (r.x as f64).ln()).collect();
    let y: Vec<f64> = usable
        .iter()
        .map(|r| r.window_max_abs_r_over_x.ln())
        .collect();
    least_squares(&z, &y).map(|(_, slope, _)| slope)
}

fn average_sweep(spec: &ExperimentSpec) -> Result<Outcome> {
    let x_max = spec.x_max();
    let table = sieve(spec.function, 1, 2 * x_max)?;
    let per_x: Vec<(Vec<AverageRecord>, PointTiming)> = spec
        .x_grid
        .par_iter()
        .map(|&x| {
            timed(format!("x={x}"), || {
                let xf = x as f64;
                let linear = correlate_linear(&table, &table, x, x - 1)?;
                let f = embed(&table, x as usize)?;
                let circular = correlate_circular(&f, &f)?;
                let m: i64 = f.iter().sum();
                let q: i64 = f.iter().map(|v| v * v).sum();
                let mut rows = Vec::with_capacity(2);
                for (series, residual) in [
                    (&linear, None),
                    (
                        &circular,
                        Some(((m as i128 * m as i128 - q as i128) as f64) / xf),
                    ),
                ] {
                    let uniform = uniform_average(series)?;
                    rows.push(AverageRecord {
                        function: spec.function,
                        x,
                        mode: series.mode.as_str(),
                        uniform_average: uniform,
                        uniform_average_with_zero: uniform_average_with_zero(series)?,
                        harmonic_average: harmonic_average(series)?,
                        uniform_over_x: uniform / xf,
                        identity_residual: residual.map(|expected| uniform - expected),
                        literature_form: literature_form(xf),
                    });
                }
                Ok(rows)
            })
        })
        .collect::<Result<_>>()?;
    let (blocks, timings) = split(per_x);
    let records = Records::AverageSweep(blocks.into_iter().flatten().collect());
    Ok((records, Vec::new(), vec![(&table).into()], timings))
}

fn sup_twisted(spec: &ExperimentSpec) -> Result<Outcome> {
    let table = sieve(spec.function, 1, spec.x_max())?;
    let per_x: Vec<(SupRecord, PointTiming)> = spec
        .x_grid
        .iter()
        .map(|&x| {
            timed(format!("x={x}"), || {
                let s = sup_twisted_sum(&table, x, spec.q_bound, spec.random_samples, spec.seed)?;
                let threshold = x as f64 / (x as f64).ln();
                let (num, den) = s.argmax_fraction.unwrap_or((0, 0));
                Ok(SupRecord {
                    function: spec.function,
                    x,
                    q_bound: s.q_bound,
                    random_samples: s.random_samples,
                    seed: s.seed,
                    evaluated: s.evaluated,
                    sup: s.sup,
                    argmax_alpha: s.argmax_alpha,
                    argmax_num: num,
                    argmax_den: den,
                    ratio_c1: s.ratio_c1,
                    ratio_c2: s.ratio_c2,
                    threshold,
                    sup_over_threshold: s.sup / threshold,
                })
            })
        })
        .collect::<Result<_>>()?;
    let (rows, timings) = split(per_x);
    Ok((
        Records::SupTwisted(rows),
        Vec::new(),
        vec![(&table).into()],
        timings,
    ))
}

fn ktuple_sweep(spec: &ExperimentSpec) -> Result<Outcome> {
    let tuples = spec.tuple_specs()?;
    let table = sieve(spec.function, 1, spec.tuple_reach()? - 1)?;
    let jobs: Vec<(&TupleSpec, u64)> = tuples
        .iter()
        .flat_map(|t| spec.x_grid.iter().map(move |&x| (t, x)))
        .collect();
    let done: Vec<(KtupleRecord, PointTiming)> = jobs
        .par_iter()
        .map(|&(tuple, x)| {
            timed(format!("tuple={} x={x}", tuple.label()), || {
                let value = correlate_ktuple(&table, tuple, x)?;
                Ok(KtupleRecord {
                    function: spec.function,
                    offsets: tuple.label(),
                    q: tuple.q(),
                    x,
                    value,
                    value_over_x: value as f64 / x as f64,
                })
            })
        })
        .collect::<Result<_>>()?;
    let (rows, timings) = split(done);

    let mut fits = Vec::new();
    if spec.x_grid.len() >= 3 {
        for tuple in &tuples {
            let label = tuple.label();
            let points: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.offsets == label)
                .map(|r| (r.x as f64, r.value.unsigned_abs() as f64))
                .collect();
            fits.push(fit_record(format!("tuple={label}"), &points)?);
        }
    }
    Ok((
        Records::KtupleSweep(rows),
        fits,
        vec![(&table).into()],
        timings,
    ))
}

fn parseval_suite(spec: &ExperimentSpec) -> Result<Outcome> {
    let reach = spec.x_max() + spec.max_shift();
    let table = sieve(spec.function, 1, reach)?;
    let squares = sieve(ArithFn::MobiusSquared, 1, reach)?;
    let jobs: Vec<(u64, u64)> = spec
        .x_grid
        .iter()
        .flat_map(|&x| spec.shifts.iter().map(move |&t| (x, t)))
        .collect();
    let done: Vec<(ParsevalRecord, PointTiming)> = jobs
        .par_iter()
        .map(|&(x, t)| {
            timed(format!("x={x} t={t}"), || {
                let weights = pointwise_products(&table, &table, t, x)?;
                let energy = parseval_energy_exact(&weights);
                // λ² = 1, so the λ energy is the number of terms; μ and μ²
                // energies are the squarefree pair count.
                let expected = match spec.function {
                    ArithFn::Liouville => (x - 1) as u128,
                    _ => correlate_linear(&squares, &squares, x, t)?.values[t as usize] as u128,
                };
                let quadrature = if x <= QUADRATURE_LIMIT {
                    let w: Vec<f64> = weights.iter().map(|&v| v as f64).collect();
                    Some(quadrature_energy(&w, 4 * x as usize)?)
                } else {
                    None
                };
                Ok(ParsevalRecord {
                    function: spec.function,
                    x,
                    t,
                    energy: energy as u64,
                    expected: expected as u64,
                    exact_match: energy == expected,
                    quadrature,
                    quadrature_rel_gap: quadrature
                        .map(|q| (q - energy as f64).abs() / (energy as f64).max(1.0)),
                })
            })
        })
        .collect::<Result<_>>()?;
    let (rows, timings) = split(done);
    Ok((
        Records::ParsevalSuite(rows),
        Vec::new(),
        vec![(&table).into(), (&squares).into()],
        timings,
    ))
}

fn constants_suite(spec: &ExperimentSpec) -> Result<Outcome> {
    let tuples = spec.tuple_specs()?;
    let squares = sieve(ArithFn::MobiusSquared, 1, spec.tuple_reach()? - 1)?;
    let mut rows = Vec::new();
    let mut timings = Vec::new();
    for tuple in &tuples {
        let (product, timing) = timed(format!("tuple={} product", tuple.label()), || {
            singular_series(tuple, spec.prime_bound)
        })?;
        timings.push(timing);
        for &x in &spec.x_grid {
            let (count, timing) = timed(format!("tuple={} x={x}", tuple.label()), || {
                density_count(&squares, tuple, x)
            })?;
            timings.push(timing);
            let density = count as f64 / x as f64;
            rows.push(ConstantsRecord {
                offsets: tuple.label(),
                q: tuple.q(),
                prime_bound: product.prime_bound,
                value: product.value,
                tail_bound: product.tail_bound,
                obstruction: product.obstruction,
                x,
                oracle_density: density,
                relative_gap: if product.value > 0.0 {
                    Some((density - product.value).abs() / product.value)
                } else {
                    None
                },
            });
        }
    }
    Ok((
        Records::ConstantsSuite(rows),
        Vec::new(),
        vec![(&squares).into()],
        timings,
    ))
}
