use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use shiftcorr::arith::{load_table, save_table, sieve};
use shiftcorr::constants::singular_series;
use shiftcorr::correlation::{correlate_circular, correlate_ktuple, correlate_linear, embed};
use shiftcorr::harness::{self, DEFAULT_BUDGET_BYTES};
use shiftcorr::spectral::dft_forward;
use shiftcorr::{
    verify, ArithFn, ArithmeticTable, Error, ExperimentSpec, ReportFormat, RunOptions, TupleSpec,
};

const EXIT_USAGE: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

/// Exact shift correlations of the Möbius and Liouville functions.
#[derive(Parser, Debug)]
#[command(name = "shiftcorr", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Output file (standard output when omitted, except for `sieve`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format [default: csv].
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads, 0 for one per core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Seed for every random choice.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Memory budget in MiB.
    #[arg(long = "budget-mib", global = true)]
    budget_mib: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => ReportFormat::Csv,
            Format::Json => ReportFormat::Json,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sieve a table and write it as an MLTB file.
    Sieve {
        #[arg(long = "fn", value_parser = parse_fn)]
        function: ArithFn,
        #[arg(long, default_value_t = 1)]
        start: u64,
        #[arg(long)]
        len: u64,
    },
    /// Shift correlation R(t) = Σ_{n<x} f(n)g(n+t) for t = 0..=tmax.
    Correlate {
        #[arg(long = "fn", value_parser = parse_fn, default_value = "mobius")]
        function: ArithFn,
        /// Right-hand function (defaults to --fn).
        #[arg(long, value_parser = parse_fn)]
        gfn: Option<ArithFn>,
        #[arg(long)]
        x: u64,
        #[arg(long)]
        tmax: u64,
        /// Circular correlation with period x.
        #[arg(long)]
        circular: bool,
        /// Read f from an MLTB file instead of sieving.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Read g from an MLTB file instead of sieving.
        #[arg(long = "gin")]
        g_input: Option<PathBuf>,
    },
    /// k-point correlation Σ_{n<x} Π f(q·n + a_i).
    Ktuple {
        #[arg(long, value_delimiter = ',', required = true)]
        offsets: Vec<u64>,
        #[arg(long)]
        x: u64,
        #[arg(long = "fn", value_parser = parse_fn, default_value = "mobius")]
        function: ArithFn,
        #[arg(long, default_value_t = 1)]
        q: u64,
    },
    /// N-point DFT of f(0), …, f(N−1) read from an MLTB file (f(0) = 0).
    Spectrum {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Truncated Euler product for squarefree tuples.
    Constants {
        #[arg(long, value_delimiter = ',', required = true)]
        offsets: Vec<u64>,
        #[arg(long = "prime-bound", default_value_t = 100_000)]
        prime_bound: u64,
        /// Also count the tuple density for n < X.
        #[arg(long = "oracle-x")]
        oracle_x: Option<u64>,
        #[arg(long, default_value_t = 1)]
        q: u64,
    },
    /// Run an experiment sweep from a JSON config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the invariant suite.
    Verify,
}

fn parse_fn(s: &str) -> Result<ArithFn, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Lib(Error),
    Usage(String),
    Verify(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Lib(Error::from(e))
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.global.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.threads)
            .build_global()
        {
            eprintln!("error: cannot start {} threads: {e}", cli.global.threads);
            return ExitCode::from(EXIT_INTERNAL);
        }
    }
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Verify(failed)) => {
            eprintln!("error: {failed} invariant check(s) failed");
            ExitCode::from(EXIT_INTERNAL)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Budget { .. } => EXIT_BUDGET,
                Error::Internal(_) => EXIT_INTERNAL,
                _ => EXIT_USAGE,
            })
        }
    }
}

fn dispatch(cli: &Cli) -> CliResult {
    let g = &cli.global;
    let format = g.format.map(ReportFormat::from);
    let budget = match g.budget_mib {
        Some(mib) => mib.saturating_mul(1 << 20),
        None => DEFAULT_BUDGET_BYTES,
    };
    match &cli.command {
        Command::Sieve {
            function,
            start,
            len,
        } => {
            let out = g.out.as_deref().ok_or_else(|| {
                Failure::Usage("sieve needs --out PATH for the table file".into())
            })?;
            check_budget(*len, budget)?;
            let table = sieve(*function, *start, *len)?;
            save_table(out, &table)?;
            eprintln!(
                "wrote {function} on [{start}, {}) to {}",
                table.end(),
                out.display()
            );
            Ok(())
        }
        Command::Correlate {
            function,
            gfn,
            x,
            tmax,
            circular,
            input,
            g_input,
        } => {
            let gfn = gfn.unwrap_or(*function);
            let fmt = format.unwrap_or_default();
            let series = if *circular {
                if *tmax >= *x {
                    return Err(Failure::Usage(format!(
                        "circular shifts must satisfy tmax < x, got tmax = {tmax}, x = {x}"
                    )));
                }
                check_budget(x.saturating_mul(2 * 8 + 3 * 16), budget)?;
                let f = obtain(input.as_deref(), *function, *x)?;
                let gt = obtain(
                    g_input
                        .as_deref()
                        .or(input.as_deref().filter(|_| gfn == *function)),
                    gfn,
                    *x,
                )?;
                let mut s =
                    correlate_circular(&embed(&f, *x as usize)?, &embed(&gt, *x as usize)?)?;
                s.shifts.truncate(*tmax as usize + 1);
                s.values.truncate(*tmax as usize + 1);
                s.left_function = Some(f.function());
                s.right_function = Some(gt.function());
                s
            } else {
                let reach = x.checked_add(*tmax).ok_or_else(|| {
                    Failure::Usage(format!("x + tmax overflows for x = {x}, tmax = {tmax}"))
                })?;
                let fft = (2 * reach).next_power_of_two();
                check_budget(2 * reach + 8 * (tmax + 1) + 3 * 16 * fft, budget)?;
                let f = obtain(input.as_deref(), *function, *x)?;
                let gt = obtain(
                    g_input
                        .as_deref()
                        .or(input.as_deref().filter(|_| gfn == *function)),
                    gfn,
                    reach,
                )?;
                correlate_linear(&f, &gt, *x, *tmax)?
            };
            emit(g.out.as_deref(), |w| match fmt {
                ReportFormat::Csv => series.write_csv(w),
                ReportFormat::Json => series.write_json(w),
            })
        }
        Command::Ktuple {
            offsets,
            x,
            function,
            q,
        } => {
            let tuple = TupleSpec::new(offsets.clone(), *q)?;
            let reach = tuple.reach(*x)?;
            check_budget(reach, budget)?;
            let table = sieve(*function, 1, reach - 1)?;
            let value = correlate_ktuple(&table, &tuple, *x)?;
            let label = tuple.label();
            let body = match format.unwrap_or_default() {
                ReportFormat::Csv => format!(
                    "function,offsets,q,x,value,value_over_x\n{function},{label},{q},{x},{value},{}\n",
                    value as f64 / *x as f64
                ),
                ReportFormat::Json => {
                    let doc = serde_json::json!({
                        "schema_version": 1,
                        "function": function,
                        "offsets": offsets,
                        "q": q,
                        "x": x,
                        "value": value,
                        "value_over_x": value as f64 / *x as f64,
                    });
                    format!("{}\n", serde_json::to_string_pretty(&doc).map_err(Error::from)?)
                }
            };
            emit(g.out.as_deref(), |w| Ok(w.write_all(body.as_bytes())?))
        }
        Command::Spectrum { input, n } => {
            if *n == 0 {
                return Err(Failure::Usage("--n must be at least 1".into()));
            }
            check_budget((*n as u64).saturating_mul(48), budget)?;
            let table = load_table(input)?;
            let values: Vec<f64> = embed(&table, *n)?.iter().map(|&v| v as f64).collect();
            let spectrum = dft_forward(&values)?;
            match format.unwrap_or_default() {
                ReportFormat::Csv => emit(g.out.as_deref(), |w| spectrum.write_csv(w)),
                ReportFormat::Json => {
                    let doc = serde_json::json!({
                        "schema_version": 1,
                        "convention": spectrum.convention(),
                        "n": n,
                        "function": table.function(),
                        "re": spectrum.coefficients().iter().map(|c| c.re).collect::<Vec<_>>(),
                        "im": spectrum.coefficients().iter().map(|c| c.im).collect::<Vec<_>>(),
                    });
                    emit(g.out.as_deref(), |w| {
                        serde_json::to_writer_pretty(&mut *w, &doc)?;
                        Ok(w.write_all(b"\n")?)
                    })
                }
            }
        }
        Command::Constants {
            offsets,
            prime_bound,
            oracle_x,
            q,
        } => {
            let tuple = TupleSpec::new(offsets.clone(), *q)?;
            check_budget(prime_bound.saturating_mul(5), budget)?;
            if let Some(x) = oracle_x {
                check_budget(tuple.reach(*x)?, budget)?;
            }
            let mut result = singular_series(&tuple, *prime_bound)?;
            if let Some(x) = oracle_x {
                result = result.with_oracle(*x)?;
            }
            match format.unwrap_or_default() {
                ReportFormat::Json => emit(g.out.as_deref(), |w| {
                    result.write_json(&mut *w)?;
                    Ok(w.write_all(b"\n")?)
                }),
                ReportFormat::Csv => {
                    let opt = |v: Option<String>| v.unwrap_or_default();
                    let body = format!(
                        "offsets,q,prime_bound,value,tail_bound,obstruction,oracle_x,oracle_density\n{},{},{},{},{},{},{},{}\n",
                        tuple.label(),
                        result.q,
                        result.prime_bound,
                        result.value,
                        result.tail_bound,
                        opt(result.obstruction.map(|p| p.to_string())),
                        opt(result.oracle_x.map(|x| x.to_string())),
                        opt(result.oracle_density.map(|d| d.to_string())),
                    );
                    emit(g.out.as_deref(), |w| Ok(w.write_all(body.as_bytes())?))
                }
            }
        }
        Command::Sweep { config } => {
            let text = std::fs::read_to_string(config).map_err(|e| {
                Failure::Usage(format!("cannot read config {}: {e}", config.display()))
            })?;
            let mut spec = ExperimentSpec::from_json(&text)?;
            if let Some(seed) = g.seed {
                spec.seed = seed;
            }
            if let Some(f) = format {
                spec.format = f;
            }
            if let Some(out) = &g.out {
                spec.output = Some(out.clone());
            }
            eprintln!(
                "running {:?} over {} grid point(s)",
                spec.kind,
                spec.x_grid.len()
            );
            let report = harness::run(
                &spec,
                &RunOptions {
                    threads: 0,
                    budget_bytes: budget,
                },
            )?;
            match &spec.output {
                Some(path) => {
                    for p in report.write_files(path, spec.format)? {
                        eprintln!("wrote {}", p.display());
                    }
                }
                None => {
                    let body = report.to_bytes(spec.format)?;
                    emit(None, |w| Ok(w.write_all(&body)?))?;
                    for t in &report.timings {
                        eprintln!("{}: {:.3} s", t.label, t.seconds);
                    }
                }
            }
            Ok(())
        }
        Command::Verify => {
            let mut out = io::stdout().lock();
            let outcomes = verify::run_with(|o| {
                let status = if o.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(out, "{status} {}: {}", o.name, o.detail);
                let _ = out.flush();
                eprintln!("  {} took {:.2} s", o.name, o.seconds);
            });
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            println!("{} passed, {failed} failed", outcomes.len() - failed);
            if failed > 0 {
                Err(Failure::Verify(failed))
            } else {
                Ok(())
            }
        }
    }
}

fn check_budget(estimate_bytes: u64, budget_bytes: u64) -> CliResult {
    if estimate_bytes > budget_bytes {
        return Err(Error::Budget {
            estimate_bytes,
            budget_bytes,
        }
        .into());
    }
    Ok(())
}

/// A table of `function` covering `[1, end)`, read from `path` when given.
fn obtain(path: Option<&Path>, function: ArithFn, end: u64) -> Result<ArithmeticTable, Failure> {
    match path {
        Some(p) => {
            let table = load_table(p)?;
            table.require(1, end)?;
            Ok(table)
        }
        None => Ok(sieve(function, 1, end.max(2) - 1)?),
    }
}

fn emit(
    path: Option<&Path>,
    write: impl FnOnce(&mut dyn Write) -> shiftcorr::Result<()>,
) -> CliResult {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            write(&mut w)?;
            w.flush()?;
        }
        None => {
            let mut w = io::stdout().lock();
            write(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}
