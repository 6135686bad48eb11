//! Exact shift-correlation machinery for the Möbius function μ and the
//! Liouville function λ.
//!
//! The crate is split the same way the computations are layered:
//!
//! - [`arith`] sieves exact tables of μ, λ and μ² and persists them in the
//!   `MLTB` binary format.
//! - [`spectral`] holds the N-point DFT (forward kernel `e^{+2πisn/N}`),
//!   twisted exponential sums and Parseval energies.
//! - [`correlation`] computes linear, circular, k-tuple and mixed
//!   correlations in exact integer arithmetic, together with the spectral
//!   identities that tie them to the DFT.
//! - [`constants`] evaluates truncated Euler products for squarefree k-tuple
//!   densities and the counting oracles that check them.
//! - [`harness`] runs reproducible sweeps and fits empirical decay exponents.
//! - [`verify`] is the self-contained invariant suite behind `shiftcorr verify`.
//!
//! All partial sums use the strict bound `n < x`, and tables never contain
//! `n = 0`.

pub mod arith;
pub mod constants;
pub mod correlation;
mod error;
pub mod harness;
mod numeric;
pub mod spectral;
pub mod verify;

pub use arith::{ArithFn, ArithmeticTable, PartialSumSeries};
pub use constants::{EulerProductResult, OmegaReading};
pub use correlation::{CorrelationSeries, Mode, TupleSpec};
pub use error::{Error, Result};
pub use harness::{ExperimentKind, ExperimentReport, ExperimentSpec, ReportFormat, RunOptions};
pub use spectral::{Convention, Spectrum, TwistedSumValue};
