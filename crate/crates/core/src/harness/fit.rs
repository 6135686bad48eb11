use serde::Serialize;

use crate::numeric::least_squares;
use crate::{Error, Result};

/// Least-squares fit of `log(|R|/x) = log C − c·log log x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    pub log_c: f64,
    pub c: f64,
    pub max_residual: f64,
    pub points_used: usize,
    /// Points with `|R| = 0`, left out of the fit.
    pub zeros_excluded: usize,
}

impl DecayFit {
    /// The fitted curve `C·x/(log x)^c`.
    pub fn predict(&self, x: f64) -> f64 {
        self.log_c.exp() * x / x.ln().powf(self.c)
    }
}

/// Fits `(x, |R|)` pairs. Zero magnitudes are excluded and counted; at least
/// three usable points with `x > 1` and distinct `log log x` are required.
pub fn fit_decay(points: &[(f64, f64)]) -> Result<DecayFit> {
    if let Some(&(x, r)) = points
        .iter()
        .find(|(x, r)| x.is_nan() || *x <= 1.0 || r.is_nan() || *r < 0.0)
    {
        return Err(Error::invalid(format!(
            "fit points need x > 1 and |R| >= 0, got ({x}, {r})"
        )));
    }
    let zeros_excluded = points.iter().filter(|(_, r)| *r == 0.0).count();
    let (z, y): (Vec<f64>, Vec<f64>) = points
        .iter()
        .filter(|(_, r)| *r > 0.0)
        .map(|&(x, r)| (-x.ln().ln(), (r / x).ln()))
        .unzip();
    if z.len() < 3 {
        return Err(Error::invalid(format!(
            "decay fit needs at least 3 nonzero points, got {} ({} zero)",
            z.len(),
            zeros_excluded
        )));
    }
    let (log_c, c, max_residual) = least_squares(&z, &y)
        .ok_or_else(|| Error::invalid("decay fit needs at least two distinct x values"))?;
    Ok(DecayFit {
        log_c,
        c,
        max_residual,
        points_used: z.len(),
        zeros_excluded,
    })
}
