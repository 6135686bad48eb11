//! Small numeric helpers shared across modules.

use rustfft::num_complex::Complex64;

/// Neumaier's variant of Kahan summation. The result only depends on the
/// order in which terms are added.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, term: f64) {
        let t = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.carry += (self.sum - t) + term;
        } else {
            self.carry += (term - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::default();
        for t in iter {
            acc.add(t);
        }
        acc
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct CompensatedComplex {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl CompensatedComplex {
    pub(crate) fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub(crate) fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// `e^{2πi·num/den}` with the angle reduced exactly in integers first.
pub(crate) fn unit_root(num: u64, den: u64) -> Complex64 {
    let r = num % den;
    let angle = std::f64::consts::TAU * (r as f64 / den as f64);
    Complex64::new(angle.cos(), angle.sin())
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Ordinary least squares `y = intercept + slope·z`, returning
/// `(intercept, slope, max |residual|)`. `None` when all `z` coincide.
pub(crate) fn least_squares(z: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let n = z.len() as f64;
    let zm = z.iter().copied().collect::<CompensatedSum>().value() / n;
    let ym = y.iter().copied().collect::<CompensatedSum>().value() / n;
    let mut szz = CompensatedSum::default();
    let mut szy = CompensatedSum::default();
    for (&zi, &yi) in z.iter().zip(y) {
        szz.add((zi - zm) * (zi - zm));
        szy.add((zi - zm) * (yi - ym));
    }
    if szz.value() <= 0.0 {
        return None;
    }
    let slope = szy.value() / szz.value();
    let intercept = ym - slope * zm;
    let max_residual = z
        .iter()
        .zip(y)
        .map(|(&zi, &yi)| (yi - intercept - slope * zi).abs())
        .fold(0.0, f64::max);
    Some((intercept, slope, max_residual))
}
