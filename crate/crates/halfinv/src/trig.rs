//! Trigonometric building blocks.
//!
//! Two families live here:
//!
//! * the oscillator basis `C(lambda, x) = cos(sqrt(lambda) x)` and
//!   `S(lambda, x) = sin(sqrt(lambda) x) / sqrt(lambda)`, evaluated as entire
//!   functions of `lambda` (negative arguments switch to the hyperbolic
//!   branch, small arguments to series), together with their
//!   lambda-derivatives;
//! * finite sine/cosine series on `(0, pi)` with closed-form inner products,
//!   which the moment solver and the kernel extraction routines share.

use std::f64::consts::PI;

use crate::error::Result;
use crate::grid::{GridFunction, SEGMENTS_PER_PI};

/// cos(sqrt(lambda) x), continued to cosh for lambda < 0.
pub fn osc_cos(lambda: f64, x: f64) -> f64 {
    if lambda >= 0.0 {
        (lambda.sqrt() * x).cos()
    } else {
        ((-lambda).sqrt() * x).cosh()
    }
}

/// sin(sqrt(lambda) x) / sqrt(lambda), continued through lambda = 0.
pub fn osc_sin(lambda: f64, x: f64) -> f64 {
    let z = lambda * x * x;
    if z.abs() < 1e-8 {
        // x (1 - z/6 + z^2/120 - z^3/5040)
        return x * (1.0 - z / 6.0 + z * z / 120.0 - z * z * z / 5040.0);
    }
    if lambda > 0.0 {
        let r = lambda.sqrt();
        (r * x).sin() / r
    } else {
        let r = (-lambda).sqrt();
        (r * x).sinh() / r
    }
}

/// d/dlambda of `osc_cos`.
pub fn osc_cos_dlambda(lambda: f64, x: f64) -> f64 {
    -0.5 * x * osc_sin(lambda, x)
}

/// d/dlambda of `osc_sin`.
pub fn osc_sin_dlambda(lambda: f64, x: f64) -> f64 {
    let z = lambda * x * x;
    if z.abs() < 1e-4 {
        // x^3 (-1/6 + z/60 - z^2/1680 + z^3/75600)
        return x * x * x * (-1.0 / 6.0 + z / 60.0 - z * z / 1680.0 + z * z * z / 75_600.0);
    }
    (x * osc_cos(lambda, x) - osc_sin(lambda, x)) / (2.0 * lambda)
}

/// sin(pi x) / (2 x) with its limit pi/2 at x = 0.
fn half_sinc(x: f64) -> f64 {
    let u = PI * x;
    if u.abs() < 1e-6 {
        return 0.5 * PI * (1.0 - u * u / 6.0 + u * u * u * u / 120.0);
    }
    u.sin() / (2.0 * x)
}

/// Which trigonometric family a series or moment system uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrigKind {
    Sine,
    Cosine,
}

impl TrigKind {
    pub fn eval(self, frequency: f64, t: f64) -> f64 {
        match self {
            TrigKind::Sine => (frequency * t).sin(),
            TrigKind::Cosine => (frequency * t).cos(),
        }
    }
}

/// Closed-form inner product of two same-kind atoms on `(0, pi)`:
/// `int_0^pi trig(a t) trig(b t) dt`.
pub fn trig_inner(kind: TrigKind, a: f64, b: f64) -> f64 {
    match kind {
        TrigKind::Cosine => half_sinc(a - b) + half_sinc(a + b),
        TrigKind::Sine => half_sinc(a - b) - half_sinc(a + b),
    }
}

/// A finite trigonometric series `sum_n c_n trig(freq_n t)` on `(0, pi)`.
#[derive(Debug, Clone)]
pub struct TrigSeries {
    pub kind: TrigKind,
    pub frequencies: Vec<f64>,
    pub coefficients: Vec<f64>,
}

impl TrigSeries {
    pub fn new(kind: TrigKind, frequencies: Vec<f64>, coefficients: Vec<f64>) -> Self {
        assert_eq!(frequencies.len(), coefficients.len());
        TrigSeries { kind, frequencies, coefficients }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.frequencies
            .iter()
            .zip(&self.coefficients)
            .map(|(&f, &c)| c * self.kind.eval(f, t))
            .sum()
    }

    /// Exact L2(0, pi) norm via the closed-form Gram of the atoms.
    pub fn norm_l2(&self) -> f64 {
        self.inner(self).max(0.0).sqrt()
    }

    /// Exact L2(0, pi) inner product with another series of the same kind.
    pub fn inner(&self, other: &TrigSeries) -> f64 {
        assert_eq!(self.kind, other.kind, "mixed-kind inner product");
        let mut acc = 0.0;
        for (&fa, &ca) in self.frequencies.iter().zip(&self.coefficients) {
            for (&fb, &cb) in other.frequencies.iter().zip(&other.coefficients) {
                acc += ca * cb * trig_inner(self.kind, fa, fb);
            }
        }
        acc
    }

    /// Exact L2 distance to another series of the same kind.
    pub fn l2_distance(&self, other: &TrigSeries) -> f64 {
        (self.inner(self) - 2.0 * self.inner(other) + other.inner(other))
            .max(0.0)
            .sqrt()
    }
}

/// An L2(0, pi) kernel: a trigonometric series together with its sampled
/// grid representation.
///
/// Evaluation and integrals go through the series (no spline error); the
/// grid is the interoperable sampled view.
#[derive(Debug, Clone)]
pub struct KernelFunction {
    series: TrigSeries,
    grid: GridFunction,
}

impl KernelFunction {
    pub fn from_series(series: TrigSeries) -> Result<Self> {
        let grid = GridFunction::from_fn(0.0, PI, SEGMENTS_PER_PI + 1, |t| series.eval(t))?;
        Ok(KernelFunction { series, grid })
    }

    pub fn from_series_with_grid(series: TrigSeries, n_samples: usize) -> Result<Self> {
        let grid = GridFunction::from_fn(0.0, PI, n_samples, |t| series.eval(t))?;
        Ok(KernelFunction { series, grid })
    }

    pub fn zero() -> Self {
        Self::from_series(TrigSeries::new(TrigKind::Cosine, vec![], vec![]))
            .expect("zero kernel is valid")
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.series.eval(t)
    }

    pub fn series(&self) -> &TrigSeries {
        &self.series
    }

    pub fn as_grid(&self) -> &GridFunction {
        &self.grid
    }

    pub fn norm_l2(&self) -> f64 {
        self.series.norm_l2()
    }

    pub fn l2_distance(&self, other: &KernelFunction) -> f64 {
        self.series.l2_distance(&other.series)
    }
}
