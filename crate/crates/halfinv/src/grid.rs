//! Sampled real-valued functions on an interval.
//!
//! [`GridFunction`] is the carrier type for potentials and kernels: uniform
//! samples on `[a, b]` with a natural cubic spline between the nodes. The
//! spline passes through every sample, so evaluation at a grid node
//! reproduces the stored value bit for bit.

use crate::error::{Result, SolverError};

/// Default number of spline segments per interval of length pi.
pub const SEGMENTS_PER_PI: usize = 1024;

/// Minimum number of samples a grid may carry.
pub const MIN_SAMPLES: usize = 8;

/// Gauss-Legendre 4-point nodes on [-1, 1].
const GL4_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
/// Gauss-Legendre 4-point weights on [-1, 1].
const GL4_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_86,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_86,
];

/// Composite 4-point Gauss-Legendre quadrature of `f` over `[a, b]`.
///
/// Exact for piecewise polynomials of degree <= 7 on the segment grid, which
/// covers products of the cubic splines used throughout.
pub fn gauss4_integrate<F: Fn(f64) -> f64>(a: f64, b: f64, segments: usize, f: F) -> f64 {
    let n = segments.max(1);
    let h = (b - a) / n as f64;
    let mut total = 0.0;
    for i in 0..n {
        let left = a + i as f64 * h;
        let mid = left + 0.5 * h;
        let mut seg = 0.0;
        for (node, w) in GL4_NODES.iter().zip(GL4_WEIGHTS.iter()) {
            seg += w * f(mid + 0.5 * h * node);
        }
        total += seg * 0.5 * h;
    }
    total
}

/// A real function on `[a, b]` given by uniform samples and a natural cubic
/// spline interpolant.
#[derive(Debug, Clone)]
pub struct GridFunction {
    a: f64,
    b: f64,
    samples: Vec<f64>,
    /// Second derivatives of the natural spline at the nodes.
    second: Vec<f64>,
}

impl GridFunction {
    pub fn new(a: f64, b: f64, samples: Vec<f64>) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(SolverError::InvalidGrid(format!(
                "endpoints must be finite with b > a, got [{a}, {b}]"
            )));
        }
        if samples.len() < MIN_SAMPLES {
            return Err(SolverError::GridTooCoarse {
                required: MIN_SAMPLES,
                got: samples.len(),
            });
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::InvalidGrid("non-finite sample".into()));
        }
        let second = natural_spline_second_derivatives(&samples, (b - a) / (samples.len() - 1) as f64);
        Ok(GridFunction { a, b, samples, second })
    }

    /// Sample `f` at `n_samples` uniform nodes on `[a, b]`.
    pub fn from_fn<F: Fn(f64) -> f64>(a: f64, b: f64, n_samples: usize, f: F) -> Result<Self> {
        let n = n_samples.max(MIN_SAMPLES);
        let h = (b - a) / (n - 1) as f64;
        let samples = (0..n).map(|i| f(a + i as f64 * h)).collect();
        Self::new(a, b, samples)
    }

    pub fn constant(a: f64, b: f64, value: f64, n_samples: usize) -> Result<Self> {
        Self::new(a, b, vec![value; n_samples.max(MIN_SAMPLES)])
    }

    pub fn zero(a: f64, b: f64, n_samples: usize) -> Result<Self> {
        Self::constant(a, b, 0.0, n_samples)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn spacing(&self) -> f64 {
        (self.b - self.a) / (self.samples.len() - 1) as f64
    }

    /// Number of spline segments.
    pub fn segments(&self) -> usize {
        self.samples.len() - 1
    }

    /// Evaluate the spline at `x`. Points outside `[a, b]` are clamped.
    ///
    /// At a grid node the stored sample is returned exactly.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.samples.len();
        let h = self.spacing();
        if x <= self.a {
            return self.samples[0];
        }
        if x >= self.b {
            return self.samples[n - 1];
        }
        // Exact node hit: reproduce the sample bit for bit.
        let k = ((x - self.a) / h).round() as usize;
        if k < n && self.a + k as f64 * h == x {
            return self.samples[k];
        }
        let mut i = ((x - self.a) / h) as usize;
        if i >= n - 1 {
            i = n - 2;
        }
        let x_i = self.a + i as f64 * h;
        let t = x - x_i;
        let u = h - t;
        // Standard natural-spline segment form.
        let (ya, yb) = (self.samples[i], self.samples[i + 1]);
        let (ma, mb) = (self.second[i], self.second[i + 1]);
        (ma * u * u * u + mb * t * t * t) / (6.0 * h)
            + (ya / h - ma * h / 6.0) * u
            + (yb / h - mb * h / 6.0) * t
    }

    /// Pointwise map of the samples (re-splined).
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> GridFunction {
        let samples: Vec<f64> = self.samples.iter().map(|&v| f(v)).collect();
        let second = natural_spline_second_derivatives(&samples, self.spacing());
        GridFunction { a: self.a, b: self.b, samples, second }
    }

    /// Restriction to `[a2, b2]`.
    ///
    /// When the new endpoints land on grid nodes the samples are reused
    /// verbatim; otherwise the spline is resampled at the same density.
    pub fn restrict(&self, a2: f64, b2: f64) -> Result<GridFunction> {
        if a2 < self.a - 1e-12 || b2 > self.b + 1e-12 || b2 <= a2 {
            return Err(SolverError::InvalidGrid(format!(
                "restriction [{a2}, {b2}] outside [{}, {}]",
                self.a, self.b
            )));
        }
        let h = self.spacing();
        let i0 = (a2 - self.a) / h;
        let i1 = (b2 - self.a) / h;
        let (r0, r1) = (i0.round(), i1.round());
        let aligned = (i0 - r0).abs() < 1e-9 && (i1 - r1).abs() < 1e-9;
        if aligned {
            let (j0, j1) = (r0 as usize, r1 as usize);
            if j1 - j0 + 1 >= MIN_SAMPLES {
                return GridFunction::new(
                    self.a + j0 as f64 * h,
                    self.a + j1 as f64 * h,
                    self.samples[j0..=j1].to_vec(),
                );
            }
        }
        let n = (((b2 - a2) / h).ceil() as usize + 1).max(MIN_SAMPLES);
        GridFunction::from_fn(a2, b2, n, |x| self.eval(x))
    }

    /// Resample onto `n_samples` uniform nodes (same interval).
    pub fn resample(&self, n_samples: usize) -> GridFunction {
        GridFunction::from_fn(self.a, self.b, n_samples, |x| self.eval(x))
            .expect("resampling a valid grid cannot fail")
    }

    /// Integral of the spline over `[a, b]`.
    pub fn integral(&self) -> f64 {
        gauss4_integrate(self.a, self.b, self.segments(), |x| self.eval(x))
    }

    /// L2 norm of the spline over `[a, b]`.
    pub fn norm_l2(&self) -> f64 {
        gauss4_integrate(self.a, self.b, self.segments(), |x| {
            let v = self.eval(x);
            v * v
        })
        .max(0.0)
        .sqrt()
    }

    /// L2 distance to another function on the same interval.
    ///
    /// The quadrature runs on the finer of the two grids.
    pub fn l2_distance(&self, other: &GridFunction) -> f64 {
        let segments = self.segments().max(other.segments());
        let a = self.a.max(other.a);
        let b = self.b.min(other.b);
        gauss4_integrate(a, b, segments, |x| {
            let d = self.eval(x) - other.eval(x);
            d * d
        })
        .max(0.0)
        .sqrt()
    }
}

/// Second derivatives of the not-a-knot cubic spline through equally spaced
/// samples (tridiagonal Thomas solve).
///
/// Not-a-knot keeps fourth-order accuracy up to the endpoints, which the
/// natural boundary condition would degrade to second order.
fn natural_spline_second_derivatives(samples: &[f64], h: f64) -> Vec<f64> {
    let n = samples.len();
    let mut m = vec![0.0; n];
    if n < 4 {
        return m;
    }
    let r = |i: usize| 6.0 * (samples[i - 1] - 2.0 * samples[i] + samples[i + 1]) / (h * h);
    // Not-a-knot at both ends with uniform spacing decouples the first and
    // last interior unknowns: m[0] = 2 m[1] - m[2] turns the interior
    // equation at node 1 into 6 m[1] = r(1), and symmetrically at n - 2.
    m[1] = r(1) / 6.0;
    m[n - 2] = r(n - 2) / 6.0;
    let count = n - 4; // unknowns m[2..=n-3]
    if count > 0 {
        let mut diag = vec![4.0; count];
        let mut rhs = vec![0.0; count];
        for (k, item) in rhs.iter_mut().enumerate() {
            *item = r(k + 2);
        }
        rhs[0] -= m[1];
        rhs[count - 1] -= m[n - 2];
        for i in 1..count {
            let w = 1.0 / diag[i - 1];
            diag[i] -= w;
            rhs[i] -= w * rhs[i - 1];
        }
        m[count + 1] = rhs[count - 1] / diag[count - 1];
        for i in (1..count).rev() {
            m[i + 1] = (rhs[i - 1] - m[i + 2]) / diag[i - 1];
        }
    }
    m[0] = 2.0 * m[1] - m[2];
    m[n - 1] = 2.0 * m[n - 2] - m[n - 3];
    m
}
