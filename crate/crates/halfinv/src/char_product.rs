//! Rebuilding the characteristic function from its zeros.
//!
//! The characteristic function is recovered as a ratio against the free
//! problem: `Delta(lambda) = Delta_0(lambda) * prod_n (lambda_n - lambda) /
//! (lambda_n^0 - lambda)`, with `lambda_n^0 = ((n-1)/2)^2` the free zeros.
//! The supplied zeros cover the head of the product; the tail substitutes
//! the asymptotic zeros `(n-1)/2 + omega/(pi n)` up to a configurable
//! multiple of the data length, beyond which each factor is 1.
//!
//! The free factor whose reference zero lies nearest the evaluation point is
//! folded into the prefactor analytically, so evaluation stays stable
//! through every reference zero (in particular at the half-integer points
//! where the kernel moments are read off).

use std::f64::consts::PI;

use crate::error::Result;
use crate::grid::GridFunction;
use crate::sl_direct::{psi_boundary, SlSettings};
use crate::trig::{osc_sin, KernelFunction, TrigKind, TrigSeries};

/// Default ratio of modeled tail zeros to supplied zeros.
pub const DEFAULT_TAIL_FACTOR: usize = 8;

/// An even entire function of `rho` (a function of `lambda = rho^2`) given
/// by a finite zero set plus an asymptotic tail model.
#[derive(Debug, Clone)]
pub struct ZeroProductFunction {
    /// Supplied zeros, as `lambda_n = rho_n^2`, strictly increasing.
    zero_lambdas: Vec<f64>,
    /// Constant term of the zero asymptotics, used for the tail model.
    omega: f64,
    /// Tail extends through `tail_factor * len` reference indices.
    tail_factor: usize,
}

impl ZeroProductFunction {
    pub fn from_lambdas(zero_lambdas: Vec<f64>, omega: f64) -> Self {
        ZeroProductFunction { zero_lambdas, omega, tail_factor: DEFAULT_TAIL_FACTOR }
    }

    pub fn from_rhos(rhos: &[f64], omega: f64) -> Self {
        Self::from_lambdas(rhos.iter().map(|r| r * r).collect(), omega)
    }

    pub fn with_tail_factor(mut self, tail_factor: usize) -> Self {
        self.tail_factor = tail_factor.max(1);
        self
    }

    pub fn zero_lambdas(&self) -> &[f64] {
        &self.zero_lambdas
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// The zero used for product index `n` (1-based): supplied when
    /// available, modeled from the asymptotics otherwise.
    ///
    /// The model is the additive form `lambda_n^0 + omega/pi`, which agrees
    /// with squaring `(n-1)/2 + omega/(pi n)` to `O(n^-2)` and is exact for
    /// constant potentials, so a spectral shift does not degrade the tail.
    fn zero_at(&self, n: usize) -> f64 {
        if n <= self.zero_lambdas.len() {
            self.zero_lambdas[n - 1]
        } else {
            let rho0 = (n as f64 - 1.0) / 2.0;
            rho0 * rho0 + self.omega / PI
        }
    }
}

/// Free characteristic function `Delta_0(lambda) = -rho sin(2 rho pi)`,
/// continued through `lambda <= 0`.
pub fn delta_free(lambda: f64) -> f64 {
    -lambda * osc_sin(lambda, 2.0 * PI)
}

/// `Delta_0(lambda) / (lambda_k^0 - lambda)` evaluated stably, where
/// `lambda_k^0 = (m/2)^2` with `m = k - 1`.
fn deflated_free(m: usize, lambda: f64) -> f64 {
    if m == 0 {
        // Delta_0 / (0 - lambda) = sin(2 pi rho) / rho.
        return osc_sin(lambda, 2.0 * PI);
    }
    let half_m = m as f64 / 2.0;
    let rho = lambda.max(0.0).sqrt();
    let delta = rho - half_m;
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    // Delta_0 / ((m/2)^2 - lambda) = (-1)^m rho sin(2 pi d) / (d (rho + m/2)).
    sign * rho * osc_sin(delta * delta, 2.0 * PI) / (rho + half_m)
}

/// Evaluate the rebuilt characteristic function at `lambda = rho^2`.
///
/// Depends on `rho` only through `rho^2`, so the result is even in `rho` by
/// construction. Evaluation at a supplied zero returns 0 exactly.
pub fn delta_from_zeros(zpf: &ZeroProductFunction, lambda: f64) -> f64 {
    let n_data = zpf.zero_lambdas.len();
    let total = n_data * zpf.tail_factor.max(1);

    // Reference zero nearest to lambda, clamped to the product range; that
    // factor is folded into the free prefactor analytically.
    let rho = lambda.max(0.0).sqrt();
    let deflate = ((2.0 * rho).round() as usize + 1).clamp(1, total.max(1));

    let mut product = 1.0;
    for n in 1..=total {
        let zn = zpf.zero_at(n);
        if n == deflate {
            product *= zn - lambda;
        } else {
            let m = n - 1;
            let reference = (m as f64 / 2.0) * (m as f64 / 2.0);
            product *= (zn - lambda) / (reference - lambda);
        }
    }
    // First-order completion of the factors beyond the modeled range:
    // each omitted factor is 1 + (omega/pi) / (lambda_n^0 - lambda) up to
    // O(n^-2), and the sum telescopes into a closed-form integral tail.
    let completion = ((zpf.omega / PI) * tail_reciprocal_sum(total, lambda)).exp();
    deflated_free(deflate - 1, lambda) * product * completion
}

/// `sum_{n > total} 1 / (lambda_n^0 - lambda)` with `lambda_n^0 =
/// ((n-1)/2)^2`, approximated by the midpoint integral (error `O(total^-3)`).
fn tail_reciprocal_sum(total: usize, lambda: f64) -> f64 {
    let x0 = total as f64 - 0.5;
    let b = 4.0 * lambda;
    if b > 1e-12 {
        let a = b.sqrt();
        if x0 <= a + 1.0 {
            // Evaluation beyond the modeled zeros; no reliable completion.
            return 0.0;
        }
        4.0 * ((x0 + a) / (x0 - a)).ln() / (2.0 * a)
    } else if b < -1e-12 {
        let a = (-b).sqrt();
        4.0 * (std::f64::consts::FRAC_PI_2 - (x0 / a).atan()) / a
    } else {
        4.0 / x0
    }
}

/// The pair of kernels extracted from the right-half data: the cosine
/// kernel of `psi'(a, .)` and the sine kernel of `psi(a, .)`.
#[derive(Debug, Clone)]
pub struct RightKernels {
    /// Cosine-series kernel in the representation of `psi'`.
    pub deriv_kernel: KernelFunction,
    /// Sine-series kernel in the representation of `psi`.
    pub value_kernel: KernelFunction,
}

/// Recover the cosine kernel of the characteristic-function representation
/// `Delta(rho) = -rho sin(2 rho pi) + omega cos(2 rho pi) + int M(t) cos(2 rho t) dt`
/// from the zeros.
///
/// Sampling at `rho = m/2` makes `{cos(m t)}` an orthogonal system on
/// `(0, pi)`, so the cosine moments are `Delta(m/2) - omega (-1)^m` and the
/// kernel is the partial cosine series.
pub fn extract_delta_kernel(
    zpf: &ZeroProductFunction,
    omega: f64,
    m_max: usize,
) -> Result<KernelFunction> {
    let mut frequencies = Vec::with_capacity(m_max + 1);
    let mut coefficients = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        let lambda = (m as f64 / 2.0) * (m as f64 / 2.0);
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let moment = delta_from_zeros(zpf, lambda) - omega * sign;
        let weight = if m == 0 { 1.0 / PI } else { 2.0 / PI };
        frequencies.push(m as f64);
        coefficients.push(moment * weight);
    }
    KernelFunction::from_series(TrigSeries::new(TrigKind::Cosine, frequencies, coefficients))
}

/// Cosine moments of the kernel produced by [`extract_delta_kernel`],
/// read back from the series (the inverse of the weighting).
pub fn delta_kernel_moments(kernel: &KernelFunction) -> Vec<f64> {
    let s = kernel.series();
    s.coefficients
        .iter()
        .enumerate()
        .map(|(m, &c)| if m == 0 { c * PI } else { c * PI / 2.0 })
        .collect()
}

/// Extract the transformation kernels of the right-half solutions by
/// sampling `psi` and `psi'` at the frequencies where the boundary terms
/// collapse: integers for the cosine kernel, half-integers for the sine
/// kernel.
pub fn extract_right_kernels(
    q_right: &GridFunction,
    h_right: f64,
    m_max: usize,
    settings: &SlSettings,
) -> Result<RightKernels> {
    let omega_plus = h_right + 0.5 * q_right.integral();

    // Cosine kernel of psi': moments int N cos(m t) dt = psi'(a, m) + omega_plus (-1)^m.
    let mut cos_freqs = Vec::with_capacity(m_max + 1);
    let mut cos_coefs = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        let lambda = (m * m) as f64;
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let boundary = psi_boundary(q_right, h_right, lambda, settings)?;
        let moment = boundary.derivative + omega_plus * sign;
        let weight = if m == 0 { 1.0 / PI } else { 2.0 / PI };
        cos_freqs.push(m as f64);
        cos_coefs.push(moment * weight);
    }

    // Sine kernel of psi: moments int N0 sin((m - 1/2) t) dt
    //   = (m - 1/2) psi(a, m - 1/2) - omega_plus (-1)^{m+1}.
    let mut sin_freqs = Vec::with_capacity(m_max);
    let mut sin_coefs = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        let rho = m as f64 - 0.5;
        let sign = if m % 2 == 0 { -1.0 } else { 1.0 };
        let boundary = psi_boundary(q_right, h_right, rho * rho, settings)?;
        let moment = rho * boundary.value - omega_plus * sign;
        sin_freqs.push(rho);
        sin_coefs.push(moment * 2.0 / PI);
    }

    Ok(RightKernels {
        deriv_kernel: KernelFunction::from_series(TrigSeries::new(
            TrigKind::Cosine,
            cos_freqs,
            cos_coefs,
        ))?,
        value_kernel: KernelFunction::from_series(TrigSeries::new(
            TrigKind::Sine,
            sin_freqs,
            sin_coefs,
        ))?,
    })
}
