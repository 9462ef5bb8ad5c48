//! Direct Sturm-Liouville engine on `-y'' + q y = lambda y`.
//!
//! Everything is phrased in the spectral plane `lambda = rho^2` so that
//! negative eigenvalues are representable before a spectral shift is applied.
//! The integrator is a fixed-step classical Runge-Kutta scheme whose step
//! count grows like `1 + sqrt(|lambda|)`, keeping the phase error roughly
//! uniform across a spectrum prefix.

use std::f64::consts::PI;

use crate::error::{Result, SolverError};
use crate::grid::GridFunction;

/// Robin coefficients of the full problem:
/// `y'(0) - h_left y(0) = 0`, `y'(b) + h_right y(b) = 0`.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryParams {
    pub h_left: f64,
    pub h_right: f64,
}

impl BoundaryParams {
    pub fn new(h_left: f64, h_right: f64) -> Self {
        BoundaryParams { h_left, h_right }
    }
}

/// Value and x-derivative of a solution at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionBoundary {
    pub value: f64,
    pub derivative: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// Accuracy knobs for the direct solver.
#[derive(Debug, Clone, Copy)]
pub struct SlSettings {
    /// Steps per unit length at lambda = 0; the actual count scales by
    /// `1 + sqrt(|lambda|)`.
    pub steps_per_unit: f64,
    /// Relative tolerance for the two characteristic-value routes.
    pub wronskian_tol: f64,
    /// Geometric bracket expansions before giving up on an eigenvalue.
    pub max_bracket_expansions: u32,
    /// Subintervals scanned for a sign change inside each bracket.
    pub bracket_subdivisions: usize,
}

impl Default for SlSettings {
    fn default() -> Self {
        SlSettings {
            steps_per_unit: 200.0,
            wronskian_tol: 1e-8,
            max_bracket_expansions: 5,
            bracket_subdivisions: 8,
        }
    }
}

/// Integrate `-y'' + q y = lambda y` from `x0` to `x1` (either order) with
/// initial data `(y0, dy0)` at `x0`.
pub(crate) fn integrate_range(
    q: &GridFunction,
    lambda: f64,
    y0: f64,
    dy0: f64,
    x0: f64,
    x1: f64,
    settings: &SlSettings,
) -> Result<SolutionBoundary> {
    if !(y0.is_finite() && dy0.is_finite() && lambda.is_finite()) {
        return Err(SolverError::InvalidInput("non-finite initial data".into()));
    }
    let len = (x1 - x0).abs();
    let steps = (len * settings.steps_per_unit * (1.0 + lambda.abs().sqrt())).ceil() as usize;
    let steps = steps.max(8);
    let h = (x1 - x0) / steps as f64;

    let mut x = x0;
    let mut y = y0;
    let mut v = dy0;
    for i in 0..steps {
        // y' = v, v' = (q - lambda) y.
        let c0 = q.eval(x) - lambda;
        let cm = q.eval(x + 0.5 * h) - lambda;
        let c1 = q.eval(x + h) - lambda;

        let k1y = v;
        let k1v = c0 * y;
        let k2y = v + 0.5 * h * k1v;
        let k2v = cm * (y + 0.5 * h * k1y);
        let k3y = v + 0.5 * h * k2v;
        let k3v = cm * (y + 0.5 * h * k2y);
        let k4y = v + h * k3v;
        let k4v = c1 * (y + h * k3y);

        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        x = x0 + (i + 1) as f64 * h;

        if !(y.is_finite() && v.is_finite()) {
            return Err(SolverError::NonFiniteState { x, lambda });
        }
    }
    Ok(SolutionBoundary { value: y, derivative: v })
}

/// Forward integration that also accumulates `int y^2 dx` along the way
/// (third quadrature state in the same RK4 sweep).
pub fn integrate_with_l2(
    q: &GridFunction,
    lambda: f64,
    y0: f64,
    dy0: f64,
    settings: &SlSettings,
) -> Result<(SolutionBoundary, f64)> {
    let (x0, x1) = (q.a(), q.b());
    let len = x1 - x0;
    let steps = (len * settings.steps_per_unit * (1.0 + lambda.abs().sqrt())).ceil() as usize;
    let steps = steps.max(8);
    let h = len / steps as f64;

    let mut x = x0;
    let mut y = y0;
    let mut v = dy0;
    let mut z = 0.0;
    for i in 0..steps {
        let c0 = q.eval(x) - lambda;
        let cm = q.eval(x + 0.5 * h) - lambda;
        let c1 = q.eval(x + h) - lambda;

        let k1y = v;
        let k1v = c0 * y;
        let k1z = y * y;
        let y2 = y + 0.5 * h * k1y;
        let k2y = v + 0.5 * h * k1v;
        let k2v = cm * y2;
        let k2z = y2 * y2;
        let y3 = y + 0.5 * h * k2y;
        let k3y = v + 0.5 * h * k2v;
        let k3v = cm * y3;
        let k3z = y3 * y3;
        let y4 = y + h * k3y;
        let k4y = v + h * k3v;
        let k4v = c1 * y4;
        let k4z = y4 * y4;

        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        z += h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
        x = x0 + (i + 1) as f64 * h;

        if !(y.is_finite() && v.is_finite()) {
            return Err(SolverError::NonFiniteState { x, lambda });
        }
    }
    Ok((SolutionBoundary { value: y, derivative: v }, z))
}

/// Integrate across the whole interval of `q` and return `(y, y')` at the far
/// endpoint.
pub fn integrate_solution(
    q: &GridFunction,
    lambda: f64,
    y0: f64,
    dy0: f64,
    direction: Direction,
    settings: &SlSettings,
) -> Result<SolutionBoundary> {
    match direction {
        Direction::Forward => integrate_range(q, lambda, y0, dy0, q.a(), q.b(), settings),
        Direction::Backward => integrate_range(q, lambda, y0, dy0, q.b(), q.a(), settings),
    }
}

/// `phi(at, .)` and `phi'(at, .)`: forward solution with `phi(a) = 1`,
/// `phi'(a) = h`.
pub fn phi_boundary(
    q: &GridFunction,
    h: f64,
    lambda: f64,
    at: f64,
    settings: &SlSettings,
) -> Result<SolutionBoundary> {
    if at <= q.a() || at > q.b() + 1e-12 {
        return Err(SolverError::InvalidInput(format!(
            "evaluation point {at} outside ({}, {}]",
            q.a(),
            q.b()
        )));
    }
    integrate_range(q, lambda, 1.0, h, q.a(), at, settings)
}

/// `psi(a, .)` and `psi'(a, .)`: backward solution with `psi(b) = 1`,
/// `psi'(b) = -h_right`, evaluated at the left endpoint of `q`.
pub fn psi_boundary(
    q_right: &GridFunction,
    h_right: f64,
    lambda: f64,
    settings: &SlSettings,
) -> Result<SolutionBoundary> {
    integrate_range(
        q_right,
        lambda,
        1.0,
        -h_right,
        q_right.b(),
        q_right.a(),
        settings,
    )
}

/// Characteristic value at `lambda`, computed along both algebraic routes.
///
/// Route A is the Wronskian of the forward and backward solutions at the
/// midpoint; route B continues the forward solution to the right endpoint
/// and applies the boundary form there. Constancy of the Wronskian makes
/// them equal; disagreement beyond tolerance signals integrator failure.
pub fn char_value(
    q: &GridFunction,
    bp: &BoundaryParams,
    lambda: f64,
    settings: &SlSettings,
) -> Result<f64> {
    let mid = 0.5 * (q.a() + q.b());
    let phi = integrate_range(q, lambda, 1.0, bp.h_left, q.a(), mid, settings)?;
    let psi = integrate_range(q, lambda, 1.0, -bp.h_right, q.b(), mid, settings)?;
    let route_a = phi.derivative * psi.value - phi.value * psi.derivative;

    let phi_end = integrate_range(q, lambda, phi.value, phi.derivative, mid, q.b(), settings)?;
    let route_b = phi_end.derivative + bp.h_right * phi_end.value;

    let scale = (1.0 + lambda.abs().sqrt())
        .max(route_a.abs())
        .max(route_b.abs());
    if (route_a - route_b).abs() > settings.wronskian_tol * scale {
        return Err(SolverError::WronskianMismatch { lambda, route_a, route_b });
    }
    Ok(route_a)
}

/// Single-route characteristic value (no consistency check); the fast path
/// for root searches.
pub fn char_value_unchecked(
    q: &GridFunction,
    bp: &BoundaryParams,
    lambda: f64,
    settings: &SlSettings,
) -> Result<f64> {
    let end = integrate_range(q, lambda, 1.0, bp.h_left, q.a(), q.b(), settings)?;
    Ok(end.derivative + bp.h_right * end.value)
}

/// A computed spectrum prefix, stored as `lambda_n = rho_n^2`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    lambdas: Vec<f64>,
}

impl Spectrum {
    pub fn from_lambdas(lambdas: Vec<f64>) -> Self {
        Spectrum { lambdas }
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn has_negative(&self) -> bool {
        self.lambdas.first().is_some_and(|&l| l < 0.0)
    }

    /// `rho_n = sqrt(lambda_n)`; fails on negative entries, which flag that
    /// a spectral shift is required first. Roundoff-level negatives (above
    /// -1e-9) are treated as zero.
    pub fn rhos(&self) -> Result<Vec<f64>> {
        if let Some((i, &l)) = self.lambdas.iter().enumerate().find(|(_, &l)| l < -1e-9) {
            return Err(SolverError::NegativeEigenvalue { index: i + 1, lambda: l });
        }
        Ok(self.lambdas.iter().map(|&l| l.max(0.0).sqrt()).collect())
    }

    pub fn shifted(&self, s: f64) -> Spectrum {
        Spectrum { lambdas: shift_lambdas(&self.lambdas, s) }
    }
}

/// First `n` eigenvalues of the full problem on `q`'s interval.
pub fn eigenvalues_full(
    q: &GridFunction,
    bp: &BoundaryParams,
    n: usize,
    settings: &SlSettings,
) -> Result<Spectrum> {
    if n == 0 {
        return Err(SolverError::InvalidInput("need n >= 1".into()));
    }
    let omega = bp.h_left + bp.h_right + 0.5 * q.integral();
    // In the lambda plane the leading asymptotic correction is an additive
    // shift by omega / pi (exact for constant potentials).
    let guesses: Vec<f64> = (1..=n)
        .map(|k| {
            let rho0 = (k as f64 - 1.0) / 2.0;
            rho0 * rho0 + omega / PI
        })
        .collect();
    let f = |lambda: f64| char_value_unchecked(q, bp, lambda, settings);
    let lambdas = find_increasing_roots(&f, &guesses, settings)?;
    Ok(Spectrum::from_lambdas(lambdas))
}

/// Auxiliary spectra of the right-half problems, as lambda sequences:
/// zeros of `psi(a, .)` (Dirichlet at the interface) and of `psi'(a, .)`
/// (Neumann at the interface).
#[derive(Debug, Clone)]
pub struct AuxSpectra {
    pub mu_lambdas: Vec<f64>,
    pub nu_lambdas: Vec<f64>,
}

impl AuxSpectra {
    pub fn mus(&self) -> Result<Vec<f64>> {
        Spectrum::from_lambdas(self.mu_lambdas.clone()).rhos()
    }

    pub fn nus(&self) -> Result<Vec<f64>> {
        Spectrum::from_lambdas(self.nu_lambdas.clone()).rhos()
    }

    pub fn min_lambda(&self) -> f64 {
        let m = self.mu_lambdas.first().copied().unwrap_or(f64::INFINITY);
        let n = self.nu_lambdas.first().copied().unwrap_or(f64::INFINITY);
        m.min(n)
    }

    pub fn shifted(&self, s: f64) -> AuxSpectra {
        AuxSpectra {
            mu_lambdas: shift_lambdas(&self.mu_lambdas, s),
            nu_lambdas: shift_lambdas(&self.nu_lambdas, s),
        }
    }
}

/// First `n` eigenvalues of both auxiliary problems on `(a, b)` for
/// `q_right`, with the Robin condition `y'(b) + h_right y(b) = 0` on the far
/// end.
pub fn aux_spectra(
    q_right: &GridFunction,
    h_right: f64,
    n: usize,
    settings: &SlSettings,
) -> Result<AuxSpectra> {
    if n == 0 {
        return Err(SolverError::InvalidInput("need n >= 1".into()));
    }
    let omega_plus = h_right + 0.5 * q_right.integral();
    let lambda_shift = 2.0 * omega_plus / PI;

    let mu_guesses: Vec<f64> = (1..=n)
        .map(|k| {
            let r = k as f64 - 0.5;
            r * r + lambda_shift
        })
        .collect();
    let nu_guesses: Vec<f64> = (1..=n)
        .map(|k| {
            let r = k as f64 - 1.0;
            r * r + lambda_shift
        })
        .collect();

    let f_mu = |lambda: f64| Ok(psi_boundary(q_right, h_right, lambda, settings)?.value);
    let f_nu = |lambda: f64| Ok(psi_boundary(q_right, h_right, lambda, settings)?.derivative);

    let mu_lambdas = find_increasing_roots(&f_mu, &mu_guesses, settings)?;
    let nu_lambdas = find_increasing_roots(&f_nu, &nu_guesses, settings)?;
    Ok(AuxSpectra { mu_lambdas, nu_lambdas })
}

/// Pointwise shift of the potential: `q + s`.
pub fn apply_shift(q: &GridFunction, s: f64) -> GridFunction {
    q.map(|v| v + s)
}

/// Shift of a spectrum in the lambda plane: `lambda_n + s`.
pub fn shift_lambdas(lambdas: &[f64], s: f64) -> Vec<f64> {
    lambdas.iter().map(|&l| l + s).collect()
}

/// Locate one root per guess by scanning an adaptive bracket for a sign
/// change and refining it; the result is validated to be strictly
/// increasing. Shared with the Cauchy-data eigenvalue extraction.
pub(crate) fn find_roots_near<F>(
    f: &F,
    guesses: &[f64],
    settings: &SlSettings,
) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    find_increasing_roots(f, guesses, settings)
}

fn find_increasing_roots<F>(f: &F, guesses: &[f64], settings: &SlSettings) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    let n = guesses.len();
    let mut roots: Vec<f64> = Vec::with_capacity(n);
    for (i, &center) in guesses.iter().enumerate() {
        let gap_left = if i > 0 { center - guesses[i - 1] } else { f64::INFINITY };
        let gap_right = if i + 1 < n {
            guesses[i + 1] - center
        } else {
            gap_left
        };
        let base = 0.5 * gap_left.min(gap_right);
        let base = if base.is_finite() && base > 0.0 { base } else { 0.25 };

        let mut found = None;
        let mut width = base;
        for _ in 0..=settings.max_bracket_expansions {
            if let Some(root) = scan_and_refine(f, center, width, settings)? {
                found = Some(root);
                break;
            }
            width *= 2.0;
        }
        let root = found.ok_or(SolverError::BracketFailure { index: i + 1 })?;
        if let Some(&prev) = roots.last() {
            if root <= prev + 1e-12 * (1.0 + prev.abs()) {
                return Err(SolverError::BracketFailure { index: i + 1 });
            }
        }
        roots.push(root);
    }
    Ok(roots)
}

/// Scan `[center - width, center + width]` on a subgrid, pick the sign
/// change nearest the center, and refine it.
fn scan_and_refine<F>(
    f: &F,
    center: f64,
    width: f64,
    settings: &SlSettings,
) -> Result<Option<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    let m = settings.bracket_subdivisions.max(2);
    let lo = center - width;
    let h = 2.0 * width / m as f64;
    let mut prev_x = lo;
    let mut prev_f = f(lo)?;
    if prev_f == 0.0 {
        return Ok(Some(lo));
    }
    let mut best: Option<(f64, f64, f64, f64)> = None;
    for j in 1..=m {
        let x = lo + j as f64 * h;
        let fx = f(x)?;
        if fx == 0.0 {
            return Ok(Some(x));
        }
        if prev_f.signum() != fx.signum() {
            let mid = 0.5 * (prev_x + x);
            let better = match best {
                None => true,
                Some((blo, bhi, _, _)) => {
                    (mid - center).abs() < (0.5 * (blo + bhi) - center).abs()
                }
            };
            if better {
                best = Some((prev_x, x, prev_f, fx));
            }
        }
        prev_x = x;
        prev_f = fx;
    }
    match best {
        Some((lo, hi, flo, fhi)) => Ok(Some(refine_root(f, lo, hi, flo, fhi)?)),
        None => Ok(None),
    }
}

/// Bisection-then-secant refinement inside a sign-change bracket. Returns
/// the evaluated point with the smallest |f|.
fn refine_root<F>(f: &F, mut lo: f64, mut hi: f64, mut flo: f64, mut fhi: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    debug_assert!(flo.signum() != fhi.signum());
    let mut best = if flo.abs() <= fhi.abs() { (lo, flo.abs()) } else { (hi, fhi.abs()) };
    for _ in 0..18 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.abs() < best.1 {
            best = (mid, fm.abs());
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    // Secant polish, safeguarded by the remaining bracket.
    let (mut xa, mut fa) = (lo, flo);
    let (mut xb, mut fb) = (hi, fhi);
    for _ in 0..40 {
        let denom = fb - fa;
        let mut x = if denom != 0.0 {
            xb - fb * (xb - xa) / denom
        } else {
            0.5 * (lo + hi)
        };
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let fx = f(x)?;
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.abs() < best.1 {
            best = (x, fx.abs());
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        xa = xb;
        fa = fb;
        xb = x;
        fb = fx;
        if (hi - lo).abs() <= 1e-15 * (1.0 + xb.abs()) || (xb - xa).abs() <= 1e-15 * (1.0 + xb.abs())
        {
            break;
        }
    }
    Ok(best.0)
}
