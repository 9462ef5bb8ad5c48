//! Nonharmonic trigonometric moment problems on `(0, pi)`.
//!
//! Given moments `int_0^pi f(t) trig(freq_n t) dt` against a sine or cosine
//! system with perturbed frequencies, the solver recovers the projection of
//! `f` onto the truncated system through its Gram matrix. The Gram entries
//! have closed forms, the factorization is a symmetric positive-definite
//! Cholesky, and the extreme singular values are exposed as the observable
//! stand-in for the Riesz-basis bounds of the underlying theory.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Result, SolverError};
use crate::grid::gauss4_integrate;
use crate::trig::{trig_inner, KernelFunction, TrigKind, TrigSeries};

/// Default floor for the smallest singular value of a Gram matrix.
pub const DEFAULT_CONDITION_FLOOR: f64 = 1e-8 * PI / 2.0;

/// A truncated moment problem: frequencies, the trig family, and the target
/// moments.
#[derive(Debug, Clone)]
pub struct MomentSystem {
    pub frequencies: Vec<f64>,
    pub kind: TrigKind,
    pub moments: Vec<f64>,
}

impl MomentSystem {
    pub fn new(frequencies: Vec<f64>, kind: TrigKind, moments: Vec<f64>) -> Result<Self> {
        if frequencies.len() != moments.len() {
            return Err(SolverError::InvalidInput(format!(
                "{} frequencies vs {} moments",
                frequencies.len(),
                moments.len()
            )));
        }
        for w in frequencies.windows(2) {
            if w[1] <= w[0] {
                return Err(SolverError::InvalidInput(
                    "frequencies must be strictly increasing".into(),
                ));
            }
        }
        if kind == TrigKind::Sine && frequencies.first().is_some_and(|&f| f <= 0.0) {
            return Err(SolverError::InvalidInput(
                "sine systems need positive frequencies".into(),
            ));
        }
        if kind == TrigKind::Cosine && frequencies.first().is_some_and(|&f| f < 0.0) {
            return Err(SolverError::InvalidInput(
                "cosine frequencies must be nonnegative".into(),
            ));
        }
        Ok(MomentSystem { frequencies, kind, moments })
    }
}

/// Extreme singular values of a Gram matrix.
#[derive(Debug, Clone, Copy)]
pub struct GramConditioning {
    pub smallest_singular_value: f64,
    pub largest_singular_value: f64,
}

/// Gram matrix of the truncated trig system in closed form.
pub fn gram_matrix(frequencies: &[f64], kind: TrigKind) -> DMatrix<f64> {
    let n = frequencies.len();
    DMatrix::from_fn(n, n, |i, j| trig_inner(kind, frequencies[i], frequencies[j]))
}

/// Extreme singular values of the Gram matrix (equal to its extreme
/// eigenvalues, the matrix being symmetric positive semidefinite).
pub fn riesz_bounds(frequencies: &[f64], kind: TrigKind) -> GramConditioning {
    let g = gram_matrix(frequencies, kind);
    if g.nrows() == 0 {
        return GramConditioning { smallest_singular_value: 0.0, largest_singular_value: 0.0 };
    }
    let eigen = g.symmetric_eigen();
    let mut smallest = f64::INFINITY;
    let mut largest = 0.0f64;
    for &v in eigen.eigenvalues.iter() {
        let s = v.abs();
        smallest = smallest.min(s);
        largest = largest.max(s);
    }
    GramConditioning { smallest_singular_value: smallest, largest_singular_value: largest }
}

/// Solve the moment problem: return the element of the truncated span whose
/// moments against the system reproduce the input.
///
/// This is the truncated dual-basis expansion: coefficients `c = G^{-1} m`
/// through a Cholesky factorization.
pub fn solve_moments(ms: &MomentSystem, condition_floor: f64) -> Result<KernelFunction> {
    let bounds = riesz_bounds(&ms.frequencies, ms.kind);
    if ms.frequencies.is_empty() {
        return Ok(KernelFunction::zero());
    }
    if bounds.smallest_singular_value < condition_floor {
        return Err(SolverError::IllConditioned {
            smallest: bounds.smallest_singular_value,
            floor: condition_floor,
        });
    }
    let g = gram_matrix(&ms.frequencies, ms.kind);
    let chol = g.cholesky().ok_or(SolverError::IllConditioned {
        smallest: bounds.smallest_singular_value,
        floor: condition_floor,
    })?;
    let rhs = nalgebra::DVector::from_column_slice(&ms.moments);
    let coef = chol.solve(&rhs);
    KernelFunction::from_series(TrigSeries::new(
        ms.kind,
        ms.frequencies.clone(),
        coef.iter().copied().collect(),
    ))
}

/// Forward moments of a kernel: `int_0^pi f(t) trig(freq_n t) dt` by
/// composite quadrature at the kernel's grid resolution.
pub fn moments_of(f: &KernelFunction, frequencies: &[f64], kind: TrigKind) -> Vec<f64> {
    let segments = f.as_grid().segments();
    frequencies
        .iter()
        .map(|&freq| gauss4_integrate(0.0, PI, segments, |t| f.eval(t) * kind.eval(freq, t)))
        .collect()
}
