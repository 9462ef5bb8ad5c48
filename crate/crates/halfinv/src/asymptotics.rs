//! Asymptotic decompositions of spectra, the mixed-data distance, and the
//! a-priori ball norms.
//!
//! A spectrum prefix `{rho_n}` splits as
//! `rho_n = (n-1)/2 + omega/(pi n) + kappa_n/n`; the split is an exact
//! identity for any finite data once `omega` is fixed, and `omega` itself is
//! either supplied (when the generating potential is known) or estimated
//! from the tail of the sequence.

use std::f64::consts::PI;

use crate::error::{Result, SolverError};
use crate::grid::GridFunction;

/// How to obtain the constant term of the asymptotics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OmegaMode {
    /// Use a known value (for synthetic data, from the generating triple).
    Exact(f64),
    /// Tail-average `pi n (rho_n - (n-1)/2)` over the last quarter of the
    /// indices.
    Estimate,
}

/// A spectrum prefix split into its constant term and l2 remainder.
#[derive(Debug, Clone)]
pub struct SpectrumDecomposition {
    pub omega: f64,
    pub kappas: Vec<f64>,
}

impl SpectrumDecomposition {
    pub fn len(&self) -> usize {
        self.kappas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappas.is_empty()
    }

    /// l2 norm of the remainder sequence.
    pub fn kappa_norm(&self) -> f64 {
        self.kappas.iter().map(|k| k * k).sum::<f64>().sqrt()
    }
}

/// Split `{rho_n}` into `(omega, {kappa_n})`.
pub fn decompose_spectrum(rhos: &[f64], mode: OmegaMode) -> Result<SpectrumDecomposition> {
    let n = rhos.len();
    let omega = match mode {
        OmegaMode::Exact(w) => w,
        OmegaMode::Estimate => {
            if n < 8 {
                return Err(SolverError::TooShort { required: 8, got: n });
            }
            let tail = (n / 4).max(2);
            let start = n - tail;
            let sum: f64 = (start..n)
                .map(|i| {
                    let k = (i + 1) as f64;
                    PI * k * (rhos[i] - (k - 1.0) / 2.0)
                })
                .sum();
            sum / tail as f64
        }
    };
    let kappas = rhos
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let k = (i + 1) as f64;
            k * (r - (k - 1.0) / 2.0) - omega / PI
        })
        .collect();
    Ok(SpectrumDecomposition { omega, kappas })
}

/// Exact inverse of [`decompose_spectrum`]:
/// `rho_n = (n-1)/2 + omega/(pi n) + kappa_n/n`.
pub fn recompose(d: &SpectrumDecomposition) -> Vec<f64> {
    d.kappas
        .iter()
        .enumerate()
        .map(|(i, &kappa)| {
            let n = (i + 1) as f64;
            (n - 1.0) / 2.0 + d.omega / (PI * n) + kappa / n
        })
        .collect()
}

/// Asymptotic split of the auxiliary spectra.
#[derive(Debug, Clone)]
pub struct AuxDecomposition {
    pub omega_plus: f64,
    pub xis: Vec<f64>,
    pub taus: Vec<f64>,
}

impl AuxDecomposition {
    pub fn xi_norm(&self) -> f64 {
        self.xis.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn tau_norm(&self) -> f64 {
        self.taus.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// `xi_n = n (mu_n - (n - 1/2)) - omega_plus/pi`,
/// `tau_n = n (nu_n - (n - 1)) - omega_plus/pi`.
pub fn decompose_aux(mus: &[f64], nus: &[f64], omega_plus: f64) -> AuxDecomposition {
    assert_eq!(mus.len(), nus.len(), "auxiliary spectra must have equal length");
    let xis = mus
        .iter()
        .enumerate()
        .map(|(i, &mu)| {
            let n = (i + 1) as f64;
            n * (mu - (n - 0.5)) - omega_plus / PI
        })
        .collect();
    let taus = nus
        .iter()
        .enumerate()
        .map(|(i, &nu)| {
            let n = (i + 1) as f64;
            n * (nu - (n - 1.0)) - omega_plus / PI
        })
        .collect();
    AuxDecomposition { omega_plus, xis, taus }
}

/// Half-interval constant: `coeff + (1/2) int q` over `q`'s interval.
///
/// With the left half and `h` this is omega_minus; with the right half and
/// the far Robin coefficient it is omega_plus. The two add up to omega.
pub fn omega_half(q_half: &GridFunction, coeff: f64) -> f64 {
    coeff + 0.5 * q_half.integral()
}

/// The given data of the half-inverse problem: right-half potential, far
/// Robin coefficient, and a spectrum prefix (as `rho_n`, all nonnegative).
#[derive(Debug, Clone)]
pub struct MixedData {
    pub q_right: GridFunction,
    pub h_right: f64,
    pub spectrum: Vec<f64>,
}

impl MixedData {
    pub fn new(q_right: GridFunction, h_right: f64, spectrum: Vec<f64>) -> Result<Self> {
        if !h_right.is_finite() {
            return Err(SolverError::InvalidInput("non-finite coefficient".into()));
        }
        if spectrum.iter().any(|r| !r.is_finite()) {
            return Err(SolverError::InvalidInput("non-finite spectrum entry".into()));
        }
        for w in spectrum.windows(2) {
            if w[1] * w[1] <= w[0] * w[0] {
                return Err(SolverError::InvalidInput(
                    "spectrum must be strictly increasing in rho^2".into(),
                ));
            }
        }
        Ok(MixedData { q_right, h_right, spectrum })
    }

    pub fn len(&self) -> usize {
        self.spectrum.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spectrum.is_empty()
    }
}

/// Distance between two mixed-data collections:
/// right-potential L2 distance + coefficient gap + |omega gap| + l2 kappa
/// gap, with both spectra decomposed in the same mode and compared on the
/// common prefix.
pub fn mixed_distance(
    s1: &MixedData,
    s2: &MixedData,
    mode1: OmegaMode,
    mode2: OmegaMode,
) -> Result<f64> {
    let n = s1.spectrum.len().min(s2.spectrum.len());
    let d1 = decompose_spectrum(&s1.spectrum[..n], mode1)?;
    let d2 = decompose_spectrum(&s2.spectrum[..n], mode2)?;
    let kappa_gap: f64 = d1
        .kappas
        .iter()
        .zip(&d2.kappas)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    Ok(s1.q_right.l2_distance(&s2.q_right)
        + (s1.h_right - s2.h_right).abs()
        + (d1.omega - d2.omega).abs()
        + kappa_gap)
}

/// Norm deciding membership in the a-priori ball: `||q|| + |h| + |H| <= Q`.
pub fn ball_norm(q: &GridFunction, h_left: f64, h_right: f64) -> f64 {
    q.norm_l2() + h_left.abs() + h_right.abs()
}

/// Norm deciding membership of a spectrum in the asymptotic ball:
/// `|omega| + ||kappa||_{l2} <= Omega`.
pub fn b_omega_norm(d: &SpectrumDecomposition) -> f64 {
    d.omega.abs() + d.kappa_norm()
}
