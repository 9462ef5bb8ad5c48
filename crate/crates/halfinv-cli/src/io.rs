//! File formats: JSON documents for problems, mixed data, and solve
//! reports, plus plain CSV writers for tabular output.

use serde::{Deserialize, Serialize};

use halfinv::asymptotics::MixedData;
use halfinv::error::SolverError;
use halfinv::grid::GridFunction;
use halfinv::pipeline::{Diagnostics, SolveReport};

/// Sampled function payload: uniform samples on `[a, b]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridFile {
    pub a: f64,
    pub b: f64,
    pub samples: Vec<f64>,
}

impl GridFile {
    pub fn from_grid(g: &GridFunction) -> Self {
        GridFile { a: g.a(), b: g.b(), samples: g.samples().to_vec() }
    }

    pub fn to_grid(&self) -> Result<GridFunction, SolverError> {
        GridFunction::new(self.a, self.b, self.samples.clone())
    }
}

/// A full problem: potential on `(0, 2pi)` and both Robin coefficients.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemFile {
    pub a: f64,
    pub b: f64,
    pub samples: Vec<f64>,
    pub h: f64,
    #[serde(rename = "H")]
    pub h_right: f64,
}

impl ProblemFile {
    pub fn potential(&self) -> Result<GridFunction, SolverError> {
        GridFunction::new(self.a, self.b, self.samples.clone())
    }
}

/// Mixed data on disk: right-half potential, far coefficient, spectrum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MixedFile {
    pub q_right: GridFile,
    #[serde(rename = "H")]
    pub h_right: f64,
    pub spectrum: Vec<f64>,
    /// Shift applied at synthesis time to keep every rho real (zero when
    /// the data came from a problem with a nonnegative ground state).
    #[serde(default)]
    pub synthesis_shift: f64,
}

impl MixedFile {
    pub fn from_mixed(data: &MixedData, synthesis_shift: f64) -> Self {
        MixedFile {
            q_right: GridFile::from_grid(&data.q_right),
            h_right: data.h_right,
            spectrum: data.spectrum.clone(),
            synthesis_shift,
        }
    }

    pub fn to_mixed(&self) -> Result<MixedData, SolverError> {
        MixedData::new(self.q_right.to_grid()?, self.h_right, self.spectrum.clone())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagnosticsFile {
    pub omega: f64,
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub shift: f64,
    pub moment_count: usize,
    pub gram_sine_smallest: f64,
    pub gram_sine_largest: f64,
    pub gram_cosine_smallest: f64,
    pub gram_cosine_largest: f64,
    pub k0_norm: f64,
    pub k_norm: f64,
    pub value_kernel_norm: f64,
    pub deriv_kernel_norm: f64,
    pub max_aux_residual: f64,
}

impl DiagnosticsFile {
    pub fn from_diagnostics(d: &Diagnostics) -> Self {
        DiagnosticsFile {
            omega: d.omega,
            omega_plus: d.omega_plus,
            omega_minus: d.omega_minus,
            shift: d.shift,
            moment_count: d.moment_count,
            gram_sine_smallest: d.gram_sine.smallest_singular_value,
            gram_sine_largest: d.gram_sine.largest_singular_value,
            gram_cosine_smallest: d.gram_cosine.smallest_singular_value,
            gram_cosine_largest: d.gram_cosine.largest_singular_value,
            k0_norm: d.k0_norm,
            k_norm: d.k_norm,
            value_kernel_norm: d.value_kernel_norm,
            deriv_kernel_norm: d.deriv_kernel_norm,
            max_aux_residual: d.max_aux_residual,
        }
    }
}

/// Solve output on disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportFile {
    pub q_left: GridFile,
    pub h: f64,
    pub diagnostics: DiagnosticsFile,
}

impl ReportFile {
    pub fn from_report(r: &SolveReport) -> Self {
        ReportFile {
            q_left: GridFile::from_grid(&r.q_left),
            h: r.h,
            diagnostics: DiagnosticsFile::from_diagnostics(&r.diagnostics),
        }
    }
}
