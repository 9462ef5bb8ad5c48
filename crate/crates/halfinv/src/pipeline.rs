//! End-to-end half-inverse solver and stability experiments.
//!
//! The solve runs the reconstruction procedure in five stages:
//!
//! 1. split the spectrum into its asymptotic parts and set up the
//!    zero-product form of the characteristic function;
//! 2. compute the auxiliary spectra and half-interval constants from the
//!    known right half, and apply the normalizing spectral shift;
//! 3. evaluate the moment right-hand sides at the auxiliary eigenvalues;
//! 4. solve the two nonharmonic moment problems for the Cauchy kernels;
//! 5. extract eigendata from the Cauchy data and run the Gelfand-Levitan
//!    reconstruction.
//!
//! Everything after stage 2 happens in the shifted frame; the shift is
//! subtracted from the returned potential.

use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::asymptotics::{
    ball_norm, decompose_spectrum, mixed_distance, omega_half, MixedData, OmegaMode,
};
use crate::cauchy_inverse::{eigen_data_from_cauchy, gelfand_levitan_reconstruct, CauchyData};
use crate::char_product::{delta_from_zeros, ZeroProductFunction};
use crate::error::{PipelineError, Result, SolverError};
use crate::grid::GridFunction;
use crate::moment_solver::{
    riesz_bounds, solve_moments, GramConditioning, MomentSystem, DEFAULT_CONDITION_FLOOR,
};
use crate::sl_direct::{
    apply_shift, aux_spectra, eigenvalues_full, psi_boundary, BoundaryParams, SlSettings,
};
use crate::trig::TrigKind;

/// How the normalizing spectral shift is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShiftPolicy {
    /// `s = -lambda_min`: move the smallest auxiliary eigenvalue exactly to
    /// zero. This canonical frame makes the solve equivariant under
    /// spectral shifts of the input (two data sets differing by a shift
    /// land on identical internal computations) and keeps the shifted
    /// potential as small as possible, which is what the kernel truncation
    /// error scales with.
    Auto,
    Fixed(f64),
}

/// Floors and tolerances threaded through the stages.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Integrator steps per unit length at lambda = 0.
    pub steps_per_unit: f64,
    /// Dual-route agreement tolerance for characteristic values.
    pub wronskian: f64,
    /// Smallest admissible Gram singular value.
    pub condition_floor: f64,
    /// Floor for the scaled boundary values dividing the moment right-hand
    /// sides.
    pub denominator_floor: f64,
    /// Weyl-function pole guard.
    pub pole_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            steps_per_unit: 200.0,
            wronskian: 1e-8,
            condition_floor: DEFAULT_CONDITION_FLOOR,
            denominator_floor: 1e-6,
            pole_floor: 1e-8,
        }
    }
}

/// Configuration of a half-inverse solve.
#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub n_eigs: usize,
    pub grid_size: usize,
    pub shift_policy: ShiftPolicy,
    pub omega_mode: OmegaMode,
    pub tolerances: Tolerances,
    /// Number of auxiliary eigenvalues / moments; defaults to the spectrum
    /// length.
    pub moment_count: Option<usize>,
}

impl SolveConfig {
    pub fn new(n_eigs: usize, grid_size: usize) -> Result<Self> {
        if n_eigs < 8 {
            return Err(SolverError::InvalidInput("need n_eigs >= 8".into()));
        }
        if grid_size < 64 {
            return Err(SolverError::InvalidInput("need grid_size >= 64".into()));
        }
        Ok(SolveConfig {
            n_eigs,
            grid_size,
            shift_policy: ShiftPolicy::Auto,
            omega_mode: OmegaMode::Estimate,
            tolerances: Tolerances::default(),
            moment_count: None,
        })
    }

    pub fn with_omega(mut self, mode: OmegaMode) -> Self {
        self.omega_mode = mode;
        self
    }

    pub fn with_shift(mut self, policy: ShiftPolicy) -> Self {
        self.shift_policy = policy;
        self
    }

    pub fn sl_settings(&self) -> SlSettings {
        SlSettings {
            steps_per_unit: self.tolerances.steps_per_unit,
            wronskian_tol: self.tolerances.wronskian,
            ..SlSettings::default()
        }
    }

    fn effective_moment_count(&self, spectrum_len: usize) -> usize {
        self.moment_count.unwrap_or(spectrum_len).min(spectrum_len)
    }
}

/// Scalar diagnostics of one solve, mirroring the quantities the stability
/// theory bounds.
#[derive(Debug, Clone)]
pub struct Diagnostics {
    pub omega: f64,
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub shift: f64,
    pub moment_count: usize,
    pub gram_sine: GramConditioning,
    pub gram_cosine: GramConditioning,
    /// l2 norms of the moment right-hand sides.
    pub k0_norm: f64,
    pub k_norm: f64,
    /// L2 norms of the recovered Cauchy kernels.
    pub value_kernel_norm: f64,
    pub deriv_kernel_norm: f64,
    /// Worst boundary-value residual at the auxiliary eigenvalues.
    pub max_aux_residual: f64,
}

/// Result of a half-inverse solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub q_left: GridFunction,
    pub h: f64,
    pub diagnostics: Diagnostics,
}

/// Moment right-hand sides at the auxiliary eigenvalues:
/// `k0_n` for the sine system at the Dirichlet-interface points and `k_n`
/// for the cosine system at the Neumann-interface points.
///
/// All inputs are taken in one frame: if a shift is active, `q_right`,
/// `delta`, `mus`, `nus`, and `omega_minus` must all be shifted quantities.
pub fn compute_rhs(
    q_right: &GridFunction,
    h_right: f64,
    delta: &ZeroProductFunction,
    mus: &[f64],
    nus: &[f64],
    omega_minus: f64,
    tol: &Tolerances,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let settings = SlSettings {
        steps_per_unit: tol.steps_per_unit,
        wronskian_tol: tol.wronskian,
        ..SlSettings::default()
    };
    let mut k0s = Vec::with_capacity(mus.len());
    for (i, &mu) in mus.iter().enumerate() {
        let boundary = psi_boundary(q_right, h_right, mu * mu, &settings)?;
        let denom = boundary.derivative;
        if denom.abs() / mu.max(1.0) < tol.denominator_floor {
            return Err(SolverError::DenominatorUnderflow {
                index: i + 1,
                which: "psi'(interface)",
                magnitude: denom.abs(),
            });
        }
        let delta_val = delta_from_zeros(delta, mu * mu);
        let k0 = -mu * (mu * PI).cos() - omega_minus * (mu * PI).sin() - mu * delta_val / denom;
        k0s.push(k0);
    }
    let mut ks = Vec::with_capacity(nus.len());
    for (i, &nu) in nus.iter().enumerate() {
        let boundary = psi_boundary(q_right, h_right, nu * nu, &settings)?;
        let denom = boundary.value;
        if denom.abs() < tol.denominator_floor {
            return Err(SolverError::DenominatorUnderflow {
                index: i + 1,
                which: "psi(interface)",
                magnitude: denom.abs(),
            });
        }
        let delta_val = delta_from_zeros(delta, nu * nu);
        let k = nu * (nu * PI).sin() - omega_minus * (nu * PI).cos() + delta_val / denom;
        ks.push(k);
    }
    Ok((k0s, ks))
}

/// Solve the half-inverse problem for the given mixed data.
pub fn solve_half_inverse(
    s: &MixedData,
    cfg: &SolveConfig,
) -> std::result::Result<SolveReport, PipelineError> {
    let settings = cfg.sl_settings();

    // Stage 1: asymptotic split of the spectrum.
    let n = cfg.n_eigs.min(s.spectrum.len());
    if s.spectrum.len() < 8 {
        return Err(PipelineError::at(1)(SolverError::TooShort {
            required: 8,
            got: s.spectrum.len(),
        }));
    }
    let rhos = &s.spectrum[..n];
    let decomposition =
        decompose_spectrum(rhos, cfg.omega_mode).map_err(PipelineError::at(1))?;
    let omega = decomposition.omega;
    let lambdas: Vec<f64> = rhos.iter().map(|r| r * r).collect();

    // Stage 2: auxiliary data from the known half, then the shift.
    let m_count = cfg.effective_moment_count(n);
    let aux = aux_spectra(&s.q_right, s.h_right, m_count, &settings)
        .map_err(PipelineError::at(2))?;
    let omega_plus = omega_half(&s.q_right, s.h_right);
    let omega_minus = omega - omega_plus;

    let shift = match cfg.shift_policy {
        ShiftPolicy::Auto => -aux.min_lambda(),
        ShiftPolicy::Fixed(v) => v,
    };
    let shifted_aux = aux.shifted(shift);
    let mus = shifted_aux.mus().map_err(PipelineError::at(2))?;
    let nus = shifted_aux.nus().map_err(PipelineError::at(2))?;

    let q_right_shifted = apply_shift(&s.q_right, shift);
    let omega_sh = omega + shift * PI;
    let omega_minus_sh = omega_minus + shift * PI / 2.0;
    // The shifted full spectrum may dip below zero (the left half can lie
    // deeper than the auxiliary ground state); the product form works in
    // the lambda plane, so that is fine.
    let zpf = ZeroProductFunction::from_lambdas(
        lambdas.iter().map(|l| l + shift).collect(),
        omega_sh,
    );

    // Residual diagnostics: how cleanly the auxiliary eigenvalues were
    // located, scaled like the boundary values themselves.
    let mut max_aux_residual = 0.0f64;
    for &ml in &aux.mu_lambdas {
        if let Ok(b) = psi_boundary(&s.q_right, s.h_right, ml, &settings) {
            max_aux_residual = max_aux_residual.max(b.value.abs() / (1.0 + ml.abs().sqrt()));
        }
    }
    for &nl in &aux.nu_lambdas {
        if let Ok(b) = psi_boundary(&s.q_right, s.h_right, nl, &settings) {
            max_aux_residual = max_aux_residual.max(b.derivative.abs() / (1.0 + nl.abs().sqrt()));
        }
    }

    // Stage 3: moment right-hand sides.
    let (k0s, ks) = compute_rhs(
        &q_right_shifted,
        s.h_right,
        &zpf,
        &mus,
        &nus,
        omega_minus_sh,
        &cfg.tolerances,
    )
    .map_err(PipelineError::at(3))?;

    // Stage 4: the two moment problems.
    let gram_sine = riesz_bounds(&mus, TrigKind::Sine);
    let gram_cosine = riesz_bounds(&nus, TrigKind::Cosine);
    let sine_system =
        MomentSystem::new(mus.clone(), TrigKind::Sine, k0s.clone()).map_err(PipelineError::at(4))?;
    let cosine_system =
        MomentSystem::new(nus.clone(), TrigKind::Cosine, ks.clone()).map_err(PipelineError::at(4))?;
    let value_kernel = solve_moments(&sine_system, cfg.tolerances.condition_floor)
        .map_err(PipelineError::at(4))?;
    let deriv_kernel = solve_moments(&cosine_system, cfg.tolerances.condition_floor)
        .map_err(PipelineError::at(4))?;

    // Stage 5: eigendata and Gelfand-Levitan, still in the shifted frame.
    let cd = CauchyData {
        deriv_kernel: deriv_kernel.clone(),
        value_kernel: value_kernel.clone(),
        omega_minus: omega_minus_sh,
    };
    let ed = eigen_data_from_cauchy(&cd, m_count).map_err(PipelineError::at(5))?;
    let reference = ed.tail_shift();
    let rec = gelfand_levitan_reconstruct(&ed, cfg.grid_size, reference)
        .map_err(PipelineError::at(5))?;

    let q_left = rec.q.map(|v| v - shift);
    let diagnostics = Diagnostics {
        omega,
        omega_plus,
        omega_minus,
        shift,
        moment_count: m_count,
        gram_sine,
        gram_cosine,
        k0_norm: k0s.iter().map(|v| v * v).sum::<f64>().sqrt(),
        k_norm: ks.iter().map(|v| v * v).sum::<f64>().sqrt(),
        value_kernel_norm: value_kernel.norm_l2(),
        deriv_kernel_norm: deriv_kernel.norm_l2(),
        max_aux_residual,
    };
    Ok(SolveReport { q_left, h: rec.h, diagnostics })
}

/// Mixed data produced from ground truth, together with the spectral shift
/// that was applied to make every `rho_n` real.
#[derive(Debug, Clone)]
pub struct SynthesizedData {
    pub data: MixedData,
    /// Amount added to the potential and to every eigenvalue. Zero unless
    /// the ground state was negative; the underlying triple of `data` is
    /// then `(q + shift, h, H)`.
    pub shift: f64,
}

/// Forward data generation: compute the spectrum prefix of the full
/// problem and restrict `q` to the right half.
///
/// A negative ground state cannot be carried by a real `rho_1`; in that
/// case the whole problem is shifted first (the normalization the theory
/// applies "without loss of generality") and the shift is reported.
pub fn synthesize_mixed_data(
    q: &GridFunction,
    h_left: f64,
    h_right: f64,
    n: usize,
    settings: &SlSettings,
) -> Result<SynthesizedData> {
    let bp = BoundaryParams::new(h_left, h_right);
    let spectrum = eigenvalues_full(q, &bp, n, settings)?;
    let lambda_min = spectrum.lambdas().first().copied().unwrap_or(0.0);
    let shift = if lambda_min < -1e-9 { 0.75 - lambda_min } else { 0.0 };
    let rhos = spectrum.shifted(shift).rhos()?;
    let mid = 0.5 * (q.a() + q.b());
    let q_right = apply_shift(&q.restrict(mid, q.b())?, shift);
    Ok(SynthesizedData {
        data: MixedData::new(q_right, h_right, rhos)?,
        shift,
    })
}

/// Constant term of the spectrum asymptotics from ground truth:
/// `h + H + (1/2) int q`.
pub fn ground_truth_omega(q: &GridFunction, h_left: f64, h_right: f64) -> f64 {
    h_left + h_right + 0.5 * q.integral()
}

/// Perturbation model for stability sweeps: band-limited noise on the
/// potential plus scalar noise on the boundary coefficients.
#[derive(Debug, Clone)]
pub struct Perturbation {
    /// Scale of the Fourier coefficients of the potential perturbation.
    pub q_amplitude: f64,
    /// Scale of the boundary-coefficient perturbations.
    pub coeff_amplitude: f64,
    pub seed: u64,
    /// Keep both triples inside the a-priori ball of this radius.
    pub ball_radius: Option<f64>,
}

/// Number of Fourier modes in the sweep perturbations; band-limited so that
/// ground-truth distances carry no quadrature noise.
pub const PERTURBATION_MODES: usize = 8;

/// One trial of a stability sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub trial: usize,
    /// Mixed-data distance between base and perturbed data.
    pub data_distance: f64,
    /// Output distance using ground truth.
    pub dist_true: f64,
    /// Output distance using the two reconstructions.
    pub dist_recon: f64,
    pub ratio_true: f64,
    pub ratio_recon: f64,
    /// "ok" or the error description for failed trials.
    pub status: String,
}

#[derive(Debug, Clone)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn max_ratio_recon(&self) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.status == "ok")
            .map(|r| r.ratio_recon)
            .fold(0.0, f64::max)
    }

    pub fn max_ratio_true(&self) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.status == "ok")
            .map(|r| r.ratio_true)
            .fold(0.0, f64::max)
    }

    pub fn failed_trials(&self) -> usize {
        self.rows.iter().filter(|r| r.status != "ok").count()
    }
}

fn draw_band_limited(
    rng: &mut ChaCha8Rng,
    a: f64,
    b: f64,
    amplitude: f64,
    n_samples: usize,
) -> GridFunction {
    let coefs: Vec<(f64, f64)> = (0..PERTURBATION_MODES)
        .map(|_| {
            (
                rng.gen_range(-1.0..1.0) * amplitude / PERTURBATION_MODES as f64,
                rng.gen_range(-1.0..1.0) * amplitude / PERTURBATION_MODES as f64,
            )
        })
        .collect();
    let period = b - a;
    GridFunction::from_fn(a, b, n_samples, |x| {
        let theta = 2.0 * PI * (x - a) / period;
        coefs
            .iter()
            .enumerate()
            .map(|(k, &(ca, cb))| {
                let kt = (k + 1) as f64 * theta;
                ca * kt.cos() + cb * kt.sin()
            })
            .sum()
    })
    .expect("perturbation grid is valid")
}

/// Empirical uniform-stability sweep.
///
/// Each trial perturbs the base triple by a fresh band-limited draw,
/// synthesizes mixed data for both, solves both, and records the data
/// distance, the ground-truth and reconstructed output distances, and their
/// ratios. Failed trials are recorded rather than fatal.
pub fn stability_sweep(
    base: (&GridFunction, f64, f64),
    perturbation: &Perturbation,
    trials: usize,
    cfg: &SolveConfig,
) -> Result<SweepTable> {
    let (q_base, h_base, hr_base) = base;
    let settings = cfg.sl_settings();
    let mid = 0.5 * (q_base.a() + q_base.b());

    let exact_omega = !matches!(cfg.omega_mode, OmegaMode::Estimate);
    let omega_of = |q: &GridFunction, h: f64, hr: f64| {
        if exact_omega {
            OmegaMode::Exact(ground_truth_omega(q, h, hr))
        } else {
            OmegaMode::Estimate
        }
    };

    let base_mode = omega_of(q_base, h_base, hr_base);
    let base_synth = synthesize_mixed_data(q_base, h_base, hr_base, cfg.n_eigs, &settings)?;
    if base_synth.shift != 0.0 {
        return Err(SolverError::InvalidInput(
            "sweep base has a negative ground state; pick a base deeper inside the ball".into(),
        ));
    }
    let base_data = base_synth.data;
    let base_cfg = SolveConfig { omega_mode: base_mode, ..cfg.clone() };
    let base_report = solve_half_inverse(&base_data, &base_cfg)
        .map_err(|e| e.source.clone())?;
    let q_base_left = q_base.restrict(q_base.a(), mid)?;

    let mut rng = ChaCha8Rng::seed_from_u64(perturbation.seed);
    let mut rows = Vec::with_capacity(trials);
    for trial in 0..trials {
        let delta_q = draw_band_limited(
            &mut rng,
            q_base.a(),
            q_base.b(),
            perturbation.q_amplitude,
            q_base.len(),
        );
        let mut dh = rng.gen_range(-1.0..1.0) * perturbation.coeff_amplitude;
        let mut dhr = rng.gen_range(-1.0..1.0) * perturbation.coeff_amplitude;

        let mut q2: GridFunction = GridFunction::new(
            q_base.a(),
            q_base.b(),
            q_base
                .samples()
                .iter()
                .zip(delta_q.samples())
                .map(|(a, b)| a + b)
                .collect(),
        )?;
        // Rescale the draw if it would leave the a-priori ball.
        if let Some(radius) = perturbation.ball_radius {
            let norm = ball_norm(&q2, h_base + dh, hr_base + dhr);
            if norm > radius {
                let base_norm = ball_norm(q_base, h_base, hr_base);
                let scale = (0.9 * (radius - base_norm) / (norm - base_norm)).clamp(0.0, 1.0);
                q2 = GridFunction::new(
                    q_base.a(),
                    q_base.b(),
                    q_base
                        .samples()
                        .iter()
                        .zip(delta_q.samples())
                        .map(|(a, b)| a + scale * b)
                        .collect(),
                )?;
                dh *= scale;
                dhr *= scale;
            }
        }
        let (h2, hr2) = (h_base + dh, hr_base + dhr);

        let outcome: std::result::Result<SweepRow, String> = (|| {
            let synth2 = synthesize_mixed_data(&q2, h2, hr2, cfg.n_eigs, &settings)
                .map_err(|e| e.to_string())?;
            if synth2.shift != 0.0 {
                return Err("perturbed problem has a negative ground state".to_string());
            }
            let data2 = synth2.data;
            let d = mixed_distance(&base_data, &data2, base_mode, omega_of(&q2, h2, hr2))
                .map_err(|e| e.to_string())?;
            let cfg2 = SolveConfig { omega_mode: omega_of(&q2, h2, hr2), ..cfg.clone() };
            let report2 = solve_half_inverse(&data2, &cfg2).map_err(|e| e.to_string())?;

            let q2_left = q2.restrict(q2.a(), mid).map_err(|e| e.to_string())?;
            let dist_true = q_base_left.l2_distance(&q2_left) + (h_base - h2).abs();
            let dist_recon = base_report.q_left.l2_distance(&report2.q_left)
                + (base_report.h - report2.h).abs();
            let safe_ratio = |num: f64| if d > 0.0 { num / d } else { 0.0 };
            Ok(SweepRow {
                trial,
                data_distance: d,
                dist_true,
                dist_recon,
                ratio_true: safe_ratio(dist_true),
                ratio_recon: safe_ratio(dist_recon),
                status: "ok".into(),
            })
        })();

        rows.push(outcome.unwrap_or_else(|err| SweepRow {
            trial,
            data_distance: f64::NAN,
            dist_true: f64::NAN,
            dist_recon: f64::NAN,
            ratio_true: f64::NAN,
            ratio_recon: f64::NAN,
            status: err,
        }));
    }
    Ok(SweepTable { rows })
}
