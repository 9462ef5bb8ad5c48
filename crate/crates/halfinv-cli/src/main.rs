//! Command-line driver: direct spectra, data synthesis, half-inverse
//! solves, stability sweeps, and an invariant checker, all reproducible
//! from JSON inputs.

mod io;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use halfinv::asymptotics::{decompose_spectrum, OmegaMode};
use halfinv::error::SolverError;
use halfinv::moment_solver::{moments_of, solve_moments, MomentSystem, DEFAULT_CONDITION_FLOOR};
use halfinv::pipeline::{
    ground_truth_omega, solve_half_inverse, stability_sweep, synthesize_mixed_data, Perturbation,
    ShiftPolicy, SolveConfig,
};
use halfinv::sl_direct::{
    apply_shift, aux_spectra, char_value, eigenvalues_full, BoundaryParams, SlSettings,
};
use halfinv::trig::TrigKind;

use io::{MixedFile, ProblemFile, ReportFile};

#[derive(Parser)]
#[command(name = "halfinv", version, about = "Half-inverse Sturm-Liouville solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SolveOpts {
    /// Number of eigenvalues to use.
    #[arg(long, default_value_t = 32)]
    n_eigs: usize,
    /// Output grid resolution (segments on the half-interval).
    #[arg(long, default_value_t = 256)]
    grid_size: usize,
    /// Spectral shift policy: "auto" or a fixed value.
    #[arg(long, default_value = "auto")]
    shift: String,
    /// How the asymptotic constant is obtained: "estimate" or "exact".
    #[arg(long, default_value = "estimate")]
    omega_mode: String,
    /// Value for --omega-mode exact.
    #[arg(long)]
    omega: Option<f64>,
    /// Number of auxiliary eigenvalues / moments (defaults to n-eigs).
    #[arg(long)]
    moment_count: Option<usize>,
}

impl SolveOpts {
    fn to_config(&self) -> Result<SolveConfig, String> {
        let mut cfg = SolveConfig::new(self.n_eigs, self.grid_size).map_err(|e| e.to_string())?;
        cfg.shift_policy = match self.shift.as_str() {
            "auto" => ShiftPolicy::Auto,
            other => ShiftPolicy::Fixed(
                other.parse::<f64>().map_err(|_| format!("bad --shift value: {other}"))?,
            ),
        };
        cfg.omega_mode = match self.omega_mode.as_str() {
            "estimate" => OmegaMode::Estimate,
            "exact" => OmegaMode::Exact(
                self.omega.ok_or_else(|| "--omega-mode exact needs --omega".to_string())?,
            ),
            other => return Err(format!("bad --omega-mode: {other}")),
        };
        cfg.moment_count = self.moment_count;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute the spectrum of a full problem and its asymptotic split.
    Direct {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 32)]
        n_eigs: usize,
        /// "exact" (from the known triple) or "estimate" (from the tail).
        #[arg(long, default_value = "exact")]
        omega_mode: String,
    },
    /// Synthesize mixed data from a full problem.
    Synth {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 32)]
        n_eigs: usize,
    },
    /// Solve the half-inverse problem for mixed data.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        opts: SolveOpts,
    },
    /// Run a seeded stability sweep around a base problem.
    Stability {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        opts: SolveOpts,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0.2)]
        q_amplitude: f64,
        #[arg(long, default_value_t = 0.05)]
        coeff_amplitude: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Keep every trial inside the a-priori ball of this radius.
        #[arg(long)]
        ball: Option<f64>,
    },
    /// Run the invariant battery against a full problem.
    Check {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 12)]
        n_eigs: usize,
    },
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("cannot parse {}: {e}", path.display()))
}

fn write_output(path: &PathBuf, contents: &str) -> Result<(), String> {
    std::fs::write(path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

/// Exit code 2: malformed input. Exit code 3: numerical failure.
fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Direct { input, output, n_eigs, omega_mode } => {
            run_direct(&input, &output, n_eigs, &omega_mode)
        }
        Command::Synth { input, output, n_eigs } => run_synth(&input, &output, n_eigs),
        Command::Solve { input, output, opts } => run_solve(&input, &output, &opts),
        Command::Stability {
            input,
            output,
            opts,
            trials,
            q_amplitude,
            coeff_amplitude,
            seed,
            ball,
        } => run_stability(
            &input,
            &output,
            &opts,
            trials,
            q_amplitude,
            coeff_amplitude,
            seed,
            ball,
        ),
        Command::Check { input, n_eigs } => run_check(&input, n_eigs),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Parse(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

enum CliError {
    Parse(String),
    Numerical(String),
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

fn parse_err(msg: String) -> CliError {
    CliError::Parse(msg)
}

fn run_direct(
    input: &PathBuf,
    output: &PathBuf,
    n_eigs: usize,
    omega_mode: &str,
) -> Result<ExitCode, CliError> {
    let problem: ProblemFile = read_json(input).map_err(parse_err)?;
    let q = problem.potential()?;
    let bp = BoundaryParams::new(problem.h, problem.h_right);
    let settings = SlSettings::default();
    let spectrum = eigenvalues_full(&q, &bp, n_eigs, &settings)?;
    let rhos = spectrum.rhos()?;
    let mode = match omega_mode {
        "exact" => OmegaMode::Exact(ground_truth_omega(&q, problem.h, problem.h_right)),
        "estimate" => OmegaMode::Estimate,
        other => return Err(parse_err(format!("bad --omega-mode: {other}"))),
    };
    let decomposition = decompose_spectrum(&rhos, mode)?;

    let mut csv = String::from("n,rho_n,lambda_n,kappa_n,omega\n");
    for (i, (&rho, &kappa)) in rhos.iter().zip(&decomposition.kappas).enumerate() {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            i + 1,
            rho,
            spectrum.lambdas()[i],
            kappa,
            decomposition.omega
        );
    }
    write_output(output, &csv).map_err(parse_err)?;
    Ok(ExitCode::SUCCESS)
}

fn run_synth(input: &PathBuf, output: &PathBuf, n_eigs: usize) -> Result<ExitCode, CliError> {
    let problem: ProblemFile = read_json(input).map_err(parse_err)?;
    let q = problem.potential()?;
    let synth =
        synthesize_mixed_data(&q, problem.h, problem.h_right, n_eigs, &SlSettings::default())?;
    let file = MixedFile::from_mixed(&synth.data, synth.shift);
    let json = serde_json::to_string_pretty(&file).expect("mixed data serializes");
    write_output(output, &json).map_err(parse_err)?;
    Ok(ExitCode::SUCCESS)
}

fn run_solve(input: &PathBuf, output: &PathBuf, opts: &SolveOpts) -> Result<ExitCode, CliError> {
    let mixed: MixedFile = read_json(input).map_err(parse_err)?;
    let data = mixed.to_mixed()?;
    let mut cfg = opts.to_config().map_err(parse_err)?;
    cfg.n_eigs = cfg.n_eigs.min(data.spectrum.len());
    if cfg.n_eigs < 8 {
        return Err(CliError::Numerical(format!(
            "spectrum too short: {} eigenvalues",
            data.spectrum.len()
        )));
    }
    let report = solve_half_inverse(&data, &cfg)
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    let file = ReportFile::from_report(&report);
    let json = serde_json::to_string_pretty(&file).expect("report serializes");
    write_output(output, &json).map_err(parse_err)?;
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn run_stability(
    input: &PathBuf,
    output: &PathBuf,
    opts: &SolveOpts,
    trials: usize,
    q_amplitude: f64,
    coeff_amplitude: f64,
    seed: u64,
    ball: Option<f64>,
) -> Result<ExitCode, CliError> {
    let problem: ProblemFile = read_json(input).map_err(parse_err)?;
    let q = problem.potential()?;
    let cfg = opts.to_config().map_err(parse_err)?;
    let perturbation = Perturbation {
        q_amplitude,
        coeff_amplitude,
        seed,
        ball_radius: ball,
    };
    let table = stability_sweep(
        (&q, problem.h, problem.h_right),
        &perturbation,
        trials,
        &cfg,
    )?;

    let mut csv =
        String::from("trial,data_distance,dist_true,dist_recon,ratio_true,ratio_recon,status\n");
    for row in &table.rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            row.trial,
            row.data_distance,
            row.dist_true,
            row.dist_recon,
            row.ratio_true,
            row.ratio_recon,
            row.status
        );
    }
    write_output(output, &csv).map_err(parse_err)?;
    Ok(ExitCode::SUCCESS)
}

fn run_check(input: &PathBuf, n_eigs: usize) -> Result<ExitCode, CliError> {
    let problem: ProblemFile = read_json(input).map_err(parse_err)?;
    let q = problem.potential()?;
    let bp = BoundaryParams::new(problem.h, problem.h_right);
    let settings = SlSettings::default();
    let n = n_eigs.max(8);
    let mut all_ok = true;
    let mut report = |name: &str, outcome: Result<(), String>| match outcome {
        Ok(()) => println!("check {name}: PASS"),
        Err(msg) => {
            println!("check {name}: FAIL ({msg})");
            all_ok = false;
        }
    };

    // Dual-route characteristic values agree at sampled points.
    report("wronskian-consistency", {
        let mut res = Ok(());
        for k in 0..10 {
            let lambda = -0.7 + 1.31 * k as f64;
            if let Err(e) = char_value(&q, &bp, lambda, &settings) {
                res = Err(e.to_string());
                break;
            }
        }
        res
    });

    // Eigenvalue residuals at the returned roots.
    let spectrum = eigenvalues_full(&q, &bp, n, &settings);
    report("eigenvalue-residuals", match &spectrum {
        Ok(s) => {
            let mut res = Ok(());
            for &lambda in s.lambdas() {
                let value = char_value(&q, &bp, lambda, &settings).unwrap_or(f64::INFINITY);
                let scale = lambda.abs().sqrt().max(1.0);
                if value.abs() > 1e-9 * scale {
                    res = Err(format!("|Delta| = {} at lambda = {lambda}", value.abs()));
                    break;
                }
            }
            res
        }
        Err(e) => Err(e.to_string()),
    });

    // Exact split/recompose round trip (on the representable shifted
    // spectrum when the ground state is negative).
    report("decompose-recompose", match &spectrum {
        Ok(s) => {
            let lambda_min = s.lambdas().first().copied().unwrap_or(0.0);
            let lift = if lambda_min < 0.0 { 0.75 - lambda_min } else { 0.0 };
            match s.shifted(lift).rhos() {
                Ok(rhos) => match decompose_spectrum(&rhos, OmegaMode::Estimate) {
                    Ok(d) => {
                        let back = halfinv::asymptotics::recompose(&d);
                        let worst = rhos
                            .iter()
                            .zip(&back)
                            .map(|(a, b)| (a - b).abs())
                            .fold(0.0f64, f64::max);
                        if worst < 1e-12 {
                            Ok(())
                        } else {
                            Err(format!("round-trip error {worst}"))
                        }
                    }
                    Err(e) => Err(e.to_string()),
                },
                Err(e) => Err(e.to_string()),
            }
        }
        Err(e) => Err(e.to_string()),
    });

    // Interlacing of the auxiliary spectra.
    report("aux-interlacing", {
        let mid = 0.5 * (q.a() + q.b());
        match q
            .restrict(mid, q.b())
            .and_then(|qr| aux_spectra(&qr, problem.h_right, n, &settings))
        {
            Ok(aux) => {
                let mut res = Ok(());
                for i in 0..aux.mu_lambdas.len() {
                    let below = aux.nu_lambdas[i] < aux.mu_lambdas[i];
                    let above = i + 1 >= aux.nu_lambdas.len()
                        || aux.mu_lambdas[i] < aux.nu_lambdas[i + 1];
                    if !(below && above) {
                        res = Err(format!("violated at index {}", i + 1));
                        break;
                    }
                }
                res
            }
            Err(e) => Err(e.to_string()),
        }
    });

    // Shift involution on the potential samples (up to roundoff of the
    // add/subtract pair).
    report("shift-involution", {
        let shifted = apply_shift(&apply_shift(&q, 1.5), -1.5);
        let worst = shifted
            .samples()
            .iter()
            .zip(q.samples())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        if worst < 1e-12 {
            Ok(())
        } else {
            Err(format!("samples changed by {worst}"))
        }
    });

    // Moment solver round trip on the mu frequencies.
    report("moment-round-trip", {
        let mid = 0.5 * (q.a() + q.b());
        let outcome = q
            .restrict(mid, q.b())
            .and_then(|qr| aux_spectra(&qr, problem.h_right, 8, &settings))
            .and_then(|aux| {
                let mus = aux.shifted(-aux.min_lambda() + 0.25).mus()?;
                let coefs: Vec<f64> = (1..=8).map(|k| 1.0 / k as f64).collect();
                let f = halfinv::trig::KernelFunction::from_series(
                    halfinv::trig::TrigSeries::new(TrigKind::Sine, mus.clone(), coefs.clone()),
                )?;
                let moments = moments_of(&f, &mus, TrigKind::Sine);
                let ms = MomentSystem::new(mus, TrigKind::Sine, moments)?;
                let back = solve_moments(&ms, DEFAULT_CONDITION_FLOOR)?;
                let worst = coefs
                    .iter()
                    .zip(&back.series().coefficients)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max);
                Ok(worst)
            });
        match outcome {
            Ok(worst) if worst < 1e-8 => Ok(()),
            Ok(worst) => Err(format!("coefficient error {worst}")),
            Err(e) => Err(e.to_string()),
        }
    });

    if all_ok {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(3))
    }
}
