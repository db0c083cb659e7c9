//! Erasure pipeline, parameter sweeps, and simulated thermometry.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, ReadoutModel};
use crate::error::{Error, Result};
use crate::info::{landauer_ledger, LandauerLedger, Quantity};
use crate::ion::{evolve, jc_block_unitary, prepare_initial, JointState, Sideband, SystemPrep};
use crate::readout::{
    detection_flip, exact_trace, fit_phonon_populations, model_trace, sample_shots, PhononFit,
    RabiTrace,
};

/// Bracket width at which crossing bisection stops, rad.
pub const CROSSING_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct ErasureRun {
    /// Occupation of the initial reservoir after imperfections.
    pub nbar0: f64,
    pub ledger: LandauerLedger<f64>,
    pub initial: JointState<f64>,
    pub final_state: JointState<f64>,
}

/// One curve point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub nbar0: f64,
    /// In units of T₀.
    pub temperature: f64,
    pub temperature_uk: f64,
    pub theta_c: f64,
    pub delta_q: f64,
    pub lhs: Quantity<f64>,
    pub rhs: Quantity<f64>,
    pub delta_s: f64,
    pub mutual_info: f64,
    pub relative_entropy: Quantity<f64>,
    pub residual: Option<f64>,
    pub p_down_final: f64,
    pub exact_mean_phonon: f64,
    pub fitted_mean_phonon: Option<f64>,
}

impl SweepRow {
    pub fn from_run(run: &ErasureRun, config: &ExperimentConfig) -> Self {
        let (theta_c, t0_uk) = (config.theta_c, config.t0_uk);
        let l = &run.ledger;
        Self {
            nbar0: run.nbar0,
            temperature: l.temperature,
            temperature_uk: l.temperature * t0_uk,
            theta_c,
            delta_q: l.delta_q,
            lhs: l.lhs,
            rhs: l.rhs,
            delta_s: l.delta_s,
            mutual_info: l.mutual_info,
            relative_entropy: l.relative_entropy,
            residual: l.residual,
            p_down_final: run.final_state.p_down(),
            exact_mean_phonon: l.e_final,
            fitted_mean_phonon: None,
        }
    }
}

/// Prepares `diag(α, β) ⊗ thermal(n̄₀)`, applies the red-sideband pulse and
/// evaluates the ledger.
pub fn run_erasure(config: &ExperimentConfig) -> Result<ErasureRun> {
    config.validate()?;
    let nbar0 = config.effective_nbar0()?;
    let trunc = config.truncation_for(nbar0)?;
    let fidelity = config.imperfections.init_fidelity;
    let prep = if fidelity == 1.0 {
        SystemPrep::from_theta(config.theta_c)?
    } else {
        SystemPrep::with_init_fidelity(config.theta_c, fidelity)?
    };
    let initial = prepare_initial(&prep, nbar0, trunc)?;
    let u = jc_block_unitary(Sideband::Red, &config.pulse, trunc);
    let final_state = evolve(&initial, &u)?;
    let ledger = landauer_ledger(&initial, &final_state, nbar0)?;
    Ok(ErasureRun {
        nbar0,
        ledger,
        initial,
        final_state,
    })
}

/// Ledger row of a single run.
pub fn erasure_row(config: &ExperimentConfig) -> Result<SweepRow> {
    let run = run_erasure(config)?;
    Ok(SweepRow::from_run(&run, config))
}

/// One row per occupation at the configured `θ_c` and pulse length.
pub fn sweep_temperature(config: &ExperimentConfig, nbar_list: &[f64]) -> Result<Vec<SweepRow>> {
    if let Some(n) = nbar_list.iter().find(|n| !(**n > 0.0) || !n.is_finite()) {
        return Err(Error::invalid(
            "nbar0",
            format!("sweep values must be positive, got {n}"),
        ));
    }
    nbar_list
        .par_iter()
        .map(|&nbar0| {
            erasure_row(&ExperimentConfig {
                nbar0,
                heating_rate: None,
                ..config.clone()
            })
        })
        .collect()
}

/// One row per preparation angle at the configured occupation.
pub fn sweep_theta(config: &ExperimentConfig, theta_list: &[f64]) -> Result<Vec<SweepRow>> {
    if let Some(t) = theta_list.iter().find(|t| !(0.0..=PI).contains(*t)) {
        return Err(Error::invalid(
            "theta_c",
            format!("sweep values must lie in [0, π], got {t}"),
        ));
    }
    theta_list
        .par_iter()
        .map(|&theta_c| {
            erasure_row(&ExperimentConfig {
                theta_c,
                ..config.clone()
            })
        })
        .collect()
}

fn entropy_decrease(config: &ExperimentConfig, theta_c: f64) -> Result<f64> {
    Ok(run_erasure(&ExperimentConfig {
        theta_c,
        ..config.clone()
    })?
    .ledger
    .delta_s)
}

/// Angles where `ΔS(θ_c)` changes sign; `None` when the bracket shows no
/// sign change.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossings {
    pub theta_low: Option<f64>,
    pub theta_high: Option<f64>,
}

/// Bisects `ΔS(θ_c)` on `[0, π/2]` and `[π/2, π]`.
pub fn find_entropy_zero_crossings(config: &ExperimentConfig) -> Result<Crossings> {
    config.validate()?;
    let f = |t: f64| entropy_decrease(config, t);
    let (lo, mid, hi) = (f(0.0)?, f(FRAC_PI_2)?, f(PI)?);
    Ok(Crossings {
        theta_low: bisect(&f, (0.0, lo), (FRAC_PI_2, mid))?,
        theta_high: bisect(&f, (FRAC_PI_2, mid), (PI, hi))?,
    })
}

fn bisect(
    f: &impl Fn(f64) -> Result<f64>,
    (mut a, fa): (f64, f64),
    (mut b, fb): (f64, f64),
) -> Result<Option<f64>> {
    if !(fa * fb < 0.0) {
        return Ok(None);
    }
    let rising = fa < 0.0;
    while b - a > CROSSING_TOL {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(Some(m));
        }
        if (fm < 0.0) == rising {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(Some(0.5 * (a + b)))
}

/// Thermometry of one reservoir state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReadoutSide {
    pub exact_mean_phonon: f64,
    pub fit: PhononFit,
    /// Largest deviation of the full joint-state trace from the
    /// independent-level model built on the exact populations.
    pub model_error: f64,
    pub trace: RabiTrace,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReadoutRun {
    pub row: SweepRow,
    pub ledger: LandauerLedger<f64>,
    pub pre: ReadoutSide,
    pub post: ReadoutSide,
    /// Exact heat, Q₀.
    pub delta_q: f64,
    /// `⟨n⟩_fit,post − ⟨n⟩_fit,pre`, Q₀.
    pub delta_q_hat: f64,
    pub delta_q_hat_joule: f64,
}

/// Independent stream per trace so pre and post noise never coincide.
fn stream_seed(seed: u64, stream: u64) -> u64 {
    seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn read_out(
    config: &ExperimentConfig,
    state: &JointState<f64>,
    nbar_expected: f64,
    stream: u64,
) -> Result<ReadoutSide> {
    let times = config.readout_times()?;
    let p = &config.readout_pulse;
    let pops = state.reservoir().populations();
    let exact_mean_phonon = pops.iter().enumerate().map(|(n, pn)| n as f64 * pn).sum();

    let direct = exact_trace(state, p, &times)?;
    let independent = model_trace(&pops, p, &times, 0.0, config.decay_alpha)?;
    let model_error = direct
        .p_down
        .iter()
        .zip(&independent.p_down)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let clean = match config.readout_model {
        ReadoutModel::Repumped => model_trace(&pops, p, &times, config.gamma0, config.decay_alpha)?,
        ReadoutModel::Direct => direct,
    };
    let observed = detection_flip(&clean, config.imperfections.detection_epsilon)?;
    let trace = if config.shots == 0 {
        observed
    } else {
        sample_shots(&observed, config.shots, stream_seed(config.seed, stream))?
    };
    let fit = fit_phonon_populations(
        &trace,
        p,
        config.n_fit_for(nbar_expected),
        config.gamma0,
        config.decay_alpha,
    )?;
    if config.strict && !fit.converged {
        return Err(Error::FitNoConvergence {
            iterations: fit.iterations,
        });
    }
    Ok(ReadoutSide {
        exact_mean_phonon,
        fit,
        model_error,
        trace,
    })
}

/// Erasure followed by blue-sideband thermometry of the reservoir before
/// and after, with shot noise from the configured seed.
pub fn simulated_readout_run(config: &ExperimentConfig) -> Result<ReadoutRun> {
    let run = run_erasure(config)?;
    let pre = read_out(config, &run.initial, run.nbar0, 0)?;
    let post = read_out(config, &run.final_state, run.nbar0 + 1.0, 1)?;
    let delta_q_hat = post.fit.mean_phonon - pre.fit.mean_phonon;
    let mut row = SweepRow::from_run(&run, config);
    row.fitted_mean_phonon = Some(post.fit.mean_phonon);
    Ok(ReadoutRun {
        row,
        delta_q: run.ledger.delta_q,
        ledger: run.ledger,
        delta_q_hat,
        delta_q_hat_joule: delta_q_hat * config.units()?.q0_joule,
        pre,
        post,
    })
}
