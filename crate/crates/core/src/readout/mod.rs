//! Blue-sideband thermometry of the motional mode.
//!
//! A trace records the `|↓⟩` population after a blue-sideband pulse of
//! varying length. Each Fock level `n` flops at `ηΩ√(n+1)`, so the trace
//! is a mixture of cosines whose weights are the phonon populations.

pub mod fit;
pub mod io;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ion::{evolve, jc_block_unitary, JointState, PulseParams, Sideband};

/// Default decay exponent of the per-level envelope in realistic mode.
pub const DEFAULT_DECAY_ALPHA: f64 = 0.7;

/// Simulated or imported measurement record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RabiTrace {
    /// Pulse lengths, μs.
    pub times: Vec<f64>,
    pub p_down: Vec<f64>,
    /// Repetitions per point; 0 for a noiseless trace.
    pub shots_per_point: u32,
    pub seed: Option<u64>,
}

impl RabiTrace {
    pub fn new(
        times: Vec<f64>,
        p_down: Vec<f64>,
        shots_per_point: u32,
        seed: Option<u64>,
    ) -> Result<Self> {
        if times.len() != p_down.len() {
            return Err(Error::invalid(
                "p_down",
                format!("{} values for {} times", p_down.len(), times.len()),
            ));
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid(
                "times",
                "must be finite and strictly increasing",
            ));
        }
        if let Some(p) = p_down.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::invalid(
                "p_down",
                format!("{p} is not a probability"),
            ));
        }
        Ok(Self {
            times,
            p_down,
            shots_per_point,
            seed,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn with_values(&self, p_down: Vec<f64>) -> Self {
        Self {
            p_down,
            ..self.clone()
        }
    }
}

/// `points` equally spaced times on `[0, span]`.
pub fn time_grid(span: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::invalid("readout_points", "need at least two points"));
    }
    if !(span > 0.0) || !span.is_finite() {
        return Err(Error::invalid(
            "readout_span",
            format!("must be positive, got {span}"),
        ));
    }
    let dt = span / (points - 1) as f64;
    Ok((0..points).map(|i| i as f64 * dt).collect())
}

/// Lowest cutoff used for shot-noise traces.
pub const MIN_NOISY_N_FIT: usize = 2;

/// Highest fitted Fock level for a reservoir expected near `nbar`.
///
/// Noiseless traces use `max(8, ⌈5 n̄⌉)`. With `shots` repetitions per
/// point, the cutoff is the first level `N` whose thermal tail `q^{N+1}`,
/// `q = n̄/(1+n̄)`, drops below the per-point noise floor `1/(2√shots)`;
/// higher levels cannot be resolved and only absorb noise as spurious
/// positive weight.
pub fn default_n_fit(nbar_expected: f64, shots: u32) -> usize {
    let nbar = nbar_expected.max(0.0);
    if shots == 0 {
        return ((5.0 * nbar).ceil() as usize).max(8);
    }
    let floor = 0.5 / f64::from(shots).sqrt();
    let q = nbar / (1.0 + nbar);
    if q <= floor {
        return MIN_NOISY_N_FIT;
    }
    let levels = (floor.ln() / q.ln()).ceil() as usize;
    levels.saturating_sub(1).max(MIN_NOISY_N_FIT)
}

/// `|↓⟩` population after a blue-sideband pulse of each length, computed
/// from the full joint state.
pub fn exact_trace(
    rho: &JointState<f64>,
    p: &PulseParams<f64>,
    times: &[f64],
) -> Result<RabiTrace> {
    let trunc = rho.trunc();
    let mut values = Vec::with_capacity(times.len());
    for &t in times {
        let u = jc_block_unitary(Sideband::Blue, &p.with_duration(t), trunc);
        values.push(evolve(rho, &u)?.p_down().clamp(0.0, 1.0));
    }
    RabiTrace::new(times.to_vec(), values, 0, None)
}

fn check_populations(populations: &[f64]) -> Result<()> {
    if populations.is_empty() {
        return Err(Error::invalid("populations", "empty"));
    }
    if let Some(p) = populations.iter().find(|p| !(**p >= 0.0)) {
        return Err(Error::invalid("populations", format!("{p} is negative")));
    }
    let sum: f64 = populations.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(
            "populations",
            format!("sum to {sum}, expected 1"),
        ));
    }
    Ok(())
}

/// Incoherent flopping signal of level `n` at time `t`:
/// `[1 + cos(ηΩ√(n+1) t) e^{−γ₀ (n+1)^α t}]/2`.
fn level_signal(rate: f64, n: usize, t: f64, gamma0: f64, alpha: f64) -> f64 {
    let k = (n + 1) as f64;
    let gamma = gamma0 * k.powf(alpha);
    0.5 * (1.0 + (rate * k.sqrt() * t).cos() * (-gamma * t).exp())
}

/// Population-weighted sum of independent two-level flops, all starting in `|↓⟩`.
pub fn model_trace(
    populations: &[f64],
    p: &PulseParams<f64>,
    times: &[f64],
    gamma0: f64,
    alpha: f64,
) -> Result<RabiTrace> {
    check_populations(populations)?;
    check_decay(gamma0, alpha)?;
    let rate = p.sideband_rate();
    let values = times
        .iter()
        .map(|&t| {
            let v: f64 = populations
                .iter()
                .enumerate()
                .map(|(n, &pn)| pn * level_signal(rate, n, t, gamma0, alpha))
                .sum();
            v.clamp(0.0, 1.0)
        })
        .collect();
    RabiTrace::new(times.to_vec(), values, 0, None)
}

fn check_decay(gamma0: f64, alpha: f64) -> Result<()> {
    if !(gamma0 >= 0.0) || !gamma0.is_finite() {
        return Err(Error::invalid(
            "gamma0",
            format!("must be nonnegative, got {gamma0}"),
        ));
    }
    if !alpha.is_finite() {
        return Err(Error::invalid("decay_alpha", "must be finite"));
    }
    Ok(())
}

/// Replaces each point by a binomial estimate from `shots` repetitions.
pub fn sample_shots(trace: &RabiTrace, shots: u32, seed: u64) -> Result<RabiTrace> {
    if shots == 0 {
        return Err(Error::invalid("shots", "must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(trace.len());
    for &p in &trace.p_down {
        let dist = Binomial::new(u64::from(shots), p.clamp(0.0, 1.0))
            .map_err(|e| Error::invalid("p_down", e.to_string()))?;
        values.push(dist.sample(&mut rng) as f64 / f64::from(shots));
    }
    Ok(RabiTrace {
        times: trace.times.clone(),
        p_down: values,
        shots_per_point: shots,
        seed: Some(seed),
    })
}

/// Symmetric state misclassification: `p → (1−ε)p + ε(1−p)`.
pub fn detection_flip(trace: &RabiTrace, epsilon: f64) -> Result<RabiTrace> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::invalid(
            "detection_epsilon",
            format!("must lie in [0, 1], got {epsilon}"),
        ));
    }
    Ok(trace.with_values(
        trace
            .p_down
            .iter()
            .map(|&p| ((1.0 - epsilon) * p + epsilon * (1.0 - p)).clamp(0.0, 1.0))
            .collect(),
    ))
}

/// Phonon distribution recovered from a trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhononFit {
    /// `p₀ … p_{n_fit}`
    pub populations: Vec<f64>,
    /// Highest fitted Fock level.
    pub n_fit: usize,
    pub mean_phonon: f64,
    /// RMS of model minus data.
    pub residual_norm: f64,
    pub decay_gamma0: f64,
    pub decay_alpha: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Fits populations of levels `0..=n_fit` on the probability simplex with
/// the flopping frequencies held at their calibrated values.
pub fn fit_phonon_populations(
    trace: &RabiTrace,
    p: &PulseParams<f64>,
    n_fit: usize,
    gamma0: f64,
    alpha: f64,
) -> Result<PhononFit> {
    if n_fit < 1 {
        return Err(Error::invalid("n_fit", "must be at least 1"));
    }
    check_decay(gamma0, alpha)?;
    let k = n_fit + 1;
    if trace.len() < k {
        return Err(Error::invalid(
            "times",
            format!("{} points cannot determine {k} populations", trace.len()),
        ));
    }
    let span = trace.times[trace.len() - 1] - trace.times[0];
    let period = 2.0 * std::f64::consts::PI / p.sideband_rate();
    if span < period {
        return Err(Error::invalid(
            "times",
            format!("span {span:.3} μs is shorter than the slowest period {period:.3} μs"),
        ));
    }

    let rate = p.sideband_rate();
    let a = DMatrix::from_fn(trace.len(), k, |r, n| {
        level_signal(rate, n, trace.times[r], gamma0, alpha)
    });
    let y = DVector::from_column_slice(&trace.p_down);
    let sol = fit::simplex_least_squares(&a, &y, fit::MAX_ITERATIONS);

    let model = &a * DVector::from_column_slice(&sol.x);
    let residual_norm = ((model - &y).norm_squared() / trace.len() as f64).sqrt();
    let mean_phonon = sol.x.iter().enumerate().map(|(n, pn)| n as f64 * pn).sum();
    Ok(PhononFit {
        populations: sol.x,
        n_fit,
        mean_phonon,
        residual_norm,
        decay_gamma0: gamma0,
        decay_alpha: alpha,
        converged: sol.converged,
        iterations: sol.iterations,
    })
}
