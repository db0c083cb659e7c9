//! Flat experiment configuration with string key/value access.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Display;
use std::str::FromStr;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::info::UnitSystem;
use crate::ion::{defaults, FockTruncation, HeatingModel, PulseParams};
use crate::readout::{self, DEFAULT_DECAY_ALPHA};

/// Optional deviations from the ideal pipeline. All off by default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Imperfections {
    /// Probability that optical pumping leaves the qubit in `|↓⟩`.
    pub init_fidelity: f64,
    /// Symmetric state-detection error.
    pub detection_epsilon: f64,
    /// Lowest reachable mean occupation after sideband cooling.
    pub cool_nbar: f64,
}

impl Imperfections {
    pub fn ideal() -> Self {
        Self {
            init_fidelity: 1.0,
            detection_epsilon: 0.0,
            cool_nbar: 0.0,
        }
    }

    pub fn realistic() -> Self {
        Self {
            init_fidelity: defaults::INIT_FIDELITY,
            detection_epsilon: defaults::DETECTION_EPSILON,
            cool_nbar: defaults::COOLED_NBAR,
        }
    }
}

/// What the simulated readout pulse acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReadoutModel {
    /// Qubit optically pumped to `|↓⟩` first; only the reservoir is probed.
    Repumped,
    /// Blue-sideband pulse applied to the joint state as it is.
    Direct,
}

impl FromStr for ReadoutModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "repumped" => Ok(Self::Repumped),
            "direct" => Ok(Self::Direct),
            _ => Err(Error::invalid(
                "readout_model",
                format!("expected repumped or direct, got {s:?}"),
            )),
        }
    }
}

impl Display for ReadoutModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Repumped => "repumped",
            Self::Direct => "direct",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub theta_c: f64,
    pub nbar0: f64,
    pub pulse: PulseParams<f64>,
    pub readout_pulse: PulseParams<f64>,
    /// `None` picks the cutoff from the reservoir occupation.
    pub n_max: Option<usize>,
    /// Repetitions per readout point; 0 gives noiseless traces.
    pub shots: u32,
    pub seed: u64,
    pub imperfections: Imperfections,
    /// Phonons per μs; when set, `n̄₀ = cool_nbar + rate · wait_us`.
    pub heating_rate: Option<f64>,
    pub wait_us: f64,
    pub readout_model: ReadoutModel,
    pub readout_points: usize,
    pub readout_span: f64,
    /// `None` picks the cutoff from the expected occupation and shot count.
    pub n_fit: Option<usize>,
    pub gamma0: f64,
    pub decay_alpha: f64,
    /// Trap frequency, rad/μs.
    pub omega_z: f64,
    /// Temperature unit used for display, μK.
    pub t0_uk: f64,
    pub sweep_nbar_min: f64,
    pub sweep_nbar_max: f64,
    pub sweep_nbar_points: usize,
    pub sweep_theta_points: usize,
    /// Treat non-convergence and divergent outputs as failures.
    pub strict: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let pulse = PulseParams::reference();
        Self {
            theta_c: FRAC_PI_2,
            nbar0: defaults::THETA_SWEEP_NBAR,
            pulse,
            readout_pulse: pulse.with_duration(0.0),
            n_max: None,
            shots: 100,
            seed: 0,
            imperfections: Imperfections::ideal(),
            heating_rate: None,
            wait_us: 0.0,
            readout_model: ReadoutModel::Repumped,
            readout_points: 30,
            readout_span: 6.0 * defaults::T_OP_US,
            n_fit: None,
            gamma0: 0.0,
            decay_alpha: DEFAULT_DECAY_ALPHA,
            omega_z: defaults::omega_z(),
            t0_uk: 48.5,
            sweep_nbar_min: 0.01,
            sweep_nbar_max: 2.0,
            sweep_nbar_points: 25,
            sweep_theta_points: 49,
            strict: false,
        }
    }
}

/// Every key accepted by [`ExperimentConfig::set`], in canonical order.
pub const KEYS: &[&str] = &[
    "theta_c",
    "nbar0",
    "eta",
    "omega",
    "phase",
    "duration",
    "readout_eta",
    "readout_omega",
    "readout_phase",
    "n_max",
    "shots",
    "seed",
    "init_fidelity",
    "detection_epsilon",
    "cool_nbar",
    "heating_rate",
    "wait_us",
    "readout_model",
    "readout_points",
    "readout_span",
    "n_fit",
    "gamma0",
    "decay_alpha",
    "omega_z",
    "t0_uk",
    "sweep_nbar_min",
    "sweep_nbar_max",
    "sweep_nbar_points",
    "sweep_theta_points",
    "strict",
];

fn parse<V: FromStr>(key: &str, value: &str) -> Result<V>
where
    V::Err: Display,
{
    value
        .trim()
        .parse()
        .map_err(|e: V::Err| Error::invalid(key, format!("cannot parse {value:?}: {e}")))
}

fn parse_auto<V: FromStr>(key: &str, value: &str) -> Result<Option<V>>
where
    V::Err: Display,
{
    match value.trim() {
        "auto" => Ok(None),
        v => parse(key, v).map(Some),
    }
}

fn show_auto<V: Display>(v: &Option<V>) -> String {
    v.as_ref().map_or_else(|| "auto".into(), |v| v.to_string())
}

impl ExperimentConfig {
    /// Ideal pipeline plus the three measured imperfections.
    pub fn with_imperfections() -> Self {
        Self {
            imperfections: Imperfections::realistic(),
            gamma0: 0.0,
            ..Self::default()
        }
    }

    /// Assigns one key from its textual value. `preset` accepts `ideal` or
    /// `realistic` and overwrites the imperfection keys.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "preset" => {
                self.imperfections = match v {
                    "ideal" => Imperfections::ideal(),
                    "realistic" => Imperfections::realistic(),
                    _ => {
                        return Err(Error::invalid(
                            "preset",
                            format!("expected ideal or realistic, got {v:?}"),
                        ))
                    }
                }
            }
            "theta_c" => self.theta_c = parse(key, v)?,
            "nbar0" => self.nbar0 = parse(key, v)?,
            "eta" => self.pulse.eta = parse(key, v)?,
            "omega" => self.pulse.omega = parse(key, v)?,
            "phase" => self.pulse.phi = parse(key, v)?,
            "duration" => self.pulse.duration = parse(key, v)?,
            "readout_eta" => self.readout_pulse.eta = parse(key, v)?,
            "readout_omega" => self.readout_pulse.omega = parse(key, v)?,
            "readout_phase" => self.readout_pulse.phi = parse(key, v)?,
            "n_max" => self.n_max = parse_auto(key, v)?,
            "shots" => self.shots = parse(key, v)?,
            "seed" => self.seed = parse(key, v)?,
            "init_fidelity" => self.imperfections.init_fidelity = parse(key, v)?,
            "detection_epsilon" => self.imperfections.detection_epsilon = parse(key, v)?,
            "cool_nbar" => self.imperfections.cool_nbar = parse(key, v)?,
            "heating_rate" => {
                self.heating_rate = match v {
                    "none" => None,
                    _ => Some(parse(key, v)?),
                }
            }
            "wait_us" => self.wait_us = parse(key, v)?,
            "readout_model" => self.readout_model = v.parse()?,
            "readout_points" => self.readout_points = parse(key, v)?,
            "readout_span" => self.readout_span = parse(key, v)?,
            "n_fit" => self.n_fit = parse_auto(key, v)?,
            "gamma0" => self.gamma0 = parse(key, v)?,
            "decay_alpha" => self.decay_alpha = parse(key, v)?,
            "omega_z" => self.omega_z = parse(key, v)?,
            "t0_uk" => self.t0_uk = parse(key, v)?,
            "sweep_nbar_min" => self.sweep_nbar_min = parse(key, v)?,
            "sweep_nbar_max" => self.sweep_nbar_max = parse(key, v)?,
            "sweep_nbar_points" => self.sweep_nbar_points = parse(key, v)?,
            "sweep_theta_points" => self.sweep_theta_points = parse(key, v)?,
            "strict" => self.strict = parse(key, v)?,
            _ => return Err(Error::invalid(key, "unknown configuration key")),
        }
        Ok(())
    }

    /// Canonical `(key, value)` listing; feeding it back through
    /// [`set`](Self::set) reproduces the configuration exactly.
    pub fn to_key_values(&self) -> Vec<(&'static str, String)> {
        let s = |v: f64| v.to_string();
        let values = [
            s(self.theta_c),
            s(self.nbar0),
            s(self.pulse.eta),
            s(self.pulse.omega),
            s(self.pulse.phi),
            s(self.pulse.duration),
            s(self.readout_pulse.eta),
            s(self.readout_pulse.omega),
            s(self.readout_pulse.phi),
            show_auto(&self.n_max),
            self.shots.to_string(),
            self.seed.to_string(),
            s(self.imperfections.init_fidelity),
            s(self.imperfections.detection_epsilon),
            s(self.imperfections.cool_nbar),
            self.heating_rate.map_or_else(|| "none".into(), s),
            s(self.wait_us),
            self.readout_model.to_string(),
            self.readout_points.to_string(),
            s(self.readout_span),
            show_auto(&self.n_fit),
            s(self.gamma0),
            s(self.decay_alpha),
            s(self.omega_z),
            s(self.t0_uk),
            s(self.sweep_nbar_min),
            s(self.sweep_nbar_max),
            self.sweep_nbar_points.to_string(),
            self.sweep_theta_points.to_string(),
            self.strict.to_string(),
        ];
        KEYS.iter().copied().zip(values).collect()
    }

    /// SHA-256 of the canonical listing, hex encoded.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in self.to_key_values() {
            h.update(k.as_bytes());
            h.update(b"=");
            h.update(v.as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }

    pub fn validate(&self) -> Result<()> {
        let prob = |key: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::invalid(key, format!("must lie in [0, 1], got {v}")))
            }
        };
        let nonneg = |key: &str, v: f64| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(key, format!("must be nonnegative, got {v}")))
            }
        };
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(key, format!("must be positive, got {v}")))
            }
        };
        if !self.theta_c.is_finite() {
            return Err(Error::invalid("theta_c", "must be finite"));
        }
        nonneg("nbar0", self.nbar0)?;
        let rename = |prefix: &'static str| {
            move |e: Error| match e {
                Error::InvalidInput { key, reason } => {
                    let key = if key == "phi" {
                        "phase".to_string()
                    } else {
                        key
                    };
                    Error::invalid(format!("{prefix}{key}"), reason)
                }
                e => e,
            }
        };
        let p = self.pulse;
        PulseParams::new(p.eta, p.omega, p.phi, p.duration).map_err(rename(""))?;
        let r = self.readout_pulse;
        PulseParams::new(r.eta, r.omega, r.phi, 0.0).map_err(rename("readout_"))?;
        if let Some(n) = self.n_max {
            FockTruncation::new(n).map_err(|_| Error::invalid("n_max", "must be at least 1"))?;
        }
        prob("init_fidelity", self.imperfections.init_fidelity)?;
        prob("detection_epsilon", self.imperfections.detection_epsilon)?;
        nonneg("cool_nbar", self.imperfections.cool_nbar)?;
        if let Some(rate) = self.heating_rate {
            nonneg("heating_rate", rate)?;
        }
        nonneg("wait_us", self.wait_us)?;
        if self.readout_points < 2 {
            return Err(Error::invalid("readout_points", "need at least two points"));
        }
        positive("readout_span", self.readout_span)?;
        if let Some(n) = self.n_fit {
            if n < 1 {
                return Err(Error::invalid("n_fit", "must be at least 1"));
            }
            if self.readout_points < n + 1 {
                return Err(Error::invalid(
                    "readout_points",
                    format!(
                        "{} points cannot determine {} populations",
                        self.readout_points,
                        n + 1
                    ),
                ));
            }
        }
        nonneg("gamma0", self.gamma0)?;
        if !self.decay_alpha.is_finite() {
            return Err(Error::invalid("decay_alpha", "must be finite"));
        }
        if self.readout_model == ReadoutModel::Direct && self.gamma0 != 0.0 {
            return Err(Error::invalid(
                "gamma0",
                "direct readout has no decay model; set gamma0 = 0",
            ));
        }
        positive("omega_z", self.omega_z)?;
        positive("t0_uk", self.t0_uk)?;
        positive("sweep_nbar_min", self.sweep_nbar_min)?;
        positive("sweep_nbar_max", self.sweep_nbar_max)?;
        if self.sweep_nbar_max < self.sweep_nbar_min {
            return Err(Error::invalid(
                "sweep_nbar_max",
                "must not be below sweep_nbar_min",
            ));
        }
        if self.sweep_nbar_points < 1 {
            return Err(Error::invalid("sweep_nbar_points", "must be at least 1"));
        }
        if self.sweep_theta_points < 2 {
            return Err(Error::invalid("sweep_theta_points", "must be at least 2"));
        }
        Ok(())
    }

    /// Reservoir occupation actually used: heating from the cooled value
    /// when a rate is set, otherwise `nbar0` floored at the cooling limit.
    pub fn effective_nbar0(&self) -> Result<f64> {
        match self.heating_rate {
            Some(rate) => HeatingModel {
                cool_nbar: self.imperfections.cool_nbar,
                rate_per_us: rate,
            }
            .nbar_after(self.wait_us),
            None => Ok(self.nbar0.max(self.imperfections.cool_nbar)),
        }
    }

    pub fn truncation_for(&self, nbar: f64) -> Result<FockTruncation> {
        match self.n_max {
            Some(n) => FockTruncation::new(n),
            None => Ok(FockTruncation::auto(nbar)),
        }
    }

    pub fn units(&self) -> Result<UnitSystem> {
        let mut u = UnitSystem::from_trap_frequency(self.omega_z)?;
        u.t0_kelvin = self.t0_uk * 1e-6;
        Ok(u)
    }

    pub fn readout_times(&self) -> Result<Vec<f64>> {
        readout::time_grid(self.readout_span, self.readout_points)
    }

    pub fn n_fit_for(&self, nbar_expected: f64) -> usize {
        self.n_fit
            .unwrap_or_else(|| readout::default_n_fit(nbar_expected, self.shots))
    }

    /// Logarithmic occupation grid of the temperature sweep.
    pub fn nbar_grid(&self) -> Vec<f64> {
        let n = self.sweep_nbar_points;
        if n == 1 {
            return vec![self.sweep_nbar_min];
        }
        let (a, b) = (self.sweep_nbar_min.ln(), self.sweep_nbar_max.ln());
        (0..n)
            .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
            .collect()
    }

    /// Linear grid on `[0, π]` of the preparation sweep.
    pub fn theta_grid(&self) -> Vec<f64> {
        let n = self.sweep_theta_points;
        (0..n).map(|i| PI * (i as f64 / (n - 1) as f64)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_value_round_trip() {
        let mut c = ExperimentConfig::with_imperfections();
        c.n_max = Some(12);
        c.heating_rate = Some(1e-4);
        c.theta_c = 1.234_567_890_123;
        c.readout_model = ReadoutModel::Direct;
        let mut back = ExperimentConfig::default();
        for (k, v) in c.to_key_values() {
            back.set(k, &v).unwrap();
        }
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
        assert_eq!(c.to_key_values().len(), KEYS.len());
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn set_rejects_unknown_and_malformed() {
        let mut c = ExperimentConfig::default();
        let e = c.set("nbarr0", "1").unwrap_err();
        assert!(e.to_string().contains("nbarr0"));
        let e = c.set("shots", "-3").unwrap_err();
        assert!(e.to_string().contains("shots"));
        assert!(c.set("preset", "lab").is_err());
        c.set("preset", "realistic").unwrap();
        assert_eq!(c.imperfections, Imperfections::realistic());
    }

    #[test]
    fn validation_names_key() {
        let cases: [(&str, &str); 6] = [
            ("nbar0", "-1"),
            ("init_fidelity", "1.2"),
            ("eta", "0"),
            ("readout_omega", "-1"),
            ("readout_points", "1"),
            ("n_max", "0"),
        ];
        for (k, v) in cases {
            let mut c = ExperimentConfig::default();
            c.set(k, v).unwrap();
            let e = c.validate().unwrap_err();
            assert!(e.to_string().contains(k), "{k}: {e}");
        }
        assert!(ExperimentConfig::default().validate().is_ok());
    }

    #[test]
    fn effective_occupation() {
        let mut c = ExperimentConfig::default();
        assert_eq!(c.effective_nbar0().unwrap(), c.nbar0);
        c.imperfections.cool_nbar = 0.1;
        assert_eq!(c.effective_nbar0().unwrap(), 0.1);
        c.heating_rate = Some(0.001);
        c.wait_us = 20.0;
        assert!((c.effective_nbar0().unwrap() - 0.12).abs() < 1e-15);
    }

    #[test]
    fn grids() {
        let c = ExperimentConfig::default();
        let n = c.nbar_grid();
        assert_eq!(n.len(), 25);
        assert!((n[0] - 0.01).abs() < 1e-15 && (n[24] - 2.0).abs() < 1e-12);
        let t = c.theta_grid();
        assert_eq!(t.len(), 49);
        assert_eq!(t[48], PI);
        assert_eq!(t[24], FRAC_PI_2);
    }
}
