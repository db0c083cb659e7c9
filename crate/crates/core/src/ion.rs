//! Trapped-ion model: a qubit coupled to one truncated motional mode.
//!
//! Joint basis index is `qubit · (n_max + 1) + n` with qubit index 0 for
//! `|↓⟩` and 1 for `|↑⟩`. Frequencies are in rad/μs, times in μs, ħ = 1.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::matrix::cis;
use crate::linalg::{kron, ComplexMatrix, DensityMatrix, Keep};
use crate::scalar::{re, Real, C};

/// Qubit index of `|↓⟩`.
pub const DOWN: usize = 0;
/// Qubit index of `|↑⟩`.
pub const UP: usize = 1;

/// Reference values of the trap and drive.
pub mod defaults {
    /// Lamb-Dicke parameter of the 729 nm beam on the axial mode.
    pub const ETA: f64 = 0.09;
    /// Erasure π time on the `n = 0` red-sideband block, μs.
    pub const T_OP_US: f64 = 33.0;
    /// Axial trap frequency ω_z/2π in MHz.
    pub const AXIAL_FREQ_MHZ: f64 = 1.01;
    /// Residual occupation after sideband cooling.
    pub const COOLED_NBAR: f64 = 0.030;
    /// Qubit initialization fidelity.
    pub const INIT_FIDELITY: f64 = 0.989;
    /// Fluorescence misclassification probability.
    pub const DETECTION_EPSILON: f64 = 0.0022;
    /// Reservoir occupation of the initial-state sweep.
    pub const THETA_SWEEP_NBAR: f64 = 0.074;

    /// Carrier Rabi frequency Ω in rad/μs implied by `t_op = π/(ηΩ)`.
    pub fn omega() -> f64 {
        std::f64::consts::PI / (ETA * T_OP_US)
    }

    /// ω_z in rad/μs.
    pub fn omega_z() -> f64 {
        2.0 * std::f64::consts::PI * AXIAL_FREQ_MHZ
    }
}

/// Highest retained Fock level of the motional mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FockTruncation {
    n_max: usize,
}

impl FockTruncation {
    /// Thermal tail mass left outside an automatically sized space.
    pub const TAIL_TOL: f64 = 1e-12;
    /// Floor for automatic sizing, so one red-sideband step from `|1⟩` fits.
    pub const MIN_AUTO: usize = 2;

    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::invalid("n_max", "must be at least 1"));
        }
        Ok(Self { n_max })
    }

    /// Smallest `n_max` with `(n̄/(1+n̄))^n_max ≤ 1e-12`, floored at [`Self::MIN_AUTO`].
    pub fn auto(nbar: f64) -> Self {
        let q = nbar / (1.0 + nbar);
        let needed = if q <= 0.0 {
            0
        } else {
            (Self::TAIL_TOL.ln() / q.ln()).ceil() as usize
        };
        Self {
            n_max: needed.max(Self::MIN_AUTO),
        }
    }

    #[inline]
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Number of retained Fock levels, `n_max + 1`.
    #[inline]
    pub fn levels(&self) -> usize {
        self.n_max + 1
    }

    /// Joint dimension `2 (n_max + 1)`.
    #[inline]
    pub fn joint_dim(&self) -> usize {
        2 * self.levels()
    }

    #[inline]
    pub fn index(&self, qubit: usize, n: usize) -> usize {
        debug_assert!(qubit < 2 && n <= self.n_max);
        qubit * self.levels() + n
    }
}

/// Drive parameters of a carrier or sideband pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PulseParams<T: Real> {
    pub eta: T,
    /// Carrier Rabi frequency Ω, rad/μs.
    pub omega: T,
    pub phi: T,
    /// Pulse length, μs.
    pub duration: T,
}

impl<T: Real> PulseParams<T> {
    pub fn new(eta: T, omega: T, phi: T, duration: T) -> Result<Self> {
        if !(eta > T::zero()) || !eta.is_finite() {
            return Err(Error::invalid(
                "eta",
                format!("must be positive, got {eta}"),
            ));
        }
        if !(omega > T::zero()) || !omega.is_finite() {
            return Err(Error::invalid(
                "omega",
                format!("must be positive, got {omega}"),
            ));
        }
        if !phi.is_finite() {
            return Err(Error::invalid("phi", "must be finite"));
        }
        if !(duration >= T::zero()) || !duration.is_finite() {
            return Err(Error::invalid(
                "duration",
                format!("must be nonnegative, got {duration}"),
            ));
        }
        Ok(Self {
            eta,
            omega,
            phi,
            duration,
        })
    }

    /// η = 0.09, Ω from t_op = 33 μs, φ = 0, duration t_op.
    pub fn reference() -> Self {
        Self {
            eta: T::lit(defaults::ETA),
            omega: T::lit(defaults::omega()),
            phi: T::zero(),
            duration: T::lit(defaults::T_OP_US),
        }
    }

    /// Sideband Rabi rate ηΩ.
    #[inline]
    pub fn sideband_rate(&self) -> T {
        self.eta * self.omega
    }

    /// π time of the lowest sideband block, `π/(ηΩ)`.
    pub fn pi_time(&self) -> T {
        T::PI() / self.sideband_rate()
    }

    pub fn with_duration(self, duration: T) -> Self {
        Self { duration, ..self }
    }

    pub fn with_phase(self, phi: T) -> Self {
        Self { phi, ..self }
    }
}

/// Dephased qubit preparation `α|↓⟩⟨↓| + β|↑⟩⟨↑|` with `α = cos²(θ_c/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemPrep<T: Real> {
    pub theta_c: T,
    pub alpha: T,
    pub beta: T,
}

impl<T: Real> SystemPrep<T> {
    pub fn from_theta(theta_c: T) -> Result<Self> {
        if !theta_c.is_finite() {
            return Err(Error::invalid("theta_c", "must be finite"));
        }
        let half = theta_c / T::lit(2.0);
        let (s, c) = half.sin_cos();
        Ok(Self {
            theta_c,
            alpha: c * c,
            beta: s * s,
        })
    }

    /// From measured populations; they are renormalized to sum to one.
    pub fn from_populations(down: T, up: T) -> Result<Self> {
        if down < T::zero() || up < T::zero() || !(down + up > T::zero()) {
            return Err(Error::invalid(
                "populations",
                format!("need nonnegative populations with positive sum, got ({down}, {up})"),
            ));
        }
        let alpha = down / (down + up);
        Self::from_theta(T::lit(2.0) * alpha.sqrt().min(T::one()).acos())
    }

    /// Qubit starts in `|↓⟩` with probability `fidelity` and in `|↑⟩`
    /// otherwise, then is rotated by `θ_c` and dephased.
    pub fn with_init_fidelity(theta_c: T, fidelity: T) -> Result<Self> {
        if !(T::zero()..=T::one()).contains(&fidelity) {
            return Err(Error::invalid(
                "init_fidelity",
                format!("must lie in [0, 1], got {fidelity}"),
            ));
        }
        let ideal = Self::from_theta(theta_c)?;
        let down = fidelity * ideal.alpha + (T::one() - fidelity) * ideal.beta;
        Self::from_populations(down, T::one() - down)
    }

    pub fn qubit_state(&self) -> DensityMatrix<T> {
        DensityMatrix::from_valid(ComplexMatrix::from_real_diag(&[self.alpha, self.beta]))
    }
}

/// Qubit ⊗ truncated Fock state.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState<T: Real> {
    trunc: FockTruncation,
    state: DensityMatrix<T>,
}

impl<T: Real> JointState<T> {
    pub fn new(state: DensityMatrix<T>, trunc: FockTruncation) -> Result<Self> {
        if state.dim() != trunc.joint_dim() {
            return Err(Error::DimensionMismatch(format!(
                "joint state of dimension {} does not match 2 x {} levels",
                state.dim(),
                trunc.levels()
            )));
        }
        Ok(Self { trunc, state })
    }

    pub fn product(qubit: &DensityMatrix<T>, reservoir: &DensityMatrix<T>) -> Result<Self> {
        if qubit.dim() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "qubit state has dimension {}",
                qubit.dim()
            )));
        }
        if reservoir.dim() < 2 {
            return Err(Error::DimensionMismatch(
                "reservoir needs at least two levels".into(),
            ));
        }
        let trunc = FockTruncation::new(reservoir.dim() - 1)?;
        Ok(Self {
            trunc,
            state: qubit.tensor(reservoir),
        })
    }

    /// Pure basis state `|q, n⟩`.
    pub fn basis(qubit: usize, n: usize, trunc: FockTruncation) -> Result<Self> {
        if qubit > 1 || n > trunc.n_max() {
            return Err(Error::invalid(
                "basis",
                format!("|{qubit}, {n}⟩ outside the truncated space"),
            ));
        }
        let mut psi = vec![C::zero(); trunc.joint_dim()];
        psi[trunc.index(qubit, n)] = C::one();
        Ok(Self {
            trunc,
            state: DensityMatrix::pure(&psi)?,
        })
    }

    #[inline]
    pub fn trunc(&self) -> FockTruncation {
        self.trunc
    }

    #[inline]
    pub fn state(&self) -> &DensityMatrix<T> {
        &self.state
    }

    pub fn qubit(&self) -> DensityMatrix<T> {
        self.state
            .partial_trace(2, self.trunc.levels(), Keep::A)
            .expect("dimensions recorded at construction")
    }

    pub fn reservoir(&self) -> DensityMatrix<T> {
        self.state
            .partial_trace(2, self.trunc.levels(), Keep::B)
            .expect("dimensions recorded at construction")
    }

    /// Population of `|↓⟩`.
    pub fn p_down(&self) -> T {
        let m = self.state.matrix();
        (0..self.trunc.levels())
            .map(|n| {
                let i = self.trunc.index(DOWN, n);
                m[(i, i)].re
            })
            .sum()
    }
}

/// Truncated, renormalized Gibbs weights `∝ (n̄/(1+n̄))^n`.
pub fn thermal_populations<T: Real>(nbar: T, trunc: FockTruncation) -> Result<Vec<T>> {
    if !(nbar >= T::zero()) || !nbar.is_finite() {
        return Err(Error::invalid(
            "nbar",
            format!("mean occupation must be a nonnegative number, got {nbar}"),
        ));
    }
    let mut w = vec![T::zero(); trunc.levels()];
    if nbar.is_zero() {
        w[0] = T::one();
        return Ok(w);
    }
    let q = nbar / (T::one() + nbar);
    let mut x = T::one();
    for wn in w.iter_mut() {
        *wn = x;
        x *= q;
    }
    let z: T = w.iter().copied().sum();
    w.iter_mut().for_each(|v| *v /= z);
    Ok(w)
}

/// Thermal reservoir state at mean occupation `nbar`.
pub fn thermal_state<T: Real>(nbar: T, trunc: FockTruncation) -> Result<DensityMatrix<T>> {
    let w = thermal_populations(nbar, trunc)?;
    Ok(DensityMatrix::from_valid(ComplexMatrix::from_real_diag(&w)))
}

/// Carrier rotation `cos(θ/2) I − i sin(θ/2) σ_x`.
pub fn carrier_rotation<T: Real>(theta_c: T) -> ComplexMatrix<T> {
    let (s, c) = (theta_c / T::lit(2.0)).sin_cos();
    let mut u = ComplexMatrix::zeros(2, 2);
    u[(0, 0)] = re(c);
    u[(1, 1)] = re(c);
    u[(0, 1)] = Complex::new(T::zero(), -s);
    u[(1, 0)] = Complex::new(T::zero(), -s);
    u
}

/// Zeroes every coherence between `|↓⟩` and `|↑⟩` blocks.
pub fn dephase_qubit<T: Real>(rho: &JointState<T>) -> JointState<T> {
    let l = rho.trunc.levels();
    let m = rho.state.matrix();
    let out = ComplexMatrix::from_fn(2 * l, 2 * l, |i, j| {
        if i / l == j / l {
            m[(i, j)]
        } else {
            C::zero()
        }
    });
    JointState {
        trunc: rho.trunc,
        state: DensityMatrix::from_valid(out),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sideband {
    /// `|↑, n⟩ ↔ |↓, n+1⟩`
    Red,
    /// `|↓, n⟩ ↔ |↑, n+1⟩`
    Blue,
}

impl Sideband {
    /// Coupled pairs `(a, b, n)` with `⟨a|H|b⟩ = (ηΩ√(n+1)/2) e^{iφ}`.
    fn pairs(self, trunc: FockTruncation) -> impl Iterator<Item = (usize, usize, usize)> {
        (0..trunc.n_max()).map(move |n| match self {
            Sideband::Red => (trunc.index(UP, n), trunc.index(DOWN, n + 1), n),
            Sideband::Blue => (trunc.index(DOWN, n), trunc.index(UP, n + 1), n),
        })
    }
}

fn block_coupling<T: Real>(p: &PulseParams<T>, n: usize) -> T {
    p.sideband_rate() * T::from_usize(n + 1).expect("level").sqrt() / T::lit(2.0)
}

/// Interaction-picture sideband Hamiltonian on the joint space.
pub fn sideband_hamiltonian<T: Real>(
    kind: Sideband,
    p: &PulseParams<T>,
    trunc: FockTruncation,
) -> ComplexMatrix<T> {
    let d = trunc.joint_dim();
    let mut h = ComplexMatrix::zeros(d, d);
    let ph = cis(p.phi);
    for (a, b, n) in kind.pairs(trunc) {
        let g = block_coupling(p, n);
        h[(a, b)] = ph * g;
        h[(b, a)] = ph.conj() * g;
    }
    h
}

/// `ηΩ(a σ₊ e^{iφ} + a† σ₋ e^{−iφ})/2`.
pub fn red_sideband_hamiltonian<T: Real>(
    p: &PulseParams<T>,
    trunc: FockTruncation,
) -> ComplexMatrix<T> {
    sideband_hamiltonian(Sideband::Red, p, trunc)
}

/// `ηΩ(a σ₋ e^{iφ} + a† σ₊ e^{−iφ})/2`.
pub fn blue_sideband_hamiltonian<T: Real>(
    p: &PulseParams<T>,
    trunc: FockTruncation,
) -> ComplexMatrix<T> {
    sideband_hamiltonian(Sideband::Blue, p, trunc)
}

/// Sideband propagator for `p.duration`, assembled from the closed-form
/// rotation of each coupled pair (angle `ηΩ√(n+1) t`); dark states pick
/// up no phase.
pub fn jc_block_unitary<T: Real>(
    kind: Sideband,
    p: &PulseParams<T>,
    trunc: FockTruncation,
) -> ComplexMatrix<T> {
    let mut u = ComplexMatrix::identity(trunc.joint_dim());
    let ph = cis(p.phi);
    let minus_i = Complex::new(T::zero(), -T::one());
    for (a, b, n) in kind.pairs(trunc) {
        let (s, c) = (block_coupling(p, n) * p.duration).sin_cos();
        u[(a, a)] = re(c);
        u[(b, b)] = re(c);
        u[(a, b)] = minus_i * ph * s;
        u[(b, a)] = minus_i * ph.conj() * s;
    }
    u
}

/// `U ρ U†`.
pub fn evolve<T: Real>(rho: &JointState<T>, u: &ComplexMatrix<T>) -> Result<JointState<T>> {
    let d = rho.trunc.joint_dim();
    if u.rows() != d || u.cols() != d {
        return Err(Error::DimensionMismatch(format!(
            "propagator is {}x{}, state has dimension {d}",
            u.rows(),
            u.cols()
        )));
    }
    let dev = u.unitary_deviation();
    if dev > T::lit(T::UNITARY_TOL) {
        return Err(Error::NotUnitary {
            deviation: dev.as_f64(),
        });
    }
    // U (Uρ)† = UρU† for Hermitian ρ; both products keep U on the left
    // where its zeros are skipped.
    let w = u.matmul(rho.state.matrix())?;
    let out = u.matmul(&w.adjoint())?;
    Ok(JointState {
        trunc: rho.trunc,
        state: DensityMatrix::from_valid(out),
    })
}

/// `diag(α, β) ⊗ thermal(n̄)`.
pub fn prepare_initial<T: Real>(
    prep: &SystemPrep<T>,
    nbar: T,
    trunc: FockTruncation,
) -> Result<JointState<T>> {
    let reservoir = thermal_state(nbar, trunc)?;
    Ok(JointState {
        trunc,
        state: prep.qubit_state().tensor(&reservoir),
    })
}

/// Prepares the same state operationally: carrier pulse on `|↓⟩ ⊗ thermal`
/// followed by complete dephasing.
pub fn prepare_by_rotation<T: Real>(
    theta_c: T,
    nbar: T,
    trunc: FockTruncation,
) -> Result<JointState<T>> {
    let ground = DensityMatrix::from_valid(ComplexMatrix::from_real_diag(&[T::one(), T::zero()]));
    let start = JointState {
        trunc,
        state: ground.tensor(&thermal_state(nbar, trunc)?),
    };
    let u = kron(
        &carrier_rotation(theta_c),
        &ComplexMatrix::identity(trunc.levels()),
    );
    Ok(dephase_qubit(&evolve(&start, &u)?))
}

/// Linear motional heating `n̄(τ) = n̄_cool + r τ` during the dephasing wait.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatingModel {
    pub cool_nbar: f64,
    /// Phonons per μs.
    pub rate_per_us: f64,
}

impl HeatingModel {
    pub fn nbar_after(&self, wait_us: f64) -> Result<f64> {
        if !(wait_us >= 0.0) {
            return Err(Error::invalid(
                "wait_us",
                format!("must be nonnegative, got {wait_us}"),
            ));
        }
        let nbar = self.cool_nbar + self.rate_per_us * wait_us;
        if !(nbar >= 0.0) || !nbar.is_finite() {
            return Err(Error::invalid("heating_rate", format!("gives n̄ = {nbar}")));
        }
        Ok(nbar)
    }
}
