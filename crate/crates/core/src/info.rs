//! Entropies, correlations, and the heat/information balance of an erasure.
//!
//! Two Hamiltonians appear in an erasure. The reservoir Hamiltonian
//! `H_res = Q₀ n̂` (zero-point energy dropped) defines heat; the red
//! sideband interaction drives the dynamics and lives in [`crate::ion`].
//! Energies here are in units of `Q₀ = ħω_z`, temperatures in
//! `T₀ = Q₀/k_B`, entropies in nats.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ion::JointState;
use crate::linalg::{hermitian_eig, hermitian_eigvals, DensityMatrix};
use crate::scalar::{xlogx, Real};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;

/// A value that may be formally infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quantity<T> {
    Finite(T),
    Divergent,
}

impl<T: Copy> Quantity<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            Quantity::Finite(x) => Some(x),
            Quantity::Divergent => None,
        }
    }

    pub fn is_divergent(self) -> bool {
        matches!(self, Quantity::Divergent)
    }
}

impl<T: fmt::Display> fmt::Display for Quantity<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Finite(x) => x.fmt(f),
            Quantity::Divergent => f.write_str("divergent"),
        }
    }
}

impl<T: Serialize> Serialize for Quantity<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Quantity::Finite(x) => x.serialize(s),
            Quantity::Divergent => s.serialize_str("divergent"),
        }
    }
}

/// Conversion between reduced units and SI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnitSystem {
    pub q0_joule: f64,
    pub t0_kelvin: f64,
    /// Trap frequency ω_z, rad/μs.
    pub omega_z: f64,
}

impl UnitSystem {
    /// `Q₀ = ħω_z`, `T₀ = Q₀/k_B`.
    pub fn from_trap_frequency(omega_z: f64) -> Result<Self> {
        if !(omega_z > 0.0) || !omega_z.is_finite() {
            return Err(Error::invalid(
                "omega_z",
                format!("must be positive, got {omega_z}"),
            ));
        }
        let q0 = HBAR * omega_z * 1e6;
        Ok(Self {
            q0_joule: q0,
            t0_kelvin: q0 / K_B,
            omega_z,
        })
    }

    /// Pinned to the rounded display value `T₀ = 48.5 μK`, with Q₀ and ω_z
    /// derived from it.
    pub fn display_reference() -> Self {
        let t0 = 48.5e-6;
        let q0 = t0 * K_B;
        Self {
            q0_joule: q0,
            t0_kelvin: t0,
            omega_z: q0 / HBAR * 1e-6,
        }
    }

    pub fn t0_microkelvin(&self) -> f64 {
        self.t0_kelvin * 1e6
    }
}

/// `−Σ λ ln λ` over eigenvalues above the cutoff.
pub fn von_neumann_entropy<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    let eigs = hermitian_eigvals(rho.matrix())?;
    Ok(-eigs.into_iter().map(xlogx).sum::<T>())
}

/// `S(ρ_S) + S(ρ_R) − S(ρ_SR)`.
pub fn mutual_information<T: Real>(rho: &JointState<T>) -> Result<T> {
    let s = von_neumann_entropy(&rho.qubit())?;
    let r = von_neumann_entropy(&rho.reservoir())?;
    let sr = von_neumann_entropy(rho.state())?;
    Ok(s + r - sr)
}

/// `Tr[ρ₁ ln ρ₁] − Tr[ρ₁ ln ρ₂]`, each trace taken in its own eigenbasis.
///
/// Fails with [`Error::DivergentRelativeEntropy`] when `ρ₁` puts weight on
/// the kernel of `ρ₂` beyond [`Real::SUPPORT_TOL`].
pub fn relative_entropy<T: Real>(rho1: &DensityMatrix<T>, rho2: &DensityMatrix<T>) -> Result<T> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch(format!(
            "relative entropy between dimensions {} and {}",
            rho1.dim(),
            rho2.dim()
        )));
    }
    let self_term: T = hermitian_eigvals(rho1.matrix())?
        .into_iter()
        .map(xlogx)
        .sum();

    let spec = hermitian_eig(rho2.matrix())?;
    let cutoff = T::lit(T::LOG_CUTOFF);
    let m = rho1.matrix();
    let v = &spec.eigenvectors;
    let n = rho1.dim();
    let mut cross = T::zero();
    for (k, &mu) in spec.eigenvalues.iter().enumerate() {
        // ⟨v_k|ρ₁|v_k⟩
        let mut w = T::zero();
        for i in 0..n {
            let vi = v[(i, k)];
            if vi.norm_sqr().is_zero() {
                continue;
            }
            let mut acc = num_complex::Complex::new(T::zero(), T::zero());
            for j in 0..n {
                acc += m[(i, j)] * v[(j, k)];
            }
            w += (vi.conj() * acc).re;
        }
        if mu < cutoff {
            if w > T::lit(T::SUPPORT_TOL) {
                return Err(Error::DivergentRelativeEntropy { weight: w.as_f64() });
            }
            continue;
        }
        cross += w * mu.ln();
    }
    Ok(self_term - cross)
}

/// Mean phonon number `Σ n ⟨n|ρ|n⟩`, the reservoir energy in units of Q₀.
pub fn reservoir_energy<T: Real>(rho_r: &DensityMatrix<T>) -> T {
    rho_r
        .populations()
        .into_iter()
        .enumerate()
        .map(|(n, p)| T::from_usize(n).expect("level") * p)
        .sum()
}

/// Inverse temperature `T₀/T = ln(1 + 1/n̄)`.
pub fn inverse_temperature<T: Real>(nbar: T) -> Result<T> {
    if !(nbar >= T::zero()) || !nbar.is_finite() {
        return Err(Error::invalid(
            "nbar0",
            format!("mean occupation must be a nonnegative number, got {nbar}"),
        ));
    }
    if nbar.is_zero() {
        return Err(Error::ZeroTemperature);
    }
    Ok((T::one() + T::one() / nbar).ln())
}

/// `T/T₀ = 1/ln(1 + 1/n̄)`.
pub fn temperature_from_nbar<T: Real>(nbar: T) -> Result<T> {
    inverse_temperature(nbar).map(|b| T::one() / b)
}

/// Both sides of the erasure heat balance
/// `ΔQ/k_BT = ΔS + I(S′:R′) + D(ρ′_R‖ρ_R)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LandauerLedger<T: Real> {
    /// Reservoir temperature in units of T₀; zero for a ground-state reservoir.
    pub temperature: T,
    pub e_initial: T,
    pub e_final: T,
    pub delta_q: T,
    /// `ΔQ/k_BT`
    pub lhs: Quantity<T>,
    pub delta_s: T,
    pub mutual_info: T,
    pub relative_entropy: Quantity<T>,
    pub rhs: Quantity<T>,
    /// `lhs − rhs`; `None` when either side diverges.
    pub residual: Option<T>,
}

impl<T: Real> LandauerLedger<T> {
    /// True when no field is flagged divergent.
    pub fn is_finite(&self) -> bool {
        self.residual.is_some()
    }
}

/// Heat below which a zero-temperature ledger reports `ΔQ/k_BT = 0`.
const ZERO_HEAT_TOL: f64 = 1e-12;

/// Evaluates every term of the balance for an erasure `initial → final`,
/// where `initial` carries a thermal reservoir at `nbar0`.
pub fn landauer_ledger<T: Real>(
    initial: &JointState<T>,
    final_state: &JointState<T>,
    nbar0: T,
) -> Result<LandauerLedger<T>> {
    if initial.trunc() != final_state.trunc() {
        return Err(Error::DimensionMismatch(
            "initial and final states use different truncations".into(),
        ));
    }
    let rho_s = initial.qubit();
    let rho_r = initial.reservoir();
    let rho_s_f = final_state.qubit();
    let rho_r_f = final_state.reservoir();

    let e_initial = reservoir_energy(&rho_r);
    let e_final = reservoir_energy(&rho_r_f);
    let delta_q = e_final - e_initial;

    let s_initial = von_neumann_entropy(&rho_s)?;
    let s_final = von_neumann_entropy(&rho_s_f)?;
    let delta_s = s_initial - s_final;
    let mutual_info =
        s_final + von_neumann_entropy(&rho_r_f)? - von_neumann_entropy(final_state.state())?;

    let relative_entropy = match relative_entropy(&rho_r_f, &rho_r) {
        Ok(d) => Quantity::Finite(d),
        Err(Error::DivergentRelativeEntropy { .. }) => Quantity::Divergent,
        Err(e) => return Err(e),
    };

    let (temperature, lhs) = match inverse_temperature(nbar0) {
        Ok(beta) => (T::one() / beta, Quantity::Finite(delta_q * beta)),
        Err(Error::ZeroTemperature) => {
            let lhs = if delta_q.abs() <= T::lit(ZERO_HEAT_TOL) {
                Quantity::Finite(T::zero())
            } else {
                Quantity::Divergent
            };
            (T::zero(), lhs)
        }
        Err(e) => return Err(e),
    };

    let rhs = match relative_entropy {
        Quantity::Finite(d) => Quantity::Finite(delta_s + mutual_info + d),
        Quantity::Divergent => Quantity::Divergent,
    };
    let residual = match (lhs, rhs) {
        (Quantity::Finite(l), Quantity::Finite(r)) => Some(l - r),
        _ => None,
    };

    Ok(LandauerLedger {
        temperature,
        e_initial,
        e_final,
        delta_q,
        lhs,
        delta_s,
        mutual_info,
        relative_entropy,
        rhs,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ion::{
        evolve, jc_block_unitary, prepare_initial, thermal_state, FockTruncation, PulseParams,
        Sideband, SystemPrep,
    };
    use crate::linalg::ComplexMatrix;
    use num_complex::Complex;
    use std::f64::consts::{FRAC_PI_2, LN_2};

    #[test]
    fn entropy_cases() {
        let half = DensityMatrix::<f64>::maximally_mixed(2);
        assert!((von_neumann_entropy(&half).unwrap() - LN_2).abs() < 1e-15);
        let pure = DensityMatrix::<f64>::diagonal(&[0.0, 1.0]).unwrap();
        assert_eq!(von_neumann_entropy(&pure).unwrap(), 0.0);

        let (a, b) = (0.531 / 0.998, 0.467 / 0.998);
        let s = von_neumann_entropy(&DensityMatrix::diagonal(&[a, b]).unwrap()).unwrap();
        let direct = -(a * f64::ln(a) + b * f64::ln(b));
        assert!((s - direct).abs() < 1e-15);
        assert!((s - 0.6910).abs() < 1e-4);
    }

    #[test]
    fn thermal_entropy_closed_form() {
        let nbar = 0.074;
        let rho = thermal_state(nbar, FockTruncation::auto(nbar)).unwrap();
        let closed = (1.0 + nbar) * f64::ln(1.0 + nbar) - nbar * f64::ln(nbar);
        let s = von_neumann_entropy(&rho).unwrap();
        assert!((s - closed).abs() < 1e-10);
        assert!((s - 0.2694).abs() < 1e-4);
    }

    #[test]
    fn mutual_information_of_bell_state() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = Complex::new(0.0, 0.0);
        let psi = [Complex::new(s, 0.0), z, z, Complex::new(s, 0.0)];
        let joint = JointState::new(
            DensityMatrix::pure(&psi).unwrap(),
            FockTruncation::new(1).unwrap(),
        )
        .unwrap();
        assert!((mutual_information(&joint).unwrap() - 2.0 * LN_2).abs() < 1e-12);
    }

    #[test]
    fn product_states_carry_no_mutual_information() {
        let t = FockTruncation::auto(0.4);
        let joint = prepare_initial(&SystemPrep::<f64>::from_theta(1.1).unwrap(), 0.4, t).unwrap();
        assert!(mutual_information(&joint).unwrap().abs() < 1e-10);
    }

    #[test]
    fn relative_entropy_cases() {
        let t = FockTruncation::auto(0.3);
        let th = thermal_state(0.3f64, t).unwrap();
        assert!(relative_entropy(&th, &th).unwrap().abs() < 1e-10);

        let mut one = vec![0.0; t.levels()];
        one[1] = 1.0;
        let fock1 = DensityMatrix::diagonal(&one).unwrap();
        let d = relative_entropy(&fock1, &th).unwrap();
        let w: Vec<f64> = crate::ion::thermal_populations(0.3, t).unwrap();
        // −ln p₁ of the renormalized weights; the untruncated closed form
        // −ln(n̄/(1+n̄)²) differs only by the tail mass.
        assert!((d + w[1].ln()).abs() < 1e-12);
        assert!((d + f64::ln(0.3 / 1.3f64.powi(2))).abs() < 1e-10);

        let ground = thermal_state(0.0, t).unwrap();
        assert!(matches!(
            relative_entropy(&fock1, &ground),
            Err(Error::DivergentRelativeEntropy { .. })
        ));
        assert_eq!(relative_entropy(&ground, &ground).unwrap(), 0.0);
    }

    #[test]
    fn relative_entropy_in_rotated_basis() {
        // Same pair of states conjugated by a common unitary.
        let a = DensityMatrix::diagonal(&[0.7, 0.2, 0.1]).unwrap();
        let b = DensityMatrix::diagonal(&[0.3, 0.3, 0.4]).unwrap();
        let h = ComplexMatrix::from_fn(3, 3, |i, j| {
            Complex::new((i + j) as f64 * 0.3, (i as f64 - j as f64) * 0.2)
        });
        let u = crate::linalg::expm_i_hermitian(&h, 1.0).unwrap();
        let rot = |r: &DensityMatrix<f64>| {
            DensityMatrix::new((&(&u * r.matrix()) * &u.adjoint()).hermitian_part()).unwrap()
        };
        let expected: f64 = [(0.7, 0.3), (0.2, 0.3), (0.1, 0.4)]
            .iter()
            .map(|(p, q): &(f64, f64)| p * (p / q).ln())
            .sum();
        let d = relative_entropy(&rot(&a), &rot(&b)).unwrap();
        assert!((d - expected).abs() < 1e-12);
    }

    #[test]
    fn reservoir_energy_cases() {
        let t = FockTruncation::auto(0.5);
        assert_eq!(reservoir_energy(&thermal_state(0.0f64, t).unwrap()), 0.0);
        assert!((reservoir_energy(&thermal_state(0.5f64, t).unwrap()) - 0.5).abs() < 1e-10);
    }

    #[test]
    fn temperature_mapping() {
        let t: f64 = temperature_from_nbar(0.074).unwrap();
        assert!((t - 0.3738).abs() < 1e-4);
        assert!((t * 48.5 - 18.1).abs() < 0.05);
        assert!(matches!(
            temperature_from_nbar(0.0f64),
            Err(Error::ZeroTemperature)
        ));
        assert!(temperature_from_nbar(-1.0f64).is_err());
        let mut last = 0.0;
        for &n in &[0.01, 0.1, 1.0, 10.0, 1e3] {
            let t = temperature_from_nbar(n).unwrap();
            assert!(t > last);
            last = t;
        }
        let tr = FockTruncation::auto(0.074);
        let w: Vec<f64> = crate::ion::thermal_populations(0.074, tr).unwrap();
        assert!(((w[0] / w[1]).ln() - 1.0 / temperature_from_nbar(0.074).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn unit_system() {
        let u = UnitSystem::from_trap_frequency(crate::ion::defaults::omega_z()).unwrap();
        assert!((u.q0_joule - 6.69e-28).abs() < 0.01e-28);
        assert!((u.t0_microkelvin() - 48.5).abs() < 0.05);
        assert!((u.t0_kelvin - u.q0_joule / K_B).abs() / u.t0_kelvin < 1e-6);
        let d = UnitSystem::display_reference();
        assert!((d.t0_kelvin - d.q0_joule / K_B).abs() / d.t0_kelvin < 1e-6);
    }

    #[test]
    fn ledger_identity_cases() {
        let t = FockTruncation::auto(0.074);
        let p = PulseParams::reference();
        let init = prepare_initial(&SystemPrep::from_theta(FRAC_PI_2).unwrap(), 0.074, t).unwrap();
        let same = landauer_ledger(&init, &init, 0.074).unwrap();
        assert!(same.delta_q.abs() < 1e-15);
        assert!(same.delta_s.abs() < 1e-15);
        assert!(same.mutual_info.abs() < 1e-12);
        assert!(same.relative_entropy.finite().unwrap().abs() < 1e-12);

        let fin = evolve(&init, &jc_block_unitary(Sideband::Red, &p, t)).unwrap();
        let l = landauer_ledger(&init, &fin, 0.074).unwrap();
        assert!(l.residual.unwrap().abs() < 1e-9);
        assert!(l.mutual_info >= -1e-10);
        let rhs = l.delta_s + l.mutual_info + l.relative_entropy.finite().unwrap();
        assert!((l.rhs.finite().unwrap() - rhs).abs() < 1e-12);
    }

    #[test]
    fn ledger_at_zero_temperature_flags_divergence() {
        let t = FockTruncation::auto(0.0);
        let p = PulseParams::reference();
        let init = prepare_initial(&SystemPrep::from_theta(FRAC_PI_2).unwrap(), 0.0, t).unwrap();
        let fin = evolve(&init, &jc_block_unitary(Sideband::Red, &p, t)).unwrap();
        let l = landauer_ledger(&init, &fin, 0.0).unwrap();
        assert!((l.delta_s - LN_2).abs() < 1e-10);
        assert!(l.mutual_info.abs() < 1e-10);
        assert!(l.lhs.is_divergent());
        assert!(l.relative_entropy.is_divergent());
        assert!(l.residual.is_none());
        assert_eq!(l.temperature, 0.0);

        let idle = landauer_ledger(&init, &init, 0.0).unwrap();
        assert_eq!(idle.lhs, Quantity::Finite(0.0));
        assert_eq!(idle.residual, Some(0.0));
    }

    #[test]
    fn ledger_serializes_divergence_as_text() {
        let q: Quantity<f64> = Quantity::Divergent;
        assert_eq!(serde_json::to_string(&q).unwrap(), "\"divergent\"");
        assert_eq!(
            serde_json::to_string(&Quantity::Finite(0.5)).unwrap(),
            "0.5"
        );
    }
}
