use num_traits::Zero;

use super::eig::hermitian_eigvals;
use super::matrix::{kron, ComplexMatrix};
use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    matrix: ComplexMatrix<T>,
}

/// Which factor of a bipartite space to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    A,
    B,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity, unit trace, and positivity.
    pub fn new(matrix: ComplexMatrix<T>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidDensity(format!(
                "not square ({}x{})",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let dev = matrix.hermitian_deviation();
        if dev > T::lit(T::HERMITIAN_TOL) {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian, max |A - A†| = {:e}",
                dev.as_f64()
            )));
        }
        let tr = matrix.trace();
        if (tr.re - T::one()).abs() > T::lit(T::TRACE_TOL) || tr.im.abs() > T::lit(T::TRACE_TOL) {
            return Err(Error::InvalidDensity(format!("trace is {tr}, expected 1")));
        }
        let matrix = matrix.hermitian_part();
        let min = hermitian_eigvals(&matrix)?[0];
        if min < -T::lit(T::PSD_TOL) {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {:e}",
                min.as_f64()
            )));
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix that is valid by construction (unitary conjugation,
    /// partial trace, or product of valid states). Hermiticity is restored
    /// exactly; nothing else is checked.
    pub(crate) fn from_valid(matrix: ComplexMatrix<T>) -> Self {
        debug_assert!(matrix.is_square());
        Self {
            matrix: matrix.hermitian_part(),
        }
    }

    /// Diagonal state with the given (nonnegative, normalized) weights.
    pub fn diagonal(weights: &[T]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDensity("empty weight vector".into()));
        }
        if let Some(w) = weights.iter().find(|w| **w < T::zero() || !w.is_finite()) {
            return Err(Error::InvalidDensity(format!(
                "weight {w} is not a probability"
            )));
        }
        let sum: T = weights.iter().copied().sum();
        if (sum - T::one()).abs() > T::lit(T::TRACE_TOL) {
            return Err(Error::InvalidDensity(format!(
                "weights sum to {sum}, expected 1"
            )));
        }
        Ok(Self {
            matrix: ComplexMatrix::from_real_diag(weights),
        })
    }

    /// Pure state `|ψ⟩⟨ψ|`; the vector is normalized first.
    pub fn pure(psi: &[C<T>]) -> Result<Self> {
        let norm = psi.iter().map(|x| x.norm_sqr()).sum::<T>().sqrt();
        if psi.is_empty() || norm.is_zero() {
            return Err(Error::InvalidDensity("zero state vector".into()));
        }
        let psi: Vec<C<T>> = psi.iter().map(|x| x / norm).collect();
        Ok(Self::from_valid(ComplexMatrix::outer(&psi)))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let w = T::one() / T::from_usize(dim).expect("dimension");
        Self {
            matrix: ComplexMatrix::from_real_diag(&vec![w; dim]),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    /// Real diagonal (populations in the computational basis).
    pub fn populations(&self) -> Vec<T> {
        self.matrix.diag().into_iter().map(|z| z.re).collect()
    }

    pub fn purity(&self) -> T {
        // Tr ρ² = Σ |ρ_ij|² for Hermitian ρ.
        self.matrix.as_slice().iter().map(|x| x.norm_sqr()).sum()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self::from_valid(kron(&self.matrix, &other.matrix))
    }

    /// Reduced state on one factor of a `dim_a × dim_b` bipartition with
    /// index `i = a·dim_b + b`.
    pub fn partial_trace(&self, dim_a: usize, dim_b: usize, keep: Keep) -> Result<Self> {
        partial_trace(self, dim_a, dim_b, keep)
    }
}

/// Partial trace over the discarded factor.
pub fn partial_trace<T: Real>(
    rho: &DensityMatrix<T>,
    dim_a: usize,
    dim_b: usize,
    keep: Keep,
) -> Result<DensityMatrix<T>> {
    if dim_a == 0 || dim_b == 0 || rho.dim() != dim_a * dim_b {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} is not {dim_a}x{dim_b}",
            rho.dim()
        )));
    }
    let m = rho.matrix();
    let out = match keep {
        Keep::A => ComplexMatrix::from_fn(dim_a, dim_a, |i, j| {
            (0..dim_b).fold(C::zero(), |acc, k| acc + m[(i * dim_b + k, j * dim_b + k)])
        }),
        Keep::B => ComplexMatrix::from_fn(dim_b, dim_b, |i, j| {
            (0..dim_a).fold(C::zero(), |acc, k| acc + m[(k * dim_b + i, k * dim_b + j)])
        }),
    };
    Ok(DensityMatrix::from_valid(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_pure(n: usize, rng: &mut ChaCha8Rng) -> (Vec<C<f64>>, DensityMatrix<f64>) {
        let psi: Vec<C<f64>> = (0..n)
            .map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let norm = psi.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let psi: Vec<_> = psi.iter().map(|x| x / norm).collect();
        let rho = DensityMatrix::pure(&psi).unwrap();
        (psi, rho)
    }

    #[test]
    fn validation() {
        let bad_trace = ComplexMatrix::<f64>::from_real_diag(&[0.5, 0.4]);
        assert!(DensityMatrix::new(bad_trace).is_err());
        let negative = ComplexMatrix::<f64>::from_real_diag(&[1.5, -0.5]);
        assert!(DensityMatrix::new(negative).is_err());
        let mut non_herm = ComplexMatrix::<f64>::from_real_diag(&[0.5, 0.5]);
        non_herm[(0, 1)] = Complex::new(0.1, 0.0);
        assert!(DensityMatrix::new(non_herm).is_err());
        assert!(DensityMatrix::<f64>::diagonal(&[0.5, 0.6]).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::<f64>::from_real_diag(&[0.25, 0.75])).is_ok());
    }

    #[test]
    fn product_state_factors_recovered() {
        let a = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        let b = DensityMatrix::diagonal(&[0.2, 0.5, 0.3]).unwrap();
        let ab = a.tensor(&b);
        let ra = ab.partial_trace(2, 3, Keep::A).unwrap();
        let rb = ab.partial_trace(2, 3, Keep::B).unwrap();
        assert!(ra.matrix().max_abs_diff(a.matrix()) < 1e-12);
        assert!(rb.matrix().max_abs_diff(b.matrix()) < 1e-12);
    }

    #[test]
    fn bell_state_reduces_to_maximally_mixed() {
        // (|↓0⟩ + |↑1⟩)/√2 with index = qubit·2 + fock.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = Complex::new(0.0, 0.0);
        let psi = vec![Complex::new(s, 0.0), z, z, Complex::new(s, 0.0)];
        let rho = DensityMatrix::pure(&psi).unwrap();
        let ra = rho.partial_trace(2, 2, Keep::A).unwrap();
        assert!(
            ra.matrix()
                .max_abs_diff(DensityMatrix::maximally_mixed(2).matrix())
                < 1e-15
        );
    }

    #[test]
    fn random_pure_product_keep_b() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let (psi_a, _) = random_pure(2, &mut rng);
            let (psi_b, rho_b) = random_pure(3, &mut rng);
            // Build the joint vector directly, independent of `kron`.
            let mut joint = Vec::new();
            for a in &psi_a {
                for b in &psi_b {
                    joint.push(a * b);
                }
            }
            let rho = DensityMatrix::pure(&joint).unwrap();
            let rb = rho.partial_trace(2, 3, Keep::B).unwrap();
            assert!(rb.matrix().max_abs_diff(rho_b.matrix()) < 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let rho = DensityMatrix::<f64>::maximally_mixed(6);
        assert!(matches!(
            rho.partial_trace(2, 2, Keep::A),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
