use num_complex::Complex;
use num_traits::Zero;

use super::density::DensityMatrix;
use super::eig::hermitian_eig;
use super::matrix::{cis, ComplexMatrix};
use crate::error::Result;
use crate::scalar::{re, Real};

/// `exp(-i h t)` through the eigendecomposition of `h` (ħ = 1).
pub fn expm_i_hermitian<T: Real>(h: &ComplexMatrix<T>, t: T) -> Result<ComplexMatrix<T>> {
    let spec = hermitian_eig(h)?;
    Ok(spec.map_to_matrix(|l| cis(-l * t)))
}

/// Natural log of `rho` on its support. Eigenvalues below the cutoff map
/// to zero, so `Tr[ρ log ρ]` carries the `0 log 0 = 0` convention.
pub fn entropy_log<T: Real>(rho: &DensityMatrix<T>) -> Result<ComplexMatrix<T>> {
    let spec = hermitian_eig(rho.matrix())?;
    let cutoff = T::lit(T::LOG_CUTOFF);
    Ok(spec.map_to_matrix(|l| {
        if l < cutoff {
            Complex::zero()
        } else {
            re(l.ln())
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::sigma_x;
    use std::f64::consts::{FRAC_PI_2, LN_2};

    #[test]
    fn zero_generator_gives_identity() {
        let u = expm_i_hermitian(&ComplexMatrix::<f64>::zeros(4, 4), 3.0).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn pauli_rotation_closed_form() {
        let h = sigma_x::<f64>().scale(re(FRAC_PI_2));
        let u = expm_i_hermitian(&h, 1.0).unwrap();
        let expected = sigma_x::<f64>().scale(Complex::new(0.0, -1.0));
        assert!(u.max_abs_diff(&expected) < 1e-10);
        assert!(u.unitary_deviation() < 1e-10);
    }

    #[test]
    fn log_of_mixed_and_pure_states() {
        let half = DensityMatrix::<f64>::maximally_mixed(2);
        let l = entropy_log(&half).unwrap();
        assert!(l.max_abs_diff(&ComplexMatrix::from_real_diag(&[-LN_2, -LN_2])) < 1e-15);

        let d = DensityMatrix::diagonal(&[0.9, 0.1]).unwrap();
        let l = entropy_log(&d).unwrap();
        let expected = ComplexMatrix::from_real_diag(&[0.9f64.ln(), 0.1f64.ln()]);
        assert!(l.max_abs_diff(&expected) < 1e-15);

        let pure = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let l = entropy_log(&pure).unwrap();
        assert!(l.max_abs() < 1e-15);
    }
}
