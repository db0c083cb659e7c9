//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Each rotation first removes the phase of the pivot `a_pq = r e^{iφ}`
//! and then applies the real symmetric Jacobi rotation, so the combined
//! transform on the `(p, q)` plane is
//!
//! ```text
//! G = [[ c,           s          ],
//!      [ -s e^{-iφ},  c e^{-iφ}  ]]
//! ```
//!
//! Pivots that are exactly zero cost only the scan, which keeps the
//! block-sparse states produced by sideband dynamics cheap to diagonalize.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{Real, C};

const MAX_SWEEPS: usize = 64;

/// Eigenvalues in ascending order with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct Spectrum<T: Real> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: ComplexMatrix<T>,
}

impl<T: Real> Spectrum<T> {
    /// `V f(Λ) V†` for a real function of the eigenvalues.
    pub fn map_to_matrix(&self, f: impl Fn(T) -> C<T>) -> ComplexMatrix<T> {
        let v = &self.eigenvectors;
        let n = v.rows();
        let fl: Vec<C<T>> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &w) in fl.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            for i in 0..n {
                let vik = v[(i, k)] * w;
                if vik.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        out
    }

    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.map_to_matrix(|l| Complex::new(l, T::zero()))
    }
}

fn check_hermitian<T: Real>(h: &ComplexMatrix<T>) -> Result<()> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let dev = h.hermitian_deviation();
    let tol = T::lit(T::SOLVER_HERMITIAN_TOL) * h.max_abs().max(T::one());
    if dev > tol {
        return Err(Error::NotHermitian {
            deviation: dev.as_f64(),
        });
    }
    Ok(())
}

/// Full eigendecomposition of a Hermitian matrix.
pub fn hermitian_eig<T: Real>(h: &ComplexMatrix<T>) -> Result<Spectrum<T>> {
    check_hermitian(h)?;
    let (vals, vecs) = jacobi(h, true)?;
    let vecs = vecs.expect("vectors requested");
    let n = vals.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).expect("finite eigenvalues"));
    let eigenvalues = order.iter().map(|&k| vals[k]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| vecs[i * n + order[j]]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigvals<T: Real>(h: &ComplexMatrix<T>) -> Result<Vec<T>> {
    check_hermitian(h)?;
    let (mut vals, _) = jacobi(h, false)?;
    vals.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(vals)
}

#[allow(clippy::type_complexity)]
fn jacobi<T: Real>(
    h: &ComplexMatrix<T>,
    want_vectors: bool,
) -> Result<(Vec<T>, Option<Vec<C<T>>>)> {
    let n = h.rows();
    let mut a: Vec<C<T>> = h.hermitian_part().as_slice().to_vec();
    for i in 0..n {
        a[i * n + i].im = T::zero();
    }
    let mut v: Option<Vec<C<T>>> = want_vectors.then(|| {
        let mut v = vec![C::zero(); n * n];
        for i in 0..n {
            v[i * n + i] = C::one();
        }
        v
    });

    let scale = a.iter().map(|x| x.norm_sqr()).sum::<T>().sqrt();
    let eps = T::epsilon();
    let tol = eps * scale;
    let skip = eps * eps * scale;
    let two = T::lit(2.0);

    let off_norm = |a: &[C<T>]| -> T {
        let mut s = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                s += a[p * n + q].norm_sqr();
            }
        }
        (two * s).sqrt()
    };

    let mut converged = scale.is_zero();
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        if off_norm(&a) <= tol {
            converged = true;
            break;
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let r = apq.norm();
                if r <= skip {
                    if !apq.is_zero() {
                        a[p * n + q] = C::zero();
                        a[q * n + p] = C::zero();
                    }
                    continue;
                }
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let phase_conj = (apq / r).conj();
                let theta = (aqq - app) / (two * r);
                let t = if theta.abs() > T::lit(1e100) {
                    T::one() / (two * theta)
                } else {
                    let t = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    if theta < T::zero() {
                        -t
                    } else {
                        t
                    }
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                let gqp = -phase_conj * s;
                let gqq = phase_conj * c;

                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    if akp.is_zero() && akq.is_zero() {
                        continue;
                    }
                    let nkp = akp * c + akq * gqp;
                    let nkq = akp * s + akq * gqq;
                    a[k * n + p] = nkp;
                    a[k * n + q] = nkq;
                    a[p * n + k] = nkp.conj();
                    a[q * n + k] = nkq.conj();
                }
                a[p * n + p] = Complex::new(app - t * r, T::zero());
                a[q * n + q] = Complex::new(aqq + t * r, T::zero());
                a[p * n + q] = C::zero();
                a[q * n + p] = C::zero();

                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = vkp * c + vkq * gqp;
                        v[k * n + q] = vkp * s + vkq * gqq;
                    }
                }
            }
        }
    }
    if !converged {
        let off = off_norm(&a);
        if off > tol {
            return Err(Error::EigNoConvergence {
                sweeps,
                off_norm: off.as_f64(),
            });
        }
    }
    let vals = (0..n).map(|i| a[i * n + i].re).collect();
    Ok((vals, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::sigma_x;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix<f64> {
        let m = ComplexMatrix::from_fn(n, n, |_, _| {
            Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        m.hermitian_part()
    }

    fn check_spectrum(h: &ComplexMatrix<f64>, s: &Spectrum<f64>, tol: f64) {
        let n = h.rows();
        let v = &s.eigenvectors;
        let gram = v.adjoint().matmul(v).unwrap();
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(n)) < tol);
        let err = (&s.reconstruct() - h).op_norm().unwrap();
        assert!(err < tol, "reconstruction error {err:e}");
        assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn diagonal_input() {
        let h = ComplexMatrix::from_real_diag(&[3.0, 1.0, 2.0]);
        let s = hermitian_eig(&h).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 2.0, 3.0]);
        // Columns are the permuted identity.
        assert_eq!(s.eigenvectors[(1, 0)], Complex::new(1.0, 0.0));
        assert_eq!(s.eigenvectors[(2, 1)], Complex::new(1.0, 0.0));
        assert_eq!(s.eigenvectors[(0, 2)], Complex::new(1.0, 0.0));
    }

    #[test]
    fn pauli_and_jc_block() {
        let s = hermitian_eig(&sigma_x::<f64>()).unwrap();
        assert!((s.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((s.eigenvalues[1] - 1.0).abs() < 1e-15);

        let g = 0.37;
        let mut jc = ComplexMatrix::<f64>::zeros(2, 2);
        jc[(0, 1)] = Complex::new(g, 0.0);
        jc[(1, 0)] = Complex::new(g, 0.0);
        let s = hermitian_eig(&jc).unwrap();
        assert!((s.eigenvalues[0] + g).abs() < 1e-15);
        assert!((s.eigenvalues[1] - g).abs() < 1e-15);
    }

    #[test]
    fn complex_phases() {
        let mut h = ComplexMatrix::<f64>::zeros(2, 2);
        h[(0, 0)] = Complex::new(0.3, 0.0);
        h[(1, 1)] = Complex::new(-1.1, 0.0);
        h[(0, 1)] = Complex::new(0.2, 0.7);
        h[(1, 0)] = Complex::new(0.2, -0.7);
        let s = hermitian_eig(&h).unwrap();
        check_spectrum(&h, &s, 1e-13);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut h = ComplexMatrix::<f64>::identity(2);
        h[(0, 1)] = Complex::new(1.0, 0.0);
        assert!(matches!(hermitian_eig(&h), Err(Error::NotHermitian { .. })));
        assert!(hermitian_eig(&ComplexMatrix::<f64>::zeros(2, 3)).is_err());
    }

    #[test]
    fn random_matrices_up_to_128() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &n in &[1, 2, 3, 5, 17, 64, 128] {
            let h = random_hermitian(n, &mut rng);
            let s = hermitian_eig(&h).unwrap();
            check_spectrum(&h, &s, 1e-10);
            let vals = hermitian_eigvals(&h).unwrap();
            for (a, b) in vals.iter().zip(&s.eigenvalues) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn degenerate_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let q = hermitian_eig(&random_hermitian(6, &mut rng))
            .unwrap()
            .eigenvectors;
        let d = ComplexMatrix::from_real_diag(&[1.0, 1.0, 1.0, -2.0, -2.0, 0.0]);
        let h = (&(&q * &d) * &q.adjoint()).hermitian_part();
        let s = hermitian_eig(&h).unwrap();
        check_spectrum(&h, &s, 1e-12);
    }

    #[test]
    fn single_precision() {
        let mut h = ComplexMatrix::<f32>::zeros(3, 3);
        h[(0, 0)] = Complex::new(1.0, 0.0);
        h[(0, 2)] = Complex::new(0.5, 0.5);
        h[(2, 0)] = Complex::new(0.5, -0.5);
        h[(1, 1)] = Complex::new(-0.25, 0.0);
        let s = hermitian_eig(&h).unwrap();
        let err = (&s.reconstruct() - &h).max_abs();
        assert!(err < 1e-5);
    }
}
