//! Scalar abstraction shared by the linear algebra, ion model, and
//! information functionals.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point scalar the dense kernels are generic over.
///
/// The associated tolerances are the validation thresholds used when a
/// value of this precision is checked at an API boundary. The `f64`
/// values are the production thresholds; `f32` gets looser ones scaled to
/// its epsilon.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + serde::Serialize
    + Send
    + Sync
    + 'static
{
    /// Max elementwise |A - A†| accepted for a density matrix.
    const HERMITIAN_TOL: f64;
    /// Max |A - A†| accepted as input to a Hermitian solver.
    const SOLVER_HERMITIAN_TOL: f64;
    /// Max |Tr ρ - 1|.
    const TRACE_TOL: f64;
    /// Most negative eigenvalue accepted for a density matrix.
    const PSD_TOL: f64;
    /// Eigenvalues below this are exact zeros in logs and entropies.
    const LOG_CUTOFF: f64;
    /// Weight on a cutoff-zero eigenvector beyond which a relative entropy diverges.
    const SUPPORT_TOL: f64;
    /// Max elementwise |U†U - I| accepted as unitary.
    const UNITARY_TOL: f64;

    /// Lossless-enough conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Real for f64 {
    const HERMITIAN_TOL: f64 = 1e-12;
    const SOLVER_HERMITIAN_TOL: f64 = 1e-10;
    const TRACE_TOL: f64 = 1e-10;
    const PSD_TOL: f64 = 1e-10;
    const LOG_CUTOFF: f64 = 1e-14;
    const SUPPORT_TOL: f64 = 1e-12;
    const UNITARY_TOL: f64 = 1e-10;
}

impl Real for f32 {
    const HERMITIAN_TOL: f64 = 1e-5;
    const SOLVER_HERMITIAN_TOL: f64 = 1e-5;
    const TRACE_TOL: f64 = 1e-4;
    const PSD_TOL: f64 = 1e-4;
    const LOG_CUTOFF: f64 = 1e-7;
    const SUPPORT_TOL: f64 = 1e-5;
    const UNITARY_TOL: f64 = 1e-4;
}

pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn re<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

/// `x ln x` with the `0 ln 0 = 0` convention below the cutoff.
#[inline]
pub(crate) fn xlogx<T: Real>(x: T) -> T {
    if x < T::lit(T::LOG_CUTOFF) {
        T::zero()
    } else {
        x * x.ln()
    }
}
