//! Dense complex linear algebra sized for joint qubit–oscillator spaces
//! (dimension up to a few hundred).

pub mod density;
pub mod eig;
pub mod funcs;
pub mod matrix;

pub use density::{partial_trace, DensityMatrix, Keep};
pub use eig::{hermitian_eig, hermitian_eigvals, Spectrum};
pub use funcs::{entropy_log, expm_i_hermitian};
pub use matrix::{kron, sigma_x, ComplexMatrix};
