//! Dense complex linear algebra: vectorization, realignment, Kronecker products,
//! partial trace/transpose, Jacobi SVD and Hermitian eigensolver.

mod decomp;
mod density;
mod matrix;

pub use decomp::{
    hermitian_eigen, hermitian_eigenvalues, schmidt_coefficients, singular_values, trace_norm,
    Spectrum, HERMITIAN_TOL,
};
pub use density::{
    partial_trace_raw, partial_transpose_raw, permute_raw, pure_state, validate_density,
    DensityMatrix, PSD_TOL, TRACE_TOL,
};
pub(crate) use density::{compose, digits};
pub use matrix::{inner, kron, kron_vec, realign, unvectorize, vec_norm, vectorize, ComplexMatrix};
