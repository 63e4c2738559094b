//! Shared numeric types and LAPACK-backed Hermitian eigendecomposition.
//!
//! Operators are stored as `nalgebra` dense matrices; eigensolves go through
//! LAPACK (`zheev` family) which is substantially faster than pure-Rust
//! tridiagonalization at the matrix sizes the spectrum experiments use.

use nalgebra::DMatrix;
use ndarray::Array2;
use ndarray_linalg::{EigValshInto, EighInto, UPLO};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = nalgebra::DVector<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn to_ndarray(m: &CMat) -> Array2<C64> {
    let n = m.nrows();
    Array2::from_shape_fn((n, n), |(i, j)| m[(i, j)])
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 {
        return vec![];
    }
    to_ndarray(m)
        .eigvalsh_into(UPLO::Lower)
        .expect("LAPACK eigvalsh failed on Hermitian input")
        .to_vec()
}

/// Full eigendecomposition of a Hermitian matrix: (ascending eigenvalues,
/// unitary whose columns are the matching eigenvectors).
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    let (vals, vecs) = to_ndarray(m)
        .eigh_into(UPLO::Lower)
        .expect("LAPACK eigh failed on Hermitian input");
    // the row-major/column-major round trip through LAPACK hands back the
    // eigenvectors of the transpose, i.e. conjugated
    let u = CMat::from_fn(n, n, |i, j| vecs[(i, j)].conj());
    (vals.to_vec(), u)
}

/// Apply a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_function(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, u) = hermitian_eigen(m);
    let n = m.nrows();
    let d = CMat::from_fn(n, n, |i, j| if i == j { cr(f(vals[i])) } else { cr(0.0) });
    &u * d * u.adjoint()
}
