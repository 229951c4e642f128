//! Small dense Hermitian helpers built on nalgebra's eigensolver.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted in
/// descending order. Columns of the returned matrix are the eigenvectors.
pub fn hermitian_eigen(h: &DMatrix<Complex64>) -> (DVector<f64>, DMatrix<Complex64>) {
    let sym = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let n = h.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = DVector::from_fn(n, |i, _| eig.eigenvalues[order[i]]);
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// `f(H)` for Hermitian `H` and a complex scalar function of the spectrum.
pub fn hermitian_function(
    h: &DMatrix<Complex64>,
    f: impl Fn(f64) -> Complex64,
) -> DMatrix<Complex64> {
    let (values, vectors) = hermitian_eigen(h);
    let n = h.nrows();
    let mut scaled = vectors.clone();
    for c in 0..n {
        let fc = f(values[c]);
        for r in 0..n {
            scaled[(r, c)] *= fc;
        }
    }
    scaled * vectors.adjoint()
}

/// `exp(omega)` for skew-Hermitian `omega`; the result is unitary to
/// round-off because it is assembled from the spectrum of `i * omega`.
pub fn expm_skew_hermitian(omega: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    // omega = -i H with H = i omega Hermitian, so exp(omega) = exp(-i H).
    let h = omega * Complex64::new(0.0, 1.0);
    hermitian_function(&h, |l| Complex64::new(0.0, -l).exp())
}

/// `G^{-1/2}` for Hermitian positive definite `G`. Fails when the smallest
/// eigenvalue drops below `pivot_tol`.
pub fn inv_sqrt_hermitian(g: &DMatrix<Complex64>, pivot_tol: f64) -> Result<DMatrix<Complex64>> {
    let (values, _) = hermitian_eigen(g);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min > pivot_tol) {
        return Err(Error::Domain(format!(
            "Gram matrix not positive definite (min eigenvalue {min:e})"
        )));
    }
    Ok(hermitian_function(g, |l| Complex64::new(l.powf(-0.5), 0.0)))
}

/// Frobenius norm of `U* U - I`.
pub fn unitary_defect(u: &DMatrix<Complex64>) -> f64 {
    let n = u.nrows();
    (u.adjoint() * u - DMatrix::<Complex64>::identity(n, n)).norm()
}
