//! Small dense linear-algebra helpers on top of `nalgebra`.
//!
//! Computational basis convention: qubit 0 is the most significant bit and a
//! set bit means the qubit is excited, so `|[j]⟩` sits at index
//! `1 << (n − 1 − j)` and `|g…g⟩` at index 0.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Index of `|[j]⟩` in the `2ⁿ` computational basis.
pub fn excitation_index(n: usize, j: usize) -> usize {
    1 << (n - 1 - j)
}

/// Bit mask for qubit `j` on `n` qubits.
pub fn qubit_mask(n: usize, j: usize) -> usize {
    1 << (n - 1 - j)
}

/// Ascending eigenvalues of a Hermitian matrix. Only the lower triangle is
/// trusted, so the input is symmetrised first.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let sym = hermitian_part(m);
    let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigen-decomposition `(values, vectors)` of a Hermitian matrix.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(hermitian_part(m));
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Principal square root of a positive semidefinite matrix; small negative
/// eigenvalues from rounding are clamped to zero.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let roots = nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|v| Complex64::new(v.max(0.0).sqrt(), 0.0)),
    );
    &vecs * CMatrix::from_diagonal(&roots) * vecs.adjoint()
}

/// Largest absolute entry of `a − b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Numerical rank: singular values above `rel_tol` times the largest.
pub fn numerical_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_y_spectrum() {
        let i = Complex64::new(0.0, 1.0);
        let y = CMatrix::from_row_slice(2, 2, &[Complex64::new(0.0, 0.0), -i, i, Complex64::new(0.0, 0.0)]);
        let ev = hermitian_eigenvalues(&y);
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sqrt_squares_back() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(2.0, 0.0),
                Complex64::new(0.5, 0.5),
                Complex64::new(0.5, -0.5),
                Complex64::new(1.0, 0.0),
            ],
        );
        let s = psd_sqrt(&m);
        assert!(max_abs_diff(&(&s * &s), &m) < 1e-13);
    }

    #[test]
    fn rank_of_dependent_rows() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 1.0, 0.0]);
        assert_eq!(numerical_rank(&m, 1e-9), 2);
    }
}
