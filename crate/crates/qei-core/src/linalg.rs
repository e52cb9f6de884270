//! Dense complex linear algebra helpers on top of nalgebra.
//!
//! Matrix functions of hermitian matrices go through the eigendecomposition;
//! this covers every exponential the crate needs (`e^{iA}`, `e^{iHs}`,
//! `e^{−βH}`) and the polar projection onto the unitary group.

use alloc::vec::Vec;
use nalgebra::SymmetricEigen;
use num_traits::Float;

use crate::{CMat, C64};

/// Eigenvalues (ascending) and column eigenvectors of a hermitian matrix.
pub fn hermitian_eig(a: &CMat) -> (Vec<f64>, CMat) {
    let sym = hermitian_part(a);
    let eig = SymmetricEigen::new(sym);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// `f(A)` for hermitian `A` and a scalar function of the eigenvalues.
pub fn hermitian_function(a: &CMat, f: impl Fn(f64) -> C64) -> CMat {
    let (values, v) = hermitian_eig(a);
    let mut scaled = v.clone();
    for (c, &lam) in values.iter().enumerate() {
        let fl = f(lam);
        for r in 0..scaled.nrows() {
            scaled[(r, c)] *= fl;
        }
    }
    scaled * v.adjoint()
}

/// `e^{iA}` for hermitian `A`.
pub fn expi_hermitian(a: &CMat) -> CMat {
    hermitian_function(a, |lam| C64::from_polar(1.0, lam))
}

/// `(A + A†)/2`.
pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()) * C64::new(0.5, 0.0)
}

/// Frobenius norm of `A − A†`.
pub fn hermiticity_defect(a: &CMat) -> f64 {
    (a - a.adjoint()).norm()
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Spectral norm `‖A‖₂`.
pub fn operator_norm(a: &CMat) -> f64 {
    let gram = a.adjoint() * a;
    let (values, _) = hermitian_eig(&gram);
    values.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// `‖U†U − 𝟙‖` in the Frobenius norm.
pub fn unitarity_defect(u: &CMat) -> f64 {
    let n = u.nrows();
    (u.adjoint() * u - CMat::identity(n, n)).norm()
}

/// Nearest unitary `W = U (U†U)^{−1/2}` and the Frobenius distance `‖W − U‖`.
pub fn polar_projection(u: &CMat) -> (CMat, f64) {
    let gram = u.adjoint() * u;
    let inv_sqrt = hermitian_function(&gram, |lam| C64::new(1.0 / lam.max(1e-300).sqrt(), 0.0));
    let w = u * inv_sqrt;
    let dist = (&w - u).norm();
    (w, dist)
}

/// `e^{iHs} A e^{−iHs}` for diagonal `H = diag(energies)`.
pub fn heisenberg_diag(energies: &[f64], a: &CMat, s: f64) -> CMat {
    CMat::from_fn(a.nrows(), a.ncols(), |r, c| {
        a[(r, c)] * C64::from_polar(1.0, (energies[r] - energies[c]) * s)
    })
}

/// Trace of `A B` without forming the product.
pub fn trace_product(a: &CMat, b: &CMat) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CMat {
        CMat::from_row_slice(
            3,
            3,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.2, 0.3),
                C64::new(0.0, -0.5),
                C64::new(0.2, -0.3),
                C64::new(-0.4, 0.0),
                C64::new(0.7, 0.1),
                C64::new(0.0, 0.5),
                C64::new(0.7, -0.1),
                C64::new(2.0, 0.0),
            ],
        )
    }

    #[test]
    fn eigendecomposition_reconstructs() {
        let a = sample();
        let (vals, v) = hermitian_eig(&a);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let d = CMat::from_fn(3, 3, |r, c| if r == c { C64::new(vals[r], 0.0) } else { C64::new(0.0, 0.0) });
        assert!((&v * d * v.adjoint() - &a).norm() < 1e-12);
    }

    #[test]
    fn exponential_is_unitary_and_matches_series() {
        let a = sample() * C64::new(0.3, 0.0);
        let u = expi_hermitian(&a);
        assert!(unitarity_defect(&u) < 1e-13);
        let mut series = CMat::identity(3, 3);
        let mut term = CMat::identity(3, 3);
        for k in 1..40 {
            term = &term * &a * C64::new(0.0, 1.0 / k as f64);
            series += &term;
        }
        assert!((u - series).norm() < 1e-13);
    }

    #[test]
    fn polar_projection_restores_unitarity() {
        let u = expi_hermitian(&sample());
        let perturbed = &u + CMat::from_element(3, 3, C64::new(1e-7, 0.0));
        let (w, dist) = polar_projection(&perturbed);
        assert!(unitarity_defect(&w) < 1e-13);
        assert!(dist < 1e-6);
    }

    #[test]
    fn operator_norm_of_diagonal() {
        let d = CMat::from_diagonal(&nalgebra::DVector::from_vec(alloc::vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, -3.0),
        ]));
        assert!((operator_norm(&d) - 3.0).abs() < 1e-12);
    }
}
