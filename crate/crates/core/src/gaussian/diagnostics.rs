use nalgebra::{DMatrix, Matrix2, SymmetricEigen, Vector2};
use num_complex::Complex64;

use super::{check_modes, omega, GaussianState};
use crate::error::{Error, Result};

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_hermitian_eigenvalue(h: &DMatrix<Complex64>) -> f64 {
    SymmetricEigen::new(h.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Symplectic eigenvalues of a positive-definite covariance matrix, ascending.
/// In this convention the vacuum has every symplectic eigenvalue equal to 1/4.
///
/// Computed from the Hermitian matrix `i·V^{1/2} Ω V^{1/2}`, whose spectrum is
/// `±ν_k`.
pub fn symplectic_eigenvalues(cov: &DMatrix<f64>) -> Vec<f64> {
    let n = cov.nrows() / 2;
    let eig = SymmetricEigen::new(cov.clone());
    let sqrt_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0).sqrt()));
    let root = &eig.eigenvectors * sqrt_diag * eig.eigenvectors.transpose();
    let a = &root * omega(n) * &root;
    let h = a.map(|v| Complex64::new(0.0, v));
    let mut nu: Vec<f64> = SymmetricEigen::new(h)
        .eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .copied()
        .collect();
    // a zero eigenvalue pair (singular cov) may split around 0
    while nu.len() < n {
        nu.push(0.0);
    }
    nu.sort_by(|a, b| a.partial_cmp(b).unwrap());
    nu.truncate(n);
    nu
}

/// Smallest symplectic eigenvalue of the covariance matrix after partial
/// transposition of `partition` (the y quadratures of those modes change
/// sign). A value `>= 1/4` certifies that the state is PPT across the cut.
pub fn ppt_min_symplectic_eigenvalue(state: &GaussianState, partition: &[usize]) -> Result<f64> {
    let n = state.n_modes();
    if partition.is_empty() || partition.len() >= n {
        return Err(Error::ImproperPartition);
    }
    check_modes(partition, n)?;
    let mut sign = vec![1.0; 2 * n];
    for &m in partition {
        sign[n + m] = -1.0;
    }
    let cov = DMatrix::from_fn(2 * n, 2 * n, |r, c| sign[r] * sign[c] * state.cov()[(r, c)]);
    Ok(symplectic_eigenvalues(&cov)[0])
}

/// Uhlmann fidelity between two single-mode Gaussian states.
pub fn gaussian_fidelity_single_mode(a: &GaussianState, b: &GaussianState) -> Result<f64> {
    for s in [a, b] {
        if s.n_modes() != 1 {
            return Err(Error::ModeCountMismatch {
                expected: 1,
                actual: s.n_modes(),
            });
        }
    }
    // rescale to the vacuum-covariance-I convention of the closed form
    let sigma = |s: &GaussianState| {
        let v = s.mode_cov(0).expect("single mode");
        Matrix2::new(v[0][0], v[0][1], v[1][0], v[1][1]) * 4.0
    };
    let (s1, s2) = (sigma(a), sigma(b));
    let sum = s1 + s2;
    let u = Vector2::new(a.mean()[0] - b.mean()[0], a.mean()[1] - b.mean()[1]) * 2.0;
    let big_delta = sum.determinant();
    let small_delta = ((s1.determinant() - 1.0) * (s2.determinant() - 1.0)).max(0.0);
    let inv = sum.try_inverse().expect("sum of covariances is positive definite");
    let expo = (-0.5 * (u.transpose() * inv * u)[(0, 0)]).exp();
    let f = 2.0 / ((big_delta + small_delta).sqrt() - small_delta.sqrt()) * expo;
    Ok(f.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{coherent_state, displaced_thermal, thermal_state, vacuum, SymplecticTransform};
    use approx::assert_abs_diff_eq;

    #[test]
    fn thermal_symplectic_spectrum() {
        let s = thermal_state(0.5).unwrap().tensor(&thermal_state(2.0).unwrap());
        let nu = symplectic_eigenvalues(s.cov());
        assert_abs_diff_eq!(nu[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(nu[1], 1.25, epsilon = 1e-12);
    }

    #[test]
    fn ppt_of_products_is_min_thermal() {
        let s = thermal_state(0.5)
            .unwrap()
            .tensor(&thermal_state(2.0).unwrap())
            .tensor(&thermal_state(1.0).unwrap());
        for part in [vec![0], vec![1], vec![2], vec![0, 2]] {
            let v = ppt_min_symplectic_eigenvalue(&s, &part).unwrap();
            assert_abs_diff_eq!(v, (2.0 * 0.5 + 1.0) / 4.0, epsilon = 1e-12);
        }
        assert!(ppt_min_symplectic_eigenvalue(&s, &[]).is_err());
        assert!(ppt_min_symplectic_eigenvalue(&s, &[0, 1, 2]).is_err());
        assert!(ppt_min_symplectic_eigenvalue(&s, &[5]).is_err());
    }

    #[test]
    fn squeezed_vacuum_is_npt() {
        let r = 1.0f64;
        let s = SymplecticTransform::two_mode_squeezer(r).unwrap().apply(&vacuum(2), &[0, 1]).unwrap();
        let v = ppt_min_symplectic_eigenvalue(&s, &[0]).unwrap();
        assert_abs_diff_eq!(v, (-2.0 * r).exp() / 4.0, epsilon = 1e-12);
        assert!(v < 0.25);
    }

    #[test]
    fn fidelity_cases() {
        let s = displaced_thermal(0.8, Complex64::new(0.3, -0.2)).unwrap();
        assert_abs_diff_eq!(gaussian_fidelity_single_mode(&s, &s).unwrap(), 1.0, epsilon = 1e-12);
        for &n in &[0.0, 0.5, 1.0, 3.0] {
            let f = gaussian_fidelity_single_mode(&vacuum(1), &thermal_state(n).unwrap()).unwrap();
            assert_abs_diff_eq!(f, 1.0 / (n + 1.0), epsilon = 1e-12);
        }
        let alpha = Complex64::new(0.9, 0.4);
        let clone = displaced_thermal(0.5, alpha).unwrap();
        let f = gaussian_fidelity_single_mode(&coherent_state(alpha), &clone).unwrap();
        assert_abs_diff_eq!(f, 2.0 / 3.0, epsilon = 1e-12);
        // coherent overlap e^{−|α−β|²}
        let f = gaussian_fidelity_single_mode(&coherent_state(alpha), &vacuum(1)).unwrap();
        assert_abs_diff_eq!(f, (-alpha.norm_sqr()).exp(), epsilon = 1e-12);
        assert!(gaussian_fidelity_single_mode(&vacuum(2), &vacuum(1)).is_err());
    }
}
