//! Phase-space engine: Gaussian states, symplectic transforms, Gaussian
//! channels, heterodyne measurement and moment diagnostics.

mod channel;
mod diagnostics;
mod heterodyne;
mod state;
mod symplectic;

pub use channel::{amplify_by_dilation, GaussianChannel};
pub use diagnostics::{
    gaussian_fidelity_single_mode, min_hermitian_eigenvalue, ppt_min_symplectic_eigenvalue,
    symplectic_eigenvalues,
};
pub use heterodyne::{heterodyne_condition, heterodyne_sample, HeterodyneOutcome};
pub use state::{coherent_state, displaced_thermal, thermal_state, vacuum, GaussianState};
pub use symplectic::SymplecticTransform;

use nalgebra::DMatrix;

/// Vacuum variance of a single quadrature.
pub const VACUUM_VARIANCE: f64 = 0.25;

/// Tolerance for algebraic identities.
pub const ALGEBRAIC_TOL: f64 = 1e-12;
/// Tolerance for eigenvalue-based positivity checks.
pub const PSD_TOL: f64 = 1e-10;

/// Symplectic form `[[0, I], [−I, 0]]` for `n` modes in block order.
pub fn omega(n: usize) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        w[(k, n + k)] = 1.0;
        w[(n + k, k)] = -1.0;
    }
    w
}

/// Phase-space row/column indices of `modes` within an `n`-mode vector:
/// all x components first, then all y components.
pub(crate) fn block_indices(modes: &[usize], n: usize) -> Vec<usize> {
    modes
        .iter()
        .copied()
        .chain(modes.iter().map(|&m| n + m))
        .collect()
}

pub(crate) fn check_modes(modes: &[usize], n_modes: usize) -> crate::Result<()> {
    for (i, &m) in modes.iter().enumerate() {
        if m >= n_modes {
            return Err(crate::Error::ModeOutOfRange { mode: m, n_modes });
        }
        if modes[..i].contains(&m) {
            return Err(crate::Error::DuplicateMode(m));
        }
    }
    Ok(())
}

/// Largest absolute element of `a - b`.
pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
