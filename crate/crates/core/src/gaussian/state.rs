use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{block_indices, check_modes, min_hermitian_eigenvalue, omega, PSD_TOL};
use crate::error::{domain, Error, Result};

/// A Gaussian state of `n` bosonic modes, described by its first and second
/// moments in block order.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Validates shape, finiteness, symmetry and the uncertainty relation.
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = mean.len();
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::Dimension(format!(
                "mean vector length {dim} is not a positive even number"
            )));
        }
        if cov.shape() != (dim, dim) {
            return Err(Error::Dimension(format!(
                "covariance is {:?}, expected {dim}x{dim}",
                cov.shape()
            )));
        }
        if mean.iter().chain(cov.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Unphysical {
                what: "state",
                detail: "non-finite moment".into(),
            });
        }
        let asym = super::max_abs_diff(&cov, &cov.transpose());
        if asym > super::ALGEBRAIC_TOL {
            return Err(Error::Unphysical {
                what: "state",
                detail: format!("covariance asymmetric by {asym:e}"),
            });
        }
        let state = Self { mean, cov };
        let lam = state.uncertainty_min_eigenvalue();
        if lam < -PSD_TOL {
            return Err(Error::Unphysical {
                what: "state",
                detail: format!("cov + iΩ/4 has eigenvalue {lam:e}"),
            });
        }
        Ok(state)
    }

    pub(crate) fn from_parts(mean: DVector<f64>, cov: DMatrix<f64>) -> Self {
        debug_assert_eq!(cov.nrows(), mean.len());
        Self { mean, cov }
    }

    pub fn n_modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        check_modes(&[mode], self.n_modes())
    }

    /// `⟨a_mode⟩ = x̄ + iȳ`.
    pub fn mean_amplitude(&self, mode: usize) -> Result<Complex64> {
        self.check_mode(mode)?;
        let n = self.n_modes();
        Ok(Complex64::new(self.mean[mode], self.mean[n + mode]))
    }

    /// Shift the given mode by `alpha` in phase space.
    pub fn displace(&self, mode: usize, alpha: Complex64) -> Result<Self> {
        self.check_mode(mode)?;
        let n = self.n_modes();
        let mut out = self.clone();
        out.mean[mode] += alpha.re;
        out.mean[n + mode] += alpha.im;
        Ok(out)
    }

    /// Shift every mode by the same amplitude.
    pub fn displace_all(&self, alpha: Complex64) -> Self {
        let n = self.n_modes();
        let mut out = self.clone();
        for k in 0..n {
            out.mean[k] += alpha.re;
            out.mean[n + k] += alpha.im;
        }
        out
    }

    /// Tensor product; the modes of `other` are appended after those of `self`.
    pub fn tensor(&self, other: &GaussianState) -> GaussianState {
        let (na, nb) = (self.n_modes(), other.n_modes());
        let n = na + nb;
        let place = |k: usize, from_a: bool| -> usize {
            // phase-space index in the joint state of local index k
            let (local_n, offset) = if from_a { (na, 0) } else { (nb, na) };
            if k < local_n {
                offset + k
            } else {
                n + offset + (k - local_n)
            }
        };
        let mut mean = DVector::zeros(2 * n);
        let mut cov = DMatrix::zeros(2 * n, 2 * n);
        for (src, from_a) in [(self, true), (other, false)] {
            let d = src.mean.len();
            for i in 0..d {
                mean[place(i, from_a)] = src.mean[i];
                for j in 0..d {
                    cov[(place(i, from_a), place(j, from_a))] = src.cov[(i, j)];
                }
            }
        }
        GaussianState::from_parts(mean, cov)
    }

    /// Reduced state on `keep`, in the order given.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<GaussianState> {
        if keep.is_empty() {
            return Err(Error::ImproperPartition);
        }
        check_modes(keep, self.n_modes())?;
        let idx = block_indices(keep, self.n_modes());
        let mean = DVector::from_iterator(idx.len(), idx.iter().map(|&i| self.mean[i]));
        let cov = DMatrix::from_fn(idx.len(), idx.len(), |r, c| self.cov[(idx[r], idx[c])]);
        Ok(GaussianState::from_parts(mean, cov))
    }

    /// 2×2 covariance block of one mode, `[[Vxx, Vxy], [Vxy, Vyy]]`.
    pub fn mode_cov(&self, mode: usize) -> Result<[[f64; 2]; 2]> {
        self.check_mode(mode)?;
        let n = self.n_modes();
        let (x, y) = (mode, n + mode);
        Ok([
            [self.cov[(x, x)], self.cov[(x, y)]],
            [self.cov[(y, x)], self.cov[(y, y)]],
        ])
    }

    /// `⟨c†c⟩ = Vxx + Vyy − 1/2 + x̄² + ȳ²`.
    pub fn mean_photons(&self, mode: usize) -> Result<f64> {
        let alpha = self.mean_amplitude(mode)?;
        Ok(self.quadrature_noise_sum(mode)? - 0.5 + alpha.norm_sqr())
    }

    /// Photons above the coherent amplitude, `⟨c†c⟩ − |⟨c⟩|²`.
    pub fn thermal_photons(&self, mode: usize) -> Result<f64> {
        Ok(self.quadrature_noise_sum(mode)? - 0.5)
    }

    /// `Δx² + Δy²`.
    pub fn quadrature_noise_sum(&self, mode: usize) -> Result<f64> {
        let v = self.mode_cov(mode)?;
        Ok(v[0][0] + v[1][1])
    }

    /// Smallest eigenvalue of the Hermitian matrix `cov + (i/4)Ω`; nonnegative
    /// for every physical state.
    pub fn uncertainty_min_eigenvalue(&self) -> f64 {
        let w = omega(self.n_modes());
        let h = DMatrix::from_fn(self.cov.nrows(), self.cov.ncols(), |r, c| {
            Complex64::new(self.cov[(r, c)], 0.25 * w[(r, c)])
        });
        min_hermitian_eigenvalue(&h)
    }

    /// Exchange two modes.
    pub fn swap_modes(&self, a: usize, b: usize) -> Result<GaussianState> {
        check_modes(&[a], self.n_modes())?;
        check_modes(&[b], self.n_modes())?;
        let n = self.n_modes();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.swap(a, b);
        let idx = block_indices(&perm, n);
        let mean = DVector::from_iterator(2 * n, idx.iter().map(|&i| self.mean[i]));
        let cov = DMatrix::from_fn(2 * n, 2 * n, |r, c| self.cov[(idx[r], idx[c])]);
        Ok(GaussianState::from_parts(mean, cov))
    }
}

/// `n`-mode vacuum.
pub fn vacuum(n: usize) -> GaussianState {
    assert!(n > 0, "a state needs at least one mode");
    GaussianState::from_parts(
        DVector::zeros(2 * n),
        DMatrix::identity(2 * n, 2 * n) * super::VACUUM_VARIANCE,
    )
}

/// Single-mode thermal state with `nbar` mean photons: covariance
/// `((2·nbar + 1)/4)·I`.
pub fn thermal_state(nbar: f64) -> Result<GaussianState> {
    if !(nbar >= 0.0) || !nbar.is_finite() {
        return Err(domain("nbar", nbar, "thermal photon number must be finite and >= 0"));
    }
    Ok(GaussianState::from_parts(
        DVector::zeros(2),
        DMatrix::identity(2, 2) * ((2.0 * nbar + 1.0) / 4.0),
    ))
}

pub fn coherent_state(alpha: Complex64) -> GaussianState {
    displaced_thermal(0.0, alpha).expect("vacuum is a valid thermal state")
}

pub fn displaced_thermal(nbar: f64, alpha: Complex64) -> Result<GaussianState> {
    thermal_state(nbar)?.displace(0, alpha)
}
