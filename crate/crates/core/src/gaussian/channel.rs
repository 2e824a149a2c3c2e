use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::symplectic::embed;
use super::{max_abs_diff, min_hermitian_eigenvalue, omega, vacuum, GaussianState, SymplecticTransform};
use super::{ALGEBRAIC_TOL, PSD_TOL};
use crate::error::{domain, Error, Result};

/// A Gaussian channel `(X, Y, d)`: `mean → X·mean + d`, `cov → X·cov·Xᵀ + Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianChannel {
    x: DMatrix<f64>,
    y: DMatrix<f64>,
    d: DVector<f64>,
}

impl GaussianChannel {
    /// Validates shapes, symmetry of `Y` and complete positivity.
    pub fn new(x: DMatrix<f64>, y: DMatrix<f64>, d: DVector<f64>) -> Result<Self> {
        let dim = x.nrows();
        if dim == 0 || !dim.is_multiple_of(2) || x.ncols() != dim || y.shape() != (dim, dim) || d.len() != dim {
            return Err(Error::Dimension(format!(
                "channel X {:?}, Y {:?}, d {}",
                x.shape(),
                y.shape(),
                d.len()
            )));
        }
        if max_abs_diff(&y, &y.transpose()) > ALGEBRAIC_TOL {
            return Err(Error::Unphysical {
                what: "channel",
                detail: "noise matrix Y is not symmetric".into(),
            });
        }
        let ch = Self { x, y, d };
        let lam = ch.cp_min_eigenvalue();
        if lam < -PSD_TOL {
            return Err(Error::Unphysical {
                what: "channel",
                detail: format!("Y + (i/4)(Ω − XΩXᵀ) has eigenvalue {lam:e}"),
            });
        }
        Ok(ch)
    }

    fn from_parts(x: DMatrix<f64>, y: DMatrix<f64>) -> Self {
        let dim = x.nrows();
        Self {
            x,
            y,
            d: DVector::zeros(dim),
        }
    }

    fn single_mode(x_diag: [f64; 2], noise: f64) -> Self {
        Self::from_parts(
            DMatrix::from_diagonal(&DVector::from_row_slice(&x_diag)),
            DMatrix::identity(2, 2) * noise,
        )
    }

    pub fn identity(n: usize) -> Self {
        Self::from_parts(DMatrix::identity(2 * n, 2 * n), DMatrix::zeros(2 * n, 2 * n))
    }

    /// Quantum-limited phase-insensitive amplifier: `X = √G·I`, `Y = ((G−1)/4)·I`.
    pub fn amplifier(gain: f64) -> Result<Self> {
        if !(gain >= 1.0) || !gain.is_finite() {
            return Err(domain("gain", gain, "amplifier gain must be finite and >= 1 (use the attenuator below 1)"));
        }
        let g = gain.sqrt();
        Ok(Self::single_mode([g, g], (gain - 1.0) / 4.0))
    }

    /// Pure-loss channel with power transmissivity `eta`: `X = √η·I`, `Y = ((1−η)/4)·I`.
    pub fn attenuator(eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(domain("eta", eta, "attenuator transmissivity must lie in [0, 1]"));
        }
        let g = eta.sqrt();
        Ok(Self::single_mode([g, g], (1.0 - eta) / 4.0))
    }

    /// Quantum-limited phase-conjugating amplifier: `X = √G·diag(1, −1)`,
    /// `Y = ((G+1)/4)·I`, so `α → √G·α*`.
    pub fn phase_conjugation(gain: f64) -> Result<Self> {
        if !(gain > 0.0) || !gain.is_finite() {
            return Err(domain("gain", gain, "phase-conjugation gain must be finite and > 0"));
        }
        let g = gain.sqrt();
        Ok(Self::single_mode([g, -g], (gain + 1.0) / 4.0))
    }

    /// Middle stage of the broadcasting circuit for gain `G`: amplifier above
    /// one, identity at one, attenuator below.
    pub fn phase_insensitive(gain: f64) -> Result<Self> {
        if gain > 1.0 {
            Self::amplifier(gain)
        } else if gain == 1.0 {
            Ok(Self::identity(1))
        } else {
            Self::attenuator(gain)
        }
    }

    pub fn from_symplectic(t: &SymplecticTransform) -> Self {
        let dim = t.matrix().nrows();
        Self {
            x: t.matrix().clone(),
            y: DMatrix::zeros(dim, dim),
            d: t.displacement_vector().clone(),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.x.nrows() / 2
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn d(&self) -> &DVector<f64> {
        &self.d
    }

    /// Smallest eigenvalue of `Y + (i/4)(Ω − XΩXᵀ)`.
    pub fn cp_min_eigenvalue(&self) -> f64 {
        let w = omega(self.n_modes());
        let a = &w - &self.x * &w * self.x.transpose();
        let h = DMatrix::from_fn(self.y.nrows(), self.y.ncols(), |r, c| {
            Complex64::new(self.y[(r, c)], 0.25 * a[(r, c)])
        });
        min_hermitian_eigenvalue(&h)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &GaussianChannel) -> Result<Self> {
        if other.n_modes() != self.n_modes() {
            return Err(Error::ModeCountMismatch {
                expected: self.n_modes(),
                actual: other.n_modes(),
            });
        }
        Ok(Self {
            x: &other.x * &self.x,
            y: &other.x * &self.y * other.x.transpose() + &other.y,
            d: &other.x * &self.d + &other.d,
        })
    }

    /// Largest elementwise difference in `X`, `Y` and `d`.
    pub fn max_deviation(&self, other: &GaussianChannel) -> f64 {
        max_abs_diff(&self.x, &other.x)
            .max(max_abs_diff(&self.y, &other.y))
            .max((&self.d - &other.d).amax())
    }

    pub fn apply(&self, state: &GaussianState, modes: &[usize]) -> Result<GaussianState> {
        let n = state.n_modes();
        let (x, d) = embed(&self.x, &self.d, modes, n)?;
        let (y_lift, _) = embed(&self.y, &self.d, modes, n)?;
        // embed() fills the identity outside the block; Y must be zero there
        let idx = super::block_indices(modes, n);
        let mut y = DMatrix::zeros(2 * n, 2 * n);
        for &i in &idx {
            for &j in &idx {
                y[(i, j)] = y_lift[(i, j)];
            }
        }
        let mean = &x * state.mean() + d;
        let cov = &x * state.cov() * x.transpose() + y;
        Ok(GaussianState::from_parts(mean, cov))
    }
}

/// Amplify one mode through its unitary dilation: append a vacuum ancilla,
/// apply the two-mode squeezer with `cosh² r = gain`, trace the ancilla.
pub fn amplify_by_dilation(state: &GaussianState, mode: usize, gain: f64) -> Result<GaussianState> {
    let squeezer = SymplecticTransform::two_mode_squeezer_for_gain(gain)?;
    let n = state.n_modes();
    let joint = state.tensor(&vacuum(1));
    let out = squeezer.apply(&joint, &[mode, n])?;
    out.partial_trace(&(0..n).collect::<Vec<_>>())
}
