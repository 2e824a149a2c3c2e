use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{block_indices, check_modes, max_abs_diff, omega, GaussianState, PSD_TOL};
use crate::error::{domain, Error, Result};

/// A Gaussian unitary in phase space: `mean → S·mean + d`, `cov → S·cov·Sᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform {
    s: DMatrix<f64>,
    d: DVector<f64>,
}

impl SymplecticTransform {
    pub fn new(s: DMatrix<f64>, d: DVector<f64>) -> Result<Self> {
        let dim = s.nrows();
        if dim == 0 || !dim.is_multiple_of(2) || s.ncols() != dim || d.len() != dim {
            return Err(Error::Dimension(format!(
                "symplectic matrix {:?} with displacement of length {}",
                s.shape(),
                d.len()
            )));
        }
        let t = Self { s, d };
        let err = t.symplectic_residual();
        if err > PSD_TOL {
            return Err(Error::Unphysical {
                what: "symplectic transform",
                detail: format!("|SΩSᵀ − Ω| = {err:e}"),
            });
        }
        Ok(t)
    }

    fn from_parts(s: DMatrix<f64>, d: DVector<f64>) -> Self {
        Self { s, d }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_parts(DMatrix::identity(2 * n, 2 * n), DVector::zeros(2 * n))
    }

    pub fn n_modes(&self) -> usize {
        self.s.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn displacement_vector(&self) -> &DVector<f64> {
        &self.d
    }

    /// Largest element of `SΩSᵀ − Ω`.
    pub fn symplectic_residual(&self) -> f64 {
        let w = omega(self.n_modes());
        max_abs_diff(&(&self.s * &w * self.s.transpose()), &w)
    }

    /// Embedding of the `n`-port unitary `F_kl = exp(2πikl/n)/√n`, acting as
    /// `a_k → Σ_l F_kl a_l`.
    pub fn dft_interferometer(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(domain("n", 0.0, "interferometer needs at least one port"));
        }
        let norm = 1.0 / (n as f64).sqrt();
        let f = |k: usize, l: usize| {
            // reduce the phase index first so large n keeps full accuracy
            let phase = 2.0 * PI * ((k * l) % n) as f64 / n as f64;
            Complex64::from_polar(norm, phase)
        };
        Ok(Self::from_unitary(n, f))
    }

    /// `[[Re F, −Im F], [Im F, Re F]]` for an `n×n` unitary given elementwise.
    pub fn from_unitary(n: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut s = DMatrix::zeros(2 * n, 2 * n);
        for k in 0..n {
            for l in 0..n {
                let z = f(k, l);
                s[(k, l)] = z.re;
                s[(k, n + l)] = -z.im;
                s[(n + k, l)] = z.im;
                s[(n + k, n + l)] = z.re;
            }
        }
        Self::from_parts(s, DVector::zeros(2 * n))
    }

    /// Two-port beam splitter with amplitude transmissivity `tau`:
    /// `a′ = τa + √(1−τ²)b`, `b′ = τb − √(1−τ²)a`.
    pub fn beamsplitter(tau: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&tau) {
            return Err(domain("tau", tau, "transmissivity must lie in [0, 1]"));
        }
        let r = (1.0 - tau * tau).sqrt();
        Ok(Self::from_unitary(2, |k, l| {
            let v = match (k, l) {
                (0, 0) | (1, 1) => tau,
                (0, 1) => r,
                _ => -r,
            };
            Complex64::new(v, 0.0)
        }))
    }

    /// Two-mode squeezer with `μ = cosh r`, `ν = sinh r`:
    /// `a → μa − νb†`, `b → μb − νa†`.
    pub fn two_mode_squeezer(r: f64) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(domain("r", r, "squeezing parameter must be finite and >= 0"));
        }
        let (mu, nu) = (r.cosh(), r.sinh());
        #[rustfmt::skip]
        let s = DMatrix::from_row_slice(4, 4, &[
            mu, -nu, 0.0, 0.0,
            -nu, mu, 0.0, 0.0,
            0.0, 0.0, mu, nu,
            0.0, 0.0, nu, mu,
        ]);
        Ok(Self::from_parts(s, DVector::zeros(4)))
    }

    /// Squeezer whose signal-mode power gain is `gain` (`cosh² r = gain`).
    pub fn two_mode_squeezer_for_gain(gain: f64) -> Result<Self> {
        if !(gain >= 1.0) || !gain.is_finite() {
            return Err(domain("gain", gain, "squeezer gain must be finite and >= 1"));
        }
        Self::two_mode_squeezer(gain.sqrt().acosh())
    }

    /// Pure displacement `D(α_0) ⊗ … ⊗ D(α_{n−1})`.
    pub fn displacement(alphas: &[Complex64]) -> Self {
        let n = alphas.len();
        let mut d = DVector::zeros(2 * n);
        for (k, a) in alphas.iter().enumerate() {
            d[k] = a.re;
            d[n + k] = a.im;
        }
        Self::from_parts(DMatrix::identity(2 * n, 2 * n), d)
    }

    /// Inverse transform; `S⁻¹ = −Ω Sᵀ Ω`.
    pub fn inverse(&self) -> Self {
        let w = omega(self.n_modes());
        let s_inv = -(&w * self.s.transpose() * &w);
        let d = -(&s_inv * &self.d);
        Self::from_parts(s_inv, d)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &SymplecticTransform) -> Result<Self> {
        if other.n_modes() != self.n_modes() {
            return Err(Error::ModeCountMismatch {
                expected: self.n_modes(),
                actual: other.n_modes(),
            });
        }
        Ok(Self::from_parts(
            &other.s * &self.s,
            &other.s * &self.d + &other.d,
        ))
    }

    /// Apply to the listed modes of `state`; the i-th transform port acts on
    /// `modes[i]`.
    pub fn apply(&self, state: &GaussianState, modes: &[usize]) -> Result<GaussianState> {
        let (x, d) = embed(&self.s, &self.d, modes, state.n_modes())?;
        let mean = &x * state.mean() + d;
        let cov = &x * state.cov() * x.transpose();
        Ok(GaussianState::from_parts(mean, cov))
    }
}

/// Lift a `2k×2k` block acting on `modes` to the full `2n×2n` phase space,
/// identity elsewhere.
pub(super) fn embed(
    block: &DMatrix<f64>,
    shift: &DVector<f64>,
    modes: &[usize],
    n: usize,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    if modes.len() * 2 != block.nrows() {
        return Err(Error::ModeCountMismatch {
            expected: block.nrows() / 2,
            actual: modes.len(),
        });
    }
    check_modes(modes, n)?;
    let idx = block_indices(modes, n);
    let mut x = DMatrix::identity(2 * n, 2 * n);
    let mut d = DVector::zeros(2 * n);
    for (r, &i) in idx.iter().enumerate() {
        d[i] = shift[r];
        for (c, &j) in idx.iter().enumerate() {
            x[(i, j)] = block[(r, c)];
        }
    }
    Ok((x, d))
}
