use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{block_indices, check_modes, GaussianState, VACUUM_VARIANCE};
use crate::error::Result;

/// One heterodyne result and the probability density (per unit area of the
/// complex plane) of obtaining it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeterodyneOutcome {
    pub outcome: Complex64,
    pub density: f64,
}

/// Measure `mode` by heterodyne detection with result `outcome`.
///
/// The outcome density is the bivariate normal with the mode's mean and
/// covariance `V_mode + I/4`. The returned state holds the remaining modes
/// (in their original order), conditioned on the result; it is `None` when
/// the measured mode was the only one.
pub fn heterodyne_condition(
    state: &GaussianState,
    mode: usize,
    outcome: Complex64,
) -> Result<(HeterodyneOutcome, Option<GaussianState>)> {
    let n = state.n_modes();
    check_modes(&[mode], n)?;
    let a = [mode, n + mode];
    let sigma = Matrix2::new(
        state.cov()[(a[0], a[0])] + VACUUM_VARIANCE,
        state.cov()[(a[0], a[1])],
        state.cov()[(a[1], a[0])],
        state.cov()[(a[1], a[1])] + VACUUM_VARIANCE,
    );
    // sigma ⪰ I/4, so it is always invertible
    let sigma_inv = sigma.try_inverse().expect("heterodyne covariance is positive definite");
    let delta = Vector2::new(outcome.re - state.mean()[a[0]], outcome.im - state.mean()[a[1]]);
    let quad = (delta.transpose() * sigma_inv * delta)[(0, 0)];
    let density = (-0.5 * quad).exp() / (2.0 * PI * sigma.determinant().sqrt());
    let result = HeterodyneOutcome { outcome, density };

    if n == 1 {
        return Ok((result, None));
    }
    let others: Vec<usize> = (0..n).filter(|&k| k != mode).collect();
    let b = block_indices(&others, n);
    let c = DMatrix::from_fn(b.len(), 2, |r, col| state.cov()[(b[r], a[col])]);
    let gain = &c * DMatrix::from_iterator(2, 2, sigma_inv.iter().copied());
    let shift = &gain * DVector::from_column_slice(delta.as_slice());
    let mean = DVector::from_fn(b.len(), |r, _| state.mean()[b[r]] + shift[r]);
    let cov = DMatrix::from_fn(b.len(), b.len(), |r, col| state.cov()[(b[r], b[col])])
        - &gain * c.transpose();
    // restore exact symmetry lost to rounding in the Schur complement
    let cov = (&cov + cov.transpose()) * 0.5;
    Ok((result, Some(GaussianState::from_parts(mean, cov))))
}

/// Draw a heterodyne outcome for `mode` and return it with the matching
/// conditional state of the other modes.
pub fn heterodyne_sample<R: Rng + ?Sized>(
    state: &GaussianState,
    mode: usize,
    rng: &mut R,
) -> Result<(HeterodyneOutcome, Option<GaussianState>)> {
    let n = state.n_modes();
    check_modes(&[mode], n)?;
    let v = state.mode_cov(mode)?;
    let (sxx, sxy, syy) = (v[0][0] + VACUUM_VARIANCE, v[0][1], v[1][1] + VACUUM_VARIANCE);
    let l11 = sxx.sqrt();
    let l21 = sxy / l11;
    let l22 = (syy - l21 * l21).max(0.0).sqrt();
    let z1: f64 = rng.sample(StandardNormal);
    let z2: f64 = rng.sample(StandardNormal);
    let outcome = Complex64::new(
        state.mean()[mode] + l11 * z1,
        state.mean()[n + mode] + l21 * z1 + l22 * z2,
    );
    heterodyne_condition(state, mode, outcome)
}
