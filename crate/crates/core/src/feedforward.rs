//! Phase-insensitive amplification by linear optics and feed-forward: the
//! signal meets a vacuum on a beam splitter of amplitude transmissivity `τ`,
//! the reflected port is heterodyned with outcome `β`, and the transmitted
//! mode is displaced by `−kβ`.
//!
//! The minus sign pairs with the beam-splitter convention
//! `b′ = τb − √(1−τ²)a`: the reflected port carries `−√(1−τ²)α`, so the
//! displacement adds `+k√(1−τ²)α` to the transmitted amplitude.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::gaussian::{heterodyne_sample, vacuum, GaussianChannel, GaussianState, SymplecticTransform};
use crate::par::Execution;

type Shot = ([f64; 2], [[f64; 2]; 2]);

/// Shots per independently seeded sub-stream.
pub const SHOTS_PER_STREAM: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeedForwardParams {
    /// Amplitude transmissivity of the tap beam splitter.
    pub tau: f64,
    /// Feed-forward displacement gain.
    pub k: f64,
    pub shots: usize,
    pub seed: u64,
}

impl FeedForwardParams {
    pub fn new(tau: f64, k: f64, shots: usize, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&tau) {
            return Err(domain("tau", tau, "transmissivity must lie in [0, 1]"));
        }
        if !(k >= 0.0) || !k.is_finite() {
            return Err(domain("k", k, "displacement gain must be finite and >= 0"));
        }
        if shots == 0 {
            return Err(domain("shots", 0.0, "need at least one shot"));
        }
        Ok(Self { tau, k, shots, seed })
    }

    pub fn with_shots(mut self, shots: usize) -> Self {
        self.shots = shots;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Settings that reproduce the quantum-limited amplifier of gain `G > 1`:
/// `τ = 1/√G`, `k = √(G−1)`.
pub fn params_for_gain(gain: f64) -> Result<FeedForwardParams> {
    if !(gain > 1.0) || !gain.is_finite() {
        return Err(domain("gain", gain, "feed-forward amplification needs a finite gain > 1"));
    }
    FeedForwardParams::new(1.0 / gain.sqrt(), (gain - 1.0).sqrt(), 100_000, 0)
}

/// Average effect of the scheme on the signal mode: amplitude gain
/// `g = τ + k√(1−τ²)`, added variance `[k² + (kτ − √(1−τ²))²]/4` per quadrature.
pub fn ensemble_channel(tau: f64, k: f64) -> Result<GaussianChannel> {
    FeedForwardParams::new(tau, k, 1, 0)?;
    let r = (1.0 - tau * tau).sqrt();
    let g = tau + k * r;
    let noise = (k * k + (k * tau - r).powi(2)) / 4.0;
    GaussianChannel::new(
        DMatrix::identity(2, 2) * g,
        DMatrix::identity(2, 2) * noise,
        DVector::zeros(2),
    )
}

/// Empirical moments of the feed-forward output mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub shots: usize,
    /// `(x̄, ȳ)` averaged over trajectories.
    pub mean: [f64; 2],
    /// Ensemble covariance: conditional covariance plus the spread of the
    /// conditional means.
    pub cov: [[f64; 2]; 2],
    pub mean_se: [f64; 2],
    pub cov_se: [[f64; 2]; 2],
}

/// Deviations from a reference state in units of the standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZScores {
    pub mean_x: f64,
    pub mean_y: f64,
    pub cov_xx: f64,
    pub cov_yy: f64,
    pub cov_xy: f64,
}

impl ZScores {
    pub fn max_abs(&self) -> f64 {
        [self.mean_x, self.mean_y, self.cov_xx, self.cov_yy, self.cov_xy]
            .iter()
            .fold(0.0, |m, z| m.max(z.abs()))
    }
}

fn z(estimate: f64, expected: f64, se: f64) -> f64 {
    let diff = estimate - expected;
    if se > 0.0 {
        diff / se
    } else if diff.abs() <= 1e-12 {
        0.0
    } else {
        f64::INFINITY.copysign(diff)
    }
}

impl MonteCarloEstimate {
    /// z-scores against the moments of a single-mode reference state.
    pub fn z_scores(&self, expected: &GaussianState) -> Result<ZScores> {
        if expected.n_modes() != 1 {
            return Err(Error::ModeCountMismatch {
                expected: 1,
                actual: expected.n_modes(),
            });
        }
        let v = expected.mode_cov(0)?;
        Ok(ZScores {
            mean_x: z(self.mean[0], expected.mean()[0], self.mean_se[0]),
            mean_y: z(self.mean[1], expected.mean()[1], self.mean_se[1]),
            cov_xx: z(self.cov[0][0], v[0][0], self.cov_se[0][0]),
            cov_yy: z(self.cov[1][1], v[1][1], self.cov_se[1][1]),
            cov_xy: z(self.cov[0][1], v[0][1], self.cov_se[0][1]),
        })
    }
}

/// Simulate `params.shots` feed-forward trajectories on `mode` of `state`.
///
/// Shots are split into blocks of [`SHOTS_PER_STREAM`], block `i` drawing
/// from ChaCha stream `i` of the master seed, so the estimate is identical for
/// every execution strategy.
pub fn monte_carlo_run(
    state: &GaussianState,
    mode: usize,
    params: &FeedForwardParams,
    exec: Execution,
) -> Result<MonteCarloEstimate> {
    let params = FeedForwardParams::new(params.tau, params.k, params.shots, params.seed)?;
    let n = state.n_modes();
    let joint = state.tensor(&vacuum(1));
    let coupled = SymplecticTransform::beamsplitter(params.tau)?.apply(&joint, &[mode, n])?;

    let shot = |rng: &mut ChaCha8Rng| -> Result<([f64; 2], [[f64; 2]; 2])> {
        let (outcome, cond) = heterodyne_sample(&coupled, n, rng)?;
        let cond = cond.expect("signal modes remain after measuring the ancilla");
        let fed = cond.displace(mode, -params.k * outcome.outcome)?;
        let a: Complex64 = fed.mean_amplitude(mode)?;
        Ok(([a.re, a.im], fed.mode_cov(mode)?))
    };

    let blocks = params.shots.div_ceil(SHOTS_PER_STREAM);
    let per_block = exec.map_range(blocks, |b| -> Result<Vec<Shot>> {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(b as u64);
        let count = SHOTS_PER_STREAM.min(params.shots - b * SHOTS_PER_STREAM);
        (0..count).map(|_| shot(&mut rng)).collect()
    });
    let mut samples = Vec::with_capacity(params.shots);
    for block in per_block {
        samples.extend(block?);
    }
    Ok(summarize(&samples))
}

fn summarize(samples: &[([f64; 2], [[f64; 2]; 2])]) -> MonteCarloEstimate {
    let n = samples.len() as f64;
    let mut mean = [0.0; 2];
    let mut cond_cov = [[0.0; 2]; 2];
    for (m, c) in samples {
        for i in 0..2 {
            mean[i] += m[i] / n;
            for j in 0..2 {
                cond_cov[i][j] += c[i][j] / n;
            }
        }
    }
    // spread of the conditional means and the scatter of its summands
    let mut spread = [[0.0; 2]; 2];
    let mut spread_sq = [[0.0; 2]; 2];
    for (m, _) in samples {
        for i in 0..2 {
            for j in 0..2 {
                let p = (m[i] - mean[i]) * (m[j] - mean[j]);
                spread[i][j] += p;
                spread_sq[i][j] += p * p;
            }
        }
    }
    let denom = (n - 1.0).max(1.0);
    let mut cov = [[0.0; 2]; 2];
    let mut cov_se = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let avg = spread[i][j] / n;
            cov[i][j] = cond_cov[i][j] + spread[i][j] / denom;
            let var_p = (spread_sq[i][j] / n - avg * avg).max(0.0);
            cov_se[i][j] = (var_p / n).sqrt();
        }
    }
    let mean_se = [
        (spread[0][0] / denom / n).sqrt(),
        (spread[1][1] / denom / n).sqrt(),
    ];
    MonteCarloEstimate {
        shots: samples.len(),
        mean,
        cov,
        mean_se,
        cov_se,
    }
}
