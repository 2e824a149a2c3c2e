//! Closed-form photon numbers, thresholds and noise bounds of the
//! broadcasting circuit. `γ` and `Γ` denote summed conjugate-quadrature
//! variances `Δx² + Δy²` of an input and of each output clone.

use serde::Serialize;

use crate::error::{domain, Result};

fn amplifying_excess(n: usize, m: usize) -> f64 {
    (1.0 / n as f64 - 1.0 / m as f64).max(0.0)
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma >= 0.5) {
        return Err(domain("gamma", gamma, "quadrature noise sum is at least 1/2"));
    }
    Ok(())
}

/// Thermal photons of each clone for thermal inputs with `nbar` photons:
/// `(M·nbar + M − N)/(MN)` when `M ≥ N`, and `nbar/N` when purifying.
pub fn predicted_local_photons(n: usize, m: usize, nbar: f64) -> f64 {
    nbar / n as f64 + amplifying_excess(n, m)
}

/// Minimal clone photon number for arbitrary inputs with `input_photons`
/// photons above their coherent amplitude: `in/N + 1/N − 1/M` for `M > N`.
pub fn predicted_clone_photons_general(input_photons: f64, n: usize, m: usize) -> f64 {
    input_photons / n as f64 + amplifying_excess(n, m)
}

/// Smallest input thermal number for which clones are at least as pure as
/// the inputs, `(M − N)/(M(N − 1))`. Non-positive when `M ≤ N`; infinite for
/// a single input cloned into more than one output.
pub fn superbroadcast_threshold(n: usize, m: usize) -> f64 {
    if n == 1 {
        return if m <= 1 { 0.0 } else { f64::INFINITY };
    }
    let (n, m) = (n as f64, m as f64);
    (m - n) / (m * (n - 1.0))
}

/// Thermal number of the M−1 distribution ancillas that makes every clone
/// equal to the input: `[M(N−1)·nbar − (M−N)]/[N(M−1)]` when amplifying; the
/// `(M−N)` term is absent when `M ≤ N`. Negative means infeasible.
pub fn exact_broadcast_ancilla(n: usize, m: usize, nbar: f64) -> Result<f64> {
    if m < 2 {
        return Err(domain("M", m as f64, "the ancilla formula needs at least two outputs"));
    }
    if n == 0 {
        return Err(domain("N", 0.0, "need at least one input copy"));
    }
    let (nf, mf) = (n as f64, m as f64);
    let excess = (mf - nf).max(0.0);
    Ok((mf * (nf - 1.0) * nbar - excess) / (nf * (mf - 1.0)))
}

/// Noise after each stage of the circuit for inputs of average noise `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StageNoise {
    pub concentrated: f64,
    pub amplified: f64,
    /// Per-clone noise `Γ`.
    pub output: f64,
}

pub fn intermediate_noise(n: usize, m: usize, gamma: f64) -> Result<StageNoise> {
    check_gamma(gamma)?;
    let g = m as f64 / n as f64;
    let amplified = if g >= 1.0 {
        g * gamma + (g - 1.0) / 2.0
    } else {
        g * gamma + (1.0 - g) / 2.0
    };
    Ok(StageNoise {
        concentrated: gamma,
        amplified,
        output: (amplified + (m as f64 - 1.0) / 2.0) / m as f64,
    })
}

/// `Γ ≥ 1/2 + (γ − 1/2)/N + 1/N − 1/M` for linear broadcasting with `M > N`.
pub fn broadcast_noise_bound(n: usize, m: usize, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok(0.5 + (gamma - 0.5) / n as f64 + 1.0 / n as f64 - 1.0 / m as f64)
}

/// `Γ ≥ 1/2 + (γ − 1/2)/N` for purification (`M ≤ N`).
pub fn purification_noise_bound(n: usize, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok(0.5 + (gamma - 0.5) / n as f64)
}

/// `Γ ≥ 1/2 + (γ + 1/2)/N` for phase-conjugating broadcasting.
pub fn phase_conj_noise_bound(n: usize, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok(0.5 + (gamma + 0.5) / n as f64)
}
