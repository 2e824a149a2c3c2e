//! The N→M broadcasting circuit: concentrate the N inputs into one mode with
//! an inverse DFT interferometer, amplify (or attenuate) it with gain `M/N`,
//! and distribute it over M outputs with a DFT interferometer fed by M−1
//! ancillas.

mod formulas;
mod report;

pub use formulas::{
    broadcast_noise_bound, exact_broadcast_ancilla, intermediate_noise, phase_conj_noise_bound,
    predicted_clone_photons_general, predicted_local_photons, purification_noise_bound,
    superbroadcast_threshold, StageNoise,
};
pub use report::{make_report, sweep, BroadcastMode, BroadcastReport, BroadcastSpec, SweepRow};

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::gaussian::{displaced_thermal, vacuum, GaussianChannel, GaussianState, SymplecticTransform};

/// Tolerance for circuit outputs against their closed forms.
pub const PREDICTION_TOL: f64 = 1e-9;

fn gain(n: usize, m: usize) -> f64 {
    m as f64 / n as f64
}

fn check_counts(n: usize, m: usize) -> Result<()> {
    if n == 0 {
        return Err(domain("N", 0.0, "need at least one input copy"));
    }
    if m == 0 {
        return Err(domain("M", 0.0, "need at least one output copy"));
    }
    Ok(())
}

/// Concentrate → `middle` → distribute with M−1 copies of `ancilla`.
fn run_pipeline(
    inputs: &GaussianState,
    m: usize,
    middle: &GaussianChannel,
    ancilla: &GaussianState,
) -> Result<GaussianState> {
    let n = inputs.n_modes();
    check_counts(n, m)?;
    let all_in: Vec<usize> = (0..n).collect();
    let concentrate = SymplecticTransform::dft_interferometer(n)?.inverse();
    let focused = concentrate.apply(inputs, &all_in)?.partial_trace(&[0])?;
    let mut mode = middle.apply(&focused, &[0])?;
    for _ in 1..m {
        mode = mode.tensor(ancilla);
    }
    let all_out: Vec<usize> = (0..m).collect();
    SymplecticTransform::dft_interferometer(m)?.apply(&mode, &all_out)
}

/// Optimal covariant broadcasting of the N-mode `inputs` into `m` clones.
///
/// The middle stage is the quantum-limited amplifier with gain `M/N` for
/// `M > N`, the identity for `M = N` and the attenuator with transmissivity
/// `M/N` for `M < N`. Ancillas are vacua.
pub fn run_superbroadcast(inputs: &GaussianState, m: usize) -> Result<GaussianState> {
    check_counts(inputs.n_modes(), m)?;
    let middle = GaussianChannel::phase_insensitive(gain(inputs.n_modes(), m))?;
    run_pipeline(inputs, m, &middle, &vacuum(1))
}

/// Like [`run_superbroadcast`] with a phase-conjugating amplifier of gain
/// `M/N` in the middle; clones carry the conjugate amplitude.
pub fn run_phase_conj_broadcast(inputs: &GaussianState, m: usize) -> Result<GaussianState> {
    check_counts(inputs.n_modes(), m)?;
    let middle = GaussianChannel::phase_conjugation(gain(inputs.n_modes(), m))?;
    run_pipeline(inputs, m, &middle, &vacuum(1))
}

/// Perfect broadcasting of N displaced thermal states: the distribution stage
/// mixes in M−1 thermal ancillas with the photon number from
/// [`exact_broadcast_ancilla`], so every clone equals the input.
pub fn run_exact_broadcast(spec: &BroadcastSpec) -> Result<GaussianState> {
    check_counts(spec.n, spec.m)?;
    let inputs = displaced_inputs(spec.n, spec.nbar_in, spec.alpha)?;
    let middle = GaussianChannel::phase_insensitive(gain(spec.n, spec.m))?;
    if spec.m == 1 {
        if spec.n != 1 {
            return Err(domain("M", 1.0, "exact broadcasting to one output needs a single input"));
        }
        return run_pipeline(&inputs, 1, &middle, &vacuum(1));
    }
    let mbar = exact_broadcast_ancilla(spec.n, spec.m, spec.nbar_in)?;
    // rounding at the threshold itself is not infeasibility
    if mbar < -crate::gaussian::ALGEBRAIC_TOL {
        return Err(Error::Infeasible { mbar });
    }
    let ancilla = crate::gaussian::thermal_state(mbar.max(0.0))?;
    run_pipeline(&inputs, spec.m, &middle, &ancilla)
}

/// `n` copies of the displaced thermal state `D(α) ρ_nbar D(α)†`.
pub fn displaced_inputs(n: usize, nbar: f64, alpha: Complex64) -> Result<GaussianState> {
    if n == 0 {
        return Err(domain("N", 0.0, "need at least one input copy"));
    }
    let one = displaced_thermal(nbar, alpha)?;
    let mut s = one.clone();
    for _ in 1..n {
        s = s.tensor(&one);
    }
    Ok(s)
}

/// `n` copies of a single-mode state.
pub fn copies(one: &GaussianState, n: usize) -> GaussianState {
    assert!(n > 0);
    let mut s = one.clone();
    for _ in 1..n {
        s = s.tensor(one);
    }
    s
}
