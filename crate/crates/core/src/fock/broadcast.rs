//! The broadcasting circuit in Fock space.
//!
//! Inputs are truncated at `cutoff`; the displacement and concentration run
//! at `cutoff + STAGE_HEADROOM`, and the amplified mode gets a cutoff sized
//! from its photon number, so the only sizeable truncations are the input
//! tail and the final `M`-mode output.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::gates::{apply_gate, apply_gate_vacuum_ancilla, FockGate};
use super::{fock_partial_trace, fock_thermal, index_of, FockDensityMatrix};
use crate::error::{domain, Error, Result};

/// Largest Hilbert-space dimension any stage may allocate.
pub const MAX_DIMENSION: usize = 4096;
/// Largest accepted thermal tail mass of an input mode.
pub const TAIL_BUDGET: f64 = 1e-4;
const STAGE_HEADROOM: usize = 12;
/// Geometric tail mass allowed above the amplified mode's cutoff.
const MIDDLE_TAIL: f64 = 1e-10;
const MAX_MIDDLE_CUTOFF: usize = 320;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageRecord {
    pub stage: String,
    pub cutoff: usize,
    pub n_modes: usize,
    /// Accumulated bound on `1 − Tr ρ`.
    pub trace_deficit: f64,
    /// `1 − Tr ρ` of the stage output.
    pub observed_loss: f64,
    pub padding: Option<usize>,
    pub leakage: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct FockBroadcastRun {
    pub output: FockDensityMatrix,
    pub stages: Vec<StageRecord>,
}

fn record(stage: &str, rho: &FockDensityMatrix, gate: Option<(usize, f64)>) -> StageRecord {
    StageRecord {
        stage: stage.to_string(),
        cutoff: rho.cutoff(),
        n_modes: rho.n_modes(),
        trace_deficit: rho.trace_deficit(),
        observed_loss: 1.0 - rho.trace(),
        padding: gate.map(|g| g.0),
        leakage: gate.map(|g| g.1),
    }
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for k in 1..=n {
        out[k] = out[k - 1] + (k as f64).ln();
    }
    out
}

/// All occupations of `m` modes with total `n` and each entry `≤ cap`.
fn compositions(n: usize, m: usize, cap: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if m == 1 {
        if n <= cap {
            prefix.push(n);
            out.push(prefix.clone());
            prefix.pop();
        }
        return;
    }
    for k in 0..=n.min(cap) {
        prefix.push(k);
        compositions(n - k, m - 1, cap, prefix, out);
        prefix.pop();
    }
}

/// Send a single mode through an `m`-port passive splitter with equal
/// amplitudes `1/√m` into vacuum ports: `|n⟩ → Σ √(n!/Πk!) m^{−n/2} |k⟩`.
pub fn fock_distribute(rho: &FockDensityMatrix, m: usize, out_cutoff: usize) -> Result<FockDensityMatrix> {
    if rho.n_modes() != 1 {
        return Err(Error::ModeCountMismatch {
            expected: 1,
            actual: rho.n_modes(),
        });
    }
    if m == 0 {
        return Err(domain("m", 0.0, "need at least one output mode"));
    }
    let d = out_cutoff + 1;
    let dim = check_dimension(d, m)?;
    // photon numbers above m·out_cutoff cannot land anywhere
    let reach = rho.dim().min(m * out_cutoff + 1);
    let lf = ln_factorials(reach);
    let ln_m = (m as f64).ln();
    let mut psi = DMatrix::<Complex64>::zeros(dim, reach);
    let mut prefix = Vec::with_capacity(m);
    for n in 0..reach {
        let mut occs = Vec::new();
        compositions(n, m, out_cutoff, &mut prefix, &mut occs);
        for occ in occs {
            let lf_k: f64 = occ
                .iter()
                .map(|&k| (1..=k).map(|j| (j as f64).ln()).sum::<f64>())
                .sum();
            let amp = (0.5 * (lf[n] - lf_k - n as f64 * ln_m)).exp();
            psi[(index_of(&occ, d), n)] = Complex64::new(amp, 0.0);
        }
    }
    let out = &psi * rho.matrix().view((0, 0), (reach, reach)) * psi.adjoint();
    let loss = (rho.trace() - out.trace().re).max(0.0);
    FockDensityMatrix::new(m, out_cutoff, out, rho.trace_deficit() + loss)
}

fn check_dimension(d: usize, modes: usize) -> Result<usize> {
    let dim = d.checked_pow(modes as u32).filter(|&x| x <= MAX_DIMENSION);
    dim.ok_or_else(|| Error::Budget {
        detail: format!(
            "{modes} modes at cutoff {} exceed the {MAX_DIMENSION}-dimensional budget",
            d - 1
        ),
        required_cutoff: None,
    })
}

/// Smallest cutoff whose thermal tail `(n̄/(n̄+1))^(c+1)` is within budget.
pub fn required_cutoff(nbar: f64) -> usize {
    if nbar <= 0.0 {
        return 1;
    }
    let ratio = nbar / (nbar + 1.0);
    let c = (TAIL_BUDGET.ln() / ratio.ln()).ceil() as usize;
    c.saturating_sub(1).max(1)
}

fn mean_photons(rho: &FockDensityMatrix) -> f64 {
    let p = rho.diagonal();
    p.iter().enumerate().map(|(n, w)| n as f64 * w).sum::<f64>() / rho.trace()
}

/// Cutoff above which a thermal state of the same mean photon number keeps
/// less than [`MIDDLE_TAIL`]; displaced states have lighter tails.
fn middle_cutoff(photons: f64, floor: usize) -> Result<usize> {
    if photons <= 0.0 {
        return Ok(floor);
    }
    let ratio = photons / (photons + 1.0);
    let c = (MIDDLE_TAIL.ln() / ratio.ln()).ceil() as usize;
    let c = c.max(floor);
    if c > MAX_MIDDLE_CUTOFF {
        return Err(Error::Budget {
            detail: format!("amplified mode with {photons:.2} photons needs cutoff {c} > {MAX_MIDDLE_CUTOFF}"),
            required_cutoff: None,
        });
    }
    Ok(c)
}

/// `N` copies of a displaced thermal state through concentration,
/// amplification (or attenuation) and distribution to `M` modes.
///
/// Concentration is implemented for `N ≤ 2`.
pub fn fock_run_broadcast(n: usize, m: usize, nbar: f64, alpha: Complex64, cutoff: usize) -> Result<FockBroadcastRun> {
    if n == 0 || m == 0 {
        return Err(domain("n", n.min(m) as f64, "need N >= 1 and M >= 1"));
    }
    if cutoff < 1 {
        return Err(domain("cutoff", cutoff as f64, "need cutoff >= 1"));
    }
    if n > 2 {
        return Err(Error::Budget {
            detail: format!("Fock concentration is limited to N <= 2, got N = {n}"),
            required_cutoff: None,
        });
    }
    check_dimension(cutoff + 1, m)?;
    let input = fock_thermal(nbar, cutoff)?;
    if input.trace_deficit() > TAIL_BUDGET {
        return Err(Error::Budget {
            detail: format!(
                "input tail mass {:.3e} exceeds {TAIL_BUDGET:e} at cutoff {cutoff}",
                input.trace_deficit()
            ),
            required_cutoff: Some(required_cutoff(nbar)),
        });
    }
    let work = cutoff + STAGE_HEADROOM;
    check_dimension(work + 1, 2)?;
    let mut stages = vec![record("input", &input, None)];

    let shifted = apply_gate(FockGate::Displacement(alpha), &input, work)?;
    stages.push(record("displace", &shifted.state, Some((shifted.padding, shifted.leakage))));
    let single = shifted.state;

    let concentrated = if n == 2 {
        let pair = single.tensor(&single)?;
        let mixed = apply_gate(FockGate::Beamsplitter(0.5f64.sqrt()), &pair, work)?;
        let kept = fock_partial_trace(&mixed.state, &[0])?;
        stages.push(record("concentrate", &kept, Some((mixed.padding, mixed.leakage))));
        kept
    } else {
        single
    };

    let gain = m as f64 / n as f64;
    let middle = if gain != 1.0 {
        let (name, gate, photons) = if gain > 1.0 {
            let photons = gain * (mean_photons(&concentrated) + 1.0) - 1.0;
            ("amplify", FockGate::TwoModeSqueezer(gain.sqrt().acosh()), photons)
        } else {
            ("attenuate", FockGate::Beamsplitter(gain.sqrt()), gain * mean_photons(&concentrated))
        };
        let out_cutoff = middle_cutoff(photons, work)?;
        let applied = apply_gate_vacuum_ancilla(gate, &concentrated, out_cutoff)?;
        stages.push(record(name, &applied.state, Some((applied.padding, applied.leakage))));
        applied.state
    } else {
        concentrated
    };

    let output = fock_distribute(&middle, m, cutoff)?;
    stages.push(record("distribute", &output, None));
    Ok(FockBroadcastRun { output, stages })
}
