use num_complex::Complex64;
use serde::{Serialize, Serializer};

use super::{
    broadcast_noise_bound, displaced_inputs, exact_broadcast_ancilla, phase_conj_noise_bound,
    predicted_local_photons, purification_noise_bound, run_exact_broadcast,
    run_phase_conj_broadcast, run_superbroadcast, superbroadcast_threshold, PREDICTION_TOL,
};
use crate::error::{Error, Result};
use crate::gaussian::{ppt_min_symplectic_eigenvalue, GaussianState};
use crate::par::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BroadcastMode {
    Standard,
    Exact,
    #[serde(rename = "conj")]
    PhaseConjugate,
}

/// One broadcasting request on N displaced thermal inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BroadcastSpec {
    pub n: usize,
    pub m: usize,
    pub nbar_in: f64,
    #[serde(serialize_with = "ser_complex")]
    pub alpha: Complex64,
    pub mode: BroadcastMode,
}

impl BroadcastSpec {
    pub fn new(n: usize, m: usize, nbar_in: f64, alpha: Complex64, mode: BroadcastMode) -> Self {
        Self {
            n,
            m,
            nbar_in,
            alpha,
            mode,
        }
    }
}

/// Prediction and measurement record of one broadcasting run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BroadcastReport {
    pub spec: BroadcastSpec,
    /// Thermal photons of each clone, read off the simulated output.
    pub nbar_out_local: f64,
    pub nbar_out_predicted: f64,
    /// Superbroadcasting threshold; `null` in JSON when infinite.
    #[serde(serialize_with = "ser_finite")]
    pub threshold: f64,
    pub superbroadcast: bool,
    /// Ancilla thermal number for exact broadcasting (absent for M = 1).
    pub mbar: Option<f64>,
    pub gamma_in: f64,
    pub gamma_out: f64,
    pub bound_gamma: f64,
    #[serde(serialize_with = "ser_complex")]
    pub clone_mean: Complex64,
    /// Smallest 1-vs-rest PPT symplectic eigenvalue of the output (M ≥ 2).
    pub ppt_min_eigenvalue: Option<f64>,
    pub seed: Option<u64>,
}

fn ser_complex<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Parts {
        re: f64,
        im: f64,
    }
    Parts { re: z.re, im: z.im }.serialize(s)
}

fn ser_finite<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

fn check_clones_identical(out: &GaussianState, nbar: f64) -> Result<()> {
    for k in 1..out.n_modes() {
        let other = out.thermal_photons(k)?;
        if (other - nbar).abs() > PREDICTION_TOL {
            return Err(Error::PredictionMismatch {
                quantity: "clone symmetry",
                measured: other,
                predicted: nbar,
            });
        }
    }
    Ok(())
}

/// Run the requested circuit on displaced thermal inputs and fill every
/// report field. Fails if the simulated clones disagree with the closed form.
pub fn make_report(spec: &BroadcastSpec) -> Result<BroadcastReport> {
    let (n, m, nbar) = (spec.n, spec.m, spec.nbar_in);
    let inputs = displaced_inputs(n, nbar, spec.alpha)?;
    let out = match spec.mode {
        BroadcastMode::Standard => run_superbroadcast(&inputs, m)?,
        BroadcastMode::Exact => run_exact_broadcast(spec)?,
        BroadcastMode::PhaseConjugate => run_phase_conj_broadcast(&inputs, m)?,
    };
    let nbar_out_local = out.thermal_photons(0)?;
    check_clones_identical(&out, nbar_out_local)?;

    let gamma_in = nbar + 0.5;
    let (nbar_out_predicted, bound_gamma) = match spec.mode {
        BroadcastMode::Standard | BroadcastMode::Exact => {
            let bound = if m > n {
                broadcast_noise_bound(n, m, gamma_in)?
            } else {
                purification_noise_bound(n, gamma_in)?
            };
            let predicted = if spec.mode == BroadcastMode::Exact {
                nbar
            } else {
                predicted_local_photons(n, m, nbar)
            };
            (predicted, bound)
        }
        BroadcastMode::PhaseConjugate => ((nbar + 1.0) / n as f64, phase_conj_noise_bound(n, gamma_in)?),
    };
    if (nbar_out_local - nbar_out_predicted).abs() > PREDICTION_TOL {
        return Err(Error::PredictionMismatch {
            quantity: "clone thermal photons",
            measured: nbar_out_local,
            predicted: nbar_out_predicted,
        });
    }

    let threshold = superbroadcast_threshold(n, m);
    let superbroadcast = match spec.mode {
        BroadcastMode::PhaseConjugate => nbar_out_local <= nbar + 1e-12,
        _ => nbar >= threshold - 1e-12,
    };
    let mbar = if m >= 2 {
        Some(exact_broadcast_ancilla(n, m, nbar)?)
    } else {
        None
    };
    let ppt_min_eigenvalue = if m >= 2 {
        let mut min = f64::INFINITY;
        for k in 0..m {
            min = min.min(ppt_min_symplectic_eigenvalue(&out, &[k])?);
        }
        Some(min)
    } else {
        None
    };

    Ok(BroadcastReport {
        spec: *spec,
        nbar_out_local,
        nbar_out_predicted,
        threshold,
        superbroadcast,
        mbar,
        gamma_in,
        gamma_out: out.quadrature_noise_sum(0)?,
        bound_gamma,
        clone_mean: out.mean_amplitude(0)?,
        ppt_min_eigenvalue,
        seed: None,
    })
}

/// One row of a standard-mode parameter sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub m: usize,
    pub nbar_in: f64,
    pub nbar_out: f64,
    pub threshold: f64,
    pub superbroadcast: bool,
    pub mbar: Option<f64>,
}

/// Standard broadcasting over the grid `ms × nbars`, rows in lexicographic
/// `(M, nbar)` order whatever the execution strategy.
pub fn sweep(n: usize, ms: &[usize], nbars: &[f64], exec: Execution) -> Result<Vec<SweepRow>> {
    let grid: Vec<(usize, f64)> = ms
        .iter()
        .flat_map(|&m| nbars.iter().map(move |&nbar| (m, nbar)))
        .collect();
    exec.map(&grid, |&(m, nbar)| {
        let spec = BroadcastSpec::new(n, m, nbar, Complex64::new(0.0, 0.0), BroadcastMode::Standard);
        make_report(&spec).map(|r| SweepRow {
            n,
            m,
            nbar_in: nbar,
            nbar_out: r.nbar_out_local,
            threshold: r.threshold,
            superbroadcast: r.superbroadcast,
            mbar: r.mbar,
        })
    })
    .into_iter()
    .collect()
}
