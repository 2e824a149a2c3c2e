//! Truncated Fock-space oracle.
//!
//! Density matrices live on `(cutoff+1)^n` dimensional spaces with mode 0 as
//! the most significant digit of the basis index. Every truncation step
//! records the probability mass it discards in `trace_deficit`, an upper
//! bound on `1 − Tr ρ`.

mod broadcast;
mod gates;

pub use broadcast::{
    fock_distribute, fock_run_broadcast, FockBroadcastRun, StageRecord, MAX_DIMENSION, TAIL_BUDGET,
};
pub use gates::{
    apply_gate, apply_gate_vacuum_ancilla, fock_beamsplitter, fock_displacement, fock_two_mode_squeezer, FockGate, FockUnitary,
    GateApplication, LEAKAGE_BUDGET,
};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::gaussian::GaussianState;

#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    n_modes: usize,
    cutoff: usize,
    rho: DMatrix<Complex64>,
    trace_deficit: f64,
}

/// Digits of a basis index, mode 0 first.
pub(crate) fn digits(mut index: usize, n_modes: usize, d: usize) -> Vec<usize> {
    let mut out = vec![0; n_modes];
    for slot in out.iter_mut().rev() {
        *slot = index % d;
        index /= d;
    }
    out
}

pub(crate) fn index_of(occupation: &[usize], d: usize) -> usize {
    occupation.iter().fold(0, |acc, &n| acc * d + n)
}

/// `max |m_ij|`.
pub(crate) fn max_norm<'a>(m: impl IntoIterator<Item = &'a Complex64>) -> f64 {
    m.into_iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl FockDensityMatrix {
    pub fn new(n_modes: usize, cutoff: usize, rho: DMatrix<Complex64>, trace_deficit: f64) -> Result<Self> {
        let dim = (cutoff + 1).pow(n_modes as u32);
        if n_modes == 0 || rho.shape() != (dim, dim) {
            return Err(Error::Dimension(format!(
                "{n_modes} modes at cutoff {cutoff} need a {dim}x{dim} matrix, got {:?}",
                rho.shape()
            )));
        }
        Ok(Self {
            n_modes,
            cutoff,
            rho,
            trace_deficit,
        })
    }

    /// `|0…0⟩⟨0…0|`.
    pub fn vacuum(n_modes: usize, cutoff: usize) -> Self {
        let dim = (cutoff + 1).pow(n_modes as u32);
        let mut rho = DMatrix::zeros(dim, dim);
        rho[(0, 0)] = c(1.0);
        Self {
            n_modes,
            cutoff,
            rho,
            trace_deficit: 0.0,
        }
    }

    /// `|ψ⟩⟨ψ|` for a single-mode amplitude vector of length `cutoff+1`.
    pub fn pure(psi: &DVector<Complex64>, trace_deficit: f64) -> Self {
        Self {
            n_modes: 1,
            cutoff: psi.len() - 1,
            rho: psi * psi.adjoint(),
            trace_deficit,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn trace_deficit(&self) -> f64 {
        self.trace_deficit
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    /// `max |ρ − ρ†|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.rho[(i, j)] - self.rho[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        crate::gaussian::min_hermitian_eigenvalue(&self.rho)
    }

    /// Photon-number distribution of a single-mode state.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.rho[(i, i)].re).collect()
    }

    /// Product state; `other`'s modes follow `self`'s.
    pub fn tensor(&self, other: &FockDensityMatrix) -> Result<FockDensityMatrix> {
        if other.cutoff != self.cutoff {
            return Err(Error::Dimension(format!(
                "cannot tensor cutoffs {} and {}",
                self.cutoff, other.cutoff
            )));
        }
        Ok(FockDensityMatrix {
            n_modes: self.n_modes + other.n_modes,
            cutoff: self.cutoff,
            rho: self.rho.kronecker(&other.rho),
            trace_deficit: self.trace_deficit + other.trace_deficit,
        })
    }

    /// Re-express a single-mode state at another cutoff; shrinking discards
    /// the mass above the new cutoff and adds it to the deficit.
    pub fn with_cutoff(&self, cutoff: usize) -> Result<FockDensityMatrix> {
        if self.n_modes != 1 {
            return Err(Error::ModeCountMismatch {
                expected: 1,
                actual: self.n_modes,
            });
        }
        let dim = cutoff + 1;
        let keep = dim.min(self.dim());
        let mut rho = DMatrix::zeros(dim, dim);
        rho.view_mut((0, 0), (keep, keep))
            .copy_from(&self.rho.view((0, 0), (keep, keep)));
        let lost = self.trace() - rho.trace().re;
        Ok(FockDensityMatrix {
            n_modes: 1,
            cutoff,
            rho,
            trace_deficit: self.trace_deficit + lost.max(0.0),
        })
    }

    /// `ρ / Tr ρ`.
    pub fn normalized_matrix(&self) -> DMatrix<Complex64> {
        &self.rho / c(self.trace())
    }
}

/// Truncated thermal state: `p_n = nbar^n/(nbar+1)^(n+1)` for `n ≤ cutoff`,
/// deficit `(nbar/(nbar+1))^(cutoff+1)`.
pub fn fock_thermal(nbar: f64, cutoff: usize) -> Result<FockDensityMatrix> {
    if !(nbar >= 0.0) || !nbar.is_finite() {
        return Err(domain("nbar", nbar, "thermal photon number must be finite and >= 0"));
    }
    let ratio = nbar / (nbar + 1.0);
    let dim = cutoff + 1;
    let mut rho = DMatrix::zeros(dim, dim);
    let mut p = 1.0 / (nbar + 1.0);
    for n in 0..dim {
        rho[(n, n)] = c(p);
        p *= ratio;
    }
    Ok(FockDensityMatrix {
        n_modes: 1,
        cutoff,
        rho,
        trace_deficit: ratio.powi(dim as i32),
    })
}

/// Coherent-state amplitudes `e^{−|α|²/2} αⁿ/√n!` for `n ≤ cutoff`.
pub fn coherent_vector(alpha: Complex64, cutoff: usize) -> DVector<Complex64> {
    let mut v = DVector::zeros(cutoff + 1);
    let mut amp = c((-alpha.norm_sqr() / 2.0).exp());
    for n in 0..=cutoff {
        v[n] = amp;
        amp = amp * alpha / c(((n + 1) as f64).sqrt());
    }
    v
}

/// Reduced density matrix on `keep` (in the order given).
pub fn fock_partial_trace(rho: &FockDensityMatrix, keep: &[usize]) -> Result<FockDensityMatrix> {
    if keep.is_empty() {
        return Err(Error::ImproperPartition);
    }
    crate::gaussian::check_modes(keep, rho.n_modes)?;
    let d = rho.cutoff + 1;
    let n = rho.n_modes;
    let traced: Vec<usize> = (0..n).filter(|m| !keep.contains(m)).collect();
    let kdim = d.pow(keep.len() as u32);
    let tdim = d.pow(traced.len() as u32);
    let mut out = DMatrix::zeros(kdim, kdim);
    let mut occ = vec![0usize; n];
    let full = |occ: &mut [usize], k: &[usize], t: &[usize]| {
        for (slot, &m) in keep.iter().enumerate() {
            occ[m] = k[slot];
        }
        for (slot, &m) in traced.iter().enumerate() {
            occ[m] = t[slot];
        }
        index_of(occ, d)
    };
    let kdigits: Vec<Vec<usize>> = (0..kdim).map(|i| digits(i, keep.len(), d)).collect();
    let tdigits: Vec<Vec<usize>> = (0..tdim).map(|i| digits(i, traced.len(), d)).collect();
    for (i, ki) in kdigits.iter().enumerate() {
        for (j, kj) in kdigits.iter().enumerate() {
            let mut acc = c(0.0);
            for t in &tdigits {
                let r = full(&mut occ, ki, t);
                let s = full(&mut occ, kj, t);
                acc += rho.rho[(r, s)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(FockDensityMatrix {
        n_modes: keep.len(),
        cutoff: rho.cutoff,
        rho: out,
        trace_deficit: rho.trace_deficit,
    })
}

/// Positive square root of a Hermitian positive-semidefinite matrix.
fn psd_sqrt(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let eig = SymmetricEigen::new(m.clone());
    let roots = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| c(l.max(0.0).sqrt())));
    &eig.eigenvectors * roots * eig.eigenvectors.adjoint()
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²` of the normalised states.
pub fn fock_fidelity(a: &FockDensityMatrix, b: &FockDensityMatrix) -> Result<f64> {
    if a.n_modes != b.n_modes || a.cutoff != b.cutoff {
        return Err(Error::Dimension(format!(
            "fidelity between {}-mode cutoff {} and {}-mode cutoff {}",
            a.n_modes, a.cutoff, b.n_modes, b.cutoff
        )));
    }
    let ra = psd_sqrt(&a.normalized_matrix());
    let inner = &ra * b.normalized_matrix() * &ra;
    let inner = (&inner + inner.adjoint()) * c(0.5);
    let root_sum: f64 = SymmetricEigen::new(inner)
        .eigenvalues
        .iter()
        .map(|l| l.max(0.0).sqrt())
        .sum();
    Ok((root_sum * root_sum).min(1.0))
}

/// `Tr(ρ O)` for an operator acting on each basis state as `O|n⟩ = w|n′⟩`.
fn expect_sparse(rho: &FockDensityMatrix, op: impl Fn(&mut Vec<usize>) -> Option<f64>) -> Complex64 {
    let d = rho.cutoff + 1;
    let mut acc = c(0.0);
    for col in 0..rho.dim() {
        let mut occ = digits(col, rho.n_modes, d);
        if let Some(w) = op(&mut occ) {
            if occ.iter().all(|&k| k < d) {
                // O|col⟩ = w|row⟩ contributes ρ[col, row]·w
                acc += rho.rho[(col, index_of(&occ, d))] * w;
            }
        }
    }
    acc
}

fn lower(occ: &mut [usize], m: usize) -> Option<f64> {
    if occ[m] == 0 {
        return None;
    }
    let w = (occ[m] as f64).sqrt();
    occ[m] -= 1;
    Some(w)
}

fn raise(occ: &mut [usize], m: usize) -> Option<f64> {
    occ[m] += 1;
    Some((occ[m] as f64).sqrt())
}

/// First and second moments of the normalised state, as a Gaussian state.
pub fn gaussian_from_fock_moments(rho: &FockDensityMatrix) -> Result<GaussianState> {
    let n = rho.n_modes;
    let tr = rho.trace();
    let a: Vec<Complex64> = (0..n)
        .map(|k| expect_sparse(rho, |o| lower(o, k)) / tr)
        .collect();
    let mut mean = DVector::zeros(2 * n);
    for k in 0..n {
        mean[k] = a[k].re;
        mean[n + k] = a[k].im;
    }
    let mut cov = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        for l in 0..n {
            // A = ⟨a_k a_l⟩, B = ⟨a_k† a_l⟩
            let big_a = expect_sparse(rho, |o| {
                let w1 = lower(o, l)?;
                Some(w1 * lower(o, k)?)
            }) / tr;
            let big_b = expect_sparse(rho, |o| {
                let w1 = lower(o, l)?;
                Some(w1 * raise(o, k)?)
            }) / tr;
            let delta = if k == l { 1.0 } else { 0.0 };
            let xx = 0.25 * (2.0 * big_a.re + 2.0 * big_b.re + delta);
            let yy = 0.25 * (-2.0 * big_a.re + 2.0 * big_b.re + delta);
            let xy = 0.5 * (big_a.im + big_b.im);
            cov[(k, l)] = xx - a[k].re * a[l].re;
            cov[(n + k, n + l)] = yy - a[k].im * a[l].im;
            cov[(k, n + l)] = xy - a[k].re * a[l].im;
            cov[(n + l, k)] = cov[(k, n + l)];
        }
    }
    let cov = (&cov + cov.transpose()) * 0.5;
    Ok(GaussianState::from_parts(mean, cov))
}
