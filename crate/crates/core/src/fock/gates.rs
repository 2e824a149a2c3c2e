//! Gate unitaries in a truncated Fock basis.
//!
//! A gate is exponentiated on a working space `cutoff + padding` per mode and
//! then projected. The truncated generator splits into blocks that are closed
//! under the gate (fixed `n_a+n_b` for the beamsplitter, fixed `n_a−n_b` for
//! the squeezer), so each block is exponentiated on its own.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{digits, index_of, max_norm, FockDensityMatrix};
use crate::error::{domain, Error, Result};

/// Largest accepted change of the projected result when the padding doubles.
pub const LEAKAGE_BUDGET: f64 = 1e-8;
const PADDINGS: [usize; 4] = [6, 12, 24, 48];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FockGate {
    /// `exp(αa† − α*a)`.
    Displacement(Complex64),
    /// `exp(θ(a†b − ab†))`, `cos θ = τ`: `a → τa + √(1−τ²)b`.
    Beamsplitter(f64),
    /// `exp(r(ab − a†b†))`: `a → a cosh r − b† sinh r`.
    TwoModeSqueezer(f64),
}

impl FockGate {
    pub fn n_modes(&self) -> usize {
        match self {
            FockGate::Displacement(_) => 1,
            _ => 2,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            FockGate::Displacement(a) if !(a.re.is_finite() && a.im.is_finite()) => {
                Err(domain("alpha", a.norm(), "displacement must be finite"))
            }
            FockGate::Beamsplitter(t) if !(0.0..=1.0).contains(&t) => {
                Err(domain("tau", t, "transmissivity must lie in [0, 1]"))
            }
            FockGate::TwoModeSqueezer(r) if !r.is_finite() => {
                Err(domain("r", r, "squeezing must be finite"))
            }
            _ => Ok(()),
        }
    }

    /// Nonzero generator entries `(row, col, value)` on cutoff `w`.
    fn generator(&self, w: usize) -> Vec<(usize, usize, Complex64)> {
        let d = w + 1;
        let sq = |n: usize| (n as f64).sqrt();
        let mut out = Vec::new();
        match *self {
            FockGate::Displacement(alpha) => {
                for n in 0..d {
                    if n + 1 < d {
                        out.push((n + 1, n, alpha * sq(n + 1)));
                    }
                    if n > 0 {
                        out.push((n - 1, n, -alpha.conj() * sq(n)));
                    }
                }
            }
            FockGate::Beamsplitter(tau) => {
                let theta = tau.clamp(-1.0, 1.0).acos();
                for na in 0..d {
                    for nb in 0..d {
                        let col = na * d + nb;
                        if na + 1 < d && nb > 0 {
                            let v = theta * sq(na + 1) * sq(nb);
                            out.push(((na + 1) * d + nb - 1, col, Complex64::new(v, 0.0)));
                        }
                        if na > 0 && nb + 1 < d {
                            let v = -theta * sq(na) * sq(nb + 1);
                            out.push(((na - 1) * d + nb + 1, col, Complex64::new(v, 0.0)));
                        }
                    }
                }
            }
            FockGate::TwoModeSqueezer(r) => {
                for na in 0..d {
                    for nb in 0..d {
                        let col = na * d + nb;
                        if na > 0 && nb > 0 {
                            let v = r * sq(na) * sq(nb);
                            out.push(((na - 1) * d + nb - 1, col, Complex64::new(v, 0.0)));
                        }
                        if na + 1 < d && nb + 1 < d {
                            let v = -r * sq(na + 1) * sq(nb + 1);
                            out.push(((na + 1) * d + nb + 1, col, Complex64::new(v, 0.0)));
                        }
                    }
                }
            }
        }
        out
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// `P_out exp(G_w) E_in`: rows on `out_cutoff` for every mode, columns on
/// the mixed-radix space with per-mode caps `in_caps`.
fn projected_block(gate: &FockGate, in_caps: &[usize], out_cutoff: usize, w: usize) -> DMatrix<Complex64> {
    let k = gate.n_modes();
    let (dw, dout) = (w + 1, out_cutoff + 1);
    let full = dw.pow(k as u32);
    let entries = gate.generator(w);

    let mut parent: Vec<usize> = (0..full).collect();
    for &(r, c, _) in &entries {
        let (a, b) = (find(&mut parent, r), find(&mut parent, c));
        if a != b {
            parent[a] = b;
        }
    }
    let to_in = |i: usize| -> Option<usize> {
        let occ = digits(i, k, dw);
        occ.iter()
            .zip(in_caps)
            .all(|(&n, &cap)| n <= cap)
            .then(|| occ.iter().zip(in_caps).fold(0, |acc, (&n, &cap)| acc * (cap + 1) + n))
    };
    let to_out = |i: usize| -> Option<usize> {
        let occ = digits(i, k, dw);
        occ.iter().all(|&n| n < dout).then(|| index_of(&occ, dout))
    };

    // only blocks that contain an input column matter
    let mut needed = vec![false; full];
    for i in 0..full {
        if to_in(i).is_some() {
            let root = find(&mut parent, i);
            needed[root] = true;
        }
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); full];
    let mut local = vec![0usize; full];
    for i in 0..full {
        let root = find(&mut parent, i);
        if needed[root] {
            local[i] = members[root].len();
            members[root].push(i);
        }
    }
    // H = iG per block
    let mut blocks: Vec<Option<DMatrix<Complex64>>> = members
        .iter()
        .map(|g| (g.len() > 1).then(|| DMatrix::zeros(g.len(), g.len())))
        .collect();
    for &(r, c, v) in &entries {
        let root = find(&mut parent, r);
        if let Some(h) = blocks[root].as_mut() {
            h[(local[r], local[c])] += Complex64::i() * v;
        }
    }

    let in_dim: usize = in_caps.iter().map(|c| c + 1).product();
    let mut a = DMatrix::zeros(dout.pow(k as u32), in_dim);
    for (group, block) in members.iter().zip(&blocks) {
        if group.is_empty() {
            continue;
        }
        let (slots, cols): (Vec<usize>, Vec<usize>) = group
            .iter()
            .enumerate()
            .filter_map(|(s, &i)| to_in(i).map(|j| (s, j)))
            .unzip();
        // columns `slots` of exp(−iH)
        let u = match block {
            None => DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0)),
            Some(h) => {
                let eig = SymmetricEigen::new((h + h.adjoint()) * Complex64::new(0.5, 0.0));
                let phases = eig.eigenvalues.map(|l| Complex64::new(0.0, -l).exp());
                let v_rows = eig.eigenvectors.adjoint().select_columns(&slots);
                &eig.eigenvectors * DMatrix::from_diagonal(&phases) * v_rows
            }
        };
        for (s_row, &i) in group.iter().enumerate() {
            if let Some(row) = to_out(i) {
                for (c_slot, &col) in cols.iter().enumerate() {
                    a[(row, col)] = u[(s_row, c_slot)];
                }
            }
        }
    }
    a
}

/// Try paddings in turn until the result moves by less than the budget when
/// the padding doubles.
fn converge<T>(
    build: impl Fn(usize) -> T,
    diff: impl Fn(&T, &T) -> f64,
) -> Result<(T, usize, f64)> {
    let mut worst = f64::INFINITY;
    for &p in &PADDINGS {
        let coarse = build(p);
        let fine = build(2 * p);
        worst = diff(&coarse, &fine);
        if worst <= LEAKAGE_BUDGET {
            return Ok((fine, p, worst));
        }
    }
    Err(Error::Leakage {
        leakage: worst,
        budget: LEAKAGE_BUDGET,
        padding: *PADDINGS.last().unwrap(),
    })
}

/// Projected gate matrix on `(cutoff+1)^k` with its recorded leakage.
#[derive(Debug, Clone)]
pub struct FockUnitary {
    pub gate: FockGate,
    pub cutoff: usize,
    pub padding: usize,
    /// Change of the projected block when the padding doubles.
    pub leakage: f64,
    pub matrix: DMatrix<Complex64>,
}

impl FockUnitary {
    /// `max |U†U − I|` of the projected block; nonzero where the gate couples
    /// to levels above the cutoff.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.matrix.ncols();
        max_norm(&(self.matrix.adjoint() * &self.matrix - DMatrix::identity(n, n)))
    }
}

fn build_unitary(gate: FockGate, cutoff: usize) -> Result<FockUnitary> {
    if cutoff < 1 {
        return Err(domain("cutoff", cutoff as f64, "need cutoff >= 1"));
    }
    gate.validate()?;
    let (matrix, padding, leakage) = converge(
        |p| projected_block(&gate, &vec![cutoff; gate.n_modes()], cutoff, cutoff + p),
        |a, b| max_norm(&(a - b)),
    )?;
    Ok(FockUnitary {
        gate,
        cutoff,
        padding,
        leakage,
        matrix,
    })
}

pub fn fock_displacement(alpha: Complex64, cutoff: usize) -> Result<FockUnitary> {
    build_unitary(FockGate::Displacement(alpha), cutoff)
}

pub fn fock_beamsplitter(tau: f64, cutoff: usize) -> Result<FockUnitary> {
    build_unitary(FockGate::Beamsplitter(tau), cutoff)
}

pub fn fock_two_mode_squeezer(r: f64, cutoff: usize) -> Result<FockUnitary> {
    build_unitary(FockGate::TwoModeSqueezer(r), cutoff)
}

#[derive(Debug, Clone)]
pub struct GateApplication {
    pub state: FockDensityMatrix,
    pub padding: usize,
    /// Change of the output state when the padding doubles.
    pub leakage: f64,
    /// Probability mass pushed above `out_cutoff`.
    pub trace_loss: f64,
}

/// `ρ → AρA†` with `A = P_out U E_in`; `U` acts on all modes of `rho`.
pub fn apply_gate(gate: FockGate, rho: &FockDensityMatrix, out_cutoff: usize) -> Result<GateApplication> {
    gate.validate()?;
    if rho.n_modes() != gate.n_modes() {
        return Err(Error::ModeCountMismatch {
            expected: gate.n_modes(),
            actual: rho.n_modes(),
        });
    }
    let base = rho.cutoff().max(out_cutoff);
    let (out, padding, leakage) = converge(
        |p| {
            let a = projected_block(&gate, &vec![rho.cutoff(); gate.n_modes()], out_cutoff, base + p);
            &a * rho.matrix() * a.adjoint()
        },
        |a, b| max_norm(&(a - b)),
    )?;
    let out = (&out + out.adjoint()) * Complex64::new(0.5, 0.0);
    let trace_loss = (rho.trace() - out.trace().re).max(0.0);
    let state = FockDensityMatrix::new(
        rho.n_modes(),
        out_cutoff,
        out,
        rho.trace_deficit() + trace_loss,
    )?;
    Ok(GateApplication {
        state,
        padding,
        leakage,
        trace_loss,
    })
}

/// Signal mode of `U(ρ ⊗ |0⟩⟨0|)U†` with the ancilla traced out, for a
/// two-mode gate whose second mode starts in vacuum. Only the vacuum column
/// of the ancilla is built, so `out_cutoff` can be much larger than in
/// [`apply_gate`].
pub fn apply_gate_vacuum_ancilla(
    gate: FockGate,
    rho: &FockDensityMatrix,
    out_cutoff: usize,
) -> Result<GateApplication> {
    gate.validate()?;
    if gate.n_modes() != 2 || rho.n_modes() != 1 {
        return Err(Error::ModeCountMismatch {
            expected: 1,
            actual: rho.n_modes(),
        });
    }
    let base = rho.cutoff().max(out_cutoff);
    let d = out_cutoff + 1;
    let (out, padding, leakage) = converge(
        |p| {
            let a = projected_block(&gate, &[rho.cutoff(), 0], out_cutoff, base + p);
            let mut acc = DMatrix::<Complex64>::zeros(d, d);
            for j in 0..d {
                // rows |n, j⟩ for fixed ancilla j
                let rows: Vec<usize> = (0..d).map(|n| n * d + j).collect();
                let aj = a.select_rows(&rows);
                acc += &aj * rho.matrix() * aj.adjoint();
            }
            acc
        },
        |a, b| max_norm(&(a - b)),
    )?;
    let out = (&out + out.adjoint()) * Complex64::new(0.5, 0.0);
    let trace_loss = (rho.trace() - out.trace().re).max(0.0);
    let state = FockDensityMatrix::new(1, out_cutoff, out, rho.trace_deficit() + trace_loss)?;
    Ok(GateApplication {
        state,
        padding,
        leakage,
        trace_loss,
    })
}
