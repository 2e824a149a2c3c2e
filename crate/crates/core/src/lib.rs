//! Optimal Weyl-Heisenberg covariant N→M broadcasting of displaced thermal
//! states, simulated as a Gaussian optical circuit.
//!
//! The crate is organised around four layers:
//!
//! * [`gaussian`]: covariance-matrix states, symplectic transforms, Gaussian
//!   channels, heterodyne conditioning and entanglement/fidelity diagnostics.
//! * [`circuits`]: the concentrate → amplify → distribute pipeline, its exact
//!   broadcasting and phase-conjugating variants, and the closed-form photon
//!   number and noise bounds it saturates.
//! * [`feedforward`]: the amplifier realised by a beam splitter, heterodyne
//!   detection and conditional displacement, analytically and by Monte Carlo.
//! * [`fock`]: an independent truncated Fock-space oracle for the same circuit.
//!
//! Conventions: quadratures are `x = (a + a†)/2`, `y = (a − a†)/(2i)`, so the
//! vacuum has variance 1/4 per quadrature. Phase-space vectors use block order
//! `(x_0 … x_{n-1}, y_0 … y_{n-1})` with `Ω = [[0, I], [−I, 0]]`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod circuits;
pub mod error;
pub mod feedforward;
pub mod fock;
pub mod gaussian;
pub mod par;

pub use error::{Error, Result};
pub use num_complex::Complex64;
