//! Sparse-grid approximation of Korobov functions, compiled into quantum
//! signal processing (QSP) and linear-combination-of-unitaries (LCU) circuits
//! and checked on an exact dense statevector simulator.
//!
//! The pipeline, bottom up:
//!
//! - [`simulator`]: gates, circuits, statevectors and resource counters.
//! - [`qsp`]: the signal unitary `W(x)`, the phased ansatz and the zero-phase
//!   circuits whose top-left entry is the Chebyshev polynomial `T_r(x)`.
//! - [`sparsegrid`]: hierarchical hat basis, sparse-grid enumeration, surplus
//!   coefficients and the per-point expansion into signed Chebyshev products.
//! - [`lcu`]: state preparation, select multiplexer, `U_LCU` assembly and the
//!   Hadamard-test readout.
//! - [`analysis`]: test corpus, error norms, convergence studies, coefficient
//!   audits and asymptotic resource estimates.

pub mod analysis;
pub mod error;
pub mod lcu;
pub mod qsp;
pub mod quadrature;
pub mod simulator;
pub mod sparsegrid;

pub use error::{Error, Result};
