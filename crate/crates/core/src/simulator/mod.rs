//! Exact dense statevector simulation.
//!
//! Qubits are little-endian: qubit `q` is bit `q` of a basis-state index, and
//! qubit 0 is the "first qubit" that the readouts measure.

mod gate;
mod resources;
mod state;
pub mod trace;

pub use gate::{GateKind, GateOp};
pub use resources::{resource_report, ResourceReport};
pub use state::{apply_gate, expectation_z_first, run_circuit, Statevector};

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use crate::{Error, Result};

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;
pub type DMat = DMatrix<C64>;

/// Tolerance on `‖U†U − I‖_max` when a gate is constructed.
pub const UNITARY_TOL: f64 = 1e-12;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub mod gates {
    //! Standard single-qubit matrices.
    use super::{c, Mat2};

    pub fn identity() -> Mat2 {
        Mat2::identity()
    }

    pub fn pauli_x() -> Mat2 {
        Mat2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
    }

    pub fn pauli_y() -> Mat2 {
        Mat2::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0))
    }

    pub fn pauli_z() -> Mat2 {
        Mat2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0))
    }

    pub fn hadamard() -> Mat2 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Mat2::new(c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0))
    }

    /// `e^{iφσ_z} = diag(e^{iφ}, e^{-iφ})`.
    pub fn z_phase(phi: f64) -> Mat2 {
        Mat2::new(
            super::C64::from_polar(1.0, phi),
            c(0.0, 0.0),
            c(0.0, 0.0),
            super::C64::from_polar(1.0, -phi),
        )
    }
}

/// Largest entry of `|U†U − I|`.
pub fn unitarity_deviation(m: &DMat) -> f64 {
    let n = m.nrows();
    let prod = m.adjoint() * m;
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - c(target, 0.0)).norm());
        }
    }
    worst
}

pub(crate) fn check_unitary(m: &DMat) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::MatrixDimension {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    let deviation = unitarity_deviation(m);
    if deviation > UNITARY_TOL || !deviation.is_finite() {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(())
}

pub(crate) fn mat2_to_dense(m: &Mat2) -> DMat {
    DMat::from_fn(2, 2, |i, j| m[(i, j)])
}

/// An ordered list of gates on a fixed-width register.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    width: usize,
    ops: Vec<GateOp>,
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Self { width, ops: Vec::new() }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn push(&mut self, op: GateOp) -> Result<()> {
        for q in op.qubits() {
            if q >= self.width {
                return Err(Error::QubitOutOfRange {
                    qubit: q,
                    width: self.width,
                });
            }
        }
        self.ops.push(op);
        Ok(())
    }

    pub fn with(mut self, op: GateOp) -> Result<Self> {
        self.push(op)?;
        Ok(self)
    }

    pub fn extend<I: IntoIterator<Item = GateOp>>(&mut self, ops: I) -> Result<()> {
        for op in ops {
            self.push(op)?;
        }
        Ok(())
    }

    /// Append every op of `other`, with qubit `q` of `other` placed on `map[q]`.
    pub fn append_mapped(&mut self, other: &Circuit, map: &[usize]) -> Result<()> {
        if map.len() != other.width {
            return Err(Error::WidthMismatch {
                expected: other.width,
                found: map.len(),
            });
        }
        for op in &other.ops {
            self.push(op.remap(map))?;
        }
        Ok(())
    }

    pub fn run(&self, initial: &Statevector) -> Result<Statevector> {
        run_circuit(self, initial)
    }

    /// Dense `2^w × 2^w` matrix of the whole circuit, built column by column.
    /// Intended for small widths.
    pub fn to_matrix(&self) -> Result<DMat> {
        let dim = 1usize << self.width;
        let mut out = DMat::zeros(dim, dim);
        for col in 0..dim {
            let state = self.run(&Statevector::basis(self.width, col))?;
            for (row, a) in state.amplitudes().iter().enumerate() {
                out[(row, col)] = *a;
            }
        }
        Ok(out)
    }
}
