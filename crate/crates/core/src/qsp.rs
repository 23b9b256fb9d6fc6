//! Quantum signal processing on one qubit.
//!
//! The signal unitary is `W(x) = e^{i arccos(x) σ_x}`, and the ansatz
//! `V_φ(x) = e^{iφ_0σ_z} W(x) e^{iφ_1σ_z} ⋯ W(x) e^{iφ_ℓσ_z}`. With all phases
//! zero, `⟨0|W(x)^r|0⟩ = T_r(x)`.

use crate::simulator::{c, gates, resource_report, Circuit, GateOp, Mat2, ResourceReport};
use crate::{Error, Result};

/// A point `x ∈ [−1, 1]` fed to the signal unitary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalPoint(f64);

impl SignalPoint {
    pub fn new(x: f64) -> Result<Self> {
        if x.is_finite() && x.abs() <= 1.0 {
            Ok(Self(x))
        } else {
            Err(Error::SignalDomain(x))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn theta(self) -> f64 {
        self.0.acos()
    }

    /// `√(1 − x²)`, clamped at zero for `|x| = 1`.
    pub fn complement(self) -> f64 {
        (1.0 - self.0 * self.0).max(0.0).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSequence(Vec<f64>);

impl PhaseSequence {
    pub fn new(phases: Vec<f64>) -> Result<Self> {
        if phases.is_empty() {
            return Err(Error::EmptyPhases);
        }
        Ok(Self(phases))
    }

    /// `r + 1` zero phases.
    pub fn zeros(r: usize) -> Self {
        Self(vec![0.0; r + 1])
    }

    pub fn phases(&self) -> &[f64] {
        &self.0
    }

    /// Number of `W(x)` factors, `ℓ = len − 1`.
    pub fn signal_count(&self) -> usize {
        self.0.len() - 1
    }
}

/// `[[x, i√(1−x²)], [i√(1−x²), x]]`.
pub fn signal_encoding(x: SignalPoint) -> Mat2 {
    let s = x.complement();
    Mat2::new(c(x.value(), 0.0), c(0.0, s), c(0.0, s), c(x.value(), 0.0))
}

pub fn qsp_ansatz(phases: &PhaseSequence, x: SignalPoint) -> Mat2 {
    let w = signal_encoding(x);
    let (first, rest) = phases.phases().split_first().expect("non-empty by construction");
    rest.iter()
        .fold(gates::z_phase(*first), |acc, &phi| acc * w * gates::z_phase(phi))
}

/// A one-qubit QSP circuit whose signal gates are bound to a point later.
#[derive(Debug, Clone, PartialEq)]
pub struct QspCircuit {
    phases: PhaseSequence,
    keep_identity_phases: bool,
}

/// Zero-phase QSP circuit of degree `r`: `r + 1` explicit identity phase gates
/// interleaved with `r` signal gates, so `⟨0|U_r(x)|0⟩ = T_r(x)`.
pub fn chebyshev_circuit(r: usize) -> QspCircuit {
    QspCircuit {
        phases: PhaseSequence::zeros(r),
        keep_identity_phases: true,
    }
}

impl QspCircuit {
    pub fn new(phases: PhaseSequence) -> Self {
        Self {
            phases,
            keep_identity_phases: true,
        }
    }

    /// Drop phase gates with `φ = 0` from bound circuits.
    pub fn without_identity_phases(mut self) -> Self {
        self.keep_identity_phases = false;
        self
    }

    pub fn keep_identity_phases(mut self, keep: bool) -> Self {
        self.keep_identity_phases = keep;
        self
    }

    pub fn phases(&self) -> &PhaseSequence {
        &self.phases
    }

    pub fn degree(&self) -> usize {
        self.phases.signal_count()
    }

    /// Gate sequence in time order on `qubit`. The last factor of the matrix
    /// product is applied first.
    pub fn ops_on(&self, qubit: usize, x: SignalPoint) -> Vec<GateOp> {
        let w = signal_encoding(x);
        let mut ops = Vec::with_capacity(2 * self.phases.0.len());
        for (k, &phi) in self.phases.phases().iter().enumerate().rev() {
            if phi != 0.0 || self.keep_identity_phases {
                ops.push(GateOp::single(qubit, gates::z_phase(phi)).expect("phase gate is unitary"));
            }
            if k > 0 {
                ops.push(GateOp::single(qubit, w).expect("signal gate is unitary"));
            }
        }
        ops
    }

    pub fn bind(&self, x: SignalPoint) -> Circuit {
        let mut circuit = Circuit::new(1);
        circuit.extend(self.ops_on(0, x)).expect("qubit 0 exists");
        circuit
    }

    /// Structure does not depend on the bound point.
    pub fn resource_report(&self) -> ResourceReport {
        resource_report(&self.bind(SignalPoint(1.0)))
    }
}

/// `T_r(x)` by the three-term recurrence.
pub fn chebyshev_first_kind(r: usize, x: f64) -> f64 {
    match r {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut prev, mut cur) = (1.0, x);
            for _ in 2..=r {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// `U_r(x)` with `U_0 = 1`, `U_1 = 2x`.
pub fn chebyshev_second_kind(r: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * x);
    if r == 0 {
        return prev;
    }
    for _ in 2..=r {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}
