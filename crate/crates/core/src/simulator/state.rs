use super::{Circuit, GateOp, C64};
use crate::{Error, Result};

/// Dense amplitude vector of length `2^width`.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    width: usize,
    amps: Vec<C64>,
}

impl Statevector {
    /// `|0…0⟩` on `width` qubits.
    pub fn zero(width: usize) -> Self {
        Self::basis(width, 0)
    }

    pub fn basis(width: usize, index: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << width];
        amps[index] = C64::new(1.0, 0.0);
        Self { width, amps }
    }

    /// Wraps raw amplitudes; the length must be a power of two. Normalization
    /// is the caller's business.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        Ok(Self {
            width: len.trailing_zeros() as usize,
            amps,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn apply(&mut self, gate: &GateOp) -> Result<()> {
        for q in gate.qubits() {
            if q >= self.width {
                return Err(Error::QubitOutOfRange {
                    qubit: q,
                    width: self.width,
                });
            }
        }
        gate.apply_masked(&mut self.amps, 0);
        Ok(())
    }
}

/// `U|ψ⟩` for the full-register embedding of `gate`.
pub fn apply_gate(state: &Statevector, gate: &GateOp) -> Result<Statevector> {
    let mut out = state.clone();
    out.apply(gate)?;
    Ok(out)
}

pub fn run_circuit(circuit: &Circuit, initial: &Statevector) -> Result<Statevector> {
    if initial.width() != circuit.width() {
        return Err(Error::WidthMismatch {
            expected: circuit.width(),
            found: initial.width(),
        });
    }
    let mut state = initial.clone();
    for op in circuit.ops() {
        state.apply(op)?;
    }
    Ok(state)
}

/// `⟨ψ|Z⊗I⊗…⊗I|ψ⟩` with Z on qubit 0.
pub fn expectation_z_first(state: &Statevector) -> f64 {
    state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, a)| if i & 1 == 0 { a.norm_sqr() } else { -a.norm_sqr() })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::{gates, Mat2};
    use approx::assert_abs_diff_eq;

    fn single(q: usize, m: Mat2) -> GateOp {
        GateOp::single(q, m).unwrap()
    }

    #[test]
    fn x_flips_zero() {
        let s = apply_gate(&Statevector::zero(1), &single(0, gates::pauli_x())).unwrap();
        assert_eq!(s, Statevector::basis(1, 1));
    }

    #[test]
    fn hadamard_superposition() {
        let s = apply_gate(&Statevector::zero(1), &single(0, gates::hadamard())).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(s.amplitude(0).re, r, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitude(1).re, r, epsilon = 1e-15);
        assert_abs_diff_eq!(expectation_z_first(&s), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn multiplexer_selects_block() {
        // data qubit 0, selector qubit 1 in |1⟩
        let mux = GateOp::multiplexed(0, vec![1], vec![Some(gates::identity()), Some(gates::pauli_x())]).unwrap();
        let s = apply_gate(&Statevector::basis(2, 0b10), &mux).unwrap();
        assert_eq!(s, Statevector::basis(2, 0b11));
        let s = apply_gate(&Statevector::basis(2, 0b00), &mux).unwrap();
        assert_eq!(s, Statevector::basis(2, 0b00));
    }

    #[test]
    fn run_examples() {
        let empty = Circuit::new(1);
        assert_eq!(empty.run(&Statevector::zero(1)).unwrap(), Statevector::zero(1));

        let hh = Circuit::new(1)
            .with(single(0, gates::hadamard()))
            .unwrap()
            .with(single(0, gates::hadamard()))
            .unwrap();
        let s = hh.run(&Statevector::zero(1)).unwrap();
        assert_abs_diff_eq!(s.amplitude(0).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitude(1).norm(), 0.0, epsilon = 1e-15);

        let xx = Circuit::new(2)
            .with(single(0, gates::pauli_x()))
            .unwrap()
            .with(single(1, gates::pauli_x()))
            .unwrap();
        assert_eq!(xx.run(&Statevector::zero(2)).unwrap(), Statevector::basis(2, 3));
    }

    #[test]
    fn z_first_expectations() {
        assert_eq!(expectation_z_first(&Statevector::zero(1)), 1.0);
        // |1⟩ on qubit 0, |0⟩ on qubit 1
        assert_eq!(expectation_z_first(&Statevector::basis(2, 0b01)), -1.0);
    }

    #[test]
    fn errors() {
        let s = Statevector::zero(1);
        assert_eq!(
            apply_gate(&s, &single(3, gates::pauli_x())),
            Err(Error::QubitOutOfRange { qubit: 3, width: 1 })
        );
        assert_eq!(
            run_circuit(&Circuit::new(2), &s),
            Err(Error::WidthMismatch { expected: 2, found: 1 })
        );
        assert!(Circuit::new(1).with(single(1, gates::pauli_x())).is_err());
        assert_eq!(
            Statevector::from_amplitudes(vec![C64::new(1.0, 0.0); 3]),
            Err(Error::NotPowerOfTwo(3))
        );
    }
}
