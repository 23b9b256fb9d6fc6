//! Linear combination of unitaries: `U_LCU = (I ⊗ F†) U_c (I ⊗ F)` with
//! `⟨0|U_LCU|0⟩ = Σ_j sign_j a_j ⟨0|U_j|0⟩ / ‖a‖₁`, read out by a Hadamard test.
//!
//! Register layout of an assembled LCU circuit: data qubits `0..d`, selector
//! (ancilla) qubits `d..d+s`. The Hadamard-test circuit prepends its test
//! qubit as qubit 0 and shifts everything else up by one.

use crate::qsp::{chebyshev_circuit, SignalPoint};
use crate::simulator::{
    c, expectation_z_first, gates, resource_report, Circuit, DMat, GateKind, GateOp, Mat2, ResourceReport, Statevector,
    C64,
};
use crate::sparsegrid::{chebyshev_expansion, ChebyshevTerm, SurplusMap};
use crate::{Error, Result};

/// `⌈log₂ M⌉`, with `0` for `M = 1`.
pub fn ancilla_count(terms: usize) -> usize {
    terms.next_power_of_two().trailing_zeros() as usize
}

/// Everything needed to assemble `U_LCU`.
#[derive(Debug, Clone, PartialEq)]
pub struct LcuPlan {
    coefficients: Vec<f64>,
    term_circuits: Vec<Circuit>,
    term_signs: Vec<f64>,
    ancilla_count: usize,
    one_norm: f64,
    degree_sum: usize,
}

impl LcuPlan {
    /// Signed weights; each sign is absorbed into its term. Zero weights are
    /// rejected.
    pub fn new(weights: &[f64], term_circuits: Vec<Circuit>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyLcu);
        }
        if weights.len() != term_circuits.len() {
            return Err(Error::DimensionMismatch {
                expected: weights.len(),
                found: term_circuits.len(),
            });
        }
        let d = term_circuits[0].width();
        for (j, (w, circuit)) in weights.iter().zip(&term_circuits).enumerate() {
            if *w == 0.0 || !w.is_finite() {
                return Err(Error::NonPositiveCoefficient { index: j, value: *w });
            }
            if circuit.width() != d {
                return Err(Error::WidthMismatch {
                    expected: d,
                    found: circuit.width(),
                });
            }
        }
        let coefficients: Vec<f64> = weights.iter().map(|w| w.abs()).collect();
        Ok(Self {
            one_norm: coefficients.iter().sum(),
            term_signs: weights.iter().map(|w| w.signum()).collect(),
            ancilla_count: ancilla_count(weights.len()),
            coefficients,
            term_circuits,
            degree_sum: 0,
        })
    }

    /// Plan for a per-point Chebyshev expansion: each term becomes a tensor
    /// product of zero-phase QSP circuits of degree `k_j` bound at `u_j`.
    /// Zero-weight terms are dropped; `None` if nothing is left.
    pub fn from_terms(terms: &[ChebyshevTerm], keep_identity_phases: bool) -> Result<Option<Self>> {
        let kept: Vec<&ChebyshevTerm> = terms.iter().filter(|t| t.weight != 0.0).collect();
        if kept.is_empty() {
            return Ok(None);
        }
        let d = kept[0].degrees.len();
        let mut circuits = Vec::with_capacity(kept.len());
        let mut degree_sum = 0usize;
        for t in &kept {
            let mut circuit = Circuit::new(d);
            for (q, (&k, &u)) in t.degrees.iter().zip(&t.arguments).enumerate() {
                let x = SignalPoint::new(u).map_err(|_| Error::ArgumentOutOfRange(u))?;
                let qsp = chebyshev_circuit(k as usize).keep_identity_phases(keep_identity_phases);
                circuit.extend(qsp.ops_on(q, x))?;
                degree_sum += k as usize;
            }
            circuits.push(circuit);
        }
        let weights: Vec<f64> = kept.iter().map(|t| t.weight).collect();
        let mut plan = Self::new(&weights, circuits)?;
        plan.degree_sum = degree_sum;
        Ok(Some(plan))
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn term_circuits(&self) -> &[Circuit] {
        &self.term_circuits
    }

    pub fn term_signs(&self) -> &[f64] {
        &self.term_signs
    }

    pub fn term_count(&self) -> usize {
        self.coefficients.len()
    }

    pub fn ancilla_count(&self) -> usize {
        self.ancilla_count
    }

    pub fn data_width(&self) -> usize {
        self.term_circuits[0].width()
    }

    pub fn one_norm(&self) -> f64 {
        self.one_norm
    }

    /// `‖n‖₁`: total Chebyshev degree over all terms (0 for plans built
    /// from raw circuits).
    pub fn degree_sum(&self) -> usize {
        self.degree_sum
    }
}

/// Dense unitary `F` on `s = ⌈log₂ M⌉` qubits with
/// `F|0⟩ = Σ_j √(a_j/‖a‖₁) |j⟩`, completed by a Householder reflection.
pub fn prepare_state_unitary(a: &[f64]) -> Result<DMat> {
    if a.is_empty() {
        return Err(Error::EmptyLcu);
    }
    if let Some((index, &value)) = a.iter().enumerate().find(|(_, v)| **v <= 0.0 || !v.is_finite()) {
        return Err(Error::NonPositiveCoefficient { index, value });
    }
    let dim = 1usize << ancilla_count(a.len());
    let norm: f64 = a.iter().sum();
    let mut v = vec![0.0; dim];
    for (slot, &aj) in v.iter_mut().zip(a) {
        *slot = (aj / norm).sqrt();
    }
    // H = I − 2 w wᵀ / (wᵀw), w = v − e₀, maps e₀ to v for unit v.
    let mut w = v.clone();
    w[0] -= 1.0;
    let ww: f64 = w.iter().map(|x| x * x).sum();
    let mut m = DMat::identity(dim, dim);
    if ww > 1e-30 {
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] -= c(2.0 * w[i] * w[j] / ww, 0.0);
            }
        }
        // the reflection's first column is v up to rounding; pin it exactly
        for (i, &vi) in v.iter().enumerate() {
            m[(i, 0)] = c(vi, 0.0);
        }
    }
    Ok(m)
}

/// Select oracle `U_c = Σ_j |j⟩⟨j| ⊗ sign_j U_j` as a sequence of
/// uniformly controlled single-qubit gates, one per (data qubit, gate layer).
/// Every term circuit must be a product of uncontrolled single-qubit gates on
/// the same `d` qubits; qubit `q` of a term is placed on `data[q]`. Selector
/// values `j ≥ M` act as identity.
pub fn multiplexer(
    term_circuits: &[Circuit],
    term_signs: &[f64],
    data: &[usize],
    selectors: &[usize],
) -> Result<Vec<GateOp>> {
    if term_circuits.is_empty() {
        return Err(Error::EmptyLcu);
    }
    if term_signs.len() != term_circuits.len() {
        return Err(Error::DimensionMismatch {
            expected: term_circuits.len(),
            found: term_signs.len(),
        });
    }
    let d = data.len();
    // per term, per data qubit: the single-qubit gates in time order
    let mut layers: Vec<Vec<Vec<Mat2>>> = Vec::with_capacity(term_circuits.len());
    for (j, circuit) in term_circuits.iter().enumerate() {
        if circuit.width() != d {
            return Err(Error::WidthMismatch {
                expected: d,
                found: circuit.width(),
            });
        }
        let mut per_qubit = vec![Vec::new(); d];
        for op in circuit.ops() {
            match op.kind() {
                GateKind::Single(m) => per_qubit[op.targets()[0]].push(*m),
                _ => return Err(Error::UnsupportedTerm { term: j }),
            }
        }
        if term_signs[j] < 0.0 {
            match per_qubit.iter_mut().find(|gs| !gs.is_empty()) {
                Some(gs) => gs[0] = -gs[0],
                None => per_qubit[0].push(-gates::identity()),
            }
        }
        layers.push(per_qubit);
    }

    let mut ops = Vec::new();
    for (q, &target) in data.iter().enumerate() {
        let depth = layers.iter().map(|t| t[q].len()).max().unwrap_or(0);
        for layer in 0..depth {
            let blocks: Vec<Option<Mat2>> = layers.iter().map(|t| t[q].get(layer).copied()).collect();
            ops.push(GateOp::multiplexed(target, selectors.to_vec(), blocks)?);
        }
    }
    Ok(ops)
}

/// `U_LCU` on `d + s` qubits.
pub fn assemble_lcu(plan: &LcuPlan) -> Result<Circuit> {
    let d = plan.data_width();
    let s = plan.ancilla_count;
    let data: Vec<usize> = (0..d).collect();
    let selectors: Vec<usize> = (d..d + s).collect();
    let mut circuit = Circuit::new(d + s);
    let prep = if s > 0 {
        Some(prepare_state_unitary(&plan.coefficients)?)
    } else {
        None
    };
    if let Some(f) = &prep {
        circuit.push(GateOp::dense(selectors.clone(), f.clone())?)?;
    }
    circuit.extend(multiplexer(&plan.term_circuits, &plan.term_signs, &data, &selectors)?)?;
    if let Some(f) = &prep {
        circuit.push(GateOp::dense(selectors.clone(), f.adjoint())?)?;
    }
    Ok(circuit)
}

/// `H` on the test qubit, `target` controlled on it, `H` again. The test
/// qubit is qubit 0; target qubit `q` moves to `q + 1`.
pub fn hadamard_test_circuit(target: &Circuit) -> Result<Circuit> {
    let w = target.width();
    let shift: Vec<usize> = (1..=w).collect();
    let mut circuit = Circuit::new(w + 1);
    circuit.push(GateOp::single(0, gates::hadamard())?)?;
    for op in target.ops() {
        circuit.push(GateOp::controlled(0, op.remap(&shift))?)?;
    }
    circuit.push(GateOp::single(0, gates::hadamard())?)?;
    Ok(circuit)
}

/// `Re⟨0|target|0⟩`, as the exact `⟨Z⟩` of the test qubit.
pub fn hadamard_test(target: &Circuit) -> Result<f64> {
    let circuit = hadamard_test_circuit(target)?;
    let out = circuit.run(&Statevector::zero(circuit.width()))?;
    Ok(expectation_z_first(&out))
}

/// `⟨0|target|0⟩` straight from the statevector.
pub fn direct_amplitude(target: &Circuit) -> Result<C64> {
    Ok(target.run(&Statevector::zero(target.width()))?.amplitude(0))
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EvalOptions {
    /// Drop the `e^{i·0·σ_z}` gates from the QSP blocks.
    pub drop_identity_phases: bool,
}

/// Result of evaluating `f_n^s(x)` through the circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitEvaluation {
    /// `‖w‖₁ · raw`, the rescaled estimate of `f_n^s(x)`.
    pub value: f64,
    /// Hadamard-test output, the normalized amplitude.
    pub raw: f64,
    /// `Re⟨0|U_LCU|0⟩` read directly from the statevector.
    pub direct_amplitude: f64,
    pub one_norm: f64,
    pub term_count: usize,
    pub ancilla_count: usize,
    pub degree_sum: usize,
    /// Report of the full Hadamard-test circuit.
    pub report: ResourceReport,
    /// Report of `U_LCU` alone.
    pub lcu_report: ResourceReport,
}

/// Build the LCU plan for `x`, assemble `U_LCU`, run the Hadamard test and
/// rescale by `‖w‖₁`.
pub fn evaluate_via_circuit(s: &SurplusMap, x: &[f64]) -> Result<CircuitEvaluation> {
    evaluate_via_circuit_with(s, x, EvalOptions::default())
}

pub fn evaluate_via_circuit_with(s: &SurplusMap, x: &[f64], opts: EvalOptions) -> Result<CircuitEvaluation> {
    let terms = chebyshev_expansion(s, x)?;
    if let Some(bad) = terms.iter().flat_map(|t| t.arguments.iter()).find(|u| u.abs() > 1.0) {
        return Err(Error::ArgumentOutOfRange(*bad));
    }
    let Some(plan) = LcuPlan::from_terms(&terms, !opts.drop_identity_phases)? else {
        return Ok(CircuitEvaluation {
            value: 0.0,
            raw: 0.0,
            direct_amplitude: 0.0,
            one_norm: 0.0,
            term_count: 0,
            ancilla_count: 0,
            degree_sum: 0,
            report: ResourceReport::default(),
            lcu_report: ResourceReport::default(),
        });
    };
    let lcu = assemble_lcu(&plan)?;
    let test = hadamard_test_circuit(&lcu)?;
    let out = test.run(&Statevector::zero(test.width()))?;
    let raw = expectation_z_first(&out);
    Ok(CircuitEvaluation {
        value: plan.one_norm() * raw,
        raw,
        direct_amplitude: direct_amplitude(&lcu)?.re,
        one_norm: plan.one_norm(),
        term_count: plan.term_count(),
        ancilla_count: plan.ancilla_count(),
        degree_sum: plan.degree_sum(),
        report: resource_report(&test),
        lcu_report: resource_report(&lcu),
    })
}

/// The Hadamard-test circuit that [`evaluate_via_circuit`] runs for `x`, or
/// `None` when every term vanishes.
pub fn circuit_for_point(s: &SurplusMap, x: &[f64], opts: EvalOptions) -> Result<Option<Circuit>> {
    let terms = chebyshev_expansion(s, x)?;
    match LcuPlan::from_terms(&terms, !opts.drop_identity_phases)? {
        Some(plan) => Ok(Some(hadamard_test_circuit(&assemble_lcu(&plan)?)?)),
        None => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::unitarity_deviation;
    use crate::sparsegrid::{evaluate_interpolant, surplus_coefficients};
    use approx::assert_abs_diff_eq;

    fn single_gate_circuit(m: Mat2) -> Circuit {
        Circuit::new(1).with(GateOp::single(0, m).unwrap()).unwrap()
    }

    #[test]
    fn ancillas() {
        assert_eq!(ancilla_count(1), 0);
        assert_eq!(ancilla_count(2), 1);
        assert_eq!(ancilla_count(5), 3);
        assert_eq!(ancilla_count(8), 3);
    }

    #[test]
    fn prepare_examples() {
        let f = prepare_state_unitary(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        for i in 0..4 {
            assert_abs_diff_eq!(f[(i, 0)].re, 0.5, epsilon = 1e-15);
        }
        let f = prepare_state_unitary(&[9.0, 16.0]).unwrap();
        assert_abs_diff_eq!(f[(0, 0)].re, 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(f[(1, 0)].re, 0.8, epsilon = 1e-15);
        assert!(unitarity_deviation(&f) < 1e-12);
        assert_eq!(prepare_state_unitary(&[1.0]).unwrap(), DMat::identity(1, 1));
        assert_eq!(prepare_state_unitary(&[]), Err(Error::EmptyLcu));
        assert!(matches!(
            prepare_state_unitary(&[1.0, 0.0]),
            Err(Error::NonPositiveCoefficient { index: 1, .. })
        ));
        assert!(prepare_state_unitary(&[1.0, -2.0]).is_err());
    }

    #[test]
    fn multiplexer_examples() {
        // M = 1, no selector
        let ops = multiplexer(&[single_gate_circuit(gates::pauli_x())], &[1.0], &[0], &[]).unwrap();
        let c1 = Circuit::new(1).with(ops[0].clone()).unwrap();
        assert_eq!(c1.run(&Statevector::zero(1)).unwrap(), Statevector::basis(1, 1));

        // M = 2, U_0 = I, U_1 = X; data on qubit 0, selector on qubit 1
        let ops = multiplexer(
            &[
                single_gate_circuit(gates::identity()),
                single_gate_circuit(gates::pauli_x()),
            ],
            &[1.0, 1.0],
            &[0],
            &[1],
        )
        .unwrap();
        let mut c2 = Circuit::new(2);
        c2.extend(ops).unwrap();
        assert_eq!(
            c2.run(&Statevector::basis(2, 0b10)).unwrap(),
            Statevector::basis(2, 0b11)
        );
        assert_eq!(
            c2.run(&Statevector::basis(2, 0b00)).unwrap(),
            Statevector::basis(2, 0b00)
        );

        // signs (+, −) with U_1 = I (no gates at all)
        let ops = multiplexer(&[Circuit::new(1), Circuit::new(1)], &[1.0, -1.0], &[0], &[1]).unwrap();
        let mut c3 = Circuit::new(2);
        c3.extend(ops).unwrap();
        let m = c3.to_matrix().unwrap();
        let expected = DMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(1.0, 0.0),
            c(1.0, 0.0),
            c(-1.0, 0.0),
            c(-1.0, 0.0),
        ]));
        assert!((m - expected).norm() < 1e-15);
    }

    #[test]
    fn multiplexer_errors() {
        assert_eq!(multiplexer(&[], &[], &[0], &[]), Err(Error::EmptyLcu));
        let wide = Circuit::new(2);
        assert!(matches!(
            multiplexer(&[Circuit::new(1), wide], &[1.0, 1.0], &[0], &[1]),
            Err(Error::WidthMismatch { .. })
        ));
        let cx = Circuit::new(2)
            .with(GateOp::controlled(0, GateOp::single(1, gates::pauli_x()).unwrap()).unwrap())
            .unwrap();
        assert_eq!(
            multiplexer(&[cx], &[1.0], &[0, 1], &[]),
            Err(Error::UnsupportedTerm { term: 0 })
        );
    }

    #[test]
    fn assemble_examples() {
        let u = chebyshev_circuit(1).bind(SignalPoint::new(0.25).unwrap());
        let plan = LcuPlan::new(&[1.0], vec![u]).unwrap();
        let lcu = assemble_lcu(&plan).unwrap();
        assert_eq!(lcu.width(), 1);
        assert_abs_diff_eq!(direct_amplitude(&lcu).unwrap().re, 0.25, epsilon = 1e-15);

        let id = || Circuit::new(1);
        let plan = LcuPlan::new(&[1.0, 1.0], vec![id(), id()]).unwrap();
        assert_abs_diff_eq!(
            direct_amplitude(&assemble_lcu(&plan).unwrap()).unwrap().re,
            1.0,
            epsilon = 1e-15
        );
        let plan = LcuPlan::new(&[1.0, -1.0], vec![id(), id()]).unwrap();
        assert_abs_diff_eq!(
            direct_amplitude(&assemble_lcu(&plan).unwrap()).unwrap().re,
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn plan_validation() {
        assert_eq!(LcuPlan::new(&[], vec![]), Err(Error::EmptyLcu));
        assert!(LcuPlan::new(&[1.0, 0.0], vec![Circuit::new(1), Circuit::new(1)]).is_err());
        assert!(LcuPlan::new(&[1.0], vec![Circuit::new(1), Circuit::new(1)]).is_err());
        let plan = LcuPlan::new(
            &[0.5, -1.5, 2.0],
            vec![Circuit::new(1), Circuit::new(1), Circuit::new(1)],
        )
        .unwrap();
        assert_eq!(plan.coefficients(), &[0.5, 1.5, 2.0]);
        assert_eq!(plan.term_signs(), &[1.0, -1.0, 1.0]);
        assert_eq!(plan.ancilla_count(), 2);
        assert_eq!(plan.one_norm(), 4.0);
    }

    #[test]
    fn hadamard_examples() {
        assert_abs_diff_eq!(
            hadamard_test(&single_gate_circuit(gates::pauli_z())).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            hadamard_test(&single_gate_circuit(gates::pauli_x())).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        let phase = gates::identity() * C64::from_polar(1.0, std::f64::consts::FRAC_PI_3);
        assert_abs_diff_eq!(
            hadamard_test(&single_gate_circuit(phase)).unwrap(),
            0.5,
            epsilon = 1e-15
        );
    }

    fn quad(x: &[f64]) -> f64 {
        x.iter().map(|&t| t * (1.0 - t)).product()
    }

    #[test]
    fn circuit_evaluation_examples() {
        let s = surplus_coefficients(quad, 2, 1).unwrap();
        let e = evaluate_via_circuit(&s, &[0.125]).unwrap();
        assert_abs_diff_eq!(e.value, 3.0 / 32.0, epsilon = 1e-12);
        assert_eq!((e.term_count, e.report.width), (4, 4));

        let zero = surplus_coefficients(|_| 0.0, 3, 2).unwrap();
        let e = evaluate_via_circuit(&zero, &[0.3, 0.6]).unwrap();
        assert_eq!(e.value, 0.0);
        assert_eq!(e.report, ResourceReport::default());

        let s2 = surplus_coefficients(quad, 2, 2).unwrap();
        let e = evaluate_via_circuit(&s2, &[0.3, 0.3]).unwrap();
        let classical = evaluate_interpolant(&s2, &[0.3, 0.3]).unwrap();
        assert_abs_diff_eq!(e.value, classical, epsilon = 1e-9);
        assert_abs_diff_eq!(e.raw, e.direct_amplitude, epsilon = 1e-12);
    }

    #[test]
    fn dropping_identity_phases_keeps_value() {
        let s = surplus_coefficients(quad, 3, 2).unwrap();
        let x = [0.41, 0.77];
        let full = evaluate_via_circuit(&s, &x).unwrap();
        let reduced = evaluate_via_circuit_with(
            &s,
            &x,
            EvalOptions {
                drop_identity_phases: true,
            },
        )
        .unwrap();
        assert_abs_diff_eq!(full.value, reduced.value, epsilon = 1e-12);
        assert!(reduced.report.gate_count < full.report.gate_count);
    }
}
