//! Width and depth accounting.
//!
//! Counters are taken over the circuit after expansion into elementary steps:
//!
//! - an uncontrolled single-qubit gate is one step;
//! - a gate carrying `c >= 1` controls (from [`GateKind::Controlled`]
//!   wrappers and/or a multiplexer's selector register) is `c` steps, each
//!   occupying all of its qubits; this is the linear-depth cost of a
//!   `c`-controlled single-qubit gate;
//! - a multiplexer expands into one controlled gate per non-`None` block;
//! - a dense `k`-qubit unitary is `2^k − 1` steps on its `k` qubits (the
//!   size of a rotation tree for a `k`-qubit state preparation), times
//!   `max(1, c)` when controlled.

use serde::{Deserialize, Serialize};

use super::{Circuit, GateKind, GateOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct ResourceReport {
    pub width: usize,
    pub gate_count: usize,
    /// Max over qubits of the number of multi-qubit steps touching it.
    pub paper_depth: usize,
    /// Number of layers when steps are scheduled as early as possible.
    pub layered_depth: usize,
    /// Max over qubits of the number of steps touching it.
    pub touch_depth: usize,
}

struct Step {
    qubits: Vec<usize>,
    repeat: usize,
}

fn expand(op: &GateOp, extra: &mut Vec<usize>, out: &mut Vec<Step>) {
    let with = |targets: &[usize], selectors: &[usize], extra: &[usize]| {
        let mut q = extra.to_vec();
        q.extend_from_slice(selectors);
        q.extend_from_slice(targets);
        q
    };
    match op.kind() {
        GateKind::Single(_) => {
            out.push(Step {
                qubits: with(op.targets(), &[], extra),
                repeat: extra.len().max(1),
            });
        }
        GateKind::Multiplexed(blocks) => {
            let c = extra.len() + op.controls().len();
            for _ in blocks.iter().flatten() {
                out.push(Step {
                    qubits: with(op.targets(), op.controls(), extra),
                    repeat: c.max(1),
                });
            }
        }
        GateKind::Dense(_) => {
            let k = op.targets().len();
            let tree = (1usize << k) - 1;
            out.push(Step {
                qubits: with(op.targets(), &[], extra),
                repeat: tree.max(1) * extra.len().max(1),
            });
        }
        GateKind::Controlled(inner) => {
            extra.push(op.controls()[0]);
            expand(inner, extra, out);
            extra.pop();
        }
    }
}

pub fn resource_report(circuit: &Circuit) -> ResourceReport {
    let width = circuit.width();
    let mut steps = Vec::new();
    let mut extra = Vec::new();
    for op in circuit.ops() {
        expand(op, &mut extra, &mut steps);
    }

    let mut touches = vec![0usize; width];
    let mut multi = vec![0usize; width];
    let mut frontier = vec![0usize; width];
    let mut gate_count = 0;
    for step in &steps {
        gate_count += step.repeat;
        let start = step.qubits.iter().map(|&q| frontier[q]).max().unwrap_or(0);
        for &q in &step.qubits {
            touches[q] += step.repeat;
            if step.qubits.len() > 1 {
                multi[q] += step.repeat;
            }
            frontier[q] = start + step.repeat;
        }
    }

    ResourceReport {
        width,
        gate_count,
        paper_depth: multi.iter().copied().max().unwrap_or(0),
        layered_depth: frontier.iter().copied().max().unwrap_or(0),
        touch_depth: touches.iter().copied().max().unwrap_or(0),
    }
}
