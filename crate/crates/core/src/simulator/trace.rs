//! JSON gate trace: `{"width": w, "ops": [...]}` with matrices as row-major
//! lists of `[re, im]` pairs.

use serde::{Deserialize, Serialize};

use super::{c, Circuit, DMat, GateKind, GateOp, Mat2};
use crate::{Error, Result};

type Entries = Vec<[f64; 2]>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceOp {
    Single {
        targets: Vec<usize>,
        controls: Vec<usize>,
        matrix: Entries,
    },
    Multiplexed {
        targets: Vec<usize>,
        controls: Vec<usize>,
        blocks: Vec<Option<Entries>>,
    },
    Dense {
        targets: Vec<usize>,
        controls: Vec<usize>,
        matrix: Entries,
    },
    Controlled {
        targets: Vec<usize>,
        controls: Vec<usize>,
        inner: Box<TraceOp>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitTrace {
    pub width: usize,
    pub ops: Vec<TraceOp>,
}

fn mat2_entries(m: &Mat2) -> Entries {
    (0..2)
        .flat_map(|i| (0..2).map(move |j| [m[(i, j)].re, m[(i, j)].im]))
        .collect()
}

fn dense_entries(m: &DMat) -> Entries {
    let n = m.nrows();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| [m[(i, j)].re, m[(i, j)].im]))
        .collect()
}

fn entries_to_dense(e: &Entries) -> Result<DMat> {
    let n = (e.len() as f64).sqrt().round() as usize;
    if n * n != e.len() {
        return Err(Error::MalformedTrace(format!(
            "{} entries is not a square matrix",
            e.len()
        )));
    }
    Ok(DMat::from_fn(n, n, |i, j| c(e[i * n + j][0], e[i * n + j][1])))
}

fn entries_to_mat2(e: &Entries) -> Result<Mat2> {
    if e.len() != 4 {
        return Err(Error::MalformedTrace(format!(
            "single-qubit matrix needs 4 entries, got {}",
            e.len()
        )));
    }
    Ok(Mat2::from_fn(|i, j| c(e[i * 2 + j][0], e[i * 2 + j][1])))
}

impl From<&GateOp> for TraceOp {
    fn from(op: &GateOp) -> Self {
        let targets = op.targets().to_vec();
        let controls = op.controls().to_vec();
        match op.kind() {
            GateKind::Single(m) => TraceOp::Single {
                targets,
                controls,
                matrix: mat2_entries(m),
            },
            GateKind::Multiplexed(blocks) => TraceOp::Multiplexed {
                targets,
                controls,
                blocks: blocks.iter().map(|b| b.as_ref().map(mat2_entries)).collect(),
            },
            GateKind::Dense(m) => TraceOp::Dense {
                targets,
                controls,
                matrix: dense_entries(m),
            },
            GateKind::Controlled(inner) => TraceOp::Controlled {
                targets,
                controls,
                inner: Box::new(TraceOp::from(inner.as_ref())),
            },
        }
    }
}

fn one(v: &[usize], what: &str) -> Result<usize> {
    match v {
        [q] => Ok(*q),
        _ => Err(Error::MalformedTrace(format!(
            "{what} needs exactly one qubit, got {v:?}"
        ))),
    }
}

impl TryFrom<&TraceOp> for GateOp {
    type Error = Error;

    fn try_from(op: &TraceOp) -> Result<Self> {
        match op {
            TraceOp::Single { targets, matrix, .. } => {
                GateOp::single(one(targets, "single target")?, entries_to_mat2(matrix)?)
            }
            TraceOp::Multiplexed {
                targets,
                controls,
                blocks,
            } => {
                let blocks = blocks
                    .iter()
                    .map(|b| b.as_ref().map(entries_to_mat2).transpose())
                    .collect::<Result<Vec<_>>>()?;
                GateOp::multiplexed(one(targets, "multiplexer target")?, controls.clone(), blocks)
            }
            TraceOp::Dense { targets, matrix, .. } => GateOp::dense(targets.clone(), entries_to_dense(matrix)?),
            TraceOp::Controlled { controls, inner, .. } => {
                GateOp::controlled(one(controls, "control")?, GateOp::try_from(inner.as_ref())?)
            }
        }
    }
}

impl From<&Circuit> for CircuitTrace {
    fn from(circuit: &Circuit) -> Self {
        CircuitTrace {
            width: circuit.width(),
            ops: circuit.ops().iter().map(TraceOp::from).collect(),
        }
    }
}

impl TryFrom<&CircuitTrace> for Circuit {
    type Error = Error;

    fn try_from(trace: &CircuitTrace) -> Result<Self> {
        let mut circuit = Circuit::new(trace.width);
        for op in &trace.ops {
            circuit.push(GateOp::try_from(op)?)?;
        }
        Ok(circuit)
    }
}

pub fn to_json(circuit: &Circuit) -> String {
    serde_json::to_string_pretty(&CircuitTrace::from(circuit)).expect("trace serialization is infallible")
}

pub fn from_json(text: &str) -> Result<Circuit> {
    let trace: CircuitTrace = serde_json::from_str(text).map_err(|e| Error::MalformedTrace(e.to_string()))?;
    Circuit::try_from(&trace)
}
