use super::{check_unitary, mat2_to_dense, DMat, Mat2, C64};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    /// 2×2 unitary on `targets[0]`.
    Single(Mat2),
    /// Uniformly controlled single-qubit gate. The selector register is
    /// `controls` (little-endian: `controls[b]` is bit `b` of the selector
    /// value `j`); block `j` acts on `targets[0]`. `None` blocks, and every
    /// selector value past the end of the list, act as identity and are not
    /// counted as gates.
    Multiplexed(Vec<Option<Mat2>>),
    /// `2^k × 2^k` unitary on the `k` qubits of `targets`, little-endian in
    /// the order listed.
    Dense(DMat),
    /// The inner gate, applied only where `controls[0]` is `|1⟩`.
    Controlled(Box<GateOp>),
}

/// One operation in a [`Circuit`](super::Circuit).
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    kind: GateKind,
    targets: Vec<usize>,
    controls: Vec<usize>,
}

fn check_disjoint(qubits: &[usize]) -> Result<()> {
    let mut seen = qubits.to_vec();
    seen.sort_unstable();
    for w in seen.windows(2) {
        if w[0] == w[1] {
            return Err(Error::OverlappingQubits(w[0]));
        }
    }
    Ok(())
}

impl GateOp {
    pub fn single(target: usize, m: Mat2) -> Result<Self> {
        check_unitary(&mat2_to_dense(&m))?;
        Ok(Self {
            kind: GateKind::Single(m),
            targets: vec![target],
            controls: Vec::new(),
        })
    }

    pub fn multiplexed(target: usize, selectors: Vec<usize>, blocks: Vec<Option<Mat2>>) -> Result<Self> {
        for m in blocks.iter().flatten() {
            check_unitary(&mat2_to_dense(m))?;
        }
        let mut all = selectors.clone();
        all.push(target);
        check_disjoint(&all)?;
        if selectors.len() < usize::BITS as usize && blocks.len() > 1usize << selectors.len() {
            return Err(Error::MatrixDimension {
                expected: 1 << selectors.len(),
                found: blocks.len(),
            });
        }
        Ok(Self {
            kind: GateKind::Multiplexed(blocks),
            targets: vec![target],
            controls: selectors,
        })
    }

    pub fn dense(targets: Vec<usize>, m: DMat) -> Result<Self> {
        check_disjoint(&targets)?;
        let dim = 1usize << targets.len();
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::MatrixDimension {
                expected: dim,
                found: m.nrows(),
            });
        }
        check_unitary(&m)?;
        Ok(Self {
            kind: GateKind::Dense(m),
            targets,
            controls: Vec::new(),
        })
    }

    pub fn controlled(control: usize, inner: GateOp) -> Result<Self> {
        let targets = inner.qubits();
        if targets.contains(&control) {
            return Err(Error::OverlappingQubits(control));
        }
        Ok(Self {
            kind: GateKind::Controlled(Box::new(inner)),
            targets,
            controls: vec![control],
        })
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn controls(&self) -> &[usize] {
        &self.controls
    }

    /// Every qubit the op touches, controls first.
    pub fn qubits(&self) -> Vec<usize> {
        let mut q = self.controls.clone();
        q.extend_from_slice(&self.targets);
        q
    }

    /// Same op with each qubit `q` relabelled to `map[q]`.
    pub fn remap(&self, map: &[usize]) -> GateOp {
        let kind = match &self.kind {
            GateKind::Controlled(inner) => GateKind::Controlled(Box::new(inner.remap(map))),
            other => other.clone(),
        };
        GateOp {
            kind,
            targets: self.targets.iter().map(|&q| map[q]).collect(),
            controls: self.controls.iter().map(|&q| map[q]).collect(),
        }
    }

    /// Apply in place, restricted to basis states whose bits in `cond` are all set.
    pub(crate) fn apply_masked(&self, amps: &mut [C64], cond: usize) {
        match &self.kind {
            GateKind::Single(m) => {
                let t = 1usize << self.targets[0];
                for i in 0..amps.len() {
                    if i & t == 0 && i & cond == cond {
                        apply2(m, amps, i, i | t);
                    }
                }
            }
            GateKind::Multiplexed(blocks) => {
                let t = 1usize << self.targets[0];
                for i in 0..amps.len() {
                    if i & t != 0 || i & cond != cond {
                        continue;
                    }
                    let j = self
                        .controls
                        .iter()
                        .enumerate()
                        .fold(0usize, |acc, (b, &q)| acc | (((i >> q) & 1) << b));
                    if let Some(Some(m)) = blocks.get(j) {
                        apply2(m, amps, i, i | t);
                    }
                }
            }
            GateKind::Dense(m) => {
                let k = self.targets.len();
                let dim = 1usize << k;
                let tmask = self.targets.iter().fold(0usize, |acc, &q| acc | (1 << q));
                let offsets: Vec<usize> = (0..dim)
                    .map(|r| (0..k).fold(0usize, |acc, b| acc | (((r >> b) & 1) << self.targets[b])))
                    .collect();
                let mut buf = vec![C64::new(0.0, 0.0); dim];
                for base in 0..amps.len() {
                    if base & tmask != 0 || base & cond != cond {
                        continue;
                    }
                    for (r, slot) in buf.iter_mut().enumerate() {
                        *slot = amps[base | offsets[r]];
                    }
                    for r in 0..dim {
                        let mut acc = C64::new(0.0, 0.0);
                        for (s, v) in buf.iter().enumerate() {
                            acc += m[(r, s)] * v;
                        }
                        amps[base | offsets[r]] = acc;
                    }
                }
            }
            GateKind::Controlled(inner) => inner.apply_masked(amps, cond | (1 << self.controls[0])),
        }
    }
}

#[inline]
fn apply2(m: &Mat2, amps: &mut [C64], i0: usize, i1: usize) {
    let a0 = amps[i0];
    let a1 = amps[i1];
    amps[i0] = m[(0, 0)] * a0 + m[(0, 1)] * a1;
    amps[i1] = m[(1, 0)] * a0 + m[(1, 1)] * a1;
}
