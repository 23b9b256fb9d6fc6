//! Hierarchical hat basis on `[0,1]^d` and the level-`n` sparse grid
//! `‖ℓ‖₁ ≤ n + d − 1`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::qsp::chebyshev_first_kind;
use crate::{Error, Result};

/// `max(0, 1 − |u|)`.
pub fn hat(u: f64) -> f64 {
    (1.0 - u.abs()).max(0.0)
}

/// Level vector `ℓ ∈ ℕ^d`, every component at least 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LevelVector(Vec<u32>);

impl LevelVector {
    pub fn new(levels: Vec<u32>) -> Result<Self> {
        if levels.is_empty() || levels.iter().any(|&l| l == 0 || l > 52) {
            return Err(Error::InvalidLevel(format!("{levels:?}")));
        }
        Ok(Self(levels))
    }

    pub fn levels(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn l1(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn linf(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// Mesh widths `h_j = 2^{−ℓ_j}`.
    pub fn mesh(&self) -> Vec<f64> {
        self.0.iter().map(|&l| spacing(l)).collect()
    }

    /// `|I_ℓ| = ∏ 2^{ℓ_j − 1}`.
    pub fn index_count(&self) -> usize {
        self.0.iter().map(|&l| 1usize << (l - 1)).product()
    }
}

fn spacing(level: u32) -> f64 {
    (-(level as f64)).exp2()
}

/// Sparse-grid node `(ℓ, i)` with every `i_j` odd in `[1, 2^{ℓ_j} − 1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GridIndex {
    level: LevelVector,
    index: Vec<u64>,
}

impl GridIndex {
    pub fn new(level: LevelVector, index: Vec<u64>) -> Result<Self> {
        if index.len() != level.dim() {
            return Err(Error::DimensionMismatch {
                expected: level.dim(),
                found: index.len(),
            });
        }
        for (&i, &l) in index.iter().zip(level.levels()) {
            if i % 2 == 0 || i >= 1u64 << l {
                return Err(Error::InvalidIndex(format!("{index:?} at level {:?}", level.levels())));
            }
        }
        Ok(Self { level, index })
    }

    pub fn level(&self) -> &LevelVector {
        &self.level
    }

    pub fn index(&self) -> &[u64] {
        &self.index
    }

    /// `x_{ℓ,i} = i · 2^{−ℓ}` componentwise.
    pub fn node(&self) -> Vec<f64> {
        self.index
            .iter()
            .zip(self.level.levels())
            .map(|(&i, &l)| i as f64 * spacing(l))
            .collect()
    }

    /// Support box `∏ [x_j − h_j, x_j + h_j]`.
    pub fn support(&self) -> Vec<(f64, f64)> {
        self.node()
            .iter()
            .zip(self.level.mesh())
            .map(|(&x, h)| (x - h, x + h))
            .collect()
    }

    /// Local coordinates `u_j = (x_j − x_{i_j}) / h_j`.
    pub fn local_coordinates(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.index)
            .zip(self.level.levels())
            .map(|((&xj, &i), &l)| xj * (l as f64).exp2() - i as f64)
            .collect()
    }
}

/// `φ_{ℓ,i}(x) = ∏_j hat((x_j − i_j 2^{−ℓ_j}) 2^{ℓ_j})`.
pub fn scaled_hat(g: &GridIndex, x: &[f64]) -> f64 {
    g.local_coordinates(x).into_iter().map(hat).product()
}

/// All `ℓ ≥ 1` with `‖ℓ‖₁ ≤ n + d − 1`, lexicographic.
pub fn enumerate_levels(n: u32, d: usize) -> Vec<LevelVector> {
    fn rec(prefix: &mut Vec<u32>, remaining: usize, budget: u32, out: &mut Vec<LevelVector>) {
        if remaining == 0 {
            out.push(LevelVector(prefix.clone()));
            return;
        }
        // leave at least 1 for each remaining dimension after this one
        let max_here = budget - (remaining as u32 - 1);
        for l in 1..=max_here {
            prefix.push(l);
            rec(prefix, remaining - 1, budget - l, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 || d == 0 {
        return out;
    }
    rec(&mut Vec::with_capacity(d), d, n + d as u32 - 1, &mut out);
    out
}

/// Cartesian product of odd indices, lexicographic.
pub fn index_set(level: &LevelVector) -> Vec<GridIndex> {
    let d = level.dim();
    let counts: Vec<u64> = level.levels().iter().map(|&l| 1u64 << (l - 1)).collect();
    let mut out = Vec::with_capacity(level.index_count());
    let mut digits = vec![0u64; d];
    loop {
        out.push(GridIndex {
            level: level.clone(),
            index: digits.iter().map(|&k| 2 * k + 1).collect(),
        });
        let mut j = d;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            digits[j] += 1;
            if digits[j] < counts[j] {
                break;
            }
            digits[j] = 0;
        }
    }
}

/// Exact number of sparse-grid nodes.
pub fn grid_count(n: u32, d: usize) -> u64 {
    enumerate_levels(n, d).iter().map(|l| l.index_count() as u64).sum()
}

/// The odd `i` whose level-`ℓ` hat is nonzero at `x`, if any. Returns `None`
/// when some `x_j` sits on an even level-`ℓ_j` node (or outside `[0, 1]`),
/// where every level-`ℓ` hat vanishes.
pub fn locate_support(level: &LevelVector, x: &[f64]) -> Option<GridIndex> {
    if x.len() != level.dim() {
        return None;
    }
    let mut index = Vec::with_capacity(x.len());
    for (&xj, &l) in x.iter().zip(level.levels()) {
        index.push(locate_1d(l, xj)?);
    }
    Some(GridIndex {
        level: level.clone(),
        index,
    })
}

#[inline]
fn locate_1d(level: u32, x: f64) -> Option<u64> {
    if !(0.0..=1.0).contains(&x) {
        return None;
    }
    let t = x * (level as f64).exp2();
    let k = t.floor();
    let ki = k as u64;
    if ki % 2 == 1 {
        Some(ki)
    } else if t > k {
        Some(ki + 1)
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
struct LevelBlock {
    level: LevelVector,
    values: Vec<f64>,
}

impl LevelBlock {
    fn position(&self, index: &[u64]) -> usize {
        let mut pos = 0usize;
        for (&i, &l) in index.iter().zip(self.level.levels()) {
            pos = (pos << (l - 1)) | ((i - 1) / 2) as usize;
        }
        pos
    }
}

/// Hierarchical surplus coefficients `v_{ℓ,i}` over the whole level-`n`
/// sparse grid, iterated in lexicographic `(ℓ, i)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct SurplusMap {
    d: usize,
    n: u32,
    blocks: Vec<LevelBlock>,
}

impl SurplusMap {
    /// All-zero map over the level-`n` grid.
    pub fn zeros(n: u32, d: usize) -> Self {
        let blocks = enumerate_levels(n, d)
            .into_iter()
            .map(|level| LevelBlock {
                values: vec![0.0; level.index_count()],
                level,
            })
            .collect();
        Self { d, n, blocks }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn level(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.values.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn levels(&self) -> impl Iterator<Item = &LevelVector> {
        self.blocks.iter().map(|b| &b.level)
    }

    pub fn get(&self, g: &GridIndex) -> Option<f64> {
        let block = self.blocks.iter().find(|b| b.level == g.level)?;
        Some(block.values[block.position(&g.index)])
    }

    pub fn set(&mut self, g: &GridIndex, value: f64) -> Result<()> {
        let block = self
            .blocks
            .iter_mut()
            .find(|b| b.level == g.level)
            .ok_or_else(|| Error::InvalidIndex(format!("level {:?} not in grid", g.level.levels())))?;
        let pos = block.position(&g.index);
        block.values[pos] = value;
        Ok(())
    }

    pub fn entries(&self) -> impl Iterator<Item = (GridIndex, f64)> + '_ {
        self.blocks
            .iter()
            .flat_map(|b| index_set(&b.level).into_iter().zip(b.values.iter().copied()))
    }

    /// Every coefficient multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for b in &mut out.blocks {
            b.values.iter_mut().for_each(|v| *v *= factor);
        }
        out
    }

    pub fn to_document(&self) -> SurplusDocument {
        SurplusDocument {
            d: self.d,
            n: self.n,
            entries: self
                .entries()
                .map(|(g, value)| SurplusEntry {
                    level: g.level.0.clone(),
                    index: g.index.clone(),
                    value,
                    quadrature: None,
                })
                .collect(),
        }
    }

    pub fn from_document(doc: &SurplusDocument) -> Result<Self> {
        if doc.d == 0 || doc.n == 0 {
            return Err(Error::MalformedSurplus("d and n must be positive".into()));
        }
        let mut map = Self::zeros(doc.n, doc.d);
        let mut seen = BTreeMap::new();
        for e in &doc.entries {
            let level = LevelVector::new(e.level.clone())?;
            if level.dim() != doc.d || level.l1() > doc.n + doc.d as u32 - 1 {
                return Err(Error::MalformedSurplus(format!("level {:?} outside the grid", e.level)));
            }
            let g = GridIndex::new(level, e.index.clone())?;
            if seen.insert(g.clone(), ()).is_some() {
                return Err(Error::MalformedSurplus(format!(
                    "duplicate entry {:?} {:?}",
                    e.level, e.index
                )));
            }
            map.set(&g, e.value)?;
        }
        if seen.len() != map.len() {
            return Err(Error::MalformedSurplus(format!(
                "{} entries, grid has {}",
                seen.len(),
                map.len()
            )));
        }
        Ok(map)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("surplus serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SurplusDocument = serde_json::from_str(text).map_err(|e| Error::MalformedSurplus(e.to_string()))?;
        Self::from_document(&doc)
    }
}

/// Serialized form `{d, n, entries: [{level, index, value}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurplusDocument {
    pub d: usize,
    pub n: u32,
    pub entries: Vec<SurplusEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurplusEntry {
    pub level: Vec<u32>,
    pub index: Vec<u64>,
    pub value: f64,
    /// Integral-formula value, when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<f64>,
}

/// Surplus coefficients by the tensorized stencil `[−½, 1, −½]` at spacing
/// `h_{ℓ_j}` in every dimension. `f` must vanish on the boundary of the cube.
pub fn surplus_coefficients<F>(f: F, n: u32, d: usize) -> Result<SurplusMap>
where
    F: Fn(&[f64]) -> f64,
{
    let mut map = SurplusMap::zeros(n, d);
    let stencil_size = 3usize.pow(d as u32);
    let mut point = vec![0.0; d];
    for block in &mut map.blocks {
        let mesh = block.level.mesh();
        for (slot, g) in block.values.iter_mut().zip(index_set(&block.level)) {
            let node = g.node();
            let mut acc = 0.0;
            for s in 0..stencil_size {
                let mut weight = 1.0;
                let mut rest = s;
                for j in 0..d {
                    let offset = (rest % 3) as f64 - 1.0;
                    rest /= 3;
                    point[j] = node[j] + offset * mesh[j];
                    if offset != 0.0 {
                        weight *= -0.5;
                    }
                }
                let value = f(&point);
                if !value.is_finite() {
                    return Err(Error::NonFinite {
                        node: point.clone(),
                        value,
                    });
                }
                acc += weight * value;
            }
            *slot = acc;
        }
    }
    Ok(map)
}

/// `f_n^s(x) = Σ v_{ℓ,i} φ_{ℓ,i}(x)`; at most one `i` per level contributes.
pub fn evaluate_interpolant(s: &SurplusMap, x: &[f64]) -> Result<f64> {
    if x.len() != s.d {
        return Err(Error::DimensionMismatch {
            expected: s.d,
            found: x.len(),
        });
    }
    Ok(evaluate_unchecked(s, x))
}

pub(crate) fn evaluate_unchecked(s: &SurplusMap, x: &[f64]) -> f64 {
    let mut total = 0.0;
    'blocks: for block in &s.blocks {
        let mut pos = 0usize;
        let mut basis = 1.0;
        for (&xj, &l) in x.iter().zip(block.level.levels()) {
            let Some(i) = locate_1d(l, xj) else { continue 'blocks };
            basis *= hat(xj * (l as f64).exp2() - i as f64);
            pos = (pos << (l - 1)) | ((i - 1) / 2) as usize;
        }
        total += block.values[pos] * basis;
    }
    total
}

/// One signed product `w ∏_j T_{k_j}(u_j)` of the per-point expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevTerm {
    pub weight: f64,
    pub degrees: Vec<u8>,
    pub arguments: Vec<f64>,
    pub source: GridIndex,
}

impl ChebyshevTerm {
    pub fn value(&self) -> f64 {
        self.weight
            * self
                .degrees
                .iter()
                .zip(&self.arguments)
                .map(|(&k, &u)| chebyshev_first_kind(k as usize, u))
                .product::<f64>()
    }
}

/// Value taken for `sgn(0)` in the sign rule. The expansion sum does not
/// depend on it because `T_1(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZeroSign {
    #[default]
    Positive,
    Negative,
}

/// Expand `f_n^s(x)` into `2^d` signed Chebyshev products per supported
/// `(ℓ, i)`, using `hat(u) = T_0(u) + T_1(u)` for `u ≤ 0` and
/// `T_0(u) − T_1(u)` for `u ≥ 0`.
pub fn chebyshev_expansion(s: &SurplusMap, x: &[f64]) -> Result<Vec<ChebyshevTerm>> {
    chebyshev_expansion_with(s, x, ZeroSign::Positive)
}

pub fn chebyshev_expansion_with(s: &SurplusMap, x: &[f64], zero: ZeroSign) -> Result<Vec<ChebyshevTerm>> {
    let d = s.d;
    if x.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: x.len(),
        });
    }
    let mut terms = Vec::new();
    for block in &s.blocks {
        let Some(g) = locate_support(&block.level, x) else {
            continue;
        };
        let v = block.values[block.position(&g.index)];
        let u = g.local_coordinates(x);
        let positive: Vec<bool> = u
            .iter()
            .map(|&uj| {
                if uj == 0.0 {
                    zero == ZeroSign::Positive
                } else {
                    uj > 0.0
                }
            })
            .collect();
        for mask in 0..(1usize << d) {
            let degrees: Vec<u8> = (0..d).map(|j| ((mask >> (d - 1 - j)) & 1) as u8).collect();
            let flips = degrees.iter().zip(&positive).filter(|(&k, &p)| k == 1 && p).count();
            let weight = if flips % 2 == 0 { v } else { -v };
            terms.push(ChebyshevTerm {
                weight,
                degrees,
                arguments: u.clone(),
                source: g.clone(),
            });
        }
    }
    Ok(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn lv(v: &[u32]) -> LevelVector {
        LevelVector::new(v.to_vec()).unwrap()
    }

    fn gi(l: &[u32], i: &[u64]) -> GridIndex {
        GridIndex::new(lv(l), i.to_vec()).unwrap()
    }

    fn quad(x: &[f64]) -> f64 {
        x.iter().map(|&t| t * (1.0 - t)).product()
    }

    #[test]
    fn hat_examples() {
        assert_eq!(hat(0.0), 1.0);
        assert_eq!(hat(1.0), 0.0);
        assert_eq!(hat(-1.0), 0.0);
        assert_abs_diff_eq!(hat(-0.4), 0.6, epsilon = 1e-15);
        assert_eq!(hat(3.0), 0.0);
    }

    #[test]
    fn scaled_hat_examples() {
        assert_eq!(scaled_hat(&gi(&[2], &[3]), &[0.75]), 1.0);
        assert_eq!(scaled_hat(&gi(&[2], &[3]), &[0.625]), 0.5);
        assert_eq!(scaled_hat(&gi(&[1, 1], &[1, 1]), &[0.5, 0.25]), 0.5);
    }

    #[test]
    fn validation() {
        assert!(LevelVector::new(vec![1, 0]).is_err());
        assert!(LevelVector::new(vec![]).is_err());
        assert!(GridIndex::new(lv(&[2]), vec![2]).is_err());
        assert!(GridIndex::new(lv(&[2]), vec![5]).is_err());
        assert!(GridIndex::new(lv(&[2]), vec![1, 1]).is_err());
    }

    #[test]
    fn level_enumeration() {
        assert_eq!(enumerate_levels(1, 1), vec![lv(&[1])]);
        assert_eq!(enumerate_levels(2, 2), vec![lv(&[1, 1]), lv(&[1, 2]), lv(&[2, 1])]);
        assert_eq!(enumerate_levels(3, 2).len(), 6);
    }

    #[test]
    fn index_sets() {
        let idx = |l: &[u32]| index_set(&lv(l)).into_iter().map(|g| g.index).collect::<Vec<_>>();
        assert_eq!(idx(&[1]), vec![vec![1]]);
        assert_eq!(idx(&[2]), vec![vec![1], vec![3]]);
        assert_eq!(idx(&[2, 2]), vec![vec![1, 1], vec![1, 3], vec![3, 1], vec![3, 3]]);
    }

    #[test]
    fn counts() {
        assert_eq!(grid_count(3, 1), 7);
        assert_eq!(grid_count(2, 2), 5);
        assert_eq!(grid_count(3, 2), 17);
    }

    #[test]
    fn surplus_examples() {
        let s = surplus_coefficients(quad, 2, 1).unwrap();
        assert_eq!(s.get(&gi(&[1], &[1])), Some(0.25));
        assert_eq!(s.get(&gi(&[2], &[1])), Some(0.0625));
        assert_eq!(s.get(&gi(&[2], &[3])), Some(0.0625));

        let zero = surplus_coefficients(|_| 0.0, 3, 2).unwrap();
        assert!(zero.entries().all(|(_, v)| v == 0.0));

        let s2 = surplus_coefficients(quad, 1, 2).unwrap();
        assert_eq!(s2.len(), 1);
        assert_eq!(s2.get(&gi(&[1, 1], &[1, 1])), Some(0.0625));
    }

    #[test]
    fn surplus_non_finite() {
        let err = surplus_coefficients(|x| if x[0] == 0.5 { f64::NAN } else { 0.0 }, 2, 1).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }

    #[test]
    fn interpolant_examples() {
        let s = surplus_coefficients(quad, 2, 1).unwrap();
        assert_abs_diff_eq!(evaluate_interpolant(&s, &[0.25]).unwrap(), 3.0 / 16.0, epsilon = 1e-15);
        assert_abs_diff_eq!(evaluate_interpolant(&s, &[0.125]).unwrap(), 3.0 / 32.0, epsilon = 1e-15);
        assert_eq!(evaluate_interpolant(&s, &[0.0]).unwrap(), 0.0);
        assert_eq!(evaluate_interpolant(&s, &[1.0]).unwrap(), 0.0);
        assert_eq!(
            evaluate_interpolant(&s, &[0.1, 0.2]),
            Err(Error::DimensionMismatch { expected: 1, found: 2 })
        );
    }

    #[test]
    fn support_location() {
        assert_eq!(locate_support(&lv(&[2]), &[0.3]), Some(gi(&[2], &[1])));
        assert_eq!(locate_support(&lv(&[2]), &[0.5]), None);
        assert_eq!(locate_support(&lv(&[1, 1]), &[0.3, 0.7]), Some(gi(&[1, 1], &[1, 1])));
        assert_eq!(locate_support(&lv(&[2]), &[1.0]), None);
        assert_eq!(locate_support(&lv(&[2]), &[0.75]), Some(gi(&[2], &[3])));
    }

    #[test]
    fn expansion_sign_rule() {
        let mut s = SurplusMap::zeros(1, 1);
        s.set(&gi(&[1], &[1]), 2.0).unwrap();

        let left = chebyshev_expansion(&s, &[0.3]).unwrap();
        assert_eq!(left.len(), 2);
        assert_eq!((left[0].weight, left[0].degrees.clone()), (2.0, vec![0]));
        assert_eq!((left[1].weight, left[1].degrees.clone()), (2.0, vec![1]));
        assert_abs_diff_eq!(left[1].arguments[0], -0.4, epsilon = 1e-15);
        let sum: f64 = left.iter().map(ChebyshevTerm::value).sum();
        assert_abs_diff_eq!(sum, 1.2, epsilon = 1e-15);

        let right = chebyshev_expansion(&s, &[0.7]).unwrap();
        assert_eq!(right[1].weight, -2.0);
        let sum: f64 = right.iter().map(ChebyshevTerm::value).sum();
        assert_abs_diff_eq!(sum, 1.2, epsilon = 1e-15);
    }

    #[test]
    fn zero_sign_convention_irrelevant() {
        let s = surplus_coefficients(quad, 3, 2).unwrap();
        for x in [[0.5, 0.25], [0.75, 0.375], [0.5, 0.3]] {
            let a: f64 = chebyshev_expansion_with(&s, &x, ZeroSign::Positive)
                .unwrap()
                .iter()
                .map(ChebyshevTerm::value)
                .sum();
            let b: f64 = chebyshev_expansion_with(&s, &x, ZeroSign::Negative)
                .unwrap()
                .iter()
                .map(ChebyshevTerm::value)
                .sum();
            assert_eq!(a, b);
            assert_abs_diff_eq!(a, evaluate_interpolant(&s, &x).unwrap(), epsilon = 1e-15);
        }
    }

    #[test]
    fn json_round_trip_and_validation() {
        let s = surplus_coefficients(|x| (std::f64::consts::PI * x[0]).sin() * quad(&x[1..]), 3, 2).unwrap();
        let back = SurplusMap::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);

        let mut doc = s.to_document();
        doc.entries.pop();
        assert!(SurplusMap::from_document(&doc).is_err());
        let mut doc = s.to_document();
        let dup = doc.entries[0].clone();
        doc.entries[1] = dup;
        assert!(SurplusMap::from_document(&doc).is_err());
    }
}
