//! Composite Gauss–Legendre rules on boxes.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

/// Nodes and weights of a composite rule on `[a, b]` split into `cells` equal
/// subintervals with `points` Gauss–Legendre nodes each.
pub fn composite_1d(a: f64, b: f64, cells: usize, points: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(points).expect("at least one node"));
    let width = (b - a) / cells as f64;
    let mut out = Vec::with_capacity(cells * points);
    for cell in 0..cells {
        let lo = a + cell as f64 * width;
        for &(node, weight) in rule.as_node_weight_pairs() {
            out.push((lo + 0.5 * width * (node + 1.0), 0.5 * width * weight));
        }
    }
    out
}

/// Tensor-product rule: one 1D rule per dimension, iterated with the last
/// dimension fastest.
pub fn integrate_tensor<F: FnMut(&[f64]) -> f64>(rules: &[Vec<(f64, f64)>], mut f: F) -> f64 {
    let d = rules.len();
    let mut idx = vec![0usize; d];
    let mut x = vec![0.0; d];
    let mut total = 0.0;
    if rules.iter().any(Vec::is_empty) {
        return 0.0;
    }
    loop {
        let mut w = 1.0;
        for j in 0..d {
            let (node, weight) = rules[j][idx[j]];
            x[j] = node;
            w *= weight;
        }
        total += w * f(&x);
        let mut j = d;
        loop {
            if j == 0 {
                return total;
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < rules[j].len() {
                break;
            }
            idx[j] = 0;
        }
    }
}
