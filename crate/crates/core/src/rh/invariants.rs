//! Gauge-invariant comparison of matrix tuples: word traces and explicit
//! conjugator solves.

use serde::Serialize;

use crate::linalg::{inverse, kron, singular_values, trace, CMat};
use crate::scalar::C64;

/// Positive words of length `1..=max_len` in `m` letters, ordered by length
/// and then lexicographically. Letters are 0-based.
pub fn invariant_words(m: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| {
                (0..m).map(move |k| {
                    let mut v = w.clone();
                    v.push(k);
                    v
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Human-readable word label such as `x1x3x3`.
pub fn word_label(word: &[usize]) -> String {
    word.iter().map(|k| format!("x{}", k + 1)).collect()
}

/// `tr(A_{w_1} ⋯ A_{w_r})` for every word of length at most `max_len`, in the
/// order of [`invariant_words`].
pub fn conjugation_invariants(tuple: &[CMat], max_len: usize) -> Vec<C64> {
    let m = tuple.len();
    if m == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut layer: Vec<CMat> = vec![CMat::identity(tuple[0].nrows(), tuple[0].ncols())];
    for _ in 0..max_len {
        layer = layer.iter().flat_map(|p| tuple.iter().map(move |a| p * a)).collect();
        out.extend(layer.iter().map(trace));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjugacyMatch {
    /// `σ_min / σ_max` of the stacked linear system in `g`.
    pub residual: f64,
    #[serde(skip)]
    pub conjugator: Option<CMat>,
}

/// Least-squares solve of `g A_k - B_k g = 0` for all `k`. The residual is
/// the ratio of the smallest to the largest singular value of the stacked
/// system; the conjugator (with `B_k = g A_k g^{-1}`) is returned when the
/// residual is below `tol` and the minimizer is invertible.
pub fn match_up_to_conjugacy(a: &[CMat], b: &[CMat], tol: f64) -> ConjugacyMatch {
    let fail = ConjugacyMatch { residual: f64::INFINITY, conjugator: None };
    if a.len() != b.len() || a.is_empty() {
        return fail;
    }
    let n = a[0].nrows();
    if a.iter().chain(b).any(|m| m.nrows() != n || m.ncols() != n) {
        return fail;
    }
    let id = CMat::identity(n, n);
    // vec(g A) = (Aᵀ ⊗ I) vec g and vec(B g) = (I ⊗ B) vec g, column-major.
    let blocks: Vec<CMat> = a.iter().zip(b).map(|(ak, bk)| kron(&ak.transpose(), &id) - kron(&id, bk)).collect();
    let stack = crate::linalg::vstack(&blocks);
    let svd = stack.svd(false, true);
    let order = {
        let mut o: Vec<usize> = (0..svd.singular_values.len()).collect();
        o.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
        o
    };
    let smax = svd.singular_values[order[0]];
    if smax == 0.0 {
        return ConjugacyMatch { residual: 0.0, conjugator: Some(id) };
    }
    let last = order[order.len() - 1];
    let residual = svd.singular_values[last] / smax;
    let mut conjugator = None;
    if residual < tol {
        let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
        let g = CMat::from_fn(n, n, |i, j| v_t[(last, j * n + i)].conj());
        let sv_g = singular_values(&g);
        if sv_g.last().copied().unwrap_or(0.0) > 1e-10 * sv_g[0] && inverse(&g).is_some() {
            conjugator = Some(g);
        }
    }
    ConjugacyMatch { residual, conjugator }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, frobenius};

    fn sample() -> Vec<CMat> {
        vec![
            CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.5), c(0.0, 0.0), c(-1.0, 0.0)]),
            CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(3.0, -1.0), c(0.5, 0.0)]),
        ]
    }

    #[test]
    fn words_are_length_major() {
        let w = invariant_words(2, 2);
        assert_eq!(w, vec![vec![0], vec![1], vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(conjugation_invariants(&sample(), 3).len(), 2 + 4 + 8);
        assert_eq!(word_label(&[0, 2]), "x1x3");
    }

    #[test]
    fn recovers_conjugator() {
        let a = sample();
        let g = CMat::from_row_slice(2, 2, &[c(1.0, 1.0), c(0.2, 0.0), c(-0.3, 0.0), c(2.0, 0.0)]);
        let gi = inverse(&g).unwrap();
        let b: Vec<CMat> = a.iter().map(|x| &g * x * &gi).collect();
        let mt = match_up_to_conjugacy(&a, &b, 1e-8);
        assert!(mt.residual < 1e-12);
        let h = mt.conjugator.unwrap();
        let hi = inverse(&h).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!(frobenius(&(&h * x * &hi - y)) < 1e-10);
        }
    }
}
