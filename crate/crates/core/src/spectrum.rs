//! Prescribed semisimple conjugacy classes and eigenvalue matching.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, exact_null_space, identity, to_float, CMat};
use crate::scalar::{Field, C64};

/// A semisimple class: eigenvalues with multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugacyClassSpec {
    pub entries: Vec<(C64, usize)>,
}

impl ConjugacyClassSpec {
    /// Merges numerically equal eigenvalues (within `1e-14` relative).
    pub fn new(entries: Vec<(C64, usize)>) -> Self {
        let mut merged: Vec<(C64, usize)> = Vec::new();
        for (e, m) in entries {
            if m == 0 {
                continue;
            }
            match merged.iter_mut().find(|(f, _)| (*f - e).norm() <= 1e-14 * (1.0 + e.norm())) {
                Some(slot) => slot.1 += m,
                None => merged.push((e, m)),
            }
        }
        Self { entries: merged }
    }

    pub fn size(&self) -> usize {
        self.entries.iter().map(|e| e.1).sum()
    }

    /// Eigenvalues listed with multiplicity.
    pub fn expanded(&self) -> Vec<C64> {
        self.entries.iter().flat_map(|&(e, m)| std::iter::repeat_n(e, m)).collect()
    }

    pub fn trace(&self) -> C64 {
        self.entries.iter().map(|&(e, m)| e * m as f64).sum()
    }

    pub fn det(&self) -> C64 {
        self.entries.iter().map(|&(e, m)| e.powi(m as i32)).product()
    }

    /// Diagonal representative.
    pub fn diagonal(&self) -> CMat {
        CMat::from_diagonal(&nalgebra::DVector::from_vec(self.expanded()))
    }

    /// Dimension of the conjugacy class, `N² - Σ m_i²`.
    pub fn class_dimension(&self) -> usize {
        let n = self.size();
        n * n - self.entries.iter().map(|e| e.1 * e.1).sum::<usize>()
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self::new(self.entries.iter().map(|&(e, m)| (f(e), m)).collect())
    }
}

/// Maximal deviation under the optimal (bottleneck) matching of two
/// multisets of equal size.
pub fn bottleneck_distance(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    let mut cands: Vec<f64> = a.iter().flat_map(|x| b.iter().map(move |y| (x - y).norm())).collect();
    cands.sort_by(f64::total_cmp);
    cands.dedup();
    let feasible = |cut: f64| -> bool {
        // Kuhn's augmenting paths on the threshold graph
        let mut owner: Vec<Option<usize>> = vec![None; n];
        fn augment(i: usize, a: &[C64], b: &[C64], cut: f64, seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
            for j in 0..b.len() {
                if !seen[j] && (a[i] - b[j]).norm() <= cut {
                    seen[j] = true;
                    if owner[j].is_none_or(|o| augment(o, a, b, cut, seen, owner)) {
                        owner[j] = Some(i);
                        return true;
                    }
                }
            }
            false
        }
        (0..n).all(|i| augment(i, a, b, cut, &mut vec![false; n], &mut owner))
    };
    let (mut lo, mut hi) = (0, cands.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(cands[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    cands[lo]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumMatch {
    pub matches: bool,
    pub deviation: f64,
}

/// Compares the eigenvalues of `m` with a class under optimal matching.
pub fn spectrum_match<F: Field>(m: &DMatrix<F>, spec: &ConjugacyClassSpec, tol: f64) -> Result<SpectrumMatch> {
    if !m.is_square() || m.nrows() != spec.size() {
        return Err(Error::SizeMismatch(format!("matrix of size {} vs spec of size {}", m.nrows(), spec.size())));
    }
    let ev = eigenvalues(&to_float(m));
    let deviation = bottleneck_distance(&ev, &spec.expanded());
    Ok(SpectrumMatch { matches: deviation <= tol, deviation })
}

/// Exact certificate that `m` is diagonalizable with the given spectrum:
/// `nullity(m - e) = mult(e)` for each `e`, with multiplicities summing to
/// the size.
pub fn exact_spectrum_certificate<F: Field>(m: &DMatrix<F>, spec: &[(F, usize)]) -> bool {
    let n = m.nrows();
    if spec.iter().map(|e| e.1).sum::<usize>() != n {
        return false;
    }
    spec.iter().all(|(e, mult)| {
        let shifted = m - identity::<F>(n).map(|x| x * e.clone());
        exact_null_space(&shifted).0.ncols() == *mult
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn diagonal_matches() {
        let (a, b) = (c(0.3, 0.1), c(-1.0, 2.0));
        let m = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![a, a, b]));
        let r = spectrum_match(&m, &ConjugacyClassSpec::new(vec![(a, 2), (b, 1)]), 1e-12).unwrap();
        assert!(r.matches && r.deviation < 1e-14);
        let m2 = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![a, b]));
        assert!(!spectrum_match(&m2, &ConjugacyClassSpec::new(vec![(a, 2)]), 1e-8).unwrap().matches);
        assert!(spectrum_match(&m2, &ConjugacyClassSpec::new(vec![(a, 3)]), 1e-8).is_err());
    }

    #[test]
    fn lambda_minus_nu_t() {
        let (l, nu) = (c(0.4, 0.0), c(0.15, 0.0));
        let m = CMat::from_row_slice(2, 2, &[l, -nu, -nu, l]);
        let spec = ConjugacyClassSpec::new(vec![(l - nu, 1), (l + nu, 1)]);
        assert!(spectrum_match(&m, &spec, 1e-12).unwrap().matches);
    }

    #[test]
    fn bottleneck_uses_multiplicities() {
        let a = [c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let b = [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)];
        assert!((bottleneck_distance(&a, &b) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn class_dimension_formula() {
        let s = ConjugacyClassSpec::new(vec![(c(1.0, 0.0), 2), (c(2.0, 0.0), 2)]);
        assert_eq!(s.class_dimension(), 8);
    }
}
