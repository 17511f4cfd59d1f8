//! Dense linear algebra helpers over `C64` (SVD based) and over any exact
//! [`Field`] (row reduction).

use nalgebra::DMatrix;


use crate::error::{Error, Result};
use crate::scalar::{Field, C64};

pub type CMat = DMatrix<C64>;

/// Relative singular value cut used for all rank decisions.
pub const RANK_REL_CUT: f64 = 1e-7;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn to_float<F: Field>(m: &DMatrix<F>) -> CMat {
    m.map(|x| x.to_c64())
}

pub fn identity<F: Field>(n: usize) -> DMatrix<F> {
    DMatrix::from_fn(n, n, |i, j| if i == j { F::one() } else { F::zero() })
}

pub fn scaled<F: Field>(m: &DMatrix<F>, s: &F) -> DMatrix<F> {
    m.map(|x| x * s.clone())
}

/// Singular values in descending order. Rows are zero-padded so that the
/// full right singular basis is available.
pub fn singular_values(a: &CMat) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let svd = a.clone().svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    sv
}

pub fn spectral_norm(a: &CMat) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

pub fn frobenius(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Right null space of `a` from a full SVD.
#[derive(Debug, Clone)]
pub struct NullSpace {
    /// Orthonormal basis, one column per null direction.
    pub basis: CMat,
    /// All `ncols` singular values (descending; padded with zeros).
    pub singular: Vec<f64>,
    pub threshold: f64,
}

/// Null space with an absolute singular value threshold.
pub fn null_space_abs(a: &CMat, threshold: f64) -> NullSpace {
    let n = a.ncols();
    let padded = if a.nrows() < n {
        let mut p = CMat::zeros(n, n);
        p.rows_mut(0, a.nrows()).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].partial_cmp(&svd.singular_values[i]).unwrap());
    let singular: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let null_rows: Vec<usize> = order.iter().copied().filter(|&i| svd.singular_values[i] <= threshold).collect();
    let mut basis = CMat::zeros(n, null_rows.len());
    for (c_idx, &r) in null_rows.iter().enumerate() {
        for k in 0..n {
            basis[(k, c_idx)] = v_t[(r, k)].conj();
        }
    }
    NullSpace { basis, singular, threshold }
}

/// Null space using the relative cut `rel * sigma_max` (absolute floor `abs_floor`).
pub fn null_space(a: &CMat, rel: f64, abs_floor: f64) -> NullSpace {
    let smax = spectral_norm(a);
    null_space_abs(a, (rel * smax).max(abs_floor))
}

/// Numerical rank under the relative cut; ambiguous when a singular value
/// lies within a factor 10 of the cut.
pub fn numerical_rank(sv: &[f64], rel: f64) -> Result<usize> {
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return Ok(0);
    }
    let cut = rel * smax;
    for &s in sv {
        if s > cut / 10.0 && s < cut * 10.0 {
            return Err(Error::RankAmbiguous(s, cut));
        }
    }
    Ok(sv.iter().filter(|&&s| s > cut).count())
}

/// Orthonormal basis of the column span.
pub fn column_span(a: &CMat, rel: f64) -> CMat {
    if a.ncols() == 0 {
        return CMat::zeros(a.nrows(), 0);
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> =
        (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > rel * smax && smax > 0.0).collect();
    let mut out = CMat::zeros(a.nrows(), keep.len());
    for (j, &i) in keep.iter().enumerate() {
        out.set_column(j, &u.column(i));
    }
    out
}

/// Eigenvalues from the complex Schur form.
pub fn eigenvalues(a: &CMat) -> Vec<C64> {
    assert!(a.is_square());
    if a.nrows() == 0 {
        return Vec::new();
    }
    let schur = nalgebra::linalg::Schur::new(a.clone());
    let (_, t) = schur.unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

pub fn inverse(a: &CMat) -> Option<CMat> {
    a.clone().try_inverse()
}

pub fn trace(a: &CMat) -> C64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)]).sum()
}

pub fn commutator<F: Field>(a: &DMatrix<F>, b: &DMatrix<F>) -> DMatrix<F> {
    a * b - b * a
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Matrix exponential by scaling and squaring with a Taylor core.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    let norm = frobenius(a);
    let mut s = 0;
    while norm / 2f64.powi(s) > 0.25 {
        s += 1;
    }
    let b = a / C64::new(2f64.powi(s), 0.0);
    let mut term = CMat::identity(n, n);
    let mut sum = CMat::identity(n, n);
    for k in 1..30 {
        term = &term * &b / C64::new(k as f64, 0.0);
        sum += &term;
        if frobenius(&term) < 1e-18 {
            break;
        }
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// Block diagonal matrix.
pub fn block_diag(blocks: &[CMat]) -> CMat {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        out.view_mut((off, off), (b.nrows(), b.ncols())).copy_from(b);
        off += b.nrows();
    }
    out
}

/// Stacks matrices vertically.
pub fn vstack(parts: &[CMat]) -> CMat {
    let cols = parts.first().map(|p| p.ncols()).unwrap_or(0);
    let rows: usize = parts.iter().map(|p| p.nrows()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut off = 0;
    for p in parts {
        out.rows_mut(off, p.nrows()).copy_from(p);
        off += p.nrows();
    }
    out
}

/// Product that skips zero entries; exact matrices from straightening are
/// sparse, and big-rational multiplications dominate otherwise.
pub fn sparse_mul<F: Field>(a: &DMatrix<F>, b: &DMatrix<F>) -> DMatrix<F> {
    assert_eq!(a.ncols(), b.nrows());
    let mut out = DMatrix::from_element(a.nrows(), b.ncols(), F::zero());
    let a_cols: Vec<Vec<(usize, F)>> = (0..a.ncols())
        .map(|k| (0..a.nrows()).filter(|&i| !a[(i, k)].is_zero()).map(|i| (i, a[(i, k)].clone())).collect())
        .collect();
    for j in 0..b.ncols() {
        for k in 0..b.nrows() {
            let bkj = &b[(k, j)];
            if bkj.is_zero() {
                continue;
            }
            for (i, aik) in &a_cols[k] {
                out[(*i, j)] += aik.clone() * bkj.clone();
            }
        }
    }
    out
}

/// Reduced row echelon form over an exact field. Returns the reduced matrix
/// and pivot columns.
pub fn rref<F: Field>(m: &DMatrix<F>) -> (DMatrix<F>, Vec<usize>) {
    let mut a = m.clone();
    let (rows, cols) = a.shape();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        // largest modulus pivot; exact fields only need nonzero
        let mut best = None;
        let mut best_mod = 0.0;
        for i in r..rows {
            if !a[(i, col)].negligible(1e-13) {
                let md = a[(i, col)].modulus();
                if best.is_none() || md > best_mod {
                    best = Some(i);
                    best_mod = md;
                }
            }
        }
        let Some(p) = best else { continue };
        a.swap_rows(r, p);
        let inv = F::one() / a[(r, col)].clone();
        for j in col..cols {
            a[(r, j)] = a[(r, j)].clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !a[(i, col)].is_zero() {
                let f = a[(i, col)].clone();
                for j in col..cols {
                    let v = a[(r, j)].clone() * f.clone();
                    a[(i, j)] -= v;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    (a, pivots)
}

pub fn exact_rank<F: Field>(m: &DMatrix<F>) -> usize {
    rref(m).1.len()
}

/// Null space basis from the reduced echelon form. Column `c` of the result
/// has a one in free coordinate `free[c]` and zeros in the other free
/// coordinates, so coordinates of a vector in the span are read off at the
/// free positions.
pub fn exact_null_space<F: Field>(m: &DMatrix<F>) -> (DMatrix<F>, Vec<usize>) {
    let cols = m.ncols();
    let (r, pivots) = rref(m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = DMatrix::from_element(cols, free.len(), F::zero());
    for (bi, &f) in free.iter().enumerate() {
        basis[(f, bi)] = F::one();
        for (pi, &pc) in pivots.iter().enumerate() {
            basis[(pc, bi)] = -r[(pi, f)].clone();
        }
    }
    (basis, free)
}

/// Gauss-Jordan inverse over any field.
pub fn exact_inverse<F: Field>(m: &DMatrix<F>) -> Option<DMatrix<F>> {
    let n = m.nrows();
    let mut aug = DMatrix::from_element(n, 2 * n, F::zero());
    aug.view_mut((0, 0), (n, n)).copy_from(m);
    for i in 0..n {
        aug[(i, n + i)] = F::one();
    }
    let (r, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(r.view((0, n), (n, n)).into_owned())
}

pub fn is_zero_matrix<F: Field>(m: &DMatrix<F>) -> bool {
    m.iter().all(|x| x.is_zero())
}

pub fn is_identity<F: Field>(m: &DMatrix<F>) -> bool {
    m.is_square()
        && (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| if i == j { m[(i, j)].is_one() } else { m[(i, j)].is_zero() }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{qi_frac, Qi};

    #[test]
    fn complex_schur_gives_eigenvalues() {
        let a = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]);
        let mut ev = eigenvalues(&a);
        ev.sort_by(|x, y| x.im.partial_cmp(&y.im).unwrap());
        assert!((ev[0] - c(0.0, -1.0)).norm() < 1e-12);
        assert!((ev[1] - c(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let a = CMat::from_row_slice(1, 3, &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
        let ns = null_space(&a, 1e-10, 0.0);
        assert_eq!(ns.basis.ncols(), 2);
        assert!(max_abs(&(&a * &ns.basis)) < 1e-12);
    }

    #[test]
    fn exact_null_space_reads_coordinates_at_free_positions() {
        let m = DMatrix::from_row_slice(1, 3, &[qi_frac(1, 1), qi_frac(2, 1), qi_frac(-1, 1)]);
        let (basis, free) = exact_null_space(&m);
        assert_eq!(free, vec![1, 2]);
        assert!(is_zero_matrix(&(&m * &basis)));
        assert_eq!(basis[(1, 0)], qi_frac(1, 1));
        assert_eq!(basis[(2, 0)], qi_frac(0, 1));
    }

    #[test]
    fn exact_inverse_roundtrip() {
        let m: DMatrix<Qi> =
            DMatrix::from_row_slice(2, 2, &[qi_frac(2, 1), qi_frac(1, 3), qi_frac(0, 1), qi_frac(5, 7)]);
        let inv = exact_inverse(&m).unwrap();
        assert!(is_identity(&(&m * &inv)));
    }

    #[test]
    fn expm_of_diagonal() {
        let a = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.0, 1.0), c(0.3, 0.0)]));
        let e = expm(&a);
        assert!((e[(0, 0)] - c(0.0, 1.0).exp()).norm() < 1e-14);
        assert!((e[(1, 1)] - c(0.3, 0.0).exp()).norm() < 1e-14);
    }

    #[test]
    fn ambiguous_rank_is_reported() {
        assert!(numerical_rank(&[1.0, 2e-7], 1e-7).is_err());
        assert_eq!(numerical_rank(&[1.0, 0.5, 1e-12], 1e-7).unwrap(), 2);
    }
}
