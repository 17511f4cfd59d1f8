//! Smoothness, dimension and irreducibility certificates for solutions.

use serde::Serialize;

use super::{DSSolution, DsKind};
use crate::error::Result;
use crate::linalg::{kron, numerical_rank, singular_values, CMat, RANK_REL_CUT};

#[derive(Debug, Clone, Serialize)]
pub struct TangentReport {
    /// Dimension of each class tangent space at the solution (rank of `ad`).
    pub class_dims: Vec<usize>,
    /// `dim C_k` from the class data.
    pub expected_class_dims: Vec<usize>,
    /// Rank of the differential of the sum/product map on `⊕ T C_k`.
    pub differential_rank: usize,
    /// `dim ker dμ - (N² - 1)`.
    pub tangent_dim: usize,
    /// Smallest singular value kept in the differential-rank decision over
    /// the cut, and largest discarded value over the cut.
    pub gap: (f64, f64),
}

/// `vec([P, x]) = (xᵀ ⊗ I - I ⊗ x) vec(P)` in column-major order.
fn ad(x: &CMat) -> CMat {
    let n = x.nrows();
    let id = CMat::identity(n, n);
    kron(&x.transpose(), &id) - kron(&id, x)
}

/// Orthonormal basis of the column span of `a` with its numerical rank.
fn span_with_rank(a: &CMat) -> Result<CMat> {
    let sv = singular_values(a);
    let r = numerical_rank(&sv, RANK_REL_CUT)?;
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let mut out = CMat::zeros(a.nrows(), r);
    for (c, &i) in order.iter().take(r).enumerate() {
        out.set_column(c, &u.column(i));
    }
    Ok(out)
}

/// Local dimension of the solution variety modulo `PGL_N` at `sol`:
/// `dim ker(dμ on ⊕_k T_{x_k} C_k) - (N² - 1)`, where `T_x C = {[P, x]}`.
pub fn tangent_dimension(sol: &DSSolution) -> Result<TangentReport> {
    let x = &sol.matrices;
    let n = sol.size();
    let id = CMat::identity(n, n);
    let mut blocks = Vec::with_capacity(x.len());
    let mut class_dims = Vec::with_capacity(x.len());
    for k in 0..x.len() {
        let basis = span_with_rank(&ad(&x[k]))?;
        class_dims.push(basis.ncols());
        let image = match sol.kind {
            DsKind::Additive => basis,
            DsKind::Multiplicative => {
                let a = x[..k].iter().fold(id.clone(), |acc, y| acc * y);
                let b = x[k + 1..].iter().fold(id.clone(), |acc, y| acc * y);
                kron(&b.transpose(), &a) * basis
            }
        };
        blocks.push(image);
    }
    let total: usize = class_dims.iter().sum();
    let mut d = CMat::zeros(n * n, total);
    let mut col = 0;
    for b in &blocks {
        d.columns_mut(col, b.ncols()).copy_from(b);
        col += b.ncols();
    }
    let sv = singular_values(&d);
    let rank = numerical_rank(&sv, RANK_REL_CUT)?;
    let cut = RANK_REL_CUT * sv.first().copied().unwrap_or(0.0);
    let kept = if rank > 0 { sv[rank - 1] / cut } else { f64::INFINITY };
    let dropped = sv.get(rank).map_or(0.0, |s| s / cut);
    let kernel = total - rank;
    Ok(TangentReport {
        class_dims,
        expected_class_dims: sol.specs.iter().map(|s| s.class_dimension()).collect(),
        differential_rank: rank,
        tangent_dim: kernel.saturating_sub(n * n - 1),
        gap: (kept, dropped),
    })
}

/// `true` iff words of length at most `max_len` in the tuple span all of
/// `M_N(C)`; `max_len` defaults to `2N`.
pub fn irreducibility_check(mats: &[CMat], max_len: Option<usize>) -> bool {
    let n = mats[0].nrows();
    let target = n * n;
    let max_len = max_len.unwrap_or(2 * n);
    let scaled: Vec<CMat> = mats
        .iter()
        .map(|m| {
            let s = m.norm();
            if s > 0.0 {
                m / crate::scalar::C64::new(s, 0.0)
            } else {
                m.clone()
            }
        })
        .collect();
    let mut basis: Vec<nalgebra::DVector<crate::scalar::C64>> = Vec::new();
    let push = |v: &CMat, basis: &mut Vec<nalgebra::DVector<crate::scalar::C64>>| -> bool {
        let mut w = nalgebra::DVector::from_column_slice(v.as_slice());
        let norm0 = w.norm();
        if norm0 == 0.0 {
            return false;
        }
        for _ in 0..2 {
            for b in basis.iter() {
                let p = b.dotc(&w);
                w -= b * p;
            }
        }
        let r = w.norm();
        if r > 1e-8 * norm0 {
            basis.push(w / crate::scalar::C64::new(r, 0.0));
            true
        } else {
            false
        }
    };
    let id = CMat::identity(n, n);
    push(&id, &mut basis);
    let mut frontier = vec![id];
    for _ in 0..max_len {
        if basis.len() == target {
            break;
        }
        let mut next = Vec::new();
        for w in &frontier {
            for g in &scaled {
                let v = w * g;
                if push(&v, &mut basis) {
                    next.push(v);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    basis.len() == target
}

/// Dimension of the joint centralizer `{g : [g, x_k] = 0 ∀k}`.
pub fn centralizer_dimension(mats: &[CMat]) -> Result<usize> {
    let n = mats[0].nrows();
    let parts: Vec<CMat> = mats.iter().map(ad).collect();
    let stacked = crate::linalg::vstack(&parts);
    let sv = singular_values(&stacked);
    Ok(n * n - numerical_rank(&sv, RANK_REL_CUT)?)
}
