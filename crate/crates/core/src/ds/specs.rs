//! Conjugacy classes prescribed by the parameters.

use num_traits::Zero;

use crate::algebra::cyclotomic::{expected_big_x_spectrum, expected_x_spectrum};
use crate::error::{Error, Result};
use crate::params::{MultiplicativeParams, RationalParams};
use crate::scalar::{Field, C64};
use crate::spectrum::ConjugacyClassSpec;

/// Classes of size `nℓ`: `γ_{kj} ×(nℓ/d_k)` for `k < m`, and for the last leg
/// `{γ_{mℓ} - (n-1)ν ×1, γ_{mℓ} + ν ×(n-1), γ_{mj} ×n (j < ℓ)}`.
pub fn additive_class_specs(params: &RationalParams, n: usize) -> Result<Vec<ConjugacyClassSpec>> {
    let hbar = params.hbar()?;
    if !hbar.is_zero() {
        return Err(Error::NonZeroHbar(hbar.to_c64().norm()));
    }
    let ell = params.ell();
    let m = params.m();
    let mut out = Vec::with_capacity(m);
    for (k, row) in params.gamma.iter().enumerate().take(m - 1) {
        let mult = n * ell / params.graph.d(k);
        out.push(ConjugacyClassSpec::new(row.iter().map(|g| (g.to_c64(), mult)).collect()));
    }
    let last = expected_x_spectrum(params.lambda(), &params.nu, n);
    out.push(ConjugacyClassSpec::new(last.iter().map(|(e, k)| (e.to_c64(), *k)).collect()));
    Ok(out)
}

/// Classes `u_{kj} ×(nℓ/d_k)` for `k < m` and
/// `{u_{mℓ}t^{2(n-1)} ×1, u_{mℓ}t^{-2} ×(n-1), u_{mj} ×n}` for the last leg.
/// Requires `q^n = 1` within `tol`.
pub fn multiplicative_class_specs(params: &MultiplicativeParams, n: usize, tol: f64) -> Result<Vec<ConjugacyClassSpec>> {
    if !params.graph.is_affine() {
        return Err(Error::NotAffine);
    }
    let defect = (params.q.powi(n as i32) - C64::new(1.0, 0.0)).norm();
    if defect > tol {
        return Err(Error::DetObstruction(defect));
    }
    let ell = params.graph.ell();
    let m = params.graph.m();
    let mut out = Vec::with_capacity(m);
    for (k, row) in params.u.iter().enumerate().take(m - 1) {
        let mult = n * ell / params.graph.d(k);
        out.push(ConjugacyClassSpec::new(row.iter().map(|&u| (u, mult)).collect()));
    }
    out.push(expected_big_x_spectrum(params.v(), params.t, n));
    Ok(out)
}
