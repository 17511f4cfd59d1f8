//! Relation checks of monodromy data against the `H_n`, Sahi and
//! Ariki-Koike presentations.

use serde::Serialize;

use super::functor::MonodromyData;
use crate::algebra::cyclotomic::{ariki_koike_trivial_spec, ariki_koike_x, ariki_koike_y_element, expected_big_x_spectrum};
use crate::algebra::presentation::{ariki_koike_presentation, hn_presentation, sahi_presentation};
use crate::algebra::{isotypic_projector, isotypic_subspace, restricted_operator, MatrixRep, ResidualReport};
use crate::error::{Error, Result};
use crate::linalg::{column_span, frobenius, inverse, CMat};
use crate::params::{recover_sahi, MultiplicativeParams, SahiParams, StarGraph};
use crate::scalar::C64;
use crate::spectrum::{spectrum_match, SpectrumMatch};

/// Relation residuals of the monodromy matrices in `H_n(u, t)`.
pub fn hn_relation_check(mon: &MonodromyData, graph: &StarGraph) -> Result<ResidualReport> {
    let mp = MultiplicativeParams::new(graph.clone(), mon.u.clone(), mon.t)?;
    let rep = mon.as_rep(hn_presentation(&mp, mon.n()))?;
    Ok(rep.relation_residuals())
}

fn inv(m: &CMat) -> Result<CMat> {
    inverse(m).ok_or_else(|| Error::SizeMismatch("monodromy matrix is singular".into()))
}

/// The Sahi generators `T_0, …, T_n, X_1, …, X_n` built from `D4` monodromy.
pub fn sahi_images(mon: &MonodromyData, sp: &SahiParams) -> Result<Vec<CMat>> {
    let n = mon.n();
    let dim = mon.matrices[0].nrows();
    let s = (1..n).fold(CMat::identity(dim, dim), |acc, i| acc * mon.m(&format!("T{i}")));
    let si = inv(&s)?;
    let t0 = mon.m("U1") / sp.q;
    let t0v = mon.m("U2").clone();
    let tnv = &si * mon.m("U3") * &s;
    let tn = &si * mon.m("U4") * &s;
    let mut xs = vec![t0.clone() * &t0v * sp.q];
    for i in 1..n {
        let ti = mon.m(&format!("T{i}"));
        xs.push(ti * &xs[i - 1] * ti);
    }
    let mut out = vec![t0];
    out.extend((1..n).map(|i| mon.m(&format!("T{i}")).clone()));
    if n >= 1 {
        out.push(tn.clone());
    }
    out.extend(xs.iter().cloned());
    // consistency of the two descriptions of X_n
    let xn_alt = inv(&tn)? * inv(&tnv)?;
    let defect = frobenius(&(&xn_alt - &xs[n - 1]));
    out.push(CMat::from_element(1, 1, C64::new(defect, 0.0)));
    Ok(out)
}

/// Residuals of the Sahi relations for `D4` monodromy data. `q_hint`
/// selects the sign of `q` (the table determines `(q, t_0)` up to a common
/// sign).
pub fn sahi_relation_check(mon: &MonodromyData, graph: &StarGraph, q_hint: C64, tol: f64) -> Result<ResidualReport> {
    if !graph.is_d4() {
        return Err(Error::NotD4);
    }
    let sp = recover_sahi(&mon.u, q_hint, tol)?;
    let mut images = sahi_images(mon, &sp)?;
    let defect = images.pop().expect("consistency entry")[(0, 0)].re;
    let rep = MatrixRep::new(sahi_presentation(&sp, mon.t, mon.n()), images)?;
    let mut report = rep.relation_residuals();
    report.per_relation.push(("X_n consistency".into(), defect));
    report.max = report.max.max(defect);
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct ArikiKoikeReport {
    pub relations: ResidualReport,
    pub v_prime_dim: usize,
    /// Spectrum of `X|_{V'}` against the predicted class.
    pub x_spectrum: SpectrumMatch,
    /// Largest `‖(X - v_k) Q_k‖ / ‖X‖` over orthonormal bases `Q_k` of the
    /// summands `V'_k = π T_{n-1}^{-1} ⋯ T_1^{-1} P_k(U) V`, `k < ℓ`.
    pub eigenspace_defect: f64,
    /// Dimensions of those summands.
    pub eigenspace_dims: Vec<usize>,
}

/// Checks Cherednik monodromy data against the Ariki-Koike algebra
/// `H_{n,ℓ}(v, t)`, the spectrum of `X` on `V'` and the action of `X` on the
/// summands `V'_k` of `V'` for `k < ℓ`.
pub fn ariki_koike_check(mon: &MonodromyData, tol: f64) -> Result<ArikiKoikeReport> {
    let n = mon.n();
    let v = &mon.u[0];
    let ell = v.len();
    let p = ariki_koike_presentation(v, mon.t, n);
    let rep = mon.as_rep(p.clone())?;
    let relations = rep.relation_residuals();
    let spec = ariki_koike_trivial_spec(&p, n, mon.t, v[ell - 1]);
    let sub = isotypic_subspace(&rep, &spec, tol)?;
    if sub.rank() != n * ell {
        return Err(Error::WrongIsotypicDimension { found: sub.rank(), expected: n * ell });
    }
    let x = restricted_operator(&rep, &ariki_koike_x(&p, n), &sub, tol)?;
    let x_spectrum = spectrum_match(&x, &expected_big_x_spectrum(v, mon.t, n), tol)?;
    let pi = isotypic_projector(&rep, &spec, tol)?;
    let x_full = rep.eval(&ariki_koike_x(&p, n));
    let xnorm = frobenius(&x_full).max(1.0);
    let mut eigenspace_defect: f64 = 0.0;
    let mut eigenspace_dims = Vec::new();
    for (k, &vk) in v[..ell - 1].iter().enumerate() {
        let q = column_span(&(&pi * rep.eval(&ariki_koike_y_element(&p, n, v, k))), tol);
        eigenspace_dims.push(q.ncols());
        let d = frobenius(&((&x_full - CMat::identity(rep.dim(), rep.dim()) * vk) * &q)) / xnorm;
        eigenspace_defect = eigenspace_defect.max(d);
    }
    Ok(ArikiKoikeReport { relations, v_prime_dim: sub.rank(), x_spectrum, eigenspace_defect, eigenspace_dims })
}
