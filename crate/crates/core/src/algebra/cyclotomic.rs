//! Trivial-isotypic data for the cyclotomic subalgebras: the character of
//! `B_{n-1,ℓ}` (resp. `H_{n-1,ℓ}`), the distinguished elements `x` and `X`,
//! and their predicted spectra on `V'`.

use nalgebra::DMatrix;

use super::isotypic::{exact_isotypic_subspace, exact_restrict, IsotypicSpec};
use super::presentation::{ariki_koike_presentation, bnl_presentation, s_label, y_label, NcPoly, Presentation};
use super::regular::degenerate_regular_rep;
use super::rep::MatrixRep;
use crate::error::{Error, Result};
use crate::scalar::{Field, Qi, C64};
use crate::spectrum::{exact_spectrum_certificate, ConjugacyClassSpec};

/// Character `s_ij ↦ 1`, `Y_i ↦ λ_ℓ` of `B_{n-1,ℓ}` inside `B_{n,ℓ}`.
pub fn bnl_trivial_spec<F: Field>(p: &Presentation<F>, n: usize, lambda_ell: &F) -> IsotypicSpec<F> {
    let mut entries = Vec::new();
    for i in 1..n {
        for j in i + 1..n {
            entries.push((p.g(&s_label(i, j)), F::one()));
        }
        entries.push((p.g(&format!("Y{i}")), lambda_ell.clone()));
    }
    IsotypicSpec { entries }
}

/// `x = Y_n - ν Σ_{j<n} s_nj` in a `B_{n,ℓ}` presentation.
pub fn bnl_x_element<F: Field>(p: &Presentation<F>, n: usize, nu: &F) -> NcPoly<F> {
    let s = (1..n).fold(NcPoly::zero(), |acc, j| acc + p.g(&s_label(n, j)));
    p.g(&format!("Y{n}")) - s.scale(nu)
}

/// `{λ_ℓ - (n-1)ν ×1, λ_ℓ + ν ×(n-1), λ_j ×n (j < ℓ)}` with equal values merged.
pub fn expected_x_spectrum<F: Field>(lambda: &[F], nu: &F, n: usize) -> Vec<(F, usize)> {
    let ell = lambda.len();
    let top = lambda[ell - 1].clone();
    let mut raw = vec![(top.clone() - nu.clone() * F::from_i64(n as i64 - 1), 1), (top + nu.clone(), n - 1)];
    raw.extend(lambda[..ell - 1].iter().map(|l| (l.clone(), n)));
    let mut out: Vec<(F, usize)> = Vec::new();
    for (e, m) in raw {
        if m == 0 {
            continue;
        }
        match out.iter_mut().find(|(f, _)| (f.clone() - e.clone()).is_zero()) {
            Some(slot) => slot.1 += m,
            None => out.push((e, m)),
        }
    }
    out
}

/// Multiplicative analogue: `{v_ℓ t^{2(n-1)} ×1, v_ℓ t^{-2} ×(n-1), v_j ×n}`.
pub fn expected_big_x_spectrum(v: &[C64], t: C64, n: usize) -> ConjugacyClassSpec {
    let ell = v.len();
    let top = v[ell - 1];
    let mut entries = vec![(top * t.powi(2 * (n as i32 - 1)), 1), (top * t.powi(-2), n - 1)];
    entries.extend(v[..ell - 1].iter().map(|&x| (x, n)));
    ConjugacyClassSpec::new(entries)
}

#[derive(Debug, Clone)]
pub struct IsotypicSpectrumReport {
    pub regular_dim: usize,
    pub v_prime_dim: usize,
    pub restricted_x: DMatrix<Qi>,
    pub expected: Vec<(Qi, usize)>,
    pub certified: bool,
}

/// Builds the regular representation of `B_{n,ℓ}(λ, ν)` exactly, extracts
/// `V'` and certifies the spectrum of `x|_{V'}` exactly.
pub fn isotypic_spectrum_exact(n: usize, lambda: &[Qi], nu: &Qi) -> Result<IsotypicSpectrumReport> {
    super::isotypic::check_generic_additive(lambda, nu, n, 0.0)?;
    let rep = degenerate_regular_rep(n, lambda, nu)?;
    let p = rep.presentation().clone();
    let spec = bnl_trivial_spec(&p, n, lambda.last().unwrap());
    let sub = exact_isotypic_subspace(&rep, &spec)?;
    let x = rep.eval(&bnl_x_element(&p, n, nu));
    let restricted_x = exact_restrict(&x, &sub)?;
    let expected = expected_x_spectrum(lambda, nu, n);
    let certified = exact_spectrum_certificate(&restricted_x, &expected);
    Ok(IsotypicSpectrumReport { regular_dim: rep.dim(), v_prime_dim: sub.basis.ncols(), restricted_x, expected, certified })
}

/// Pulls a `B_n` representation back along `η_k : B_{n,d_k} → B_n`
/// (`Y_i ↦ Y_{i,k}`), with `λ = γ_k`.
pub fn restrict_along_eta<F: Field>(rep: &MatrixRep<F>, n: usize, k: usize, lambda: &[F], nu: &F) -> Result<MatrixRep<F>> {
    let p = bnl_presentation(lambda, nu, n);
    let mut mats = Vec::with_capacity(p.labels.len());
    for label in &p.labels {
        let src = match label.strip_prefix('Y') {
            Some(i) if !label.contains(',') => y_label(i.parse().expect("generator index"), k),
            _ => label.clone(),
        };
        let m = rep.get(&src).ok_or_else(|| Error::ShapeMismatch(format!("representation lacks {src}")))?;
        mats.push(m.clone());
    }
    MatrixRep::new(p, mats)
}

/// Pulls an `H_n` representation back along `η_k` (`U ↦ U_k`) to the
/// Ariki-Koike algebra with parameters `v`.
pub fn restrict_along_eta_hecke(rep: &MatrixRep<C64>, n: usize, k: usize, v: &[C64], t: C64) -> Result<MatrixRep<C64>> {
    let p = ariki_koike_presentation(v, t, n);
    let mut mats = Vec::with_capacity(p.labels.len());
    for label in &p.labels {
        let src = if label == "U" { format!("U{k}") } else { label.clone() };
        let m = rep.get(&src).ok_or_else(|| Error::ShapeMismatch(format!("representation lacks {src}")))?;
        mats.push(m.clone());
    }
    MatrixRep::new(p, mats)
}

/// Character `T_i ↦ t (i ≤ n-2)`, `U ↦ v_ℓ` of `H_{n-1,ℓ}`.
pub fn ariki_koike_trivial_spec(p: &Presentation<C64>, n: usize, t: C64, v_ell: C64) -> IsotypicSpec<C64> {
    let mut entries: Vec<(NcPoly<C64>, C64)> = (1..n.saturating_sub(1)).map(|i| (p.g(&format!("T{i}")), t)).collect();
    entries.push((p.g("U"), v_ell));
    IsotypicSpec { entries }
}

/// `T_{n-1} ⋯ T_1` as a polynomial (identity for `n = 1`).
pub fn t_descending<F: Field>(p: &Presentation<F>, n: usize) -> NcPoly<F> {
    (1..n).rev().fold(NcPoly::one(), |acc, i| acc * p.g(&format!("T{i}")))
}

/// `T_1 ⋯ T_{n-1}`.
pub fn t_ascending<F: Field>(p: &Presentation<F>, n: usize) -> NcPoly<F> {
    (1..n).fold(NcPoly::one(), |acc, i| acc * p.g(&format!("T{i}")))
}

/// `T_1^{-1} ⋯ T_{n-1}^{-1}`.
pub fn t_ascending_inv<F: Field>(p: &Presentation<F>, n: usize) -> NcPoly<F> {
    (1..n).fold(NcPoly::one(), |acc, i| acc * p.gi(&format!("T{i}")))
}

/// `T_{n-1}^{-1} ⋯ T_1^{-1}`.
pub fn t_descending_inv<F: Field>(p: &Presentation<F>, n: usize) -> NcPoly<F> {
    (1..n).rev().fold(NcPoly::one(), |acc, i| acc * p.gi(&format!("T{i}")))
}

/// `X = T_{n-1} ⋯ T_1 U T_1 ⋯ T_{n-1}` in an Ariki-Koike presentation.
pub fn ariki_koike_x(p: &Presentation<C64>, n: usize) -> NcPoly<C64> {
    t_descending(p, n) * p.g("U") * t_ascending(p, n)
}

/// `T_{n-1}^{-1} ⋯ T_1^{-1} P_k(U)`, where `P_k` is the Lagrange polynomial
/// equal to 1 at `v_k` and 0 at the other `v_j`. After the isotypic idempotent
/// of `H_{n-1,ℓ}` it spans the `k`-th summand of `V'`.
pub fn ariki_koike_y_element(p: &Presentation<C64>, n: usize, v: &[C64], k: usize) -> NcPoly<C64> {
    let u = p.g("U");
    let lagrange = v.iter().enumerate().filter(|(j, _)| *j != k).fold(NcPoly::one(), |acc, (_, &vj)| {
        acc * (u.clone() - NcPoly::one().scale(&vj)).scale(&(C64::new(1.0, 0.0) / (v[k] - vj)))
    });
    t_descending_inv(p, n) * lagrange
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::qr;

    #[test]
    fn isotypic_spectrum_n2_l2() {
        let r = isotypic_spectrum_exact(2, &[qr(1, 3), qr(-2, 7)], &qr(1, 5)).unwrap();
        assert_eq!(r.regular_dim, 8);
        assert_eq!(r.v_prime_dim, 4);
        assert!(r.certified);
    }

    #[test]
    fn expected_spectrum_shape() {
        let e = expected_x_spectrum(&[qr(0, 1), qr(1, 2)], &qr(1, 10), 3);
        assert_eq!(e, vec![(qr(3, 10), 1), (qr(6, 10), 2), (qr(0, 1), 3)]);
        let e1 = expected_x_spectrum(&[qr(0, 1), qr(1, 2)], &qr(1, 10), 1);
        assert_eq!(e1, vec![(qr(1, 2), 1), (qr(0, 1), 1)]);
    }

    #[test]
    fn nongeneric_rejected() {
        assert!(matches!(
            isotypic_spectrum_exact(2, &[qr(0, 1), qr(2, 5)], &qr(1, 5)),
            Err(Error::NonGenericParameters(_))
        ));
    }
}
