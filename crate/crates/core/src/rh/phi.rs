//! The maps from `B_n`- and `H_n`-modules to Deligne-Simpson tuples: restrict
//! distinguished elements to the trivial isotypic subspace of the cyclotomic
//! subalgebra attached to the last leg.

use serde::Serialize;

use crate::algebra::cyclotomic::{t_ascending, t_ascending_inv, t_descending};
use crate::algebra::presentation::{hn_presentation, s_label, y_label, NcPoly};
use crate::algebra::{isotypic_subspace, restricted_operator, IsotypicSpec, MatrixRep};
use crate::ds::{additive_class_specs, multiplicative_class_specs};
use crate::error::{Error, Result};
use crate::linalg::{frobenius, CMat};
use crate::monodromy::MonodromyData;
use crate::params::{MultiplicativeParams, RationalParams, StarGraph};
use crate::scalar::{Field, C64};
use crate::spectrum::{spectrum_match, ConjugacyClassSpec, SpectrumMatch};

/// A tuple produced by one of the maps, with its certificate: the closure
/// defect (`‖Σ x_k‖` or `‖X_1 ⋯ X_m - Id‖`) and the spectrum of every entry
/// against the predicted class.
#[derive(Debug, Clone, Serialize)]
pub struct PhiReport {
    #[serde(with = "crate::io::cmats")]
    pub matrices: Vec<CMat>,
    pub v_prime_dim: usize,
    pub closure: f64,
    pub specs: Vec<ConjugacyClassSpec>,
    pub spectra: Vec<SpectrumMatch>,
}

impl PhiReport {
    pub fn max_spectral_deviation(&self) -> f64 {
        self.spectra.iter().map(|s| s.deviation).fold(0.0, f64::max)
    }

    pub fn certified(&self, tol: f64) -> bool {
        self.closure <= tol && self.max_spectral_deviation() <= tol
    }
}

fn point_count(rep: &MatrixRep<C64>) -> usize {
    rep.labels().iter().filter(|l| l.starts_with('Y') && l.ends_with(",1")).count()
}

fn certify(matrices: Vec<CMat>, v_prime_dim: usize, closure: f64, specs: Vec<ConjugacyClassSpec>) -> Result<PhiReport> {
    let spectra = matrices
        .iter()
        .zip(&specs)
        .map(|(m, s)| spectrum_match(m, s, f64::INFINITY))
        .collect::<Result<Vec<_>>>()?;
    Ok(PhiReport { matrices, v_prime_dim, closure, specs, spectra })
}

/// `x_k = Y_{n,k}|_{V'}` (`k < m`) and `x_m = (Y_{n,m} - ν Σ_{j<n} s_{nj})|_{V'}`,
/// where `V'` is the subspace on which `s_{ij}` (`i, j < n`) act by 1 and
/// `Y_{i,m}` (`i < n`) by `γ_{mℓ}`.
pub fn phi_degenerate(rep: &MatrixRep<C64>, params: &RationalParams, tol: f64) -> Result<PhiReport> {
    let n = point_count(rep);
    let m = params.m();
    let ell = params.ell();
    let p = rep.presentation().clone();
    let top = params.gamma[m - 1][ell - 1].to_c64();
    let mut entries = Vec::new();
    for i in 1..n {
        for j in i + 1..n {
            entries.push((p.g(&s_label(i, j)), C64::new(1.0, 0.0)));
        }
        entries.push((p.g(&y_label(i, m)), top));
    }
    let sub = isotypic_subspace(rep, &IsotypicSpec { entries }, tol)?;
    if sub.rank() != n * ell {
        return Err(Error::WrongIsotypicDimension { found: sub.rank(), expected: n * ell });
    }
    let nu = params.nu.to_c64();
    let mut matrices = Vec::with_capacity(m);
    for k in 1..=m {
        let mut word = p.g(&y_label(n, k));
        if k == m {
            let swaps = (1..n).fold(NcPoly::zero(), |acc, j| acc + p.g(&s_label(n, j)));
            word = word - swaps.scale(&nu);
        }
        matrices.push(restricted_operator(rep, &word, &sub, tol)?);
    }
    let sum = matrices.iter().skip(1).fold(matrices[0].clone(), |a, b| a + b);
    let specs = additive_class_specs(params, n)?;
    certify(matrices, sub.rank(), frobenius(&sum), specs)
}

/// `Ũ_i = (T_{n-1} ⋯ T_1 U_i T_1^{-1} ⋯ T_{n-1}^{-1})|_{V'}` (`i < m`) and
/// `Ũ_m = (T_{n-1} ⋯ T_1 U_m T_1 ⋯ T_{n-1})|_{V'}`, where `V'` is the
/// subspace on which `T_i` (`i ≤ n-2`) act by `t` and, for `n > 1`, `U_m`
/// by `u_{mℓ}`.
pub fn phi_nondegenerate(mon: &MonodromyData, graph: &StarGraph, tol: f64) -> Result<PhiReport> {
    let n = mon.n();
    let m = graph.m();
    let ell = graph.ell();
    let mp = MultiplicativeParams::new(graph.clone(), mon.u.clone(), mon.t)?;
    let p = hn_presentation(&mp, n);
    let rep = mon.as_rep(p.clone())?;
    let top = mon.u[m - 1][ell - 1];
    let mut entries: Vec<(NcPoly<C64>, C64)> = (1..n.saturating_sub(1)).map(|i| (p.g(&format!("T{i}")), mon.t)).collect();
    if n > 1 {
        entries.push((p.g(&format!("U{m}")), top));
    }
    let sub = isotypic_subspace(&rep, &IsotypicSpec { entries }, tol)?;
    if sub.rank() != n * ell {
        return Err(Error::WrongIsotypicDimension { found: sub.rank(), expected: n * ell });
    }
    let mut matrices = Vec::with_capacity(m);
    for k in 1..=m {
        let right = if k == m { t_ascending(&p, n) } else { t_ascending_inv(&p, n) };
        let word = t_descending(&p, n) * p.g(&format!("U{k}")) * right;
        matrices.push(restricted_operator(&rep, &word, &sub, tol)?);
    }
    let dim = sub.rank();
    let prod = matrices.iter().fold(CMat::identity(dim, dim), |acc, x| acc * x);
    let specs = multiplicative_class_specs(&mp, n, tol.max(1e-8))?;
    certify(matrices, dim, frobenius(&(prod - CMat::identity(dim, dim))), specs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::induced_rep_nu_zero;
    use crate::ds::{solve_additive_ds, SolverConfig};
    use crate::params::qr;

    fn d4() -> RationalParams {
        let g = vec![
            vec![qr(1, 5), qr(-1, 7)],
            vec![qr(-1, 5), qr(1, 9)],
            vec![qr(1, 3), qr(1, 7)],
            vec![qr(-1, 3), qr(-1, 9)],
        ];
        RationalParams::new(&[2, 2, 2, 2], g, qr(0, 1)).unwrap()
    }

    #[test]
    fn n1_phi_is_the_module_itself() {
        let p = d4();
        let sol = solve_additive_ds(&additive_class_specs(&p, 1).unwrap(), &SolverConfig::default()).unwrap();
        let rep = induced_rep_nu_zero(&p, std::slice::from_ref(&sol.matrices), 1e-9).unwrap();
        let phi = phi_degenerate(&rep, &p, 1e-9).unwrap();
        assert_eq!(phi.v_prime_dim, 2);
        assert!(phi.certified(1e-9));
        for (x, y) in phi.matrices.iter().zip(&sol.matrices) {
            assert!((crate::linalg::trace(x) - crate::linalg::trace(y)).norm() < 1e-12);
            assert!((crate::linalg::trace(&(x * x)) - crate::linalg::trace(&(y * y))).norm() < 1e-12);
        }
    }
}
