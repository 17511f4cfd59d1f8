//! The Riemann-Hilbert map on additive tuples and the commuting-diagram
//! check between the two routes from a `B_n`-module to a multiplicative
//! tuple.

use serde::Serialize;

use super::invariants::{match_up_to_conjugacy, ConjugacyMatch};
use super::phi::{phi_degenerate, phi_nondegenerate, PhiReport};
use crate::algebra::MatrixRep;
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, frobenius, CMat};
use crate::monodromy::{fuchsian_connection, kz_connection, monodromy_functor};
use crate::params::RationalParams;
use crate::scalar::C64;
use crate::spectrum::{bottleneck_distance, SpectrumMatch};

#[derive(Debug, Clone, Serialize)]
pub struct RhResult {
    #[serde(with = "crate::io::cmats")]
    pub matrices: Vec<CMat>,
    /// `‖X_1 ⋯ X_m - Id‖_F`.
    pub product_residual: f64,
    /// Spectrum of `X_k` against `exp(2πi · spec x_k)`.
    pub spectra: Vec<SpectrumMatch>,
    pub transport_error: f64,
    pub alpha: Vec<f64>,
    pub base: f64,
    pub delta: f64,
}

impl RhResult {
    pub fn max_spectral_deviation(&self) -> f64 {
        self.spectra.iter().map(|s| s.deviation).fold(0.0, f64::max)
    }
}

/// Monodromy of `dF/dz = Σ_k x_k/(z - α_k) F` around each `α_k`, based at
/// the real point `base > α_m`.
pub fn rh_map(x: &[CMat], alpha: &[f64], base: f64, tol: f64) -> Result<RhResult> {
    let conn = fuchsian_connection(x, alpha, tol.sqrt())?;
    let mon = monodromy_functor(&conn, alpha, &[base], None, tol)?;
    let matrices: Vec<CMat> = (1..=x.len()).map(|k| mon.m(&format!("U{k}")).clone()).collect();
    let n = x[0].nrows();
    let prod = matrices.iter().fold(CMat::identity(n, n), |acc, m| acc * m);
    let two_pi_i = C64::new(0.0, 2.0 * std::f64::consts::PI);
    let spectra = matrices
        .iter()
        .zip(x)
        .map(|(xm, xa)| {
            let want: Vec<C64> = eigenvalues(xa).into_iter().map(|e| (two_pi_i * e).exp()).collect();
            let deviation = bottleneck_distance(&eigenvalues(xm), &want);
            SpectrumMatch { matches: deviation <= 1e3 * tol, deviation }
        })
        .collect();
    Ok(RhResult {
        matrices,
        product_residual: frobenius(&(prod - CMat::identity(n, n))),
        spectra,
        transport_error: mon.transport_error,
        alpha: alpha.to_vec(),
        base,
        delta: mon.delta,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagramReport {
    /// Monodromy of the module, then the nondegenerate map.
    pub via_monodromy: PhiReport,
    /// The degenerate map, then the Riemann-Hilbert map.
    pub via_rh: RhResult,
    pub matching: ConjugacyMatch,
}

impl DiagramReport {
    pub fn residual(&self) -> f64 {
        self.matching.residual
    }
}

/// Compares both routes around the square for the module `rep` with the KZ
/// connection on punctures `alpha` and base points `base`. The Riemann-Hilbert
/// side uses the last base point.
pub fn diagram_check(rep: &MatrixRep<C64>, params: &RationalParams, alpha: &[f64], base: &[f64], tol: f64) -> Result<DiagramReport> {
    let b = *base.last().ok_or_else(|| Error::ShapeMismatch("no base point".into()))?;
    let conn = kz_connection(rep, &params.gamma_c64(), params.nu_c64(), alpha, tol.sqrt())?;
    let mon = monodromy_functor(&conn, alpha, base, None, tol)?;
    let via_monodromy = phi_nondegenerate(&mon, &params.graph, tol.sqrt())?;
    let degenerate = phi_degenerate(rep, params, tol.sqrt())?;
    let via_rh = rh_map(&degenerate.matrices, alpha, b, tol)?;
    let matching = match_up_to_conjugacy(&via_monodromy.matrices, &via_rh.matrices, 1e-6);
    Ok(DiagramReport { via_monodromy, via_rh, matching })
}
