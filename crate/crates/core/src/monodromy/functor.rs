//! Parallel transport along paths and the monodromy of connections around
//! the braid generators.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::connection::{Connection, ConnectionKind};
use super::integrator::{integrate_adaptive, IntegrationStats, StepControl};
use super::path::{braid_loop, minimal_gap, Generator, PathInConfig};
use crate::algebra::{MatrixRep, Presentation};
use crate::error::{Error, Result};
use crate::linalg::{frobenius, CMat};
use crate::scalar::C64;

#[derive(Debug, Clone)]
pub struct Transport {
    pub matrix: CMat,
    /// `‖F(tol) - F(tol/10)‖_F`.
    pub error_estimate: f64,
    pub stats: IntegrationStats,
}

/// Transport along `path` at one tolerance: segment transports multiplied
/// with later segments on the left.
pub fn transport_once(conn: &Connection, path: &PathInConfig, tol: f64) -> Result<(CMat, IntegrationStats)> {
    let mut total = CMat::identity(conn.dim, conn.dim);
    let mut stats = IntegrationStats::default();
    let ctl = StepControl::with_tol(tol);
    for seg in &path.segments {
        let rhs = |s: f64| {
            let (z, v) = seg.eval(s);
            conn.evaluate(&z, &v)
        };
        let (p, st) = integrate_adaptive(rhs, &CMat::identity(conn.dim, conn.dim), &ctl)?;
        stats += st;
        total = p * total;
    }
    Ok((total, stats))
}

/// Solves `dF/ds = A(z(s)) ż(s) F`, `F(0) = Id` along `path`; the result is
/// certified by repeating at `tol/10`.
pub fn parallel_transport(conn: &Connection, path: &PathInConfig, tol: f64) -> Result<Transport> {
    if !(tol > 0.0) {
        return Err(Error::Parse(format!("tolerance must be positive, got {tol}")));
    }
    let w = path.winding();
    if w.min_distance < path.r_min {
        return Err(Error::PathTooCoarse(format!("path comes within {} of the singular locus", w.min_distance)));
    }
    let (coarse, mut stats) = transport_once(conn, path, tol)?;
    let (fine, st) = transport_once(conn, path, tol / 10.0)?;
    stats += st;
    let err = frobenius(&(&coarse - &fine));
    if err > 1e3 * tol * frobenius(&fine).max(1.0) {
        return Err(Error::ToleranceNotMet(err));
    }
    Ok(Transport { matrix: fine, error_estimate: err, stats })
}

/// Monodromy matrices of a connection around the braid generators, with the
/// multiplicative parameters `u = e^{2πiγ}`, `t = e^{-πiν}` attached.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonodromyData {
    pub kind: ConnectionKind,
    pub labels: Vec<String>,
    #[serde(with = "crate::io::cmats")]
    pub matrices: Vec<CMat>,
    pub alpha: Vec<f64>,
    pub base: Vec<f64>,
    pub delta: f64,
    pub u: Vec<Vec<C64>>,
    pub t: C64,
    /// Largest transport error estimate over the generators.
    pub transport_error: f64,
}

impl MonodromyData {
    pub fn get(&self, label: &str) -> Option<&CMat> {
        self.labels.iter().position(|l| l == label).map(|i| &self.matrices[i])
    }

    pub fn m(&self, label: &str) -> &CMat {
        self.get(label).unwrap_or_else(|| panic!("no monodromy matrix {label}"))
    }

    pub fn n(&self) -> usize {
        self.base.len()
    }

    /// The matrices as a representation of `presentation`, matched by label.
    pub fn as_rep(&self, presentation: Presentation<C64>) -> Result<MatrixRep<C64>> {
        let mats = presentation
            .labels
            .iter()
            .map(|l| self.get(l).cloned().ok_or_else(|| Error::ShapeMismatch(format!("no monodromy matrix {l}"))))
            .collect::<Result<Vec<_>>>()?;
        MatrixRep::new(presentation, mats)
    }
}

/// Transports around `U_1..U_m` (first point encircling each puncture) and
/// `T_1..T_{n-1}` (followed by the fiber swap `s_{i,i+1}`).
pub fn monodromy_functor(conn: &Connection, alpha: &[f64], base: &[f64], delta: Option<f64>, tol: f64) -> Result<MonodromyData> {
    if base.len() != conn.n() {
        return Err(Error::ShapeMismatch(format!("{} base points for {} moving points", base.len(), conn.n())));
    }
    if alpha.len() != conn.punctures.len() {
        return Err(Error::ShapeMismatch(format!("{} punctures for a connection with {}", alpha.len(), conn.punctures.len())));
    }
    let gap = minimal_gap(alpha, base)?;
    let delta = delta.unwrap_or(gap / 4.0);
    let single = conn.kind == ConnectionKind::Cherednik;
    let mut gens: Vec<Generator> = (1..=alpha.len()).map(Generator::U).collect();
    gens.extend((1..base.len()).map(Generator::T));
    let results: Vec<Result<(String, CMat, f64)>> = gens
        .par_iter()
        .map(|&g| {
            let path = braid_loop(alpha, base, g, Some(delta))?;
            let tr = parallel_transport(conn, &path, tol)?;
            let mat = match g {
                Generator::U(_) => tr.matrix,
                Generator::T(i) => &conn.swaps[i - 1] * tr.matrix,
            };
            Ok((g.label(single), mat, tr.error_estimate))
        })
        .collect();
    let mut labels = Vec::new();
    let mut matrices = Vec::new();
    let mut transport_error: f64 = 0.0;
    for r in results {
        let (l, m, e) = r?;
        labels.push(l);
        matrices.push(m);
        transport_error = transport_error.max(e);
    }
    let two_pi_i = C64::new(0.0, 2.0 * std::f64::consts::PI);
    let u = conn.gamma.iter().map(|row| row.iter().map(|g| (two_pi_i * g).exp()).collect()).collect();
    let t = (C64::new(0.0, -std::f64::consts::PI) * conn.nu).exp();
    Ok(MonodromyData {
        kind: conn.kind,
        labels,
        matrices,
        alpha: alpha.to_vec(),
        base: base.to_vec(),
        delta,
        u,
        t,
        transport_error,
    })
}

/// Default contour data: `α = (0, 1, …, m-1)`, `z_{0j} = m + j - 1`.
pub fn default_geometry(m: usize, n: usize) -> (Vec<f64>, Vec<f64>) {
    ((0..m).map(|k| k as f64).collect(), (0..n).map(|j| (m + j) as f64).collect())
}
