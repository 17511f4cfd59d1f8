//! Levenberg-Marquardt on the class-parametrized tuples `x_k = g_k Λ_k g_k^{-1}`.

use nalgebra::DVector;

use super::{defect, DSSolution, DsKind};
use crate::error::{Error, Result};
use crate::linalg::{frobenius, inverse, kron, CMat};
use crate::rng::{gaussian_matrix, stream};
use crate::scalar::C64;
use crate::spectrum::ConjugacyClassSpec;

#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    /// Target Frobenius residual.
    pub tol: f64,
    /// Bound on `|Σ eigenvalue·multiplicity|` (additive) or `|Π det - 1|`.
    pub precondition_tol: f64,
    pub max_iter: usize,
    pub starts: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tol: 1e-12, precondition_tol: 1e-10, max_iter: 300, starts: 32, seed: 0 }
    }
}

/// Solves `x_1 + ⋯ + x_m = 0` with `x_k` in the class `specs[k]`.
pub fn solve_additive_ds(specs: &[ConjugacyClassSpec], cfg: &SolverConfig) -> Result<DSSolution> {
    check_sizes(specs)?;
    let tr: C64 = specs.iter().map(|s| s.trace()).sum();
    if tr.norm() > cfg.precondition_tol {
        return Err(Error::TraceObstruction(tr.norm()));
    }
    solve(DsKind::Additive, specs, cfg)
}

/// Solves `X_1 ⋯ X_m = Id` with `X_k` in the class `specs[k]`.
pub fn solve_multiplicative_ds(specs: &[ConjugacyClassSpec], cfg: &SolverConfig) -> Result<DSSolution> {
    check_sizes(specs)?;
    let det: C64 = specs.iter().map(|s| s.det()).product();
    let d = (det - C64::new(1.0, 0.0)).norm();
    if d > cfg.precondition_tol {
        return Err(Error::DetObstruction(d));
    }
    if specs.iter().flat_map(|s| &s.entries).any(|e| e.0.norm() == 0.0) {
        return Err(Error::ZeroParameter("eigenvalue"));
    }
    solve(DsKind::Multiplicative, specs, cfg)
}

fn check_sizes(specs: &[ConjugacyClassSpec]) -> Result<()> {
    let n = specs.first().map(|s| s.size()).ok_or_else(|| Error::ShapeMismatch("no classes given".into()))?;
    if n == 0 || specs.iter().any(|s| s.size() != n) {
        return Err(Error::SizeMismatch("classes must share one positive size".into()));
    }
    Ok(())
}

fn solve(kind: DsKind, specs: &[ConjugacyClassSpec], cfg: &SolverConfig) -> Result<DSSolution> {
    let lambdas: Vec<CMat> = specs.iter().map(|s| s.diagonal()).collect();
    let n = lambdas[0].nrows();
    let tag = match kind {
        DsKind::Additive => "ds/additive",
        DsKind::Multiplicative => "ds/multiplicative",
    };
    let mut best = f64::INFINITY;
    let mut total_iter = 0;
    for start in 0..cfg.starts.max(1) {
        let mut rng = stream(cfg.seed, &format!("{tag}/{start}"));
        let mut g: Vec<CMat> = (0..specs.len())
            .map(|k| if k == 0 { CMat::identity(n, n) } else { gaussian_matrix(&mut rng, n, n) })
            .collect();
        if g.iter().any(|gk| inverse(gk).is_none()) {
            continue;
        }
        let outcome = levenberg_marquardt(kind, &lambdas, &mut g, cfg);
        total_iter += outcome.iterations;
        best = best.min(outcome.residual);
        if outcome.residual < cfg.tol {
            let matrices = conjugate_all(&g, &lambdas).expect("invertible conjugators");
            return Ok(DSSolution {
                kind,
                residual: defect(kind, &matrices),
                matrices,
                specs: specs.to_vec(),
                tangent_dim: None,
                irreducible: None,
                gauge: "x_1 = diagonal representative (g_1 = Id)".into(),
                seed: cfg.seed,
                start,
                iterations: outcome.iterations,
            });
        }
    }
    Err(Error::NoConvergence { best, iterations: total_iter })
}

fn conjugate_all(g: &[CMat], lambdas: &[CMat]) -> Option<Vec<CMat>> {
    g.iter().zip(lambdas).map(|(gk, l)| inverse(gk).map(|gi| gk * l * gi)).collect()
}

fn residual_matrix(kind: DsKind, x: &[CMat]) -> CMat {
    let n = x[0].nrows();
    match kind {
        DsKind::Additive => x.iter().skip(1).fold(x[0].clone(), |a, b| a + b),
        DsKind::Multiplicative => x.iter().skip(1).fold(x[0].clone(), |a, b| a * b) - CMat::identity(n, n),
    }
}

/// Jacobian of the column-major residual with respect to `vec(P_k)`,
/// `k = 1..m-1`, where `x_k ↦ (I + P_k) x_k (I + P_k)^{-1}`.
pub(crate) fn jacobian(kind: DsKind, x: &[CMat], first: usize) -> CMat {
    let n = x[0].nrows();
    let id = CMat::identity(n, n);
    let m = x.len();
    let mut j = CMat::zeros(n * n, (m - first) * n * n);
    for k in first..m {
        let block = match kind {
            DsKind::Additive => kron(&x[k].transpose(), &id) - kron(&id, &x[k]),
            DsKind::Multiplicative => {
                let a = x[..k].iter().fold(id.clone(), |acc, y| acc * y);
                let b = x[k + 1..].iter().fold(id.clone(), |acc, y| acc * y);
                let xb = &x[k] * &b;
                let ax = &a * &x[k];
                kron(&xb.transpose(), &a) - kron(&b.transpose(), &ax)
            }
        };
        j.columns_mut((k - first) * n * n, n * n).copy_from(&block);
    }
    j
}

struct Outcome {
    residual: f64,
    iterations: usize,
}

fn condition(g: &CMat) -> f64 {
    match inverse(g) {
        Some(gi) => frobenius(g) * frobenius(&gi),
        None => f64::INFINITY,
    }
}

/// Rescales the columns of `g` to unit length; diagonal rescalings commute
/// with `Λ` and leave `g Λ g^{-1}` unchanged.
fn normalize_columns(g: &mut CMat) {
    for mut col in g.column_iter_mut() {
        let s = col.norm();
        if s > 0.0 {
            col /= C64::new(s, 0.0);
        }
    }
}

fn levenberg_marquardt(kind: DsKind, lambdas: &[CMat], g: &mut [CMat], cfg: &SolverConfig) -> Outcome {
    let n = lambdas[0].nrows();
    let m = lambdas.len();
    let Some(mut x) = conjugate_all(g, lambdas) else { return Outcome { residual: f64::INFINITY, iterations: 0 } };
    let mut r = residual_matrix(kind, &x);
    let mut res = frobenius(&r);
    let mut mu: Option<f64> = None;
    for it in 0..cfg.max_iter {
        if res < cfg.tol {
            return Outcome { residual: res, iterations: it };
        }
        let j = jacobian(kind, &x, 1);
        let jh = j.adjoint();
        let jjh = &j * &jh;
        let scale = (0..n * n).map(|i| jjh[(i, i)].re).fold(0.0, f64::max);
        let mut lm = mu.unwrap_or(1e-3 * scale);
        let rv = DVector::from_column_slice(r.as_slice());
        let mut accepted = false;
        for _ in 0..30 {
            let mut a = jjh.clone();
            for i in 0..n * n {
                a[(i, i)] += C64::new(lm, 0.0);
            }
            let Some(y) = a.cholesky().map(|c| c.solve(&(-&rv))) else {
                lm *= 10.0;
                continue;
            };
            let delta = &jh * y;
            let step_norm = delta.norm();
            let damp = if step_norm > 0.5 { 0.5 / step_norm } else { 1.0 };
            let mut trial = g.to_vec();
            for k in 1..m {
                let p = CMat::from_column_slice(n, n, &delta.as_slice()[(k - 1) * n * n..k * n * n]) * C64::new(damp, 0.0);
                trial[k] = (CMat::identity(n, n) + p) * &trial[k];
                normalize_columns(&mut trial[k]);
            }
            if let Some(tx) = conjugate_all(&trial, lambdas) {
                let tr = residual_matrix(kind, &tx);
                let tres = frobenius(&tr);
                if tres < res {
                    g.clone_from_slice(&trial);
                    x = tx;
                    r = tr;
                    res = tres;
                    lm = (lm / 5.0).max(1e-15 * scale);
                    accepted = true;
                    break;
                }
            }
            lm *= 8.0;
        }
        mu = Some(lm);
        if !accepted || g.iter().any(|gk| condition(gk) > 1e8) {
            return Outcome { residual: res, iterations: it + 1 };
        }
    }
    Outcome { residual: res, iterations: cfg.max_iter }
}
