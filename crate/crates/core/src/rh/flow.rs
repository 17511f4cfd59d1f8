//! Isomonodromic deformation of a four-puncture Fuchsian system in the
//! cross-ratio `κ`: the tuple `x(κ)` is continued so that the conjugation
//! invariants of its monodromy stay at their initial values.
//!
//! Geometry: the punctures are `α(κ) = (0, 1, A, κ')` with `A` a large real
//! stand-in for infinity and `κ' = κA / (A - 1 + κ)`, so the cross-ratio of
//! `α(κ)` is exactly `κ`. Monodromy is taken along star loops from a fixed
//! base point below the real axis.

use std::io::Write;

use nalgebra::DVector;
use serde::Serialize;

use super::invariants::{conjugation_invariants, invariant_words, word_label};
use crate::error::{Error, Result};
use crate::linalg::{expm, frobenius, CMat};
use crate::monodromy::integrator::{integrate_adaptive_mesh, integrate_on_mesh, StepControl};
use crate::monodromy::path::{segment_distance, star_delta, star_loop, PathInConfig};
use crate::scalar::C64;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FlowConfig {
    /// Convergence threshold on the scaled residual (max norm).
    pub tol: f64,
    /// Local error tolerance of the transports.
    pub transport_tol: f64,
    /// Longest word whose trace is matched.
    pub word_len: usize,
    /// `A = surrogate_scale · max(1, max |κ|)`.
    pub surrogate_scale: f64,
    /// Gauss-Newton iterations per κ step.
    pub max_iter: usize,
    /// Bisections of a κ step before giving up.
    pub max_halvings: usize,
    /// Finite-difference step in the Lie algebra coordinates.
    pub fd_step: f64,
    /// Relative singular-value cutoff of the least-squares solve.
    pub pinv_cutoff: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            transport_tol: 1e-12,
            word_len: 4,
            surrogate_scale: 1e4,
            max_iter: 30,
            max_halvings: 6,
            fd_step: 1e-5,
            pinv_cutoff: 1e-6,
        }
    }
}

/// Cross-ratio `(p_4 - p_1)(p_2 - p_3) / ((p_4 - p_3)(p_2 - p_1))`, equal to
/// `p_4` when `p = (0, 1, ∞, p_4)`.
pub fn cross_ratio(p: &[C64]) -> C64 {
    (p[3] - p[0]) * (p[1] - p[2]) / ((p[3] - p[2]) * (p[1] - p[0]))
}

/// Puncture placement and base point shared by every sample of a flow.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FlowGeometry {
    pub surrogate: f64,
    pub base: C64,
}

impl FlowGeometry {
    /// Geometry adapted to a κ path: `A = scale · span` and base point
    /// `1/2 - 2i · span` with `span = max(1, max |κ|)`.
    pub fn for_path(path: &[C64], scale: f64) -> Self {
        let span = path.iter().map(|k| k.norm()).fold(1.0, f64::max);
        Self { surrogate: scale * span, base: C64::new(0.5, -2.0 * span) }
    }

    pub fn punctures(&self, kappa: C64) -> Vec<C64> {
        let a = C64::new(self.surrogate, 0.0);
        vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0), a, kappa * a / (a - 1.0 + kappa)]
    }
}

fn loop_system(punctures: &[C64], base: C64) -> Result<Vec<PathInConfig>> {
    let delta = star_delta(punctures, base);
    (1..=punctures.len()).map(|k| star_loop(punctures, base, k, delta)).collect()
}

/// Recorded step sizes for every segment of every loop.
type Meshes = Vec<Vec<Vec<f64>>>;

fn coefficient<'a>(x: &'a [CMat], punctures: &'a [C64], path: &'a PathInConfig, seg: usize) -> impl Fn(f64) -> CMat + 'a {
    move |s| {
        let (z, v) = path.segments[seg].eval(s);
        let mut out = CMat::zeros(x[0].nrows(), x[0].ncols());
        for (xk, &a) in x.iter().zip(punctures) {
            out += xk * (v[0] / (z[0] - a));
        }
        out
    }
}

fn monodromy_adaptive(x: &[CMat], punctures: &[C64], loops: &[PathInConfig], tol: f64) -> Result<(Vec<CMat>, Meshes)> {
    let n = x[0].nrows();
    let ctl = StepControl::with_tol(tol);
    let mut mats = Vec::with_capacity(loops.len());
    let mut meshes = Vec::with_capacity(loops.len());
    for path in loops {
        let mut total = CMat::identity(n, n);
        let mut per_seg = Vec::with_capacity(path.segments.len());
        for seg in 0..path.segments.len() {
            let (p, _, mesh) = integrate_adaptive_mesh(coefficient(x, punctures, path, seg), &CMat::identity(n, n), &ctl)?;
            total = p * total;
            per_seg.push(mesh);
        }
        mats.push(total);
        meshes.push(per_seg);
    }
    Ok((mats, meshes))
}

fn monodromy_on_mesh(x: &[CMat], punctures: &[C64], loops: &[PathInConfig], meshes: &Meshes) -> Vec<CMat> {
    let n = x[0].nrows();
    loops
        .iter()
        .zip(meshes)
        .map(|(path, per_seg)| {
            per_seg.iter().enumerate().fold(CMat::identity(n, n), |total, (seg, mesh)| {
                integrate_on_mesh(coefficient(x, punctures, path, seg), &CMat::identity(n, n), mesh) * total
            })
        })
        .collect()
}

/// Monodromy of `dF/dz = Σ_k x_k/(z - α_k) F` along the star loops of the
/// flow geometry at `κ`.
pub fn flow_monodromy(x: &[CMat], kappa: C64, geom: &FlowGeometry, tol: f64) -> Result<Vec<CMat>> {
    let punctures = geom.punctures(kappa);
    let loops = loop_system(&punctures, geom.base)?;
    Ok(monodromy_adaptive(x, &punctures, &loops, tol)?.0)
}

/// Conjugation invariants of [`flow_monodromy`].
pub fn flow_invariants(x: &[CMat], kappa: C64, geom: &FlowGeometry, cfg: &FlowConfig) -> Result<Vec<C64>> {
    Ok(conjugation_invariants(&flow_monodromy(x, kappa, geom, cfg.transport_tol)?, cfg.word_len))
}

fn scale_of(target: &[C64]) -> f64 {
    target.iter().map(|z| z.norm()).fold(1.0, f64::max)
}

/// Relative deviation `max |inv - target| / max(1, max |target|)`.
pub fn invariant_drift(inv: &[C64], target: &[C64]) -> f64 {
    inv.iter().zip(target).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale_of(target)
}

fn sum(x: &[CMat]) -> CMat {
    x.iter().skip(1).fold(x[0].clone(), |a, b| a + b)
}

/// Residual vector `[(inv - target)/scale; vec(Σ x_k)/xscale]`.
fn residual(mono: &[CMat], x: &[CMat], target: &[C64], word_len: usize, xscale: f64) -> DVector<C64> {
    let scale = scale_of(target);
    let inv = conjugation_invariants(mono, word_len);
    let s = sum(x);
    let mut out: Vec<C64> = inv.iter().zip(target).map(|(a, b)| (a - b) / scale).collect();
    out.extend(s.iter().map(|z| z / xscale));
    DVector::from_vec(out)
}

fn max_norm(r: &DVector<C64>) -> f64 {
    r.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `x_k ↦ e^{P_k} x_k e^{-P_k}` for `k ≥ 2`; `x_1` stays fixed as a gauge.
fn apply(x: &[CMat], p: &DVector<C64>) -> Vec<CMat> {
    let n = x[0].nrows();
    let mut out = vec![x[0].clone()];
    for (k, xk) in x.iter().enumerate().skip(1) {
        let off = (k - 1) * n * n;
        let pk = CMat::from_fn(n, n, |i, j| p[off + j * n + i]);
        out.push(expm(&pk) * xk * expm(&(-pk)));
    }
    out
}

struct StepOutcome {
    x: Vec<CMat>,
    residual: f64,
    iterations: usize,
}

/// Gauss-Newton on the class-preserving conjugations of `x_2, …, x_m` for
/// the invariants at fixed punctures. The Jacobian is a central difference on
/// a frozen integration mesh and is refreshed when the contraction is poor.
fn solve_at(x0: &[CMat], punctures: &[C64], base: C64, target: &[C64], cfg: &FlowConfig) -> Result<StepOutcome> {
    let n = x0[0].nrows();
    let nparam = (x0.len() - 1) * n * n;
    let xscale = x0.iter().map(frobenius).fold(1.0, f64::max);
    let loops = loop_system(punctures, base)?;
    let mut x = x0.to_vec();
    let mut meshes: Option<Meshes> = None;
    let mut jac: Option<nalgebra::SVD<C64, nalgebra::Dyn, nalgebra::Dyn>> = None;
    let mut r = DVector::zeros(0);
    let mut fresh = false;
    for it in 0..=cfg.max_iter {
        if meshes.is_none() {
            let (mono, m) = monodromy_adaptive(&x, punctures, &loops, cfg.transport_tol)?;
            r = residual(&mono, &x, target, cfg.word_len, xscale);
            meshes = Some(m);
            jac = None;
        }
        if max_norm(&r) <= cfg.tol {
            return Ok(StepOutcome { x, residual: max_norm(&r), iterations: it });
        }
        if it == cfg.max_iter {
            break;
        }
        let mesh = meshes.as_ref().unwrap();
        let eval = |p: &DVector<C64>| {
            let xp = apply(&x, p);
            residual(&monodromy_on_mesh(&xp, punctures, &loops, mesh), &xp, target, cfg.word_len, xscale)
        };
        if jac.is_none() {
            let mut j = CMat::zeros(r.len(), nparam);
            for c in 0..nparam {
                let mut p = DVector::zeros(nparam);
                p[c] = C64::new(cfg.fd_step, 0.0);
                let plus = eval(&p);
                p[c] = C64::new(-cfg.fd_step, 0.0);
                let minus = eval(&p);
                j.set_column(c, &((plus - minus) / C64::new(2.0 * cfg.fd_step, 0.0)));
            }
            jac = Some(j.svd(true, true));
            fresh = true;
        }
        let svd = jac.as_ref().unwrap();
        let smax = svd.singular_values.max();
        let step = svd.solve(&(-&r), cfg.pinv_cutoff * smax).map_err(|e| Error::Parse(e.to_string()))?;
        let r_norm = r.norm();
        let mut accepted = None;
        let mut t = 1.0;
        for _ in 0..8 {
            let trial = &step * C64::new(t, 0.0);
            let r_new = eval(&trial);
            if r_new.norm() < r_norm {
                accepted = Some((trial, r_new));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((p, r_new)) => {
                let ratio = r_new.norm() / r_norm;
                x = apply(&x, &p);
                r = r_new;
                if ratio > 0.25 {
                    jac = None;
                }
                fresh = false;
            }
            None if fresh => break,
            None => jac = None,
        }
    }
    Err(Error::NoConvergence { best: max_norm(&r), iterations: cfg.max_iter })
}

/// Whether moving the fourth puncture from `from` to `to` keeps the star
/// loop system in one homotopy class: no other puncture is swept by its ray
/// and it crosses no other ray.
fn check_sweep(geom: &FlowGeometry, from: C64, to: C64) -> Result<()> {
    let pa = geom.punctures(from);
    let pb = geom.punctures(to);
    let (a, b, base) = (pa[3], pb[3], geom.base);
    let cross = |u: C64, v: C64| u.re * v.im - u.im * v.re;
    let in_triangle = |p: C64| {
        let d1 = cross(a - base, p - base);
        let d2 = cross(b - a, p - a);
        let d3 = cross(base - b, p - b);
        (d1 >= 0.0 && d2 >= 0.0 && d3 >= 0.0) || (d1 <= 0.0 && d2 <= 0.0 && d3 <= 0.0)
    };
    let segments_meet = |p1: C64, p2: C64, q1: C64, q2: C64| {
        let o1 = cross(p2 - p1, q1 - p1);
        let o2 = cross(p2 - p1, q2 - p1);
        let o3 = cross(q2 - q1, p1 - q1);
        let o4 = cross(q2 - q1, p2 - q1);
        o1 * o2 < 0.0 && o3 * o4 < 0.0
    };
    for (j, &o) in pa.iter().take(3).enumerate() {
        if in_triangle(o) || segments_meet(a, b, base, o) || segment_distance(o, a, b) == 0.0 {
            return Err(Error::PathTooCoarse(format!(
                "moving κ from {from} to {to} changes the loop system around puncture {}",
                j + 1
            )));
        }
    }
    Ok(())
}

/// Samples of an isomonodromic trajectory.
#[derive(Debug, Clone)]
pub struct FlowTrajectory {
    pub kappa: Vec<C64>,
    pub punctures: Vec<Vec<C64>>,
    pub states: Vec<Vec<CMat>>,
    pub invariants: Vec<Vec<C64>>,
    pub target: Vec<C64>,
    /// Scaled Gauss-Newton residual at each sample.
    pub residual: Vec<f64>,
    /// [`invariant_drift`] of each sample, from a fresh adaptive evaluation.
    pub drift: Vec<f64>,
    pub iterations: Vec<usize>,
    /// Number of κ sub-steps used to reach each sample.
    pub substeps: Vec<usize>,
    pub word_len: usize,
    pub geometry: FlowGeometry,
    /// Invariant change at `κ_0` when the surrogate `A` is doubled.
    pub surrogate_error: f64,
    pub config: FlowConfig,
}

impl FlowTrajectory {
    pub fn max_drift(&self) -> f64 {
        self.drift.iter().copied().fold(0.0, f64::max)
    }

    pub fn words(&self) -> Vec<String> {
        let m = self.states.first().map_or(0, |s| s.len());
        invariant_words(m, self.word_len).iter().map(|w| word_label(w)).collect()
    }

    /// One row per sample: `kappa_re, kappa_im, residual, drift`, then the
    /// real and imaginary parts of every invariant.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["kappa_re".to_string(), "kappa_im".into(), "residual".into(), "drift".into()];
        for word in self.words() {
            header.push(format!("tr_{word}_re"));
            header.push(format!("tr_{word}_im"));
        }
        w.write_record(&header).map_err(csv_error)?;
        for i in 0..self.kappa.len() {
            let mut row = vec![
                self.kappa[i].re.to_string(),
                self.kappa[i].im.to_string(),
                self.residual[i].to_string(),
                self.drift[i].to_string(),
            ];
            for z in &self.invariants[i] {
                row.push(z.re.to_string());
                row.push(z.im.to_string());
            }
            w.write_record(&row).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows = |x: &[CMat]| x.iter().map(crate::io::to_rows).collect::<Vec<_>>();
        serde_json::json!({
            "kappa": self.kappa,
            "punctures": self.punctures,
            "residual": self.residual,
            "drift": self.drift,
            "max_drift": self.max_drift(),
            "iterations": self.iterations,
            "substeps": self.substeps,
            "word_len": self.word_len,
            "geometry": self.geometry,
            "surrogate_error": self.surrogate_error,
            "config": self.config,
            "initial": rows(&self.states[0]),
            "final": rows(self.states.last().unwrap()),
        })
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// [`painleve_flow`] that keeps the samples reached before a failure.
pub fn painleve_flow_partial(x0: &[CMat], path: &[C64], cfg: &FlowConfig) -> Result<(FlowTrajectory, Option<Error>)> {
    if x0.len() != 4 {
        return Err(Error::NotD4);
    }
    if path.is_empty() {
        return Err(Error::Parse("empty κ path".into()));
    }
    for &k in path {
        if k.norm() < 1e-6 || (k - 1.0).norm() < 1e-6 || !k.re.is_finite() || !k.im.is_finite() {
            return Err(Error::PathTooCoarse(format!("κ = {k} is too close to 0, 1 or ∞")));
        }
    }
    let s = frobenius(&sum(x0));
    if s > 1e-8 * x0.iter().map(frobenius).fold(1.0, f64::max) {
        return Err(Error::SumNotZero(s));
    }
    let geom = FlowGeometry::for_path(path, cfg.surrogate_scale);
    let target = flow_invariants(x0, path[0], &geom, cfg)?;
    let doubled = FlowGeometry { surrogate: 2.0 * geom.surrogate, ..geom };
    let surrogate_error = invariant_drift(&flow_invariants(x0, path[0], &doubled, cfg)?, &target);
    let mut traj = FlowTrajectory {
        kappa: vec![path[0]],
        punctures: vec![geom.punctures(path[0])],
        states: vec![x0.to_vec()],
        invariants: vec![target.clone()],
        target: target.clone(),
        residual: vec![0.0],
        drift: vec![0.0],
        iterations: vec![0],
        substeps: vec![0],
        word_len: cfg.word_len,
        geometry: geom,
        surrogate_error,
        config: *cfg,
    };
    for (i, w) in path.windows(2).enumerate() {
        let x = traj.states.last().unwrap().clone();
        let mut stats = (0, 0, 0.0);
        match advance(&x, w[0], w[1], &geom, &target, cfg, 0, &mut stats) {
            Ok(xn) => {
                let inv = flow_invariants(&xn, w[1], &geom, cfg)?;
                traj.drift.push(invariant_drift(&inv, &target));
                traj.invariants.push(inv);
                traj.kappa.push(w[1]);
                traj.punctures.push(geom.punctures(w[1]));
                traj.states.push(xn);
                traj.residual.push(stats.2);
                traj.iterations.push(stats.0);
                traj.substeps.push(stats.1);
            }
            Err(Error::NoConvergence { .. }) => {
                let e = Error::ContinuationStall { step: i + 1, kappa: format!("{}", w[1]) };
                return Ok((traj, Some(e)));
            }
            Err(e) => return Ok((traj, Some(e))),
        }
    }
    Ok((traj, None))
}

/// Moves from `from` to `to`, bisecting on failure. `stats` accumulates
/// (iterations, sub-steps, last residual).
#[allow(clippy::too_many_arguments)]
fn advance(
    x: &[CMat],
    from: C64,
    to: C64,
    geom: &FlowGeometry,
    target: &[C64],
    cfg: &FlowConfig,
    depth: usize,
    stats: &mut (usize, usize, f64),
) -> Result<Vec<CMat>> {
    check_sweep(geom, from, to)?;
    match solve_at(x, &geom.punctures(to), geom.base, target, cfg) {
        Ok(out) => {
            stats.0 += out.iterations;
            stats.1 += 1;
            stats.2 = out.residual;
            Ok(out.x)
        }
        Err(Error::NoConvergence { .. }) if depth < cfg.max_halvings => {
            let mid = (from + to) / 2.0;
            let xm = advance(x, from, mid, geom, target, cfg, depth + 1, stats)?;
            advance(&xm, mid, to, geom, target, cfg, depth + 1, stats)
        }
        Err(e) => Err(e),
    }
}

/// Continues `x0` (a solution of the additive problem for four punctures)
/// along the κ samples in `path` with the invariants held at their values at
/// `path[0]`.
pub fn painleve_flow(x0: &[CMat], path: &[C64], cfg: &FlowConfig) -> Result<FlowTrajectory> {
    match painleve_flow_partial(x0, path, cfg)? {
        (traj, None) => Ok(traj),
        (_, Some(e)) => Err(e),
    }
}

/// `κ(θ) = center + radius · e^{iθ}` for `θ` from `θ_0` to `θ_1` in `steps`
/// equal steps.
pub fn arc_path(center: C64, radius: f64, theta0: f64, theta1: f64, steps: usize) -> Vec<C64> {
    (0..=steps)
        .map(|i| center + C64::from_polar(radius, theta0 + (theta1 - theta0) * i as f64 / steps as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_realizes_the_cross_ratio() {
        let geom = FlowGeometry::for_path(&[C64::new(2.0, 0.5)], 1e4);
        for k in [C64::new(2.0, 0.5), C64::new(-0.3, 1.2), C64::new(0.4, -0.1)] {
            assert!((cross_ratio(&geom.punctures(k)) - k).norm() < 1e-12);
        }
    }

    #[test]
    fn sweep_across_a_ray_is_rejected() {
        let geom = FlowGeometry::for_path(&[C64::new(2.0, 0.0)], 1e4);
        assert!(check_sweep(&geom, C64::new(2.0, 0.5), C64::new(1.5, 0.5)).is_ok());
        assert!(check_sweep(&geom, C64::new(0.5, -0.5), C64::new(1.5, -0.5)).is_err());
    }
}
