//! The end-to-end `n = 1` run: parameters, additive tuple, induced module,
//! KZ monodromy, both restriction maps, the Riemann-Hilbert map and the
//! conjugacy match, collected into one serializable bundle.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::algebra::{induced_rep_nu_zero, ResidualReport};
use crate::ds::{additive_class_specs, irreducibility_check, solve_additive_ds, tangent_dimension, DSSolution, SolverConfig};
use crate::error::{Error, Result};
use crate::io::ParamFile;
use crate::linalg::{frobenius, CMat};
use crate::monodromy::{default_geometry, hn_relation_check, kz_connection, monodromy_functor, MonodromyData};
use crate::params::RationalParams;
use crate::rh::{match_up_to_conjugacy, phi_degenerate, phi_nondegenerate, rh_map, ConjugacyMatch, PhiReport, RhResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Target residual of the Deligne-Simpson solver.
    pub solver: f64,
    /// Local tolerance of the transport integrator.
    pub transport: f64,
    /// Rank threshold for subspace and centralizer computations.
    pub rank: f64,
    /// Acceptance bound for the relation and product residuals.
    pub relations: f64,
    /// Acceptance bound for the conjugacy match of the two routes.
    pub diagram: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { solver: 1e-12, transport: 1e-11, rank: 1e-9, relations: 1e-8, diagram: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub seed: u64,
    pub tolerances: Tolerances,
    pub starts: usize,
    pub max_iter: usize,
    /// Punctures; `0, 1, …, m-1` when absent.
    pub alpha: Option<Vec<f64>>,
    /// Base point to the right of every puncture; `m` when absent.
    pub base: Option<f64>,
    /// Detour radius; a quarter of the minimal gap when absent.
    pub delta: Option<f64>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let s = SolverConfig::default();
        Self { seed: 0, tolerances: Tolerances::default(), starts: s.starts, max_iter: s.max_iter, alpha: None, base: None, delta: None }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Contour {
    pub alpha: Vec<f64>,
    pub base: f64,
    pub delta: Option<f64>,
    pub description: &'static str,
}

/// Everything a run produced. Stages that did not run are `None`; `failure`
/// holds the message of the stage that stopped the run.
#[derive(Debug, Clone, Serialize)]
pub struct PipelineBundle {
    pub tags: BTreeMap<&'static str, &'static str>,
    pub seed: u64,
    pub config: PipelineConfig,
    pub params: ParamFile,
    pub hbar: String,
    pub contour: Contour,
    pub ds: Option<DSSolution>,
    pub monodromy: Option<MonodromyData>,
    pub relations: Option<ResidualReport>,
    pub product_residual: Option<f64>,
    pub phi_nondegenerate: Option<PhiReport>,
    pub phi_degenerate: Option<PhiReport>,
    pub rh: Option<RhResult>,
    pub matching: Option<ConjugacyMatch>,
    pub diagram_residual: Option<f64>,
    pub failure: Option<String>,
}

impl PipelineBundle {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("bundle serializes")
    }
}

pub fn quantity_tags() -> BTreeMap<&'static str, &'static str> {
    BTreeMap::from([
        ("params", "star graph legs, gamma_{kj} and nu as exact rationals"),
        ("hbar", "hbar = sum_k delta_k . mu, exact; the additive problem needs hbar = 0"),
        ("ds", "additive tuple x_k in the classes of gamma_k with x_1 + ... + x_m = 0"),
        ("monodromy", "KZ monodromy: U_k encircles alpha_k from the base point, u_{kj} = exp(2 pi i gamma_{kj})"),
        ("relations", "defining relations of H_1(u) evaluated on the monodromy matrices"),
        ("product_residual", "|U_1 ... U_m - Id|_F"),
        ("phi_nondegenerate", "multiplicative tuple obtained from the monodromy module"),
        ("phi_degenerate", "additive tuple obtained from the B_1-module"),
        ("rh", "monodromy of dF/dz = sum_k x_k/(z - alpha_k) F for the degenerate tuple"),
        ("matching", "simultaneous conjugacy between phi_nondegenerate and rh"),
        ("diagram_residual", "sigma_min / sigma_max of the stacked intertwiner equations"),
    ])
}

/// Runs every stage for `n = 1` and returns the bundle together with the
/// first error. Certification bounds in `cfg.tolerances` turn into errors
/// after the bundle is complete.
pub fn run_pipeline(params: &RationalParams, cfg: &PipelineConfig) -> (PipelineBundle, Option<Error>) {
    let m = params.m();
    let (alpha0, base0) = default_geometry(m, 1);
    let alpha = cfg.alpha.clone().unwrap_or(alpha0);
    let base = cfg.base.unwrap_or(base0[0]);
    let mut bundle = PipelineBundle {
        tags: quantity_tags(),
        seed: cfg.seed,
        config: cfg.clone(),
        params: ParamFile::from_params(params),
        hbar: params.hbar().map(|h| crate::io::qi_to_string(&h)).unwrap_or_default(),
        contour: Contour {
            alpha: alpha.clone(),
            base,
            delta: cfg.delta,
            description: "real punctures, base point to their right, each loop runs just below the real axis from the base point and circles alpha_k counterclockwise",
        },
        ds: None,
        monodromy: None,
        relations: None,
        product_residual: None,
        phi_nondegenerate: None,
        phi_degenerate: None,
        rh: None,
        matching: None,
        diagram_residual: None,
        failure: None,
    };
    let err = stages(params, cfg, &alpha, base, &mut bundle).err();
    bundle.failure = err.as_ref().map(|e| e.to_string());
    (bundle, err)
}

fn stages(params: &RationalParams, cfg: &PipelineConfig, alpha: &[f64], base: f64, out: &mut PipelineBundle) -> Result<()> {
    let tol = cfg.tolerances;
    let solver = SolverConfig { tol: tol.solver, max_iter: cfg.max_iter, starts: cfg.starts, seed: cfg.seed, ..Default::default() };
    let mut sol = solve_additive_ds(&additive_class_specs(params, 1)?, &solver)?;
    sol.tangent_dim = Some(tangent_dimension(&sol)?.tangent_dim);
    sol.irreducible = Some(irreducibility_check(&sol.matrices, None));
    let rep = induced_rep_nu_zero(params, &[sol.matrices.clone()], tol.rank)?;
    out.ds = Some(sol);

    let conn = kz_connection(&rep, &params.gamma_c64(), params.nu_c64(), alpha, tol.transport.sqrt())?;
    let mon = monodromy_functor(&conn, alpha, &[base], cfg.delta, tol.transport)?;
    let dim = mon.matrices[0].nrows();
    let prod = (1..=params.m()).fold(CMat::identity(dim, dim), |acc, k| acc * mon.m(&format!("U{k}")));
    out.product_residual = Some(frobenius(&(prod - CMat::identity(dim, dim))));
    out.relations = Some(hn_relation_check(&mon, &params.graph)?);
    let nondeg = phi_nondegenerate(&mon, &params.graph, tol.rank)?;
    out.monodromy = Some(mon);
    out.phi_nondegenerate = Some(nondeg);

    let deg = phi_degenerate(&rep, params, tol.rank)?;
    let rh = rh_map(&deg.matrices, alpha, base, tol.transport)?;
    out.phi_degenerate = Some(deg);
    let matching = match_up_to_conjugacy(&out.phi_nondegenerate.as_ref().expect("set above").matrices, &rh.matrices, tol.diagram);
    out.rh = Some(rh);
    out.diagram_residual = Some(matching.residual);
    out.matching = Some(matching);

    let worst = out.relations.as_ref().map_or(0.0, |r| r.max).max(out.product_residual.unwrap_or(0.0));
    if worst > tol.relations {
        return Err(Error::RelationResidualTooLarge(worst));
    }
    let residual = out.diagram_residual.unwrap_or(f64::INFINITY);
    if !(residual <= tol.diagram) {
        return Err(Error::DiagramMismatch(residual));
    }
    Ok(())
}

/// Compares two JSON documents for replay: strings, integers, booleans and
/// nulls must agree exactly, floating-point numbers within `float_tol`.
/// Returns the paths of the fields that differ.
pub fn replay_differences(a: &Value, b: &Value, float_tol: f64) -> Vec<String> {
    let mut out = Vec::new();
    walk(a, b, float_tol, String::new(), &mut out);
    out
}

fn walk(a: &Value, b: &Value, tol: f64, path: String, out: &mut Vec<String>) {
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            for key in x.keys().chain(y.keys().filter(|k| !x.contains_key(*k))) {
                match (x.get(key), y.get(key)) {
                    (Some(u), Some(v)) => walk(u, v, tol, format!("{path}/{key}"), out),
                    _ => out.push(format!("{path}/{key}")),
                }
            }
        }
        (Value::Array(x), Value::Array(y)) if x.len() == y.len() => {
            for (i, (u, v)) in x.iter().zip(y).enumerate() {
                walk(u, v, tol, format!("{path}/{i}"), out);
            }
        }
        (Value::Number(x), Value::Number(y)) if x.is_f64() || y.is_f64() => {
            let (u, v) = (x.as_f64().unwrap_or(f64::NAN), y.as_f64().unwrap_or(f64::NAN));
            if !((u - v).abs() <= tol) {
                out.push(path);
            }
        }
        _ => {
            if a != b {
                out.push(path);
            }
        }
    }
}
