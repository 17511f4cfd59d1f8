use std::fs::File;
use std::path::{Path, PathBuf};

use anyhow::Context;
use gdaha::algebra::cyclotomic::isotypic_spectrum_exact;
use gdaha::algebra::presentation::bn_presentation;
use gdaha::algebra::regular::associativity_failures;
use gdaha::algebra::{degenerate_regular_rep, induced_rep_nu_zero, MatrixRep};
use gdaha::ds::{
    additive_class_specs, continue_bn_representation, irreducibility_check, multiplicative_class_specs, solve_additive_ds,
    solve_multiplicative_ds, tangent_dimension, SolverConfig,
};
use gdaha::io::{exact_rep_to_json, exact_to_rows, from_rows, qi_to_string, rep_from_json, rep_to_json, ExactEntry, ParamFile, RowMajor};
use gdaha::linalg::{eigenvalues, CMat};
use gdaha::monodromy::{default_geometry, hn_relation_check, kz_connection, monodromy_functor};
use gdaha::params::{exponentiate_params, RationalParams};
use gdaha::pipeline::{quantity_tags, run_pipeline, PipelineConfig};
use gdaha::rh::{arc_path, diagram_check, painleve_flow_partial, rh_map, FlowConfig};
use gdaha::spectrum::spectrum_match;
use gdaha::{Error, Field, Qi, C64};
use serde_json::{json, Value};

use crate::args::{Cli, Command, Common, Contour, Kind};
use crate::output::{payload, read_json, tags, write_json, Envelope};

pub fn run(cli: &Cli) -> anyhow::Result<()> {
    let c = &cli.common;
    match &cli.command {
        Command::Params { params } => cmd_params(c, params),
        Command::Algebra { n, lambda, nu, matrices } => cmd_algebra(c, *n, lambda, nu, *matrices),
        Command::SolveDs { params, n, kind, max_iter, starts } => cmd_solve_ds(c, params, *n, *kind, *max_iter, *starts),
        Command::Monodromy { params, ds, rep, contour } => cmd_monodromy(c, params, ds, rep.as_deref(), contour),
        Command::Rh { ds, contour } => cmd_rh(c, ds, contour),
        Command::Diagram { params, ds, contour } => cmd_diagram(c, params, ds, contour),
        Command::Flow { ds, kappa, arc, flow_tol, flow_max_iter, word_len } => {
            let cfg = FlowConfig { tol: *flow_tol, max_iter: *flow_max_iter, word_len: *word_len, ..Default::default() };
            cmd_flow(c, ds, kappa, arc.as_deref(), cfg)
        }
        Command::ContinueRep { params, ds, steps } => cmd_continue_rep(c, params, ds, *steps),
        Command::Pipeline { params, contour, max_iter, starts } => cmd_pipeline(c, params, contour, *max_iter, *starts),
    }
}

fn envelope<'a, T: serde::Serialize>(
    c: &Common,
    command: &'a str,
    tag_pairs: &[(&'static str, &'static str)],
    contour: Option<Value>,
    result: T,
) -> anyhow::Result<Envelope<'a, T>> {
    Ok(Envelope { command, seed: c.seed, tolerances: c.tolerances()?, tags: tags(tag_pairs), contour, result })
}

fn load_params(path: &Path) -> anyhow::Result<RationalParams> {
    ParamFile::read(path).with_context(|| format!("parameter file {}", path.display()))
}

fn exact(s: &str) -> anyhow::Result<Qi> {
    Ok(ExactEntry::Text(s.to_string()).to_qi()?)
}

fn c64_pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn read_tuple(path: &Path) -> anyhow::Result<Vec<CMat>> {
    let doc = read_json(path)?;
    let body = payload(&doc);
    let mats = ["solution", "ds"]
        .iter()
        .find_map(|k| body.get(*k).and_then(|s| s.get("matrices")))
        .or_else(|| body.get("matrices"))
        .cloned()
        .ok_or_else(|| Error::Parse(format!("{} has no matrices", path.display())))?;
    let rows: Vec<RowMajor> = serde_json::from_value(mats).map_err(Error::from)?;
    Ok(rows.iter().map(|r| from_rows(r).map_err(Error::Parse)).collect::<Result<_, _>>()?)
}

fn contour_json(alpha: &[f64], base: &[f64], delta: Option<f64>) -> Value {
    json!({
        "alpha": alpha,
        "base": base,
        "delta": delta,
        "description": "real punctures, base points to their right, each loop runs just below the real axis from the base point and circles alpha_k counterclockwise",
    })
}

fn geometry(contour: &Contour, m: usize, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (alpha, base) = default_geometry(m, n);
    (contour.alpha.clone().unwrap_or(alpha), contour.base.clone().unwrap_or(base))
}

fn report(path: &Path) {
    println!("wrote {}", path.display());
}

fn cmd_params(c: &Common, path: &Path) -> anyhow::Result<()> {
    let p = load_params(path)?;
    let mp = exponentiate_params(&p);
    let hbar = p.hbar().ok();
    let mut warnings = Vec::new();
    match &hbar {
        Some(h) if !h.negligible(0.0) => {
            warnings.push(format!("{}: the additive Deligne-Simpson problem has a trace obstruction", Error::NonZeroHbar(h.to_c64().re)))
        }
        None => warnings.push("graph is not affine: hbar and q are undefined".to_string()),
        _ => {}
    }
    let exact_rows = |rows: &[Vec<Qi>]| rows.iter().map(|r| r.iter().map(qi_to_string).collect::<Vec<_>>()).collect::<Vec<_>>();
    let result = json!({
        "graph": p.graph.name(),
        "legs": p.graph.legs(),
        "affine": p.graph.is_affine(),
        "gamma": exact_rows(&p.gamma),
        "nu": qi_to_string(&p.nu),
        "mu_node": qi_to_string(&p.mu_node),
        "mu_legs": exact_rows(&p.mu_legs),
        "xi": p.xi.iter().map(qi_to_string).collect::<Vec<_>>(),
        "hbar": hbar.as_ref().map(qi_to_string),
        "u": mp.u.iter().map(|r| r.iter().map(|&z| c64_pair(z)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "t": c64_pair(mp.t),
        "q": c64_pair(mp.q),
        "warnings": warnings,
    });
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let env = envelope(
        c,
        "params",
        &[
            ("mu_node", "mu at the central vertex, the sum of gamma_{k1}"),
            ("mu_legs", "mu along leg k: gamma_{k,j+1} - gamma_{kj}"),
            ("xi", "xi_k = gamma_{k1} - mu_node/m, summing to zero"),
            ("hbar", "hbar = ell sum_{k,j} gamma_{kj}/d_k"),
            ("u", "u_{kj} = exp(2 pi i gamma_{kj})"),
            ("t", "t = exp(-pi i nu)"),
            ("q", "q = exp(-2 pi i hbar)"),
        ],
        None,
        result,
    )?;
    report(&write_json(&c.out, "params.json", &env)?);
    Ok(())
}

fn cmd_algebra(c: &Common, n: usize, lambda: &[String], nu: &str, with_matrices: bool) -> anyhow::Result<()> {
    let lambda: Vec<Qi> = lambda.iter().map(|s| exact(s)).collect::<anyhow::Result<_>>()?;
    let nu = exact(nu)?;
    let rep = degenerate_regular_rep(n, &lambda, &nu)?;
    let residuals = rep.relation_residuals();
    let assoc = associativity_failures(n, &lambda, &nu);
    let iso = isotypic_spectrum_exact(n, &lambda, &nu)?;
    let result = json!({
        "n": n,
        "lambda": lambda.iter().map(qi_to_string).collect::<Vec<_>>(),
        "nu": qi_to_string(&nu),
        "dim": rep.dim(),
        "relations_exactly_zero": residuals.exact_zero,
        "associativity_failures": assoc,
        "isotypic": {
            "v_prime_dim": iso.v_prime_dim,
            "restricted_x": exact_to_rows(&iso.restricted_x),
            "expected_spectrum": iso.expected.iter().map(|(e, k)| (qi_to_string(e), *k)).collect::<Vec<_>>(),
            "certified": iso.certified,
        },
        "matrices": with_matrices.then(|| exact_rep_to_json(rep.labels(), rep.mats())),
    });
    let env = envelope(
        c,
        "algebra",
        &[
            ("dim", "dimension of the regular representation, n! ell^n"),
            ("isotypic", "x restricted to the trivial isotypic subspace of the cyclotomic subalgebra, with its exact spectrum"),
        ],
        None,
        result,
    )?;
    report(&write_json(&c.out, "algebra.json", &env)?);
    if residuals.exact_zero != Some(true) || assoc != 0 {
        return Err(Error::RelationResidualTooLarge(residuals.max).into());
    }
    if !iso.certified || iso.v_prime_dim != n * lambda.len() {
        return Err(Error::SpecMismatch("restricted spectrum differs from the prediction".into()).into());
    }
    Ok(())
}

fn cmd_solve_ds(c: &Common, path: &Path, n: usize, kind: Kind, max_iter: usize, starts: usize) -> anyhow::Result<()> {
    let p = load_params(path)?;
    let tol = c.tolerances()?;
    let cfg = SolverConfig { tol: tol.solver, max_iter, starts, seed: c.seed, ..Default::default() };
    let mut sol = match kind {
        Kind::Additive => solve_additive_ds(&additive_class_specs(&p, n)?, &cfg)?,
        Kind::Multiplicative => solve_multiplicative_ds(&multiplicative_class_specs(&exponentiate_params(&p), n, tol.solver)?, &cfg)?,
    };
    sol.tangent_dim = Some(tangent_dimension(&sol)?.tangent_dim);
    sol.irreducible = Some(irreducibility_check(&sol.matrices, None));
    let spectra = sol.matrices.iter().zip(&sol.specs).map(|(x, s)| spectrum_match(x, s, tol.relations)).collect::<Result<Vec<_>, _>>()?;

    let env = envelope(
        c,
        "solve-ds",
        &[
            ("matrices", "tuple x_k (additive, sum zero) or X_k (multiplicative, product identity)"),
            ("specs", "prescribed eigenvalues with multiplicities, one class per leg"),
            ("residual", "Frobenius norm of the sum or of product minus identity"),
            ("tangent_dim", "dimension of the tangent space to the moduli space at the solution"),
        ],
        None,
        json!({ "solution": &sol, "spectra": &spectra }),
    )?;
    report(&write_json(&c.out, "ds.json", &env)?);

    let csv_path = c.out.join("ds_spectra.csv");
    let mut w = csv::Writer::from_path(&csv_path).map_err(|e| Error::Parse(e.to_string()))?;
    w.write_record(["matrix", "eigenvalue_re", "eigenvalue_im"]).map_err(|e| Error::Parse(e.to_string()))?;
    for (k, x) in sol.matrices.iter().enumerate() {
        for e in eigenvalues(x) {
            w.write_record([(k + 1).to_string(), e.re.to_string(), e.im.to_string()]).map_err(|e| Error::Parse(e.to_string()))?;
        }
    }
    w.flush()?;
    report(&csv_path);
    println!("residual {:.3e}, tangent dimension {}, irreducible {}", sol.residual, sol.tangent_dim.unwrap_or(0), sol.irreducible == Some(true));

    if let Some(bad) = spectra.iter().find(|s| !s.matches) {
        return Err(Error::SpecMismatch(format!("spectrum deviation {:e}", bad.deviation)).into());
    }
    Ok(())
}

fn load_module(c: &Common, p: &RationalParams, ds: &[PathBuf], rep: Option<&Path>) -> anyhow::Result<MatrixRep<C64>> {
    if let Some(path) = rep {
        let doc = read_json(path)?;
        let body = payload(&doc);
        let n = body.get("n").and_then(Value::as_u64).ok_or_else(|| Error::Parse("module file lacks n".into()))? as usize;
        let pres = bn_presentation(p, n).map_coeffs(|z| z.to_c64());
        let gens = body.get("generators").ok_or_else(|| Error::Parse("module file lacks generators".into()))?;
        let mats = rep_from_json(&pres.labels, gens)?;
        return Ok(MatrixRep::new(pres, mats)?);
    }
    if ds.is_empty() {
        return Err(Error::Parse("give --ds (one per point) or --rep".into()).into());
    }
    let tuples = ds.iter().map(|d| read_tuple(d)).collect::<anyhow::Result<Vec<_>>>()?;
    Ok(induced_rep_nu_zero(p, &tuples, c.tol_rank)?)
}

fn cmd_monodromy(c: &Common, path: &Path, ds: &[PathBuf], rep: Option<&Path>, contour: &Contour) -> anyhow::Result<()> {
    let p = load_params(path)?;
    let tol = c.tolerances()?;
    let module = load_module(c, &p, ds, rep)?;
    let n = module.labels().iter().filter(|l| l.starts_with('Y') && l.ends_with(",1")).count();
    let (alpha, base) = geometry(contour, p.m(), n);
    let conn = kz_connection(&module, &p.gamma_c64(), p.nu_c64(), &alpha, tol.transport.sqrt())?;
    let mon = monodromy_functor(&conn, &alpha, &base, contour.delta, tol.transport)?;
    let relations = hn_relation_check(&mon, &p.graph)?;
    let env = envelope(
        c,
        "monodromy",
        &[
            ("monodromy", "U_k: loop around alpha_k from the first base point; T_i: half-turn exchange of base points i, i+1"),
            ("relations", "defining relations of H_n(u, t) evaluated on the monodromy matrices"),
        ],
        Some(contour_json(&alpha, &base, Some(mon.delta))),
        json!({ "monodromy": &mon, "relations": &relations }),
    )?;
    report(&write_json(&c.out, "monodromy.json", &env)?);
    println!("relation residual {:.3e}, transport error {:.3e}", relations.max, mon.transport_error);
    if relations.max > tol.relations {
        return Err(Error::RelationResidualTooLarge(relations.max).into());
    }
    Ok(())
}

fn single_base(contour: &Contour, m: usize) -> anyhow::Result<(Vec<f64>, f64)> {
    let (alpha, base) = geometry(contour, m, 1);
    let b = *base.last().ok_or_else(|| Error::ShapeMismatch("no base point".into()))?;
    Ok((alpha, b))
}

fn cmd_rh(c: &Common, ds: &Path, contour: &Contour) -> anyhow::Result<()> {
    let tol = c.tolerances()?;
    let x = read_tuple(ds)?;
    let (alpha, b) = single_base(contour, x.len())?;
    let r = rh_map(&x, &alpha, b, tol.transport)?;
    let env = envelope(
        c,
        "rh",
        &[
            ("matrices", "monodromy X_k of dF/dz = sum_k x_k/(z - alpha_k) F around alpha_k"),
            ("product_residual", "|X_1 ... X_m - Id|_F"),
            ("spectra", "spectrum of X_k against exp(2 pi i spec x_k)"),
        ],
        Some(contour_json(&alpha, &[b], Some(r.delta))),
        &r,
    )?;
    report(&write_json(&c.out, "rh.json", &env)?);
    println!("product residual {:.3e}, spectral deviation {:.3e}", r.product_residual, r.max_spectral_deviation());
    if r.product_residual > tol.relations || r.max_spectral_deviation() > tol.relations {
        return Err(Error::SpecMismatch(format!(
            "product residual {:e}, spectral deviation {:e}",
            r.product_residual,
            r.max_spectral_deviation()
        ))
        .into());
    }
    Ok(())
}

fn cmd_diagram(c: &Common, path: &Path, ds: &Path, contour: &Contour) -> anyhow::Result<()> {
    let p = load_params(path)?;
    let tol = c.tolerances()?;
    let module = induced_rep_nu_zero(&p, &[read_tuple(ds)?], tol.rank)?;
    let (alpha, base) = geometry(contour, p.m(), 1);
    let d = diagram_check(&module, &p, &alpha, &base, tol.transport)?;
    let env = envelope(
        c,
        "diagram",
        &[
            ("via_monodromy", "monodromy of the module, then restriction to the isotypic subspace"),
            ("via_rh", "restriction to the isotypic subspace, then the Riemann-Hilbert map"),
            ("matching", "simultaneous conjugacy between the two tuples: sigma_min / sigma_max"),
        ],
        Some(contour_json(&alpha, &base, None)),
        &d,
    )?;
    report(&write_json(&c.out, "diagram.json", &env)?);
    println!("diagram residual {:.3e}", d.residual());
    if !(d.residual() <= tol.diagram) {
        return Err(Error::DiagramMismatch(d.residual()).into());
    }
    Ok(())
}

fn cmd_flow(c: &Common, ds: &Path, kappa: &[C64], arc: Option<&[f64]>, cfg: FlowConfig) -> anyhow::Result<()> {
    let x = read_tuple(ds)?;
    let path: Vec<C64> = match arc {
        Some(&[cre, cim, radius, t0, t1, steps]) => {
            if steps < 1.0 || steps.fract() != 0.0 {
                return Err(Error::Parse(format!("arc step count must be a positive integer, got {steps}")).into());
            }
            arc_path(C64::new(cre, cim), radius, t0, t1, steps as usize)
        }
        Some(v) => return Err(Error::Parse(format!("--arc takes six values, got {}", v.len())).into()),
        None => kappa.to_vec(),
    };
    if path.is_empty() {
        return Err(Error::Parse("give --kappa or --arc".into()).into());
    }
    let (traj, err) = painleve_flow_partial(&x, &path, &cfg)?;
    let csv_path = c.out.join("flow.csv");
    std::fs::create_dir_all(&c.out)?;
    traj.write_csv(File::create(&csv_path).map_err(Error::from)?)?;
    report(&csv_path);
    let summary = json!({
        "requested_points": path.len(),
        "completed_points": traj.kappa.len(),
        "max_drift": traj.max_drift(),
        "surrogate_error": traj.surrogate_error,
        "failure": err.as_ref().map(|e| e.to_string()),
    });
    let env = envelope(
        c,
        "flow",
        &[
            ("kappa", "cross-ratio of the four punctures at each sample"),
            ("states", "tuple x_k(kappa) with constant conjugation invariants of its monodromy"),
            ("invariants", "traces of words in the monodromy matrices up to the configured length"),
            ("drift", "max |invariants - initial invariants| / max(1, max |initial invariants|)"),
            ("geometry", "punctures 0, 1, A, kappa A/(A - 1 + kappa) with a far base point"),
        ],
        Some(json!({ "geometry": &traj.geometry, "path": path.iter().map(|&z| c64_pair(z)).collect::<Vec<_>>() })),
        json!({ "summary": summary, "trajectory": traj.to_json() }),
    )?;
    report(&write_json(&c.out, "flow.json", &env)?);
    println!("{} of {} points, max drift {:.3e}", traj.kappa.len(), path.len(), traj.max_drift());
    match err {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn cmd_continue_rep(c: &Common, path: &Path, ds: &[PathBuf], steps: usize) -> anyhow::Result<()> {
    let target = load_params(path)?;
    let mut start = target.clone();
    start.nu = Qi::from_i64(0);
    let tuples = ds.iter().map(|d| read_tuple(d)).collect::<anyhow::Result<Vec<_>>>()?;
    let seed = induced_rep_nu_zero(&start, &tuples, c.tol_rank)?;
    let (rep, rep_report) = continue_bn_representation(&target, &seed, steps, c.tol_solver.max(1e-11))?;
    let env = envelope(
        c,
        "continue-rep",
        &[
            ("generators", "B_n-module at the target nu: S_n generators s_ij and Y_{i,k}"),
            ("report", "fraction of the nu-path reached, steps and the final relation residual"),
        ],
        None,
        json!({
            "n": ds.len(),
            "nu": qi_to_string(&target.nu),
            "generators": rep_to_json(rep.labels(), rep.mats()),
            "report": &rep_report,
        }),
    )?;
    report(&write_json(&c.out, "rep.json", &env)?);
    println!("relation residual {:.3e}", rep_report.residual);
    if rep_report.residual > c.tol_relations {
        return Err(Error::RelationResidualTooLarge(rep_report.residual).into());
    }
    Ok(())
}

fn cmd_pipeline(c: &Common, path: &Path, contour: &Contour, max_iter: usize, starts: usize) -> anyhow::Result<()> {
    let p = load_params(path)?;
    let cfg = PipelineConfig {
        seed: c.seed,
        tolerances: c.tolerances()?,
        starts,
        max_iter,
        alpha: contour.alpha.clone(),
        base: contour.base.as_ref().and_then(|b| b.last().copied()),
        delta: contour.delta,
    };
    let (bundle, err) = run_pipeline(&p, &cfg);
    let env = envelope(c, "pipeline", &quantity_tags().into_iter().collect::<Vec<_>>(), Some(serde_json::to_value(&bundle.contour)?), &bundle)?;
    report(&write_json(&c.out, "bundle.json", &env)?);
    if let Some(r) = bundle.diagram_residual {
        println!("diagram residual {r:.3e}");
    }
    match err {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}
