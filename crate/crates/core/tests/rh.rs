mod common;

use std::f64::consts::PI;

use gdaha::algebra::{induced_rep_nu_zero, MatrixRep};
use gdaha::ds::*;
use gdaha::linalg::{block_diag, column_span, eigenvalues, expm, frobenius, inverse, null_space, trace, CMat};
use gdaha::monodromy::{default_geometry, kz_connection, monodromy_functor};
use gdaha::params::{exponentiate_params, qr, RationalParams};
use gdaha::rh::flow::{flow_invariants, invariant_drift};
use gdaha::rh::*;
use gdaha::spectrum::{bottleneck_distance, spectrum_match, ConjugacyClassSpec};
use gdaha::C64;

fn solve_n1(p: &RationalParams, seed: u64) -> DSSolution {
    let specs = additive_class_specs(p, 1).unwrap();
    solve_additive_ds(&specs, &SolverConfig { seed, ..Default::default() }).unwrap()
}

fn module_n1(p: &RationalParams, seed: u64) -> MatrixRep<C64> {
    induced_rep_nu_zero(p, &[solve_n1(p, seed).matrices], 1e-9).unwrap()
}

fn continued_n2() -> (RationalParams, MatrixRep<C64>) {
    let p0 = common::d4(qr(0, 1));
    let seed = induced_rep_nu_zero(&p0, &[solve_n1(&p0, 1).matrices, solve_n1(&p0, 2).matrices], 1e-9).unwrap();
    let target = common::d4(qr(1, 20));
    let (rep, _) = continue_bn_representation(&target, &seed, 5, 1e-11).unwrap();
    (target, rep)
}

fn half_circle(steps: usize) -> Vec<C64> {
    arc_path(C64::new(2.0, 0.0), 0.5, 0.0, PI, steps)
}

#[test]
fn phi_degenerate_on_continued_n2_module_lands_in_the_predicted_classes() {
    let (p, rep) = continued_n2();
    let phi = phi_degenerate(&rep, &p, 1e-8).unwrap();
    assert_eq!(phi.v_prime_dim, 4);
    assert!(phi.closure < 1e-6, "closure {:e}", phi.closure);
    assert!(phi.max_spectral_deviation() < 1e-6, "{:?}", phi.spectra);
}

#[test]
fn phi_degenerate_rejects_modules_without_the_right_isotypic_part() {
    let p = common::d4(qr(0, 1));
    let rep = induced_rep_nu_zero(&p, &[solve_n1(&p, 1).matrices, solve_n1(&p, 2).matrices], 1e-9).unwrap();
    assert!(phi_degenerate(&rep, &p, 1e-8).unwrap().certified(1e-8));
    let other = common::d4_alt(qr(0, 1));
    assert!(phi_degenerate(&rep, &other, 1e-8).is_err());
}

#[test]
fn phi_nondegenerate_on_n2_monodromy_has_the_eigenvalue_law() {
    let (p, rep) = continued_n2();
    let (alpha, base) = default_geometry(p.m(), 2);
    let conn = kz_connection(&rep, &p.gamma_c64(), p.nu_c64(), &alpha, 1e-9).unwrap();
    let mon = monodromy_functor(&conn, &alpha, &base, None, 1e-10).unwrap();
    let phi = phi_nondegenerate(&mon, &p.graph, 1e-8).unwrap();
    assert_eq!(phi.v_prime_dim, 4);
    assert!(phi.closure < 1e-6, "closure {:e}", phi.closure);
    assert!(phi.max_spectral_deviation() < 1e-6, "{:?}", phi.spectra);
    // Oracle for the last entry: {u t^2 ×1, u t^-2 ×1, u_1 ×2} with u = u_{m,2}.
    let t = mon.t;
    let u = &mon.u[3];
    let want = vec![u[1] * t * t, u[1] / (t * t), u[0], u[0]];
    assert!(bottleneck_distance(&eigenvalues(&phi.matrices[3]), &want) < 1e-6);
}

#[test]
fn rh_map_of_a_d4_solution_lands_in_the_exponentiated_classes() {
    let p = common::d4(qr(0, 1));
    let sol = solve_n1(&p, 11);
    let (alpha, base) = default_geometry(4, 1);
    let rh = rh_map(&sol.matrices, &alpha, base[0], 1e-11).unwrap();
    assert!(rh.product_residual < 1e-8);
    let specs = multiplicative_class_specs(&exponentiate_params(&p), 1, 1e-10).unwrap();
    for (x, s) in rh.matrices.iter().zip(&specs) {
        assert!(spectrum_match(x, s, 1e-8).unwrap().matches);
    }
    assert!(rh.max_spectral_deviation() < 1e-8);
}

#[test]
fn invariants_are_conjugation_invariant_and_start_with_traces() {
    let p = common::d4(qr(0, 1));
    let sol = solve_n1(&p, 4);
    let g = CMat::from_fn(2, 2, |i, j| C64::new(1.0 + i as f64, 0.3 * j as f64 - 0.1));
    let gi = inverse(&g).unwrap();
    let conj: Vec<CMat> = sol.matrices.iter().map(|x| &g * x * &gi).collect();
    let a = conjugation_invariants(&sol.matrices, 4);
    let b = conjugation_invariants(&conj, 4);
    assert!(a.iter().zip(&b).all(|(u, v)| (u - v).norm() < 1e-10));
    for (k, s) in sol.specs.iter().enumerate() {
        assert!((a[k] - s.trace()).norm() < 1e-10);
    }
}

#[test]
fn rigid_tuples_from_independent_runs_have_equal_invariants() {
    let class = |a: f64, b: f64| ConjugacyClassSpec::new(vec![(C64::new(a, 0.0), 1), (C64::new(b, 0.0), 1)]);
    let specs = vec![class(0.13, -0.31), class(0.27, 0.05), class(-0.41, 0.27)];
    let runs: Vec<Vec<C64>> = [3, 17]
        .iter()
        .map(|&seed| {
            let sol = solve_additive_ds(&specs, &SolverConfig { seed, ..Default::default() }).unwrap();
            conjugation_invariants(&sol.matrices, 4)
        })
        .collect();
    assert!(runs[0].iter().zip(&runs[1]).all(|(u, v)| (u - v).norm() < 1e-6));
}

#[test]
fn d4_n1_moduli_are_not_rigid_but_runs_are_reproducible() {
    let p = common::d4(qr(0, 1));
    let a = conjugation_invariants(&solve_n1(&p, 3).matrices, 4);
    let b = conjugation_invariants(&solve_n1(&p, 3).matrices, 4);
    let c = conjugation_invariants(&solve_n1(&p, 17).matrices, 4);
    assert_eq!(a, b);
    assert!(a.iter().zip(&c).any(|(u, v)| (u - v).norm() > 1e-6));
}

#[test]
fn conjugacy_match_separates_different_spectra() {
    let p = common::d4(qr(0, 1));
    let x = solve_n1(&p, 5).matrices;
    let y = solve_n1(&common::d4_alt(qr(0, 1)), 5).matrices;
    assert!(match_up_to_conjugacy(&x, &y, 1e-6).residual > 1e-3);
    let g = CMat::from_fn(2, 2, |i, j| C64::new(0.5 + (i * 2 + j) as f64, -0.2 * i as f64));
    let gi = inverse(&g).unwrap();
    let z: Vec<CMat> = x.iter().map(|m| &g * m * &gi).collect();
    let mt = match_up_to_conjugacy(&x, &z, 1e-6);
    assert!(mt.residual < 1e-12);
    let h = mt.conjugator.unwrap();
    let hi = inverse(&h).unwrap();
    assert!(x.iter().zip(&z).all(|(a, b)| frobenius(&(&h * a * &hi - b)) < 1e-9));
}

#[test]
fn diagram_commutes_for_d4_modules() {
    let p = common::d4(qr(0, 1));
    let configs: [(&[f64], &[f64]); 2] = [(&[0.0, 1.0, 2.0, 3.0], &[4.0]), (&[-1.5, 0.2, 0.9, 2.6], &[3.7])];
    for seed in [21, 22, 23] {
        let rep = module_n1(&p, seed);
        for (alpha, base) in configs {
            let report = diagram_check(&rep, &p, alpha, base, 1e-11).unwrap();
            assert!(report.residual() < 1e-6, "seed {seed}: {:e}", report.residual());
            assert!(report.via_monodromy.certified(1e-6));
        }
    }
}

#[test]
fn rh_map_depends_on_punctures_only_up_to_real_mobius_maps() {
    let p = common::d4(qr(0, 1));
    let x = solve_n1(&p, 8).matrices;
    let phi = |z: f64| (2.0 * z + 1.0) / (z + 6.0);
    let alpha = [0.0, 1.0, 2.0, 3.0];
    let moved: Vec<f64> = alpha.iter().map(|&a| phi(a)).collect();
    let a = rh_map(&x, &alpha, 4.0, 1e-11).unwrap();
    let b = rh_map(&x, &moved, phi(4.0), 1e-11).unwrap();
    assert!(match_up_to_conjugacy(&a.matrices, &b.matrices, 1e-6).residual < 1e-6);
    assert!(invariant_drift(&conjugation_invariants(&b.matrices, 4), &conjugation_invariants(&a.matrices, 4)) < 1e-8);
}

/// Random tangent vector `([P_k, x_k])_k` with `Σ [P_k, x_k] = 0`, orthogonal
/// to simultaneous conjugation, scaled to Frobenius norm `eps`; returned as
/// the Lie algebra elements `P_k`.
fn transverse_direction(x: &[CMat], eps: f64, seed: u64) -> Vec<CMat> {
    let n = x[0].nrows();
    let m = x.len();
    let nn = n * n;
    // Columns: coordinates P_k(i,j); rows: the stacked [P_k, x_k].
    let unit = |c: usize| CMat::from_fn(n, n, |i, j| if j * n + i == c { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
    let mut tangent = CMat::zeros(m * nn, m * nn);
    for k in 0..m {
        for c in 0..nn {
            let e = unit(c);
            let d = &e * &x[k] - &x[k] * &e;
            for (r, v) in d.iter().enumerate() {
                tangent[(k * nn + r, k * nn + c)] = *v;
            }
        }
    }
    let mut sum_map = CMat::zeros(nn, m * nn);
    for k in 0..m {
        sum_map.view_mut((0, k * nn), (nn, nn)).copy_from(&tangent.view((k * nn, k * nn), (nn, nn)));
    }
    let kernel = null_space(&sum_map, 1e-10, 1e-12).basis;
    let images = &tangent * &kernel;
    let mut gauge = CMat::zeros(m * nn, nn);
    for c in 0..nn {
        let col: Vec<C64> = (0..m * nn).map(|r| (0..m).map(|k| tangent[(r, k * nn + c)]).sum()).collect();
        gauge.set_column(c, &nalgebra::DVector::from_vec(col));
    }
    let mut rng = gdaha::rng::stream(seed, "test/tangent");
    let coeffs = gdaha::rng::gaussian_matrix(&mut rng, kernel.ncols(), 1);
    let mut v = &images * &coeffs;
    let q = column_span(&gauge, 1e-10);
    v -= &q * (q.adjoint() * &v);
    // Pull the transverse image back to Lie algebra coordinates.
    let coords = tangent.svd(true, true).solve(&v, 1e-10).unwrap();
    let scale = eps / frobenius(&v);
    (0..m).map(|k| CMat::from_fn(n, n, |i, j| coords[k * nn + j * n + i] * scale)).collect()
}

#[test]
fn rh_map_is_locally_injective_transverse_to_the_gauge() {
    let p = common::d4(qr(0, 1));
    let x = solve_n1(&p, 9).matrices;
    let (alpha, base) = default_geometry(4, 1);
    let dirs = transverse_direction(&x, 1e-4, 9);
    let moved: Vec<CMat> = x.iter().zip(&dirs).map(|(xk, pk)| expm(pk) * xk * expm(&(-pk))).collect();
    let a = conjugation_invariants(&rh_map(&x, &alpha, base[0], 1e-11).unwrap().matrices, 4);
    let b = conjugation_invariants(&rh_map(&moved, &alpha, base[0], 1e-11).unwrap().matrices, 4);
    let change = a.iter().zip(&b).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
    assert!(change > 1e-8, "invariant change {change:e}");
}

#[test]
fn constant_kappa_gives_a_constant_trajectory() {
    let x = solve_n1(&common::d4(qr(0, 1)), 2).matrices;
    let k = C64::new(2.5, 0.0);
    let traj = painleve_flow(&x, &[k, k, k], &FlowConfig::default()).unwrap();
    assert_eq!(traj.max_drift(), 0.0);
    assert!(traj.states.iter().all(|s| s == &x));
}

#[test]
fn n1_flow_is_isomonodromic_along_a_half_circle() {
    let x = solve_n1(&common::d4(qr(0, 1)), 2).matrices;
    let cfg = FlowConfig::default();
    let path = half_circle(20);
    let traj = painleve_flow(&x, &path, &cfg).unwrap();
    assert_eq!(traj.kappa.len(), 21);
    assert!(traj.max_drift() < 1e-6, "drift {:e}", traj.max_drift());
    assert!(traj.max_drift() <= 10.0 * cfg.tol);
    assert!(traj.surrogate_error < 1e-8);
    for x in &traj.states {
        assert!(frobenius(&x.iter().skip(1).fold(x[0].clone(), |a, b| a + b)) < 1e-9);
        for (xk, s) in x.iter().zip(&solve_n1(&common::d4(qr(0, 1)), 2).specs) {
            assert!(spectrum_match(xk, s, 1e-8).unwrap().matches);
        }
    }
    // The unmoved tuple no longer has the target invariants at the endpoint.
    let geom = FlowGeometry::for_path(&path, cfg.surrogate_scale);
    let frozen = flow_invariants(&x, *path.last().unwrap(), &geom, &cfg).unwrap();
    assert!(invariant_drift(&frozen, &traj.target) > 1e-4);
    let mut csv = Vec::new();
    traj.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().count(), 22);
    assert_eq!(text.lines().next().unwrap().split(',').count(), 4 + 2 * 340);
}

#[test]
fn n1_flow_is_stable_under_step_halving() {
    let x = solve_n1(&common::d4(qr(0, 1)), 2).matrices;
    let cfg = FlowConfig::default();
    let coarse = painleve_flow(&x, &half_circle(20), &cfg).unwrap();
    let fine = painleve_flow(&x, &half_circle(40), &cfg).unwrap();
    assert!(fine.max_drift() <= 2.0 * coarse.max_drift().max(cfg.tol));
    for i in 0..=20 {
        let r = match_up_to_conjugacy(&coarse.states[i], &fine.states[2 * i], 1e-6).residual;
        assert!(r < 1e-6, "sample {i}: {r:e}");
    }
}

#[test]
fn nu_zero_n2_flow_decouples_into_n1_flows() {
    let p = common::d4(qr(0, 1));
    let a = solve_n1(&p, 1).matrices;
    let b = solve_n1(&p, 2).matrices;
    let seed: Vec<CMat> = a.iter().zip(&b).map(|(u, v)| block_diag(&[u.clone(), v.clone()])).collect();
    let cfg = FlowConfig::default();
    let path = arc_path(C64::new(2.0, 0.0), 0.5, 0.0, PI / 2.0, 3);
    let joint = painleve_flow(&seed, &path, &cfg).unwrap();
    let fa = painleve_flow(&a, &path, &cfg).unwrap();
    let fb = painleve_flow(&b, &path, &cfg).unwrap();
    assert!(joint.max_drift() < 1e-6);
    for i in 0..path.len() {
        let sum: Vec<CMat> =
            fa.states[i].iter().zip(&fb.states[i]).map(|(u, v)| block_diag(&[u.clone(), v.clone()])).collect();
        let r = match_up_to_conjugacy(&joint.states[i], &sum, 1e-5).residual;
        assert!(r < 1e-5, "sample {i}: {r:e}");
    }
    let t = trace(&joint.states[3][0]);
    assert!((t - trace(&fa.states[3][0]) - trace(&fb.states[3][0])).norm() < 1e-10);
}

#[test]
fn flow_rejects_paths_that_cross_the_loop_system() {
    let x = solve_n1(&common::d4(qr(0, 1)), 2).matrices;
    let path = [C64::new(0.5, -0.5), C64::new(1.5, -0.5)];
    let (traj, err) = painleve_flow_partial(&x, &path, &FlowConfig::default()).unwrap();
    assert_eq!(traj.kappa.len(), 1);
    assert!(matches!(err, Some(gdaha::Error::PathTooCoarse(_))));
    assert!(painleve_flow(&x, &[C64::new(1.0, 0.0)], &FlowConfig::default()).is_err());
}
