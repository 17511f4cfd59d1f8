mod common;

use gdaha::params::qr;
use gdaha::pipeline::{replay_differences, run_pipeline, PipelineConfig};
use gdaha::{ErrorClass, Qi};

fn uniform_d4(g: Qi) -> gdaha::params::RationalParams {
    gdaha::params::RationalParams::new(&[2, 2, 2, 2], vec![vec![g.clone(); 2]; 4], qr(0, 1)).unwrap()
}

#[test]
fn d4_bundle_closes_the_diagram() {
    let (bundle, err) = run_pipeline(&common::d4(qr(0, 1)), &PipelineConfig { seed: 5, ..Default::default() });
    assert!(err.is_none(), "{err:?}");
    assert!(bundle.diagram_residual.unwrap() < 1e-6);
    let ds = bundle.ds.as_ref().unwrap();
    assert!(ds.residual < 1e-10);
    assert_eq!(ds.tangent_dim, Some(2));
    assert_eq!(ds.irreducible, Some(true));
    assert!(bundle.phi_nondegenerate.as_ref().unwrap().certified(1e-6));
}

#[test]
fn e6_bundle_has_small_product_residual() {
    let (bundle, err) = run_pipeline(&common::e6(qr(0, 1)), &PipelineConfig { seed: 2, ..Default::default() });
    assert!(err.is_none(), "{err:?}");
    assert!(bundle.product_residual.unwrap() < 1e-8);
    assert!(bundle.relations.as_ref().unwrap().max < 1e-8);
}

#[test]
fn replay_with_the_same_seed_agrees() {
    let p = common::d4_alt(qr(0, 1));
    let cfg = PipelineConfig { seed: 11, alpha: Some(vec![-1.0, 0.5, 2.0, 3.0]), base: Some(4.5), ..Default::default() };
    let a = run_pipeline(&p, &cfg).0.to_json();
    let b = run_pipeline(&p, &cfg).0.to_json();
    assert_eq!(replay_differences(&a, &b, 1e-12), Vec::<String>::new());
    assert_eq!(a["contour"]["alpha"][1], 0.5);
    assert_eq!(a["seed"], 11);
    assert!(a["tags"]["ds"].is_string());
}

#[test]
fn nonzero_hbar_stops_before_solving_and_keeps_the_header() {
    let (bundle, err) = run_pipeline(&uniform_d4(qr(1, 10)), &PipelineConfig::default());
    let err = err.unwrap();
    assert_eq!(err.class(), ErrorClass::Validation);
    assert_eq!(bundle.hbar, "4/5");
    assert!(bundle.ds.is_none());
    assert!(bundle.failure.is_some());
}
