use std::path::{Path, PathBuf};

use hypspec::bounds::{
    attach_pipeline, catalogue, evaluate_all, evaluate_bound, parse_num, Num, Params, Provenance, Verdict,
};
use hypspec::io::{params_from_value, read_json, Workspace};
use hypspec::Error;

/// C(3,1,1/2,1/10)^{-2}/40 from the extended-precision Moser oracle.
const LAMBDA0_RHS: f64 = 9.012428060163121028e-5;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn params(name: &str) -> Params {
    params_from_value(&read_json(&fixture(name)).unwrap()).unwrap()
}

fn exact(r: &Option<hypspec::bounds::NumReport>) -> String {
    r.as_ref().and_then(|n| n.exact.clone()).expect("exact value")
}

#[test]
fn every_entry_evaluates_on_the_complete_set() {
    let ps = params("complete_params.json");
    for e in catalogue() {
        for s in e.params {
            assert!(ps.get(s.name).is_some(), "{} needs {}", e.id, s.name);
        }
    }
    let reports = evaluate_all(&ps);
    assert_eq!(reports.len(), catalogue().len());
    for r in &reports {
        assert_ne!(r.verdict, Verdict::NotApplicable, "{}: {:?}", r.id, r.notes);
        assert!(r.rhs.is_some());
    }
}

#[test]
fn hand_substitutions() {
    let mut ps = Params::new();
    ps.set_user("diam", Num::int(2));
    assert_eq!(exact(&evaluate_bound("dirichlet_diam", &ps).unwrap().rhs), "4");
    ps.set_user("vol_dF0", Num::int(10));
    ps.set_user("vol_ratio", Num::int(6));
    assert_eq!(exact(&evaluate_bound("tree_area", &ps).unwrap().rhs), "60");
    ps.set_user("diam_F0", parse_num("3/2").unwrap());
    ps.set_user("diam_T", Num::int(3));
    assert_eq!(exact(&evaluate_bound("tree_diam", &ps).unwrap().rhs), "6");

    let r = evaluate_bound("lambda0_lower", &params("lambda0_params.json")).unwrap();
    let rhs = r.rhs.unwrap().value;
    assert!((rhs - LAMBDA0_RHS).abs() < 1e-9 * LAMBDA0_RHS);
    assert_eq!(r.verdict, Verdict::Holds);
}

#[test]
fn verdicts_near_equality_are_marginal() {
    let mut ps = Params::new();
    ps.set_user("diam", Num::int(2));
    for (lhs, want) in [("3", Verdict::Holds), ("4", Verdict::Marginal), ("40000000000001/10000000000000", Verdict::Marginal), ("5", Verdict::Fails)] {
        ps.set_user("diam_F", parse_num(lhs).unwrap());
        assert_eq!(evaluate_bound("dirichlet_diam", &ps).unwrap().verdict, want, "{lhs}");
    }
    // π enters through an interval, so a lhs inside its enclosure cannot be decided
    let mut ps = Params::new();
    for (k, v) in [("df_sup", "1"), ("sarea", "0"), ("b1", "1")] {
        ps.set_user(k, parse_num(v).unwrap());
    }
    ps.set_user("period", Num::float(5.0 * std::f64::consts::PI));
    assert_eq!(evaluate_bound("harmonic_subtraction", &ps).unwrap().verdict, Verdict::Marginal);
}

#[test]
fn missing_and_unknown() {
    let ps = Params::new();
    assert!(matches!(evaluate_bound("no_such_bound", &ps), Err(Error::UnknownBound(_))));
    assert!(matches!(evaluate_bound("dirichlet_diam", &ps), Err(Error::MissingParameter(_))));
    let mut ps = Params::new();
    ps.set_user("diam", Num::int(2));
    let r = evaluate_bound("dirichlet_diam", &ps).unwrap();
    assert_eq!(r.verdict, Verdict::NotApplicable);
}

#[test]
fn pipeline_values_are_marked_computed() {
    let ws = Workspace::load(&[fixture("torus_cover.json"), fixture("unit_geometry.json")], None).unwrap();
    let mut ps = params("torus_params.json");
    ps.set_user("b1", Num::int(99));
    attach_pipeline(&mut ps, &ws.complex, ws.geometry.as_ref(), ws.cover.as_ref()).unwrap();
    // user values win
    assert_eq!(ps.get("b1").unwrap().value(), 99.0);
    assert_eq!(ps.provenance("b1"), Some(&Provenance::User));
    assert!(matches!(ps.provenance("vol_ratio"), Some(Provenance::Computed(_))));
    assert_eq!(ps.get("vol_ratio").unwrap().value(), 3.0);
    assert_eq!(ps.get("n").unwrap().value(), 2.0);
    let dichotomy = evaluate_bound("dichotomy", &ps).unwrap();
    assert!(dichotomy.notes.iter().any(|n| n.contains("empirical")));
    // the surface is two-dimensional, below the range of the λ₀ bound
    let all = evaluate_all(&ps);
    let l0 = all.iter().find(|r| r.id == "lambda0_lower").unwrap();
    assert_eq!(l0.verdict, Verdict::NotApplicable);
}
