use analog_codes_demo::{erasure_json, mse_curve_json, spectrum_json};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn spectrum_of_dct_is_flat() {
    let v = parse(&spectrum_json("dct", 8, 4, 0, false).unwrap());
    assert_eq!(v["mdre"], true);
    assert_eq!(v["mds"], "MDS");
    assert!((v["gamma"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(v["eigenvalues"].as_array().unwrap().len(), 4);
}

#[test]
fn spectrum_of_repetition_uses_n_over_k() {
    let v = parse(&spectrum_json("repetition", 6, 2, 0, false).unwrap());
    assert_eq!(v["id"], "repetition-k2-t3");
    assert_eq!(v["gamma"], 3.0);
    assert!(spectrum_json("repetition", 7, 2, 0, false).is_err());
    assert!(spectrum_json("dft", 4, 5, 0, false).is_err());
}

#[test]
fn large_codes_skip_the_mds_scan() {
    let v = parse(&spectrum_json("random", 40, 20, 3, true).unwrap());
    assert!(v["mds"].is_null());
    assert_eq!(v["mdre"], false);
}

#[test]
fn curve_tracks_analytic() {
    let pts = parse(&mse_curve_json("dct", 8, 4, 0, false, 4000).unwrap());
    let pts = pts.as_array().unwrap();
    assert_eq!(pts.len(), 7);
    for p in pts {
        let (mc, ci, an) = (
            p["mc_mse"].as_f64().unwrap(),
            p["ci95"].as_f64().unwrap(),
            p["analytic_mse"].as_f64().unwrap(),
        );
        assert!((mc - an).abs() <= 2.5 * ci, "{p}");
    }
    assert!(mse_curve_json("dct", 8, 4, 0, false, 10).is_err());
    assert!(mse_curve_json("dct", 8, 4, 0, false, 1_000_000).is_err());
}

#[test]
fn erasures_up_to_n_minus_k_are_recovered() {
    let v = parse(&erasure_json("dct", 8, 4, 1, false, "0, 3,5,7").unwrap());
    assert!(v["max_error"].as_f64().unwrap() < 1e-9);
    assert_eq!(v["erased"], serde_json::json!([0, 3, 5, 7]));
    assert!(erasure_json("dct", 8, 4, 1, false, "0,1,2,3,4").is_err());
    assert!(erasure_json("repetition", 4, 2, 1, false, "0,2").is_err());
    assert!(erasure_json("dct", 8, 4, 1, false, "x").is_err());
}
