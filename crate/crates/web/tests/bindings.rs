use alloyrep_web::{asl2_rep, asl2_rep_json, search_trace_json, spin_tensor, spin_tensor_json};
use serde_json::Value;

#[test]
fn asl2_rep_reports_irreducibility_and_images() {
    let v = asl2_rep_json("1,2,1", 0.5, 0.0, 3).unwrap();
    assert_eq!(v["space_dim"], 4);
    assert_eq!(v["irreducible"], true);
    assert_eq!(v["conditions_ok"], true);
    assert_eq!(v["images"].as_array().unwrap().len(), 4);
    assert_eq!(v["e0_spectrum"].as_array().unwrap().len(), 3);

    let reducible = asl2_rep_json("2,1", 0.5, 0.0, 3).unwrap();
    assert_eq!(reducible["admissible"], false);
    assert_eq!(reducible["irreducible"], false);
}

#[test]
fn errors_come_back_as_json() {
    let v: Value = serde_json::from_str(&asl2_rep("1,x", 0.0, 0.0, 0)).unwrap();
    assert!(v["error"].is_string());
    let v: Value = serde_json::from_str(&spin_tensor(9, 1, 0)).unwrap();
    assert!(v["error"].is_string());
    assert!(asl2_rep_json("5,6", 0.0, 0.0, 0).is_err());
}

#[test]
fn spin_tensor_matches_clebsch_gordan() {
    for (n1, n2) in [(1, 1), (2, 1), (3, 2)] {
        let v = spin_tensor_json(n1, n2, 0).unwrap();
        assert_eq!(v["dims"], v["expected"]);
        assert!(v["reassembly_residual"].as_f64().unwrap() < 1e-8);
    }
}

#[test]
fn search_trace_is_monotone() {
    let v = search_trace_json(2, 2, 1, 3, 50).unwrap();
    for trace in v["traces"].as_array().unwrap() {
        let t: Vec<f64> = trace
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap())
            .collect();
        assert!(t.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
    }
    assert!(search_trace_json(5, 1, 0, 1, 1).is_err());
}
