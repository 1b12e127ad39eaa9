use droplet_web::{ball_json, solve_shape_json, FlowStepper};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn disk_solution_has_constant_gradient() {
    let v = parse(&solve_shape_json("circle(1)", 64, 1.0).unwrap());
    assert_eq!(v["x"].as_array().unwrap().len(), 64);
    let expected = 4.0 / std::f64::consts::PI;
    for g in v["grad"].as_array().unwrap() {
        assert!((g.as_f64().unwrap() - expected).abs() < 1e-10);
    }
    assert!((v["lambda"].as_f64().unwrap() - 8.0 / std::f64::consts::PI).abs() < 1e-10);
}

#[test]
fn bad_input_is_reported() {
    assert!(solve_shape_json("circle(1)", 8, 1.0).unwrap_err().contains("node count"));
    assert!(solve_shape_json("square(1)", 64, 1.0).is_err());
    assert!(ball_json(2, -1.0).is_err());
    assert!(FlowStepper::create("circle(1)", 64, 1.0, "poly(1,1)").is_err());
}

#[test]
fn stepper_lowers_the_energy() {
    let mut s = FlowStepper::create("fourier(1,[(3,0.1)])", 64, 1.0, "quadratic").unwrap();
    let e0 = parse(&s.state_json())["energy"].as_f64().unwrap();
    let v = parse(&s.advance(5).unwrap());
    assert!(v["t"].as_f64().unwrap() > 0.0);
    assert!(v["energy"].as_f64().unwrap() < e0);
}

#[test]
fn ball_json_matches_closed_form() {
    let v = parse(&ball_json(2, 1.0).unwrap());
    assert!((v["r_star"].as_f64().unwrap() - (4.0 / std::f64::consts::PI).powf(1.0 / 3.0)).abs() < 1e-14);
}
