//! Frozen reference values computed independently of this crate.

use nambu_shadow::bch::{composed_map, shadow_solve};
use nambu_shadow::flows::rotation_angle;
use nambu_shadow::observables::predicted_beat_period;
use nambu_shadow::{factor_f, modified_field, step, FlowParams, Hamiltonians, OscillatorParams, Poly, SplitScheme, State, VectorField};

fn field(c: [&str; 3]) -> VectorField {
    VectorField::new(c.map(|s| s.parse::<Poly>().unwrap()))
}

const V2_UNIT: [(&str, [&str; 3]); 6] = [
    ("12321", ["-1/12*x2", "-1/6*x1", "1/3*x1*x2"]),
    ("13231", ["-1/12*x2", "-1/6*x1", "1/3*x1*x2"]),
    ("31213", ["-1/12*x2", "-1/6*x1", "-2/3*x1*x2"]),
    ("21312", ["1/6*x2", "1/12*x1", "1/3*x1*x2"]),
    ("23132", ["1/6*x2", "1/12*x1", "1/3*x1*x2"]),
    ("32123", ["1/6*x2", "1/12*x1", "-2/3*x1*x2"]),
];

const V2_M2_W3: [(&str, [&str; 3]); 6] = [
    ("12321", ["-3/8*x2", "-27*x1", "3/2*x1*x2"]),
    ("13231", ["-3/8*x2", "-27*x1", "3/2*x1*x2"]),
    ("31213", ["-3/8*x2", "-27*x1", "-3*x1*x2"]),
    ("21312", ["3/4*x2", "27/2*x1", "3/2*x1*x2"]),
    ("23132", ["3/4*x2", "27/2*x1", "3/2*x1*x2"]),
    ("32123", ["3/4*x2", "27/2*x1", "-3*x1*x2"]),
];

#[test]
fn second_order_fields_match_frozen_values() {
    for (params, table) in [
        (OscillatorParams::unit(), V2_UNIT),
        (OscillatorParams::from_ints((2, 1), (3, 1)), V2_M2_W3),
    ] {
        let hs = Hamiltonians::new(&params);
        for (label, v2) in table {
            let mf = modified_field(&SplitScheme::builtin(label).unwrap(), &hs.generators()).unwrap();
            assert_eq!(mf.v2, field(v2), "scheme {label}");
            assert!(mf.v1.is_zero());
            assert_eq!(mf.v0, hs.nambu_field());
        }
    }
}

#[test]
fn one_step_values() {
    let p = FlowParams::default();
    let s = step(&SplitScheme::builtin("12321").unwrap(), State::default(), &p);
    assert!(s.max_abs_diff(&State::new(4379.0 / 4000.0, 179.0 / 200.0, 47959.0 / 40000.0)) <= 1e-15);
    let s = step(&SplitScheme::builtin("32123").unwrap(), State::default(), &p);
    assert!(s.max_abs_diff(&State::new(1.095, 0.89525, 1.198029875)) <= 1e-15);
    let p = FlowParams::new(2.0, 3.0, 0.1).unwrap();
    let s = step(&SplitScheme::builtin("12321").unwrap(), State::default(), &p);
    assert!(s.max_abs_diff(&State::new(8031.0 / 8000.0, -169.0 / 200.0, 161271.0 / 160000.0)) <= 1e-15);
}

#[test]
fn composed_map_is_the_exact_step() {
    let hs = Hamiltonians::new(&OscillatorParams::unit());
    let map = composed_map(&SplitScheme::builtin("12321").unwrap(), &hs.generators(), 6).unwrap();
    let got = map.each_ref().map(|p| p.eval(&[1.0, 1.0, 1.0, 0.1]));
    let want = [4379.0 / 4000.0, 179.0 / 200.0, 47959.0 / 40000.0];
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).abs() <= 1e-15);
    }
}

#[test]
fn particular_shadow_solution_of_12321() {
    let hs = Hamiltonians::new(&OscillatorParams::unit());
    let v2 = modified_field(&SplitScheme::builtin("12321").unwrap(), &hs.generators()).unwrap().v2;
    let family = shadow_solve(&v2, &hs.h, &hs.g, 2).unwrap();
    assert!(family.particular.0.is_zero());
    assert_eq!(family.particular.1, "-1/6*x1^2 - 1/12*x3".parse().unwrap());
    assert_eq!(family.dimension(), 5);
}

#[test]
fn scalar_constants() {
    let p = FlowParams::default();
    assert!((factor_f(0.1).unwrap() - 1.001_670_007_158_766_3).abs() <= 1e-15);
    assert!((rotation_angle(&p).unwrap() - 0.100_041_713_611_540_03).abs() <= 1e-13);
    assert!((predicted_beat_period(&p).unwrap() - 7_531.336_984_751_488).abs() <= 1e-6);
}
