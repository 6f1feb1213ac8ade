//! Relations between schemes, sub-flows and the symbolic map.

use nambu_shadow::bch::{commutator_expansion, composed_map, modified_field};
use nambu_shadow::flows::{jacobian_det, Integrator};
use nambu_shadow::scheme::{NAMBU_SCHEMES, VERLET_SCHEMES};
use nambu_shadow::{lv_pair, nambu, run, FlowParams, Hamiltonians, OscillatorParams, SplitScheme, State};

fn scheme(label: &str) -> SplitScheme {
    SplitScheme::builtin(label).unwrap()
}

fn trajectory(label: &str, n: usize) -> Vec<State> {
    run(&scheme(label), State::new(0.3, -1.2, 0.8), &FlowParams::default(), n, 1)
        .unwrap()
        .samples
}

#[test]
fn leading_field_is_the_exact_generator() {
    for params in OscillatorParams::samples() {
        let hs = Hamiltonians::new(&params);
        for l in NAMBU_SCHEMES {
            let mf = modified_field(&scheme(l), &hs.generators()).unwrap();
            assert_eq!(mf.v0, hs.nambu_field());
            assert!(mf.v1.is_zero());
        }
        for l in VERLET_SCHEMES {
            let mf = modified_field(&scheme(l), &hs.generators()).unwrap();
            assert_eq!(mf.v0, hs.canonical_field());
            assert!(mf.v1.is_zero());
        }
    }
}

#[test]
fn commutator_expansion_sums_to_second_order_field() {
    for params in OscillatorParams::samples() {
        let hs = Hamiltonians::new(&params);
        let gens = hs.generators();
        for l in NAMBU_SCHEMES.iter().chain(&VERLET_SCHEMES) {
            let sc = scheme(l);
            let sum = commutator_expansion(&sc)
                .unwrap()
                .iter()
                .map(|t| t.field(&gens).unwrap())
                .sum();
            assert_eq!(modified_field(&sc, &gens).unwrap().v2, sum, "scheme {l}");
        }
    }
}

#[test]
fn commutators_of_generators_follow_the_fundamental_identity() {
    for params in OscillatorParams::samples() {
        let hs = Hamiltonians::new(&params);
        let pairs = [(&hs.a, &hs.c), (&hs.b, &hs.d), (&hs.a, &hs.d)];
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    continue;
                }
                let ((c, d), (e, f)) = (pairs[i], pairs[j]);
                let lhs = lv_pair(c, d).commutator(&lv_pair(e, f));
                assert_eq!(lhs, &lv_pair(&nambu(e, c, d), f) + &lv_pair(e, &nambu(f, c, d)));
                assert_eq!(lhs, -&(&lv_pair(&nambu(c, e, f), d) + &lv_pair(c, &nambu(d, e, f))));
            }
        }
    }
}

#[test]
fn planar_motion_decouples_from_x3() {
    let n = 2000;
    for (reference, group) in [("TVT", ["12321", "13231", "31213"]), ("VTV", ["21312", "23132", "32123"])] {
        let r = trajectory(reference, n);
        for l in group {
            for (a, b) in trajectory(l, n).iter().zip(&r) {
                assert!((a.x1 - b.x1).abs() <= 1e-12 && (a.x2 - b.x2).abs() <= 1e-12, "{l} vs {reference}");
            }
        }
    }
}

#[test]
fn paired_schemes_share_trajectories() {
    let n = 2000;
    for (a, b) in [("12321", "13231"), ("21312", "23132")] {
        for (s, t) in trajectory(a, n).iter().zip(&trajectory(b, n)) {
            assert!(s.max_abs_diff(t) <= 1e-12, "{a} vs {b}");
        }
    }
}

#[test]
fn numeric_step_matches_symbolic_map() {
    let hs = Hamiltonians::new(&OscillatorParams::unit());
    let gens = hs.generators();
    for l in NAMBU_SCHEMES {
        let sc = scheme(l);
        let map = composed_map(&sc, &gens, 6).unwrap();
        for h in [0.1, 0.05, -0.07] {
            let p = FlowParams::new(1.0, 1.0, h).unwrap();
            let s0 = State::new(0.4, -0.9, 1.7);
            let s1 = Integrator::new(&sc, &p).step(s0);
            let pt = [s0.x1, s0.x2, s0.x3, h];
            for (poly, num) in map.iter().zip(s1.coords()) {
                assert!((poly.eval(&pt) - num).abs() <= 1e-14, "scheme {l}");
            }
        }
    }
}

#[test]
fn stage_determinants_are_one() {
    let p = FlowParams::default();
    for l in NAMBU_SCHEMES.iter().chain(&VERLET_SCHEMES) {
        let d = jacobian_det(&scheme(l), &State::new(0.2, 1.4, -0.5), &p);
        assert!((d - 1.0).abs() <= 1e-14);
    }
}

#[test]
fn constraint_survives_many_steps() {
    for l in NAMBU_SCHEMES {
        let last = *trajectory(l, 10_000).last().unwrap();
        let first = State::new(0.3, -1.2, 0.8);
        let p = FlowParams::default();
        let pair = nambu_shadow::conserved_pair(l, &p).unwrap();
        let d = pair.g_c.eval(&last.point(p.h)) - pair.g_c.eval(&first.point(p.h));
        assert!(d.abs() <= 1e-10, "{l}");
    }
}
