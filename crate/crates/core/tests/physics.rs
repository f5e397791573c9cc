use std::f64::consts::FRAC_PI_2;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tiltalloc::aero::{
    clean_wing_force, flow_decompose, forward_design, forward_full, induced_velocity, local_flow,
    wing_alpha, wing_forces, ActuatorInput, AircraftConfig, DesignFlags, FlightCondition,
};

fn cfg() -> AircraftConfig<f64> {
    AircraftConfig::reference()
}

#[test]
fn frame_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10_000 {
        let cond =
            FlightCondition::new(rng.gen_range(0.0..40.0), 1.0, rng.gen_range(-1.5..1.5)).unwrap();
        let (par, perp) = flow_decompose(&cond, rng.gen_range(0.0..FRAC_PI_2));
        let v2 = cond.v_inf * cond.v_inf;
        assert!((par * par + perp * perp - v2).abs() <= 1e-12 * v2.max(f64::MIN_POSITIVE));
    }
}

#[test]
fn still_air_hover() {
    // no developed slipstream reaches the wing
    let mut c = cfg();
    c.mounting.f_w = 0.0;
    let cond = FlightCondition::new(0.0, 1.225, 0.0).unwrap();
    let f = forward_full(&ActuatorInput::new(300.0, FRAC_PI_2), &cond, &c).unwrap();
    assert!(f.fx.abs() < 1e-9 && (f.fz - 300.0).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn zero_thrust_decoupling(v in 1.0..30.0f64, rho in 0.5..1.3f64, alpha in -0.2..0.3f64, delta in 0.0..1.5f64) {
        let cond = FlightCondition::new(v, rho, alpha).unwrap();
        let clean = clean_wing_force(&cond, &cfg());
        let f = forward_full(&ActuatorInput::new(0.0, delta), &cond, &cfg()).unwrap();
        prop_assert!((f.fx - clean.fx).abs() <= 1e-12 * (1.0 + clean.fx.abs()));
        prop_assert!((f.fz - clean.fz).abs() <= 1e-12 * (1.0 + clean.fz.abs()));
    }

    #[test]
    fn zero_thrust_recovers_free_stream_angle(v in 1.0..30.0f64, alpha in -0.3..0.3f64, delta in 0.0..1.2f64) {
        let cond = FlightCondition::new(v, 1.0, alpha).unwrap();
        let flow = local_flow(&ActuatorInput::new(0.0, delta), &cond, &cfg()).unwrap();
        prop_assert!((flow.alpha_w - alpha).abs() < 1e-12);
        prop_assert!((flow.v_i - flow.v_parallel).abs() < 1e-12);
    }

    #[test]
    fn induced_speed_grows_with_thrust(t in 0.0..400.0f64, dt in 0.0..50.0f64, vp in -10.0..30.0f64) {
        let a = induced_velocity(t, vp, 0.8, 1.0, 0.5).unwrap();
        let b = induced_velocity(t + dt, vp, 0.8, 1.0, 0.5).unwrap();
        prop_assert!(b >= a);
        prop_assert!(a >= vp);
    }

    #[test]
    fn thrust_reduces_angle_of_attack(v in 1.0..30.0f64, alpha in 0.01..0.5f64, delta in 0.0..1.0f64, t in 1.0..400.0f64) {
        prop_assume!(alpha + delta < FRAC_PI_2);
        let cond = FlightCondition::new(v, 1.0, alpha).unwrap();
        let (par, perp) = flow_decompose(&cond, delta);
        let vi = induced_velocity(t, par, 0.8, 1.0, 0.5).unwrap();
        prop_assert!(wing_alpha(perp, vi, delta).unwrap() <= alpha + 1e-12);
    }

    #[test]
    fn rotation_is_an_isometry(cl in -1.0..2.0f64, cd in 0.0..0.5f64, vw in 0.0..40.0f64, a in -0.5..0.5f64) {
        let w = wing_forces(1.1, 0.75, cl, cd, vw, a);
        let expect = w.lift.hypot(w.drag);
        prop_assert!((w.force.norm() - expect).abs() <= 1e-12 * expect.max(1e-300));
    }

}

#[test]
fn design_simplifications_stay_within_three_percent() {
    // commands whose design force lies in the Monte-Carlo request box
    let cond = FlightCondition::new(18.0, 1.0, 7f64.to_radians()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut accepted = 0;
    while accepted < 500 {
        let input = ActuatorInput::new(rng.gen_range(0.0..200.0), rng.gen_range(0.0..1.0));
        let design = forward_design(&input, &cond, &cfg(), DesignFlags::default()).unwrap();
        let flow = local_flow(&input, &cond, &cfg()).unwrap();
        let in_box = (40.0..=80.0).contains(&design.fx) && (70.0..=140.0).contains(&design.fz);
        if !in_box || flow.alpha_w.abs() > 10f64.to_radians() {
            continue;
        }
        accepted += 1;
        let exact = forward_design(&input, &cond, &cfg(), DesignFlags::NONE).unwrap();
        assert!(
            design.relative_error(&exact) <= 0.03,
            "{} at {input:?}",
            design.relative_error(&exact)
        );
    }
}

#[test]
fn overlap_is_continuous_in_tilt() {
    let cond = FlightCondition::new(10.0, 1.225, 0.05).unwrap();
    for t in [10.0, 100.0, 300.0] {
        let mut prev = local_flow(&ActuatorInput::new(t, 0.0), &cond, &cfg()).unwrap();
        let n = 20_000;
        for i in 1..=n {
            let d = 1.5 * i as f64 / n as f64;
            let flow = local_flow(&ActuatorInput::new(t, d), &cond, &cfg()).unwrap();
            assert!((flow.v_iw - prev.v_iw).abs() < 0.05, "jump at delta = {d}");
            prev = flow;
        }
    }
}
