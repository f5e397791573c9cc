mod common;

use std::path::Path;

use proptest::prelude::*;
use tiltalloc::aero::{
    forward_design, ActuatorInput, AircraftConfig, DesignFlags, FlightCondition,
};
use tiltalloc::alloc::build_system;
use tiltalloc::poly::{
    buchberger, divide, normal_form, verify_groebner, verify_groebner_exact, BuchbergerConfig,
    Monomial, MonomialOrder, Polynomial,
};
use tiltalloc::zerodim::normal_set;
use tiltalloc::{Rational, SolverError};

use common::ideals::{load, Expected, Fixture};

fn fixtures() -> Vec<Fixture> {
    load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/ideals.txt"))
}

fn dimension(f: &Fixture, order: &MonomialOrder) -> Expected {
    let gb = buchberger(&f.system, order, &BuchbergerConfig::default()).unwrap();
    match normal_set(&gb) {
        Ok(ns) => Expected::Finite(ns.len()),
        Err(SolverError::NotZeroDimensional(_)) => Expected::Positive,
        Err(e) => panic!("{}: {e}", f.name),
    }
}

#[test]
fn hand_crafted_bases_verify() {
    let all = fixtures();
    assert!(all.len() >= 10);
    for f in &all {
        let order = MonomialOrder::grevlex(f.system.nvars());
        let gb = buchberger(&f.system, &order, &BuchbergerConfig::default()).unwrap();
        let v = verify_groebner(&gb, &f.system).unwrap();
        assert!(v.ok(), "{}: {v:?}", f.name);
        assert_eq!(
            verify_groebner_exact(&gb, &f.system).unwrap(),
            v,
            "{}",
            f.name
        );
        assert_eq!(v.nonzero_s_remainders, 0, "{}", f.name);
        assert_eq!(v.nonzero_generator_remainders, 0, "{}", f.name);
    }
}

#[test]
fn hand_crafted_dimensions() {
    for f in &fixtures() {
        let n = f.system.nvars();
        let grevlex = dimension(f, &MonomialOrder::grevlex(n));
        assert_eq!(grevlex, f.expected, "{}", f.name);
        assert_eq!(
            dimension(f, &MonomialOrder::lex(n)),
            grevlex,
            "{} under lex",
            f.name
        );
    }
}

#[test]
fn tilt_rotor_bases_verify() {
    let cfg = AircraftConfig::reference();
    let cases = [
        (16.0, 1.0, 0.1, 150.0, 0.3),
        (19.0, 0.6, 0.15, 60.0, 0.05),
        (12.0, 1.225, 0.02, 250.0, 0.9),
    ];
    for (v, rho, alpha, t, d) in cases {
        let cond = FlightCondition::new(v, rho, alpha).unwrap();
        let force = forward_design(
            &ActuatorInput::new(t, d),
            &cond,
            &cfg,
            DesignFlags::default(),
        )
        .unwrap();
        let sys = build_system::<Rational>(&cond, &force, &cfg, DesignFlags::default()).unwrap();
        let order = MonomialOrder::grevlex(sys.nvars());
        let gb = buchberger(&sys, &order, &BuchbergerConfig::default()).unwrap();
        let v = verify_groebner_exact(&gb, &sys).unwrap();
        assert!(v.ok(), "{v:?}");
        assert_eq!(normal_set(&gb).unwrap().len(), 10);
    }
}

fn small_poly(nvars: usize) -> impl Strategy<Value = Polynomial<Rational>> {
    prop::collection::vec(
        (prop::collection::vec(0u32..3, nvars), -6i64..7, 1i64..4),
        1..5,
    )
    .prop_map(move |terms| {
        Polynomial::from_terms(
            nvars,
            terms
                .into_iter()
                .map(|(e, n, d)| (Monomial::new(e), Rational::new(n.into(), d.into()))),
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn division_is_witnessed(p in small_poly(3), which in 0usize..3) {
        let bases: Vec<_> = fixtures().into_iter().filter(|f| f.system.nvars() == 3 && f.expected != Expected::Positive).collect();
        let f = &bases[which % bases.len()];
        let order = MonomialOrder::grevlex(3);
        let (q, r) = divide(&p, &f.system.polys, &order).unwrap();
        let mut sum = r.clone();
        for (qi, bi) in q.iter().zip(&f.system.polys) {
            sum = sum.add(&qi.mul(bi).unwrap()).unwrap();
        }
        prop_assert_eq!(sum, p);
    }

    #[test]
    fn normal_form_is_idempotent(p in small_poly(3), which in 0usize..3) {
        let bases: Vec<_> = fixtures().into_iter().filter(|f| f.system.nvars() == 3).collect();
        let f = &bases[which % bases.len()];
        let order = MonomialOrder::grevlex(3);
        let gb = buchberger(&f.system, &order, &BuchbergerConfig::default()).unwrap();
        let once = normal_form(&p, &gb.elements, &order).unwrap();
        prop_assert_eq!(normal_form(&once, &gb.elements, &order).unwrap(), once);
    }
}
