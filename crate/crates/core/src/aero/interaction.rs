//! Slipstream over the wing and the composed forward maps.

use serde::{Deserialize, Serialize};

use super::{
    flow_decompose, induced_velocity, wing_alpha, wing_coefficients, wing_forces, ActuatorInput,
    AircraftConfig, FlightCondition, LocalFlow, MountingGeometry, PlanarForce, PropellerParams,
    WingParams,
};
use crate::error::AeroError;
use crate::scalar::Real;

/// Slipstream geometry at the wing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Overlap<F> {
    pub v_iw: F,
    pub kappa: F,
    pub x_w: F,
    pub r_local: F,
}

/// Speed of the partially developed slipstream at the wing, blended with the
/// free stream by the fraction of chord it covers.
///
/// The contracted radius takes one fixed-point pass seeded with the
/// developed-wake speed `f_w v_i + (1 - f_w) v_parallel`.
pub fn overlap_blend<F: Real>(
    geom: &MountingGeometry<F>,
    wing: &WingParams<F>,
    prop: &PropellerParams<F>,
    delta: F,
    v_i: F,
    v_ip: F,
    v_parallel: F,
) -> Result<Overlap<F>, AeroError> {
    let cos = delta.cos();
    if !(cos > F::zero()) {
        return Err(AeroError::SingularGeometry(cos.as_f64()));
    }
    let wake = geom.f_w * v_i + (F::one() - geom.f_w) * v_parallel;
    let r_p = prop.radius();
    let r_local = if wake > F::zero() && v_ip > F::zero() {
        r_p * (v_ip / wake).sqrt()
    } else {
        r_p
    };
    let x_w = r_local / cos;
    let kappa = ((x_w - geom.x_p) / wing.chord).max(F::zero()).min(F::one());
    let v_iw = kappa * wake + (F::one() - kappa) * v_parallel;
    Ok(Overlap {
        v_iw,
        kappa,
        x_w,
        r_local,
    })
}

/// Every flow quantity of the full model at one operating point.
pub fn local_flow<F: Real>(
    input: &ActuatorInput<F>,
    cond: &FlightCondition<F>,
    cfg: &AircraftConfig<F>,
) -> Result<LocalFlow<F>, AeroError> {
    let prop = &cfg.propeller;
    let delta = input.delta;
    let (v_parallel, v_perp) = flow_decompose(cond, delta);
    let v_i = induced_velocity(
        input.thrust,
        v_parallel,
        prop.efficiency,
        cond.rho,
        prop.area,
    )?;
    let v_ip = F::lit(0.5) * (v_i + v_parallel);
    let ov = overlap_blend(&cfg.mounting, &cfg.wing, prop, delta, v_i, v_ip, v_parallel)?;
    let still = ov.v_iw.is_zero() && v_perp.is_zero();
    let alpha_w = if still {
        F::zero()
    } else {
        wing_alpha(v_perp, ov.v_iw, delta)?
    };
    Ok(LocalFlow {
        v_parallel,
        v_perp,
        v_i,
        v_ip,
        v_iw: ov.v_iw,
        alpha_w,
        kappa: ov.kappa,
        x_w: ov.x_w,
        r_local: ov.r_local,
    })
}

/// Thrust plus the wing force in the local slipstream.
pub fn forward_full<F: Real>(
    input: &ActuatorInput<F>,
    cond: &FlightCondition<F>,
    cfg: &AircraftConfig<F>,
) -> Result<PlanarForce<F>, AeroError> {
    let flow = local_flow(input, cond, cfg)?;
    let (cl, cd) = wing_coefficients(&cfg.wing, flow.alpha_w, F::zero());
    let wing = wing_forces(
        cond.rho,
        cfg.wing.area,
        cl,
        cd,
        flow.airspeed_sq().sqrt(),
        flow.alpha_w,
    );
    Ok(wing.force + thrust_vector(input))
}

fn thrust_vector<F: Real>(input: &ActuatorInput<F>) -> PlanarForce<F> {
    let (s, c) = input.delta.sin_cos();
    PlanarForce::new(input.thrust * c, input.thrust * s)
}

/// Simplifications applied by [`forward_design`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignFlags {
    /// Replace `atan(x)` by `x` in the wing angle of attack.
    pub linearize_arctan: bool,
    /// Drop the quadratic drag term.
    pub omit_cd_alpha: bool,
    /// Assume the developed slipstream covers the whole chord.
    pub full_overlap: bool,
}

impl Default for DesignFlags {
    fn default() -> Self {
        DesignFlags {
            linearize_arctan: true,
            omit_cd_alpha: true,
            full_overlap: true,
        }
    }
}

impl DesignFlags {
    pub const NONE: DesignFlags = DesignFlags {
        linearize_arctan: false,
        omit_cd_alpha: false,
        full_overlap: false,
    };

    /// The simplifications the polynomial lifting supports exactly.
    pub fn is_polynomial(&self) -> bool {
        self.linearize_arctan && self.full_overlap
    }
}

/// The simplified forward map inverted by the allocator.
///
/// The wing sees dynamic pressure `rho A_w (v_inf^2 + 2T/(eta_p rho A_p)) / 2`
/// and its lift and drag act along body `z` and `-x` without rotation. With
/// `full_overlap` the slipstream speed at the wing is the developed speed
/// `v_i`; otherwise it comes from [`overlap_blend`].
pub fn forward_design<F: Real>(
    input: &ActuatorInput<F>,
    cond: &FlightCondition<F>,
    cfg: &AircraftConfig<F>,
    flags: DesignFlags,
) -> Result<PlanarForce<F>, AeroError> {
    if !(cond.v_inf > F::zero()) {
        return Err(AeroError::Precondition("design model requires v_inf > 0"));
    }
    if !(input.thrust >= F::zero()) {
        return Err(AeroError::Precondition("thrust must be non-negative"));
    }
    let prop = &cfg.propeller;
    let wing = &cfg.wing;
    let delta = input.delta;
    let (sd, cdl) = delta.sin_cos();
    let (v_parallel, v_perp) = flow_decompose(cond, delta);
    let k = cfg.disk_loading_factor(cond.rho);
    let v_i = (k * input.thrust + v_parallel * v_parallel).sqrt();
    let v_w = if flags.full_overlap {
        v_i
    } else {
        let v_i = induced_velocity(
            input.thrust,
            v_parallel,
            prop.efficiency,
            cond.rho,
            prop.area,
        )?;
        let v_ip = F::lit(0.5) * (v_i + v_parallel);
        overlap_blend(&cfg.mounting, wing, prop, delta, v_i, v_ip, v_parallel)?.v_iw
    };
    let den = v_perp * sd + v_w * cdl;
    if !(den > F::zero()) {
        return Err(AeroError::DegenerateFlow(den.as_f64()));
    }
    let ratio = (v_perp * cdl - v_w * sd) / den;
    let alpha_w = if flags.linearize_arctan {
        ratio
    } else {
        ratio.atan()
    };
    let q = F::lit(0.5) * cond.rho * wing.area * (v_perp * v_perp + v_w * v_w);
    let cd_alpha = if flags.omit_cd_alpha {
        F::zero()
    } else {
        wing.cd_alpha
    };
    let cl = wing.cl0 + wing.cl_alpha * alpha_w;
    let cd = wing.cd0 + cd_alpha * alpha_w * alpha_w;
    Ok(PlanarForce::new(-q * cd, q * cl) + thrust_vector(input))
}

#[cfg(test)]
mod tests {
    use super::super::clean_wing_force;
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn cfg() -> AircraftConfig<f64> {
        AircraftConfig::reference()
    }

    #[test]
    fn blend_examples() {
        let c = cfg();
        // uniform flow: no thrust
        let ov = overlap_blend(&c.mounting, &c.wing, &c.propeller, 0.4, 9.0, 9.0, 9.0).unwrap();
        assert_eq!(ov.v_iw, 9.0);
        let ov = overlap_blend(&c.mounting, &c.wing, &c.propeller, 0.4, 14.0, 11.0, 8.0).unwrap();
        assert_eq!(ov.kappa, 1.0);
        assert_eq!(ov.v_iw, 14.0);
        let mut m = c.mounting;
        m.f_w = 0.5;
        let ov = overlap_blend(&m, &c.wing, &c.propeller, 0.0, 10.0, 8.0, 6.0).unwrap();
        assert_eq!(ov.kappa, 1.0);
        assert_eq!(ov.v_iw, 8.0);
        m.x_p = 1.0;
        let ov = overlap_blend(&m, &c.wing, &c.propeller, 0.0, 10.0, 8.0, 6.0).unwrap();
        assert_eq!((ov.kappa, ov.v_iw), (0.0, 6.0));
        assert!(matches!(
            overlap_blend(&m, &c.wing, &c.propeller, 1.6, 10.0, 8.0, 6.0),
            Err(AeroError::SingularGeometry(_))
        ));
    }

    #[test]
    fn kappa_continuity() {
        let mut c = cfg();
        c.mounting = MountingGeometry {
            x_p: 0.45,
            f_w: 0.7,
        };
        c.wing.chord = 0.3;
        let cond = FlightCondition::new(6.0, 1.2, 0.1).unwrap();
        let n = 20_000;
        let mut prev: Option<(f64, f64)> = None;
        let (mut saw_zero, mut saw_one) = (false, false);
        for i in 0..=n {
            let delta = 1.5 * i as f64 / n as f64;
            let flow = local_flow(&ActuatorInput::new(120.0, delta), &cond, &c).unwrap();
            saw_zero |= flow.kappa == 0.0;
            saw_one |= flow.kappa == 1.0;
            if let Some((_, v)) = prev {
                assert!((flow.v_iw - v).abs() < 5e-3, "jump at delta {delta}");
            }
            prev = Some((flow.kappa, flow.v_iw));
        }
        assert!(saw_zero && saw_one);
    }

    #[test]
    fn zero_thrust_is_clean_wing() {
        let c = cfg();
        for &(v, a) in &[(15.0, 0.1), (4.0, -0.2), (25.0, 0.3)] {
            let cond = FlightCondition::new(v, 1.0, a).unwrap();
            let clean = clean_wing_force(&cond, &c);
            for i in 0..=20 {
                let delta = FRAC_PI_2 * i as f64 / 20.0;
                let f = forward_full(&ActuatorInput::new(0.0, delta), &cond, &c).unwrap();
                assert!((f - clean).norm() <= 1e-12, "{f:?} vs {clean:?}");
                let flow = local_flow(&ActuatorInput::new(0.0, delta), &cond, &c).unwrap();
                assert!((flow.alpha_w - a).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn still_air_hover() {
        let mut c = cfg();
        c.mounting.f_w = 0.0;
        let cond = FlightCondition::new(0.0, 1.225, 0.0).unwrap();
        let f = forward_full(&ActuatorInput::new(250.0, FRAC_PI_2), &cond, &c).unwrap();
        assert!(f.fx.abs() < 1e-12 && (f.fz - 250.0).abs() < 1e-12);
    }

    #[test]
    fn full_regression_fixture() {
        let cond = FlightCondition::new(15.0, 1.225, 5f64.to_radians()).unwrap();
        let f = forward_full(&ActuatorInput::new(200.0, 0.2), &cond, &cfg()).unwrap();
        let flow = local_flow(&ActuatorInput::new(200.0, 0.2), &cond, &cfg()).unwrap();
        assert_eq!(flow.kappa, 1.0);
        assert!((f.fx - 179.114_570_776_066_87).abs() < 1e-9, "{}", f.fx);
        assert!((f.fz - 45.494_585_402_810_46).abs() < 1e-9, "{}", f.fz);
    }

    #[test]
    fn design_zero_thrust_collapse() {
        let c = cfg();
        let cond = FlightCondition::new(12.0, 1.1, 0.0).unwrap();
        let f = forward_design(
            &ActuatorInput::new(0.0, 0.0),
            &cond,
            &c,
            DesignFlags::default(),
        )
        .unwrap();
        let q = 0.5 * 1.1 * 144.0 * c.wing.area;
        assert!((f.fx + q * c.wing.cd0).abs() < 1e-12);
        assert!((f.fz - q * c.wing.cl0).abs() < 1e-12);
        let still = FlightCondition::new(0.0, 1.1, 0.0).unwrap();
        assert!(forward_design(
            &ActuatorInput::new(10.0, 0.0),
            &still,
            &c,
            DesignFlags::default()
        )
        .is_err());
    }

    #[test]
    fn design_without_flags_is_unrotated_full() {
        let c = cfg();
        let cond = FlightCondition::new(17.0, 0.9, 0.12).unwrap();
        for &(t, d) in &[(30.0, 0.1), (150.0, 0.6), (320.0, 1.2)] {
            let input = ActuatorInput::new(t, d);
            let design = forward_design(&input, &cond, &c, DesignFlags::NONE).unwrap();
            let flow = local_flow(&input, &cond, &c).unwrap();
            assert_eq!(flow.kappa, 1.0);
            let full = forward_full(&input, &cond, &c).unwrap();
            // full = thrust + R(alpha_w) * (design wing force)
            let (sa, ca) = flow.alpha_w.sin_cos();
            let thrust = PlanarForce::new(t * d.cos(), t * d.sin());
            let w = design - thrust;
            let rotated = PlanarForce::new(w.fx * ca + w.fz * sa, w.fz * ca - w.fx * sa) + thrust;
            assert!(
                (rotated - full).norm() < 1e-10 * full.norm(),
                "{rotated:?} vs {full:?}"
            );
        }
    }

    proptest! {
        #[test]
        fn aoa_reduction(t in 0.1..400.0f64, d in 0.0..1.2f64, a in 0.01..0.35f64, v in 1.0..30.0f64) {
            let c = cfg();
            let cond = FlightCondition::new(v, 1.0, a).unwrap();
            let flow = local_flow(&ActuatorInput::new(t, d), &cond, &c).unwrap();
            prop_assert!(flow.alpha_w <= a);
        }

        #[test]
        fn local_flow_invariants(t in 0.0..400.0f64, d in 0.0..FRAC_PI_2, a in -0.5..0.5f64, v in 0.0..30.0f64) {
            let c = cfg();
            let cond = FlightCondition::new(v, 1.0, a).unwrap();
            let flow = local_flow(&ActuatorInput::new(t, d), &cond, &c).unwrap();
            prop_assert!(flow.v_i >= flow.v_parallel);
            prop_assert!((flow.v_ip - 0.5 * (flow.v_i + flow.v_parallel)).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&flow.kappa));
            let lhs = flow.v_parallel.powi(2) + flow.v_perp.powi(2);
            prop_assert!((lhs - v * v).abs() <= 1e-9 * (v * v).max(1e-300));
        }
    }
}
