//! Clean-wing aerodynamics without stall.

use super::{AircraftConfig, FlightCondition, PlanarForce, WingParams};
use crate::error::AeroError;
use crate::scalar::Real;

/// Lift, drag and their body-frame resultant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WingForce<F> {
    pub lift: F,
    pub drag: F,
    pub force: PlanarForce<F>,
}

/// Angle of attack of the wing in a flow with speed `v_i` along and `v_perp`
/// across the thrust axis tilted by `delta`. Equals `atan(v_perp / v_i) - delta`.
pub fn wing_alpha<F: Real>(v_perp: F, v_i: F, delta: F) -> Result<F, AeroError> {
    let (sd, cd) = delta.sin_cos();
    let den = v_perp * sd + v_i * cd;
    if !(den > F::zero()) {
        return Err(AeroError::DegenerateFlow(den.as_f64()));
    }
    Ok(((v_perp * cd - v_i * sd) / den).atan())
}

/// Lift and drag coefficients with an optional control surface deflection.
pub fn wing_coefficients<F: Real>(wing: &WingParams<F>, alpha_w: F, delta_s: F) -> (F, F) {
    let cl = wing.cl0 + wing.cl_alpha * alpha_w + wing.cl_ds * delta_s;
    let cd = wing.cd0 + wing.cd_alpha * alpha_w * alpha_w + wing.cd_ds * delta_s;
    (cl, cd)
}

/// Lift and drag at local airspeed `v_w`. Lift acts normal to the local flow,
/// drag along it; both are rotated by `alpha_w` into the body frame, so at
/// zero angle the force is `(-D, L)`.
pub fn wing_forces<F: Real>(rho: F, area: F, cl: F, cd: F, v_w: F, alpha_w: F) -> WingForce<F> {
    let q = F::lit(0.5) * rho * area * v_w * v_w;
    let lift = q * cl;
    let drag = q * cd;
    let (sa, ca) = alpha_w.sin_cos();
    WingForce {
        lift,
        drag,
        force: PlanarForce::new(lift * sa - drag * ca, lift * ca + drag * sa),
    }
}

/// Force on the wing in undisturbed free stream.
pub fn clean_wing_force<F: Real>(
    cond: &FlightCondition<F>,
    cfg: &AircraftConfig<F>,
) -> PlanarForce<F> {
    let (cl, cd) = wing_coefficients(&cfg.wing, cond.alpha_inf, F::zero());
    wing_forces(cond.rho, cfg.wing.area, cl, cd, cond.v_inf, cond.alpha_inf).force
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn alpha_examples() {
        assert_eq!(wing_alpha(0.0, 5.0, 0.0).unwrap(), 0.0);
        assert!((wing_alpha(1.0, 1.0, 0.0).unwrap() - FRAC_PI_4).abs() < 1e-15);
        // zero thrust: v_i equals the parallel component
        for &delta in &[0.0, 0.3, 0.9, 1.5] {
            let cond = FlightCondition::new(12.0, 1.1, 0.12).unwrap();
            let (vp, vn) = super::super::flow_decompose(&cond, delta);
            assert!((wing_alpha::<f64>(vn, vp, delta).unwrap() - 0.12).abs() < 1e-14);
        }
        assert!(matches!(
            wing_alpha(0.0, 0.0, 0.3),
            Err(AeroError::DegenerateFlow(_))
        ));
    }

    #[test]
    fn coefficient_examples() {
        let w = AircraftConfig::<f64>::reference().wing;
        assert_eq!(wing_coefficients(&w, 0.0, 0.0), (w.cl0, w.cd0));
        let (cl, cd) = wing_coefficients(&w, 0.1, 0.0);
        assert!((cl - 0.97).abs() < 1e-14 && (cd - 0.04).abs() < 1e-15);
        let (cl, _) = wing_coefficients(&w, 0.0, 0.05);
        assert!((cl - 0.5).abs() < 1e-15);
    }

    #[test]
    fn force_examples() {
        let f = wing_forces(1.2, 0.75, 0.4, 0.03, 0.0, 0.2);
        assert_eq!(f.force.norm(), 0.0);
        let f = wing_forces(1.0, 2.0, 0.5, 0.0, 10.0, 0.0);
        assert_eq!((f.lift, f.drag), (50.0, 0.0));
        assert_eq!((f.force.fx, f.force.fz), (0.0, 50.0));
        let f = wing_forces(1.0, 2.0, 0.5, 0.1, 10.0, 0.0);
        assert_eq!((f.force.fx, f.force.fz), (-f.drag, f.lift));
    }

    proptest! {
        #[test]
        fn rotation_isometry(cl in -2.0..2.0f64, cd in 0.0..1.0f64, v in 0.0..40.0f64, a in -1.5..1.5f64) {
            let f = wing_forces(1.1, 0.75, cl, cd, v, a);
            let expect = f.lift.hypot(f.drag);
            prop_assert!((f.force.norm() - expect).abs() <= 1e-12 * expect.max(f64::MIN_POSITIVE));
        }
    }
}
