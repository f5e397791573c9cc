//! Actuator-disk propeller model.

use super::FlightCondition;
use crate::error::AeroError;
use crate::scalar::Real;

/// Splits the free stream into components along and across the thrust axis.
pub fn flow_decompose<F: Real>(cond: &FlightCondition<F>, delta: F) -> (F, F) {
    let (sin, cos) = (cond.alpha_inf + delta).sin_cos();
    (cond.v_inf * cos, cond.v_inf * sin)
}

/// Static thrust `c_T rho n^2 D^4` for a rotational speed `n` in rev/s.
pub fn thrust_from_speed<F: Real>(c_t: F, rho: F, n: F, diameter: F) -> F {
    let d2 = diameter * diameter;
    c_t * rho * n * n * d2 * d2
}

/// Fully developed slipstream speed behind the disk.
///
/// For an axial inflow `v_parallel >= 0` this is
/// `sqrt(2 T / (eta_p rho A_p) + v_parallel^2)`. Reverse inflow adds the same
/// momentum increment to `v_parallel`, which keeps `v_i(T = 0) = v_parallel`.
pub fn induced_velocity<F: Real>(
    thrust: F,
    v_parallel: F,
    eta_p: F,
    rho: F,
    area: F,
) -> Result<F, AeroError> {
    let denom = eta_p * rho * area;
    if !(denom > F::zero()) {
        return Err(AeroError::Domain(denom.as_f64()));
    }
    if !(thrust >= F::zero()) {
        return Err(AeroError::Precondition("thrust must be non-negative"));
    }
    let boost = F::lit(2.0) * thrust / denom;
    let developed = (boost + v_parallel * v_parallel).sqrt();
    if v_parallel >= F::zero() {
        Ok(developed)
    } else {
        Ok(v_parallel + (developed + v_parallel))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn decompose_examples() {
        let c = FlightCondition::new(10.0, 1.2, 0.0).unwrap();
        let (p, n) = flow_decompose(&c, 0.0);
        assert_eq!((p, n), (10.0, 0.0));
        let (p, n) = flow_decompose(&c, std::f64::consts::FRAC_PI_2);
        assert!(p.abs() < 1e-15 && (n - 10.0).abs() < 1e-15);
        let c = FlightCondition::new(10.0, 1.2, 0.1).unwrap();
        let (p, n) = flow_decompose(&c, 0.2);
        assert!((p - 10.0 * 0.3f64.cos()).abs() < 1e-14);
        assert!((n - 10.0 * 0.3f64.sin()).abs() < 1e-14);
        assert!((p - 9.5534).abs() < 1e-4 && (n - 2.9552).abs() < 1e-4);
    }

    #[test]
    fn thrust_examples() {
        assert_eq!(thrust_from_speed(0.1, 1.225, 0.0, 0.8), 0.0);
        assert!((thrust_from_speed(0.1f64, 1.225, 50.0, 0.8) - 125.44).abs() < 1e-10);
        assert_eq!(thrust_from_speed(0.0, 1.225, 50.0, 0.8), 0.0);
    }

    #[test]
    fn induced_examples() {
        assert_eq!(induced_velocity(0.0, 7.0, 0.8, 1.2, 0.5).unwrap(), 7.0);
        assert_eq!(induced_velocity(0.0, -7.0, 0.8, 1.2, 0.5).unwrap(), -7.0);
        assert!((induced_velocity(0.5f64, 0.0, 1.0, 1.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((induced_velocity(2.0, 1.0, 1.0, 1.0, 1.0).unwrap() - 5f64.sqrt()).abs() < 1e-15);
        assert!(matches!(
            induced_velocity(1.0, 1.0, 0.0, 1.0, 1.0),
            Err(AeroError::Domain(_))
        ));
        assert!(induced_velocity(-1.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!((induced_velocity(2.0f32, 1.0, 1.0, 1.0, 1.0).unwrap() - 5f32.sqrt()).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn frame_consistency(v in 0.0..60.0f64, a in -1.5..1.5f64, d in 0.0..FRAC_PI_2) {
            let c = FlightCondition::new(v, 1.0, a).unwrap();
            let (p, n) = flow_decompose(&c, d);
            let lhs = p * p + n * n;
            prop_assert!((lhs - v * v).abs() <= 1e-12 * (v * v).max(f64::MIN_POSITIVE));
        }

        #[test]
        fn induced_monotone(t1 in 0.0..400.0f64, t2 in 0.0..400.0f64, vp in -30.0..30.0f64) {
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            let a = induced_velocity(lo, vp, 0.8, 1.0, 0.5).unwrap();
            let b = induced_velocity(hi, vp, 0.8, 1.0, 0.5).unwrap();
            prop_assert!(a <= b);
            prop_assert!(a >= vp);
        }
    }
}
