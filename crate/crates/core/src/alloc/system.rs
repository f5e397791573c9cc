//! The lifted polynomial form of the design model.

use crate::aero::{AircraftConfig, DesignFlags, FlightCondition, PlanarForce};
use crate::error::AllocError;
use crate::poly::{Monomial, PolySystem, Polynomial};
use crate::scalar::Field;

/// Variable names in system order.
pub const VARIABLES: [&str; 5] = ["T", "s", "c", "v", "w"];

pub const VAR_T: usize = 0;
pub const VAR_S: usize = 1;
pub const VAR_C: usize = 2;
pub const VAR_V: usize = 3;
pub const VAR_W: usize = 4;

fn lift<K: Field>(x: f64) -> Result<K, AllocError> {
    K::from_f64(x).ok_or(AllocError::Precondition(
        "parameter has no image in the coefficient field",
    ))
}

struct Builder<K> {
    terms: Vec<(Monomial, K)>,
}

impl<K: Field> Builder<K> {
    fn new() -> Self {
        Builder { terms: Vec::new() }
    }

    fn add(&mut self, e: [u32; 5], c: K) -> &mut Self {
        self.terms.push((Monomial::new(e.to_vec()), c));
        self
    }

    fn build(&mut self) -> Polynomial<K> {
        Polynomial::from_terms(5, std::mem::take(&mut self.terms)).expect("five variables")
    }
}

/// Polynomial system in `(T, s, c, v, w)` whose real roots with `s^2 + c^2 = 1`
/// and `v >= 0` are the inputs `(T, atan2(s, c))` that [`forward_design`]
/// maps to `force`.
///
/// `s, c` stand for the sine and cosine of the tilt angle, `v` for the
/// slipstream speed at the wing and `w` for the linearized wing angle of
/// attack. The square root is cleared by `v^2 = k T + v_parallel^2`, the
/// angle of attack by multiplying out its denominator, and the dynamic
/// pressure `v_perp^2 + v^2` is rewritten with the same identity, which holds
/// exactly on the variety. Every coefficient is the exact image of the `f64`
/// parameters.
///
/// [`forward_design`]: crate::aero::forward_design
pub fn build_system<K: Field>(
    cond: &FlightCondition<f64>,
    force: &PlanarForce<f64>,
    cfg: &AircraftConfig<f64>,
    flags: DesignFlags,
) -> Result<PolySystem<K>, AllocError> {
    if !flags.is_polynomial() {
        return Err(AllocError::Precondition(
            "only the linearized, fully overlapped model is polynomial",
        ));
    }
    if !(cond.v_inf > 0.0) {
        return Err(AllocError::Precondition("v_inf must be positive"));
    }
    cond.validate()?;
    if !force.is_finite() {
        return Err(AllocError::Precondition("requested force must be finite"));
    }
    let wing = &cfg.wing;
    let (sa, ca) = cond.alpha_inf.sin_cos();
    let k: K = lift(cfg.disk_loading_factor(cond.rho))?;
    let h: K = lift(0.5 * cond.rho * wing.area)?;
    let vinf: K = lift(cond.v_inf)?;
    let (sa, ca): (K, K) = (lift(sa)?, lift(ca)?);
    let cd_alpha: K = if flags.omit_cd_alpha {
        K::zero()
    } else {
        lift(wing.cd_alpha)?
    };
    let (cl0, cla, cd0): (K, K, K) = (lift(wing.cl0)?, lift(wing.cl_alpha)?, lift(wing.cd0)?);
    let (fx, fz): (K, K) = (lift(force.fx)?, lift(force.fz)?);
    let one = K::one();

    let v2 = vinf.mul_ref(&vinf);
    // dynamic pressure Q = h V + h k T
    let hv = h.mul_ref(&v2).mul_ref(&(ca.mul_ref(&ca) + sa.mul_ref(&sa)));
    let hk = h.mul_ref(&k);

    let px = Builder::new()
        .add([1, 0, 1, 0, 0], one.clone())
        .add([0, 0, 0, 0, 0], -(hv.mul_ref(&cd0) + fx))
        .add([1, 0, 0, 0, 0], -hk.mul_ref(&cd0))
        .add([0, 0, 0, 0, 2], -hv.mul_ref(&cd_alpha))
        .add([1, 0, 0, 0, 2], -hk.mul_ref(&cd_alpha))
        .build();
    let pz = Builder::new()
        .add([1, 1, 0, 0, 0], one.clone())
        .add([0, 0, 0, 0, 0], hv.mul_ref(&cl0) - fz)
        .add([1, 0, 0, 0, 0], hk.mul_ref(&cl0))
        .add([0, 0, 0, 0, 1], hv.mul_ref(&cla))
        .add([1, 0, 0, 0, 1], hk.mul_ref(&cla))
        .build();
    // w (v_perp s + v c) - (v_perp c - v s), v_perp = v_inf (s ca + c sa)
    let vca = vinf.mul_ref(&ca);
    let vsa = vinf.mul_ref(&sa);
    let pa = Builder::new()
        .add([0, 2, 0, 0, 1], vca.clone())
        .add([0, 1, 1, 0, 1], vsa.clone())
        .add([0, 0, 1, 1, 1], one.clone())
        .add([0, 1, 1, 0, 0], -vca.clone())
        .add([0, 0, 2, 0, 0], -vsa.clone())
        .add([0, 1, 0, 1, 0], one.clone())
        .build();
    // v^2 - k T - v_parallel^2, v_parallel = v_inf (c ca - s sa)
    let two = K::from_i64(2);
    let pv = Builder::new()
        .add([0, 0, 0, 2, 0], one.clone())
        .add([1, 0, 0, 0, 0], -k)
        .add([0, 0, 2, 0, 0], -v2.mul_ref(&ca).mul_ref(&ca))
        .add([0, 1, 1, 0, 0], two.mul_ref(&v2).mul_ref(&ca).mul_ref(&sa))
        .add([0, 2, 0, 0, 0], -v2.mul_ref(&sa).mul_ref(&sa))
        .build();
    let psc = Builder::new()
        .add([0, 2, 0, 0, 0], one.clone())
        .add([0, 0, 2, 0, 0], one.clone())
        .add([0, 0, 0, 0, 0], -one)
        .build();
    Ok(PolySystem::new(
        vec![px, pz, pa, pv, psc],
        VARIABLES.iter().map(|s| s.to_string()).collect(),
    )?)
}

/// The lifted coordinates of an actuator input, for substitution checks.
pub fn lifted_point(
    cond: &FlightCondition<f64>,
    cfg: &AircraftConfig<f64>,
    thrust: f64,
    delta: f64,
) -> [f64; 5] {
    let (s, c) = delta.sin_cos();
    let (v_par, v_perp) = crate::aero::flow_decompose(cond, delta);
    let v = (cfg.disk_loading_factor(cond.rho) * thrust + v_par * v_par).sqrt();
    let w = (v_perp * c - v * s) / (v_perp * s + v * c);
    [thrust, s, c, v, w]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aero::{forward_design, ActuatorInput};
    use crate::scalar::Rational;

    #[test]
    fn shape_and_substitution() {
        let cfg = AircraftConfig::reference();
        let cond = FlightCondition::new(17.0, 1.0, 0.12).unwrap();
        for flags in [
            DesignFlags::default(),
            DesignFlags {
                omit_cd_alpha: false,
                ..DesignFlags::default()
            },
        ] {
            let f = forward_design(&ActuatorInput::new(150.0, 0.3), &cond, &cfg, flags).unwrap();
            let sys = build_system::<f64>(&cond, &f, &cfg, flags).unwrap();
            assert_eq!(sys.polys.len(), 5);
            assert_eq!(sys.nvars(), 5);
            let x = lifted_point(&cond, &cfg, 150.0, 0.3);
            for p in &sys.polys {
                assert!(
                    p.eval_f64(&x).abs() <= 1e-9 * (1.0 + p.coeff_norm1()),
                    "{}",
                    p.eval_f64(&x)
                );
            }
        }
    }

    #[test]
    fn exact_and_float_share_support() {
        let cfg = AircraftConfig::reference();
        let cond = FlightCondition::new(16.0, 0.9, 0.1).unwrap();
        let f = PlanarForce::new(60.0, 100.0);
        let q = build_system::<Rational>(&cond, &f, &cfg, DesignFlags::default()).unwrap();
        let x = build_system::<f64>(&cond, &f, &cfg, DesignFlags::default()).unwrap();
        let qf = q.to_f64();
        for (a, b) in qf.polys.iter().zip(&x.polys) {
            assert_eq!(a.len(), b.len());
            for ((ma, ca), (mb, cb)) in a.terms().zip(b.terms()) {
                assert_eq!(ma, mb);
                assert!((ca - cb).abs() <= 1e-14 * ca.abs());
            }
        }
    }

    #[test]
    fn preconditions() {
        let cfg = AircraftConfig::reference();
        let f = PlanarForce::new(60.0, 100.0);
        let still = FlightCondition::new(0.0, 1.0, 0.0).unwrap();
        assert!(build_system::<f64>(&still, &f, &cfg, DesignFlags::default()).is_err());
        let cond = FlightCondition::new(15.0, 1.0, 0.1).unwrap();
        assert!(build_system::<f64>(&cond, &f, &cfg, DesignFlags::NONE).is_err());
    }
}
