//! Wrench allocation at the centre of gravity: control surfaces take a
//! speed-dependent share of the moments, propellers the remainder.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::aero::{wing_coefficients, PlanarForce, WingParams};
use crate::error::AllocError;

/// Moments and planar forces at the centre of gravity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct CGWrench {
    pub M_x: f64,
    pub M_y: f64,
    pub M_z: f64,
    pub F_x: f64,
    pub F_z: f64,
}

impl CGWrench {
    pub fn new(m: [f64; 3], f: [f64; 2]) -> Self {
        CGWrench {
            M_x: m[0],
            M_y: m[1],
            M_z: m[2],
            F_x: f[0],
            F_z: f[1],
        }
    }

    pub fn moments(&self) -> Vector3<f64> {
        Vector3::new(self.M_x, self.M_y, self.M_z)
    }

    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_row_slice(&[self.M_x, self.M_y, self.M_z, self.F_x, self.F_z])
    }

    pub fn from_vector(v: &DVector<f64>) -> Self {
        CGWrench::new([v[0], v[1], v[2]], [v[3], v[4]])
    }

    pub fn is_finite(&self) -> bool {
        [self.M_x, self.M_y, self.M_z, self.F_x, self.F_z]
            .iter()
            .all(|x| x.is_finite())
    }
}

/// Aileron, elevator and rudder effectiveness. `C_A(q) = q * slopes` maps
/// deflections (rad) to roll, pitch and yaw moments.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceModel {
    pub slopes: [[f64; 3]; 3],
    /// Symmetric deflection limits, rad.
    pub max_deflection: [f64; 3],
}

impl SurfaceModel {
    pub fn diagonal(cl_a: f64, cm_e: f64, cn_r: f64, max_deflection: [f64; 3]) -> Self {
        SurfaceModel {
            slopes: [[cl_a, 0.0, 0.0], [0.0, cm_e, 0.0], [0.0, 0.0, cn_r]],
            max_deflection,
        }
    }

    pub fn effectiveness(&self, q: f64) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.slopes[i][j] * q)
    }
}

/// `clamp(q / q_ref, 0, 1)`: share of the moment request given to the
/// control surfaces.
pub fn phi(q: f64, q_ref: f64) -> f64 {
    if q_ref > 0.0 {
        (q / q_ref).clamp(0.0, 1.0)
    } else {
        1.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SurfaceAllocation {
    /// Aileron, elevator, rudder, rad.
    pub deflections: [f64; 3],
    pub clamped: [bool; 3],
    /// `C_A(q)` times the applied deflections.
    pub realized: [f64; 3],
    /// Extra lift and drag from the elevator deflection at the given wing
    /// angle of attack, N.
    pub delta_lift: f64,
    pub delta_drag: f64,
}

/// Deflections realizing `phi * M_r`, clamped to the surface limits.
///
/// `alpha_w` and `wing` give the lift and drag increments through the
/// deflection-dependent wing coefficients; `q` is the dynamic pressure.
pub fn allocate_surfaces(
    moments: [f64; 3],
    q: f64,
    surf: &SurfaceModel,
    phi: f64,
    wing: &WingParams<f64>,
    alpha_w: f64,
) -> Result<SurfaceAllocation, AllocError> {
    if !(0.0..=1.0).contains(&phi) {
        return Err(AllocError::Precondition("phi must lie in [0, 1]"));
    }
    let mut d = Vector3::zeros();
    if phi > 0.0 {
        let c = surf.effectiveness(q);
        let inv = c
            .try_inverse()
            .filter(|m| m.iter().all(|x| x.is_finite()))
            .ok_or(AllocError::SingularSurfaces(q))?;
        d = inv * (Vector3::from(moments) * phi);
    }
    let mut clamped = [false; 3];
    for i in 0..3 {
        let lim = surf.max_deflection[i];
        if d[i].abs() > lim {
            d[i] = d[i].clamp(-lim, lim);
            clamped[i] = true;
        }
    }
    let realized = surf.effectiveness(q) * d;
    let (cl0, cd0) = wing_coefficients(wing, alpha_w, 0.0);
    let (cl1, cd1) = wing_coefficients(wing, alpha_w, d[1]);
    Ok(SurfaceAllocation {
        deflections: [d[0], d[1], d[2]],
        clamped,
        realized: [realized[0], realized[1], realized[2]],
        delta_lift: q * wing.area * (cl1 - cl0),
        delta_drag: q * wing.area * (cd1 - cd0),
    })
}

/// Propeller positions relative to the centre of gravity and their thrust
/// limits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropellerLayout {
    /// `(L_x, L_y, L_z)` per propeller, m.
    pub arms: Vec<[f64; 3]>,
    /// Maximum force per propeller, N.
    pub f_max: Vec<f64>,
}

impl PropellerLayout {
    pub fn validate(&self) -> Result<(), AllocError> {
        if self.arms.is_empty() {
            return Err(AllocError::Precondition(
                "layout needs at least one propeller",
            ));
        }
        if self.arms.len() != self.f_max.len() {
            return Err(AllocError::Dimension(format!(
                "{} arms, {} force limits",
                self.arms.len(),
                self.f_max.len()
            )));
        }
        if !self.arms.iter().flatten().all(|x| x.is_finite()) {
            return Err(AllocError::Precondition("arms must be finite"));
        }
        if !self.f_max.iter().all(|f| f.is_finite() && *f > 0.0) {
            return Err(AllocError::Precondition("force limits must be positive"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.arms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arms.is_empty()
    }

    /// The 5 x 2n map from stacked `(F_x, F_z)` to the CG wrench.
    pub fn matrix(&self) -> DMatrix<f64> {
        let mut l = DMatrix::zeros(5, 2 * self.len());
        for (i, &[lx, ly, lz]) in self.arms.iter().enumerate() {
            let c = 2 * i;
            l[(0, c + 1)] = ly;
            l[(1, c)] = lz;
            l[(1, c + 1)] = lx;
            l[(2, c)] = ly;
            l[(3, c)] = 1.0;
            l[(4, c + 1)] = 1.0;
        }
        l
    }

    /// Moore-Penrose inverse of [`PropellerLayout::matrix`] computed on
    /// forces normalized by `f_max`.
    pub fn pseudo_inverse(&self) -> (DMatrix<f64>, usize) {
        let scale = DMatrix::from_diagonal(&DVector::from_iterator(
            2 * self.len(),
            self.f_max.iter().flat_map(|&f| [f, f]),
        ));
        let scaled = self.matrix() * &scale;
        let svd = scaled.clone().svd(true, true);
        let tol = 1e-12 * svd.singular_values.max().max(1.0);
        let rank = svd.rank(tol);
        let pinv = svd.pseudo_inverse(tol).expect("both factors computed");
        (scale * pinv, rank)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WrenchDistribution {
    pub forces: Vec<PlanarForce<f64>>,
    pub rank: usize,
    /// `rank == 5`: every wrench is realizable.
    pub full_rank: bool,
    /// `|L F - w|`.
    pub residual: f64,
}

/// Per-propeller forces realizing `w` with minimal norm of `F / F_max`.
pub fn distribute_wrench(
    w: &CGWrench,
    layout: &PropellerLayout,
) -> Result<WrenchDistribution, AllocError> {
    layout.validate()?;
    if !w.is_finite() {
        return Err(AllocError::Precondition("wrench must be finite"));
    }
    let (pinv, rank) = layout.pseudo_inverse();
    let target = w.to_vector();
    let f = &pinv * &target;
    let residual = (layout.matrix() * &f - target).norm();
    let forces = (0..layout.len())
        .map(|i| PlanarForce::new(f[2 * i], f[2 * i + 1]))
        .collect();
    Ok(WrenchDistribution {
        forces,
        rank,
        full_rank: rank == 5,
        residual,
    })
}

/// Offset and gain errors of surface and propeller allocation.
#[derive(Clone, Debug, PartialEq)]
pub struct UncertaintyModel {
    /// 5-vector offset of the surface channel.
    pub eps0_a: DVector<f64>,
    /// 5 x 5 relative gain error of the surface channel.
    pub eps1_a: DMatrix<f64>,
    /// 5-vector offset of the propeller channel.
    pub eps0_p: DVector<f64>,
    /// 2n x 2n relative gain error of the propeller forces.
    pub eps1_p: DMatrix<f64>,
}

impl UncertaintyModel {
    pub fn zero(n_props: usize) -> Self {
        UncertaintyModel {
            eps0_a: DVector::zeros(5),
            eps1_a: DMatrix::zeros(5, 5),
            eps0_p: DVector::zeros(5),
            eps1_p: DMatrix::zeros(2 * n_props, 2 * n_props),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CombinedUncertainty {
    pub eps0: DVector<f64>,
    pub eps1: DMatrix<f64>,
    /// `I + eps1` is weakly diagonally dominant by rows.
    pub decoupled: bool,
}

/// `|a_ii| >= sum_{j != i} |a_ij|` for every row.
pub fn diagonally_dominant(a: &DMatrix<f64>) -> bool {
    (0..a.nrows()).all(|i| {
        let off: f64 = (0..a.ncols())
            .filter(|&j| j != i)
            .map(|j| a[(i, j)].abs())
            .sum();
        a[(i, i)].abs() >= off
    })
}

/// Affine uncertainty of the combined allocation. The surface effectiveness
/// acts on the moments only and is embedded as `diag(C_A, I)`.
pub fn combine_uncertainty(
    u: &UncertaintyModel,
    phi: f64,
    c_a: &Matrix3<f64>,
    layout: &PropellerLayout,
) -> Result<CombinedUncertainty, AllocError> {
    layout.validate()?;
    let n2 = 2 * layout.len();
    let dims_ok = u.eps0_a.len() == 5
        && u.eps0_p.len() == 5
        && u.eps1_a.shape() == (5, 5)
        && u.eps1_p.shape() == (n2, n2);
    if !dims_ok {
        return Err(AllocError::Dimension(format!(
            "uncertainty model does not match a {}-propeller layout",
            layout.len()
        )));
    }
    let c_inv = c_a
        .try_inverse()
        .ok_or(AllocError::SingularSurfaces(c_a.determinant()))?;
    let mut c = DMatrix::identity(5, 5);
    let mut ci = DMatrix::identity(5, 5);
    c.view_mut((0, 0), (3, 3)).copy_from(c_a);
    ci.view_mut((0, 0), (3, 3)).copy_from(&c_inv);
    let psi = 1.0 - phi;
    let (pinv, _) = layout.pseudo_inverse();
    let eps0 = &u.eps0_a * phi + &u.eps0_p * psi;
    let eps1 = (&c * &u.eps1_a * &ci) * phi + (layout.matrix() * &u.eps1_p * pinv) * psi;
    let a = DMatrix::identity(5, 5) + &eps1;
    Ok(CombinedUncertainty {
        eps0,
        decoupled: diagonally_dominant(&a),
        eps1,
    })
}
