//! Built-in analytic charts.
//!
//! Parameter orders are chosen so that r_s x r_t points into the enclosed
//! body on every chart (see the module docs); spheres and ellipsoids use
//! (longitude, colatitude), tori use (tube angle, axis angle).

use super::{ChartMap, SurfaceChart, Vec3};
use crate::error::{Error, Result};
use std::f64::consts::PI;
use std::sync::Arc;

struct SphereMap {
    rho: f64,
}

impl ChartMap for SphereMap {
    fn position(&self, phi: f64, theta: f64) -> Vec3 {
        let (sp, cp) = phi.sin_cos();
        let (st, ct) = theta.sin_cos();
        self.rho * Vec3::new(st * cp, st * sp, ct)
    }

    fn first_derivs(&self, phi: f64, theta: f64) -> Option<(Vec3, Vec3)> {
        let (sp, cp) = phi.sin_cos();
        let (st, ct) = theta.sin_cos();
        let r_phi = self.rho * Vec3::new(-st * sp, st * cp, 0.0);
        let r_theta = self.rho * Vec3::new(ct * cp, ct * sp, -st);
        Some((r_phi, r_theta))
    }

    fn second_derivs(&self, phi: f64, theta: f64) -> Option<(Vec3, Vec3, Vec3)> {
        let (sp, cp) = phi.sin_cos();
        let (st, ct) = theta.sin_cos();
        let r_pp = self.rho * Vec3::new(-st * cp, -st * sp, 0.0);
        let r_pt = self.rho * Vec3::new(-ct * sp, ct * cp, 0.0);
        let r_tt = self.rho * Vec3::new(-st * cp, -st * sp, -ct);
        Some((r_pp, r_pt, r_tt))
    }
}

/// Round sphere of radius `rho` centered at the origin.
pub fn sphere(rho: f64) -> Result<SurfaceChart> {
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sphere radius must be positive, got {rho}"
        )));
    }
    Ok(SurfaceChart::new(
        format!("sphere(rho={rho})"),
        (0.0, 2.0 * PI),
        (0.0, PI),
        true,
        false,
        0,
        Arc::new(SphereMap { rho }),
    ))
}

struct EllipsoidMap {
    a: f64,
    b: f64,
    c: f64,
}

impl ChartMap for EllipsoidMap {
    fn position(&self, phi: f64, theta: f64) -> Vec3 {
        let (sp, cp) = phi.sin_cos();
        let (st, ct) = theta.sin_cos();
        Vec3::new(self.a * st * cp, self.b * st * sp, self.c * ct)
    }

    fn first_derivs(&self, phi: f64, theta: f64) -> Option<(Vec3, Vec3)> {
        let (sp, cp) = phi.sin_cos();
        let (st, ct) = theta.sin_cos();
        let r_phi = Vec3::new(-self.a * st * sp, self.b * st * cp, 0.0);
        let r_theta = Vec3::new(self.a * ct * cp, self.b * ct * sp, -self.c * st);
        Some((r_phi, r_theta))
    }

    fn second_derivs(&self, phi: f64, theta: f64) -> Option<(Vec3, Vec3, Vec3)> {
        let (sp, cp) = phi.sin_cos();
        let (st, ct) = theta.sin_cos();
        let r_pp = Vec3::new(-self.a * st * cp, -self.b * st * sp, 0.0);
        let r_pt = Vec3::new(-self.a * ct * sp, self.b * ct * cp, 0.0);
        let r_tt = Vec3::new(-self.a * st * cp, -self.b * st * sp, -self.c * ct);
        Some((r_pp, r_pt, r_tt))
    }
}

/// Axis-aligned ellipsoid with semi-axes (a, b, c).
pub fn ellipsoid(a: f64, b: f64, c: f64) -> Result<SurfaceChart> {
    if !(a > 0.0 && b > 0.0 && c > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "ellipsoid semi-axes must be positive, got ({a}, {b}, {c})"
        )));
    }
    Ok(SurfaceChart::new(
        format!("ellipsoid(a={a},b={b},c={c})"),
        (0.0, 2.0 * PI),
        (0.0, PI),
        true,
        false,
        0,
        Arc::new(EllipsoidMap { a, b, c }),
    ))
}

struct TorusMap {
    big_r: f64,
    small_r: f64,
}

impl ChartMap for TorusMap {
    fn position(&self, u: f64, v: f64) -> Vec3 {
        let (su, cu) = u.sin_cos();
        let (sv, cv) = v.sin_cos();
        let rad = self.big_r + self.small_r * cu;
        Vec3::new(rad * cv, rad * sv, self.small_r * su)
    }

    fn first_derivs(&self, u: f64, v: f64) -> Option<(Vec3, Vec3)> {
        let (su, cu) = u.sin_cos();
        let (sv, cv) = v.sin_cos();
        let rad = self.big_r + self.small_r * cu;
        let r_u = Vec3::new(-self.small_r * su * cv, -self.small_r * su * sv, self.small_r * cu);
        let r_v = Vec3::new(-rad * sv, rad * cv, 0.0);
        Some((r_u, r_v))
    }

    fn second_derivs(&self, u: f64, v: f64) -> Option<(Vec3, Vec3, Vec3)> {
        let (su, cu) = u.sin_cos();
        let (sv, cv) = v.sin_cos();
        let rad = self.big_r + self.small_r * cu;
        let r_uu = Vec3::new(-self.small_r * cu * cv, -self.small_r * cu * sv, -self.small_r * su);
        let r_uv = Vec3::new(self.small_r * su * sv, -self.small_r * su * cv, 0.0);
        let r_vv = Vec3::new(-rad * cv, -rad * sv, 0.0);
        Some((r_uu, r_uv, r_vv))
    }
}

/// Torus of revolution: generating circle of radius `small_r`, center at
/// distance `big_r` from the axis. Requires `big_r > small_r`.
pub fn torus(big_r: f64, small_r: f64) -> Result<SurfaceChart> {
    if !(small_r > 0.0 && big_r > small_r) {
        return Err(Error::InvalidParameter(format!(
            "torus needs R > r > 0, got (R={big_r}, r={small_r})"
        )));
    }
    Ok(SurfaceChart::new(
        format!("torus(R={big_r},r={small_r})"),
        (0.0, 2.0 * PI),
        (0.0, 2.0 * PI),
        true,
        true,
        1,
        Arc::new(TorusMap { big_r, small_r }),
    ))
}

/// The Willmore-minimizing torus of revolution: R = sqrt(2), r = 1.
pub fn clifford_torus() -> SurfaceChart {
    let mut chart = torus(2.0_f64.sqrt(), 1.0).expect("valid radii");
    chart.name = "clifford_torus".to_string();
    chart
}

struct StereographicSphereMap;

// Unit sphere through stereographic projection from the north pole; the
// parametrization is exactly conformal (E = G = 4/(1+s^2+t^2)^2, F = 0).
impl ChartMap for StereographicSphereMap {
    fn position(&self, s: f64, t: f64) -> Vec3 {
        let d = 1.0 + s * s + t * t;
        Vec3::new(2.0 * s / d, 2.0 * t / d, (d - 2.0) / d)
    }

    fn first_derivs(&self, s: f64, t: f64) -> Option<(Vec3, Vec3)> {
        let d = 1.0 + s * s + t * t;
        let d2 = d * d;
        let r_s = Vec3::new(
            2.0 * (1.0 + t * t - s * s) / d2,
            -4.0 * s * t / d2,
            4.0 * s / d2,
        );
        let r_t = Vec3::new(
            -4.0 * s * t / d2,
            2.0 * (1.0 + s * s - t * t) / d2,
            4.0 * t / d2,
        );
        Some((r_s, r_t))
    }

    fn second_derivs(&self, s: f64, t: f64) -> Option<(Vec3, Vec3, Vec3)> {
        let d = 1.0 + s * s + t * t;
        let d3 = d * d * d;
        let r_ss = Vec3::new(
            -4.0 * s * (3.0 + 3.0 * t * t - s * s) / d3,
            -4.0 * t * (1.0 + t * t - 3.0 * s * s) / d3,
            4.0 * (1.0 + t * t - 3.0 * s * s) / d3,
        );
        let r_st = Vec3::new(
            4.0 * t * (3.0 * s * s - t * t - 1.0) / d3,
            4.0 * s * (3.0 * t * t - s * s - 1.0) / d3,
            -16.0 * s * t / d3,
        );
        let r_tt = Vec3::new(
            -4.0 * s * (1.0 + s * s - 3.0 * t * t) / d3,
            -4.0 * t * (3.0 + 3.0 * s * s - t * t) / d3,
            4.0 * (1.0 + s * s - 3.0 * t * t) / d3,
        );
        Some((r_ss, r_st, r_tt))
    }
}

/// Conformal chart of the unit sphere (stereographic projection). Covers the
/// sphere minus the north pole; meant for pointwise symbol checks, not for
/// global quadrature.
pub fn stereographic_sphere() -> SurfaceChart {
    SurfaceChart::new(
        "stereographic_sphere",
        (-4.0, 4.0),
        (-4.0, 4.0),
        false,
        false,
        0,
        Arc::new(StereographicSphereMap),
    )
}

struct RigidMotionMap {
    inner: Arc<dyn ChartMap>,
    rotation: nalgebra::Matrix3<f64>,
    shift: Vec3,
}

impl ChartMap for RigidMotionMap {
    fn position(&self, s: f64, t: f64) -> Vec3 {
        self.rotation * self.inner.position(s, t) + self.shift
    }

    fn first_derivs(&self, s: f64, t: f64) -> Option<(Vec3, Vec3)> {
        let (rs, rt) = self.inner.first_derivs(s, t)?;
        Some((self.rotation * rs, self.rotation * rt))
    }

    fn second_derivs(&self, s: f64, t: f64) -> Option<(Vec3, Vec3, Vec3)> {
        let (rss, rst, rtt) = self.inner.second_derivs(s, t)?;
        Some((self.rotation * rss, self.rotation * rst, self.rotation * rtt))
    }
}

/// Chart moved by a proper rigid motion x -> R x + b.
pub fn rigid_motion(
    chart: &SurfaceChart,
    rotation: nalgebra::Matrix3<f64>,
    shift: Vec3,
) -> Result<SurfaceChart> {
    let det = rotation.determinant();
    if (det - 1.0).abs() > 1e-10
        || (rotation * rotation.transpose() - nalgebra::Matrix3::identity()).norm() > 1e-10
    {
        return Err(Error::InvalidParameter(
            "rigid motion requires a proper rotation matrix".into(),
        ));
    }
    let moved = SurfaceChart::new(
        format!("{}+rigid", chart.name()),
        chart.s_range(),
        chart.t_range(),
        chart.periodic_s(),
        chart.periodic_t(),
        chart.genus(),
        Arc::new(RigidMotionMap {
            inner: chart.map().clone(),
            rotation,
            shift,
        }),
    );
    Ok(moved.with_normal_sign(chart.normal_sign()))
}
