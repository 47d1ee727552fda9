//! Möbius transformations of R^3: compositions of translations, scalings,
//! and sphere inversions, applied to charts and meshes with derivatives
//! carried through the chain rule.

use crate::error::{Error, Result};
use crate::surface::{ChartMap, MeshSurface, SurfaceChart, Vec3};
use std::sync::Arc;

/// Fraction of the surface diameter below which an inversion center counts
/// as lying on the surface.
pub const INVERSION_ADMISSIBILITY: f64 = 1e-9;

/// Lattice resolution used to sample charts for admissibility checks and
/// orientation detection.
const PROBE_RES: usize = 48;

#[derive(Debug, Clone, PartialEq)]
pub enum MobiusPrimitive {
    Translation(Vec3),
    /// Uniform scaling about the origin, factor > 0.
    Scaling(f64),
    /// x -> center + radius^2 (x - center)/|x - center|^2.
    SphereInversion { center: Vec3, radius: f64 },
}

impl MobiusPrimitive {
    pub fn apply(&self, x: Vec3) -> Vec3 {
        match *self {
            MobiusPrimitive::Translation(b) => x + b,
            MobiusPrimitive::Scaling(a) => a * x,
            MobiusPrimitive::SphereInversion { center, radius } => {
                let z = x - center;
                center + radius * radius * z / z.norm_squared()
            }
        }
    }

    /// Directional derivative D(phi)(x) u.
    fn jacobian_apply(&self, x: Vec3, u: Vec3) -> Vec3 {
        match *self {
            MobiusPrimitive::Translation(_) => u,
            MobiusPrimitive::Scaling(a) => a * u,
            MobiusPrimitive::SphereInversion { center, radius } => {
                let z = x - center;
                let r2 = z.norm_squared();
                radius * radius * (u / r2 - 2.0 * z.dot(&u) * z / (r2 * r2))
            }
        }
    }

    /// Second derivative D^2(phi)(x)(u, v).
    fn hessian_apply(&self, x: Vec3, u: Vec3, v: Vec3) -> Vec3 {
        match *self {
            MobiusPrimitive::Translation(_) | MobiusPrimitive::Scaling(_) => Vec3::zeros(),
            MobiusPrimitive::SphereInversion { center, radius } => {
                let z = x - center;
                let r2 = z.norm_squared();
                let r4 = r2 * r2;
                let r6 = r4 * r2;
                radius * radius
                    * (-2.0 * (u.dot(&v) * z + z.dot(&u) * v + z.dot(&v) * u) / r4
                        + 8.0 * z.dot(&u) * z.dot(&v) * z / r6)
            }
        }
    }
}

/// Ordered composition of primitive maps, applied first-to-last.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MobiusMap {
    steps: Vec<MobiusPrimitive>,
}

impl MobiusMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn steps(&self) -> &[MobiusPrimitive] {
        &self.steps
    }

    pub fn translated(mut self, b: Vec3) -> Self {
        self.steps.push(MobiusPrimitive::Translation(b));
        self
    }

    pub fn scaled(mut self, a: f64) -> Self {
        assert!(a > 0.0, "scaling factor must be positive");
        self.steps.push(MobiusPrimitive::Scaling(a));
        self
    }

    pub fn inverted(mut self, center: Vec3, radius: f64) -> Self {
        assert!(radius > 0.0, "inversion radius must be positive");
        self.steps
            .push(MobiusPrimitive::SphereInversion { center, radius });
        self
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn apply_point(&self, x: Vec3) -> Vec3 {
        self.steps.iter().fold(x, |p, step| step.apply(p))
    }

    fn inversion_count(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s, MobiusPrimitive::SphereInversion { .. }))
            .count()
    }

    /// Parses the CLI form `translate:x,y,z;scale:a;invert:cx,cy,cz,rho`.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut map = MobiusMap::new();
        for part in spec.split(';').filter(|p| !p.trim().is_empty()) {
            let (kind, args) = part.split_once(':').ok_or_else(|| {
                Error::InvalidConfig(format!("mobius step `{part}` needs the form kind:args"))
            })?;
            let nums: Vec<f64> = args
                .split(',')
                .map(|t| {
                    t.trim().parse::<f64>().map_err(|_| {
                        Error::InvalidConfig(format!("bad number `{t}` in mobius step `{part}`"))
                    })
                })
                .collect::<Result<_>>()?;
            match (kind.trim(), nums.len()) {
                ("translate", 3) => {
                    map.steps
                        .push(MobiusPrimitive::Translation(Vec3::new(nums[0], nums[1], nums[2])));
                }
                ("scale", 1) => {
                    if nums[0] <= 0.0 {
                        return Err(Error::InvalidConfig(
                            "scale factor must be positive".into(),
                        ));
                    }
                    map.steps.push(MobiusPrimitive::Scaling(nums[0]));
                }
                ("invert", 4) => {
                    if nums[3] <= 0.0 {
                        return Err(Error::InvalidConfig(
                            "inversion radius must be positive".into(),
                        ));
                    }
                    map.steps.push(MobiusPrimitive::SphereInversion {
                        center: Vec3::new(nums[0], nums[1], nums[2]),
                        radius: nums[3],
                    });
                }
                (kind, n) => {
                    return Err(Error::InvalidConfig(format!(
                        "unknown mobius step `{kind}` with {n} arguments \
                         (expected translate:x,y,z | scale:a | invert:cx,cy,cz,rho)"
                    )));
                }
            }
        }
        Ok(map)
    }
}

struct MobiusChartMap {
    inner: SurfaceChart,
    map: MobiusMap,
}

impl ChartMap for MobiusChartMap {
    fn position(&self, s: f64, t: f64) -> Vec3 {
        self.map.apply_point(self.inner.position(s, t))
    }

    fn first_derivs(&self, s: f64, t: f64) -> Option<(Vec3, Vec3)> {
        let mut x = self.inner.position(s, t);
        let (mut rs, mut rt) = self.inner.first_derivs(s, t);
        for step in self.map.steps() {
            let new_rs = step.jacobian_apply(x, rs);
            let new_rt = step.jacobian_apply(x, rt);
            x = step.apply(x);
            rs = new_rs;
            rt = new_rt;
        }
        Some((rs, rt))
    }

    fn second_derivs(&self, s: f64, t: f64) -> Option<(Vec3, Vec3, Vec3)> {
        let mut x = self.inner.position(s, t);
        let (mut rs, mut rt) = self.inner.first_derivs(s, t);
        let (mut rss, mut rst, mut rtt) = self.inner.second_derivs(s, t);
        for step in self.map.steps() {
            let new_rss = step.hessian_apply(x, rs, rs) + step.jacobian_apply(x, rss);
            let new_rst = step.hessian_apply(x, rs, rt) + step.jacobian_apply(x, rst);
            let new_rtt = step.hessian_apply(x, rt, rt) + step.jacobian_apply(x, rtt);
            let new_rs = step.jacobian_apply(x, rs);
            let new_rt = step.jacobian_apply(x, rt);
            x = step.apply(x);
            rs = new_rs;
            rt = new_rt;
            rss = new_rss;
            rst = new_rst;
            rtt = new_rtt;
        }
        Some((rss, rst, rtt))
    }
}

fn bbox_diameter(points: &[Vec3]) -> f64 {
    let mut lo = points[0];
    let mut hi = points[0];
    for p in points {
        for a in 0..3 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    (hi - lo).norm()
}

fn compose_chart(chart: &SurfaceChart, map: &MobiusMap) -> SurfaceChart {
    let transformed = SurfaceChart::new(
        format!("{}+mobius", chart.name()),
        chart.s_range(),
        chart.t_range(),
        chart.periodic_s(),
        chart.periodic_t(),
        chart.genus(),
        Arc::new(MobiusChartMap {
            inner: chart.clone(),
            map: map.clone(),
        }),
    );
    transformed.with_normal_sign(chart.normal_sign())
}

/// Minimum distance from `center` to the chart image: lattice scan followed
/// by Newton refinement of |r(s,t) - c|^2 from the best starting cells, so
/// that a center lying exactly on the surface is detected even when no
/// lattice sample hits it. Also returns the lattice bounding-box diameter.
fn chart_min_distance(chart: &SurfaceChart, center: Vec3) -> (f64, f64) {
    let (s0, s1) = chart.s_range();
    let (t0, t1) = chart.t_range();
    let ds = (s1 - s0) / PROBE_RES as f64;
    let dt = (t1 - t0) / PROBE_RES as f64;
    let mut samples: Vec<(f64, f64, f64)> = Vec::with_capacity(PROBE_RES * PROBE_RES);
    let mut points: Vec<Vec3> = Vec::with_capacity(PROBE_RES * PROBE_RES);
    for i in 0..PROBE_RES {
        for j in 0..PROBE_RES {
            let s = s0 + (i as f64 + 0.5) * ds;
            let t = t0 + (j as f64 + 0.5) * dt;
            let p = chart.position(s, t);
            samples.push(((p - center).norm(), s, t));
            points.push(p);
        }
    }
    let diameter = bbox_diameter(&points);
    samples.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut best = samples[0].0;
    for &(_, s_start, t_start) in samples.iter().take(4) {
        let (mut s, mut t) = (s_start, t_start);
        for _ in 0..40 {
            let r = chart.position(s, t) - center;
            let (rs, rt) = chart.first_derivs(s, t);
            let (rss, rst, rtt) = chart.second_derivs(s, t);
            let g = nalgebra::Vector2::new(r.dot(&rs), r.dot(&rt));
            let h = nalgebra::Matrix2::new(
                rs.dot(&rs) + r.dot(&rss),
                rs.dot(&rt) + r.dot(&rst),
                rs.dot(&rt) + r.dot(&rst),
                rt.dot(&rt) + r.dot(&rtt),
            );
            let step = match h.try_inverse() {
                Some(inv) => inv * g,
                None => g * (ds * ds + dt * dt) / (rs.norm_squared() + rt.norm_squared()),
            };
            let clamp = |v: f64, lim: f64| v.clamp(-lim, lim);
            let step_s = clamp(step.x, ds);
            let step_t = clamp(step.y, dt);
            s -= step_s;
            t -= step_t;
            if !chart.periodic_s() {
                s = s.clamp(s0, s1);
            }
            if !chart.periodic_t() {
                t = t.clamp(t0, t1);
            }
            if step_s.abs() < 1e-14 * (s1 - s0).abs() && step_t.abs() < 1e-14 * (t1 - t0).abs() {
                break;
            }
        }
        best = best.min((chart.position(s, t) - center).norm());
    }
    (best, diameter)
}

/// Transforms a chart through a Möbius composition. Derivative maps are
/// composed analytically, so node geometry is recomputed rather than copied;
/// every inversion center is checked against the surface at the stage it
/// applies to.
pub fn apply_mobius(chart: &SurfaceChart, map: &MobiusMap) -> Result<SurfaceChart> {
    for (k, step) in map.steps().iter().enumerate() {
        if let MobiusPrimitive::SphereInversion { center, .. } = step {
            let prefix = MobiusMap {
                steps: map.steps[..k].to_vec(),
            };
            let stage = compose_chart(chart, &prefix);
            let (min_dist, diameter) = chart_min_distance(&stage, *center);
            let threshold = INVERSION_ADMISSIBILITY * diameter;
            if min_dist < threshold {
                return Err(Error::InversionCenterOnSurface {
                    x: center.x,
                    y: center.y,
                    z: center.z,
                    dist: min_dist,
                    threshold,
                });
            }
        }
    }

    let transformed = compose_chart(chart, map);
    let sign = detect_normal_sign(&transformed).unwrap_or_else(|| {
        // open or volume-degenerate chart: fall back to the inversion parity
        if map.inversion_count() % 2 == 0 {
            chart.normal_sign()
        } else {
            -chart.normal_sign()
        }
    });
    Ok(transformed.with_normal_sign(sign))
}

/// Transforms mesh vertices through the composition; curvature data is
/// recomputed by `to_quadrature` on the moved vertices. Admissibility is
/// checked against the vertices of the stage the inversion applies to.
pub fn apply_mobius_mesh(mesh: &MeshSurface, map: &MobiusMap) -> Result<MeshSurface> {
    let mut moved = mesh.clone();
    for step in map.steps() {
        if let MobiusPrimitive::SphereInversion { center, .. } = step {
            let min_dist = moved
                .vertices
                .iter()
                .map(|p| (p - center).norm())
                .fold(f64::INFINITY, f64::min);
            let threshold = INVERSION_ADMISSIBILITY * bbox_diameter(&moved.vertices);
            if min_dist < threshold {
                return Err(Error::InversionCenterOnSurface {
                    x: center.x,
                    y: center.y,
                    z: center.z,
                    dist: min_dist,
                    threshold,
                });
            }
        }
        moved = moved.map_positions(|p| step.apply(p));
    }
    Ok(moved)
}

/// Sign that makes the chart's cross product point into the enclosed body,
/// determined from the signed volume (1/3) sum over a coarse lattice of
/// x . n dS with the raw cross-product normal. None when the probe is
/// inconclusive (open charts, near-zero volume).
fn detect_normal_sign(chart: &SurfaceChart) -> Option<f64> {
    let (s0, s1) = chart.s_range();
    let (t0, t1) = chart.t_range();
    let ds = (s1 - s0) / PROBE_RES as f64;
    let dt = (t1 - t0) / PROBE_RES as f64;
    let mut volume = 0.0;
    let mut total_area = 0.0;
    for i in 0..PROBE_RES {
        for j in 0..PROBE_RES {
            let s = s0 + (i as f64 + 0.5) * ds;
            let t = t0 + (j as f64 + 0.5) * dt;
            let (rs, rt) = chart.first_derivs(s, t);
            let cross = rs.cross(&rt);
            let x = chart.position(s, t);
            volume += x.dot(&cross) * ds * dt / 3.0;
            total_area += cross.norm() * ds * dt;
        }
    }
    if total_area == 0.0 {
        return None;
    }
    // characteristic length^3 scale for deciding "decisively nonzero"
    let scale = total_area.powf(1.5);
    if volume.abs() < 1e-6 * scale {
        return None;
    }
    // positive flux of x through the cross normal means the cross points out
    Some(if volume > 0.0 { -1.0 } else { 1.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::sphere;

    #[test]
    fn inversion_maps_unit_sphere_to_known_sphere() {
        // center (3,0,0), radius 1: the unit sphere maps to the sphere
        // through (2.5,0,0) and (2.75,0,0), center 2.625, radius 0.125.
        let map = MobiusMap::new().inverted(Vec3::new(3.0, 0.0, 0.0), 1.0);
        let expected_center = Vec3::new(2.625, 0.0, 0.0);
        for p in [
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(-1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(0.0, -0.6, 0.8),
        ] {
            let q = map.apply_point(p);
            assert!(((q - expected_center).norm() - 0.125).abs() < 1e-14);
        }
    }

    #[test]
    fn jacobian_and_hessian_match_finite_differences() {
        let map = MobiusMap::new()
            .translated(Vec3::new(0.3, -0.2, 0.1))
            .inverted(Vec3::new(2.5, 0.5, -1.0), 1.3)
            .scaled(1.7);
        let step = &MobiusPrimitive::SphereInversion {
            center: Vec3::new(2.5, 0.5, -1.0),
            radius: 1.3,
        };
        let x = Vec3::new(0.4, -0.7, 0.9);
        let u = Vec3::new(0.2, 0.5, -0.3);
        let v = Vec3::new(-0.6, 0.1, 0.4);
        let h = 1e-5;

        let fd_jac = (step.apply(x + h * u) - step.apply(x - h * u)) / (2.0 * h);
        assert!((fd_jac - step.jacobian_apply(x, u)).norm() < 1e-8);

        let fd_hess = (step.jacobian_apply(x + h * v, u) - step.jacobian_apply(x - h * v, u))
            / (2.0 * h);
        assert!((fd_hess - step.hessian_apply(x, u, v)).norm() < 1e-8);

        // full composition jacobian against finite differences of the map
        let fd_full = (map.apply_point(x + h * u) - map.apply_point(x - h * u)) / (2.0 * h);
        let mut y = x;
        let mut du = u;
        for s in map.steps() {
            du = s.jacobian_apply(y, du);
            y = s.apply(y);
        }
        assert!((fd_full - du).norm() < 1e-7);
    }

    #[test]
    fn inversion_center_on_surface_rejected() {
        let chart = sphere(1.0).unwrap();
        let map = MobiusMap::new().inverted(Vec3::new(1.0, 0.0, 0.0), 1.0);
        let err = apply_mobius(&chart, &map).unwrap_err();
        assert!(matches!(err, Error::InversionCenterOnSurface { .. }));
    }

    #[test]
    fn parse_round_trips_the_cli_form() {
        let map = MobiusMap::parse("translate:1,2,3; scale:2 ;invert:3,0,0,1").unwrap();
        assert_eq!(map.steps().len(), 3);
        assert!(MobiusMap::parse("shear:1").is_err());
        assert!(MobiusMap::parse("scale:-1").is_err());
        assert!(MobiusMap::parse("invert:0,0,0,0").is_err());
    }
}
