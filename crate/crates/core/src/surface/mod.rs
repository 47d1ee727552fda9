//! Parametric surface charts, fundamental forms, curvatures, and quadrature
//! node sets.
//!
//! A [`SurfaceChart`] is a regular map r(s, t) into R^3 together with its
//! domain rectangle, periodicity flags, and the genus of the closed surface
//! it covers. [`build_quadrature`] turns a chart into a finite node set
//! carrying positions, outward normals, area weights, both fundamental forms
//! and the mean/Gaussian curvatures. Triangle meshes produce the same node
//! sets through [`MeshSurface`].
//!
//! Sign convention: built-in charts order their parameters so that
//! r_s x r_t points into the enclosed body. The second-form coefficients are
//! taken against that inner normal, which makes H = +1/rho on a sphere of
//! radius rho, while the stored node normal is the outward one used by the
//! layer-potential kernel. Only H^2 and K enter the Weyl constant, so the
//! choice is a convention, but it also fixes the sign split of the
//! Browder–Gårding densities.

mod charts;
mod mesh;
mod rules;

pub use charts::{
    clifford_torus, ellipsoid, rigid_motion, sphere, stereographic_sphere, torus,
};
pub use mesh::{load_mesh, MeshSurface};
pub use rules::{gauss_legendre, line_rule};

use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// Cartesian vector in R^3.
pub type Vec3 = nalgebra::Vector3<f64>;

/// Relative threshold below which |r_s x r_t| counts as degenerate.
const REGULARITY_EPS: f64 = 1e-12;

/// Tolerance for the Weingarten discriminant H^2 - K >= 0.
const CURVATURE_DISCRIMINANT_TOL: f64 = 1e-12;

/// Map from chart parameters to R^3, with optional analytic derivatives.
///
/// Charts without analytic derivatives fall back to central differences with
/// step 1e-3 times the larger domain span; those converge at second order,
/// which the chart tests verify on the built-in shapes.
pub trait ChartMap: Send + Sync {
    fn position(&self, s: f64, t: f64) -> Vec3;

    /// (r_s, r_t) if available analytically.
    fn first_derivs(&self, _s: f64, _t: f64) -> Option<(Vec3, Vec3)> {
        None
    }

    /// (r_ss, r_st, r_tt) if available analytically.
    fn second_derivs(&self, _s: f64, _t: f64) -> Option<(Vec3, Vec3, Vec3)> {
        None
    }
}

struct FnChart<F>(F);

impl<F: Fn(f64, f64) -> Vec3 + Send + Sync> ChartMap for FnChart<F> {
    fn position(&self, s: f64, t: f64) -> Vec3 {
        (self.0)(s, t)
    }
}

/// A parametric patch r(s, t) over a rectangle, plus the topology of the
/// closed surface the chart covers.
#[derive(Clone)]
pub struct SurfaceChart {
    name: String,
    s_range: (f64, f64),
    t_range: (f64, f64),
    periodic_s: bool,
    periodic_t: bool,
    genus: u32,
    map: Arc<dyn ChartMap>,
    /// +1 when r_s x r_t already points into the body, -1 when it points out.
    /// Node normals are stored outward; second-form signs follow the inner
    /// normal so that spheres get positive mean curvature.
    normal_sign: f64,
}

impl fmt::Debug for SurfaceChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SurfaceChart")
            .field("name", &self.name)
            .field("s_range", &self.s_range)
            .field("t_range", &self.t_range)
            .field("periodic_s", &self.periodic_s)
            .field("periodic_t", &self.periodic_t)
            .field("genus", &self.genus)
            .field("normal_sign", &self.normal_sign)
            .finish()
    }
}

impl SurfaceChart {
    pub fn new(
        name: impl Into<String>,
        s_range: (f64, f64),
        t_range: (f64, f64),
        periodic_s: bool,
        periodic_t: bool,
        genus: u32,
        map: Arc<dyn ChartMap>,
    ) -> Self {
        Self {
            name: name.into(),
            s_range,
            t_range,
            periodic_s,
            periodic_t,
            genus,
            map,
            normal_sign: 1.0,
        }
    }

    /// Chart defined by a position map only; derivatives use the
    /// finite-difference fallback.
    pub fn from_position_fn(
        name: impl Into<String>,
        s_range: (f64, f64),
        t_range: (f64, f64),
        periodic_s: bool,
        periodic_t: bool,
        genus: u32,
        f: impl Fn(f64, f64) -> Vec3 + Send + Sync + 'static,
    ) -> Self {
        Self::new(
            name,
            s_range,
            t_range,
            periodic_s,
            periodic_t,
            genus,
            Arc::new(FnChart(f)),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn s_range(&self) -> (f64, f64) {
        self.s_range
    }

    pub fn t_range(&self) -> (f64, f64) {
        self.t_range
    }

    pub fn periodic_s(&self) -> bool {
        self.periodic_s
    }

    pub fn periodic_t(&self) -> bool {
        self.periodic_t
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn euler_characteristic(&self) -> i32 {
        2 - 2 * self.genus as i32
    }

    pub fn normal_sign(&self) -> f64 {
        self.normal_sign
    }

    pub(crate) fn with_normal_sign(mut self, sign: f64) -> Self {
        self.normal_sign = sign;
        self
    }

    pub(crate) fn map(&self) -> &Arc<dyn ChartMap> {
        &self.map
    }

    pub fn position(&self, s: f64, t: f64) -> Vec3 {
        self.map.position(s, t)
    }

    /// Default finite-difference step: 1e-3 of the larger domain span.
    pub fn fd_step(&self) -> f64 {
        let span_s = (self.s_range.1 - self.s_range.0).abs();
        let span_t = (self.t_range.1 - self.t_range.0).abs();
        1e-3 * span_s.max(span_t)
    }

    /// (r_s, r_t), analytic when the map provides them.
    pub fn first_derivs(&self, s: f64, t: f64) -> (Vec3, Vec3) {
        match self.map.first_derivs(s, t) {
            Some(d) => d,
            None => self.fd_first_derivs(s, t, self.fd_step()),
        }
    }

    /// (r_ss, r_st, r_tt); falls back to differencing the first derivatives.
    pub fn second_derivs(&self, s: f64, t: f64) -> (Vec3, Vec3, Vec3) {
        match self.map.second_derivs(s, t) {
            Some(d) => d,
            None => self.fd_second_derivs(s, t, self.fd_step()),
        }
    }

    /// Central-difference first derivatives at an explicit step (exposed so
    /// tests can observe the convergence order).
    pub fn fd_first_derivs(&self, s: f64, t: f64, h: f64) -> (Vec3, Vec3) {
        let rs = (self.map.position(s + h, t) - self.map.position(s - h, t)) / (2.0 * h);
        let rt = (self.map.position(s, t + h) - self.map.position(s, t - h)) / (2.0 * h);
        (rs, rt)
    }

    /// Central-difference second derivatives at an explicit step. When the
    /// map carries analytic first derivatives those are differenced instead
    /// of the positions.
    pub fn fd_second_derivs(&self, s: f64, t: f64, h: f64) -> (Vec3, Vec3, Vec3) {
        if self.map.first_derivs(s, t).is_some() {
            let d = |s: f64, t: f64| self.map.first_derivs(s, t).expect("analytic first derivs");
            let (rs_p, _) = d(s + h, t);
            let (rs_m, _) = d(s - h, t);
            let (rs_tp, rt_p) = d(s, t + h);
            let (rs_tm, rt_m) = d(s, t - h);
            let r_ss = (rs_p - rs_m) / (2.0 * h);
            let r_st = (rs_tp - rs_tm) / (2.0 * h);
            let r_tt = (rt_p - rt_m) / (2.0 * h);
            (r_ss, r_st, r_tt)
        } else {
            let p = |s: f64, t: f64| self.map.position(s, t);
            let center = p(s, t);
            let r_ss = (p(s + h, t) - 2.0 * center + p(s - h, t)) / (h * h);
            let r_tt = (p(s, t + h) - 2.0 * center + p(s, t - h)) / (h * h);
            let r_st = (p(s + h, t + h) - p(s + h, t - h) - p(s - h, t + h) + p(s - h, t - h))
                / (4.0 * h * h);
            (r_ss, r_st, r_tt)
        }
    }

    /// Builds the node the quadrature stores at (s, t); `rule_weight` is the
    /// product of the 1-D rule weights, so the area weight becomes
    /// |r_s x r_t| * rule_weight.
    pub fn node(&self, s: f64, t: f64, rule_weight: f64) -> Result<SurfaceNode> {
        let (rs, rt) = self.first_derivs(s, t);
        let cross = rs.cross(&rt);
        let mag = cross.norm();
        if mag <= REGULARITY_EPS * rs.norm() * rt.norm() || mag == 0.0 {
            return Err(Error::DegenerateChart {
                chart: self.name.clone(),
                s,
                t,
                mag,
            });
        }
        let cross_hat = cross / mag;
        let (r_ss, r_st, r_tt) = self.second_derivs(s, t);
        let sign = self.normal_sign;
        let inner = cross_hat * sign;
        let forms = FundamentalForms {
            e: rs.dot(&rs),
            f: rs.dot(&rt),
            g: rt.dot(&rt),
            l: r_ss.dot(&inner),
            m: r_st.dot(&inner),
            n: r_tt.dot(&inner),
        };
        let (h, k) = curvatures(&forms)?;
        if h * h - k < -CURVATURE_DISCRIMINANT_TOL * curvature_scale(h, k) {
            return Err(Error::InvalidCurvaturePair {
                h_squared: h * h,
                k,
            });
        }
        Ok(SurfaceNode {
            position: self.map.position(s, t),
            normal: -inner,
            weight: mag * rule_weight,
            forms,
            mean_curvature: h,
            gaussian_curvature: k,
            chart_coords: Some((s, t)),
        })
    }
}

fn curvature_scale(h: f64, k: f64) -> f64 {
    (h * h).max(k.abs()).max(1.0)
}

/// First-form coefficients E, F, G and second-form coefficients L, M, N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalForms {
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub l: f64,
    pub m: f64,
    pub n: f64,
}

impl FundamentalForms {
    /// EG - F^2; positive for a regular parametrization.
    pub fn metric_det(&self) -> f64 {
        self.e * self.g - self.f * self.f
    }
}

/// Fundamental forms of a chart at (s, t), with the second form taken
/// against the unit normal (r_s x r_t)/|r_s x r_t| exactly as written.
pub fn fundamental_forms(chart: &SurfaceChart, s: f64, t: f64) -> Result<FundamentalForms> {
    let (rs, rt) = chart.first_derivs(s, t);
    let cross = rs.cross(&rt);
    let mag = cross.norm();
    if mag <= REGULARITY_EPS * rs.norm() * rt.norm() || mag == 0.0 {
        return Err(Error::DegenerateChart {
            chart: chart.name.clone(),
            s,
            t,
            mag,
        });
    }
    let n_hat = cross / mag;
    let (r_ss, r_st, r_tt) = chart.second_derivs(s, t);
    Ok(FundamentalForms {
        e: rs.dot(&rs),
        f: rs.dot(&rt),
        g: rt.dot(&rt),
        l: r_ss.dot(&n_hat),
        m: r_st.dot(&n_hat),
        n: r_tt.dot(&n_hat),
    })
}

/// Mean and Gaussian curvature (H, K) from the fundamental forms:
/// the half-trace and determinant of the Weingarten map.
pub fn curvatures(forms: &FundamentalForms) -> Result<(f64, f64)> {
    let det = forms.metric_det();
    if !(det > 0.0) {
        return Err(Error::IndefiniteMetric { det });
    }
    let k = (forms.l * forms.n - forms.m * forms.m) / det;
    let h = (forms.e * forms.n + forms.g * forms.l - 2.0 * forms.f * forms.m) / (2.0 * det);
    Ok((h, k))
}

/// One quadrature node: position, outward unit normal, area weight, forms,
/// curvatures, and the chart coordinates it came from (absent for meshes).
#[derive(Debug, Clone)]
pub struct SurfaceNode {
    pub position: Vec3,
    pub normal: Vec3,
    pub weight: f64,
    pub forms: FundamentalForms,
    pub mean_curvature: f64,
    pub gaussian_curvature: f64,
    pub chart_coords: Option<(f64, f64)>,
}

/// A discrete closed surface: ordered nodes plus the declared Euler
/// characteristic.
#[derive(Debug, Clone)]
pub struct SurfaceQuadrature {
    pub nodes: Vec<SurfaceNode>,
    pub euler_characteristic: i32,
    pub label: String,
}

impl SurfaceQuadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Total area, sum of the node weights.
    pub fn area(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }

    /// Diagonal of the bounding box; the scale used for admissibility and
    /// coincidence thresholds.
    pub fn diameter(&self) -> f64 {
        if self.nodes.is_empty() {
            return 0.0;
        }
        let mut lo = self.nodes[0].position;
        let mut hi = lo;
        for node in &self.nodes {
            for a in 0..3 {
                lo[a] = lo[a].min(node.position[a]);
                hi[a] = hi[a].max(node.position[a]);
            }
        }
        (hi - lo).norm()
    }
}

/// Tensor-product quadrature over a chart: per-direction 1-D rules (trapezoid
/// when periodic, Gauss–Legendre otherwise) with the area element folded into
/// each weight.
pub fn build_quadrature(chart: &SurfaceChart, n_s: usize, n_t: usize) -> Result<SurfaceQuadrature> {
    if n_s < 4 || n_t < 4 {
        return Err(Error::ResolutionTooCoarse { n_s, n_t });
    }
    let (s0, s1) = chart.s_range;
    let (t0, t1) = chart.t_range;
    let s_rule = line_rule(s0, s1, n_s, chart.periodic_s);
    let t_rule = line_rule(t0, t1, n_t, chart.periodic_t);
    let mut nodes = Vec::with_capacity(n_s * n_t);
    for &(s, ws) in &s_rule {
        for &(t, wt) in &t_rule {
            nodes.push(chart.node(s, t, ws * wt)?);
        }
    }
    Ok(SurfaceQuadrature {
        nodes,
        euler_characteristic: chart.euler_characteristic(),
        label: chart.name.clone(),
    })
}
