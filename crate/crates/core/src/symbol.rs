//! Principal symbol of the boundary operator and the densities whose
//! integrals give the squared decay constant.
//!
//! In a conformal chart the symbol restricted to the unit cocircle can be
//! integrated in closed form; the result collapses, via the isothermal
//! identity M^2 = LN - E^2 K, to the coordinate-free per-area density
//! (3/(128π)) (H^2 - K/3). The numeric θ-quadrature, the evaluated closed
//! form, and the coordinate-free expression are kept as three separate
//! routes so they can check one another. Raw cosphere quadrature is only
//! offered at conformal points; the fiber measure is pinned down there and
//! nowhere else, so general charts must use the coordinate-free density.

use crate::error::{Error, Result};
use crate::surface::{FundamentalForms, SurfaceNode, SurfaceQuadrature};
use std::f64::consts::PI;

/// Relative tolerance of the conformality test E = G, F = 0.
const CONFORMAL_EPS: f64 = 1e-10;

/// Tolerance for the discriminant H^2 - K >= 0.
const DISCRIMINANT_TOL: f64 = 1e-12;

/// Everything the symbol needs at one surface point.
#[derive(Debug, Clone, Copy)]
pub struct SymbolPoint {
    pub forms: FundamentalForms,
    pub weight: f64,
    pub mean_curvature: f64,
    pub gaussian_curvature: f64,
}

impl SymbolPoint {
    pub fn from_node(node: &SurfaceNode) -> Self {
        Self {
            forms: node.forms,
            weight: node.weight,
            mean_curvature: node.mean_curvature,
            gaussian_curvature: node.gaussian_curvature,
        }
    }

    /// E = G and F = 0 within 1e-10 relative.
    pub fn is_conformal(&self) -> bool {
        let f = self.forms;
        (f.e - f.g).abs() <= CONFORMAL_EPS * f.e && f.f.abs() <= CONFORMAL_EPS * f.e
    }
}

/// Degree minus-one homogeneous symbol
/// (L ξ₂² - 2M ξ₁ξ₂ + N ξ₁²) / (4 det(g) (Σ gʲᵏ ξ_j ξ_k)^{3/2}).
pub fn principal_symbol(point: &SymbolPoint, xi: [f64; 2]) -> Result<f64> {
    let [xi1, xi2] = xi;
    if xi1 == 0.0 && xi2 == 0.0 {
        return Err(Error::ZeroCovector);
    }
    let f = point.forms;
    let det = f.metric_det();
    if !(det > 0.0) {
        return Err(Error::IndefiniteMetric { det });
    }
    let numerator = f.l * xi2 * xi2 - 2.0 * f.m * xi1 * xi2 + f.n * xi1 * xi1;
    // inverse-metric contraction: g^{11} = G/det, g^{12} = -F/det, g^{22} = E/det
    let quad = (f.g * xi1 * xi1 - 2.0 * f.f * xi1 * xi2 + f.e * xi2 * xi2) / det;
    Ok(numerator / (4.0 * det * quad.powf(1.5)))
}

/// Per-unit-area density at a conformal point by trapezoid quadrature of the
/// squared symbol over the unit cocircle:
/// d = (1/(8π² E)) ∫ p(ξ(θ))² dθ.
pub fn symbol_density_numeric(point: &SymbolPoint, n_theta: usize) -> Result<f64> {
    if n_theta < 16 {
        return Err(Error::InvalidParameter(format!(
            "n_theta must be at least 16, got {n_theta}"
        )));
    }
    if !point.is_conformal() {
        return Err(Error::NonConformalPoint);
    }
    let mut integral = 0.0;
    let h = 2.0 * PI / n_theta as f64;
    for k in 0..n_theta {
        let theta = k as f64 * h;
        let p = principal_symbol(point, [theta.cos(), theta.sin()])?;
        integral += p * p * h;
    }
    Ok(integral / (8.0 * PI * PI * point.forms.e))
}

/// The same density with the θ-integral evaluated in closed form:
/// d = (3π/4 (L² + N²) + π M² + π/2 L N) / (128 π² E²).
pub fn symbol_density_closed_form(point: &SymbolPoint) -> Result<f64> {
    if !point.is_conformal() {
        return Err(Error::NonConformalPoint);
    }
    let f = point.forms;
    let integral = 0.75 * PI * (f.l * f.l + f.n * f.n) + PI * f.m * f.m + 0.5 * PI * f.l * f.n;
    Ok(integral / (128.0 * PI * PI * f.e * f.e))
}

/// Coordinate-free per-unit-area density (3/(128π)) (H² - K/3); its integral
/// over the surface equals the squared predicted constant by Gauss–Bonnet.
pub fn weyl_density_pointwise(mean: f64, gauss: f64) -> Result<f64> {
    let disc = mean * mean - gauss;
    if disc < -DISCRIMINANT_TOL * (mean * mean).max(gauss.abs()).max(1.0) {
        return Err(Error::InvalidCurvaturePair {
            h_squared: mean * mean,
            k: gauss,
        });
    }
    Ok(3.0 / (128.0 * PI) * (mean * mean - gauss / 3.0))
}

/// Signed density split: per node the normal curvature
/// κ(θ) = κ₁ cos²θ + κ₂ sin²θ is split into positive and negative parts,
/// squared, integrated over θ by trapezoid and against the node weights, and
/// the square roots of the two totals are returned as (C₊, C₋). The two
/// squares add up to the squared unsigned constant exactly, because the
/// split is pointwise in θ.
pub fn signed_densities(quad: &SurfaceQuadrature, n_theta: usize) -> Result<(f64, f64)> {
    if n_theta < 64 {
        return Err(Error::InvalidParameter(format!(
            "n_theta must be at least 64, got {n_theta}"
        )));
    }
    if quad.is_empty() {
        return Err(Error::EmptyQuadrature(quad.label.clone()));
    }
    let h = 2.0 * PI / n_theta as f64;
    let mut total_plus = 0.0;
    let mut total_minus = 0.0;
    for node in &quad.nodes {
        let mean = node.mean_curvature;
        let gauss = node.gaussian_curvature;
        let disc = mean * mean - gauss;
        if disc < -DISCRIMINANT_TOL * (mean * mean).max(gauss.abs()).max(1.0) {
            return Err(Error::InvalidCurvaturePair {
                h_squared: mean * mean,
                k: gauss,
            });
        }
        let root = disc.max(0.0).sqrt();
        let kappa1 = mean + root;
        let kappa2 = mean - root;
        let mut plus = 0.0;
        let mut minus = 0.0;
        for k in 0..n_theta {
            let theta = k as f64 * h;
            let c = theta.cos();
            let s = theta.sin();
            let kn = kappa1 * c * c + kappa2 * s * s;
            if kn > 0.0 {
                plus += kn * kn * h;
            } else {
                minus += kn * kn * h;
            }
        }
        total_plus += node.weight * plus / (128.0 * PI * PI);
        total_minus += node.weight * minus / (128.0 * PI * PI);
    }
    Ok((total_plus.sqrt(), total_minus.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{build_quadrature, ellipsoid, sphere, stereographic_sphere, torus};
    use crate::invariants::{predicted_weyl_constant, willmore_energy};

    fn conformal_sphere_point() -> SymbolPoint {
        // stereographic chart of the unit sphere at the origin
        SymbolPoint {
            forms: FundamentalForms {
                e: 4.0,
                f: 0.0,
                g: 4.0,
                l: 4.0,
                m: 0.0,
                n: 4.0,
            },
            weight: 1.0,
            mean_curvature: 1.0,
            gaussian_curvature: 1.0,
        }
    }

    #[test]
    fn symbol_at_conformal_sphere_point() {
        let p = conformal_sphere_point();
        let v = principal_symbol(&p, [1.0, 0.0]).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        // oracle identity at conformal points: p = sqrt(E) kappa_n / 4 with
        // kappa_n = 1 on the unit sphere, for every direction
        for theta in [0.3, 1.1, 2.9, 4.2] {
            let v = principal_symbol(&p, [f64::cos(theta), f64::sin(theta)]).unwrap();
            assert!((v - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn symbol_is_homogeneous_of_degree_minus_one() {
        let chart = stereographic_sphere();
        for (s, t) in [(0.1, -0.4), (1.3, 0.9), (-2.0, 0.7)] {
            let node = chart.node(s, t, 1.0).unwrap();
            let p = SymbolPoint::from_node(&node);
            for a in [0.5, 2.0, 17.0] {
                for xi in [[1.0, 0.3], [-0.7, 1.9]] {
                    let base = principal_symbol(&p, xi).unwrap();
                    let scaled = principal_symbol(&p, [a * xi[0], a * xi[1]]).unwrap();
                    assert!((scaled - base / a).abs() < 1e-13 * base.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn symbol_vanishes_on_flat_points_and_rejects_zero_covector() {
        let p = SymbolPoint {
            forms: FundamentalForms {
                e: 1.0,
                f: 0.0,
                g: 1.0,
                l: 0.0,
                m: 0.0,
                n: 0.0,
            },
            weight: 1.0,
            mean_curvature: 0.0,
            gaussian_curvature: 0.0,
        };
        for xi in [[1.0, 0.0], [0.4, -2.0]] {
            assert_eq!(principal_symbol(&p, xi).unwrap(), 0.0);
        }
        assert!(matches!(
            principal_symbol(&p, [0.0, 0.0]),
            Err(Error::ZeroCovector)
        ));
        assert_eq!(symbol_density_numeric(&p, 64).unwrap(), 0.0);
        assert_eq!(symbol_density_closed_form(&p).unwrap(), 0.0);
    }

    #[test]
    fn densities_at_conformal_sphere_point() {
        // uniform density on the unit sphere must equal C^2 / Area = 1/(64π)
        let p = conformal_sphere_point();
        let expected = 1.0 / (64.0 * PI);
        assert!((symbol_density_numeric(&p, 64).unwrap() - expected).abs() < 1e-15);
        assert!((symbol_density_closed_form(&p).unwrap() - expected).abs() < 1e-18);
        assert!((weyl_density_pointwise(1.0, 1.0).unwrap() - expected).abs() < 1e-18);
    }

    #[test]
    fn weyl_density_direct_values_and_errors() {
        let v = weyl_density_pointwise(0.0, -1.0).unwrap();
        assert!((v - 1.0 / (128.0 * PI)).abs() < 1e-18);
        assert!(matches!(
            weyl_density_pointwise(0.1, 1.0),
            Err(Error::InvalidCurvaturePair { .. })
        ));
    }

    #[test]
    fn weyl_density_integral_over_clifford_torus() {
        // the squared decay constant of the Willmore minimizer: 3pi/64
        let quad = build_quadrature(&crate::surface::clifford_torus(), 64, 64).unwrap();
        let total: f64 = quad
            .nodes
            .iter()
            .map(|n| {
                weyl_density_pointwise(n.mean_curvature, n.gaussian_curvature).unwrap() * n.weight
            })
            .sum();
        assert!((total - 3.0 * PI / 64.0).abs() < 1e-8, "{total}");
    }

    #[test]
    fn three_density_routes_agree_on_random_conformal_points() {
        let chart = stereographic_sphere();
        let mut s = 0.37_f64;
        let mut t = -1.91_f64;
        for _ in 0..25 {
            // low-discrepancy walk over the chart square
            s = (s + 1.324_717_957_244_746) % 4.0 - 2.0;
            t = (t + 1.754_877_666_246_693) % 4.0 - 2.0;
            let node = chart.node(s, t, 1.0).unwrap();
            let p = SymbolPoint::from_node(&node);
            assert!(p.is_conformal());
            let numeric = symbol_density_numeric(&p, 512).unwrap();
            let closed = symbol_density_closed_form(&p).unwrap();
            let pointwise =
                weyl_density_pointwise(p.mean_curvature, p.gaussian_curvature).unwrap();
            assert!((numeric - closed).abs() <= 1e-10 * closed.abs());
            assert!((closed - pointwise).abs() <= 1e-12 * pointwise.abs());
        }
    }

    #[test]
    fn numeric_density_converges_spectrally_in_theta() {
        // the integrand is a degree-4 trigonometric polynomial, so the
        // periodic trapezoid rule is exact once n_theta > 4; doubling from
        // the minimum stays at the rounding floor
        let chart = stereographic_sphere();
        let node = chart.node(0.8, -0.6, 1.0).unwrap();
        let p = SymbolPoint::from_node(&node);
        let closed = symbol_density_closed_form(&p).unwrap();
        for n_theta in [16, 32, 64] {
            let numeric = symbol_density_numeric(&p, n_theta).unwrap();
            assert!((numeric - closed).abs() <= 1e-12 * closed);
        }
    }

    #[test]
    fn non_conformal_points_are_rejected() {
        let p = SymbolPoint {
            forms: FundamentalForms {
                e: 1.0,
                f: 0.1,
                g: 2.0,
                l: 1.0,
                m: 0.0,
                n: 1.0,
            },
            weight: 1.0,
            mean_curvature: 0.5,
            gaussian_curvature: 0.2,
        };
        assert!(matches!(
            symbol_density_numeric(&p, 64),
            Err(Error::NonConformalPoint)
        ));
        assert!(matches!(
            symbol_density_closed_form(&p),
            Err(Error::NonConformalPoint)
        ));
    }

    #[test]
    fn signed_densities_on_sphere_and_ellipsoid() {
        let quad = build_quadrature(&sphere(1.0).unwrap(), 24, 48).unwrap();
        let (c_plus, c_minus) = signed_densities(&quad, 256).unwrap();
        assert!((c_plus - 0.25).abs() < 1e-6, "{c_plus}");
        assert!(c_minus <= 1e-12);

        let quad = build_quadrature(&ellipsoid(1.0, 1.3, 1.7).unwrap(), 24, 48).unwrap();
        let (_, c_minus) = signed_densities(&quad, 256).unwrap();
        assert!(c_minus <= 1e-12);
    }

    #[test]
    fn signed_densities_torus_negative_part_and_pythagoras() {
        let quad = build_quadrature(&torus(2.0, 1.0).unwrap(), 32, 32).unwrap();
        let (c_plus, c_minus) = signed_densities(&quad, 256).unwrap();
        assert!(c_minus > 0.0);
        let w = willmore_energy(&quad).unwrap();
        let c = predicted_weyl_constant(w, 0).unwrap();
        let total = c_plus * c_plus + c_minus * c_minus;
        assert!(
            (total - c * c).abs() <= 1e-10 * c * c,
            "C+^2 + C-^2 = {total}, C^2 = {}",
            c * c
        );
    }
}
