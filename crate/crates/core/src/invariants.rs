//! Geometric invariants of a discrete surface: Willmore energy, the
//! Gauss–Bonnet check, and the decay constant sqrt((3W - 2πχ)/(128π))
//! predicted for the ordered eigenvalue moduli.

use crate::error::{Error, Result};
use crate::surface::SurfaceQuadrature;
use crate::symbol;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Willmore energy: the integral of H^2 over the surface.
pub fn willmore_energy(quad: &SurfaceQuadrature) -> Result<f64> {
    if quad.is_empty() {
        return Err(Error::EmptyQuadrature(quad.label.clone()));
    }
    Ok(quad
        .nodes
        .iter()
        .map(|n| n.weight * n.mean_curvature * n.mean_curvature)
        .sum())
}

/// Integral of the Gaussian curvature and its distance from 2πχ. The
/// declared Euler characteristic is the source of truth; the integral only
/// checks the curvature data against it.
pub fn gauss_bonnet_check(quad: &SurfaceQuadrature) -> Result<(f64, f64)> {
    if quad.is_empty() {
        return Err(Error::EmptyQuadrature(quad.label.clone()));
    }
    let integral: f64 = quad
        .nodes
        .iter()
        .map(|n| n.weight * n.gaussian_curvature)
        .sum();
    let residual = (integral - 2.0 * PI * quad.euler_characteristic as f64).abs();
    Ok((integral, residual))
}

/// sqrt((3W - 2πχ)/(128π)); errors when the radicand is negative, which for
/// real surface data can only mean broken curvature input.
pub fn predicted_weyl_constant(willmore: f64, chi: i32) -> Result<f64> {
    let radicand = (3.0 * willmore - 2.0 * PI * chi as f64) / (128.0 * PI);
    if radicand < 0.0 {
        return Err(Error::InvalidGeometry(format!(
            "3W - 2πχ = {:.6e} is negative (W = {willmore:.6e}, χ = {chi})",
            3.0 * willmore - 2.0 * PI * chi as f64
        )));
    }
    Ok(radicand.sqrt())
}

/// Everything the geometric side contributes, in one record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeometryReport {
    pub label: String,
    pub area: f64,
    pub willmore_energy: f64,
    pub gauss_bonnet_integral: f64,
    pub euler_characteristic: i32,
    pub gauss_bonnet_residual: f64,
    pub predicted_weyl_constant: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_plus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_minus: Option<f64>,
}

/// Aggregates area, Willmore energy, the Gauss–Bonnet check, and the
/// predicted constant; `signed_n_theta` additionally requests the signed
/// density split at that angular resolution.
pub fn geometry_report(
    quad: &SurfaceQuadrature,
    signed_n_theta: Option<usize>,
) -> Result<GeometryReport> {
    let willmore = willmore_energy(quad)?;
    let (integral, residual) = gauss_bonnet_check(quad)?;
    let constant = predicted_weyl_constant(willmore, quad.euler_characteristic)?;
    let (c_plus, c_minus) = match signed_n_theta {
        Some(n_theta) => {
            let (p, m) = symbol::signed_densities(quad, n_theta)?;
            (Some(p), Some(m))
        }
        None => (None, None),
    };
    Ok(GeometryReport {
        label: quad.label.clone(),
        area: quad.area(),
        willmore_energy: willmore,
        gauss_bonnet_integral: integral,
        euler_characteristic: quad.euler_characteristic,
        gauss_bonnet_residual: residual,
        predicted_weyl_constant: constant,
        c_plus,
        c_minus,
    })
}
