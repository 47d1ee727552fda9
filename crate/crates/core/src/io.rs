//! File formats: spectrum/vector CSV, quadrature and report JSON, and the
//! raw binary matrix dump.

use crate::error::Result;
use crate::invariants::GeometryReport;
use crate::nystrom::NpMatrix;
use crate::spectrum::{SpectrumResult, WeylFit};
use crate::surface::SurfaceQuadrature;
use serde::Serialize;
use serde_json::json;
use std::io::Write;
use std::path::Path;

/// Rows `j,re,im,modulus,singular_value` for every index.
pub fn spectrum_csv(spectrum: &SpectrumResult) -> String {
    let mut out = String::from("j,re,im,modulus,singular_value\n");
    for (j, &(re, im)) in spectrum.eigenvalues.iter().enumerate() {
        let modulus = re.hypot(im);
        let sv = spectrum
            .singular_values
            .get(j)
            .copied()
            .unwrap_or(f64::NAN);
        out.push_str(&format!("{j},{re},{im},{modulus},{sv}\n"));
    }
    out
}

pub fn write_spectrum_csv(path: impl AsRef<Path>, spectrum: &SpectrumResult) -> Result<()> {
    std::fs::write(path, spectrum_csv(spectrum))?;
    Ok(())
}

/// Rows `index,value`.
pub fn vector_csv(values: &[f64]) -> String {
    let mut out = String::from("index,value\n");
    for (i, v) in values.iter().enumerate() {
        out.push_str(&format!("{i},{v}\n"));
    }
    out
}

pub fn write_vector_csv(path: impl AsRef<Path>, values: &[f64]) -> Result<()> {
    std::fs::write(path, vector_csv(values))?;
    Ok(())
}

/// Raw row-major little-endian f64 entries plus a `{n, label}` JSON sidecar.
pub fn write_matrix_binary(
    bin_path: impl AsRef<Path>,
    sidecar_path: impl AsRef<Path>,
    matrix: &NpMatrix,
) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(bin_path)?);
    for value in matrix.data() {
        file.write_all(&value.to_le_bytes())?;
    }
    file.flush()?;
    let sidecar = json!({ "n": matrix.n(), "label": matrix.source_label() });
    std::fs::write(sidecar_path, serde_json::to_string_pretty(&sidecar)?)?;
    Ok(())
}

/// Quadrature document: `{label, chi, nodes: [{x, n, w, E..N, H, K}]}`.
pub fn quadrature_json(quad: &SurfaceQuadrature) -> serde_json::Value {
    let nodes: Vec<serde_json::Value> = quad
        .nodes
        .iter()
        .map(|node| {
            json!({
                "x": [node.position.x, node.position.y, node.position.z],
                "n": [node.normal.x, node.normal.y, node.normal.z],
                "w": node.weight,
                "E": node.forms.e,
                "F": node.forms.f,
                "G": node.forms.g,
                "L": node.forms.l,
                "M": node.forms.m,
                "N": node.forms.n,
                "H": node.mean_curvature,
                "K": node.gaussian_curvature,
            })
        })
        .collect();
    json!({
        "label": quad.label,
        "chi": quad.euler_characteristic,
        "nodes": nodes,
    })
}

pub fn write_quadrature_json(path: impl AsRef<Path>, quad: &SurfaceQuadrature) -> Result<()> {
    std::fs::write(path, serde_json::to_string(&quadrature_json(quad))?)?;
    Ok(())
}

#[derive(Serialize)]
struct FitJson {
    c: f64,
    slope: f64,
    window: [usize; 2],
    predicted: f64,
    rel_dev: f64,
}

/// Fit document `{c, slope, window, predicted, rel_dev}`.
pub fn fit_json(fit: &WeylFit) -> serde_json::Value {
    serde_json::to_value(FitJson {
        c: fit.fitted_constant,
        slope: fit.slope,
        window: [fit.window.j_min, fit.window.j_max],
        predicted: fit.predicted_constant,
        rel_dev: fit.relative_deviation,
    })
    .expect("plain struct serializes")
}

pub fn write_fit_json(path: impl AsRef<Path>, fit: &WeylFit) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(&fit_json(fit))?)?;
    Ok(())
}

pub fn write_geometry_json(path: impl AsRef<Path>, report: &GeometryReport) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(report)?)?;
    Ok(())
}
