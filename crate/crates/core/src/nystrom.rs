//! Dense Nyström discretization of the double-layer kernel
//! k(x, y) = <y - x, n(y)> / (4π |x - y|^3).
//!
//! Off-diagonal entries are kernel values times the target's area weight;
//! the diagonal enforces the Gauss identity (the constant density maps to
//! one half), so the all-ones vector is an exact eigenvector with eigenvalue
//! 1/2 by construction.

use crate::error::{Error, Result};
use crate::surface::{SurfaceQuadrature, Vec3};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Relative pairwise-distance floor below which assembly refuses the node set.
const COINCIDENCE_EPS: f64 = 1e-12;

/// Kernel of the boundary operator at x against the source point y with unit
/// outward normal n_y. The coincident limit is the caller's business (the
/// matrix diagonal never evaluates it).
pub fn np_kernel(x: Vec3, y: Vec3, n_y: Vec3) -> Result<f64> {
    let d = y - x;
    let r2 = d.norm_squared();
    if r2 == 0.0 {
        return Err(Error::CoincidentKernelPoints);
    }
    Ok(d.dot(&n_y) / (4.0 * PI * r2 * r2.sqrt()))
}

/// Dense N x N discretization with quadrature weights folded in.
#[derive(Debug, Clone)]
pub struct NpMatrix {
    n: usize,
    /// Row-major entries.
    data: Vec<f64>,
    weights: Vec<f64>,
    source_label: String,
}

/// Plain dense square matrix, the output of [`NpMatrix::symmetrize`].
#[derive(Debug, Clone)]
pub struct DenseMatrix {
    pub n: usize,
    /// Row-major entries.
    pub data: Vec<f64>,
}

impl DenseMatrix {
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub(crate) fn to_faer(&self) -> faer::Mat<f64> {
        faer::Mat::from_fn(self.n, self.n, |i, j| self.data[i * self.n + j])
    }
}

impl NpMatrix {
    /// Wraps raw row-major entries; meant for synthetic spectra in tests and
    /// reloading exported matrices.
    pub fn from_raw(data: Vec<f64>, weights: Vec<f64>, source_label: impl Into<String>) -> Result<Self> {
        let n = weights.len();
        if data.len() != n * n {
            return Err(Error::LengthMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        if let Some(idx) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "matrix entry {idx} is not finite"
            )));
        }
        Ok(Self {
            n,
            data,
            weights,
            source_label: source_label.into(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn source_label(&self) -> &str {
        &self.source_label
    }

    pub(crate) fn to_faer(&self) -> faer::Mat<f64> {
        faer::Mat::from_fn(self.n, self.n, |i, j| self.data[i * self.n + j])
    }

    /// Matrix-vector product.
    pub fn apply(&self, density: &[f64]) -> Result<Vec<f64>> {
        if density.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: density.len(),
            });
        }
        Ok(self
            .data
            .chunks_exact(self.n)
            .map(|row| row.iter().zip(density).map(|(a, d)| a * d).sum())
            .collect())
    }

    /// Similarity transform B = D^{1/2} A D^{-1/2} with D = diag(weights).
    /// B has the same eigenvalues, and its singular values discretize the
    /// L^2 singular values of the underlying operator.
    pub fn symmetrize(&self) -> Result<DenseMatrix> {
        if let Some(index) = self.weights.iter().position(|&w| w <= 0.0) {
            return Err(Error::NonPositiveWeight {
                index,
                weight: self.weights[index],
            });
        }
        let sqrt_w: Vec<f64> = self.weights.iter().map(|w| w.sqrt()).collect();
        let mut data = vec![0.0; self.n * self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                data[i * self.n + j] = self.data[i * self.n + j] * sqrt_w[i] / sqrt_w[j];
            }
        }
        Ok(DenseMatrix { n: self.n, data })
    }
}

/// Assembles the dense matrix over a node set. Rows are computed in
/// parallel; each row accumulates its off-diagonal sum in index order, so
/// the result does not depend on the thread schedule.
pub fn assemble(quad: &SurfaceQuadrature) -> Result<NpMatrix> {
    if quad.is_empty() {
        return Err(Error::EmptyQuadrature(quad.label.clone()));
    }
    let n = quad.len();
    let positions: Vec<Vec3> = quad.nodes.iter().map(|n| n.position).collect();
    let normals: Vec<Vec3> = quad.nodes.iter().map(|n| n.normal).collect();
    let weights: Vec<f64> = quad.nodes.iter().map(|n| n.weight).collect();
    let threshold = COINCIDENCE_EPS * quad.diameter();
    let threshold2 = threshold * threshold;

    let mut data = vec![0.0f64; n * n];
    data.par_chunks_mut(n)
        .enumerate()
        .try_for_each(|(i, row)| -> Result<()> {
            let xi = positions[i];
            let mut off_sum = 0.0;
            for j in 0..n {
                if j == i {
                    continue;
                }
                let d = positions[j] - xi;
                let r2 = d.norm_squared();
                if r2 <= threshold2 {
                    return Err(Error::CoincidentNodes {
                        i,
                        j,
                        dist: r2.sqrt(),
                        threshold,
                    });
                }
                let value = d.dot(&normals[j]) / (4.0 * PI * r2 * r2.sqrt()) * weights[j];
                row[j] = value;
                off_sum += value;
            }
            row[i] = 0.5 - off_sum;
            Ok(())
        })?;

    if let Some(idx) = data.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidGeometry(format!(
            "assembled entry ({}, {}) is not finite",
            idx / n,
            idx % n
        )));
    }

    Ok(NpMatrix {
        n,
        data,
        weights,
        source_label: quad.label.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{build_quadrature, sphere, torus};

    #[test]
    fn kernel_direct_value() {
        let v = np_kernel(
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
        )
        .unwrap();
        let expected = 1.0 / (8.0 * 2.0f64.sqrt() * PI);
        assert!((v - expected).abs() < 1e-15, "{v} vs {expected}");
    }

    #[test]
    fn kernel_on_unit_sphere_closed_form() {
        // with n_y = y on the unit sphere: <y-x, y> = 1 - x.y and
        // |x-y|^2 = 2(1 - x.y), so k = 1/(8 sqrt(2) pi sqrt(1 - x.y))
        let dirs = [
            (Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)),
            (Vec3::new(0.6, 0.8, 0.0), Vec3::new(0.0, 0.0, 1.0)),
            (
                Vec3::new(0.36, 0.48, 0.8),
                Vec3::new(-0.8, 0.6, 0.0),
            ),
            (
                Vec3::new(2.0 / 3.0, -2.0 / 3.0, 1.0 / 3.0),
                Vec3::new(-2.0 / 7.0, 3.0 / 7.0, 6.0 / 7.0),
            ),
        ];
        for (x, y) in dirs {
            assert!((x.norm() - 1.0).abs() < 1e-12 && (y.norm() - 1.0).abs() < 1e-12);
            let v = np_kernel(x, y, y).unwrap();
            let expected = 1.0 / (8.0 * 2.0f64.sqrt() * PI * (1.0 - x.dot(&y)).sqrt());
            assert!((v - expected).abs() < 1e-14 * expected.abs().max(1.0));
        }
    }

    #[test]
    fn kernel_vanishes_on_flat_patch() {
        let v = np_kernel(
            Vec3::new(0.3, -0.4, 0.0),
            Vec3::new(1.2, 0.7, 0.0),
            Vec3::new(0.0, 0.0, 1.0),
        )
        .unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn kernel_rejects_coincident_points() {
        let x = Vec3::new(0.1, 0.2, 0.3);
        assert!(matches!(
            np_kernel(x, x, Vec3::new(0.0, 0.0, 1.0)),
            Err(Error::CoincidentKernelPoints)
        ));
    }

    #[test]
    fn row_sums_hit_one_half() {
        let quad = build_quadrature(&sphere(1.0).unwrap(), 8, 16).unwrap();
        let m = assemble(&quad).unwrap();
        let n = m.n();
        for i in 0..n {
            let sum: f64 = m.row(i).iter().sum();
            assert!((sum - 0.5).abs() <= 1e-13 * n as f64, "row {i}: {sum}");
        }
    }

    #[test]
    fn apply_ones_gives_half_and_basis_gives_columns() {
        let quad = build_quadrature(&torus(2.0, 1.0).unwrap(), 8, 8).unwrap();
        let m = assemble(&quad).unwrap();
        let n = m.n();
        let ones = vec![1.0; n];
        let out = m.apply(&ones).unwrap();
        for v in &out {
            assert!((v - 0.5).abs() <= 1e-13 * n as f64);
        }
        let mut e3 = vec![0.0; n];
        e3[3] = 1.0;
        let col = m.apply(&e3).unwrap();
        for i in 0..n {
            assert_eq!(col[i], m.entry(i, 3));
        }
        assert!(matches!(
            m.apply(&[1.0, 2.0]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn sphere_off_diagonals_positive() {
        let quad = build_quadrature(&sphere(1.0).unwrap(), 8, 16).unwrap();
        let m = assemble(&quad).unwrap();
        for i in 0..m.n() {
            for j in 0..m.n() {
                if i != j {
                    assert!(m.entry(i, j) > 0.0);
                }
            }
        }
    }

    #[test]
    fn coincident_nodes_named_in_error() {
        let quad = build_quadrature(&sphere(1.0).unwrap(), 8, 16).unwrap();
        let mut broken = quad.clone();
        let dup = broken.nodes[5].clone();
        broken.nodes[11] = dup;
        match assemble(&broken) {
            Err(Error::CoincidentNodes { i, j, .. }) => {
                assert!((i == 5 && j == 11) || (i == 11 && j == 5));
            }
            other => panic!("expected coincident-node error, got {other:?}"),
        }
    }

    #[test]
    fn symmetrize_keeps_uniform_weights_fixed() {
        let data = vec![0.5, 0.1, 0.2, 0.5];
        let m = NpMatrix::from_raw(data.clone(), vec![2.0, 2.0], "uniform").unwrap();
        let b = m.symmetrize().unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(b.entry(i, j), m.entry(i, j));
            }
        }
    }

    #[test]
    fn symmetrize_rejects_nonpositive_weights() {
        let m = NpMatrix::from_raw(vec![0.0; 4], vec![1.0, -1.0], "bad").unwrap();
        assert!(matches!(
            m.symmetrize(),
            Err(Error::NonPositiveWeight { index: 1, .. })
        ));
    }

    #[test]
    fn from_raw_validates_shape_and_finiteness() {
        assert!(matches!(
            NpMatrix::from_raw(vec![0.0; 3], vec![1.0, 1.0], "shape"),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(NpMatrix::from_raw(vec![0.0, f64::NAN, 0.0, 0.0], vec![1.0, 1.0], "nan").is_err());
    }
}
