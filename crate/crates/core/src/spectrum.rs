//! Eigenvalue extraction, ordering, the exact sphere spectrum, decay-constant
//! fitting, and the plasmonic-parameter map.

use crate::error::{Error, Result};
use crate::nystrom::NpMatrix;
use serde::{Deserialize, Serialize};

/// Eigenvalues ordered by descending modulus (ties by descending real part,
/// then descending imaginary part), singular values of the symmetrized
/// matrix, and the largest imaginary residual.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    /// (re, im) pairs; complex-conjugate pairs are kept as they come.
    pub eigenvalues: Vec<(f64, f64)>,
    /// Nonincreasing.
    pub singular_values: Vec<f64>,
    pub max_imag_residual: f64,
    pub n: usize,
}

impl SpectrumResult {
    /// Applies the ordering contract to raw eigensolver output.
    pub fn from_parts(mut eigenvalues: Vec<(f64, f64)>, singular_values: Vec<f64>) -> Self {
        eigenvalues.sort_by(|a, b| {
            let ma = modulus(*a);
            let mb = modulus(*b);
            mb.partial_cmp(&ma)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal))
                .then(b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal))
        });
        let max_imag_residual = eigenvalues.iter().map(|e| e.1.abs()).fold(0.0, f64::max);
        let n = eigenvalues.len();
        Self {
            eigenvalues,
            singular_values,
            max_imag_residual,
            n,
        }
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|&e| modulus(e)).collect()
    }
}

fn modulus(e: (f64, f64)) -> f64 {
    e.0.hypot(e.1)
}

/// Full dense eigensolve of the Nyström matrix plus the singular values of
/// its weight-symmetrized similarity transform.
pub fn eigenvalues(m: &NpMatrix) -> Result<SpectrumResult> {
    let a = m.to_faer();
    let eigs = a
        .eigenvalues()
        .map_err(|e| Error::EigenSolver(format!("eigenvalue iteration failed: {e:?}")))?;
    let b = m.symmetrize()?.to_faer();
    let singular_values = b
        .singular_values()
        .map_err(|e| Error::EigenSolver(format!("singular-value iteration failed: {e:?}")))?;
    Ok(SpectrumResult::from_parts(
        eigs.into_iter().map(|c| (c.re, c.im)).collect(),
        singular_values,
    ))
}

/// First `count` entries of the exact sphere spectrum: the value 1/(2(2k+1))
/// repeated with multiplicity 2k+1, k = 0, 1, 2, ..., in descending order.
pub fn exact_sphere_spectrum(count: usize) -> Vec<f64> {
    let mut values = Vec::with_capacity(count);
    let mut k = 0usize;
    while values.len() < count {
        let value = 1.0 / (2.0 * (2 * k + 1) as f64);
        for _ in 0..(2 * k + 1) {
            if values.len() == count {
                break;
            }
            values.push(value);
        }
        k += 1;
    }
    values
}

/// Index window [j_min, j_max], inclusive, 0-based with the top eigenvalue
/// at j = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitWindow {
    pub j_min: usize,
    pub j_max: usize,
}

impl FitWindow {
    pub fn new(j_min: usize, j_max: usize) -> Self {
        Self { j_min, j_max }
    }

    /// Default window for an N-point discretization: [16, min(N^{2/3}, N/8)].
    /// Below the lower end the pre-asymptotic constant dominates; above
    /// N^{2/3} the eigenvalues of the discretized weakly singular kernel are
    /// quadrature noise.
    pub fn default_for(n: usize) -> Self {
        // the epsilon keeps exact cube powers (512 -> 64) from rounding down
        let upper = (((n as f64).powf(2.0 / 3.0) + 1e-9).floor() as usize).min(n / 8);
        Self {
            j_min: 16,
            j_max: upper,
        }
    }
}

/// Decay-constant fit: the median of |λ_j| sqrt(j) over the window, plus a
/// free-slope log–log regression as a diagnostic.
#[derive(Debug, Clone)]
pub struct WeylFit {
    pub fitted_constant: f64,
    pub slope: f64,
    pub window: FitWindow,
    pub predicted_constant: f64,
    pub relative_deviation: f64,
    /// |λ_j| sqrt(j) for each included j, in index order.
    pub weighted_sequence: Vec<f64>,
    /// Window entries skipped because the value was not positive.
    pub excluded: usize,
}

/// Fits the constant of a j^{-1/2} decay law over `moduli` (0-based, the
/// j = 0 entry being the top eigenvalue). The median of |λ_j| sqrt(j) is
/// robust against the multiplicity staircase that plain least squares trips
/// on; the regression slope is reported for diagnostics only.
pub fn weyl_fit(moduli: &[f64], window: FitWindow, predicted: f64) -> Result<WeylFit> {
    let FitWindow { j_min, j_max } = window;
    if j_min < 1 || j_min > j_max || j_max >= moduli.len() {
        return Err(Error::InvalidWindow {
            j_min,
            j_max,
            n: moduli.len(),
        });
    }
    let mut weighted = Vec::with_capacity(j_max - j_min + 1);
    let mut excluded = 0usize;
    let (mut sx, mut sy, mut sxx, mut sxy, mut count) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for j in j_min..=j_max {
        let value = moduli[j];
        if !(value > 0.0) {
            excluded += 1;
            continue;
        }
        weighted.push(value * (j as f64).sqrt());
        let (x, y) = ((j as f64).ln(), value.ln());
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        count += 1.0;
    }
    if weighted.is_empty() {
        return Err(Error::InvalidWindow {
            j_min,
            j_max,
            n: moduli.len(),
        });
    }
    let fitted_constant = median(&weighted);
    let slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    let relative_deviation = if predicted != 0.0 {
        (fitted_constant - predicted).abs() / predicted
    } else {
        f64::INFINITY
    };
    Ok(WeylFit {
        fitted_constant,
        slope,
        window,
        predicted_constant: predicted,
        relative_deviation,
        weighted_sequence: weighted,
        excluded,
    })
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Splits the (essentially real) eigenvalues by the sign of the real part,
/// re-enumerates each branch from rank 1 in descending modulus, and applies
/// the median estimator to each branch over the window of branch ranks.
/// Returns (c_plus, c_minus), zero for a branch with no entries in the
/// window. Exploratory output: the signed decay law is a conjecture, so
/// nothing downstream asserts these numbers.
pub fn signed_split_fit(
    eigenvalues: &[(f64, f64)],
    window: FitWindow,
) -> Result<(f64, f64)> {
    if window.j_min < 1 || window.j_min > window.j_max {
        return Err(Error::InvalidWindow {
            j_min: window.j_min,
            j_max: window.j_max,
            n: eigenvalues.len(),
        });
    }
    let branch = |positive: bool| -> f64 {
        let values: Vec<f64> = eigenvalues
            .iter()
            .filter(|e| if positive { e.0 > 0.0 } else { e.0 < 0.0 })
            .map(|&e| modulus(e))
            .collect();
        // ranks are 1-based within the branch
        let hi = values.len().min(window.j_max);
        if window.j_min > hi {
            return 0.0;
        }
        let weighted: Vec<f64> = (window.j_min..=hi)
            .map(|rank| values[rank - 1] * (rank as f64).sqrt())
            .collect();
        median(&weighted)
    };
    Ok((branch(true), branch(false)))
}

/// One eigenvalue mapped to the transmission parameter: the deviation
/// |ε - 1| = |-2λ/(λ - 1/2)| and the resolved value ε = 1 - 2λ/(λ - 1/2).
#[derive(Debug, Clone)]
pub struct PlasmonicEntry {
    pub index: usize,
    pub lambda: (f64, f64),
    /// λ = 1/2 is the pole of the map; the entry is skipped and marked.
    pub pole: bool,
    pub deviation: f64,
    pub epsilon: (f64, f64),
}

/// Maps every eigenvalue through the transmission-parameter identity; the
/// λ = 1/2 entry is flagged as the pole rather than evaluated.
pub fn plasmonic_eigenvalues(spectrum: &SpectrumResult) -> Vec<PlasmonicEntry> {
    spectrum
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(index, &(re, im))| {
            let den = (re - 0.5, im);
            let den_mod = modulus(den);
            if den_mod < 1e-12 {
                return PlasmonicEntry {
                    index,
                    lambda: (re, im),
                    pole: true,
                    deviation: f64::NAN,
                    epsilon: (f64::NAN, f64::NAN),
                };
            }
            // -2λ/(λ - 1/2) in complex arithmetic
            let num = (-2.0 * re, -2.0 * im);
            let quotient = (
                (num.0 * den.0 + num.1 * den.1) / (den_mod * den_mod),
                (num.1 * den.0 - num.0 * den.1) / (den_mod * den_mod),
            );
            PlasmonicEntry {
                index,
                lambda: (re, im),
                pole: false,
                deviation: modulus(quotient),
                epsilon: (1.0 + quotient.0, quotient.1),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nystrom::NpMatrix;

    fn diag_matrix(values: &[f64]) -> NpMatrix {
        let n = values.len();
        let mut data = vec![0.0; n * n];
        for (i, &v) in values.iter().enumerate() {
            data[i * n + i] = v;
        }
        NpMatrix::from_raw(data, vec![1.0; n], "diag").unwrap()
    }

    #[test]
    fn diagonal_spectrum_is_recovered_in_order() {
        let m = diag_matrix(&[1.0 / 6.0, 0.5, 1.0 / 6.0]);
        let s = eigenvalues(&m).unwrap();
        assert_eq!(s.n, 3);
        assert!(s.max_imag_residual == 0.0);
        let expect = [0.5, 1.0 / 6.0, 1.0 / 6.0];
        for (got, want) in s.eigenvalues.iter().zip(expect) {
            assert!((got.0 - want).abs() < 1e-12 && got.1 == 0.0);
        }
        // unit weights: singular values equal |eigenvalues| here
        for (sv, want) in s.singular_values.iter().zip(expect) {
            assert!((sv - want).abs() < 1e-12);
        }
    }

    #[test]
    fn ordering_contract_with_ties() {
        let s = SpectrumResult::from_parts(
            vec![(0.1, 0.0), (-0.3, 0.0), (0.3, 0.0), (0.0, -0.2), (0.0, 0.2)],
            vec![],
        );
        let got: Vec<(f64, f64)> = s.eigenvalues.clone();
        assert_eq!(
            got,
            vec![(0.3, 0.0), (-0.3, 0.0), (0.0, 0.2), (0.0, -0.2), (0.1, 0.0)]
        );
        assert!((s.max_imag_residual - 0.2).abs() < 1e-15);
    }

    #[test]
    fn exact_sphere_enumeration() {
        assert_eq!(
            exact_sphere_spectrum(4),
            vec![0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0]
        );
        let nine = exact_sphere_spectrum(9);
        assert_eq!(&nine[..4], &[0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0]);
        for v in &nine[4..] {
            assert_eq!(*v, 0.1);
        }
        // j = k^2 picks the first entry of the k-th cluster
        let big = exact_sphere_spectrum(3000);
        for k in [1usize, 5, 10, 20, 50] {
            let j = k * k;
            assert_eq!(big[j], 1.0 / (2.0 * (2 * k + 1) as f64));
        }
        // and lambda_{k^2} sqrt(k^2) -> 1/4 from below
        let mut prev = 0.0;
        for k in [5usize, 10, 20, 50] {
            let j = k * k;
            let v = big[j] * (j as f64).sqrt();
            assert!(v > prev && v < 0.25);
            prev = v;
        }
        assert!((prev - 0.25).abs() < 0.005);
    }

    #[test]
    fn exact_sphere_count_10000_tail() {
        let v = exact_sphere_spectrum(10000);
        assert_eq!(v.len(), 10000);
        // sum_{k<=99} (2k+1) = 100^2 = 10000, so the last entry belongs to k=99
        assert_eq!(v[9999], 1.0 / 398.0);
    }

    #[test]
    fn weyl_fit_recovers_synthetic_law_exactly() {
        let moduli: Vec<f64> = (0..400)
            .map(|j| {
                if j == 0 {
                    0.5
                } else {
                    0.25 / (j as f64).sqrt()
                }
            })
            .collect();
        let fit = weyl_fit(&moduli, FitWindow::new(10, 300), 0.25).unwrap();
        assert!((fit.fitted_constant - 0.25).abs() < 1e-14);
        assert!((fit.slope + 0.5).abs() < 1e-12);
        assert!(fit.relative_deviation < 1e-13);
        assert_eq!(fit.excluded, 0);
    }

    #[test]
    fn weyl_fit_on_exact_sphere_spectrum() {
        let moduli = exact_sphere_spectrum(2600);
        let fit = weyl_fit(&moduli, FitWindow::new(100, 2500), 0.25).unwrap();
        assert!(
            fit.relative_deviation < 0.05,
            "relative deviation {}",
            fit.relative_deviation
        );
    }

    #[test]
    fn weyl_fit_window_validation_and_exclusion() {
        let moduli = vec![0.5, 0.2, 0.1, 0.0, 0.05];
        assert!(matches!(
            weyl_fit(&moduli, FitWindow::new(2, 7), 0.25),
            Err(Error::InvalidWindow { .. })
        ));
        assert!(matches!(
            weyl_fit(&moduli, FitWindow::new(0, 3), 0.25),
            Err(Error::InvalidWindow { .. })
        ));
        let fit = weyl_fit(&moduli, FitWindow::new(1, 4), 0.25).unwrap();
        assert_eq!(fit.excluded, 1); // the zero at j = 3
        assert_eq!(fit.weighted_sequence.len(), 3);
    }

    #[test]
    fn signed_split_recovers_interleaved_branches() {
        // branch-wise 0.3 i^{-1/2} laws, interleaved by magnitude
        let mut eigs: Vec<(f64, f64)> = Vec::new();
        for i in 1..=300 {
            let v = 0.3 / (i as f64).sqrt();
            eigs.push((v, 0.0));
            eigs.push((-v, 0.0));
        }
        let s = SpectrumResult::from_parts(eigs, vec![]);
        let (cp, cm) = signed_split_fit(&s.eigenvalues, FitWindow::new(16, 200)).unwrap();
        assert!((cp - 0.3).abs() < 1e-13, "{cp}");
        assert!((cm - 0.3).abs() < 1e-13, "{cm}");
    }

    #[test]
    fn signed_split_sphere_has_no_negative_branch() {
        let eigs: Vec<(f64, f64)> = exact_sphere_spectrum(600)
            .into_iter()
            .map(|v| (v, 0.0))
            .collect();
        let (cp, cm) = signed_split_fit(&eigs, FitWindow::new(16, 400)).unwrap();
        assert!(cp > 0.2);
        assert_eq!(cm, 0.0);
    }

    #[test]
    fn plasmonic_map_examples() {
        let s = SpectrumResult::from_parts(
            vec![(0.5, 0.0), (1.0 / 6.0, 0.0), (1e-9, 0.0)],
            vec![],
        );
        let entries = plasmonic_eigenvalues(&s);
        assert!(entries[0].pole);
        assert!(!entries[1].pole);
        assert!((entries[1].deviation - 1.0).abs() < 1e-12);
        assert!((entries[1].epsilon.0 - 2.0).abs() < 1e-12);
        assert!(entries[1].epsilon.1.abs() < 1e-15);
        // lambda -> 0: deviation -> 0, epsilon -> 1
        assert!(entries[2].deviation < 1e-8);
        assert!((entries[2].epsilon.0 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn fit_window_default_scales_with_n() {
        let w = FitWindow::default_for(2048);
        assert_eq!(w.j_min, 16);
        assert_eq!(w.j_max, 161);
        let w = FitWindow::default_for(512);
        assert_eq!(w.j_max, 64);
    }
}
