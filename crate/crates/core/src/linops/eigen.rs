use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::math::{abs, sqrt};

/// Eigenpairs of a symmetric matrix: `A = S diag(values) S^T` with orthonormal `S`.
///
/// `vectors` is row-major `m x m`; column `j` is the eigenvector for `values[j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigen {
    values: Vec<f64>,
    vectors: Vec<f64>,
}

impl Eigen {
    pub fn new(values: Vec<f64>, vectors: Vec<f64>) -> Result<Self> {
        check_dim(values.len() * values.len(), vectors.len())?;
        if values.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self { values, vectors })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Component `i` of eigenvector `j`.
    pub fn vector_entry(&self, i: usize, j: usize) -> f64 {
        self.vectors[i * self.dim() + j]
    }

    /// `S^T x`
    pub fn to_modal(&self, x: &[f64]) -> Vec<f64> {
        let m = self.dim();
        let mut out = vec![0.0; m];
        for (row, xi) in self.vectors.chunks_exact(m).zip(x) {
            if *xi == 0.0 {
                continue;
            }
            for (o, s) in out.iter_mut().zip(row) {
                *o += s * xi;
            }
        }
        out
    }

    /// `S c`
    pub fn from_modal(&self, c: &[f64]) -> Vec<f64> {
        let m = self.dim();
        self.vectors
            .chunks_exact(m)
            .map(|row| crate::math::dot(row, c))
            .collect()
    }
}

/// Cyclic Jacobi eigensolver for a small dense symmetric matrix (row-major).
///
/// Returns eigenvalues in ascending order with matching orthonormal eigenvectors.
/// Intended for operators up to a few hundred unknowns; the benchmark Laplacians
/// use their closed-form sine modes instead.
pub fn jacobi_eigen(m: usize, a: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    check_dim(m * m, a.len())?;
    let mut a = a.to_vec();
    let mut v = vec![0.0; m * m];
    for i in 0..m {
        v[i * m + i] = 1.0;
    }
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>();
    for _sweep in 0..100 {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * m + j] * a[i * m + j])
            .sum();
        if off <= 1e-30 * scale || off == 0.0 {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                let apq = a[p * m + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * m + p];
                let aqq = a[q * m + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / sqrt(1.0 + t * t);
                let s = t * c;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
                for k in 0..m {
                    let vkp = v[k * m + p];
                    let vkq = v[k * m + q];
                    v[k * m + p] = c * vkp - s * vkq;
                    v[k * m + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| a[i * m + i].total_cmp(&a[j * m + j]));
    let values = order.iter().map(|&i| a[i * m + i]).collect();
    let mut vectors = vec![0.0; m * m];
    for (new_j, &old_j) in order.iter().enumerate() {
        for i in 0..m {
            vectors[i * m + new_j] = v[i * m + old_j];
        }
    }
    debug_assert!(vectors.iter().all(|x: &f64| abs(*x) <= 1.0 + 1e-12));
    Ok((values, vectors))
}
