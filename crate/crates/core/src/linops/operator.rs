use alloc::vec;
use alloc::vec::Vec;

use super::eigen::{jacobi_eigen, Eigen};
use super::state::StateVector;
use crate::error::{check_dim, Error, Result};
use crate::math::{abs, dot, sin, sqrt};

#[derive(Clone, Debug, PartialEq)]
enum Storage {
    Dense(Vec<f64>),
    Tridiagonal { diag: Vec<f64>, off: Vec<f64> },
}

/// A symmetric positive definite operator `A` on `R^m`.
///
/// The inner product on grid vectors is `<x, y> = w * sum_i x_i y_i` with a
/// uniform weight `w` (1 by default; the benchmarks use the mesh width so that
/// norms approximate continuous L2 norms). The quadratic form and the energy
/// norm are taken in that inner product.
#[derive(Clone, Debug, PartialEq)]
pub struct SpdOperator {
    dim: usize,
    storage: Storage,
    eig: Option<Eigen>,
    weight: f64,
}

impl SpdOperator {
    /// Dense symmetric matrix in row-major order. Symmetry is checked to
    /// `1e-12` relative; positivity by a Cholesky sweep.
    pub fn dense(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Empty("operator dimension must be positive"));
        }
        check_dim(dim * dim, entries.len())?;
        let scale = entries.iter().fold(0.0_f64, |m, x| m.max(abs(*x)));
        for i in 0..dim {
            for j in i + 1..dim {
                if abs(entries[i * dim + j] - entries[j * dim + i]) > 1e-12 * scale {
                    return Err(Error::InvalidArgument {
                        name: "symmetric matrix entry",
                        value: entries[i * dim + j],
                    });
                }
            }
        }
        cholesky_check(dim, &entries)?;
        Ok(Self {
            dim,
            storage: Storage::Dense(entries),
            eig: None,
            weight: 1.0,
        })
    }

    /// Symmetric tridiagonal matrix with the given diagonal and off-diagonal.
    pub fn tridiagonal(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        let dim = diag.len();
        if dim == 0 {
            return Err(Error::Empty("operator dimension must be positive"));
        }
        check_dim(dim - 1, off.len())?;
        // LDL^T pivots of a tridiagonal matrix
        let mut d = diag[0];
        if !(d > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        for i in 1..dim {
            d = diag[i] - off[i - 1] * off[i - 1] / d;
            if !(d > 0.0) {
                return Err(Error::NotPositiveDefinite);
            }
        }
        Ok(Self {
            dim,
            storage: Storage::Tridiagonal { diag, off },
            eig: None,
            weight: 1.0,
        })
    }

    /// `c / dx^2 * tridiag(-1, 2, -1)`, the second-order Dirichlet Laplacian
    /// scaled by the wave speed squared `c`, with its closed-form sine eigenpairs
    /// `lambda_j = 4c/dx^2 sin^2(j pi / (2(m+1)))`,
    /// `s_j[i] = sqrt(2/(m+1)) sin(i j pi / (m+1))`.
    pub fn dirichlet_laplacian(dim: usize, c: f64, dx: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::InvalidArgument {
                name: "c",
                value: c,
            });
        }
        if !(dx > 0.0) {
            return Err(Error::InvalidArgument {
                name: "dx",
                value: dx,
            });
        }
        let h2 = c / (dx * dx);
        let mut op = Self::tridiagonal(vec![2.0 * h2; dim], vec![-h2; dim.saturating_sub(1)])?;
        let n1 = (dim + 1) as f64;
        let pi = core::f64::consts::PI;
        let values = (1..=dim)
            .map(|j| {
                let s = sin(j as f64 * pi / (2.0 * n1));
                4.0 * h2 * s * s
            })
            .collect();
        let norm = sqrt(2.0 / n1);
        let mut vectors = vec![0.0; dim * dim];
        for i in 1..=dim {
            for j in 1..=dim {
                vectors[(i - 1) * dim + (j - 1)] = norm * sin((i * j) as f64 * pi / n1);
            }
        }
        op.eig = Some(Eigen::new(values, vectors)?);
        Ok(op)
    }

    /// Attaches eigenpairs computed by the Jacobi method.
    pub fn with_computed_eigen(mut self) -> Result<Self> {
        let (values, vectors) = jacobi_eigen(self.dim, &self.to_dense())?;
        self.eig = Some(Eigen::new(values, vectors)?);
        Ok(self)
    }

    /// Sets the uniform inner-product weight.
    pub fn with_inner_weight(mut self, weight: f64) -> Result<Self> {
        if !(weight > 0.0) || !weight.is_finite() {
            return Err(Error::InvalidArgument {
                name: "inner product weight",
                value: weight,
            });
        }
        self.weight = weight;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn inner_weight(&self) -> f64 {
        self.weight
    }

    pub fn eigen(&self) -> Option<&Eigen> {
        self.eig.as_ref()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        match &self.storage {
            Storage::Dense(a) => a.clone(),
            Storage::Tridiagonal { diag, off } => {
                let m = self.dim;
                let mut a = vec![0.0; m * m];
                for i in 0..m {
                    a[i * m + i] = diag[i];
                    if i + 1 < m {
                        a[i * m + i + 1] = off[i];
                        a[(i + 1) * m + i] = off[i];
                    }
                }
                a
            }
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.dim);
        match &self.storage {
            Storage::Dense(a) => a.chunks_exact(self.dim).map(|row| dot(row, x)).collect(),
            Storage::Tridiagonal { diag, off } => {
                let m = self.dim;
                (0..m)
                    .map(|i| {
                        let mut y = diag[i] * x[i];
                        if i > 0 {
                            y += off[i - 1] * x[i - 1];
                        }
                        if i + 1 < m {
                            y += off[i] * x[i + 1];
                        }
                        y
                    })
                    .collect()
            }
        }
    }

    /// Weighted inner product of grid vectors.
    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        self.weight * dot(x, y)
    }

    /// `<Ax, x>`
    pub fn quadform(&self, x: &[f64]) -> f64 {
        self.inner(&self.matvec(x), x)
    }

    /// `M z = (-v, A u)`.
    pub fn apply_m(&self, z: &StateVector) -> Result<StateVector> {
        check_dim(self.dim, z.dim())?;
        Ok(StateVector {
            u: z.v.iter().map(|x| -x).collect(),
            v: self.matvec(&z.u),
        })
    }

    /// Energy inner product `<A a_u, b_u> + <a_v, b_v>`.
    pub fn energy_inner(&self, a: &StateVector, b: &StateVector) -> Result<f64> {
        check_dim(self.dim, a.dim())?;
        check_dim(self.dim, b.dim())?;
        Ok(self.inner(&self.matvec(&a.u), &b.u) + self.inner(&a.v, &b.v))
    }

    /// Energy norm `sqrt(<A u, u> + <v, v>)`, evaluated through the quadratic
    /// form so that `A^{1/2}` is never formed.
    pub fn energy_norm(&self, z: &StateVector) -> Result<f64> {
        check_dim(self.dim, z.dim())?;
        let q = self.quadform(&z.u);
        if q < 0.0 {
            // tolerate roundoff on near-null vectors
            let scale = self.weight * dot(&z.u, &z.u) * self.spectral_bound();
            if q < -1e-12 * scale {
                return Err(Error::NotPositiveDefinite);
            }
        }
        Ok(sqrt(q.max(0.0) + self.inner(&z.v, &z.v)))
    }

    /// Gershgorin upper bound for the spectrum.
    fn spectral_bound(&self) -> f64 {
        match &self.storage {
            Storage::Dense(a) => a
                .chunks_exact(self.dim)
                .map(|row| row.iter().map(|x| abs(*x)).sum::<f64>())
                .fold(0.0, f64::max),
            Storage::Tridiagonal { diag, off } => (0..self.dim)
                .map(|i| {
                    abs(diag[i])
                        + if i > 0 { abs(off[i - 1]) } else { 0.0 }
                        + if i + 1 < self.dim { abs(off[i]) } else { 0.0 }
                })
                .fold(0.0, f64::max),
        }
    }
}

fn cholesky_check(m: usize, a: &[f64]) -> Result<()> {
    let mut l = vec![0.0; m * m];
    for j in 0..m {
        let mut d = a[j * m + j];
        for k in 0..j {
            d -= l[j * m + k] * l[j * m + k];
        }
        if !(d > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        let d = sqrt(d);
        l[j * m + j] = d;
        for i in j + 1..m {
            let mut s = a[i * m + j];
            for k in 0..j {
                s -= l[i * m + k] * l[j * m + k];
            }
            l[i * m + j] = s / d;
        }
    }
    Ok(())
}
