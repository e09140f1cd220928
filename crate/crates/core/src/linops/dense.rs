//! Small dense linear algebra: row-major square matrices, LU solves and the
//! order-13 Padé matrix exponential with scaling and squaring.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::math::{abs, ln};

/// Square row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        check_dim(n * n, data.len())?;
        Ok(Self { n, data })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: f64) {
        self.data[i * self.n + j] = x;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n);
        self.data
            .chunks_exact(self.n)
            .map(|row| crate::math::dot(row, x))
            .collect()
    }

    pub fn matmul(&self, rhs: &DenseMatrix) -> DenseMatrix {
        let n = self.n;
        let mut out = DenseMatrix::zeros(n);
        for i in 0..n {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `sum_i c_i * M_i`
    fn combination(terms: &[(f64, &DenseMatrix)]) -> DenseMatrix {
        let n = terms[0].1.n;
        let mut out = DenseMatrix::zeros(n);
        for (c, m) in terms {
            for (o, x) in out.data.iter_mut().zip(&m.data) {
                *o += c * x;
            }
        }
        out
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        let n = self.n;
        (0..n)
            .map(|j| (0..n).map(|i| abs(self.data[i * n + j])).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Solves `self * X = rhs` by LU with partial pivoting.
    pub fn solve(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        let n = self.n;
        check_dim(n, rhs.n)?;
        let mut a = self.data.clone();
        let mut b = rhs.data.clone();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| abs(a[i * n + col]).total_cmp(&abs(a[j * n + col])))
                .unwrap_or(col);
            if a[pivot * n + col] == 0.0 {
                return Err(Error::Singular);
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                    b.swap(col * n + j, pivot * n + j);
                }
            }
            let d = a[col * n + col];
            for i in col + 1..n {
                let factor = a[i * n + col] / d;
                if factor == 0.0 {
                    continue;
                }
                for j in col..n {
                    a[i * n + j] -= factor * a[col * n + j];
                }
                for j in 0..n {
                    b[i * n + j] -= factor * b[col * n + j];
                }
            }
        }
        for col in (0..n).rev() {
            let d = a[col * n + col];
            for j in 0..n {
                let mut s = b[col * n + j];
                for k in col + 1..n {
                    s -= a[col * n + k] * b[k * n + j];
                }
                b[col * n + j] = s / d;
            }
        }
        Ok(DenseMatrix { n, data: b })
    }
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// Backward-error threshold for the [13/13] approximant (Higham 2005).
const THETA_13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with the diagonal [13/13] Padé approximant.
pub fn expm(a: &DenseMatrix) -> Result<DenseMatrix> {
    let n = a.size();
    let norm = a.norm1();
    let squarings = if norm > THETA_13 {
        let s = libm::ceil(ln(norm / THETA_13) / core::f64::consts::LN_2);
        s as i32
    } else {
        0
    };
    let scale = libm::ldexp(1.0, -squarings);
    let a = DenseMatrix::combination(&[(scale, a)]);

    let b = &PADE13;
    let id = DenseMatrix::identity(n);
    let a2 = a.matmul(&a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);

    let u_inner = a6.matmul(&DenseMatrix::combination(&[
        (b[13], &a6),
        (b[11], &a4),
        (b[9], &a2),
    ]));
    let u_sum = DenseMatrix::combination(&[
        (1.0, &u_inner),
        (b[7], &a6),
        (b[5], &a4),
        (b[3], &a2),
        (b[1], &id),
    ]);
    let u = a.matmul(&u_sum);
    let v_inner = a6.matmul(&DenseMatrix::combination(&[
        (b[12], &a6),
        (b[10], &a4),
        (b[8], &a2),
    ]));
    let v = DenseMatrix::combination(&[
        (1.0, &v_inner),
        (b[6], &a6),
        (b[4], &a4),
        (b[2], &a2),
        (b[0], &id),
    ]);

    let p = DenseMatrix::combination(&[(1.0, &v), (1.0, &u)]);
    let q = DenseMatrix::combination(&[(1.0, &v), (-1.0, &u)]);
    let mut r = q.solve(&p)?;
    for _ in 0..squarings {
        r = r.matmul(&r);
    }
    Ok(r)
}
