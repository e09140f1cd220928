use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{check_dim, Result};

/// A pair of grid vectors `(u, v)` standing for displacement and velocity.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl StateVector {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        check_dim(u.len(), v.len())?;
        Ok(Self { u, v })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            u: vec![0.0; dim],
            v: vec![0.0; dim],
        }
    }

    /// The lifted forcing `(0, f)`.
    pub fn forcing(f: &[f64]) -> Self {
        Self {
            u: vec![0.0; f.len()],
            v: f.to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: f64, x: &StateVector) {
        debug_assert_eq!(self.dim(), x.dim());
        for (s, xi) in self.u.iter_mut().zip(&x.u) {
            *s += a * xi;
        }
        for (s, xi) in self.v.iter_mut().zip(&x.v) {
            *s += a * xi;
        }
    }

    pub fn scaled(&self, a: f64) -> StateVector {
        StateVector {
            u: self.u.iter().map(|x| a * x).collect(),
            v: self.v.iter().map(|x| a * x).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.v).all(|x| x.is_finite())
    }

    /// Largest absolute entry over both parts.
    pub fn max_abs(&self) -> f64 {
        self.u.iter().chain(&self.v).fold(0.0, |m, x| {
            if crate::math::abs(*x) > m {
                crate::math::abs(*x)
            } else {
                m
            }
        })
    }
}

fn zip_with(a: &StateVector, b: &StateVector, op: impl Fn(f64, f64) -> f64) -> StateVector {
    debug_assert_eq!(a.dim(), b.dim());
    StateVector {
        u: a.u.iter().zip(&b.u).map(|(x, y)| op(*x, *y)).collect(),
        v: a.v.iter().zip(&b.v).map(|(x, y)| op(*x, *y)).collect(),
    }
}

impl Add for &StateVector {
    type Output = StateVector;
    fn add(self, rhs: &StateVector) -> StateVector {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl Sub for &StateVector {
    type Output = StateVector;
    fn sub(self, rhs: &StateVector) -> StateVector {
        zip_with(self, rhs, |x, y| x - y)
    }
}

impl Mul<&StateVector> for f64 {
    type Output = StateVector;
    fn mul(self, rhs: &StateVector) -> StateVector {
        rhs.scaled(self)
    }
}

impl Neg for &StateVector {
    type Output = StateVector;
    fn neg(self) -> StateVector {
        self.scaled(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mismatched_parts_are_rejected() {
        assert!(StateVector::new(vec![1.0], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn arithmetic() {
        let a = StateVector::new(vec![1.0, 2.0], vec![3.0, 4.0]).unwrap();
        let b = StateVector::new(vec![0.5, 0.5], vec![1.0, 1.0]).unwrap();
        assert_eq!((&a - &b).u, vec![0.5, 1.5]);
        assert_eq!((2.0 * &b).v, vec![2.0, 2.0]);
        let mut c = a.clone();
        c.axpy(-1.0, &a);
        assert_eq!(c, StateVector::zeros(2));
        assert_eq!(a.max_abs(), 4.0);
    }
}
