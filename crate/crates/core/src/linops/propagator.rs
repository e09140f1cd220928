use alloc::collections::BTreeMap;
use alloc::rc::Rc;
use core::cell::RefCell;

use super::dense::{expm, DenseMatrix};
use super::operator::SpdOperator;
use super::state::StateVector;
use crate::error::{check_dim, Error, Result};
use crate::math::{cos, sin, sqrt};

/// How `exp(-tM)` is applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    /// Exact rotation of each eigenmode; needs the operator's eigenpairs.
    Spectral,
    /// Dense `2m x 2m` Padé exponential of `-tM`, cached per `t`.
    DensePade,
}

/// The solution operator of `z' + M z = 0` bound to one SPD operator.
///
/// The dense cache uses interior mutability without locking, so a
/// `DensePade` propagator must stay on one thread; build one per worker.
pub struct Propagator<'a> {
    op: &'a SpdOperator,
    backend: Backend,
    cache: RefCell<BTreeMap<u64, Rc<DenseMatrix>>>,
}

impl<'a> Propagator<'a> {
    pub fn new(op: &'a SpdOperator, backend: Backend) -> Result<Self> {
        if backend == Backend::Spectral && op.eigen().is_none() {
            return Err(Error::MissingEigenstructure);
        }
        Ok(Self {
            op,
            backend,
            cache: RefCell::new(BTreeMap::new()),
        })
    }

    pub fn operator(&self) -> &'a SpdOperator {
        self.op
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    /// Number of cached dense exponentials.
    pub fn cached_exponentials(&self) -> usize {
        self.cache.borrow().len()
    }

    /// `exp(-tM) z` for `t >= 0`.
    pub fn exp_action(&self, t: f64, z: &StateVector) -> Result<StateVector> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidArgument {
                name: "t",
                value: t,
            });
        }
        self.propagate(t, z)
    }

    /// `exp(-tM) z` for any real `t`; negative `t` runs the group backwards.
    pub fn propagate(&self, t: f64, z: &StateVector) -> Result<StateVector> {
        check_dim(self.op.dim(), z.dim())?;
        if t == 0.0 {
            return Ok(z.clone());
        }
        match self.backend {
            Backend::Spectral => Ok(self.spectral(t, z)),
            Backend::DensePade => {
                let e = self.dense_exponential(t)?;
                let m = z.dim();
                let mut stacked = z.u.clone();
                stacked.extend_from_slice(&z.v);
                let mut out = e.matvec(&stacked);
                let v = out.split_off(m);
                Ok(StateVector { u: out, v })
            }
        }
    }

    /// `phi_1(-kM) M z = (z - exp(-kM) z) / k`.
    pub fn phi1m_action(&self, k: f64, z: &StateVector) -> Result<StateVector> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::InvalidArgument {
                name: "k",
                value: k,
            });
        }
        let e = self.exp_action(k, z)?;
        Ok((z - &e).scaled(1.0 / k))
    }

    fn spectral(&self, t: f64, z: &StateVector) -> StateVector {
        let eig = self.op.eigen().expect("checked at construction");
        let a = eig.to_modal(&z.u);
        let b = eig.to_modal(&z.v);
        let mut ra = alloc::vec::Vec::with_capacity(a.len());
        let mut rb = alloc::vec::Vec::with_capacity(a.len());
        for ((&lambda, &aj), &bj) in eig.values().iter().zip(&a).zip(&b) {
            let w = sqrt(lambda);
            let (s, c) = (sin(w * t), cos(w * t));
            ra.push(c * aj + s / w * bj);
            rb.push(-w * s * aj + c * bj);
        }
        StateVector {
            u: eig.from_modal(&ra),
            v: eig.from_modal(&rb),
        }
    }

    fn dense_exponential(&self, t: f64) -> Result<Rc<DenseMatrix>> {
        let key = t.to_bits();
        if let Some(e) = self.cache.borrow().get(&key) {
            return Ok(Rc::clone(e));
        }
        let m = self.op.dim();
        let a = self.op.to_dense();
        // -tM = [[0, tI], [-tA, 0]]
        let mut g = DenseMatrix::zeros(2 * m);
        for i in 0..m {
            g.set(i, m + i, t);
            for j in 0..m {
                g.set(m + i, j, -t * a[i * m + j]);
            }
        }
        let e = Rc::new(expm(&g)?);
        self.cache.borrow_mut().insert(key, Rc::clone(&e));
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::PI;

    fn unit() -> SpdOperator {
        SpdOperator::dense(1, vec![1.0])
            .unwrap()
            .with_computed_eigen()
            .unwrap()
    }

    #[test]
    fn quarter_period_rotation() {
        let a = unit();
        let z = StateVector::new(vec![1.0], vec![0.0]).unwrap();
        for backend in [Backend::Spectral, Backend::DensePade] {
            let p = Propagator::new(&a, backend).unwrap();
            let r = p.exp_action(PI / 2.0, &z).unwrap();
            assert!(r.u[0].abs() < 1e-15, "{backend:?}");
            assert!((r.v[0] + 1.0).abs() < 1e-15, "{backend:?}");
        }
    }

    #[test]
    fn zero_time_is_identity() {
        let a = unit();
        let p = Propagator::new(&a, Backend::Spectral).unwrap();
        let z = StateVector::new(vec![0.4], vec![-2.0]).unwrap();
        assert_eq!(p.exp_action(0.0, &z).unwrap(), z);
    }

    #[test]
    fn phi1m_half_period() {
        let a = unit();
        let p = Propagator::new(&a, Backend::Spectral).unwrap();
        let z = StateVector::new(vec![1.0], vec![0.0]).unwrap();
        let r = p.phi1m_action(PI, &z).unwrap();
        assert!((r.u[0] - 2.0 / PI).abs() < 1e-15);
        assert!(r.v[0].abs() < 1e-15);
        assert_eq!(
            p.phi1m_action(PI, &StateVector::zeros(1)).unwrap(),
            StateVector::zeros(1)
        );
    }

    #[test]
    fn argument_errors() {
        let a = unit();
        let p = Propagator::new(&a, Backend::Spectral).unwrap();
        let z = StateVector::zeros(1);
        assert!(p.exp_action(-1.0, &z).is_err());
        assert!(p.phi1m_action(0.0, &z).is_err());
        assert!(p.phi1m_action(-0.1, &z).is_err());
        let no_eig = SpdOperator::dense(1, vec![1.0]).unwrap();
        assert!(matches!(
            Propagator::new(&no_eig, Backend::Spectral),
            Err(Error::MissingEigenstructure)
        ));
    }

    #[test]
    fn dense_cache_replays_bit_identically() {
        let a = SpdOperator::dirichlet_laplacian(3, 1.0, 0.25).unwrap();
        let p = Propagator::new(&a, Backend::DensePade).unwrap();
        let z = StateVector::new(vec![1.0, 2.0, 3.0], vec![0.5, 0.0, -0.5]).unwrap();
        let first = p.exp_action(0.1, &z).unwrap();
        assert_eq!(p.cached_exponentials(), 1);
        let again = p.exp_action(0.1, &z).unwrap();
        assert_eq!(p.cached_exponentials(), 1);
        assert_eq!(first, again);
    }
}
