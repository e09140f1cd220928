//! Piecewise-quadratic time reconstruction of the midpoint approximant.
//!
//! On each interval the reconstruction is
//! `Zhat(t) = Z^{n-1} - (t - t^{n-1}) phi_1(-kM) M Z^{n-1} + Psi(t)`,
//! where `Psi` integrates the linear interpolant `psi` of `exp(-kM/2) (0, f)`
//! through `t^{n-1}` and `t^{n-1/2}`. It matches the nodal values at both
//! ends, so it is continuous in time, and its residual is second order.
//! [`ReconPieces::optimal_integrand`] assembles the integrand of the
//! second-order error bound from three a posteriori pieces.

use crate::error::{check_dim, Result};
use crate::linops::{Propagator, StateVector};
use crate::stepper::{IntervalRecord, StepCache};

/// An interval together with the exponential actions the reconstruction needs.
#[derive(Clone, Debug)]
pub struct ReconPieces<'r> {
    rec: &'r IntervalRecord,
    cache: StepCache,
}

impl<'r> ReconPieces<'r> {
    /// Recomputes the cached actions from the interval data.
    pub fn new(prop: &Propagator<'_>, rec: &'r IntervalRecord) -> Result<Self> {
        let half = 0.5 * rec.k;
        let cache = StepCache {
            half_f_mid: prop.exp_action(half, &StateVector::forcing(&rec.f_mid))?,
            half_f_left: prop.exp_action(half, &StateVector::forcing(&rec.f_left))?,
            phi1m_z_left: prop.phi1m_action(rec.k, &rec.z_left)?,
        };
        Ok(Self { rec, cache })
    }

    /// Reuses the actions computed while stepping.
    pub fn from_cache(rec: &'r IntervalRecord, cache: StepCache) -> Self {
        Self { rec, cache }
    }

    pub fn record(&self) -> &'r IntervalRecord {
        self.rec
    }

    pub fn cache(&self) -> &StepCache {
        &self.cache
    }

    /// `exp(-kM/2) (0, f_mid - f_left)`
    fn half_f_jump(&self) -> StateVector {
        &self.cache.half_f_mid - &self.cache.half_f_left
    }

    /// `psi(t) = exp(-kM/2) (fbar_mid + 2/k (t - t_mid)(fbar_mid - fbar_left))`
    pub fn psi(&self, t: f64) -> Result<StateVector> {
        self.rec.check_contains(t)?;
        let mut out = self.cache.half_f_mid.clone();
        out.axpy(
            2.0 / self.rec.k * (t - self.rec.t_mid()),
            &self.half_f_jump(),
        );
        Ok(out)
    }

    /// `Psi(t) = int_{t_left}^t psi(s) ds`
    pub fn big_psi(&self, t: f64) -> Result<StateVector> {
        self.rec.check_contains(t)?;
        let tau = t - self.rec.t_left;
        let mut out = self.cache.half_f_mid.scaled(tau);
        out.axpy(
            tau * (t - self.rec.t_right) / self.rec.k,
            &self.half_f_jump(),
        );
        Ok(out)
    }

    /// `Zhat(t)`
    pub fn reconstruction(&self, t: f64) -> Result<StateVector> {
        let psi_int = self.big_psi(t)?;
        let mut out = self.rec.z_left.clone();
        out.axpy(-(t - self.rec.t_left), &self.cache.phi1m_z_left);
        out.axpy(1.0, &psi_int);
        Ok(out)
    }

    /// Closed form of `Zhat(t) - Z(t) = (t - t_left)(t - t_right)/k * exp(-kM/2)(0, f_mid - f_left)`.
    pub fn recon_minus_linear(&self, t: f64) -> Result<StateVector> {
        self.rec.check_contains(t)?;
        let q = (t - self.rec.t_left) * (t - self.rec.t_right) / self.rec.k;
        Ok(self.half_f_jump().scaled(q))
    }

    /// Interpolation defect `exp(-kM/2)(0, f(t)) - psi(t)`.
    pub fn forcing_defect(
        &self,
        prop: &Propagator<'_>,
        t: f64,
        f_at_t: &[f64],
    ) -> Result<StateVector> {
        let psi = self.psi(t)?;
        let e = prop.exp_action(0.5 * self.rec.k, &StateVector::forcing(f_at_t))?;
        Ok(&e - &psi)
    }

    /// Integrand `G(t)` of the second-order bound:
    /// `G = (Vhat - V + Rf_1 + Rbar_U, A(U - Uhat) + Rf_2 + Rbar_V)` with
    /// `Rf` the forcing defect and `Rbar = (exp(-kM/2) - I) R`.
    pub fn optimal_integrand(
        &self,
        prop: &Propagator<'_>,
        t: f64,
        f_at_t: &[f64],
    ) -> Result<StateVector> {
        check_dim(self.rec.z_left.dim(), f_at_t.len())?;
        let diff = self.recon_minus_linear(t)?;
        let r = self.rec.residual(prop, t, f_at_t)?;
        let damped = &prop.exp_action(0.5 * self.rec.k, &r)? - &r;
        let mut g = self.forcing_defect(prop, t, f_at_t)?;
        g.axpy(1.0, &damped);
        let a_diff = prop.operator().matvec(&diff.u);
        for (gi, d) in g.u.iter_mut().zip(&diff.v) {
            *gi += d;
        }
        for (gi, ad) in g.v.iter_mut().zip(&a_diff) {
            *gi -= ad;
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::{Backend, SpdOperator};
    use crate::stepper::take_step;
    use alloc::vec;
    use alloc::vec::Vec;

    fn forcing(t: f64) -> Vec<f64> {
        vec![(3.0 * t).sin(), t * t, 1.0 - t, (t).exp()]
    }

    fn record(a: &SpdOperator) -> (IntervalRecord, StepCache) {
        let p = Propagator::new(a, Backend::Spectral).unwrap();
        let z0 = StateVector::new(vec![0.3, -0.1, 0.8, 0.2], vec![0.0, 1.0, 0.5, -0.4]).unwrap();
        take_step(&p, 0.2, 0.45, &z0, &forcing).unwrap()
    }

    #[test]
    fn psi_nodes() {
        let a = SpdOperator::dirichlet_laplacian(4, 1.0, 0.2).unwrap();
        let (rec, cache) = record(&a);
        let pieces = ReconPieces::from_cache(&rec, cache.clone());
        assert!((&pieces.psi(rec.t_left).unwrap() - &cache.half_f_left).max_abs() < 1e-15);
        assert!((&pieces.psi(rec.t_mid()).unwrap() - &cache.half_f_mid).max_abs() < 1e-15);
        assert_eq!(pieces.big_psi(rec.t_left).unwrap().max_abs(), 0.0);
        let end = pieces.big_psi(rec.t_right).unwrap();
        assert!((&end - &cache.half_f_mid.scaled(rec.k)).max_abs() < 1e-15);
        assert!(pieces.psi(0.5).is_err());
    }

    #[test]
    fn cached_pieces_match_fresh_evaluation() {
        let a = SpdOperator::dirichlet_laplacian(4, 1.0, 0.2).unwrap();
        let p = Propagator::new(&a, Backend::Spectral).unwrap();
        let (rec, cache) = record(&a);
        let fresh = ReconPieces::new(&p, &rec).unwrap();
        assert_eq!(fresh.cache().half_f_mid, cache.half_f_mid);
        assert_eq!(fresh.cache().half_f_left, cache.half_f_left);
        assert_eq!(fresh.cache().phi1m_z_left, cache.phi1m_z_left);
    }

    #[test]
    fn recon_minus_linear_roots_and_midpoint() {
        let a = SpdOperator::dirichlet_laplacian(4, 1.0, 0.2).unwrap();
        let (rec, cache) = record(&a);
        let pieces = ReconPieces::from_cache(&rec, cache.clone());
        assert_eq!(
            pieces.recon_minus_linear(rec.t_left).unwrap().max_abs(),
            0.0
        );
        assert_eq!(
            pieces.recon_minus_linear(rec.t_right).unwrap().max_abs(),
            0.0
        );
        let mid = pieces.recon_minus_linear(rec.t_mid()).unwrap();
        let expected = (&cache.half_f_mid - &cache.half_f_left).scaled(-rec.k / 4.0);
        assert!((&mid - &expected).max_abs() < 1e-15);
    }

    #[test]
    fn reconstruction_left_node_is_exact() {
        let a = SpdOperator::dirichlet_laplacian(4, 1.0, 0.2).unwrap();
        let (rec, cache) = record(&a);
        let pieces = ReconPieces::from_cache(&rec, cache);
        assert_eq!(pieces.reconstruction(rec.t_left).unwrap(), rec.z_left);
    }
}
