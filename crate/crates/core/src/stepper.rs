//! One integrating-factor midpoint step
//!
//! `Z^n = exp(-kM) Z^{n-1} + k exp(-kM/2) (0, f(t^{n-1/2}))`,
//!
//! the continuous piecewise-linear approximant through the nodal values, and
//! its residual `R(t) = Z'(t) + M Z(t) - (0, f(t))`, which is only first order
//! in the step size.

use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::linops::{Propagator, StateVector};
use crate::math::sqrt;

/// Data of one accepted (or trial) step on `[t_left, t_right]`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalRecord {
    pub t_left: f64,
    pub t_right: f64,
    /// `t_right - t_left`
    pub k: f64,
    pub z_left: StateVector,
    pub z_right: StateVector,
    /// `f(t_left + k/2)` on the grid
    pub f_mid: Vec<f64>,
    /// `f(t_left)` on the grid
    pub f_left: Vec<f64>,
}

/// Pieces of a step that the reconstruction reuses.
#[derive(Clone, Debug, PartialEq)]
pub struct StepCache {
    /// `exp(-kM/2) (0, f_mid)`
    pub half_f_mid: StateVector,
    /// `exp(-kM/2) (0, f_left)`
    pub half_f_left: StateVector,
    /// `phi_1(-kM) M z_left = (z_left - exp(-kM) z_left) / k`
    pub phi1m_z_left: StateVector,
}

fn check_step(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument {
            name: "k",
            value: k,
        })
    }
}

fn step_parts(
    prop: &Propagator<'_>,
    z_left: &StateVector,
    k: f64,
    f_mid: &[f64],
) -> Result<(StateVector, StateVector, StateVector)> {
    check_step(k)?;
    check_dim(prop.operator().dim(), f_mid.len())?;
    let full = prop.exp_action(k, z_left)?;
    let half_f = prop.exp_action(0.5 * k, &StateVector::forcing(f_mid))?;
    let mut z_right = full.clone();
    z_right.axpy(k, &half_f);
    Ok((z_right, full, half_f))
}

/// A single IF-midpoint step of size `k` from `z_left` with midpoint forcing `f_mid`.
pub fn if_step(
    prop: &Propagator<'_>,
    z_left: &StateVector,
    k: f64,
    f_mid: &[f64],
) -> Result<StateVector> {
    step_parts(prop, z_left, k, f_mid).map(|(z, _, _)| z)
}

/// Steps from `t_left` to `t_right`, sampling the forcing at `t_left` and the
/// midpoint, and returns the interval record with the reusable exponential actions.
pub fn take_step<F>(
    prop: &Propagator<'_>,
    t_left: f64,
    t_right: f64,
    z_left: &StateVector,
    forcing: &F,
) -> Result<(IntervalRecord, StepCache)>
where
    F: Fn(f64) -> Vec<f64> + ?Sized,
{
    let k = t_right - t_left;
    check_step(k)?;
    let f_mid = forcing(t_left + 0.5 * k);
    let f_left = forcing(t_left);
    let (z_right, full, half_f_mid) = step_parts(prop, z_left, k, &f_mid)?;
    let half_f_left = prop.exp_action(0.5 * k, &StateVector::forcing(&f_left))?;
    let phi1m_z_left = (z_left - &full).scaled(1.0 / k);
    let record = IntervalRecord {
        t_left,
        t_right,
        k,
        z_left: z_left.clone(),
        z_right,
        f_mid,
        f_left,
    };
    Ok((
        record,
        StepCache {
            half_f_mid,
            half_f_left,
            phi1m_z_left,
        },
    ))
}

impl IntervalRecord {
    pub fn t_mid(&self) -> f64 {
        self.t_left + 0.5 * self.k
    }

    pub(crate) fn check_contains(&self, t: f64) -> Result<()> {
        if t >= self.t_left && t <= self.t_right {
            Ok(())
        } else {
            Err(Error::OutsideInterval {
                t,
                left: self.t_left,
                right: self.t_right,
            })
        }
    }

    /// Difference quotient `(Z^n - Z^{n-1}) / k`.
    pub fn slope(&self) -> StateVector {
        (&self.z_right - &self.z_left).scaled(1.0 / self.k)
    }

    /// The linear interpolant `Z(t)`; exact copies of the nodal values at the endpoints.
    pub fn interpolant(&self, t: f64) -> Result<StateVector> {
        self.check_contains(t)?;
        if t == self.t_left {
            return Ok(self.z_left.clone());
        }
        if t == self.t_right {
            return Ok(self.z_right.clone());
        }
        let mut z = self.z_left.clone();
        z.axpy(t - self.t_left, &self.slope());
        Ok(z)
    }

    /// Residual `R(t) = dZ + M Z(t) - (0, f(t))` of the linear interpolant.
    ///
    /// `R` is affine on the interval; at `t = t_left` this returns the limit from the right.
    pub fn residual(&self, prop: &Propagator<'_>, t: f64, f_at_t: &[f64]) -> Result<StateVector> {
        check_dim(self.z_left.dim(), f_at_t.len())?;
        let z = self.interpolant(t)?;
        let mut r = self.slope();
        let mz = prop.operator().apply_m(&z)?;
        r.axpy(1.0, &mz);
        for (ri, fi) in r.v.iter_mut().zip(f_at_t) {
            *ri -= fi;
        }
        Ok(r)
    }
}

/// Squared first-order bound
/// `|||e(0)|||^2 / (1 - 2 theta) + (int |||R|||)^2 / (2 theta - 4 theta^2)`.
///
/// Take the square root to compare with a norm.
pub fn suboptimal_bound(theta: f64, e0_norm: f64, integral_r: f64) -> Result<f64> {
    check_theta(theta)?;
    if !(e0_norm >= 0.0) {
        return Err(Error::InvalidArgument {
            name: "e0_norm",
            value: e0_norm,
        });
    }
    if !(integral_r >= 0.0) {
        return Err(Error::InvalidArgument {
            name: "integral_r",
            value: integral_r,
        });
    }
    Ok(e0_norm * e0_norm / (1.0 - 2.0 * theta)
        + integral_r * integral_r / (2.0 * theta - 4.0 * theta * theta))
}

pub(crate) fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < 0.5 {
        Ok(())
    } else {
        Err(Error::InvalidArgument {
            name: "theta",
            value: theta,
        })
    }
}

/// The `theta` in `(0, 1/4]` for which `1 / sqrt(2 theta - 4 theta^2)` equals `c >= 2`.
///
/// `c = 5` gives `(5 - sqrt(21)) / 20`; `c = 2` gives `1/4`.
pub fn theta_for_constant(c: f64) -> Result<f64> {
    if !(c >= 2.0) || !c.is_finite() {
        return Err(Error::InvalidArgument {
            name: "c",
            value: c,
        });
    }
    Ok((1.0 - sqrt(1.0 - 4.0 / (c * c))) / 4.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::{Backend, SpdOperator};
    use alloc::vec;

    fn setup() -> SpdOperator {
        SpdOperator::dirichlet_laplacian(4, 1.0, 0.2).unwrap()
    }

    #[test]
    fn zero_data_stays_zero() {
        let a = setup();
        let p = Propagator::new(&a, Backend::Spectral).unwrap();
        let z = if_step(&p, &StateVector::zeros(4), 0.1, &[0.0; 4]).unwrap();
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn nonpositive_step_is_rejected() {
        let a = setup();
        let p = Propagator::new(&a, Backend::Spectral).unwrap();
        assert!(if_step(&p, &StateVector::zeros(4), 0.0, &[0.0; 4]).is_err());
        assert!(if_step(&p, &StateVector::zeros(4), -1.0, &[0.0; 4]).is_err());
        assert!(if_step(&p, &StateVector::zeros(4), 0.1, &[0.0; 3]).is_err());
    }

    #[test]
    fn interpolant_endpoints_and_midpoint() {
        let a = setup();
        let p = Propagator::new(&a, Backend::Spectral).unwrap();
        let z0 = StateVector::new(vec![0.1, 0.2, 0.3, 0.4], vec![1.0, 0.0, -1.0, 0.5]).unwrap();
        let f = |t: f64| vec![t, 1.0, t * t, 0.0];
        let (rec, _) = take_step(&p, 0.3, 0.55, &z0, &f).unwrap();
        assert_eq!(rec.interpolant(0.3).unwrap(), rec.z_left);
        assert_eq!(rec.interpolant(0.55).unwrap(), rec.z_right);
        let mid = rec.interpolant(rec.t_mid()).unwrap();
        let avg = (&rec.z_left + &rec.z_right).scaled(0.5);
        assert!((&mid - &avg).max_abs() < 1e-15);
        assert!(matches!(
            rec.interpolant(0.6),
            Err(Error::OutsideInterval { .. })
        ));
    }

    #[test]
    fn suboptimal_bound_arithmetic() {
        assert!((suboptimal_bound(0.25, 0.0, 1.0).unwrap() - 4.0).abs() < 1e-15);
        assert_eq!(suboptimal_bound(0.25, 0.0, 0.0).unwrap(), 0.0);
        let theta = (5.0 - 21f64.sqrt()) / 20.0;
        assert!((suboptimal_bound(theta, 0.0, 1.0).unwrap() - 25.0).abs() < 1e-12);
        assert!(suboptimal_bound(0.5, 0.0, 1.0).is_err());
        assert!(suboptimal_bound(0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn theta_from_constant() {
        let theta = theta_for_constant(5.0).unwrap();
        assert!((theta - (5.0 - 21f64.sqrt()) / 20.0).abs() < 1e-16);
        assert_eq!(theta_for_constant(2.0).unwrap(), 0.25);
        assert!(theta_for_constant(1.5).is_err());
    }
}
