//! Quadrature and the a posteriori estimators built on the reconstruction.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linops::Propagator;
use crate::math::sqrt;
use crate::reconstruct::ReconPieces;
use crate::stepper::{check_theta, IntervalRecord};

/// Three-point Gauss–Legendre nodes on `[-1, 1]` and their weights.
pub const GAUSS3_NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
pub const GAUSS3_WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];

/// Three-point Gauss–Legendre rule on `[a, b]`, exact for polynomials of degree five.
pub fn gauss3_integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> Result<f64> {
    try_gauss3(|t| Ok(f(t)), a, b)
}

/// [`gauss3_integrate`] for fallible integrands.
pub fn try_gauss3<F: FnMut(f64) -> Result<f64>>(mut f: F, a: f64, b: f64) -> Result<f64> {
    if !(a < b) {
        return Err(Error::InvalidArgument {
            name: "b - a",
            value: b - a,
        });
    }
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut sum = 0.0;
    for (x, w) in GAUSS3_NODES.iter().zip(&GAUSS3_WEIGHTS) {
        sum += w * f(mid + half * x)?;
    }
    Ok(half * sum)
}

/// `int_{J_n} |||G(s)||| ds` by three-point Gauss–Legendre.
pub fn interval_contribution<F>(
    prop: &Propagator<'_>,
    pieces: &ReconPieces<'_>,
    forcing: &F,
) -> Result<f64>
where
    F: Fn(f64) -> Vec<f64> + ?Sized,
{
    let rec = pieces.record();
    try_gauss3(
        |t| {
            let g = pieces.optimal_integrand(prop, t, &forcing(t))?;
            prop.operator().energy_norm(&g)
        },
        rec.t_left,
        rec.t_right,
    )
}

/// `int_{J_n} |||R(s)||| ds`, the first-order residual integral.
pub fn suboptimal_contribution<F>(
    prop: &Propagator<'_>,
    rec: &IntervalRecord,
    forcing: &F,
) -> Result<f64>
where
    F: Fn(f64) -> Vec<f64> + ?Sized,
{
    try_gauss3(
        |t| {
            let r = rec.residual(prop, t, &forcing(t))?;
            prop.operator().energy_norm(&r)
        },
        rec.t_left,
        rec.t_right,
    )
}

/// Sum of [`suboptimal_contribution`] over a completed run.
pub fn suboptimal_estimate<F>(
    prop: &Propagator<'_>,
    records: &[IntervalRecord],
    forcing: &F,
) -> Result<f64>
where
    F: Fn(f64) -> Vec<f64> + ?Sized,
{
    records.iter().try_fold(0.0, |acc, rec| {
        Ok(acc + suboptimal_contribution(prop, rec, forcing)?)
    })
}

/// `1 / sqrt(2 theta - 4 theta^2)`
pub fn theta_constant(theta: f64) -> Result<f64> {
    check_theta(theta)?;
    Ok(1.0 / sqrt(2.0 * theta - 4.0 * theta * theta))
}

/// `sqrt(e0^2 / (1 - 2 theta) + E^2 / (2 theta - 4 theta^2))`
pub fn optimal_bound(theta: f64, e0_norm: f64, global_e: f64) -> Result<f64> {
    let c = theta_constant(theta)?;
    Ok(sqrt(
        e0_norm * e0_norm / (1.0 - 2.0 * theta) + c * c * global_e * global_e,
    ))
}

/// Per-interval estimator contributions and the resulting global bound.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorBreakdown {
    pub interval_contribs: Vec<f64>,
    /// Left-to-right sum of the contributions.
    pub global_e: f64,
    pub e0_norm: f64,
    pub theta: f64,
    pub bound: f64,
    pub c_theta: f64,
}

impl EstimatorBreakdown {
    pub fn new(interval_contribs: Vec<f64>, e0_norm: f64, theta: f64) -> Result<Self> {
        let c_theta = theta_constant(theta)?;
        let global_e = interval_contribs.iter().fold(0.0, |acc, c| acc + c);
        let bound = optimal_bound(theta, e0_norm, global_e)?;
        Ok(Self {
            interval_contribs,
            global_e,
            e0_norm,
            theta,
            bound,
            c_theta,
        })
    }
}

/// Local estimator
/// `E_n = |||e(0)||| / (T sqrt(1 - 2 theta)) + c_theta / k_n * int_{J_n} |||G|||`.
///
/// The initial-error term is fixed for a run and computed once.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalEstimator {
    initial_term: f64,
    c_theta: f64,
}

impl LocalEstimator {
    pub fn new(theta: f64, e0_norm: f64, final_time: f64) -> Result<Self> {
        let c_theta = theta_constant(theta)?;
        if !(final_time > 0.0) {
            return Err(Error::InvalidArgument {
                name: "final_time",
                value: final_time,
            });
        }
        Ok(Self {
            initial_term: e0_norm / (final_time * sqrt(1.0 - 2.0 * theta)),
            c_theta,
        })
    }

    pub fn c_theta(&self) -> f64 {
        self.c_theta
    }

    pub fn eval(&self, k_n: f64, contribution: f64) -> Result<f64> {
        if !(k_n > 0.0) {
            return Err(Error::InvalidArgument {
                name: "k_n",
                value: k_n,
            });
        }
        Ok(self.initial_term + self.c_theta * contribution / k_n)
    }
}

/// Convenience wrapper around [`LocalEstimator`].
pub fn local_estimator(
    theta: f64,
    e0_norm: f64,
    final_time: f64,
    k_n: f64,
    contribution: f64,
) -> Result<f64> {
    LocalEstimator::new(theta, e0_norm, final_time)?.eval(k_n, contribution)
}

/// `bound / err`; `None` when the error vanishes.
pub fn effectivity_index(bound: f64, err_inf: f64) -> Option<f64> {
    if err_inf > 0.0 && err_inf.is_finite() {
        Some(bound / err_inf)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn gauss3_polynomial_exactness() {
        assert!((gauss3_integrate(|s| s * s, 0.0, 1.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((gauss3_integrate(|s| s.powi(5), 0.0, 1.0).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        let e = gauss3_integrate(|s| s.exp(), 0.0, 1.0).unwrap();
        assert!((e - (1f64.exp() - 1.0)).abs() < 1e-6);
        assert!(gauss3_integrate(|s| s, 1.0, 1.0).is_err());
        assert!(gauss3_integrate(|s| s, 1.0, 0.0).is_err());
    }

    #[test]
    fn gauss3_not_exact_for_degree_six() {
        let q = gauss3_integrate(|s| s.powi(6), 0.0, 1.0).unwrap();
        assert!((q - 1.0 / 7.0).abs() > 1e-6);
    }

    #[test]
    fn bound_constants() {
        assert!((optimal_bound(0.25, 0.0, 0.7).unwrap() - 1.4).abs() < 1e-15);
        let theta = (5.0 - 21f64.sqrt()) / 20.0;
        assert!((optimal_bound(theta, 0.0, 0.7).unwrap() - 3.5).abs() < 1e-12);
        assert_eq!(optimal_bound(0.25, 0.0, 0.0).unwrap(), 0.0);
        assert!(optimal_bound(0.6, 0.0, 1.0).is_err());
        // both terms
        let b = optimal_bound(0.25, 1.0, 1.0).unwrap();
        assert!((b * b - (2.0 + 4.0)).abs() < 1e-14);
    }

    #[test]
    fn breakdown_invariants() {
        let br = EstimatorBreakdown::new(vec![0.1, 0.2, 0.3], 0.5, 0.25).unwrap();
        assert!((br.global_e - 0.6).abs() < 1e-15);
        assert_eq!(br.c_theta, 2.0);
        let rhs = br.e0_norm * br.e0_norm / (1.0 - 2.0 * br.theta)
            + br.c_theta * br.c_theta * br.global_e * br.global_e;
        assert!((br.bound * br.bound - rhs).abs() < 1e-14);
    }

    #[test]
    fn local_estimator_examples() {
        assert!((local_estimator(0.25, 0.0, 1.0, 0.1, 0.05).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(local_estimator(0.25, 0.0, 1.0, 0.1, 0.0).unwrap(), 0.0);
        let est = LocalEstimator::new(0.25, 0.0, 1.0).unwrap();
        assert_eq!(
            est.eval(0.1, 0.1).unwrap(),
            2.0 * est.eval(0.1, 0.05).unwrap()
        );
        assert!(est.eval(0.0, 1.0).is_err());
        assert!(LocalEstimator::new(0.25, 0.0, 0.0).is_err());
        // initial error term
        let with_e0 = LocalEstimator::new(0.25, 1.0, 2.0).unwrap();
        assert!((with_e0.eval(0.1, 0.0).unwrap() - 1.0 / (2.0 * 0.5f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn effectivity() {
        assert_eq!(effectivity_index(2.0, 2.0), Some(1.0));
        assert_eq!(effectivity_index(2.0, 0.0), None);
    }
}
