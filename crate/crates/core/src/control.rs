//! Tolerance-driven step-size control.
//!
//! Each trial step is judged by the local estimator `E_n` against
//! `eta = sqrt(tol) / T`:
//!
//! * `E_n <= delta1 * eta`: accept and grow, `k <- min(k_max, k / delta2)`;
//! * `E_n <= eta`: accept and keep `k`;
//! * otherwise reject, halve (`k <- delta3 * k`) and redo the step from the same time.
//!
//! Accepting only steps with `E_n <= eta` guarantees
//! `|||e(0)|||^2 / (1 - 2 theta) + c_theta^2 (sum_n int_{J_n} |||G|||)^2 <= tol`.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::estimate::{interval_contribution, LocalEstimator};
use crate::linops::{Propagator, StateVector};
use crate::math::sqrt;
use crate::reconstruct::ReconPieces;
use crate::stepper::{check_theta, take_step, IntervalRecord};

#[derive(Clone, Debug, PartialEq)]
pub struct AdaptiveConfig {
    pub tol: f64,
    pub theta: f64,
    pub k0: f64,
    pub k_max: f64,
    pub final_time: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
    /// Abort when a rejected step would fall below this size.
    pub k_min_guard: f64,
    /// Abort after this many consecutive rejections at one time level.
    pub max_rejections_per_step: usize,
}

impl AdaptiveConfig {
    /// Standard parameters `delta = (1/4, 2/3, 1/2)`, guard `1e-10 T`, at most 60 rejections.
    pub fn new(tol: f64, theta: f64, k0: f64, k_max: f64, final_time: f64) -> Self {
        Self {
            tol,
            theta,
            k0,
            k_max,
            final_time,
            delta1: 0.25,
            delta2: 2.0 / 3.0,
            delta3: 0.5,
            k_min_guard: 1e-10 * final_time,
            max_rejections_per_step: 60,
        }
    }

    /// `sqrt(tol) / T`
    pub fn eta(&self) -> f64 {
        sqrt(self.tol) / self.final_time
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tol", self.tol),
            ("k0", self.k0),
            ("final_time", self.final_time),
            ("k_min_guard", self.k_min_guard),
        ];
        for (name, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidArgument { name, value });
            }
        }
        check_theta(self.theta)?;
        if !(self.k_max >= self.k0) || !self.k_max.is_finite() {
            return Err(Error::InvalidArgument {
                name: "k_max",
                value: self.k_max,
            });
        }
        for (name, value) in [
            ("delta1", self.delta1),
            ("delta2", self.delta2),
            ("delta3", self.delta3),
        ] {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::InvalidArgument { name, value });
            }
        }
        Ok(())
    }
}

/// `min(k_max, k / delta2)`
pub fn growth_rule(k: f64, cfg: &AdaptiveConfig) -> f64 {
    let grown = k / cfg.delta2;
    if grown < cfg.k_max {
        grown
    } else {
        cfg.k_max
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AcceptedStep {
    pub record: IntervalRecord,
    /// `int_{J_n} |||G||| ds`
    pub contribution: f64,
    /// `E_n`
    pub estimator: f64,
    /// Rejected trials at this time level before acceptance.
    pub rejections: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rejection {
    pub t_left: f64,
    pub k: f64,
    pub estimator: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AdaptiveTrace {
    pub accepted: Vec<AcceptedStep>,
    pub rejections: Vec<Rejection>,
    /// Sum of accepted contributions, left to right.
    pub global_e: f64,
    /// Right end of the last accepted step.
    pub final_time: f64,
}

impl AdaptiveTrace {
    /// Number of accepted steps.
    pub fn count(&self) -> usize {
        self.accepted.len()
    }

    pub fn records(&self) -> impl Iterator<Item = &IntervalRecord> {
        self.accepted.iter().map(|s| &s.record)
    }

    pub fn contributions(&self) -> Vec<f64> {
        self.accepted.iter().map(|s| s.contribution).collect()
    }
}

/// A controller failure together with everything accepted before it.
#[derive(Clone, Debug)]
pub struct Aborted {
    pub reason: Error,
    pub partial: AdaptiveTrace,
}

impl fmt::Display for Aborted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "adaptive run aborted after {} accepted steps: {}",
            self.partial.count(),
            self.reason
        )
    }
}

impl core::error::Error for Aborted {}

/// Runs the adaptive loop from `z0` at `t = 0` to `cfg.final_time`.
///
/// `e0_norm` is the energy norm of the initial error (zero for exact data).
/// The last step is shortened so that the final node lands exactly on `T`.
pub fn adapt_solve<F>(
    prop: &Propagator<'_>,
    z0: &StateVector,
    e0_norm: f64,
    forcing: &F,
    cfg: &AdaptiveConfig,
) -> core::result::Result<AdaptiveTrace, Aborted>
where
    F: Fn(f64) -> Vec<f64> + ?Sized,
{
    let mut trace = AdaptiveTrace::default();
    let abort = |reason: Error, partial: AdaptiveTrace| Aborted { reason, partial };
    if let Err(e) = cfg.validate() {
        return Err(abort(e, trace));
    }
    let local = match LocalEstimator::new(cfg.theta, e0_norm, cfg.final_time) {
        Ok(l) => l,
        Err(e) => return Err(abort(e, trace)),
    };
    let eta = cfg.eta();
    let big_t = cfg.final_time;

    let mut t = 0.0;
    let mut z = z0.clone();
    let mut k = cfg.k0;
    let mut rejections_here = 0usize;

    while t < big_t {
        let t_right = if t + k >= big_t - 1e-12 * big_t {
            big_t
        } else {
            t + k
        };
        let trial = take_step(prop, t, t_right, &z, forcing).and_then(|(rec, cache)| {
            let pieces = ReconPieces::from_cache(&rec, cache);
            let contribution = interval_contribution(prop, &pieces, forcing)?;
            let estimator = local.eval(rec.k, contribution)?;
            Ok((rec, contribution, estimator))
        });
        let (rec, contribution, estimator) = match trial {
            Ok(x) => x,
            Err(e) => return Err(abort(e, trace)),
        };
        if !estimator.is_finite() || !rec.z_right.is_finite() {
            return Err(abort(Error::NonFinite { t }, trace));
        }
        let k_used = rec.k;
        if estimator <= eta {
            let next_k = if estimator <= cfg.delta1 * eta {
                growth_rule(k_used, cfg)
            } else {
                k_used
            };
            t = rec.t_right;
            z = rec.z_right.clone();
            trace.global_e += contribution;
            trace.final_time = t;
            trace.accepted.push(AcceptedStep {
                record: rec,
                contribution,
                estimator,
                rejections: rejections_here,
            });
            rejections_here = 0;
            k = next_k;
        } else {
            trace.rejections.push(Rejection {
                t_left: t,
                k: k_used,
                estimator,
            });
            rejections_here += 1;
            k = cfg.delta3 * k_used;
            if rejections_here > cfg.max_rejections_per_step {
                return Err(abort(
                    Error::TooManyRejections {
                        t,
                        rejections: rejections_here,
                    },
                    trace,
                ));
            }
            if k < cfg.k_min_guard {
                return Err(abort(Error::StepUnderflow { t, k }, trace));
            }
        }
    }
    Ok(trace)
}
