use alloc::vec::Vec;

use super::problems::DiscreteSystem;
use super::reference::{Reference, ReferenceSolution};
use crate::control::{adapt_solve, Aborted, AdaptiveConfig, AdaptiveTrace};
use crate::error::{Error, Result};
use crate::estimate::{
    effectivity_index, interval_contribution, optimal_bound, suboptimal_contribution,
    EstimatorBreakdown,
};
use crate::linops::{Backend, Propagator};
use crate::math::ln;
use crate::reconstruct::ReconPieces;
use crate::stepper::{take_step, IntervalRecord};

/// Outcome of a fixed-step run.
#[derive(Clone, Debug, PartialEq)]
pub struct UniformRun {
    pub n_steps: usize,
    pub k: f64,
    /// `max_n |||U(t^n) - Z^n|||` over `n >= 1`.
    pub err_inf: f64,
    pub nodal_errors: Vec<f64>,
    pub breakdown: EstimatorBreakdown,
    /// `int_0^T |||R|||`
    pub suboptimal: f64,
}

impl UniformRun {
    pub fn effectivity(&self) -> Option<f64> {
        effectivity_index(self.breakdown.bound, self.err_inf)
    }
}

/// Solves with `n_steps` equal steps and evaluates error and estimators.
pub fn run_uniform(
    sys: &DiscreteSystem,
    n_steps: usize,
    theta: f64,
    backend: Backend,
    reference: Reference,
) -> Result<UniformRun> {
    if n_steps == 0 {
        return Err(Error::Empty("no step counts given"));
    }
    let prop = Propagator::new(&sys.op, backend)?;
    let mut exact = ReferenceSolution::new(sys, reference)?;
    let forcing = |t: f64| sys.forcing_grid(t);
    let big_t = sys.spec.final_time;
    let z0 = sys.initial_state();
    let e0_norm = sys.op.energy_norm(&(&exact.state_at(0.0)? - &z0))?;

    let mut z = z0;
    let mut contribs = Vec::with_capacity(n_steps);
    let mut nodal_errors = Vec::with_capacity(n_steps);
    let mut suboptimal = 0.0;
    let mut t_left = 0.0;
    for n in 1..=n_steps {
        let t_right = if n == n_steps {
            big_t
        } else {
            n as f64 * big_t / n_steps as f64
        };
        let (rec, cache) = take_step(&prop, t_left, t_right, &z, &forcing)?;
        suboptimal += suboptimal_contribution(&prop, &rec, &forcing)?;
        let pieces = ReconPieces::from_cache(&rec, cache);
        contribs.push(interval_contribution(&prop, &pieces, &forcing)?);
        let err = sys
            .op
            .energy_norm(&(&exact.state_at(t_right)? - &rec.z_right))?;
        if !err.is_finite() {
            return Err(Error::NonFinite { t: t_right });
        }
        nodal_errors.push(err);
        z = rec.z_right;
        t_left = t_right;
    }
    let err_inf = nodal_errors.iter().fold(0.0f64, |m, e| m.max(*e));
    Ok(UniformRun {
        n_steps,
        k: big_t / n_steps as f64,
        err_inf,
        nodal_errors,
        breakdown: EstimatorBreakdown::new(contribs, e0_norm, theta)?,
        suboptimal,
    })
}

/// Outcome of an adaptive run.
#[derive(Clone, Debug)]
pub struct AdaptiveRun {
    pub trace: AdaptiveTrace,
    /// Error at the right end of each accepted step.
    pub nodal_errors: Vec<f64>,
    pub err_inf: f64,
    pub bound: f64,
}

impl AdaptiveRun {
    pub fn effectivity(&self) -> Option<f64> {
        effectivity_index(self.bound, self.err_inf)
    }
}

/// Energy-norm errors at the right ends of `records`, which must be in time order.
pub fn nodal_errors<'r, I>(
    sys: &DiscreteSystem,
    records: I,
    reference: Reference,
) -> Result<Vec<f64>>
where
    I: IntoIterator<Item = &'r IntervalRecord>,
{
    let mut exact = ReferenceSolution::new(sys, reference)?;
    records
        .into_iter()
        .map(|rec| {
            sys.op
                .energy_norm(&(&exact.state_at(rec.t_right)? - &rec.z_right))
        })
        .collect()
}

/// Runs the adaptive controller and measures the error along the accepted mesh.
pub fn run_adaptive(
    sys: &DiscreteSystem,
    cfg: &AdaptiveConfig,
    backend: Backend,
    reference: Reference,
) -> core::result::Result<AdaptiveRun, Aborted> {
    let fail = |reason: Error| Aborted {
        reason,
        partial: AdaptiveTrace::default(),
    };
    let prop = Propagator::new(&sys.op, backend).map_err(fail)?;
    let forcing = |t: f64| sys.forcing_grid(t);
    let z0 = sys.initial_state();
    let e0_norm = ReferenceSolution::new(sys, reference)
        .and_then(|mut r| r.state_at(0.0))
        .and_then(|z| sys.op.energy_norm(&(&z - &z0)))
        .map_err(fail)?;
    let trace = adapt_solve(&prop, &z0, e0_norm, &forcing, cfg)?;
    let finish = || -> Result<AdaptiveRun> {
        let errs = nodal_errors(sys, trace.records(), reference)?;
        let err_inf = errs.iter().fold(0.0f64, |m, e| m.max(*e));
        let bound = optimal_bound(cfg.theta, e0_norm, trace.global_e)?;
        Ok(AdaptiveRun {
            trace: trace.clone(),
            nodal_errors: errs,
            err_inf,
            bound,
        })
    };
    finish().map_err(|reason| Aborted {
        reason,
        partial: trace.clone(),
    })
}

/// Observed orders `log(e_{i-1}/e_i) / log(N_i/N_{i-1})` for consecutive rows
/// `(N, e)`; the first entry and any entry with a non-positive value are `None`.
pub fn convergence_order(rows: &[(f64, f64)]) -> Vec<Option<f64>> {
    let mut out = Vec::with_capacity(rows.len());
    for (i, &(n, e)) in rows.iter().enumerate() {
        if i == 0 {
            out.push(None);
            continue;
        }
        let (n0, e0) = rows[i - 1];
        if e > 0.0 && e0 > 0.0 && n > 0.0 && n0 > 0.0 && n != n0 {
            out.push(Some(ln(e0 / e) / ln(n / n0)))
        } else {
            out.push(None)
        }
    }
    out
}

/// Least-squares slope of `log y` against `log x`; `None` with fewer than two
/// usable points.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (ln(*x), ln(*y)))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}
