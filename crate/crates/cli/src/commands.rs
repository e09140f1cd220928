//! The `converge` and `adapt` experiments and their result files.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use ifmid_core::bench::{
    build_problem, convergence_order, nodal_errors, run_adaptive, run_uniform, DiscreteSystem,
    UniformRun,
};
use ifmid_core::control::{AdaptiveConfig, AdaptiveTrace};
use ifmid_core::estimate::{effectivity_index, optimal_bound, theta_constant};
use serde::Serialize;

use crate::config::{BackendKey, Mode, RunConfig};
use crate::format::{csv_row, sci, sci_opt};

pub const CONVERGE_HEADER: &str = "N,err_inf,order_err,E,order_E,bound,ei_U";
pub const ADAPT_SUMMARY_HEADER: &str = "tol,eta,k_max,err_inf,bound,ei_U,count";
pub const ADAPT_TRAJECTORY_HEADER: &str = "t_n,k_n,E_theta_n,err_n,rejected_count_at_step";

/// Above this size the dense backend gets a runtime warning.
const DENSE_WARN_M: usize = 400;

fn prepare(cfg: &RunConfig) -> Result<DiscreteSystem> {
    if cfg.backend == BackendKey::Dense && cfg.m > DENSE_WARN_M {
        eprintln!(
            "warning: dense backend at m = {} builds {n}x{n} exponentials; expect long runtimes",
            cfg.m,
            n = 2 * cfg.m
        );
    }
    fs::create_dir_all(&cfg.out)
        .with_context(|| format!("cannot create output directory {}", cfg.out.display()))?;
    let (_, sys) = build_problem(cfg.problem.into(), cfg.m).map_err(|e| anyhow!(e))?;
    Ok(sys)
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

#[derive(Debug, Serialize)]
struct ConvergeRow {
    n: usize,
    err_inf: f64,
    order_err: Option<f64>,
    global_e: f64,
    order_e: Option<f64>,
    bound: f64,
    ei_u: Option<f64>,
    suboptimal: f64,
}

#[derive(Debug, Serialize)]
struct ConvergeSummary<'c> {
    config: &'c RunConfig,
    c_theta: f64,
    rows: Vec<ConvergeRow>,
}

/// Files written by a command.
#[derive(Debug)]
pub struct Written {
    pub files: Vec<PathBuf>,
}

/// Uniform-step sweep over `cfg.n_list`; runs the step counts in parallel.
pub fn converge(cfg: &RunConfig) -> Result<Written> {
    if cfg.mode != Mode::Converge {
        bail!("converge called with a {} configuration", cfg.mode);
    }
    let n_list = cfg
        .n_list
        .as_deref()
        .filter(|l| !l.is_empty())
        .ok_or_else(|| anyhow!("no step counts given"))?;
    let sys = prepare(cfg)?;
    let runs: Vec<UniformRun> = std::thread::scope(|scope| {
        let handles: Vec<_> = n_list
            .iter()
            .map(|&n| {
                let sys = &sys;
                scope.spawn(move || {
                    run_uniform(sys, n, cfg.theta, cfg.backend.into(), cfg.reference.into())
                })
            })
            .collect();
        handles
            .into_iter()
            .zip(n_list)
            .map(|(h, n)| {
                h.join()
                    .map_err(|_| anyhow!("worker for N = {n} panicked"))?
                    .map_err(|e| anyhow!("N = {n}: {e}"))
            })
            .collect::<Result<_>>()
    })?;

    let err_orders = convergence_order(
        &runs
            .iter()
            .map(|r| (r.n_steps as f64, r.err_inf))
            .collect::<Vec<_>>(),
    );
    let e_orders = convergence_order(
        &runs
            .iter()
            .map(|r| (r.n_steps as f64, r.breakdown.global_e))
            .collect::<Vec<_>>(),
    );
    let mut csv = format!("{CONVERGE_HEADER}\n");
    let mut rows = Vec::with_capacity(runs.len());
    for ((run, oe), o_big) in runs.iter().zip(err_orders).zip(e_orders) {
        let ei = run.effectivity();
        csv.push_str(&csv_row(&[
            run.n_steps.to_string(),
            sci(run.err_inf),
            sci_opt(oe),
            sci(run.breakdown.global_e),
            sci_opt(o_big),
            sci(run.breakdown.bound),
            sci_opt(ei),
        ]));
        rows.push(ConvergeRow {
            n: run.n_steps,
            err_inf: run.err_inf,
            order_err: oe,
            global_e: run.breakdown.global_e,
            order_e: o_big,
            bound: run.breakdown.bound,
            ei_u: ei,
            suboptimal: run.suboptimal,
        });
    }
    let summary = ConvergeSummary {
        config: cfg,
        c_theta: theta_constant(cfg.theta).map_err(|e| anyhow!(e))?,
        rows,
    };
    let csv_path = cfg.out.join("converge.csv");
    let json_path = cfg.out.join("converge.json");
    write(&csv_path, &csv)?;
    write(
        &json_path,
        &(serde_json::to_string_pretty(&summary)? + "\n"),
    )?;
    Ok(Written {
        files: vec![csv_path, json_path],
    })
}

#[derive(Debug, Serialize)]
struct AdaptSummary<'c> {
    config: &'c RunConfig,
    status: String,
    eta: f64,
    c_theta: f64,
    count: usize,
    rejections: usize,
    global_e: f64,
    bound: f64,
    err_inf: f64,
    ei_u: Option<f64>,
    final_time: f64,
}

fn trajectory_csv(trace: &AdaptiveTrace, errors: &[f64]) -> String {
    let mut csv = format!("{ADAPT_TRAJECTORY_HEADER}\n");
    for (step, err) in trace.accepted.iter().zip(errors) {
        csv.push_str(&csv_row(&[
            sci(step.record.t_right),
            sci(step.record.k),
            sci(step.estimator),
            sci(*err),
            step.rejections.to_string(),
        ]));
    }
    csv
}

/// One adaptive run. On a controller abort the accepted part of the
/// trajectory and a JSON status are still written before the error is returned.
pub fn adapt(cfg: &RunConfig) -> Result<Written> {
    if cfg.mode != Mode::Adapt {
        bail!("adapt called with a {} configuration", cfg.mode);
    }
    let (tol, k0, k_max) = match (cfg.tol, cfg.k0, cfg.k_max) {
        (Some(t), Some(a), Some(b)) => (t, a, b),
        _ => bail!("adapt needs tol, k0 and k_max"),
    };
    let sys = prepare(cfg)?;
    let acfg = AdaptiveConfig::new(tol, cfg.theta, k0, k_max, sys.spec.final_time);
    let eta = acfg.eta();
    let c_theta = theta_constant(cfg.theta).map_err(|e| anyhow!(e))?;
    let summary_path = cfg.out.join("adapt_summary.csv");
    let trajectory_path = cfg.out.join("adapt_trajectory.csv");
    let json_path = cfg.out.join("adapt.json");

    match run_adaptive(&sys, &acfg, cfg.backend.into(), cfg.reference.into()) {
        Ok(run) => {
            let ei = run.effectivity();
            let summary_csv = format!(
                "{ADAPT_SUMMARY_HEADER}\n{}",
                csv_row(&[
                    sci(tol),
                    sci(eta),
                    sci(k_max),
                    sci(run.err_inf),
                    sci(run.bound),
                    sci_opt(ei),
                    run.trace.count().to_string(),
                ])
            );
            write(&summary_path, &summary_csv)?;
            write(
                &trajectory_path,
                &trajectory_csv(&run.trace, &run.nodal_errors),
            )?;
            let summary = AdaptSummary {
                config: cfg,
                status: "completed".to_string(),
                eta,
                c_theta,
                count: run.trace.count(),
                rejections: run.trace.rejections.len(),
                global_e: run.trace.global_e,
                bound: run.bound,
                err_inf: run.err_inf,
                ei_u: ei,
                final_time: run.trace.final_time,
            };
            write(
                &json_path,
                &(serde_json::to_string_pretty(&summary)? + "\n"),
            )?;
            Ok(Written {
                files: vec![summary_path, trajectory_path, json_path],
            })
        }
        Err(aborted) => {
            let partial = &aborted.partial;
            let errors = nodal_errors(&sys, partial.records(), cfg.reference.into())
                .unwrap_or_else(|_| vec![f64::NAN; partial.count()]);
            write(&trajectory_path, &trajectory_csv(partial, &errors))?;
            let err_inf = errors.iter().cloned().fold(0.0, f64::max);
            let bound = optimal_bound(cfg.theta, 0.0, partial.global_e).unwrap_or(f64::NAN);
            let summary = AdaptSummary {
                config: cfg,
                status: format!("aborted: {}", aborted.reason),
                eta,
                c_theta,
                count: partial.count(),
                rejections: partial.rejections.len(),
                global_e: partial.global_e,
                bound,
                err_inf,
                ei_u: effectivity_index(bound, err_inf),
                final_time: partial.final_time,
            };
            write(
                &json_path,
                &(serde_json::to_string_pretty(&summary)? + "\n"),
            )?;
            Err(anyhow!(aborted)).context(format!(
                "partial trajectory written to {}",
                trajectory_path.display()
            ))
        }
    }
}
