//! Equi-continuity of the solution maps: perturbs the data by `delta` times
//! a fixed smooth bump, measures the worst-over-eps response
//! `sup_t |u_eps(phi) - u_eps(phi + delta b)|_{H^1}`, and records the
//! uniform-in-eps L^2 Lipschitz ratio of the difference.

use std::path::Path;

use rayon::prelude::*;

use kawahara_core::spectral::NormSpec;

use crate::config::ExperimentConfig;
use crate::data;
use crate::plot::{line_plot, Series};
use crate::report::{fmt, write_checks, write_csv, Check, Outcome};
use crate::HarnessError;

use super::{run_solve, solver_config};

pub fn run(cfg: &ExperimentConfig, out_dir: &Path, plot: bool) -> Result<Outcome, HarnessError> {
    for w in cfg.delta_list.windows(2) {
        if w[1] >= w[0] {
            return Err(HarnessError::Config(
                "delta list must be strictly decreasing".into(),
            ));
        }
    }
    let grid = cfg.grid()?;
    let phi = data::build(grid, cfg.data, cfg.derived_seed("data"))?;
    let bump = data::perturbation_bump(grid, cfg.bump_amp, cfg.bump_width)?;
    let h1 = NormSpec::new(1.0);

    let base: Vec<_> = cfg
        .eps_list
        .par_iter()
        .map(|&eps| run_solve(&phi, &solver_config(cfg, grid, eps, cfg.nonlinear)))
        .collect::<Result<_, _>>()?;

    // (delta, eps) cells in parallel.
    let mut jobs = Vec::new();
    for (di, &delta) in cfg.delta_list.iter().enumerate() {
        for (ei, &eps) in cfg.eps_list.iter().enumerate() {
            jobs.push((di, delta, ei, eps));
        }
    }
    let cells: Vec<(usize, usize, f64, f64)> = jobs
        .par_iter()
        .map(|&(di, delta, ei, eps)| -> Result<_, HarnessError> {
            let perturbed_data = phi.add_scaled(delta, &bump)?;
            let perturbed = run_solve(&perturbed_data, &solver_config(cfg, grid, eps, cfg.nonlinear))?;
            let mut sup_h1 = 0.0f64;
            let mut sup_l2_ratio = 0.0f64;
            let w0 = bump.scaled(delta).forward()?.l2_norm();
            for (ua, ub) in base[ei].states().iter().zip(perturbed.states()) {
                let hat = ua.sub(ub)?.forward()?;
                sup_h1 = sup_h1.max(hat.sobolev_norm(h1));
                sup_l2_ratio = sup_l2_ratio.max(hat.l2_norm() / w0);
            }
            Ok((di, ei, sup_h1, sup_l2_ratio))
        })
        .collect::<Result<_, _>>()?;

    let nd = cfg.delta_list.len();
    let ne = cfg.eps_list.len();
    let mut sup_h1 = vec![vec![0.0f64; ne]; nd];
    let mut l2_ratio = vec![vec![0.0f64; ne]; nd];
    for (di, ei, h, r) in cells {
        sup_h1[di][ei] = h;
        l2_ratio[di][ei] = r;
    }
    let response: Vec<f64> = sup_h1
        .iter()
        .map(|per_eps| per_eps.iter().fold(0.0f64, |m, v| m.max(*v)))
        .collect();
    let max_ratio = l2_ratio
        .iter()
        .flatten()
        .fold(0.0f64, |m, v| m.max(*v));

    let mut outcome = Outcome::default();
    let monotone = response.windows(2).all(|w| w[1] < w[0]);
    outcome.push(Check::bounded(
        "response_strictly_decreasing",
        if monotone { 1.0 } else { 0.0 },
        1.0,
        1.0,
    ));
    outcome.push(Check::bounded(
        "response_at_smallest_delta",
        *response.last().expect("non-empty delta list"),
        0.0,
        cfg.response_tol,
    ));
    outcome.push(Check::bounded(
        "l2_lipschitz_ratio",
        max_ratio,
        0.0,
        cfg.lipschitz_c,
    ));

    let hash = cfg.hash();
    let version = env!("CARGO_PKG_VERSION");
    let mut rows = Vec::new();
    for (di, &delta) in cfg.delta_list.iter().enumerate() {
        for (ei, &eps) in cfg.eps_list.iter().enumerate() {
            rows.push(vec![
                fmt(delta),
                fmt(eps),
                fmt(sup_h1[di][ei]),
                fmt(l2_ratio[di][ei]),
                fmt(response[di]),
                hash.clone(),
                version.to_string(),
            ]);
        }
    }
    let report_path = out_dir.join("equicont_report.csv");
    write_csv(
        &report_path,
        &[
            "delta",
            "eps",
            "sup_h1_diff",
            "l2_ratio",
            "response_over_eps",
            "config_hash",
            "version",
        ],
        &rows,
    )?;
    let checks_path = out_dir.join("equicont_checks.csv");
    write_checks(&checks_path, &outcome.checks)?;
    outcome.files.push(report_path);
    outcome.files.push(checks_path);

    if plot {
        let series = vec![Series {
            name: "response".into(),
            points: cfg
                .delta_list
                .iter()
                .zip(&response)
                .map(|(&d, &r)| (d, r))
                .collect(),
        }];
        let plot_path = out_dir.join("equicont_response.svg");
        line_plot(
            &plot_path,
            "equi-continuity response",
            "delta",
            "sup over eps of sup_t H^1 difference",
            &series,
            true,
            true,
        )?;
        outcome.files.push(plot_path);
    }
    Ok(outcome)
}
