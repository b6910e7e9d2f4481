//! Dispersive-limit convergence study: solves the fifth-order equation for
//! every configured `eps` and the third-order limit once (at halved step
//! size) from the same data, tabulates `sup_t |u_eps - u_0|_{H^s}`, fits
//! the log-log rate, and folds in the uniform-bound ratios and
//! conserved-quantity drifts from the same runs.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use kawahara_core::evolve::{SolverConfig, Trajectory};
use kawahara_core::spectral::NormSpec;

use crate::config::ExperimentConfig;
use crate::data;
use crate::plot::{line_plot, Series};
use crate::report::{fmt, write_checks, write_csv, Check, Outcome};
use crate::HarnessError;

use super::{loglog_slope, run_solve, solver_config, subsample, sup_diff_norms, sup_norms};

/// Errors below this absolute floor are treated as identically zero (the
/// degenerate zero-data sweep).
const DEGENERATE_ERR: f64 = 1e-14;
/// Admissible relative disagreement between the sampled sup and a 2x-denser
/// sampling.
const DENSITY_TOL: f64 = 0.01;

/// The per-eps solve family shared by the convergence, uniform-bound and
/// drift evaluations.
pub struct Family {
    pub data_norms: Vec<f64>,
    /// One run per configured eps, densely sampled (half the configured
    /// sample spacing when possible).
    pub runs: Vec<Trajectory>,
    /// The `eps = 0` reference, integrated at `dt/2` on the same grid and
    /// sampled on the same lattice as `runs`.
    pub reference: Trajectory,
    /// Subsampling factor between the dense lattice and the configured one.
    pub density_factor: usize,
}

/// Solves the whole family: each configured eps plus the limit reference.
pub fn solve_family(cfg: &ExperimentConfig) -> Result<Family, HarnessError> {
    let grid = cfg.grid()?;
    let phi = data::build(grid, cfg.data, cfg.derived_seed("data"))?;
    let hat = phi.forward()?;
    let data_norms = cfg
        .s_list
        .iter()
        .map(|&s| hat.sobolev_norm(NormSpec::new(s)))
        .collect();

    // Run on a 2x-denser sample lattice when the configured spacing allows,
    // so the sampling-density guard comes for free by subsampling.
    let density_factor = if cfg.sample_every % 2 == 0 { 2 } else { 1 };
    let dense_every = cfg.sample_every / density_factor;

    let mut jobs: Vec<SolverConfig> = cfg
        .eps_list
        .iter()
        .map(|&eps| SolverConfig {
            sample_every: dense_every,
            ..solver_config(cfg, grid, eps, cfg.nonlinear)
        })
        .collect();
    jobs.push(SolverConfig {
        grid,
        eps: 0.0,
        t_end: cfg.t_end,
        dt: 0.5 * cfg.dt,
        sample_every: 2 * dense_every,
        nonlinear: cfg.nonlinear,
    });

    let mut results: Vec<Trajectory> = jobs
        .par_iter()
        .map(|sc| run_solve(&phi, sc))
        .collect::<Result<_, _>>()?;
    let reference = results.pop().expect("reference job");
    Ok(Family {
        data_norms,
        runs: results,
        reference,
        density_factor,
    })
}

pub struct EpsRow {
    pub eps: f64,
    pub traj_file: String,
    pub errors: Vec<f64>,
    pub ratios: Vec<f64>,
    pub end_norms: Vec<f64>,
    pub end_l2: f64,
    pub drift: (f64, f64, f64),
}

/// Uniform-bound ratios `sup_t |u(t)|_{H^s} / |phi|_{H^s}` for one run.
pub fn uniform_ratios(
    run: &Trajectory,
    data_norms: &[f64],
    s_list: &[f64],
) -> Result<Vec<f64>, HarnessError> {
    let sups = sup_norms(run, s_list)?;
    Ok(sups
        .iter()
        .zip(data_norms)
        .map(|(s, d)| if *d == 0.0 { 0.0 } else { s / d })
        .collect())
}

pub fn run(cfg: &ExperimentConfig, out_dir: &Path, plot: bool) -> Result<Outcome, HarnessError> {
    let family = solve_family(cfg)?;
    let mut outcome = Outcome::default();
    let traj_dir = out_dir.join("trajectories");
    std::fs::create_dir_all(&traj_dir)?;

    // Per-eps evaluation cells in parallel, merged in eps order.
    let cells: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> = family
        .runs
        .par_iter()
        .map(|run| -> Result<_, HarnessError> {
            let errors = sup_diff_norms(run, &family.reference, &cfg.s_list)?;
            let ratios = uniform_ratios(run, &family.data_norms, &cfg.s_list)?;
            let end = run.states().last().expect("non-empty run").forward()?;
            let end_norms = cfg
                .s_list
                .iter()
                .map(|&s| end.sobolev_norm(NormSpec::new(s)))
                .collect();
            Ok((errors, ratios, end_norms))
        })
        .collect::<Result<_, _>>()?;

    let mut rows = Vec::new();
    for (i, (run, (errors, ratios, end_norms))) in
        family.runs.iter().zip(cells).enumerate()
    {
        let eps = cfg.eps_list[i];
        let file = format!("trajectories/converge_eps{i}.traj");
        run.write_binary(&out_dir.join(&file))?;
        let end_l2 = end_norms[energy_index(&cfg.s_list)];
        rows.push(EpsRow {
            eps,
            traj_file: file,
            errors,
            ratios,
            end_norms,
            end_l2,
            drift: run.conserved_drift()?,
        });
    }
    family
        .reference
        .write_binary(&out_dir.join("trajectories/converge_ref.traj"))?;

    // Convergence: strict decrease and the fitted rate.
    let degenerate = rows
        .iter()
        .all(|r| r.errors.iter().all(|e| *e <= DEGENERATE_ERR));
    if degenerate {
        outcome.push(Check::info("degenerate_zero_error_sweep", 0.0));
    } else if rows.len() >= 2 {
        for (si, &s) in cfg.s_list.iter().enumerate() {
            let errs: Vec<f64> = rows.iter().map(|r| r.errors[si]).collect();
            let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
            outcome.push(Check::bounded(
                format!("errors_strictly_decreasing_h{s}"),
                if decreasing { 1.0 } else { 0.0 },
                1.0,
                1.0,
            ));
            let slope = loglog_slope(&cfg.eps_list, &errs);
            if (s - 1.0).abs() < 1e-12 && cfg.slope_check {
                outcome.push(Check::bounded(
                    "convergence_slope_h1",
                    slope,
                    cfg.slope_min,
                    cfg.slope_max,
                ));
            } else {
                // Reported without assertion (low-regularity data carries
                // no rate target).
                outcome.push(Check::info(format!("convergence_slope_h{s}"), slope));
            }
        }
    }

    // Uniform bound over the eps grid (the H^1 column is the contract).
    if let Some(si) = cfg.s_list.iter().position(|&s| (s - 1.0).abs() < 1e-12) {
        let max_ratio = rows.iter().fold(0.0f64, |m, r| m.max(r.ratios[si]));
        outcome.push(Check::bounded(
            "uniform_bound_ratio_h1",
            max_ratio,
            0.0,
            cfg.bound_c,
        ));
    }

    // Conserved-quantity drifts per run.
    for row in &rows {
        outcome.push(Check::bounded(
            format!("mass_drift_eps_{}", row.eps),
            row.drift.0,
            0.0,
            cfg.mass_tol,
        ));
        outcome.push(Check::bounded(
            format!("l2_drift_eps_{}", row.eps),
            row.drift.1,
            0.0,
            cfg.l2_tol,
        ));
        outcome.push(Check::bounded(
            format!("hamiltonian_drift_eps_{}", row.eps),
            row.drift.2,
            0.0,
            cfg.ham_tol,
        ));
    }

    // Sampling-density guard: sup on the configured lattice vs the dense one.
    if family.density_factor > 1 && !degenerate {
        let dense = sup_diff_norms(&family.runs[0], &family.reference, &cfg.s_list)?;
        let coarse_run = subsample(&family.runs[0], family.density_factor)?;
        let coarse_ref = subsample(&family.reference, family.density_factor)?;
        let coarse = sup_diff_norms(&coarse_run, &coarse_ref, &cfg.s_list)?;
        let mut worst = 0.0f64;
        for (d, c) in dense.iter().zip(&coarse) {
            if *d > DEGENERATE_ERR {
                worst = worst.max((d - c).abs() / d);
            }
        }
        outcome.push(Check::bounded(
            "sampled_sup_density_gap",
            worst,
            0.0,
            DENSITY_TOL,
        ));
    } else if family.density_factor == 1 {
        outcome.push(Check::info("sampled_sup_density_gap_skipped_odd_every", 0.0));
    }

    // Artifact re-verification: a report value must be reproducible from the
    // on-disk trajectory.
    let reread = Trajectory::read_binary(&out_dir.join(&rows[0].traj_file))?;
    let recomputed = reread
        .states()
        .last()
        .expect("non-empty artifact")
        .forward()?
        .sobolev_norm(NormSpec::new(cfg.s_list[energy_index(&cfg.s_list)]));
    let dev = (recomputed - rows[0].end_l2).abs() / rows[0].end_l2.abs().max(1e-300);
    outcome.push(Check::bounded("artifact_reverify", dev, 0.0, 1e-12));

    // Report CSV.
    let mut header: Vec<String> = vec!["eps".into(), "traj_file".into()];
    for &s in &cfg.s_list {
        header.push(format!("err_h{s}"));
    }
    for &s in &cfg.s_list {
        header.push(format!("ratio_h{s}"));
    }
    for &s in &cfg.s_list {
        header.push(format!("end_h{s}"));
    }
    header.extend(
        ["mass_drift", "l2_drift", "ham_drift", "config_hash", "version"]
            .iter()
            .map(|s| s.to_string()),
    );
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let hash = cfg.hash();
    let version = env!("CARGO_PKG_VERSION");
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut row = vec![fmt(r.eps), r.traj_file.clone()];
            row.extend(r.errors.iter().map(|v| fmt(*v)));
            row.extend(r.ratios.iter().map(|v| fmt(*v)));
            row.extend(r.end_norms.iter().map(|v| fmt(*v)));
            row.push(fmt(r.drift.0));
            row.push(fmt(r.drift.1));
            row.push(fmt(r.drift.2));
            row.push(hash.clone());
            row.push(version.to_string());
            row
        })
        .collect();
    let report_path = out_dir.join("converge_report.csv");
    write_csv(&report_path, &header_refs, &csv_rows)?;
    let checks_path = out_dir.join("converge_checks.csv");
    write_checks(&checks_path, &outcome.checks)?;
    outcome.files.push(report_path);
    outcome.files.push(checks_path);

    if plot && !degenerate {
        let series: Vec<Series> = cfg
            .s_list
            .iter()
            .enumerate()
            .map(|(si, s)| Series {
                name: format!("H^{s}"),
                points: rows.iter().map(|r| (r.eps, r.errors[si])).collect(),
            })
            .collect();
        let plot_path = out_dir.join("converge_errors.svg");
        line_plot(
            &plot_path,
            "dispersive-limit error vs eps",
            "eps",
            "sup_t error",
            &series,
            true,
            true,
        )?;
        outcome.files.push(plot_path);
    }
    Ok(outcome)
}

/// Index of `s = 0` in the norm list (falls back to the first entry).
fn energy_index(s_list: &[f64]) -> usize {
    s_list.iter().position(|&s| s == 0.0).unwrap_or(0)
}

/// Turns a `PathBuf` list into printable names (used by the CLI summary).
pub fn file_names(files: &[PathBuf]) -> String {
    files
        .iter()
        .map(|p| p.display().to_string())
        .collect::<Vec<_>>()
        .join(", ")
}
