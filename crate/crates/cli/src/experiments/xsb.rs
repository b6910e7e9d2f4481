//! Space-time norm diagnostics: the windowed `X^(0,b)` norm of a free
//! solution factorizes into the window constant times the data L^2 norm,
//! uniformly in eps and independent of the data shape. Also cross-checks
//! the dyadic-block norm and reports the modulation profile of a nonlinear
//! soliton run.

use std::path::Path;

use rayon::prelude::*;

use kawahara_core::bourgain::{
    data_l2, modulation_profile, spacetime_transform, xsb_norm, xsbq_norm, BlockSum, WindowSpec,
};
use kawahara_core::dispersion::DispersionParams;
use kawahara_core::evolve::{solve, soliton, SolverConfig};
use kawahara_core::spectral::Grid;

use crate::config::{DataSpec, ExperimentConfig};
use crate::data;
use crate::plot::{line_plot, Series};
use crate::report::{fmt, write_checks, write_csv, Check, Outcome};
use crate::HarnessError;

use super::{run_solve, solver_config};

fn alternate_shape(spec: DataSpec) -> DataSpec {
    match spec {
        DataSpec::Gaussian { .. } | DataSpec::Rough { .. } => DataSpec::Soliton { speed: 1.0 },
        DataSpec::Soliton { .. } => DataSpec::Gaussian {
            amp: 0.5,
            width: 4.0,
        },
    }
}

fn shape_name(spec: DataSpec) -> &'static str {
    match spec {
        DataSpec::Gaussian { .. } => "gaussian",
        DataSpec::Soliton { .. } => "soliton",
        DataSpec::Rough { .. } => "rough",
    }
}

struct Cell {
    shape: &'static str,
    eps: f64,
    ratios: Vec<f64>,
    constants: Vec<f64>,
    block_ratio: f64,
}

pub fn run(cfg: &ExperimentConfig, out_dir: &Path, plot: bool) -> Result<Outcome, HarnessError> {
    let grid = cfg.grid()?;
    let shapes = [cfg.data, alternate_shape(cfg.data)];

    let mut jobs = Vec::new();
    for &shape in &shapes {
        for &eps in &cfg.eps_list {
            jobs.push((shape, eps));
        }
    }
    let cells: Vec<Cell> = jobs
        .par_iter()
        .map(|&(shape, eps)| -> Result<Cell, HarnessError> {
            let phi = data::build(grid, shape, cfg.derived_seed("data"))?;
            // Free evolution: the factorization target.
            let traj = run_solve(&phi, &solver_config(cfg, grid, eps, false))?;
            let window = WindowSpec::for_trajectory(&traj)?;
            let sp = spacetime_transform(&traj, &window)?;
            let params = DispersionParams::new(eps)?;
            let l2 = data_l2(&traj)?;
            let mut ratios = Vec::new();
            let mut constants = Vec::new();
            for &b in &cfg.b_list {
                ratios.push(xsb_norm(&sp, 0.0, b, &params) / l2);
                constants.push(window.constant(b));
            }
            let block_ratio = xsbq_norm(&sp, 0.0, 0.0, BlockSum::L2, &params)
                / xsb_norm(&sp, 0.0, 0.0, &params);
            Ok(Cell {
                shape: shape_name(shape),
                eps,
                ratios,
                constants,
                block_ratio,
            })
        })
        .collect::<Result<_, _>>()?;

    let mut outcome = Outcome::default();
    for (bi, &b) in cfg.b_list.iter().enumerate() {
        let mut worst_dev = 0.0f64;
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for cell in &cells {
            let dev = (cell.ratios[bi] / cell.constants[bi] - 1.0).abs();
            worst_dev = worst_dev.max(dev);
            lo = lo.min(cell.ratios[bi]);
            hi = hi.max(cell.ratios[bi]);
        }
        outcome.push(Check::bounded(
            format!("free_factorization_dev_b_{b}"),
            worst_dev,
            0.0,
            cfg.xsb_tol,
        ));
        outcome.push(Check::bounded(
            format!("free_ratio_spread_b_{b}"),
            hi / lo - 1.0,
            0.0,
            cfg.xsb_tol,
        ));
    }
    for cell in &cells {
        outcome.push(Check::bounded(
            format!("block_norm_ratio_{}_eps_{}", cell.shape, cell.eps),
            cell.block_ratio,
            0.5,
            2.0,
        ));
    }

    let hash = cfg.hash();
    let version = env!("CARGO_PKG_VERSION");
    let mut rows = Vec::new();
    for cell in &cells {
        for (bi, &b) in cfg.b_list.iter().enumerate() {
            rows.push(vec![
                "xsb_free_ratio".to_string(),
                cell.shape.to_string(),
                "0".to_string(),
                fmt(b),
                "2".to_string(),
                fmt(cell.eps),
                fmt(cell.ratios[bi]),
                fmt(cell.constants[bi]),
                hash.clone(),
                version.to_string(),
            ]);
        }
        rows.push(vec![
            "xsbq_over_xsb".to_string(),
            cell.shape.to_string(),
            "0".to_string(),
            "0".to_string(),
            "2".to_string(),
            fmt(cell.eps),
            fmt(cell.block_ratio),
            "1".to_string(),
            hash.clone(),
            version.to_string(),
        ]);
    }

    // Report-only: modulation concentration of a nonlinear soliton run.
    let soliton_grid = Grid::new(512, 32.0 * std::f64::consts::PI)
        .map_err(|e| HarnessError::Run(e.to_string()))?;
    let soliton_phi = soliton(soliton_grid, 1.0)?;
    let soliton_traj = solve(
        &soliton_phi,
        &SolverConfig {
            grid: soliton_grid,
            eps: 0.0,
            t_end: 1.0,
            dt: 1e-3,
            sample_every: 10,
            nonlinear: true,
        },
    )?;
    let profile = modulation_profile(&soliton_traj, &DispersionParams::kdv())?;
    for (level, scale, energy) in &profile.shells {
        rows.push(vec![
            "soliton_modulation_shell".to_string(),
            "soliton".to_string(),
            "0".to_string(),
            fmt(*level as f64),
            "1".to_string(),
            "0".to_string(),
            fmt(energy / profile.total_energy),
            fmt(*scale),
            hash.clone(),
            version.to_string(),
        ]);
    }
    outcome.push(Check::info(
        "soliton_modulation_low_shell_fraction",
        profile.fraction_up_to(6),
    ));

    let report_path = out_dir.join("xsb_report.csv");
    write_csv(
        &report_path,
        &[
            "norm",
            "shape",
            "s",
            "b",
            "q",
            "eps",
            "value",
            "reference",
            "config_hash",
            "version",
        ],
        &rows,
    )?;
    let checks_path = out_dir.join("xsb_checks.csv");
    write_checks(&checks_path, &outcome.checks)?;
    outcome.files.push(report_path);
    outcome.files.push(checks_path);

    if plot {
        let series: Vec<Series> = cfg
            .b_list
            .iter()
            .enumerate()
            .map(|(bi, b)| Series {
                name: format!("b={b}"),
                points: cells.iter().map(|c| (c.eps, c.ratios[bi])).collect(),
            })
            .collect();
        let plot_path = out_dir.join("xsb_ratios.svg");
        line_plot(
            &plot_path,
            "free-evolution space-time norm ratios",
            "eps",
            "norm / data L2",
            &series,
            true,
            false,
        )?;
        outcome.files.push(plot_path);
    }
    Ok(outcome)
}
