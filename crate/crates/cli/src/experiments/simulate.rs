//! Plain simulation runs: one trajectory file per eps plus a CSV of the
//! conserved quantities along each run, checked against the drift budgets.

use std::path::Path;

use rayon::prelude::*;

use kawahara_core::evolve::Trajectory;

use crate::config::ExperimentConfig;
use crate::data;
use crate::plot::{line_plot, Series};
use crate::report::{fmt, write_checks, write_csv, Check, Outcome};
use crate::HarnessError;

use super::{run_solve, solver_config};

pub fn run(cfg: &ExperimentConfig, out_dir: &Path, plot: bool) -> Result<Outcome, HarnessError> {
    let grid = cfg.grid()?;
    let phi = data::build(grid, cfg.data, cfg.derived_seed("data"))?;
    let runs: Vec<Trajectory> = cfg
        .eps_list
        .par_iter()
        .map(|&eps| run_solve(&phi, &solver_config(cfg, grid, eps, cfg.nonlinear)))
        .collect::<Result<_, _>>()?;

    let traj_dir = out_dir.join("trajectories");
    std::fs::create_dir_all(&traj_dir)?;

    let mut outcome = Outcome::default();
    let hash = cfg.hash();
    let version = env!("CARGO_PKG_VERSION");
    let mut rows = Vec::new();
    for (i, (eps, traj)) in cfg.eps_list.iter().zip(&runs).enumerate() {
        let file = format!("trajectories/sim_eps{i}.traj");
        traj.write_binary(&out_dir.join(&file))?;
        for (t, c) in traj.times().iter().zip(traj.conserved()) {
            rows.push(vec![
                fmt(*eps),
                fmt(*t),
                fmt(c.mass),
                fmt(c.l2),
                fmt(c.hamiltonian),
                file.clone(),
                hash.clone(),
                version.to_string(),
            ]);
        }
        let (mass, l2, ham) = traj.conserved_drift()?;
        outcome.push(Check::bounded(
            format!("mass_drift_eps_{eps}"),
            mass,
            0.0,
            cfg.mass_tol,
        ));
        outcome.push(Check::bounded(
            format!("l2_drift_eps_{eps}"),
            l2,
            0.0,
            cfg.l2_tol,
        ));
        outcome.push(Check::bounded(
            format!("hamiltonian_drift_eps_{eps}"),
            ham,
            0.0,
            cfg.ham_tol,
        ));
    }

    let report_path = out_dir.join("simulate_report.csv");
    write_csv(
        &report_path,
        &[
            "eps",
            "t",
            "mass",
            "l2",
            "hamiltonian",
            "traj_file",
            "config_hash",
            "version",
        ],
        &rows,
    )?;
    let checks_path = out_dir.join("simulate_checks.csv");
    write_checks(&checks_path, &outcome.checks)?;
    outcome.files.push(report_path);
    outcome.files.push(checks_path);

    if plot {
        let series: Vec<Series> = cfg
            .eps_list
            .iter()
            .zip(&runs)
            .map(|(eps, traj)| Series {
                name: format!("eps={eps}"),
                points: traj
                    .times()
                    .iter()
                    .zip(traj.conserved())
                    .map(|(t, c)| (*t, c.hamiltonian))
                    .collect(),
            })
            .collect();
        let plot_path = out_dir.join("simulate_hamiltonian.svg");
        line_plot(
            &plot_path,
            "energy along runs",
            "t",
            "hamiltonian",
            &series,
            false,
            false,
        )?;
        outcome.files.push(plot_path);
    }
    Ok(outcome)
}
