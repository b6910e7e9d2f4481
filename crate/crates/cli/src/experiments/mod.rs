//! The experiment runners. Each takes a validated config and an output
//! directory, writes CSV reports (and optional plots), and returns an
//! [`Outcome`](crate::report::Outcome) whose checks decide the exit code.
//! Independent cells (per-eps runs, sweeps) execute in parallel; report
//! assembly is a single ordered merge, so outputs are byte-identical for a
//! fixed config and seed.

use std::path::Path;

use kawahara_core::evolve::{solve, SolverConfig, Trajectory};
use kawahara_core::spectral::{Grid, NormSpec, RealField};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::report::Outcome;
use crate::HarnessError;

pub mod converge;
pub mod equicont;
pub mod regions;
pub mod scaling;
pub mod simulate;
pub mod strichartz;
pub mod xsb;

/// Dispatches to the runner for `cfg.kind`.
pub fn run(cfg: &ExperimentConfig, out_dir: &Path, plot: bool) -> Result<Outcome, HarnessError> {
    cfg.validate()?;
    std::fs::create_dir_all(out_dir)?;
    match cfg.kind {
        ExperimentKind::Simulate => simulate::run(cfg, out_dir, plot),
        ExperimentKind::Converge => converge::run(cfg, out_dir, plot),
        ExperimentKind::Equicont => equicont::run(cfg, out_dir, plot),
        ExperimentKind::Scaling => scaling::run(cfg, out_dir, plot),
        ExperimentKind::Strichartz => strichartz::run(cfg, out_dir, plot),
        ExperimentKind::Regions => regions::run(cfg, out_dir, plot),
        ExperimentKind::Xsb => xsb::run(cfg, out_dir, plot),
    }
}

pub(crate) fn solver_config(
    cfg: &ExperimentConfig,
    grid: Grid,
    eps: f64,
    nonlinear: bool,
) -> SolverConfig {
    SolverConfig {
        grid,
        eps,
        t_end: cfg.t_end,
        dt: cfg.dt,
        sample_every: cfg.sample_every,
        nonlinear,
    }
}

pub(crate) fn run_solve(phi: &RealField, sc: &SolverConfig) -> Result<Trajectory, HarnessError> {
    solve(phi, sc).map_err(|e| HarnessError::Run(format!("solve at eps = {}: {e}", sc.eps)))
}

/// `sup_t |a(t) - b(t)|_{H^s}` over common samples, one value per `s`.
pub fn sup_diff_norms(
    a: &Trajectory,
    b: &Trajectory,
    s_list: &[f64],
) -> Result<Vec<f64>, HarnessError> {
    if a.len() != b.len() {
        return Err(HarnessError::Run(format!(
            "trajectories have {} vs {} samples",
            a.len(),
            b.len()
        )));
    }
    let mut sups = vec![0.0f64; s_list.len()];
    for (ua, ub) in a.states().iter().zip(b.states()) {
        let hat = ua.sub(ub)?.forward()?;
        for (sup, &s) in sups.iter_mut().zip(s_list) {
            *sup = sup.max(hat.sobolev_norm(NormSpec::new(s)));
        }
    }
    Ok(sups)
}

/// `sup_t |u(t)|_{H^s}`, one value per `s`.
pub fn sup_norms(traj: &Trajectory, s_list: &[f64]) -> Result<Vec<f64>, HarnessError> {
    let mut sups = vec![0.0f64; s_list.len()];
    for u in traj.states() {
        let hat = u.forward()?;
        for (sup, &s) in sups.iter_mut().zip(s_list) {
            *sup = sup.max(hat.sobolev_norm(NormSpec::new(s)));
        }
    }
    Ok(sups)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

/// Subsamples every `factor`-th state into a coarser trajectory.
pub(crate) fn subsample(traj: &Trajectory, factor: usize) -> Result<Trajectory, HarnessError> {
    let cfg = traj.config();
    let coarse = SolverConfig {
        sample_every: cfg.sample_every * factor,
        ..*cfg
    };
    let states: Vec<RealField> = traj.states().iter().step_by(factor).cloned().collect();
    Ok(Trajectory::from_parts(coarse, states)?)
}
