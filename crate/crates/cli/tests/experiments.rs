//! End-to-end runner tests on trimmed configurations, plus binary-level
//! checks of exit codes, determinism and plotting.

use std::process::Command;

use kawahara_cli::config::{default_config, DataSpec, ExperimentConfig, ExperimentKind};
use kawahara_cli::experiments::{self, converge};

use kawahara_core::evolve::{solve, soliton, SolverConfig};
use kawahara_core::spectral::{Grid, NormSpec};

fn small_converge_config() -> ExperimentConfig {
    let mut cfg = default_config(ExperimentKind::Converge);
    cfg.n = 512;
    cfg.length = 32.0 * std::f64::consts::PI;
    cfg.t_end = 0.2;
    cfg.dt = 1e-3;
    cfg.sample_every = 10;
    cfg.data = DataSpec::Gaussian {
        amp: 0.5,
        width: 2.0,
    };
    cfg
}

#[test]
fn converge_single_eps_degenerate_sweep() {
    let mut cfg = small_converge_config();
    cfg.eps_list = vec![1e-2];
    let dir = tempfile::tempdir().unwrap();
    let outcome = experiments::run(&cfg, dir.path(), false).unwrap();
    assert!(outcome.all_pass());
    let report = std::fs::read_to_string(dir.path().join("converge_report.csv")).unwrap();
    let mut lines = report.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("eps,"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 1, "single-eps sweep yields one row");
    // The H^1 error column is strictly positive.
    let err_h1: f64 = rows[0].split(',').nth(3).unwrap().parse().unwrap();
    assert!(err_h1 > 0.0);
}

#[test]
fn converge_zero_data_reports_zero_errors() {
    let mut cfg = small_converge_config();
    cfg.data = DataSpec::Gaussian {
        amp: 0.0,
        width: 2.0,
    };
    let dir = tempfile::tempdir().unwrap();
    let outcome = experiments::run(&cfg, dir.path(), false).unwrap();
    assert!(outcome.all_pass());
    assert!(outcome
        .checks
        .iter()
        .any(|c| c.name == "degenerate_zero_error_sweep"));
    let report = std::fs::read_to_string(dir.path().join("converge_report.csv")).unwrap();
    for line in report.lines().skip(1) {
        let err_h1: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert_eq!(err_h1, 0.0);
    }
}

/// Free runs are unitary: the L^2 uniform-bound ratio collapses to one.
#[test]
fn uniform_ratio_of_linear_runs_is_unit() {
    let mut cfg = small_converge_config();
    cfg.nonlinear = false;
    cfg.s_list = vec![0.0];
    let family = converge::solve_family(&cfg).unwrap();
    for run in &family.runs {
        let ratios = converge::uniform_ratios(run, &family.data_norms, &cfg.s_list).unwrap();
        assert!(ratios[0] <= 1.0 + 1e-10, "unitary ratio {}", ratios[0]);
        assert!(ratios[0] >= 1.0 - 1e-10);
    }
}

/// A traveling wave keeps its Sobolev norms: the per-time ratio is constant.
#[test]
fn soliton_uniform_ratio_constant_in_time() {
    let grid = Grid::new(512, 32.0 * std::f64::consts::PI).unwrap();
    let phi = soliton(grid, 1.0).unwrap();
    let cfg = SolverConfig {
        grid,
        eps: 0.0,
        t_end: 0.5,
        dt: 1e-3,
        sample_every: 50,
        nonlinear: true,
    };
    let traj = solve(&phi, &cfg).unwrap();
    let h1 = NormSpec::new(1.0);
    let base = phi.forward().unwrap().sobolev_norm(h1);
    for state in traj.states() {
        let ratio = state.forward().unwrap().sobolev_norm(h1) / base;
        assert!((ratio - 1.0).abs() <= 1e-6, "ratio drift {}", ratio - 1.0);
    }
}

/// Zero perturbation gives identically zero response (deterministic solver).
#[test]
fn equicont_zero_delta_is_exactly_zero() {
    let grid = Grid::new(256, 32.0 * std::f64::consts::PI).unwrap();
    let phi = kawahara_core::evolve::gaussian(grid, 0.5, 2.0).unwrap();
    let cfg = SolverConfig {
        grid,
        eps: 1e-2,
        t_end: 0.1,
        dt: 1e-3,
        sample_every: 20,
        nonlinear: true,
    };
    let a = solve(&phi, &cfg).unwrap();
    let b = solve(&phi, &cfg).unwrap();
    for (ua, ub) in a.states().iter().zip(b.states()) {
        assert_eq!(ua.samples(), ub.samples());
    }
}

#[test]
fn scaling_identity_lambda_one() {
    let mut cfg = small_converge_config();
    cfg.kind = ExperimentKind::Scaling;
    cfg.eps_list = vec![1e-3];
    cfg.lambda = 1.0;
    let dir = tempfile::tempdir().unwrap();
    let outcome = experiments::run(&cfg, dir.path(), false).unwrap();
    assert!(outcome.all_pass());
    let mismatch = outcome
        .checks
        .iter()
        .find(|c| c.name.starts_with("scaling_l2_mismatch"))
        .unwrap()
        .value;
    assert_eq!(mismatch, 0.0);
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kawahara"))
}

#[test]
fn cli_exit_codes_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("regions.conf");
    std::fs::write(&conf, "eps = 1e-1, 1e-2\nsamples = 20000\nseed = 3\n").unwrap();

    let out1 = dir.path().join("a");
    let status = binary()
        .args(["regions", "--config"])
        .arg(&conf)
        .arg("--out")
        .arg(&out1)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));

    let out2 = dir.path().join("b");
    let status = binary()
        .args(["regions", "--config"])
        .arg(&conf)
        .arg("--out")
        .arg(&out2)
        .arg("--threads")
        .arg("2")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));

    // Byte-identical reports regardless of thread count.
    let a = std::fs::read(out1.join("regions_report.csv")).unwrap();
    let b = std::fs::read(out2.join("regions_report.csv")).unwrap();
    assert_eq!(a, b);

    // Configuration errors exit with 2.
    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "eps = 1e-3, 1e-2\n").unwrap();
    let status = binary()
        .args(["regions", "--config"])
        .arg(&bad)
        .arg("--out")
        .arg(dir.path().join("c"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // Experiment-kind mismatch is a configuration error too.
    let mismatch = dir.path().join("mismatch.conf");
    std::fs::write(&mismatch, "experiment = converge\n").unwrap();
    let status = binary()
        .args(["regions", "--config"])
        .arg(&mismatch)
        .arg("--out")
        .arg(dir.path().join("d"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn cli_seed_override_changes_hash_and_plot_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("regions.conf");
    std::fs::write(&conf, "eps = 1e-2\nsamples = 5000\nseed = 3\n").unwrap();
    let out = dir.path().join("out");
    let output = binary()
        .args(["regions", "--config"])
        .arg(&conf)
        .arg("--out")
        .arg(&out)
        .args(["--seed", "9"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("seed = 9"));

    // Plotting emits an SVG next to the converge report.
    let conv = dir.path().join("conv.conf");
    std::fs::write(
        &conv,
        "n = 256\nlength = 32pi\nt_end = 0.05\ndt = 1e-3\nsample_every = 5\n\
         eps = 1e-2, 5e-3\nwidth = 2.0\n",
    )
    .unwrap();
    let out_plot = dir.path().join("plot");
    let status = binary()
        .args(["converge", "--config"])
        .arg(&conv)
        .arg("--out")
        .arg(&out_plot)
        .arg("--plot")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out_plot.join("converge_errors.svg").exists());
}

/// Maximal-function probe on a single low mode: the low-pass projector keeps
/// the mode, and the constant is insensitive to eps (the fifth-order phase
/// correction is negligible at |xi| < 1).
#[test]
fn maximal_probe_single_low_mode_eps_independent() {
    use kawahara_core::dispersion::{linear_probe, uniform_t_grid, DispersionParams, ProbeKind};
    use kawahara_core::projectors::Multiplier;
    use kawahara_core::spectral::RealField;

    let grid = Grid::new(256, 8.0 * std::f64::consts::PI).unwrap();
    let xi1 = 2.0 * std::f64::consts::PI / grid.length(); // lowest mode
    let phi = RealField::from_fn(grid, |x| (xi1 * x).cos()).unwrap();
    let t_grid = uniform_t_grid(1.0, 128);
    let low_pass = Multiplier::low_pass(grid, 1);
    let mut ratios = Vec::new();
    for eps in [1e-2, 1e-3, 1e-4] {
        let p = DispersionParams::new(eps).unwrap();
        let ratio =
            linear_probe(&phi, &p, ProbeKind::MaximalInTime, &t_grid, Some(&low_pass)).unwrap();
        assert!(ratio.is_finite() && ratio > 0.0);
        ratios.push(ratio);
    }
    let lo = ratios.iter().fold(f64::INFINITY, |m, v| m.min(*v));
    let hi = ratios.iter().fold(0.0f64, |m, v| m.max(*v));
    assert!(hi / lo <= 1.1, "ratios {ratios:?} vary beyond 10%");
}

/// Low-regularity data: errors still decrease, but no rate is asserted.
#[test]
fn converge_rough_data_reports_slope_without_asserting() {
    let mut cfg = small_converge_config();
    cfg.data = DataSpec::Rough {
        amp: 0.05,
        decay: 1.6,
        cutoff: 6.0,
    };
    cfg.slope_check = false;
    let dir = tempfile::tempdir().unwrap();
    let outcome = experiments::run(&cfg, dir.path(), false).unwrap();
    assert!(outcome.all_pass());
    // The slope appears as a report-only entry.
    let slope = outcome
        .checks
        .iter()
        .find(|c| c.name == "convergence_slope_h1")
        .unwrap();
    assert_eq!(slope.lo, f64::NEG_INFINITY);
    assert!(outcome
        .checks
        .iter()
        .any(|c| c.name == "errors_strictly_decreasing_h1" && c.pass));
}

/// A report value must be reproducible from its on-disk artifact.
#[test]
fn converge_report_references_verifiable_artifacts() {
    let cfg = small_converge_config();
    let dir = tempfile::tempdir().unwrap();
    let outcome = experiments::run(&cfg, dir.path(), false).unwrap();
    assert!(outcome.all_pass());
    let report = std::fs::read_to_string(dir.path().join("converge_report.csv")).unwrap();
    let row = report.lines().nth(1).unwrap();
    let cols: Vec<&str> = row.split(',').collect();
    let traj_file = cols[1];
    // Header: eps, traj_file, err_h0, err_h1, ratio_h0, ratio_h1, end_h0, ...
    let end_h0: f64 = cols[6].parse().unwrap();
    let traj =
        kawahara_core::evolve::Trajectory::read_binary(&dir.path().join(traj_file)).unwrap();
    let recomputed = traj
        .states()
        .last()
        .unwrap()
        .forward()
        .unwrap()
        .sobolev_norm(NormSpec::new(0.0));
    assert!((recomputed - end_h0).abs() <= 1e-12 * end_h0);
}
