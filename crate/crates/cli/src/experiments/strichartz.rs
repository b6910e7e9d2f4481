//! Mixed-norm probe constants for the linear flow: local smoothing with the
//! first-stationary notch, dispersive decay with the second notch, and the
//! low-frequency maximal function. Uniformity across eps is the claim under
//! test; a frequency-concentrated packet without the notch shows why the
//! projection is needed.

use std::path::Path;

use rayon::prelude::*;

use kawahara_core::dispersion::{linear_probe, uniform_t_grid, DispersionParams, ProbeKind};
use kawahara_core::projectors::Multiplier;

use crate::config::ExperimentConfig;
use crate::data;
use crate::plot::{line_plot, Series};
use crate::report::{fmt, write_checks, write_csv, Check, Outcome};
use crate::HarnessError;

const KINDS: [(ProbeKind, &str); 3] = [
    (ProbeKind::KatoSmoothing, "kato"),
    (ProbeKind::Strichartz, "strichartz"),
    (ProbeKind::MaximalInTime, "maximal"),
];

fn projector_for(
    kind: ProbeKind,
    grid: kawahara_core::spectral::Grid,
    eps: f64,
) -> Result<Multiplier, HarnessError> {
    let m = match kind {
        ProbeKind::KatoSmoothing => Multiplier::notch_first(grid, eps)?,
        ProbeKind::Strichartz => Multiplier::notch_second(grid, eps)?,
        ProbeKind::MaximalInTime => Multiplier::low_pass(grid, 1),
    };
    Ok(m)
}

pub fn run(cfg: &ExperimentConfig, out_dir: &Path, plot: bool) -> Result<Outcome, HarnessError> {
    let grid = cfg.grid()?;
    let phi = data::build(grid, cfg.data, cfg.derived_seed("data"))?;
    let t_grid = uniform_t_grid(cfg.t_end.min(1.0), cfg.probe_times);

    let mut jobs = Vec::new();
    for &eps in &cfg.eps_list {
        for (kind, name) in KINDS {
            jobs.push((eps, kind, name));
        }
    }
    let cells: Vec<(f64, &str, f64)> = jobs
        .par_iter()
        .map(|&(eps, kind, name)| -> Result<_, HarnessError> {
            let params = DispersionParams::new(eps)?;
            let projector = projector_for(kind, grid, eps)?;
            let ratio = linear_probe(&phi, &params, kind, &t_grid, Some(&projector))?;
            Ok((eps, name, ratio))
        })
        .collect::<Result<_, _>>()?;

    let mut outcome = Outcome::default();
    for (kind, name) in KINDS {
        let _ = kind;
        let values: Vec<f64> = cells
            .iter()
            .filter(|(_, n, _)| *n == name)
            .map(|(_, _, r)| *r)
            .collect();
        let lo = values.iter().fold(f64::INFINITY, |m, v| m.min(*v));
        let hi = values.iter().fold(0.0f64, |m, v| m.max(*v));
        outcome.push(Check::bounded(
            format!("{name}_variation_across_eps"),
            hi / lo,
            1.0,
            cfg.variation_factor,
        ));
    }

    // A packet sitting at the zero-group-velocity frequency does not
    // disperse: without the notch the smoothing constant degrades.
    let eps_c = cfg.concentrated_eps;
    let params = DispersionParams::new(eps_c)?;
    let packet = data::stationary_packet(grid, eps_c)?;
    let notch = Multiplier::notch_first(grid, eps_c)?;
    let projected = linear_probe(
        &packet,
        &params,
        ProbeKind::KatoSmoothing,
        &t_grid,
        Some(&notch),
    )?;
    let unprojected = linear_probe(&packet, &params, ProbeKind::KatoSmoothing, &t_grid, None)?;
    let separation = unprojected / projected;
    outcome.push(Check::bounded(
        "unprojected_over_projected_kato",
        separation,
        cfg.separation_factor,
        f64::INFINITY,
    ));

    let hash = cfg.hash();
    let version = env!("CARGO_PKG_VERSION");
    let mut rows: Vec<Vec<String>> = cells
        .iter()
        .map(|&(eps, name, ratio)| {
            vec![
                fmt(eps),
                name.to_string(),
                ratio.to_string(),
                "projected".into(),
                hash.clone(),
                version.to_string(),
            ]
        })
        .collect();
    rows.push(vec![
        fmt(eps_c),
        "kato".into(),
        fmt(projected),
        "packet_projected".into(),
        hash.clone(),
        version.to_string(),
    ]);
    rows.push(vec![
        fmt(eps_c),
        "kato".into(),
        fmt(unprojected),
        "packet_unprojected".into(),
        hash.clone(),
        version.to_string(),
    ]);
    let report_path = out_dir.join("strichartz_report.csv");
    write_csv(
        &report_path,
        &["eps", "probe", "ratio", "variant", "config_hash", "version"],
        &rows,
    )?;
    let checks_path = out_dir.join("strichartz_checks.csv");
    write_checks(&checks_path, &outcome.checks)?;
    outcome.files.push(report_path);
    outcome.files.push(checks_path);

    if plot {
        let series: Vec<Series> = KINDS
            .iter()
            .map(|(_, name)| Series {
                name: name.to_string(),
                points: cells
                    .iter()
                    .filter(|(_, n, _)| n == name)
                    .map(|(e, _, r)| (*e, *r))
                    .collect(),
            })
            .collect();
        let plot_path = out_dir.join("strichartz_ratios.svg");
        line_plot(
            &plot_path,
            "probe constants vs eps",
            "eps",
            "probe / data L2",
            &series,
            true,
            false,
        )?;
        outcome.files.push(plot_path);
    }
    Ok(outcome)
}
