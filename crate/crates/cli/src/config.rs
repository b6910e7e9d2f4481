//! Flat `key = value` experiment configuration: UTF-8, one pair per line,
//! `#` comments. Every run embeds the SHA-256 hash of the canonical
//! (sorted, fully defaulted) form, so identical effective configurations
//! hash identically regardless of formatting.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use kawahara_core::projectors::notch_resolved;
use kawahara_core::spectral::Grid;

use crate::HarnessError;

/// Which experiment a config drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Simulate,
    Converge,
    Equicont,
    Scaling,
    Strichartz,
    Regions,
    Xsb,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Simulate => "simulate",
            Self::Converge => "converge",
            Self::Equicont => "equicont",
            Self::Scaling => "scaling",
            Self::Strichartz => "strichartz",
            Self::Regions => "regions",
            Self::Xsb => "xsb",
        }
    }

    pub fn parse(s: &str) -> Result<Self, HarnessError> {
        match s {
            "simulate" => Ok(Self::Simulate),
            "converge" => Ok(Self::Converge),
            "equicont" => Ok(Self::Equicont),
            "scaling" => Ok(Self::Scaling),
            "strichartz" => Ok(Self::Strichartz),
            "regions" => Ok(Self::Regions),
            "xsb" => Ok(Self::Xsb),
            other => Err(HarnessError::Config(format!(
                "unknown experiment kind '{other}'"
            ))),
        }
    }
}

/// Initial-data shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DataSpec {
    /// `amp * exp(-x^2/width^2)`.
    Gaussian { amp: f64, width: f64 },
    /// `3c * sech^2(sqrt(c)/2 x)` with `c = speed`.
    Soliton { speed: f64 },
    /// Random-phase spectrum with envelope `amp * <xi>^-decay` on
    /// `|xi| <= cutoff` (zero beyond, so the resolution guard holds).
    /// Low-regularity surrogate: no convergence rate is asserted for it.
    Rough { amp: f64, decay: f64, cutoff: f64 },
}

/// Fully resolved experiment configuration (defaults applied).
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub n: usize,
    pub length: f64,
    pub t_end: f64,
    pub dt: f64,
    pub sample_every: usize,
    /// Strictly decreasing positive values; the KdV reference is implicit.
    pub eps_list: Vec<f64>,
    pub data: DataSpec,
    pub s_list: Vec<f64>,
    pub seed: u64,
    pub nonlinear: bool,

    // converge / uniform bound
    pub slope_min: f64,
    pub slope_max: f64,
    /// Assert the fitted rate (smooth data); rough data reports it only.
    pub slope_check: bool,
    pub bound_c: f64,
    pub mass_tol: f64,
    pub l2_tol: f64,
    pub ham_tol: f64,

    // equicontinuity
    pub delta_list: Vec<f64>,
    pub lipschitz_c: f64,
    pub response_tol: f64,
    pub bump_amp: f64,
    pub bump_width: f64,

    // scaling
    pub lambda: f64,
    pub mismatch_tol: f64,

    // strichartz probes
    pub probe_times: usize,
    pub variation_factor: f64,
    pub concentrated_eps: f64,
    pub separation_factor: f64,

    // region sweeps
    pub samples: u64,
    pub vanish_eps: f64,

    // space-time norms
    pub b_list: Vec<f64>,
    pub xsb_tol: f64,
}

/// The reference scenario most experiments default to: a Gaussian of
/// amplitude 0.5 and width 4 on a 64*pi torus with 2048 points, horizon 1,
/// step 5e-4, eps grid 1e-2 .. 1.25e-3.
pub fn default_config(kind: ExperimentKind) -> ExperimentConfig {
    ExperimentConfig {
        kind,
        n: 2048,
        length: 64.0 * std::f64::consts::PI,
        t_end: 1.0,
        dt: 5e-4,
        sample_every: 20,
        eps_list: vec![1e-2, 5e-3, 2.5e-3, 1.25e-3],
        data: DataSpec::Gaussian {
            amp: 0.5,
            width: 4.0,
        },
        s_list: vec![0.0, 1.0],
        seed: 7,
        nonlinear: true,
        slope_min: 0.9,
        slope_max: 1.1,
        slope_check: true,
        bound_c: 2.0,
        mass_tol: 1e-10,
        l2_tol: 1e-8,
        ham_tol: 1e-6,
        delta_list: vec![1e-1, 1e-2, 1e-3],
        lipschitz_c: 2.0,
        response_tol: 1e-2,
        bump_amp: 1.0,
        bump_width: 2.0,
        lambda: 2.0,
        mismatch_tol: 1e-5,
        probe_times: 128,
        variation_factor: 4.0,
        concentrated_eps: 1e-3,
        separation_factor: 4.0,
        samples: 1_000_000,
        vanish_eps: 1e-9,
        b_list: vec![0.5, 1.0],
        xsb_tol: 0.05,
    }
}

fn parse_length(v: &str) -> Result<f64, HarnessError> {
    let v = v.trim();
    let (num, pi) = match v.strip_suffix("pi") {
        Some(rest) => (rest.trim(), true),
        None => (v, false),
    };
    let x: f64 = num
        .parse()
        .map_err(|_| HarnessError::Config(format!("bad length '{v}'")))?;
    Ok(if pi { x * std::f64::consts::PI } else { x })
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>, HarnessError> {
    v.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| HarnessError::Config(format!("bad value in '{key}': '{s}'")))
        })
        .collect()
}

fn parse_scalar<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, HarnessError> {
    v.trim()
        .parse()
        .map_err(|_| HarnessError::Config(format!("bad value for '{key}': '{v}'")))
}

impl ExperimentConfig {
    /// Parses a config file for the given experiment; unknown keys are
    /// rejected, a declared `experiment` key must match.
    pub fn from_file(path: &Path, kind: ExperimentKind) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_str(&text, kind)
    }

    pub fn from_str(text: &str, kind: ExperimentKind) -> Result<Self, HarnessError> {
        let mut cfg = default_config(kind);
        let mut data_kind: Option<String> = None;
        let mut amp = None;
        let mut width = None;
        let mut speed = None;
        let mut decay = None;
        let mut cutoff = None;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                HarnessError::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            match key {
                "experiment" => {
                    let declared = ExperimentKind::parse(value)?;
                    if declared != kind {
                        return Err(HarnessError::Config(format!(
                            "config declares experiment '{}' but '{}' was requested",
                            declared.name(),
                            kind.name()
                        )));
                    }
                }
                "n" => cfg.n = parse_scalar(key, value)?,
                "length" => cfg.length = parse_length(value)?,
                "t_end" => cfg.t_end = parse_scalar(key, value)?,
                "dt" => cfg.dt = parse_scalar(key, value)?,
                "sample_every" => cfg.sample_every = parse_scalar(key, value)?,
                "eps" => cfg.eps_list = parse_list(key, value)?,
                "data" => data_kind = Some(value.to_string()),
                "amp" => amp = Some(parse_scalar::<f64>(key, value)?),
                "width" => width = Some(parse_scalar::<f64>(key, value)?),
                "speed" => speed = Some(parse_scalar::<f64>(key, value)?),
                "decay" => decay = Some(parse_scalar::<f64>(key, value)?),
                "cutoff" => cutoff = Some(parse_scalar::<f64>(key, value)?),
                "s_list" => cfg.s_list = parse_list(key, value)?,
                "seed" => cfg.seed = parse_scalar(key, value)?,
                "nonlinear" => cfg.nonlinear = parse_scalar(key, value)?,
                "slope_min" => cfg.slope_min = parse_scalar(key, value)?,
                "slope_max" => cfg.slope_max = parse_scalar(key, value)?,
                "slope_check" => cfg.slope_check = parse_scalar(key, value)?,
                "bound_c" => cfg.bound_c = parse_scalar(key, value)?,
                "mass_tol" => cfg.mass_tol = parse_scalar(key, value)?,
                "l2_tol" => cfg.l2_tol = parse_scalar(key, value)?,
                "ham_tol" => cfg.ham_tol = parse_scalar(key, value)?,
                "delta" => cfg.delta_list = parse_list(key, value)?,
                "lipschitz_c" => cfg.lipschitz_c = parse_scalar(key, value)?,
                "response_tol" => cfg.response_tol = parse_scalar(key, value)?,
                "bump_amp" => cfg.bump_amp = parse_scalar(key, value)?,
                "bump_width" => cfg.bump_width = parse_scalar(key, value)?,
                "lambda" => cfg.lambda = parse_scalar(key, value)?,
                "mismatch_tol" => cfg.mismatch_tol = parse_scalar(key, value)?,
                "probe_times" => cfg.probe_times = parse_scalar(key, value)?,
                "variation_factor" => cfg.variation_factor = parse_scalar(key, value)?,
                "concentrated_eps" => cfg.concentrated_eps = parse_scalar(key, value)?,
                "separation_factor" => cfg.separation_factor = parse_scalar(key, value)?,
                "samples" => cfg.samples = parse_scalar(key, value)?,
                "vanish_eps" => cfg.vanish_eps = parse_scalar(key, value)?,
                "b_list" => cfg.b_list = parse_list(key, value)?,
                "xsb_tol" => cfg.xsb_tol = parse_scalar(key, value)?,
                other => {
                    return Err(HarnessError::Config(format!(
                        "line {}: unknown key '{other}'",
                        lineno + 1
                    )))
                }
            }
        }

        match data_kind.as_deref() {
            None | Some("gaussian") => {
                cfg.data = DataSpec::Gaussian {
                    amp: amp.unwrap_or(0.5),
                    width: width.unwrap_or(4.0),
                };
            }
            Some("soliton") => {
                cfg.data = DataSpec::Soliton {
                    speed: speed.unwrap_or(1.0),
                };
            }
            Some("rough") => {
                cfg.data = DataSpec::Rough {
                    amp: amp.unwrap_or(0.05),
                    decay: decay.unwrap_or(1.6),
                    cutoff: cutoff.unwrap_or(8.0),
                };
            }
            Some(other) => {
                return Err(HarnessError::Config(format!("unknown data shape '{other}'")))
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn grid(&self) -> Result<Grid, HarnessError> {
        Grid::new(self.n, self.length).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let grid = self.grid()?;
        if self.eps_list.is_empty() {
            return Err(HarnessError::Config("eps list must be non-empty".into()));
        }
        for w in self.eps_list.windows(2) {
            if w[1] >= w[0] {
                return Err(HarnessError::Config(
                    "eps list must be strictly decreasing".into(),
                ));
            }
        }
        if *self.eps_list.last().unwrap() <= 0.0 {
            return Err(HarnessError::Config("eps values must be positive".into()));
        }
        if !(self.t_end > 0.0) || !(self.dt > 0.0) || self.dt > self.t_end {
            return Err(HarnessError::Config(format!(
                "need 0 < dt <= t_end, got dt = {}, t_end = {}",
                self.dt, self.t_end
            )));
        }
        if self.sample_every == 0 {
            return Err(HarnessError::Config("sample_every must be positive".into()));
        }
        // Grid-based experiments must resolve the notch transition at the
        // smallest eps; the sweep-only experiment has no grid to check.
        if self.kind != ExperimentKind::Regions {
            let min_eps = *self.eps_list.last().unwrap();
            if !notch_resolved(grid, min_eps) {
                return Err(HarnessError::Config(format!(
                    "notch transition at eps = {min_eps} spans fewer than 4 lattice \
                     spacings on L = {}; enlarge the domain or eps",
                    self.length
                )));
            }
        }
        if self.kind == ExperimentKind::Strichartz && !notch_resolved(grid, self.concentrated_eps)
        {
            return Err(HarnessError::Config(
                "notch transition at concentrated_eps is unresolved on this grid".into(),
            ));
        }
        for d in &self.delta_list {
            if *d <= 0.0 {
                return Err(HarnessError::Config("delta values must be positive".into()));
            }
        }
        if self.probe_times < 64 {
            return Err(HarnessError::Config("probe_times must be >= 64".into()));
        }
        if self.kind == ExperimentKind::Xsb {
            let samples = (self.t_end / (self.dt * self.sample_every as f64) + 1e-9) as usize + 1;
            if samples < 64 {
                return Err(HarnessError::Config(format!(
                    "space-time diagnostics need >= 64 recorded samples, config yields {samples}"
                )));
            }
        }
        Ok(())
    }

    /// Canonical sorted `key = value` rendering of the effective config.
    pub fn canonical(&self) -> String {
        let mut map = BTreeMap::new();
        let fmt_list = |xs: &[f64]| {
            xs.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        map.insert("experiment", self.kind.name().to_string());
        map.insert("n", self.n.to_string());
        map.insert("length", self.length.to_string());
        map.insert("t_end", self.t_end.to_string());
        map.insert("dt", self.dt.to_string());
        map.insert("sample_every", self.sample_every.to_string());
        map.insert("eps", fmt_list(&self.eps_list));
        match self.data {
            DataSpec::Gaussian { amp, width } => {
                map.insert("data", "gaussian".into());
                map.insert("amp", amp.to_string());
                map.insert("width", width.to_string());
            }
            DataSpec::Soliton { speed } => {
                map.insert("data", "soliton".into());
                map.insert("speed", speed.to_string());
            }
            DataSpec::Rough { amp, decay, cutoff } => {
                map.insert("data", "rough".into());
                map.insert("amp", amp.to_string());
                map.insert("decay", decay.to_string());
                map.insert("cutoff", cutoff.to_string());
            }
        }
        map.insert("s_list", fmt_list(&self.s_list));
        map.insert("seed", self.seed.to_string());
        map.insert("nonlinear", self.nonlinear.to_string());
        map.insert("slope_min", self.slope_min.to_string());
        map.insert("slope_max", self.slope_max.to_string());
        map.insert("slope_check", self.slope_check.to_string());
        map.insert("bound_c", self.bound_c.to_string());
        map.insert("mass_tol", self.mass_tol.to_string());
        map.insert("l2_tol", self.l2_tol.to_string());
        map.insert("ham_tol", self.ham_tol.to_string());
        map.insert("delta", fmt_list(&self.delta_list));
        map.insert("lipschitz_c", self.lipschitz_c.to_string());
        map.insert("response_tol", self.response_tol.to_string());
        map.insert("bump_amp", self.bump_amp.to_string());
        map.insert("bump_width", self.bump_width.to_string());
        map.insert("lambda", self.lambda.to_string());
        map.insert("mismatch_tol", self.mismatch_tol.to_string());
        map.insert("probe_times", self.probe_times.to_string());
        map.insert("variation_factor", self.variation_factor.to_string());
        map.insert("concentrated_eps", self.concentrated_eps.to_string());
        map.insert("separation_factor", self.separation_factor.to_string());
        map.insert("samples", self.samples.to_string());
        map.insert("vanish_eps", self.vanish_eps.to_string());
        map.insert("b_list", fmt_list(&self.b_list));
        map.insert("xsb_tol", self.xsb_tol.to_string());
        let mut out = String::new();
        for (k, v) in map {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    /// First 16 hex chars of the SHA-256 of the canonical form.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// Seed for a named sub-task, mixed deterministically from the base seed.
    pub fn derived_seed(&self, tag: &str) -> u64 {
        derive_seed(self.seed, tag)
    }
}

/// FNV-1a mix of a tag string into a base seed.
pub fn derive_seed(base: u64, tag: &str) -> u64 {
    let mut h = 0xcbf29ce484222325u64 ^ base.wrapping_mul(0x9e3779b97f4a7c15);
    for b in tag.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}
