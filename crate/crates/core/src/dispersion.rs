//! Phase function `phi_eps(xi) = xi^3 - eps*xi^5` of the linearized flow,
//! its stationary points, the quadratic resonance function, frequency-region
//! classification, the free propagator and mixed-norm probes for the linear
//! smoothing estimates, plus the seeded sampling sweeps behind the
//! region-constant checks.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::projectors::{
    first_stationary, notch_first, psi_max_slope, Multiplier, NOTCH_SLOPE,
};
use crate::spectral::{RealField, SpectralField};
use crate::{Error, Result};

/// Dispersion strength `eps >= 0`; `eps = 0` is the KdV limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionParams {
    eps: f64,
}

/// Frequencies where the first/second derivative of the phase vanish.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryPoints {
    /// `|xi| = sqrt(3/(5 eps))`: zero group-velocity shift, `phi' = 0`.
    pub first: f64,
    /// `|xi| = sqrt(3/(10 eps))`: vanishing curvature, `phi'' = 0`.
    pub second: f64,
}

/// Classification of a frequency relative to the resonance geometry.
///
/// The resonant band takes precedence; the two intervals are disjoint for
/// every `eps > 0` (the band sits strictly above the pair window).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// `|xi|` in `[15/16, 17/16] * sqrt(3/(5 eps))`, where the bracket
    /// `3 - 5 eps (xi^2 - xi1 xi2)` can vanish for low-high interactions.
    ResonantBand,
    /// `|xi|` in `[sqrt(17/(80 eps)), sqrt(2/(5 eps))]`, where balanced
    /// pairs of comparable frequencies can resonate.
    PairWindow,
    Outside,
}

impl DispersionParams {
    pub fn new(eps: f64) -> Result<Self> {
        if !eps.is_finite() || eps < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "dispersion parameter must satisfy eps >= 0, got {eps}"
            )));
        }
        Ok(Self { eps })
    }

    /// The KdV limit `eps = 0`.
    pub fn kdv() -> Self {
        Self { eps: 0.0 }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// `phi(xi) = xi^3 - eps xi^5`; odd in `xi`.
    pub fn phase(&self, xi: f64) -> f64 {
        let x2 = xi * xi;
        xi * x2 * (1.0 - self.eps * x2)
    }

    /// `phi'(xi) = 3 xi^2 - 5 eps xi^4`.
    pub fn phase_prime(&self, xi: f64) -> f64 {
        let x2 = xi * xi;
        x2 * (3.0 - 5.0 * self.eps * x2)
    }

    /// `phi''(xi) = 6 xi - 20 eps xi^3`.
    pub fn phase_second(&self, xi: f64) -> f64 {
        xi * (6.0 - 20.0 * self.eps * xi * xi)
    }

    /// Stationary points; `None` in the KdV limit where the cubic phase has
    /// no finite stationary frequency.
    pub fn stationary_points(&self) -> Option<StationaryPoints> {
        if self.eps == 0.0 {
            return None;
        }
        Some(StationaryPoints {
            first: (3.0 / (5.0 * self.eps)).sqrt(),
            second: (3.0 / (10.0 * self.eps)).sqrt(),
        })
    }

    /// Phase mismatch of a quadratic interaction splitting `xi` into
    /// `xi1 + (xi - xi1)`: `phi(xi) - phi(xi1) - phi(xi - xi1)`.
    pub fn resonance(&self, xi: f64, xi1: f64) -> f64 {
        self.phase(xi) - self.phase(xi1) - self.phase(xi - xi1)
    }

    /// Non-resonance bracket `|3 - 5 eps (xi^2 - xi1 (xi - xi1))|`; the
    /// resonance satisfies `|Omega| = |xi xi1 (xi-xi1)| * Gamma`.
    pub fn gamma(&self, xi: f64, xi1: f64) -> f64 {
        (3.0 - 5.0 * self.eps * (xi * xi - xi1 * (xi - xi1))).abs()
    }

    /// Closed interval of `|xi|` forming the resonant band.
    pub fn resonant_band(&self) -> Option<(f64, f64)> {
        self.stationary_points()
            .map(|s| (15.0 / 16.0 * s.first, 17.0 / 16.0 * s.first))
    }

    /// Closed interval of `|xi|` forming the balanced-pair window.
    pub fn pair_window(&self) -> Option<(f64, f64)> {
        if self.eps == 0.0 {
            return None;
        }
        Some((
            (17.0 / (80.0 * self.eps)).sqrt(),
            (2.0 / (5.0 * self.eps)).sqrt(),
        ))
    }

    /// Region label for `|xi|`; rejected in the KdV limit where the regions
    /// are undefined.
    pub fn classify(&self, xi: f64) -> Result<Region> {
        let band = self.resonant_band().ok_or_else(|| {
            Error::InvalidParameter("region classification requires eps > 0".into())
        })?;
        let window = self.pair_window().expect("eps > 0");
        let a = xi.abs();
        if a >= band.0 && a <= band.1 {
            Ok(Region::ResonantBand)
        } else if a >= window.0 && a <= window.1 {
            Ok(Region::PairWindow)
        } else {
            Ok(Region::Outside)
        }
    }

    /// Free evolution: multiplies mode `k` by `exp(i t phi(xi_k))`.
    ///
    /// The factor has unit modulus, so the L^2 norm is preserved exactly and
    /// `propagate(s, t) . propagate(s', t')` composes as `t + t'`.
    pub fn propagate(&self, s: &SpectralField, t: f64) -> SpectralField {
        let grid = s.grid();
        let mut out = s.clone();
        for (i, c) in out.coeffs_mut().iter_mut().enumerate() {
            *c *= Complex64::cis(t * self.phase(grid.wavenumber(i)));
        }
        out
    }
}

/// Which linear mixed-norm estimate a probe exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeKind {
    /// Local smoothing: `|d_x U(t) phi|` measured in `L_x^inf L_t^2`.
    KatoSmoothing,
    /// Dispersive decay: `|D_x^(1/4) U(t) phi|` in `L_t^4 L_x^inf`.
    Strichartz,
    /// Maximal function: `|U(t) phi|` in `L_x^2 L_t^inf`.
    MaximalInTime,
}

fn validate_t_grid(t_grid: &[f64]) -> Result<f64> {
    if t_grid.len() < 64 {
        return Err(Error::TooFewSamples {
            got: t_grid.len(),
            need: 64,
        });
    }
    let dt = t_grid[1] - t_grid[0];
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidParameter(
            "time grid must be strictly increasing".into(),
        ));
    }
    for w in t_grid.windows(2) {
        if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt {
            return Err(Error::InvalidParameter(
                "time grid must be uniformly spaced".into(),
            ));
        }
    }
    let lo = t_grid[0];
    let hi = t_grid[t_grid.len() - 1];
    if lo < -1e-12 || hi > 1.0 + 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "time grid must lie in [0, 1], got [{lo}, {hi}]"
        )));
    }
    Ok(dt)
}

/// Uniform time grid `0..=t_end` with `samples` points.
pub fn uniform_t_grid(t_end: f64, samples: usize) -> Vec<f64> {
    let dt = t_end / (samples - 1) as f64;
    (0..samples).map(|i| i as f64 * dt).collect()
}

/// Discrete mixed-norm probe of the free evolution, normalized by the L^2
/// norm of the data: the "constant" whose uniformity in `eps` the linear
/// estimates assert. Time integrals use the rectangle rule with weight `dt`;
/// sup norms are exact maxima over the grid.
pub fn linear_probe(
    phi: &RealField,
    params: &DispersionParams,
    kind: ProbeKind,
    t_grid: &[f64],
    projector: Option<&Multiplier>,
) -> Result<f64> {
    let dt = validate_t_grid(t_grid)?;
    let data_l2 = phi.lebesgue_norms().l2;
    if data_l2 == 0.0 {
        return Err(Error::InvalidParameter("probe data must be nonzero".into()));
    }
    // Work on the dealiased spectrum, the solver's state space; this also
    // keeps the rotated field real-valued (the Nyquist mode has no partner).
    let mut hat = phi.forward()?.dealias();
    hat = match kind {
        ProbeKind::KatoSmoothing => hat.derivative(1),
        ProbeKind::Strichartz => hat.fractional_derivative(0.25),
        ProbeKind::MaximalInTime => hat,
    };
    if let Some(m) = projector {
        hat = m.apply(&hat)?;
    }

    let grid = phi.grid();
    let n = grid.n();
    let value = match kind {
        ProbeKind::KatoSmoothing => {
            let mut per_point = vec![0.0f64; n];
            for &t in t_grid {
                let u = params.propagate(&hat, t).inverse()?;
                for (acc, &v) in per_point.iter_mut().zip(u.samples()) {
                    *acc += v * v * dt;
                }
            }
            per_point.iter().fold(0.0f64, |m, &v| m.max(v)).sqrt()
        }
        ProbeKind::Strichartz => {
            let mut acc = 0.0f64;
            for &t in t_grid {
                let linf = params.propagate(&hat, t).inverse()?.lebesgue_norms().linf;
                acc += linf.powi(4) * dt;
            }
            acc.powf(0.25)
        }
        ProbeKind::MaximalInTime => {
            let mut per_point = vec![0.0f64; n];
            for &t in t_grid {
                let u = params.propagate(&hat, t).inverse()?;
                for (acc, &v) in per_point.iter_mut().zip(u.samples()) {
                    *acc = acc.max(v.abs());
                }
            }
            let sum: f64 = per_point.iter().map(|v| v * v).sum();
            (grid.dx() * sum).sqrt()
        }
    };
    Ok(value / data_l2)
}

// ---------------------------------------------------------------------------
// Sampled region sweeps
// ---------------------------------------------------------------------------

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn random_sign(rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen::<bool>() {
        1.0
    } else {
        -1.0
    }
}

/// Outcome of the low-high interaction sweep (widely separated input
/// scales): minimum of the bracket away from the resonant band, and the
/// extremes of `(xi^2 - xi1 xi2)/xi^2`.
#[derive(Debug, Clone, Copy)]
pub struct LowHighSweep {
    pub min_gamma: f64,
    pub sandwich_min: f64,
    pub sandwich_max: f64,
    /// Samples with `|xi|` outside the resonant band (the ones entering
    /// `min_gamma`).
    pub gamma_samples: u64,
    pub total_samples: u64,
}

/// Sweeps pairs whose input dyadic magnitudes satisfy `N1 < 2^-10 N2`
/// (`N = 2^floor(log2 |.|)`), with the large scale drawn from dyadic shells
/// reaching past the stationary point, and records the minimum bracket over
/// samples with `|xi|` outside the resonant band.
pub fn sweep_low_high(eps: f64, samples: u64, seed: u64) -> LowHighSweep {
    let params = DispersionParams::new(eps).expect("eps >= 0");
    let band = params.resonant_band();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Dyadic shells for the large input, covering |xi| <= 4/sqrt(eps).
    let k_hi = if eps > 0.0 {
        (6.4 / eps.sqrt()).log2().floor() as i64
    } else {
        14
    };
    let k_hi = k_hi.max(4) as u32;

    let mut out = LowHighSweep {
        min_gamma: f64::INFINITY,
        sandwich_min: f64::INFINITY,
        sandwich_max: f64::NEG_INFINITY,
        gamma_samples: 0,
        total_samples: samples,
    };
    for _ in 0..samples {
        let k2 = rng.gen_range(3..=k_hi) as i32;
        let shell_lo = 5.0 * (2.0f64).powi(k2 - 3);
        let shell_hi = 3.0 * (2.0f64).powi(k2 - 1);
        let xi2 = random_sign(&mut rng) * log_uniform(&mut rng, shell_lo, shell_hi);
        let e2 = xi2.abs().log2().floor();
        // Value-scale separation: N1 <= 2^(e2-11) < 2^-10 N2.
        let hi = (2.0f64).powf(e2 - 10.0) * (1.0 - 1e-12);
        let xi1 = random_sign(&mut rng) * log_uniform(&mut rng, hi * (2.0f64).powi(-10), hi);
        let xi = xi1 + xi2;

        let ratio = (xi * xi - xi1 * xi2) / (xi * xi);
        out.sandwich_min = out.sandwich_min.min(ratio);
        out.sandwich_max = out.sandwich_max.max(ratio);

        let in_band = band
            .map(|(lo, hi)| xi.abs() >= lo && xi.abs() <= hi)
            .unwrap_or(false);
        if !in_band {
            out.min_gamma = out.min_gamma.min(params.gamma(xi, xi1));
            out.gamma_samples += 1;
        }
    }
    out
}

/// Outcome of the balanced-pair sweep inside the pair window.
#[derive(Debug, Clone, Copy)]
pub struct PairWindowSweep {
    pub min_gamma: f64,
    pub accepted: u64,
    pub total_samples: u64,
}

/// Sweeps interactions with output in the pair window and both inputs above
/// its lower edge, recording the minimum bracket.
pub fn sweep_pair_window(eps: f64, samples: u64, seed: u64) -> Result<PairWindowSweep> {
    let params = DispersionParams::new(eps)?;
    let (lo, hi) = params.pair_window().ok_or_else(|| {
        Error::InvalidParameter("pair-window sweep requires eps > 0".into())
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reach = 4.0 / eps.sqrt();
    let mut out = PairWindowSweep {
        min_gamma: f64::INFINITY,
        accepted: 0,
        total_samples: samples,
    };
    for _ in 0..samples {
        let xi = random_sign(&mut rng) * rng.gen_range(lo..=hi);
        let xi1 = rng.gen_range(-reach..reach);
        let xi2 = xi - xi1;
        if xi1.abs() <= lo || xi2.abs() <= lo {
            continue;
        }
        out.min_gamma = out.min_gamma.min(params.gamma(xi, xi1));
        out.accepted += 1;
    }
    Ok(out)
}

/// Outcome of the comparability sweep for the output modulation.
#[derive(Debug, Clone, Copy)]
pub struct ModulationSweep {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub accepted: u64,
    pub total_samples: u64,
}

/// On the support of the first notch with `|xi1| <= 2^-7 |xi|`, compares
/// `|Omega|` against `max(|xi xi1 xi2|, eps |xi^3 xi1 xi2|)` and records the
/// extreme ratios.
pub fn sweep_modulation_comparability(
    eps: f64,
    samples: u64,
    seed: u64,
) -> Result<ModulationSweep> {
    let params = DispersionParams::new(eps)?;
    if eps <= 0.0 {
        return Err(Error::InvalidParameter(
            "modulation sweep requires eps > 0".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = ModulationSweep {
        min_ratio: f64::INFINITY,
        max_ratio: f64::NEG_INFINITY,
        accepted: 0,
        total_samples: samples,
    };
    let lo = 2.0f64.powi(-4) / eps.sqrt();
    let hi = 4.0 / eps.sqrt();
    for _ in 0..samples {
        let xi = random_sign(&mut rng) * log_uniform(&mut rng, lo, hi);
        if notch_first(xi, eps)? <= 0.0 {
            continue;
        }
        let a = xi.abs();
        let xi1 = random_sign(&mut rng)
            * log_uniform(&mut rng, a * (2.0f64).powi(-17), a * (2.0f64).powi(-7));
        let xi2 = xi - xi1;
        let base = (xi * xi1 * xi2).abs();
        let weighted = eps * (xi * xi * xi * xi1 * xi2).abs();
        let ratio = params.resonance(xi, xi1).abs() / base.max(weighted);
        out.min_ratio = out.min_ratio.min(ratio);
        out.max_ratio = out.max_ratio.max(ratio);
        out.accepted += 1;
    }
    Ok(out)
}

/// Measured minimum of the bracket over small-input interactions
/// (`|xi1| <= 4`, `1 <= |xi| <= 4/sqrt(eps)`, `|xi|` outside the resonant
/// band). The literature leaves this constant unstated; the sweep reports
/// the measured value instead of asserting a guess.
pub fn sweep_small_input_gamma(eps: f64, samples: u64, seed: u64) -> Result<f64> {
    let params = DispersionParams::new(eps)?;
    let (blo, bhi) = params.resonant_band().ok_or_else(|| {
        Error::InvalidParameter("small-input sweep requires eps > 0".into())
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hi = 4.0 / eps.sqrt();
    let mut min_gamma = f64::INFINITY;
    for _ in 0..samples {
        let xi = random_sign(&mut rng) * log_uniform(&mut rng, 1.0, hi);
        if xi.abs() >= blo && xi.abs() <= bhi {
            continue;
        }
        let xi1 = rng.gen_range(-4.0..=4.0);
        min_gamma = min_gamma.min(params.gamma(xi, xi1));
    }
    Ok(min_gamma)
}

/// Outcome of the notch-difference sweeps.
#[derive(Debug, Clone, Copy)]
pub struct NotchDifferenceSweep {
    /// Samples where the difference failed to vanish exactly in the
    /// protected region (must be 0).
    pub vanishing_violations: u64,
    pub vanishing_samples: u64,
    /// Measured supremum of `|delta| / min(1, sqrt(eps) |xi1|)`.
    pub lipschitz_sup_ratio: f64,
    /// Theoretical cap `max(1, 20 * max|psi'|)` for the ratio.
    pub lipschitz_bound: f64,
    pub lipschitz_samples: u64,
}

/// Part one (at `eps`, intended tiny): inside the resonant band or far from
/// the `1/sqrt(eps)` range, shifting by `|xi1| <= 4` leaves the notch symbol
/// unchanged exactly. Part two: the difference obeys a Lipschitz-type bound
/// `|delta| <= C min(1, sqrt(eps)|xi1|)`.
pub fn sweep_notch_difference(eps: f64, samples: u64, seed: u64) -> Result<NotchDifferenceSweep> {
    if eps <= 0.0 {
        return Err(Error::InvalidParameter(
            "notch sweep requires eps > 0".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let center = first_stationary(eps);
    let inv = 1.0 / eps.sqrt();
    let mut out = NotchDifferenceSweep {
        vanishing_violations: 0,
        vanishing_samples: samples,
        lipschitz_sup_ratio: 0.0,
        lipschitz_bound: (NOTCH_SLOPE * psi_max_slope()).max(1.0),
        lipschitz_samples: samples,
    };

    // Vanishing region: resonant band or outside [2^-3, 2^3]/sqrt(eps).
    for _ in 0..samples {
        let xi1 = rng.gen_range(-4.0..=4.0);
        let r: f64 = rng.gen();
        let mag = if r < 0.5 {
            rng.gen_range(15.0 / 16.0 * center..=17.0 / 16.0 * center)
        } else if r < 0.75 {
            rng.gen_range(0.0..0.125 * inv)
        } else {
            rng.gen_range(8.0 * inv..16.0 * inv)
        };
        let xi = random_sign(&mut rng) * mag;
        let delta = notch_first(xi, eps)? - notch_first(xi - xi1, eps)?;
        if delta != 0.0 {
            out.vanishing_violations += 1;
        }
    }

    // Lipschitz ratio over a broad sample of scales.
    for _ in 0..samples {
        let xi = random_sign(&mut rng) * log_uniform(&mut rng, 1e-3 * inv, 8.0 * inv);
        let xi1 = random_sign(&mut rng) * log_uniform(&mut rng, 1e-6 * inv, 8.0 * inv);
        let delta = (notch_first(xi, eps)? - notch_first(xi - xi1, eps)?).abs();
        let denom = (eps.sqrt() * xi1.abs()).min(1.0);
        if denom > 0.0 {
            out.lipschitz_sup_ratio = out.lipschitz_sup_ratio.max(delta / denom);
        }
    }
    Ok(out)
}
