//! Space-time frequency diagnostics on recorded trajectories: a smooth time
//! window, the joint transform `v_hat(xi_k, tau_m)`, weighted space-time
//! norms with the modulation weight `<tau - phi(xi)>`, their dyadic-block
//! refinement, and the modulation-energy profile.
//!
//! The modulation `sigma = tau - phi_eps(xi)` measures the distance of a
//! space-time mode to the characteristic surface of the free flow; free
//! solutions concentrate at `sigma = 0`.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::dispersion::DispersionParams;
use crate::evolve::Trajectory;
use crate::projectors::eta_level;
use crate::spectral::{bracket, Grid};
use crate::{Error, Result};

/// Minimal number of time samples for a meaningful transform.
pub const MIN_TIME_SAMPLES: usize = 64;

/// Smooth taper over a uniformly sampled time record, built from the same
/// bump as the frequency cutoffs and vanishing at both record ends.
#[derive(Debug, Clone)]
pub struct WindowSpec {
    values: Vec<f64>,
    dt: f64,
}

impl WindowSpec {
    /// Window for a record of `samples` points spaced `dt` apart.
    pub fn for_record(samples: usize, dt: f64) -> Result<Self> {
        if samples < MIN_TIME_SAMPLES {
            return Err(Error::TooFewSamples {
                got: samples,
                need: MIN_TIME_SAMPLES,
            });
        }
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "sample spacing must be positive, got {dt}"
            )));
        }
        let span = (samples - 1) as f64 * dt;
        let mid = 0.5 * span;
        let values = (0..samples)
            .map(|l| {
                let t = l as f64 * dt;
                crate::projectors::psi(3.0 * (t - mid) / span)
            })
            .collect();
        Ok(Self { values, dt })
    }

    /// Window matching a trajectory's sample lattice.
    pub fn for_trajectory(traj: &Trajectory) -> Result<Self> {
        Self::for_record(traj.len(), traj.config().sample_spacing())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sample_spacing(&self) -> f64 {
        self.dt
    }

    /// DFT period `T_w = M * dt` of the windowed record.
    pub fn period(&self) -> f64 {
        self.values.len() as f64 * self.dt
    }

    /// Window spectrum `(1/M) sum_l w(t_l) exp(-i tau_m t_l)` in FFT order.
    pub fn spectrum(&self) -> Vec<Complex64> {
        let m = self.values.len();
        let mut buf: Vec<Complex64> = self
            .values
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        FftPlanner::new().plan_fft_forward(m).process(&mut buf);
        let scale = 1.0 / m as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        buf
    }

    /// Normalization constant `C_window(b)`: the windowed `X^(0,b)` norm of
    /// a free solution per unit of data L^2 norm, computed from the window
    /// spectrum as `sqrt(T_w * sum_m <tau_m>^(2b) |w_hat(tau_m)|^2)`.
    pub fn constant(&self, b: f64) -> f64 {
        let m = self.values.len();
        let period = self.period();
        let spec = self.spectrum();
        let sum: f64 = spec
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let tau = Self::tau_at(i, m, period);
                bracket(tau).powf(2.0 * b) * c.norm_sqr()
            })
            .sum();
        (period * sum).sqrt()
    }

    fn tau_at(idx: usize, m: usize, period: f64) -> f64 {
        let signed = if idx < m / 2 {
            idx as i64
        } else {
            idx as i64 - m as i64
        };
        2.0 * std::f64::consts::PI * signed as f64 / period
    }
}

/// Joint frequency content `v_hat(xi_k, tau_m)` of a windowed record.
#[derive(Debug, Clone)]
pub struct SpaceTimeSpectrum {
    grid: Grid,
    t_period: f64,
    m_count: usize,
    /// Row-major by time frequency: index `m * n + k`.
    modes: Vec<Complex64>,
    source: String,
}

impl SpaceTimeSpectrum {
    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn time_modes(&self) -> usize {
        self.m_count
    }

    pub fn period(&self) -> f64 {
        self.t_period
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn mode(&self, m_idx: usize, k_idx: usize) -> Complex64 {
        self.modes[m_idx * self.grid.n() + k_idx]
    }

    /// Time frequency `tau_m = 2 pi m / T_w` for storage index `m_idx`.
    pub fn tau(&self, m_idx: usize) -> f64 {
        WindowSpec::tau_at(m_idx, self.m_count, self.t_period)
    }

    /// Windowed space-time L^2 energy `L * T_w * sum |v_hat|^2`.
    pub fn total_energy(&self) -> f64 {
        self.quadrature() * self.modes.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    fn quadrature(&self) -> f64 {
        self.grid.length() * self.t_period
    }

    #[cfg(test)]
    pub(crate) fn from_modes(
        grid: Grid,
        t_period: f64,
        m_count: usize,
        modes: Vec<Complex64>,
    ) -> Self {
        assert_eq!(modes.len(), m_count * grid.n());
        Self {
            grid,
            t_period,
            m_count,
            modes,
            source: "synthetic".into(),
        }
    }
}

/// Transforms a windowed trajectory into its joint spectrum: a spatial
/// transform per sample followed by a DFT across samples. Parseval holds in
/// both variables against the windowed record.
pub fn spacetime_transform(traj: &Trajectory, window: &WindowSpec) -> Result<SpaceTimeSpectrum> {
    let m = traj.len();
    if m < MIN_TIME_SAMPLES {
        return Err(Error::TooFewSamples {
            got: m,
            need: MIN_TIME_SAMPLES,
        });
    }
    if window.len() != m {
        return Err(Error::InvalidParameter(format!(
            "window has {} samples but the record has {m}",
            window.len()
        )));
    }
    let spacing = traj.config().sample_spacing();
    if (window.sample_spacing() - spacing).abs() > 1e-12 * spacing {
        return Err(Error::InvalidParameter(
            "window sample spacing does not match the record".into(),
        ));
    }

    let grid = traj.config().grid;
    let n = grid.n();
    let mut modes = vec![Complex64::new(0.0, 0.0); m * n];
    for (l, (state, &w)) in traj.states().iter().zip(window.values()).enumerate() {
        let windowed = state.scaled(w).forward()?;
        modes[l * n..(l + 1) * n].copy_from_slice(windowed.coeffs());
    }
    // DFT across samples for each spatial mode.
    let fft = FftPlanner::new().plan_fft_forward(m);
    let mut column = vec![Complex64::new(0.0, 0.0); m];
    let scale = 1.0 / m as f64;
    for k in 0..n {
        for l in 0..m {
            column[l] = modes[l * n + k];
        }
        fft.process(&mut column);
        for (l, c) in column.iter().enumerate() {
            modes[l * n + k] = c * scale;
        }
    }
    Ok(SpaceTimeSpectrum {
        grid,
        t_period: window.period(),
        m_count: m,
        modes,
        source: format!(
            "eps={},n={},samples={},nonlinear={}",
            traj.config().eps,
            n,
            m,
            traj.config().nonlinear
        ),
    })
}

/// Weighted space-time norm
/// `(L T_w sum <tau - phi(xi)>^(2b) <xi>^(2s) |v_hat|^2)^(1/2)`.
///
/// `s = b = 0` recovers the windowed space-time L^2 norm exactly.
pub fn xsb_norm(sp: &SpaceTimeSpectrum, s: f64, b: f64, params: &DispersionParams) -> f64 {
    let n = sp.grid.n();
    let mut sum = 0.0;
    for m_idx in 0..sp.m_count {
        let tau = sp.tau(m_idx);
        for k_idx in 0..n {
            let xi = sp.grid.wavenumber(k_idx);
            let sigma = tau - params.phase(xi);
            let w = bracket(sigma).powf(2.0 * b) * bracket(xi).powf(2.0 * s);
            sum += w * sp.mode(m_idx, k_idx).norm_sqr();
        }
    }
    (sp.quadrature() * sum).sqrt()
}

/// How the dyadic modulation blocks are summed inside each frequency shell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockSum {
    /// `l^1` over modulation shells (the summation used at `b = 1/2`).
    L1,
    /// `l^2` over modulation shells; cross-checks the unblocked norm.
    L2,
}

/// Smallest level whose telescoped cutoff covers `a`, i.e. with
/// `a <= (5/4) * 2^level`.
fn covering_level(a: f64) -> u32 {
    let mut level = 0u32;
    while a > 1.25 * (2.0f64).powi(level as i32) {
        level += 1;
    }
    level
}

/// Calls `f(level, eta_level(a))` for the (at most two) shells active at `a`.
fn for_each_shell(a: f64, max_level: u32, mut f: impl FnMut(u32, f64)) {
    if a < 1.5 {
        f(0, eta_level(0, a));
    }
    if a <= 0.625 {
        return;
    }
    // eta_{2^l} is supported in [5*2^(l-3), 3*2^(l-1)].
    let lo = ((2.0 * a) / 3.0).log2().ceil().max(1.0) as u32;
    let hi = ((1.6 * a).log2().floor() as u32).min(max_level);
    for level in lo..=hi.max(lo).min(max_level) {
        let v = eta_level(level, a);
        if v != 0.0 {
            f(level, v);
        }
    }
}

/// Dyadic-block refinement of [`xsb_norm`]: the `l^2` over spatial shells of
/// the `l^q` over modulation shells of weighted block L^2 norms, with
/// weights `<2^k>^s <2^j>^b` and blocks cut by the same bump family applied
/// to `|xi|` and `|tau - phi(xi)|`.
pub fn xsbq_norm(
    sp: &SpaceTimeSpectrum,
    s: f64,
    b: f64,
    q: BlockSum,
    params: &DispersionParams,
) -> f64 {
    let n = sp.grid.n();
    let k_levels = covering_level(sp.grid.max_wavenumber()) + 1;
    let mut max_sigma = 0.0f64;
    for m_idx in 0..sp.m_count {
        let tau = sp.tau(m_idx);
        for k_idx in 0..n {
            let sigma = (tau - params.phase(sp.grid.wavenumber(k_idx))).abs();
            max_sigma = max_sigma.max(sigma);
        }
    }
    let j_levels = covering_level(max_sigma) + 1;

    // Accumulate squared block norms: blocks[k_level][j_level].
    let mut blocks = vec![vec![0.0f64; j_levels as usize]; k_levels as usize];
    for m_idx in 0..sp.m_count {
        let tau = sp.tau(m_idx);
        for k_idx in 0..n {
            let xi = sp.grid.wavenumber(k_idx);
            let sigma = (tau - params.phase(xi)).abs();
            let e = sp.mode(m_idx, k_idx).norm_sqr();
            if e == 0.0 {
                continue;
            }
            for_each_shell(xi.abs(), k_levels - 1, |kl, wk| {
                for_each_shell(sigma, j_levels - 1, |jl, wj| {
                    blocks[kl as usize][jl as usize] += (wk * wj).powi(2) * e;
                });
            });
        }
    }

    let quad = sp.quadrature();
    let mut outer = 0.0f64;
    for (kl, row) in blocks.iter().enumerate() {
        let wk = bracket((2.0f64).powi(kl as i32)).powf(s);
        let inner = match q {
            BlockSum::L1 => row
                .iter()
                .enumerate()
                .map(|(jl, &sq)| {
                    let wj = bracket((2.0f64).powi(jl as i32)).powf(b);
                    wk * wj * (quad * sq).sqrt()
                })
                .sum::<f64>(),
            BlockSum::L2 => row
                .iter()
                .enumerate()
                .map(|(jl, &sq)| {
                    let wj = bracket((2.0f64).powi(jl as i32)).powf(b);
                    (wk * wj).powi(2) * quad * sq
                })
                .sum::<f64>()
                .sqrt(),
        };
        outer += inner * inner;
    }
    outer.sqrt()
}

/// Energy of the windowed record per dyadic modulation shell.
#[derive(Debug, Clone)]
pub struct ModulationProfile {
    /// `(level, shell scale 2^level, energy)` for every populated shell.
    pub shells: Vec<(u32, f64, f64)>,
    pub total_energy: f64,
}

impl ModulationProfile {
    /// Fraction of total energy in shells up to and including `level`.
    pub fn fraction_up_to(&self, level: u32) -> f64 {
        if self.total_energy == 0.0 {
            return 0.0;
        }
        self.shells
            .iter()
            .filter(|(l, _, _)| *l <= level)
            .map(|(_, _, e)| e)
            .sum::<f64>()
            / self.total_energy
    }
}

/// Distributes the windowed energy `|v_hat|^2` over dyadic shells of the
/// modulation `|tau - phi(xi)|`. The shells tile unity, so the shell
/// energies sum to the total. Confirms how sharply a solution concentrates
/// near the characteristic surface.
pub fn modulation_profile(
    traj: &Trajectory,
    params: &DispersionParams,
) -> Result<ModulationProfile> {
    let window = WindowSpec::for_trajectory(traj)?;
    let sp = spacetime_transform(traj, &window)?;
    profile_of_spectrum(&sp, params)
}

/// Modulation profile of an already-computed spectrum.
pub fn profile_of_spectrum(
    sp: &SpaceTimeSpectrum,
    params: &DispersionParams,
) -> Result<ModulationProfile> {
    let n = sp.grid.n();
    let mut max_sigma = 0.0f64;
    for m_idx in 0..sp.m_count {
        let tau = sp.tau(m_idx);
        for k_idx in 0..n {
            let sigma = (tau - params.phase(sp.grid.wavenumber(k_idx))).abs();
            max_sigma = max_sigma.max(sigma);
        }
    }
    let levels = covering_level(max_sigma) + 1;
    let mut energy = vec![0.0f64; levels as usize];
    let quad = sp.quadrature();
    let mut total = 0.0;
    for m_idx in 0..sp.m_count {
        let tau = sp.tau(m_idx);
        for k_idx in 0..n {
            let xi = sp.grid.wavenumber(k_idx);
            let sigma = (tau - params.phase(xi)).abs();
            let e = quad * sp.mode(m_idx, k_idx).norm_sqr();
            if e == 0.0 {
                continue;
            }
            total += e;
            for_each_shell(sigma, levels - 1, |jl, w| {
                energy[jl as usize] += w * e;
            });
        }
    }
    let shells = energy
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0.0)
        .map(|(l, &e)| (l as u32, (2.0f64).powi(l as i32), e))
        .collect();
    Ok(ModulationProfile {
        shells,
        total_energy: total,
    })
}

/// Convenience: spectral L^2 norm of the data underlying a trajectory.
pub fn data_l2(traj: &Trajectory) -> Result<f64> {
    Ok(traj.states()[0].forward()?.l2_norm())
}

#[allow(unused_imports)]
use crate::spectral::RealField;
