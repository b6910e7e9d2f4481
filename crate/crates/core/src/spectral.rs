//! Periodic grid, real/spectral fields and FFT-based spectral calculus.
//!
//! Coefficients follow the convention `u_hat_k = (1/n) * sum_j u(x_j) *
//! exp(-i xi_k x_j)` on the sample points `x_j = -L/2 + j*L/n` with
//! wavenumbers `xi_k = 2*pi*k/L`, integer `k` in `[-n/2, n/2)`. Real-valued
//! fields therefore carry Hermitian-symmetric coefficients, and Parseval
//! reads `L * sum_k |u_hat_k|^2 = dx * sum_j u_j^2`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::{Error, Result};

/// Relative tolerance for algebraic/spectral identities in double precision.
pub const SPECTRAL_TOL: f64 = 1e-12;

/// Japanese bracket `<x> = 1 + |x|` used by every weighted norm in the crate.
#[inline]
pub fn bracket(x: f64) -> f64 {
    1.0 + x.abs()
}

static PLANS: Lazy<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    let mut cache = PLANS.lock().unwrap();
    cache
        .entry((n, forward))
        .or_insert_with(|| {
            let dir = if forward {
                FftDirection::Forward
            } else {
                FftDirection::Inverse
            };
            FftPlanner::new().plan_fft(n, dir)
        })
        .clone()
}

/// Uniform periodic grid of `n` points on `[-L/2, L/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    length: f64,
}

impl Grid {
    /// `n` must be a power of two with `n >= 16`; `length` must be positive.
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "grid size must be a power of two >= 16, got {n}"
            )));
        }
        if !length.is_finite() || length <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "domain length must be positive and finite, got {length}"
            )));
        }
        Ok(Self { n, length })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Sample point `x_j = -L/2 + j*dx`.
    pub fn point(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.dx()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|j| self.point(j))
    }

    /// Signed integer mode number for storage index `idx` (FFT layout).
    pub fn mode_number(&self, idx: usize) -> i64 {
        debug_assert!(idx < self.n);
        if idx < self.n / 2 {
            idx as i64
        } else {
            idx as i64 - self.n as i64
        }
    }

    /// Wavenumber `xi_k = 2*pi*k/L` for storage index `idx`.
    pub fn wavenumber(&self, idx: usize) -> f64 {
        2.0 * PI * self.mode_number(idx) as f64 / self.length
    }

    pub fn wavenumbers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.wavenumber(i))
    }

    /// Largest wavenumber magnitude on the lattice (the Nyquist mode).
    pub fn max_wavenumber(&self) -> f64 {
        PI * self.n as f64 / self.length
    }

    /// Storage index of the Nyquist mode `k = -n/2`.
    pub fn nyquist_index(&self) -> usize {
        self.n / 2
    }

    fn check_same(&self, other: &Grid) -> Result<()> {
        if self.n != other.n || self.length != other.length {
            return Err(Error::GridMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }
}

/// Sobolev norm specification: index `s` with the bracket `<xi> = 1 + |xi|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSpec {
    pub s: f64,
}

impl NormSpec {
    pub fn new(s: f64) -> Self {
        Self { s }
    }

    /// Weight `<xi>^(2s)` applied to `|u_hat|^2`.
    pub fn weight(&self, xi: f64) -> f64 {
        bracket(xi).powf(2.0 * self.s)
    }
}

/// Physical-space state: `n` real samples `u(x_j)` on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Grid,
    samples: Vec<f64>,
}

/// L^2, L^inf and mean of a real field (dx-weighted quadrature).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LebesgueNorms {
    pub l2: f64,
    pub linf: f64,
    pub mean: f64,
}

impl RealField {
    /// Wraps samples after checking finiteness and the sample count.
    pub fn new(grid: Grid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.n() {
            return Err(Error::GridMismatch {
                left: grid.n(),
                right: samples.len(),
            });
        }
        if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "real field samples",
                index,
            });
        }
        Ok(Self { grid, samples })
    }

    /// Evaluates `f` at every grid point.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let samples = grid.points().map(&f).collect();
        Self::new(grid, samples)
    }

    /// Builds the real field whose coefficients are `u_hat_k = envelope(|xi_k|)`
    /// (real and even in frequency, hence a real even field in space).
    pub fn from_even_spectrum(grid: Grid, envelope: impl Fn(f64) -> f64) -> Result<Self> {
        let coeffs: Vec<Complex64> = (0..grid.n())
            .map(|i| Complex64::new(envelope(grid.wavenumber(i).abs()), 0.0))
            .collect();
        SpectralField::from_coeffs(grid, coeffs)?.inverse()
    }

    pub fn zero(grid: Grid) -> Self {
        Self {
            grid,
            samples: vec![0.0; grid.n()],
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Forward transform to spectral coefficients.
    pub fn forward(&self) -> Result<SpectralField> {
        let n = self.grid.n();
        let mut buf: Vec<Complex64> = self
            .samples
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        plan(n, true).process(&mut buf);
        let scale = 1.0 / n as f64;
        for (i, c) in buf.iter_mut().enumerate() {
            // (-1)^k accounts for the -L/2 origin of the sample points.
            let sign = if i % 2 == 0 { scale } else { -scale };
            *c *= sign;
        }
        Ok(SpectralField {
            grid: self.grid,
            coeffs: buf,
        })
    }

    pub fn lebesgue_norms(&self) -> LebesgueNorms {
        let dx = self.grid.dx();
        let mut sum_sq = 0.0;
        let mut linf: f64 = 0.0;
        let mut sum = 0.0;
        for &v in &self.samples {
            sum_sq += v * v;
            linf = linf.max(v.abs());
            sum += v;
        }
        LebesgueNorms {
            l2: (dx * sum_sq).sqrt(),
            linf,
            mean: dx * sum,
        }
    }

    /// Pointwise difference `self - other`.
    pub fn sub(&self, other: &RealField) -> Result<RealField> {
        self.grid.check_same(&other.grid)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            grid: self.grid,
            samples,
        })
    }

    /// Pointwise `self + alpha * other`.
    pub fn add_scaled(&self, alpha: f64, other: &RealField) -> Result<RealField> {
        self.grid.check_same(&other.grid)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a + alpha * b)
            .collect();
        Ok(Self {
            grid: self.grid,
            samples,
        })
    }

    /// Pointwise scaling `alpha * self`.
    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.iter().map(|v| alpha * v).collect(),
        }
    }

    /// Spatial mirror `u(x) -> u(-x)` on the lattice.
    pub fn mirrored(&self) -> Self {
        let n = self.grid.n();
        let mut samples = vec![0.0; n];
        // x_0 = -L/2 is its own mirror image (mod L); x_j <-> x_{n-j}.
        samples[0] = self.samples[0];
        for j in 1..n {
            samples[j] = self.samples[n - j];
        }
        Self {
            grid: self.grid,
            samples,
        }
    }
}

/// Frequency-space state: coefficients `u_hat_k` in FFT storage order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    /// Wraps raw coefficients, enforcing finiteness and Hermitian symmetry.
    pub fn from_coeffs(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.n() {
            return Err(Error::GridMismatch {
                left: grid.n(),
                right: coeffs.len(),
            });
        }
        if let Some(index) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                context: "spectral coefficients",
                index,
            });
        }
        let field = Self { grid, coeffs };
        field.check_hermitian()?;
        Ok(field)
    }

    pub fn zero(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.n()],
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()))
    }

    /// Deviations are measured against the coefficient l^1 norm: it bounds
    /// the field's sup norm, so it is the natural scale of transform
    /// roundoff even when the spectrum is spread over many modes.
    fn check_hermitian(&self) -> Result<()> {
        let n = self.grid.n();
        let scale: f64 = self.coeffs.iter().map(|c| c.norm()).sum();
        if scale == 0.0 {
            return Ok(());
        }
        let mut max_dev = self.coeffs[0].im.abs().max(self.coeffs[n / 2].im.abs());
        for k in 1..n / 2 {
            let dev = (self.coeffs[k] - self.coeffs[n - k].conj()).norm();
            max_dev = max_dev.max(dev);
        }
        if max_dev > SPECTRAL_TOL * scale {
            return Err(Error::SymmetryViolation {
                max_dev: max_dev / scale,
                tol: SPECTRAL_TOL,
            });
        }
        Ok(())
    }

    /// Inverse transform back to physical samples; rejects non-Hermitian input.
    pub fn inverse(&self) -> Result<RealField> {
        self.check_hermitian()?;
        let n = self.grid.n();
        let mut buf: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| if i % 2 == 0 { *c } else { -*c })
            .collect();
        plan(n, false).process(&mut buf);
        let samples = buf.iter().map(|c| c.re).collect();
        RealField::new(self.grid, samples)
    }

    /// Spectral derivative: multiplies mode `k` by `(i*xi_k)^order`.
    ///
    /// For odd orders the Nyquist mode is zeroed (its image has no Hermitian
    /// partner on the lattice), keeping the result real-valued.
    pub fn derivative(&self, order: u32) -> Self {
        let mut out = self.clone();
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            let xi = self.grid.wavenumber(i);
            *c *= Complex64::new(0.0, xi).powu(order);
        }
        if order % 2 == 1 {
            out.coeffs[self.grid.nyquist_index()] = Complex64::new(0.0, 0.0);
        }
        out
    }

    /// Riesz-type fractional derivative: multiplies mode `k` by `|xi_k|^r`.
    ///
    /// For `r < 0` the zero mode is zeroed instead of dividing by zero.
    pub fn fractional_derivative(&self, r: f64) -> Self {
        let mut out = self.clone();
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            let xi = self.grid.wavenumber(i).abs();
            if i == 0 && r < 0.0 {
                *c = Complex64::new(0.0, 0.0);
            } else {
                *c *= xi.powf(r);
            }
        }
        out
    }

    /// 2/3-rule dealiasing: zeroes every mode with `|k| > n/3`.
    pub fn dealias(&self) -> Self {
        let n = self.grid.n();
        let cutoff = n as f64 / 3.0;
        let mut out = self.clone();
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            if (self.grid.mode_number(i).abs() as f64) > cutoff {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        out
    }

    /// `H^s` norm `(L * sum_k <xi_k>^(2s) |u_hat_k|^2)^(1/2)`.
    pub fn sobolev_norm(&self, spec: NormSpec) -> f64 {
        let l = self.grid.length();
        let sum: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| spec.weight(self.grid.wavenumber(i)) * c.norm_sqr())
            .sum();
        (l * sum).sqrt()
    }

    /// Plain `L^2` norm via Parseval (`s = 0`).
    pub fn l2_norm(&self) -> f64 {
        self.sobolev_norm(NormSpec::new(0.0))
    }

    /// Relative size of the spectral tail `|k| > n/3` against the peak mode.
    pub fn tail_fraction(&self) -> f64 {
        let peak = self.max_abs();
        if peak == 0.0 {
            return 0.0;
        }
        let cutoff = self.grid.n() as f64 / 3.0;
        let tail = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(i, _)| (self.grid.mode_number(*i).abs() as f64) > cutoff)
            .fold(0.0f64, |m, (_, c)| m.max(c.norm()));
        tail / peak
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid(n: usize, length: f64) -> Grid {
        Grid::new(n, length).unwrap()
    }

    fn random_field(grid: Grid, seed: u64) -> RealField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples = (0..grid.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        RealField::new(grid, samples).unwrap()
    }

    /// Random field with spectral support inside the dealias cutoff.
    fn random_band_limited(grid: Grid, seed: u64) -> SpectralField {
        random_field(grid, seed).forward().unwrap().dealias()
    }

    #[test]
    fn grid_construction_rules() {
        assert!(Grid::new(8, 1.0).is_err());
        assert!(Grid::new(48, 1.0).is_err());
        assert!(Grid::new(64, -1.0).is_err());
        let g = grid(64, 2.0);
        assert_eq!(g.dx() * g.n() as f64, 2.0);
        // Wavenumber lattice is symmetric except for the Nyquist mode.
        for i in 1..g.n() {
            if i == g.nyquist_index() {
                continue;
            }
            let xi = g.wavenumber(i);
            let found = (0..g.n()).any(|j| g.wavenumber(j) == -xi);
            assert!(found, "missing -xi partner for index {i}");
        }
    }

    #[test]
    fn forward_constant_field() {
        let g = grid(32, 5.0);
        let u = RealField::from_fn(g, |_| 2.5).unwrap();
        let s = u.forward().unwrap();
        assert!((s.coeffs()[0].re - 2.5).abs() < 1e-14);
        assert!(s.coeffs()[0].im.abs() < 1e-14);
        for c in &s.coeffs()[1..] {
            assert!(c.norm() < 1e-14);
        }
    }

    #[test]
    fn forward_single_cosine_mode() {
        let g = grid(64, 3.0);
        let l = g.length();
        let u = RealField::from_fn(g, |x| (2.0 * PI * x / l).cos()).unwrap();
        let s = u.forward().unwrap();
        for (i, c) in s.coeffs().iter().enumerate() {
            let k = g.mode_number(i);
            if k.abs() == 1 {
                assert!((c.re - 0.5).abs() < 1e-13, "mode {k}: {c}");
                assert!(c.im.abs() < 1e-13);
            } else {
                assert!(c.norm() < 1e-13);
            }
        }
    }

    #[test]
    fn forward_rejects_non_finite() {
        let g = grid(16, 1.0);
        let mut samples = vec![0.0; 16];
        samples[3] = f64::NAN;
        assert!(matches!(
            RealField::new(g, samples),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn parseval_identity_random_field() {
        let g = grid(256, 17.0);
        let u = random_field(g, 1);
        let s = u.forward().unwrap();
        let phys: f64 = g.dx() * u.samples().iter().map(|v| v * v).sum::<f64>();
        let spec: f64 = g.length() * s.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>();
        assert!((phys - spec).abs() <= SPECTRAL_TOL * phys);
    }

    #[test]
    fn inverse_trivial_cases() {
        let g = grid(32, 2.0);
        let zero = SpectralField::zero(g).inverse().unwrap();
        assert!(zero.samples().iter().all(|&v| v == 0.0));

        let mut coeffs = vec![Complex64::new(0.0, 0.0); 32];
        coeffs[0] = Complex64::new(3.0, 0.0);
        let u = SpectralField::from_coeffs(g, coeffs)
            .unwrap()
            .inverse()
            .unwrap();
        for &v in u.samples() {
            assert!((v - 3.0).abs() < 1e-13);
        }
    }

    #[test]
    fn inverse_rejects_broken_symmetry() {
        let g = grid(16, 1.0);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 16];
        coeffs[1] = Complex64::new(1.0, 0.5);
        coeffs[15] = Complex64::new(1.0, 0.5); // should be the conjugate
        assert!(matches!(
            SpectralField::from_coeffs(g, coeffs),
            Err(Error::SymmetryViolation { .. })
        ));
    }

    #[test]
    fn round_trip_random_field() {
        let g = grid(128, 7.0);
        let u = random_field(g, 2);
        let back = u.forward().unwrap().inverse().unwrap();
        let scale = u.lebesgue_norms().linf;
        for (a, b) in u.samples().iter().zip(back.samples()) {
            assert!((a - b).abs() <= SPECTRAL_TOL * scale);
        }
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let g = grid(32, 1.0);
        let s = RealField::from_fn(g, |_| 4.0).unwrap().forward().unwrap();
        let d = s.derivative(1).inverse().unwrap();
        assert!(d.lebesgue_norms().linf < 1e-14);
    }

    #[test]
    fn derivative_single_mode() {
        let g = grid(128, 2.0 * PI);
        let u = RealField::from_fn(g, |x| x.cos()).unwrap();
        let d = u.forward().unwrap().derivative(1).inverse().unwrap();
        for (j, &v) in d.samples().iter().enumerate() {
            let x = g.point(j);
            assert!((v + x.sin()).abs() <= 1e-12);
        }
    }

    #[test]
    fn third_derivative_matches_composition() {
        let g = grid(128, 11.0);
        let s = random_band_limited(g, 3);
        let direct = s.derivative(3);
        let composed = s.derivative(1).derivative(1).derivative(1);
        let scale = direct.max_abs().max(1e-300);
        for (a, b) in direct.coeffs().iter().zip(composed.coeffs()) {
            assert!((a - b).norm() <= SPECTRAL_TOL * scale);
        }
    }

    #[test]
    fn fractional_derivative_basics() {
        let g = grid(64, 2.0 * PI);
        let s = random_band_limited(g, 4);
        let id = s.fractional_derivative(0.0);
        assert_eq!(s.coeffs(), id.coeffs());

        // |xi| = 1 mode is fixed by D^(1/2).
        let u = RealField::from_fn(g, |x| x.cos()).unwrap();
        let sc = u.forward().unwrap();
        let half = sc.fractional_derivative(0.5);
        let scale = sc.max_abs();
        for (a, b) in sc.coeffs().iter().zip(half.coeffs()) {
            assert!((a - b).norm() <= 1e-13 * scale);
        }

        // Composition: D^(1/4) twice equals D^(1/2).
        let once = s.fractional_derivative(0.25).fractional_derivative(0.25);
        let twice = s.fractional_derivative(0.5);
        let scale = twice.max_abs().max(1e-300);
        for (a, b) in once.coeffs().iter().zip(twice.coeffs()) {
            assert!((a - b).norm() <= SPECTRAL_TOL * scale);
        }
    }

    #[test]
    fn dealias_band_limited_unchanged() {
        let g = grid(64, 1.0);
        let s = random_band_limited(g, 5);
        assert_eq!(s.coeffs(), s.dealias().coeffs());
    }

    #[test]
    fn dealias_kills_high_mode() {
        let g = grid(16, 2.0 * PI);
        let k = g.n() / 2 - 1; // |k| = 7 > 16/3
        let u = RealField::from_fn(g, |x| (k as f64 * x).cos()).unwrap();
        let s = u.forward().unwrap().dealias();
        assert!(s.max_abs() < 1e-14);
    }

    /// Pseudo-spectral product + dealiasing vs an exact truncated convolution
    /// computed directly from the mode lists on a small grid.
    #[test]
    fn dealias_matches_truncated_convolution() {
        let g = grid(32, 2.0 * PI);
        let n = g.n() as i64;
        let cutoff = g.n() as f64 / 3.0;
        // Two modes at the dealias edge |k| = 10 (largest k <= n/3).
        let u = RealField::from_fn(g, |x| (10.0 * x).cos() + 0.5 * (7.0 * x).cos()).unwrap();
        let uh = u.forward().unwrap();

        // Physical-space product, then dealias (the pseudo-spectral route).
        let prod =
            RealField::new(g, u.samples().iter().map(|v| v * v).collect()).unwrap();
        let pseudo = prod.forward().unwrap().dealias();

        // Exact linear convolution of the coefficient lists, truncated.
        let mut exact = vec![Complex64::new(0.0, 0.0); g.n()];
        for a in 0..g.n() {
            for b in 0..g.n() {
                let k = g.mode_number(a) + g.mode_number(b);
                if k.abs() as f64 > cutoff || k < -n / 2 || k >= n / 2 {
                    continue;
                }
                let idx = if k >= 0 { k as usize } else { (k + n) as usize };
                exact[idx] += uh.coeffs()[a] * uh.coeffs()[b];
            }
        }
        for (i, c) in pseudo.coeffs().iter().enumerate() {
            assert!(
                (c - exact[i]).norm() < 1e-13,
                "mode {}: {c} vs {}",
                g.mode_number(i),
                exact[i]
            );
        }
    }

    #[test]
    fn sobolev_norm_examples() {
        let g = grid(64, 2.0 * PI);
        assert_eq!(SpectralField::zero(g).sobolev_norm(NormSpec::new(1.5)), 0.0);

        let one = RealField::from_fn(g, |_| 1.0).unwrap().forward().unwrap();
        for s in [-1.0, 0.0, 0.5, 2.0] {
            let norm = one.sobolev_norm(NormSpec::new(s));
            assert!((norm - (2.0 * PI).sqrt()).abs() < 1e-13);
        }

        // u = cos(x): two modes |u_hat| = 1/2, weight (1+1)^2 = 4 at s = 1,
        // so norm^2 = 2*pi * 2 and norm = 2*sqrt(pi).
        let c = RealField::from_fn(g, |x| x.cos()).unwrap().forward().unwrap();
        let norm = c.sobolev_norm(NormSpec::new(1.0));
        assert!((norm - 2.0 * PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn sobolev_norm_monotone_in_s() {
        let g = grid(64, 5.0);
        let s = random_band_limited(g, 6);
        let mut prev = 0.0;
        for idx in [-1.0, 0.0, 0.5, 1.0, 2.0] {
            let norm = s.sobolev_norm(NormSpec::new(idx));
            assert!(norm >= prev);
            prev = norm;
        }
    }

    #[test]
    fn lebesgue_norm_examples() {
        let g = grid(16, 1.0);
        let z = RealField::zero(g).lebesgue_norms();
        assert_eq!((z.l2, z.linf, z.mean), (0.0, 0.0, 0.0));

        let two = RealField::from_fn(g, |_| 2.0).unwrap().lebesgue_norms();
        assert!((two.l2 - 2.0).abs() < 1e-14);
        assert!((two.linf - 2.0).abs() < 1e-14);
        assert!((two.mean - 2.0).abs() < 1e-14);
    }

    #[test]
    fn l2_matches_sobolev_zero() {
        let g = grid(128, 9.0);
        let u = random_field(g, 7);
        let l2 = u.lebesgue_norms().l2;
        let via_spec = u.forward().unwrap().l2_norm();
        assert!((l2 - via_spec).abs() <= SPECTRAL_TOL * l2);
    }

    #[test]
    fn derivative_commutes_with_dealias() {
        let g = grid(64, 3.0);
        let s = random_field(g, 8).forward().unwrap();
        let a = s.derivative(2).dealias();
        let b = s.dealias().derivative(2);
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn mirror_is_involutive_and_matches_reflection() {
        let g = grid(64, 2.0 * PI);
        let u = RealField::from_fn(g, |x| (x + 0.3).sin() + 0.2 * (2.0 * x).cos()).unwrap();
        let m = u.mirrored();
        for j in 0..g.n() {
            let x = g.point(j);
            let expected = (-x + 0.3).sin() + 0.2 * (2.0 * x).cos();
            // x = -L/2 maps to L/2 = -L/2 (mod L), so all points are on-lattice.
            assert!((m.samples()[j] - expected).abs() < 1e-12);
        }
        assert_eq!(u.samples(), m.mirrored().samples());
    }

    proptest! {
        #[test]
        fn prop_parseval_and_round_trip(seed in 0u64..256) {
            let g = grid(64, 4.0);
            let u = random_field(g, seed);
            let s = u.forward().unwrap();
            let phys: f64 = g.dx() * u.samples().iter().map(|v| v * v).sum::<f64>();
            let spec: f64 = g.length() * s.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>();
            prop_assert!((phys - spec).abs() <= SPECTRAL_TOL * phys.max(1e-300));
            let back = s.inverse().unwrap();
            let scale = u.lebesgue_norms().linf.max(1e-300);
            for (a, b) in u.samples().iter().zip(back.samples()) {
                prop_assert!((a - b).abs() <= SPECTRAL_TOL * scale);
            }
        }

        #[test]
        fn prop_derivative_linear(seed in 0u64..64, alpha in -2.0f64..2.0) {
            let g = grid(32, 3.0);
            let a = random_field(g, seed).forward().unwrap();
            let b = random_field(g, seed + 1000).forward().unwrap();
            let combo: Vec<Complex64> = a
                .coeffs()
                .iter()
                .zip(b.coeffs())
                .map(|(x, y)| x * alpha + y)
                .collect();
            let combined = SpectralField::from_coeffs(g, combo).unwrap().derivative(3);
            let separate: Vec<Complex64> = a
                .derivative(3)
                .coeffs()
                .iter()
                .zip(b.derivative(3).coeffs())
                .map(|(x, y)| x * alpha + y)
                .collect();
            let scale = combined.max_abs().max(1e-300);
            for (x, y) in combined.coeffs().iter().zip(&separate) {
                prop_assert!((x - y).norm() <= 1e-12 * scale);
            }
        }
    }
}
