//! Initial-data construction from config values.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kawahara_core::evolve::{gaussian, soliton};
use kawahara_core::projectors::first_stationary;
use kawahara_core::spectral::{Grid, RealField, SpectralField};

use crate::config::DataSpec;
use crate::HarnessError;

/// Builds the configured profile on `grid`; the seed only matters for the
/// random-phase rough shape.
pub fn build(grid: Grid, spec: DataSpec, seed: u64) -> Result<RealField, HarnessError> {
    let field = match spec {
        DataSpec::Gaussian { amp, width } => gaussian(grid, amp, width)?,
        DataSpec::Soliton { speed } => soliton(grid, speed)?,
        DataSpec::Rough { amp, decay, cutoff } => rough(grid, amp, decay, cutoff, seed)?,
    };
    Ok(field)
}

/// Random-phase field with power-law envelope `amp * <xi>^-decay`, truncated
/// at `cutoff` so the spectral tail stays within the resolution guard.
fn rough(grid: Grid, amp: f64, decay: f64, cutoff: f64, seed: u64) -> Result<RealField, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.n();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for k in 1..n / 2 {
        let xi = grid.wavenumber(k);
        if xi.abs() > cutoff {
            continue;
        }
        let mag = amp * (1.0 + xi.abs()).powf(-decay);
        let phase = rng.gen_range(0.0..std::f64::consts::TAU);
        coeffs[k] = Complex64::from_polar(mag, phase);
        coeffs[n - k] = coeffs[k].conj();
    }
    Ok(SpectralField::from_coeffs(grid, coeffs)?.inverse()?)
}

/// The fixed smooth bump used for equi-continuity perturbations.
pub fn perturbation_bump(grid: Grid, amp: f64, width: f64) -> Result<RealField, HarnessError> {
    Ok(gaussian(grid, amp, width)?)
}

/// Wave packet concentrated in frequency around the first stationary point
/// `sqrt(3/(5 eps))`, where the group velocity of the free flow vanishes.
/// Width is half the notch dead zone, so the packet sits inside the band
/// the notch multiplier removes.
pub fn stationary_packet(grid: Grid, eps: f64) -> Result<RealField, HarnessError> {
    let center = first_stationary(eps);
    let sigma = 0.5 * (1.25 / (20.0 * eps.sqrt()));
    let field = RealField::from_even_spectrum(grid, |a| {
        (-((a - center) * (a - center)) / (2.0 * sigma * sigma)).exp()
    })?;
    Ok(field)
}
