//! Smooth frequency cutoffs: the C-infinity bump `psi`, the dyadic shell
//! family built from it, and the notch multipliers that remove an
//! `O(eps^{-1/2})`-wide band around each stationary point of the phase
//! function. Multipliers act diagonally on spectral coefficients.

use once_cell::sync::OnceCell;

use crate::spectral::{Grid, SpectralField};
use crate::{Error, Result};

/// `psi = 1` on `[-PLATEAU, PLATEAU]`.
pub const PSI_PLATEAU: f64 = 1.25;
/// `psi = 0` outside `(-SUPPORT, SUPPORT)`.
pub const PSI_SUPPORT: f64 = 1.5;
/// Slope of the notch argument `20*sqrt(eps)*(|xi| - center)`.
pub const NOTCH_SLOPE: f64 = 20.0;

#[inline]
fn smooth_step_piece(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// Monotone C-infinity ramp from 0 at `t = 0` to 1 at `t = 1`.
#[inline]
fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = smooth_step_piece(t);
    let b = smooth_step_piece(1.0 - t);
    a / (a + b)
}

/// Even C-infinity bump: 1 on `[-5/4, 5/4]`, 0 outside `[-3/2, 3/2]`,
/// monotone on the transition, values in `[0, 1]`.
pub fn psi(x: f64) -> f64 {
    let x = x.abs();
    if x <= PSI_PLATEAU {
        1.0
    } else if x >= PSI_SUPPORT {
        0.0
    } else {
        smooth_step((PSI_SUPPORT - x) / (PSI_SUPPORT - PSI_PLATEAU))
    }
}

/// Maximal slope of `psi`, estimated once by dense sampling of the transition.
pub fn psi_max_slope() -> f64 {
    static SLOPE: OnceCell<f64> = OnceCell::new();
    *SLOPE.get_or_init(|| {
        let samples = 200_000;
        let h = (PSI_SUPPORT - PSI_PLATEAU) / samples as f64;
        let mut max = 0.0f64;
        for i in 0..samples {
            let x = PSI_PLATEAU + (i as f64 + 0.5) * h;
            let slope = (psi(x + 0.5 * h) - psi(x - 0.5 * h)).abs() / h;
            max = max.max(slope);
        }
        max
    })
}

/// Base of the dyadic partition: `eta_0 = psi`.
pub fn eta_zero(xi: f64) -> f64 {
    psi(xi)
}

/// Dyadic shell `eta_{2^k}(xi) = psi(2^-k xi) - psi(2^-k+1 xi)`, `k >= 1`.
pub fn eta_dyadic(k: u32, xi: f64) -> f64 {
    debug_assert!(k >= 1, "dyadic shells start at level 1; use eta_zero");
    let scale = (2.0f64).powi(-(k as i32));
    psi(scale * xi) - psi(2.0 * scale * xi)
}

/// Shell at `level`, with level 0 denoting the base bump `eta_0`.
pub fn eta_level(level: u32, xi: f64) -> f64 {
    if level == 0 {
        eta_zero(xi)
    } else {
        eta_dyadic(level, xi)
    }
}

/// Low-pass symbol `eta_{<=2^k}(xi) = psi(2^-k xi)`.
pub fn eta_low_pass(k: u32, xi: f64) -> f64 {
    psi((2.0f64).powi(-(k as i32)) * xi)
}

/// High-pass symbol `eta_{>=2^k}(xi) = 1 - psi(2^{-k+1} xi)`.
pub fn eta_high_pass(k: u32, xi: f64) -> f64 {
    1.0 - psi((2.0f64).powi(1 - k as i32) * xi)
}

/// First stationary point `sqrt(3/(5 eps))` of the phase function.
pub fn first_stationary(eps: f64) -> f64 {
    (3.0 / (5.0 * eps)).sqrt()
}

/// Second stationary point `sqrt(3/(10 eps))`, where the curvature vanishes.
pub fn second_stationary(eps: f64) -> f64 {
    (3.0 / (10.0 * eps)).sqrt()
}

fn check_eps(eps: f64) -> Result<()> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "stationary-point notch requires eps > 0, got {eps}"
        )));
    }
    Ok(())
}

fn notch_around(xi: f64, eps: f64, center: f64) -> f64 {
    1.0 - psi(NOTCH_SLOPE * eps.sqrt() * (xi.abs() - center))
}

/// Notch symbol vanishing on a band around the first stationary point:
/// `1 - psi(20 sqrt(eps) (|xi| - sqrt(3/(5 eps))))`. Zero exactly on
/// `||xi| - center| <= (5/4)/(20 sqrt(eps))`, one outside
/// `||xi| - center| < (3/2)/(20 sqrt(eps))`.
pub fn notch_first(xi: f64, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    Ok(notch_around(xi, eps, first_stationary(eps)))
}

/// Notch symbol around the second stationary point `sqrt(3/(10 eps))`.
pub fn notch_second(xi: f64, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    Ok(notch_around(xi, eps, second_stationary(eps)))
}

/// Half-width of the notch transition window in frequency.
pub fn notch_transition_width(eps: f64) -> f64 {
    PSI_SUPPORT / (NOTCH_SLOPE * eps.sqrt())
}

/// Whether the notch transition spans at least four lattice spacings on
/// `grid`; experiments using the notch multipliers must satisfy this.
pub fn notch_resolved(grid: Grid, eps: f64) -> bool {
    let dxi = 2.0 * std::f64::consts::PI / grid.length();
    notch_transition_width(eps) >= 4.0 * dxi
}

/// Real even Fourier multiplier sampled on a grid's wavenumber lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct Multiplier {
    grid: Grid,
    values: Vec<f64>,
    name: String,
}

impl Multiplier {
    fn from_symbol(grid: Grid, name: impl Into<String>, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.n()).map(|i| f(grid.wavenumber(i))).collect();
        Self {
            grid,
            values,
            name: name.into(),
        }
    }

    /// The identity multiplier.
    pub fn identity(grid: Grid) -> Self {
        Self::from_symbol(grid, "identity", |_| 1.0)
    }

    /// Base bump `eta_0` (level-0 shell).
    pub fn base_shell(grid: Grid) -> Self {
        Self::from_symbol(grid, "eta_0", eta_zero)
    }

    /// Dyadic shell at `level >= 1`, or the base bump for level 0.
    pub fn dyadic_shell(grid: Grid, level: u32) -> Self {
        Self::from_symbol(grid, format!("eta_{}", 1u64 << level), |xi| {
            eta_level(level, xi)
        })
    }

    /// Low-pass cutoff `eta_{<=2^k}`.
    pub fn low_pass(grid: Grid, k: u32) -> Self {
        Self::from_symbol(grid, format!("eta_le_{}", 1u64 << k), |xi| {
            eta_low_pass(k, xi)
        })
    }

    /// High-pass cutoff `eta_{>=2^k}`.
    pub fn high_pass(grid: Grid, k: u32) -> Self {
        Self::from_symbol(grid, format!("eta_ge_{}", 1u64 << k), |xi| {
            eta_high_pass(k, xi)
        })
    }

    /// Notch removing the band around the first stationary point.
    pub fn notch_first(grid: Grid, eps: f64) -> Result<Self> {
        check_eps(eps)?;
        let center = first_stationary(eps);
        Ok(Self::from_symbol(grid, "notch_first", |xi| {
            notch_around(xi, eps, center)
        }))
    }

    /// Notch removing the band around the second stationary point.
    pub fn notch_second(grid: Grid, eps: f64) -> Result<Self> {
        check_eps(eps)?;
        let center = second_stationary(eps);
        Ok(Self::from_symbol(grid, "notch_second", |xi| {
            notch_around(xi, eps, center)
        }))
    }

    /// Complement multiplier `1 - m`.
    pub fn complement(&self) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| 1.0 - v).collect(),
            name: format!("1-{}", self.name),
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Pointwise product in frequency space.
    pub fn apply(&self, s: &SpectralField) -> Result<SpectralField> {
        if self.grid != s.grid() {
            return Err(Error::GridMismatch {
                left: self.grid.n(),
                right: s.grid().n(),
            });
        }
        let mut out = s.clone();
        for (c, &m) in out.coeffs_mut().iter_mut().zip(&self.values) {
            *c *= m;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::RealField;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn psi_plateau_support_and_symmetry() {
        assert_eq!(psi(0.0), 1.0);
        assert_eq!(psi(1.25), 1.0);
        assert_eq!(psi(1.5), 0.0);
        assert_eq!(psi(-3.0), 0.0);
        let mid = psi(1.375);
        assert!(mid > 0.0 && mid < 1.0);
        assert!((psi(1.375) - psi(-1.375)).abs() <= 1e-9);
        // Monotone decreasing across the transition.
        let mut prev = 1.0;
        for i in 0..=100 {
            let x = 1.25 + 0.25 * i as f64 / 100.0;
            let v = psi(x);
            assert!((0.0..=1.0).contains(&v));
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn psi_slope_matches_analytic_peak() {
        // The rescaled smoothstep has slope 2 at its midpoint, so the
        // 1/4-wide transition gives max |psi'| = 8.
        let slope = psi_max_slope();
        assert!((slope - 8.0).abs() < 0.01, "slope = {slope}");
    }

    #[test]
    fn eta_partition_telescopes() {
        for &xi in &[0.0, 0.3, 1.0, 3.0, 7.7, 42.0, -13.5] {
            for big_k in 1..=7u32 {
                let sum: f64 =
                    (0..=big_k).map(|k| eta_level(k, xi)).sum();
                let expected = psi((2.0f64).powi(-(big_k as i32)) * xi);
                assert!(
                    (sum - expected).abs() < 1e-12,
                    "xi={xi} K={big_k}: {sum} vs {expected}"
                );
            }
        }
        // At xi = 3 with K = 2 the telescoped value is psi(3/4) = 1.
        let sum: f64 = (0..=2u32).map(|k| eta_level(k, 3.0)).sum();
        assert!((sum - 1.0).abs() < 1e-12);
        // At xi = 0 only the base shell contributes.
        assert_eq!(eta_zero(0.0), 1.0);
        for k in 1..6 {
            assert_eq!(eta_dyadic(k, 0.0), 0.0);
        }
    }

    #[test]
    fn eta_shell_support_bounds() {
        // Support of eta_{2^k} sits inside [5*2^(k-3), 3*2^(k-1)].
        for k in 1..=6u32 {
            let lo = 5.0 * (2.0f64).powi(k as i32 - 3);
            let hi = 3.0 * (2.0f64).powi(k as i32 - 1);
            let mut seen_nonzero = false;
            for i in 0..2000 {
                let xi = 0.01 + i as f64 * 0.05;
                let v = eta_dyadic(k, xi);
                if xi < lo || xi > hi {
                    assert!(v.abs() < 1e-15, "k={k} xi={xi} v={v}");
                } else if v > 0.5 {
                    seen_nonzero = true;
                }
            }
            assert!(seen_nonzero, "shell {k} never active");
        }
    }

    #[test]
    fn high_pass_complements_low_pass() {
        // eta_{>=2^k} = 1 - eta_{<=2^(k-1)} pointwise.
        for k in 1..=5u32 {
            for i in 0..400 {
                let xi = -20.0 + i as f64 * 0.1;
                let sum = eta_high_pass(k, xi) + eta_low_pass(k - 1, xi);
                assert!((sum - 1.0).abs() < 1e-15, "k={k} xi={xi}");
            }
        }
        // Crossover: high-pass vanishes on the low plateau and saturates
        // beyond the support of the complementary cutoff.
        assert_eq!(eta_high_pass(2, 0.0), 0.0);
        assert_eq!(eta_high_pass(2, 2.4), 0.0); // psi(1.2) = 1
        assert_eq!(eta_high_pass(2, 3.5), 1.0); // psi(1.75) = 0
    }

    #[test]
    fn notch_values_at_landmarks() {
        let eps = 1e-2;
        assert_eq!(notch_first(first_stationary(eps), eps).unwrap(), 0.0);
        assert_eq!(notch_second(second_stationary(eps), eps).unwrap(), 0.0);
        // xi = 0 is far outside the transition window at eps = 1e-2.
        assert_eq!(notch_first(0.0, eps).unwrap(), 1.0);
        assert!(notch_first(1.0, 0.0).is_err());
        assert!(notch_second(1.0, -1.0).is_err());
        // Dead zone is the full plateau width.
        let center = first_stationary(eps);
        let dead = PSI_PLATEAU / (NOTCH_SLOPE * eps.sqrt());
        assert_eq!(notch_first(center + 0.999 * dead, eps).unwrap(), 0.0);
        assert_eq!(notch_first(center - 0.999 * dead, eps).unwrap(), 0.0);
        let live = notch_transition_width(eps);
        assert_eq!(notch_first(center + 1.001 * live, eps).unwrap(), 1.0);
    }

    fn random_spectrum(grid: Grid, seed: u64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples: Vec<f64> = (0..grid.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        RealField::new(grid, samples).unwrap().forward().unwrap()
    }

    #[test]
    fn apply_identity_and_grid_mismatch() {
        let g = Grid::new(64, 40.0).unwrap();
        let s = random_spectrum(g, 1);
        let id = Multiplier::identity(g);
        assert_eq!(id.apply(&s).unwrap().coeffs(), s.coeffs());

        let other = Grid::new(128, 40.0).unwrap();
        let wrong = Multiplier::identity(other);
        assert!(matches!(wrong.apply(&s), Err(Error::GridMismatch { .. })));
    }

    #[test]
    fn notch_plus_complement_is_identity() {
        let g = Grid::new(256, 120.0).unwrap();
        let eps = 1e-2;
        assert!(notch_resolved(g, eps));
        let notch = Multiplier::notch_first(g, eps).unwrap();
        let band = notch.complement();
        for seed in 0..100 {
            let s = random_spectrum(g, seed);
            let a = notch.apply(&s).unwrap();
            let b = band.apply(&s).unwrap();
            for ((x, y), z) in a.coeffs().iter().zip(b.coeffs()).zip(s.coeffs()) {
                assert!((x + y - z).norm() <= 1e-14 * z.norm().max(1.0));
            }
        }
    }

    /// The second notch acts as the identity on the first notch's band:
    /// the two dead zones are disjoint in frequency.
    #[test]
    fn second_notch_fixes_first_band() {
        let g = Grid::new(256, 120.0).unwrap();
        let eps = 1e-2;
        let band_first = Multiplier::notch_first(g, eps).unwrap().complement();
        let notch_second = Multiplier::notch_second(g, eps).unwrap();
        for seed in 0..100 {
            let s = random_spectrum(g, seed);
            let projected = band_first.apply(&s).unwrap();
            let twice = notch_second.apply(&projected).unwrap();
            for (x, y) in twice.coeffs().iter().zip(projected.coeffs()) {
                assert!((x - y).norm() <= 1e-14 * y.norm().max(1.0));
            }
        }
    }

    #[test]
    fn multipliers_commute_and_preserve_symmetry() {
        let g = Grid::new(128, 60.0).unwrap();
        let s = random_spectrum(g, 9);
        let a = Multiplier::dyadic_shell(g, 2);
        let b = Multiplier::notch_first(g, 1e-2).unwrap();
        let ab = b.apply(&a.apply(&s).unwrap()).unwrap();
        let ba = a.apply(&b.apply(&s).unwrap()).unwrap();
        assert_eq!(ab.coeffs(), ba.coeffs());
        // Even multiplier keeps the field real-valued.
        assert!(ab.inverse().is_ok());
    }

    #[test]
    fn resolution_guard_threshold() {
        // Width 1.5/(20 sqrt(eps)) ~ 2.37 at eps = 1e-3 vs 4*dxi = 8*pi/L.
        let g = Grid::new(64, 12.0).unwrap();
        assert!(notch_resolved(g, 1e-3));
        assert!(!notch_resolved(g, 1.0));
        let tight = Grid::new(64, 10.0).unwrap();
        assert!(!notch_resolved(tight, 1e-3));
    }
}
