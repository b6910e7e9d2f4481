//! Time integration of `u_t + u_{3x} + eps*u_{5x} + u*u_x = 0` with an
//! integrating-factor RK4 scheme: the linear flow is applied through the
//! exact factor `exp(i dt phi(xi))`, so only the transport nonlinearity is
//! integrated numerically and the fifth-order symbol causes no stiffness.
//! Also provides trajectory recording, conserved-quantity tracking, the
//! dilation map between dispersion parameters, and a binary trajectory
//! format shared with the analysis layers.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::dispersion::DispersionParams;
use crate::spectral::{Grid, RealField, SpectralField};
use crate::{Error, Result};

/// Abort threshold for `|u|_inf`; beyond this the run is treated as blown up.
pub const BLOWUP_LINF: f64 = 1e6;
/// Largest admissible relative spectral tail of initial data.
pub const RESOLUTION_TAIL: f64 = 1e-10;

const TRAJECTORY_MAGIC: &[u8; 6] = b"KWTRJ1";

/// Full description of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub grid: Grid,
    pub eps: f64,
    pub t_end: f64,
    pub dt: f64,
    pub sample_every: usize,
    /// `false` integrates only the free evolution.
    pub nonlinear: bool,
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.eps.is_finite() || self.eps < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "eps must satisfy eps >= 0, got {}",
                self.eps
            )));
        }
        if !self.t_end.is_finite()
            || !self.dt.is_finite()
            || self.t_end <= 0.0
            || self.dt <= 0.0
            || self.dt > self.t_end
        {
            return Err(Error::InvalidParameter(format!(
                "need 0 < dt <= t_end, got dt = {}, t_end = {}",
                self.dt, self.t_end
            )));
        }
        if self.sample_every == 0 {
            return Err(Error::InvalidParameter(
                "sample_every must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Number of recorded samples: `floor(t_end/(dt*sample_every)) + 1`.
    pub fn sample_count(&self) -> usize {
        (self.t_end / (self.dt * self.sample_every as f64) + 1e-9) as usize + 1
    }

    fn step_count(&self) -> usize {
        (self.t_end / self.dt + 1e-9) as usize
    }

    /// Spacing between recorded samples.
    pub fn sample_spacing(&self) -> f64 {
        self.dt * self.sample_every as f64
    }
}

/// Default step size: `min(1e-3, 0.5 * safety * dx / max|phi'(xi_k)|)` with
/// `safety = 0.2`, a group-velocity CFL heuristic. Always overridable.
pub fn suggested_dt(grid: Grid, eps: f64) -> f64 {
    let params = DispersionParams::new(eps).expect("eps >= 0");
    let vmax = grid
        .wavenumbers()
        .fold(0.0f64, |m, xi| m.max(params.phase_prime(xi).abs()));
    (0.5 * 0.2 * grid.dx() / vmax).min(1e-3)
}

/// Conserved quantities sampled along a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedSample {
    /// `dx * sum u` (the integral of u).
    pub mass: f64,
    pub l2: f64,
    pub hamiltonian: f64,
}

/// Energy functional `int (u_x^2/2 - eps*u_xx^2/2 - u^3/6) dx`, constant
/// along exact solutions; evaluated with spectral derivatives and the
/// dx-weighted sum.
pub fn hamiltonian(u: &RealField, params: &DispersionParams) -> Result<f64> {
    let hat = u.forward()?;
    let ux = hat.derivative(1).inverse()?;
    let uxx = hat.derivative(2).inverse()?;
    let eps = params.eps();
    let mut acc = 0.0;
    for ((&v, &vx), &vxx) in u
        .samples()
        .iter()
        .zip(ux.samples())
        .zip(uxx.samples())
    {
        acc += 0.5 * vx * vx - 0.5 * eps * vxx * vxx - v * v * v / 6.0;
    }
    Ok(acc * u.grid().dx())
}

fn conserved(u: &RealField, params: &DispersionParams) -> Result<ConservedSample> {
    let norms = u.lebesgue_norms();
    Ok(ConservedSample {
        mass: norms.mean,
        l2: norms.l2,
        hamiltonian: hamiltonian(u, params)?,
    })
}

/// Time-sampled solution history.
#[derive(Debug, Clone)]
pub struct Trajectory {
    config: SolverConfig,
    times: Vec<f64>,
    states: Vec<RealField>,
    conserved: Vec<ConservedSample>,
}

impl Trajectory {
    /// Assembles a trajectory from externally produced states sampled on the
    /// uniform lattice described by `config`; conserved quantities are
    /// computed from the states.
    pub fn from_parts(config: SolverConfig, states: Vec<RealField>) -> Result<Trajectory> {
        config.validate()?;
        if states.is_empty() {
            return Err(Error::InvalidParameter("empty trajectory".into()));
        }
        if states.len() != config.sample_count() {
            return Err(Error::InvalidParameter(format!(
                "expected {} samples per config, got {}",
                config.sample_count(),
                states.len()
            )));
        }
        for s in &states {
            if s.grid() != config.grid {
                return Err(Error::GridMismatch {
                    left: config.grid.n(),
                    right: s.grid().n(),
                });
            }
        }
        let params = DispersionParams::new(config.eps)?;
        let spacing = config.sample_spacing();
        let times = (0..states.len()).map(|i| i as f64 * spacing).collect();
        let conserved = states
            .iter()
            .map(|u| conserved(u, &params))
            .collect::<Result<_>>()?;
        Ok(Trajectory {
            config,
            times,
            states,
            conserved,
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[RealField] {
        &self.states
    }

    pub fn conserved(&self) -> &[ConservedSample] {
        &self.conserved
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Maximal relative drifts of (mass, l2, hamiltonian) against sample 0.
    ///
    /// Signed quantities can start at numerical zero (odd data has no mass),
    /// so each drift is measured against a sign-robust scale built from the
    /// initial state: the L^1 norm for the mass and the positive-part
    /// integrand for the energy. On sign-definite data these coincide with
    /// the plain quantities.
    pub fn conserved_drift(&self) -> Result<(f64, f64, f64)> {
        let first = self.conserved[0];
        let u0 = &self.states[0];
        let dx = u0.grid().dx();
        let mass_scale = dx * u0.samples().iter().map(|v| v.abs()).sum::<f64>();

        let hat = u0.forward()?;
        let ux = hat.derivative(1).inverse()?;
        let uxx = hat.derivative(2).inverse()?;
        let eps = self.config.eps;
        let mut ham_scale = 0.0;
        for ((&v, &vx), &vxx) in u0
            .samples()
            .iter()
            .zip(ux.samples())
            .zip(uxx.samples())
        {
            ham_scale += 0.5 * vx * vx + 0.5 * eps * vxx * vxx + v.abs().powi(3) / 6.0;
        }
        ham_scale *= dx;

        let floor = 1e-300;
        let scales = (
            first.mass.abs().max(mass_scale).max(floor),
            first.l2.abs().max(floor),
            first.hamiltonian.abs().max(ham_scale).max(floor),
        );
        let mut drift = (0.0f64, 0.0f64, 0.0f64);
        for c in &self.conserved[1..] {
            drift.0 = drift.0.max((c.mass - first.mass).abs() / scales.0);
            drift.1 = drift.1.max((c.l2 - first.l2).abs() / scales.1);
            drift.2 = drift.2.max((c.hamiltonian - first.hamiltonian).abs() / scales.2);
        }
        Ok(drift)
    }

    /// Dilation `u -> lambda^-2 u(lambda^-3 t, lambda^-1 x)`: maps a run at
    /// `eps` onto a run of the equation with `lambda^2 eps` on the dilated
    /// grid. `lambda` must be a power of two so grid and step sizes stay
    /// exactly representable.
    pub fn scaled(&self, lambda: f64) -> Result<Trajectory> {
        let log = lambda.log2();
        if !lambda.is_finite()
            || lambda <= 0.0
            || log.round() != log
            || lambda != (2.0f64).powi(log as i32)
        {
            return Err(Error::InvalidParameter(format!(
                "scaling factor must be a power of two, got {lambda}"
            )));
        }
        let l3 = lambda * lambda * lambda;
        let grid = Grid::new(self.config.grid.n(), lambda * self.config.grid.length())?;
        let config = SolverConfig {
            grid,
            eps: lambda * lambda * self.config.eps,
            t_end: l3 * self.config.t_end,
            dt: l3 * self.config.dt,
            sample_every: self.config.sample_every,
            nonlinear: self.config.nonlinear,
        };
        let params = DispersionParams::new(config.eps)?;
        let inv_sq = 1.0 / (lambda * lambda);
        let times = self.times.iter().map(|t| l3 * t).collect();
        let states: Vec<RealField> = self
            .states
            .iter()
            .map(|u| RealField::new(grid, u.samples().iter().map(|v| inv_sq * v).collect()))
            .collect::<Result<_>>()?;
        let conserved = states
            .iter()
            .map(|u| conserved(u, &params))
            .collect::<Result<_>>()?;
        Ok(Trajectory {
            config,
            times,
            states,
            conserved,
        })
    }

    /// Writes the binary trajectory format: magic `KWTRJ1`, then `n`, `L`,
    /// `eps`, `dt`, `sample_every`, `sample_count` as little-endian 64-bit
    /// values (counts as integers, reals as IEEE doubles), then the samples
    /// as consecutive blocks of `n` doubles. Round-trips bit-exactly.
    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(TRAJECTORY_MAGIC)?;
        w.write_all(&(self.config.grid.n() as u64).to_le_bytes())?;
        w.write_all(&self.config.grid.length().to_le_bytes())?;
        w.write_all(&self.config.eps.to_le_bytes())?;
        w.write_all(&self.config.dt.to_le_bytes())?;
        w.write_all(&(self.config.sample_every as u64).to_le_bytes())?;
        w.write_all(&(self.states.len() as u64).to_le_bytes())?;
        for state in &self.states {
            for &v in state.samples() {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the binary format written by [`Trajectory::write_binary`].
    ///
    /// The format does not record the `nonlinear` flag; loaded trajectories
    /// report `nonlinear = true`. Conserved quantities are recomputed from
    /// the stored states.
    pub fn read_binary(path: &Path) -> Result<Trajectory> {
        fn read_word(r: &mut impl Read) -> Result<[u8; 8]> {
            let mut buf = [0u8; 8];
            r.read_exact(&mut buf)?;
            Ok(buf)
        }
        fn read_u64(r: &mut impl Read) -> Result<u64> {
            Ok(u64::from_le_bytes(read_word(r)?))
        }
        fn read_f64(r: &mut impl Read) -> Result<f64> {
            Ok(f64::from_le_bytes(read_word(r)?))
        }

        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 6];
        r.read_exact(&mut magic)?;
        if &magic != TRAJECTORY_MAGIC {
            return Err(Error::BadTrajectoryFile("bad magic".into()));
        }
        let n = read_u64(&mut r)? as usize;
        let length = read_f64(&mut r)?;
        let eps = read_f64(&mut r)?;
        let dt = read_f64(&mut r)?;
        let sample_every = read_u64(&mut r)? as usize;
        let sample_count = read_u64(&mut r)? as usize;
        if sample_count == 0 {
            return Err(Error::BadTrajectoryFile("empty trajectory".into()));
        }

        let grid = Grid::new(n, length)
            .map_err(|e| Error::BadTrajectoryFile(format!("bad grid: {e}")))?;
        let params = DispersionParams::new(eps)
            .map_err(|e| Error::BadTrajectoryFile(format!("bad eps: {e}")))?;
        let spacing = dt * sample_every as f64;
        let mut states = Vec::with_capacity(sample_count);
        let mut raw = vec![0u8; n * 8];
        for _ in 0..sample_count {
            r.read_exact(&mut raw).map_err(|_| {
                Error::BadTrajectoryFile("truncated sample block".into())
            })?;
            let samples: Vec<f64> = raw
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect();
            states.push(RealField::new(grid, samples)?);
        }
        let times = (0..sample_count).map(|i| i as f64 * spacing).collect();
        let conserved = states
            .iter()
            .map(|u| conserved(u, &params))
            .collect::<Result<_>>()?;
        Ok(Trajectory {
            config: SolverConfig {
                grid,
                eps,
                t_end: spacing * (sample_count - 1) as f64,
                dt,
                sample_every,
                nonlinear: true,
            },
            times,
            states,
            conserved,
        })
    }
}

/// One integrating-factor RK4 stage driver.
struct Stepper {
    params: DispersionParams,
    half_factor: Vec<Complex64>,
    full_factor: Vec<Complex64>,
    nonlinear: bool,
    dt: f64,
}

impl Stepper {
    fn new(grid: Grid, params: DispersionParams, dt: f64, nonlinear: bool) -> Self {
        let half_factor = grid
            .wavenumbers()
            .map(|xi| Complex64::cis(0.5 * dt * params.phase(xi)))
            .collect();
        let full_factor = grid
            .wavenumbers()
            .map(|xi| Complex64::cis(dt * params.phase(xi)))
            .collect();
        Self {
            params,
            half_factor,
            full_factor,
            nonlinear,
            dt,
        }
    }

    /// `N(u_hat) = -(1/2) d_x dealias(F(u^2))` in frequency space.
    fn nonlinear_term(&self, hat: &SpectralField) -> Result<SpectralField> {
        let u = hat.inverse()?;
        let grid = u.grid();
        let squared =
            RealField::new(grid, u.samples().iter().map(|v| v * v).collect())?;
        let mut term = squared.forward()?.dealias().derivative(1);
        for c in term.coeffs_mut() {
            *c *= -0.5;
        }
        Ok(term)
    }

    fn apply_factor(hat: &SpectralField, factor: &[Complex64]) -> SpectralField {
        let mut out = hat.clone();
        for (c, f) in out.coeffs_mut().iter_mut().zip(factor) {
            *c *= f;
        }
        out
    }

    fn axpy(a: &SpectralField, alpha: f64, b: &SpectralField) -> SpectralField {
        let mut out = a.clone();
        for (c, d) in out.coeffs_mut().iter_mut().zip(b.coeffs()) {
            *c += alpha * d;
        }
        out
    }

    fn step(&self, hat: &SpectralField) -> Result<SpectralField> {
        if !self.nonlinear {
            return Ok(Self::apply_factor(hat, &self.full_factor));
        }
        let dt = self.dt;
        let k1 = self.nonlinear_term(hat)?;
        let s1 = Self::apply_factor(&Self::axpy(hat, 0.5 * dt, &k1), &self.half_factor);
        let k2 = self.nonlinear_term(&s1)?;
        let half_u = Self::apply_factor(hat, &self.half_factor);
        let s2 = Self::axpy(&half_u, 0.5 * dt, &k2);
        let k3 = self.nonlinear_term(&s2)?;
        let full_u = Self::apply_factor(hat, &self.full_factor);
        let s3 = Self::axpy(
            &full_u,
            dt,
            &Self::apply_factor(&k3, &self.half_factor),
        );
        let k4 = self.nonlinear_term(&s3)?;

        // u' = E2 u + dt/6 (E2 k1 + 2 E k2 + 2 E k3 + k4)
        let mut out = full_u;
        let e2k1 = Self::apply_factor(&k1, &self.full_factor);
        let ek2 = Self::apply_factor(&k2, &self.half_factor);
        let ek3 = Self::apply_factor(&k3, &self.half_factor);
        let w = dt / 6.0;
        for (((c, a), b), (d, e)) in out
            .coeffs_mut()
            .iter_mut()
            .zip(e2k1.coeffs())
            .zip(ek2.coeffs())
            .zip(k4.coeffs().iter().zip(ek3.coeffs()))
        {
            *c += w * (a + 2.0 * b + 2.0 * e + d);
        }
        Ok(out)
    }

    fn params(&self) -> &DispersionParams {
        &self.params
    }
}

/// Advances one step of size `dt`. With `nonlinear = false` this coincides
/// with the free propagator up to roundoff; otherwise the classical 4-stage
/// scheme in the integrating-factor variables, global order 4 in `dt`.
pub fn step(
    hat: &SpectralField,
    dt: f64,
    params: &DispersionParams,
    nonlinear: bool,
) -> Result<SpectralField> {
    Stepper::new(hat.grid(), *params, dt, nonlinear).step(hat)
}

fn check_finite_coeffs(hat: &SpectralField, t: f64) -> Result<()> {
    if hat.coeffs().iter().any(|c| !c.is_finite()) {
        return Err(Error::BlowUp {
            t,
            linf: f64::INFINITY,
        });
    }
    Ok(())
}

/// Integrates the equation from `phi` per `cfg`, recording every
/// `sample_every`-th step. Rejects under-resolved data (spectral tail above
/// `1e-10` of the peak mode) and aborts on blow-up.
pub fn solve(phi: &RealField, cfg: &SolverConfig) -> Result<Trajectory> {
    cfg.validate()?;
    if phi.grid() != cfg.grid {
        return Err(Error::GridMismatch {
            left: phi.grid().n(),
            right: cfg.grid.n(),
        });
    }
    let hat0 = phi.forward()?;
    let tail = hat0.tail_fraction();
    if tail > RESOLUTION_TAIL {
        return Err(Error::UnderResolved {
            tail,
            limit: RESOLUTION_TAIL,
        });
    }
    let params = DispersionParams::new(cfg.eps)?;
    let stepper = Stepper::new(cfg.grid, params, cfg.dt, cfg.nonlinear);

    let mut hat = hat0.dealias();
    let steps = cfg.step_count();
    let mut times = Vec::with_capacity(cfg.sample_count());
    let mut states = Vec::with_capacity(cfg.sample_count());
    let mut log = Vec::with_capacity(cfg.sample_count());

    let mut record = |hat: &SpectralField, t: f64| -> Result<()> {
        let u = hat.inverse()?;
        let c = conserved(&u, stepper.params())?;
        let linf = u.lebesgue_norms().linf;
        if linf > BLOWUP_LINF {
            return Err(Error::BlowUp { t, linf });
        }
        times.push(t);
        states.push(u);
        log.push(c);
        Ok(())
    };

    record(&hat, 0.0)?;
    for i in 1..=steps {
        let t = i as f64 * cfg.dt;
        hat = stepper.step(&hat)?;
        check_finite_coeffs(&hat, t)?;
        if i % cfg.sample_every == 0 {
            record(&hat, t)?;
        }
    }
    Ok(Trajectory {
        config: *cfg,
        times,
        states,
        conserved: log,
    })
}

/// Gaussian profile `a * exp(-x^2/w^2)`.
pub fn gaussian(grid: Grid, amplitude: f64, width: f64) -> Result<RealField> {
    if !width.is_finite() || width <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "gaussian width must be positive, got {width}"
        )));
    }
    RealField::from_fn(grid, |x| amplitude * (-(x * x) / (width * width)).exp())
}

/// KdV soliton profile `3c * sech^2(sqrt(c)/2 * x)`, a traveling-wave
/// solution of speed `c` of the `eps = 0` equation.
pub fn soliton(grid: Grid, speed: f64) -> Result<RealField> {
    if !speed.is_finite() || speed <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "soliton speed must be positive, got {speed}"
        )));
    }
    RealField::from_fn(grid, |x| {
        let s = sech(0.5 * speed.sqrt() * x);
        3.0 * speed * s * s
    })
}

/// Soliton profile translated by `shift` (periodically wrapped).
pub fn soliton_translated(grid: Grid, speed: f64, shift: f64) -> Result<RealField> {
    let l = grid.length();
    RealField::from_fn(grid, |x| {
        let mut y = x - shift;
        // Wrap into [-L/2, L/2).
        y -= (y / l + 0.5).floor() * l;
        let s = sech(0.5 * speed.sqrt() * y);
        3.0 * speed * s * s
    })
}

/// Overflow-safe `1/cosh`.
fn sech(x: f64) -> f64 {
    let e = (-x.abs()).exp();
    2.0 * e / (1.0 + e * e)
}
