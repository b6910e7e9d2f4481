//! Pseudo-spectral simulation and frequency-space analysis of the Kawahara
//! equation `u_t + u_{3x} + eps*u_{5x} + u*u_x = 0` on a periodic domain,
//! covering the KdV limit `eps = 0`.
//!
//! The crate is organized around five layers:
//!
//! * [`spectral`] — periodic grid, real/spectral fields, FFT-based calculus
//!   and static norms;
//! * [`projectors`] — the smooth bump, dyadic frequency multipliers and the
//!   notch multipliers around the stationary points of the phase function;
//! * [`dispersion`] — phase function, resonance function, frequency-region
//!   classification, free propagator and mixed-norm probes;
//! * [`evolve`] — integrating-factor RK4 time stepping, trajectories,
//!   conserved quantities, the dilation map and a binary trajectory format;
//! * [`bourgain`] — windowed space-time transforms and the weighted
//!   space-time norms used as uniformity diagnostics.

pub mod bourgain;
pub mod dispersion;
mod error;
pub mod evolve;
pub mod projectors;
pub mod spectral;

pub use error::{Error, Result};
