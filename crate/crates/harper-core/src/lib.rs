//! Simulation and design of distance-modulated waveguide arrays whose
//! coupling pattern follows an off-diagonal Harper law.
//!
//! The crate covers the full chain from lattice model to chip design:
//!
//! * [`model`]: coupling schedules, modulation envelopes, device profiles,
//!   and the exponential coupling-vs-separation geometry law;
//! * [`spectral`]: eigensystems with mirror-symmetry refinement, boundary
//!   state identification, band traces with eigenvector continuity, and
//!   spectral-gap measures;
//! * [`evolve`]: piecewise-constant propagators, single-photon outputs,
//!   boundary-state injection, and adiabaticity leakage audits;
//! * [`twophoton`]: two-photon coincidence tables with a partial-
//!   distinguishability mixture, an independent Fock-space oracle, grouped
//!   detection, Hong-Ou-Mandel curves, visibilities, and shot-noise count
//!   sampling;
//! * [`design`]: center-coupling optimization for a target splitting ratio,
//!   modulation-phase selection, and physical layout export.
//!
//! The crate is `no_std` (with `alloc`); the companion command-line crate
//! supplies file I/O and configuration.

#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod design;
pub mod error;
pub mod evolve;
pub mod linalg;
pub mod model;
pub mod spectral;
pub mod twophoton;

pub use error::{Error, Result};
