//! Scattering and bound states of one-dimensional piecewise-constant
//! potentials with zero-range (delta and delta-prime) interactions.
//!
//! The solver works in terms of the quantum wave impedance
//! Z(x) = (hbar/(i m)) psi'(x)/psi(x), which obeys a first-order Riccati
//! flow: closed-form tanh steps carry it across uniform regions and simple
//! algebraic jumps carry it across point interactions. Folding the impedance
//! inward from an outgoing or decaying tail yields reflection and
//! transmission amplitudes without ever forming products of exponentially
//! large matrices, so thick-barrier results stay at full precision.
//!
//! What's in the box:
//!
//! * [`potential`]: potential construction, validation, and the text format
//!   parser.
//! * [`impedance`]: characteristic impedances, region propagation, point
//!   jumps, and whole-axis impedance profiles.
//! * [`scattering`]: r, t, R, T for either incidence side, energy sweeps,
//!   and a closed form for the single delta.
//! * [`spectrum`]: bound-state search by a monotone state-count staircase,
//!   plus the double-delta-well transcendental levels.
//! * [`wavefunction`]: sampled bound-state wavefunctions with correct jump
//!   discontinuities and unit-norm scaling.
//! * [`oracle`]: an independent transfer-matrix implementation used to
//!   cross-check all of the above.
//!
//! Energy sweeps and spectrum scans fan out over a thread pool when the
//! default `parallel` feature is on; disable it for a fully sequential
//! build with identical results.

pub use num_complex;

pub mod error;
pub mod impedance;
pub mod oracle;
mod par;
pub mod potential;
pub mod scattering;
pub mod spectrum;
pub mod wavefunction;

pub use error::{Error, Result};
pub use impedance::{Impedance, ImpedanceProfile, ImpedanceState, RegionKind, RegionWave, Side};
pub use par::configure_worker_threads;
pub use potential::{
    parse_potential, PhysicalConstants, PointInteraction, PotentialSpec, Region,
};
pub use scattering::{IncidentSide, ScatteringResult};
pub use spectrum::{BoundState, DispersionSample, DoubleWellLevels, SearchParams};
pub use wavefunction::{Discontinuity, WavefunctionSamples};
