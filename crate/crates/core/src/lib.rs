//! Quasi-photon spectra and magnetically controlled two-photon entanglement
//! in a charged scalar medium.
//!
//! Two photon modes with wavenumbers κ₁ < κ₂ travel through a medium of
//! charged scalar particles sitting in a constant magnetic field. The coupled
//! system separates into quasi-electron and quasi-photon normal modes whose
//! frequencies are the positive roots of a secular equation with poles at the
//! free wavenumbers. This crate solves that equation, builds the canonical
//! (Bogoliubov) transformation between free and dressed operators, computes
//! the von Neumann entanglement measure of the dressed two-photon state, and
//! sweeps the external parameters to map out the resonant behaviour of the
//! measure near the fields where the cyclotron-like frequency ω₀ crosses a
//! photon wavenumber.
//!
//! Everything is a pure function over immutable inputs; all numerical state
//! lives in the argument structs.

pub mod bogoliubov;
pub mod entangle;
pub mod params;
pub mod selfcheck;
pub mod solve;
pub mod spectrum;
pub mod sweep;
pub mod units;

pub mod cli;

pub use bogoliubov::{CanonicalTransform, ModeIndex, QuadraticForm};
pub use entangle::{EntanglementReport, TwoQubitAmplitudes};
pub use params::{ModelParams, PhysicalInput, UnitConvention};
pub use spectrum::{ResonanceInfo, Root, RootSet, SolveMethod};
pub use sweep::{SweepAxis, SweepResult, SweepSpec};
