//! Photon-pair generation in multimode quasi-phase-matched nonlinear waveguides.
//!
//! The crate computes per-mode-triplet joint spectral amplitudes from modal
//! dispersion data, models a spectral-separation and coincidence-counting
//! detection chain, and scans pump parameters to isolate single-spatial-mode
//! pair emission.
//!
//! With the default `parallel` feature, grid evaluation runs on rayon worker
//! threads; results are bit-identical to the sequential path regardless of
//! thread count.

pub mod constants;
pub mod design;
pub mod detection;
pub mod dispersion;
pub mod grid;
pub mod jsa;
pub mod modes;
pub mod phasematching;
pub mod pump;

pub use design::{isolation, scan_pump, IsolationReport};
pub use detection::{
    accidental_rate, predict_rates, reduce_measured, AccidentalModel, DetectorSpec, FilterSpec,
    RateReport, TriggerArm,
};
pub use dispersion::{DispersionProvider, ModeDispersionModel, ModeLabel, SellmeierModel};
pub use grid::{Axis, JsaGrid, JsiGrid, SpectralGrid};
pub use jsa::{compute_jsa, decompose, jsi, marginals, TripletDecomposition};
pub use modes::{overlap_weight, TransverseModeModel};
pub use phasematching::{
    phase_mismatch, pm_function, pm_locus, qpm_period_for, LocusScan, ModeTriplet, WaveguideSpec,
};
pub use pump::{bandwidth_to_omega, PumpSpec};
