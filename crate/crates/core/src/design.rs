//! Single-spatial-mode selection: quantify how strongly a pump spectrum
//! concentrates pair generation into one mode triplet, and scan pump
//! parameters to maximize that isolation.

use thiserror::Error;

use crate::grid::Axis;
use crate::jsa::{decompose, JsaError, TripletDecomposition};
use crate::phasematching::{ModeTriplet, WaveguideSpec};
use crate::pump::{PumpError, PumpSpec};

#[derive(Debug, Error)]
pub enum DesignError {
    #[error(transparent)]
    Jsa(#[from] JsaError),

    #[error(transparent)]
    Pump(#[from] PumpError),

    #[error("all triplet masses are zero; isolation is undefined")]
    AllZeroMasses,

    #[error("scan lists must be non-empty")]
    EmptyScan,
}

/// Relative tolerance below which two captured masses count as tied.
const TIE_TOLERANCE: f64 = 1e-12;

/// Captured JSI mass per triplet and the dominant-triplet mass fraction.
#[derive(Debug, Clone)]
pub struct IsolationReport {
    /// (triplet id, captured mass) in decomposition order.
    pub masses: Vec<(String, f64)>,
    /// Index of the dominant triplet (first of the tied set, if any).
    pub dominant: usize,
    pub dominant_id: String,
    /// Dominant mass / total mass, in (0, 1].
    pub isolation: f64,
    /// Indices of non-dominant triplets whose mass ties the dominant one.
    pub tied_with: Vec<usize>,
    /// Pump coordinates when produced by a scan, nm.
    pub pump_center_nm: Option<f64>,
    pub pump_fwhm_nm: Option<f64>,
}

/// Isolation of a decomposition: each triplet's grid-integrated JSI mass
/// (the pump envelope is already folded into every JSI), the dominant
/// triplet by mass with first-in-list tie-breaking, and the dominant mass
/// fraction.
pub fn isolation(dec: &TripletDecomposition) -> Result<IsolationReport, DesignError> {
    let masses: Vec<(String, f64)> = dec
        .components
        .iter()
        .map(|c| (c.triplet.id(), c.mass))
        .collect();
    let total: f64 = masses.iter().map(|(_, m)| m).sum();
    if !total.is_finite() || total <= 0.0 {
        return Err(DesignError::AllZeroMasses);
    }
    let mut dominant = 0;
    for (k, (_, m)) in masses.iter().enumerate() {
        if *m > masses[dominant].1 {
            dominant = k;
        }
    }
    let dominant_mass = masses[dominant].1;
    let tied_with = masses
        .iter()
        .enumerate()
        .filter(|(k, (_, m))| *k != dominant && (dominant_mass - m).abs() <= TIE_TOLERANCE * dominant_mass)
        .map(|(k, _)| k)
        .collect();
    Ok(IsolationReport {
        dominant_id: masses[dominant].0.clone(),
        masses,
        dominant,
        isolation: dominant_mass / total,
        tied_with,
        pump_center_nm: None,
        pump_fwhm_nm: None,
    })
}

/// Exhaustive pump-parameter scan. One report per (center, fwhm) pair,
/// row-major over centers then fwhms; each entry equals a direct
/// [`isolation`] call with that pump on the same grid.
pub fn scan_pump(
    wg: &WaveguideSpec,
    triplets: &[ModeTriplet],
    base: &PumpSpec,
    centers_nm: &[f64],
    fwhms_nm: &[f64],
    signal_axis: &Axis,
    idler_axis: &Axis,
) -> Result<Vec<IsolationReport>, DesignError> {
    if centers_nm.is_empty() || fwhms_nm.is_empty() {
        return Err(DesignError::EmptyScan);
    }
    let mut reports = Vec::with_capacity(centers_nm.len() * fwhms_nm.len());
    for &center in centers_nm {
        for &fwhm in fwhms_nm {
            let pump = PumpSpec::new(center * 1e-3, fwhm * 1e-3, base.shape())?;
            let dec = decompose(wg, triplets, &pump, signal_axis, idler_axis)?;
            let mut report = isolation(&dec)?;
            report.pump_center_nm = Some(center);
            report.pump_fwhm_nm = Some(fwhm);
            reports.push(report);
        }
    }
    Ok(reports)
}
