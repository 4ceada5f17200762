//! Quasi-phase-matched mismatch Δk, the uniform-grating phase-matching
//! function Φ, QPM period design, and Δk = 0 locus tracing.

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::constants::omega_from_lambda_um;
use crate::dispersion::{DispersionError, DispersionProvider, ModeLabel};

#[derive(Debug, Error)]
pub enum PhaseMatchingError {
    #[error(transparent)]
    Dispersion(#[from] DispersionError),

    #[error("invalid waveguide spec: {0}")]
    InvalidSpec(String),

    #[error("no QPM solution: k_p - k_s - k_i = {denominator} rad/m is not positive")]
    NoQpmSolution { denominator: f64 },

    #[error(
        "target wavelengths violate energy conservation: 1/λp − 1/λs − 1/λi = {residual} um⁻¹"
    )]
    EnergyMismatch { residual: f64 },

    #[error("invalid locus scan: {0}")]
    InvalidScan(String),
}

/// Waveguide under a uniform QPM grating.
#[derive(Debug, Clone)]
pub struct WaveguideSpec {
    length_m: f64,
    qpm_period_m: f64,
    qpm_order: u32,
    mode_labels: Vec<ModeLabel>,
    dispersion: Arc<DispersionProvider>,
}

impl WaveguideSpec {
    pub fn new(
        length_m: f64,
        qpm_period_m: f64,
        qpm_order: u32,
        mode_labels: Vec<ModeLabel>,
        dispersion: Arc<DispersionProvider>,
    ) -> Result<Self, PhaseMatchingError> {
        if !(length_m.is_finite() && length_m > 0.0) {
            return Err(PhaseMatchingError::InvalidSpec(format!(
                "length must be positive, got {length_m} m"
            )));
        }
        if !(qpm_period_m.is_finite() && qpm_period_m > 0.0) {
            return Err(PhaseMatchingError::InvalidSpec(format!(
                "QPM period must be positive, got {qpm_period_m} m"
            )));
        }
        if qpm_order < 1 {
            return Err(PhaseMatchingError::InvalidSpec(
                "QPM order must be >= 1".into(),
            ));
        }
        for &label in &mode_labels {
            dispersion.model(label)?;
        }
        Ok(Self {
            length_m,
            qpm_period_m,
            qpm_order,
            mode_labels,
            dispersion,
        })
    }

    pub fn length_m(&self) -> f64 {
        self.length_m
    }

    pub fn qpm_period_m(&self) -> f64 {
        self.qpm_period_m
    }

    pub fn qpm_order(&self) -> u32 {
        self.qpm_order
    }

    pub fn mode_labels(&self) -> &[ModeLabel] {
        &self.mode_labels
    }

    pub fn dispersion(&self) -> &Arc<DispersionProvider> {
        &self.dispersion
    }

    /// Grating wavevector 2πM/Λ in rad/m.
    pub fn grating_wavevector(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.qpm_order as f64 / self.qpm_period_m
    }

    pub fn validate_triplet(&self, t: &ModeTriplet) -> Result<(), PhaseMatchingError> {
        for label in [t.pump_mode, t.signal_mode, t.idler_mode] {
            if !self.mode_labels.contains(&label) {
                return Err(PhaseMatchingError::InvalidSpec(format!(
                    "mode \"{label}\" is not among the waveguide's supported modes"
                )));
            }
            self.dispersion.model(label)?;
        }
        Ok(())
    }
}

/// One pump/signal/idler mode combination and its overlap weight.
#[derive(Debug, Clone, Copy)]
pub struct ModeTriplet {
    pub pump_mode: ModeLabel,
    pub signal_mode: ModeLabel,
    pub idler_mode: ModeLabel,
    pub weight: Complex64,
}

impl ModeTriplet {
    pub fn new(pump: ModeLabel, signal: ModeLabel, idler: ModeLabel, weight: Complex64) -> Self {
        Self {
            pump_mode: pump,
            signal_mode: signal,
            idler_mode: idler,
            weight,
        }
    }

    /// Compact "pump-signal-idler" identifier, e.g. "00-01-01".
    pub fn id(&self) -> String {
        format!("{}-{}-{}", self.pump_mode, self.signal_mode, self.idler_mode)
    }
}

/// Δk = k_p(ω_s+ω_i) − k_s(ω_s) − k_i(ω_i) − 2πM/Λ in rad/m.
pub fn phase_mismatch(
    wg: &WaveguideSpec,
    t: &ModeTriplet,
    omega_s: f64,
    omega_i: f64,
) -> Result<f64, PhaseMatchingError> {
    let d = wg.dispersion();
    let k_p = d.wavenumber(t.pump_mode, omega_s + omega_i)?;
    let k_s = d.wavenumber(t.signal_mode, omega_s)?;
    let k_i = d.wavenumber(t.idler_mode, omega_i)?;
    // Grouping k_s + k_i first keeps the result bit-exactly symmetric under
    // a signal/idler swap when both arms share a mode.
    Ok(k_p - (k_s + k_i) - wg.grating_wavevector())
}

/// Uniform-grating phase-matching function Φ = sinc(ΔkL/2)·exp(iΔkL/2),
/// with sinc(x) = sin(x)/x and sinc(0) = 1. |Φ| ≤ 1 everywhere.
pub fn pm_function(delta_k: f64, length_m: f64) -> Complex64 {
    let x = 0.5 * delta_k * length_m;
    Complex64::new(x.cos(), x.sin()) * sinc(x)
}

/// sin(x)/x with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// QPM period Λ = 2πM / (k_p − k_s − k_i) that phase-matches the target
/// wavelengths (μm). The target must satisfy 1/λp = 1/λs + 1/λi.
pub fn qpm_period_for(
    provider: &DispersionProvider,
    t: &ModeTriplet,
    lambda_p_um: f64,
    lambda_s_um: f64,
    lambda_i_um: f64,
    order: u32,
) -> Result<f64, PhaseMatchingError> {
    let residual = 1.0 / lambda_p_um - 1.0 / lambda_s_um - 1.0 / lambda_i_um;
    if residual.abs() > 1e-9 / lambda_p_um {
        return Err(PhaseMatchingError::EnergyMismatch { residual });
    }
    let omega_p = omega_from_lambda_um(lambda_p_um);
    let omega_s = omega_from_lambda_um(lambda_s_um);
    let omega_i = omega_from_lambda_um(lambda_i_um);
    let denominator = provider.wavenumber(t.pump_mode, omega_p)?
        - provider.wavenumber(t.signal_mode, omega_s)?
        - provider.wavenumber(t.idler_mode, omega_i)?;
    if denominator <= 0.0 {
        return Err(PhaseMatchingError::NoQpmSolution { denominator });
    }
    Ok(2.0 * std::f64::consts::PI * order as f64 / denominator)
}

/// Scan description for [`pm_locus`]: ω_s samples plus the ω_i interval
/// bracketed for a sign change, all in rad/s.
#[derive(Debug, Clone)]
pub struct LocusScan {
    pub omega_s_min: f64,
    pub omega_s_max: f64,
    pub omega_s_samples: usize,
    pub omega_i_min: f64,
    pub omega_i_max: f64,
    /// Number of bracketing subintervals scanned over [ω_i_min, ω_i_max].
    pub bracket_steps: usize,
    /// Residual |Δk| below which a bisection root is accepted, rad/m.
    pub tolerance_rad_m: f64,
}

impl LocusScan {
    fn validate(&self) -> Result<(), PhaseMatchingError> {
        if !(self.omega_s_min > 0.0 && self.omega_s_max >= self.omega_s_min) {
            return Err(PhaseMatchingError::InvalidScan(
                "signal frequency range must be positive and ordered".into(),
            ));
        }
        if !(self.omega_i_min > 0.0 && self.omega_i_max > self.omega_i_min) {
            return Err(PhaseMatchingError::InvalidScan(
                "idler bracket range must be positive and ordered".into(),
            ));
        }
        if self.bracket_steps < 1 {
            return Err(PhaseMatchingError::InvalidScan(
                "bracket_steps must be >= 1".into(),
            ));
        }
        if !self.tolerance_rad_m.is_finite() || self.tolerance_rad_m <= 0.0 {
            return Err(PhaseMatchingError::InvalidScan(
                "tolerance must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// A refined Δk = 0 point.
#[derive(Debug, Clone, Copy)]
pub struct LocusPoint {
    pub omega_s: f64,
    pub omega_i: f64,
    /// Δk at the returned point, rad/m.
    pub residual_rad_m: f64,
}

/// An ω_s sample for which no root was returned, with the reason.
#[derive(Debug, Clone)]
pub struct LocusSkip {
    pub omega_s: f64,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct LocusResult {
    /// Root points, sorted by ω_s ascending.
    pub points: Vec<LocusPoint>,
    /// Samples omitted from `points`, for diagnostics.
    pub skipped: Vec<LocusSkip>,
}

/// Trace the Δk = 0 locus of a triplet: for each sampled ω_s, scan ω_i for
/// a sign change and refine it by bisection. Samples where Δk cannot be
/// evaluated or never changes sign are reported in `skipped`, not errors.
/// If several brackets exist the lowest-ω_i root is kept.
pub fn pm_locus(
    wg: &WaveguideSpec,
    t: &ModeTriplet,
    scan: &LocusScan,
) -> Result<LocusResult, PhaseMatchingError> {
    scan.validate()?;
    wg.validate_triplet(t)?;

    let mut result = LocusResult::default();
    if scan.omega_s_samples == 0 {
        return Ok(result);
    }

    let n = scan.omega_s_samples;
    let step_s = if n > 1 {
        (scan.omega_s_max - scan.omega_s_min) / (n - 1) as f64
    } else {
        0.0
    };

    for is in 0..n {
        let omega_s = scan.omega_s_min + is as f64 * step_s;
        match locus_root(wg, t, omega_s, scan) {
            Ok(Some(point)) => result.points.push(point),
            Ok(None) => result.skipped.push(LocusSkip {
                omega_s,
                reason: "no sign change of Δk over the idler bracket range".into(),
            }),
            Err(e) => result.skipped.push(LocusSkip {
                omega_s,
                reason: e.to_string(),
            }),
        }
    }
    Ok(result)
}

fn locus_root(
    wg: &WaveguideSpec,
    t: &ModeTriplet,
    omega_s: f64,
    scan: &LocusScan,
) -> Result<Option<LocusPoint>, PhaseMatchingError> {
    let steps = scan.bracket_steps;
    let h = (scan.omega_i_max - scan.omega_i_min) / steps as f64;
    let mut prev_w = scan.omega_i_min;
    let mut prev_f = phase_mismatch(wg, t, omega_s, prev_w)?;
    if prev_f == 0.0 {
        return Ok(Some(LocusPoint {
            omega_s,
            omega_i: prev_w,
            residual_rad_m: 0.0,
        }));
    }
    for k in 1..=steps {
        let w = scan.omega_i_min + k as f64 * h;
        let f = phase_mismatch(wg, t, omega_s, w)?;
        if f == 0.0 {
            return Ok(Some(LocusPoint {
                omega_s,
                omega_i: w,
                residual_rad_m: 0.0,
            }));
        }
        if f.signum() != prev_f.signum() {
            return Ok(Some(bisect(wg, t, omega_s, prev_w, w, prev_f, scan)?));
        }
        prev_w = w;
        prev_f = f;
    }
    Ok(None)
}

fn bisect(
    wg: &WaveguideSpec,
    t: &ModeTriplet,
    omega_s: f64,
    mut lo: f64,
    mut hi: f64,
    mut f_lo: f64,
    scan: &LocusScan,
) -> Result<LocusPoint, PhaseMatchingError> {
    // 200 halvings exhaust f64 resolution long before this bound.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = phase_mismatch(wg, t, omega_s, mid)?;
        if f_mid.abs() <= scan.tolerance_rad_m || mid == lo || mid == hi {
            return Ok(LocusPoint {
                omega_s,
                omega_i: mid,
                residual_rad_m: f_mid,
            });
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let omega_i = 0.5 * (lo + hi);
    let residual = phase_mismatch(wg, t, omega_s, omega_i)?;
    Ok(LocusPoint {
        omega_s,
        omega_i,
        residual_rad_m: residual,
    })
}
