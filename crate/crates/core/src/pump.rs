//! Pump pulse spectral envelope.
//!
//! The envelope is a transform-limited Gaussian in angular frequency,
//! L2-normalized so that ∫|α(ω)|² dω = 1. The quoted wavelength bandwidth
//! is interpreted as the intensity FWHM of |α|².

use thiserror::Error;

use crate::constants::{omega_from_lambda_um, SPEED_OF_LIGHT};

#[derive(Debug, Error)]
pub enum PumpError {
    #[error("invalid pump spec: {0}")]
    Invalid(String),
}

/// Spectral shape family of the pump envelope.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PumpShape {
    Gaussian,
}

/// Pump pulse specification in wavelength units.
#[derive(Debug, Clone, Copy)]
pub struct PumpSpec {
    center_um: f64,
    fwhm_um: f64,
    shape: PumpShape,
}

impl PumpSpec {
    /// `center_um` is the central wavelength, `fwhm_um` the intensity FWHM
    /// of the spectrum, both in μm.
    pub fn new(center_um: f64, fwhm_um: f64, shape: PumpShape) -> Result<Self, PumpError> {
        if !(center_um.is_finite() && center_um > 0.0) {
            return Err(PumpError::Invalid(format!(
                "center wavelength must be positive, got {center_um} um"
            )));
        }
        if !(fwhm_um.is_finite() && fwhm_um > 0.0 && fwhm_um < center_um) {
            return Err(PumpError::Invalid(format!(
                "bandwidth must satisfy 0 < fwhm < center, got {fwhm_um} um"
            )));
        }
        Ok(Self {
            center_um,
            fwhm_um,
            shape,
        })
    }

    pub fn gaussian(center_um: f64, fwhm_um: f64) -> Result<Self, PumpError> {
        Self::new(center_um, fwhm_um, PumpShape::Gaussian)
    }

    pub fn center_um(&self) -> f64 {
        self.center_um
    }

    pub fn fwhm_um(&self) -> f64 {
        self.fwhm_um
    }

    pub fn shape(&self) -> PumpShape {
        self.shape
    }

    /// Central angular frequency ω₀ in rad/s.
    pub fn center_omega(&self) -> f64 {
        omega_from_lambda_um(self.center_um)
    }

    /// Intensity FWHM converted to angular frequency, rad/s.
    pub fn fwhm_omega(&self) -> f64 {
        bandwidth_to_omega(self.center_um, self.fwhm_um)
    }

    /// Standard deviation of the Gaussian *amplitude*, rad/s. The intensity
    /// FWHM Δω relates to it by σ = Δω / (2√ln2).
    fn amplitude_sigma(&self) -> f64 {
        self.fwhm_omega() / (2.0 * std::f64::consts::LN_2.sqrt())
    }

    /// Spectral amplitude α(ω). Real-valued and non-negative (flat spectral
    /// phase); peak at ω₀; ∫|α|²dω = 1.
    pub fn envelope(&self, omega: f64) -> f64 {
        match self.shape {
            PumpShape::Gaussian => {
                let sigma = self.amplitude_sigma();
                let norm = 1.0 / (sigma * std::f64::consts::PI.sqrt()).sqrt();
                let d = (omega - self.center_omega()) / sigma;
                norm * (-0.5 * d * d).exp()
            }
        }
    }
}

/// First-order conversion of a wavelength bandwidth to angular frequency:
/// Δω = 2πc·Δλ/λ₀², wavelengths in μm, result in rad/s.
pub fn bandwidth_to_omega(center_um: f64, delta_um: f64) -> f64 {
    2.0 * std::f64::consts::PI * SPEED_OF_LIGHT * (delta_um * 1e-6)
        / ((center_um * 1e-6) * (center_um * 1e-6))
}
