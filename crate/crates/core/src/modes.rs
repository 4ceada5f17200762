//! Transverse mode profiles and overlap weights.
//!
//! The default profile family is the metal-clad rectangular core: separable
//! sinusoidal modes u_{hv}(x, y) = √(4/WD)·sin((h+1)πx/W)·sin((v+1)πy/D)
//! over a W×D core, L2-normalized over the cross-section. Overlap integrals
//! use a composite three-point Gauss–Legendre rule with [`QUAD_PANELS`]
//! panels per axis.

use num_complex::Complex64;
use thiserror::Error;

use crate::dispersion::ModeLabel;

/// Panels per axis of the composite Gauss–Legendre overlap quadrature.
pub const QUAD_PANELS: usize = 256;

#[derive(Debug, Error)]
pub enum ModeError {
    #[error("invalid core geometry: width {width_um} um x depth {depth_um} um")]
    InvalidGeometry { width_um: f64, depth_um: f64 },

    #[error("mode profiles have mismatched core geometries")]
    GeometryMismatch,
}

/// Sinusoidal mode of a rectangular W×D core (dimensions in μm).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseModeModel {
    label: ModeLabel,
    width_um: f64,
    depth_um: f64,
}

impl TransverseModeModel {
    pub fn rectangular(
        label: ModeLabel,
        width_um: f64,
        depth_um: f64,
    ) -> Result<Self, ModeError> {
        if !(width_um.is_finite() && width_um > 0.0 && depth_um.is_finite() && depth_um > 0.0) {
            return Err(ModeError::InvalidGeometry {
                width_um,
                depth_um,
            });
        }
        Ok(Self {
            label,
            width_um,
            depth_um,
        })
    }

    pub fn label(&self) -> ModeLabel {
        self.label
    }

    pub fn width_um(&self) -> f64 {
        self.width_um
    }

    pub fn depth_um(&self) -> f64 {
        self.depth_um
    }

    /// Profile amplitude at (x, y) inside the core, units μm⁻¹.
    pub fn evaluate(&self, x_um: f64, y_um: f64) -> f64 {
        let norm = (4.0 / (self.width_um * self.depth_um)).sqrt();
        norm * self.factor(self.label.h, x_um, self.width_um)
            * self.factor(self.label.v, y_um, self.depth_um)
    }

    fn factor(&self, index: u8, coord: f64, extent: f64) -> f64 {
        ((index as f64 + 1.0) * std::f64::consts::PI * coord / extent).sin()
    }

    fn same_geometry(&self, other: &Self) -> bool {
        self.width_um == other.width_um && self.depth_um == other.depth_um
    }
}

/// Overlap weight of a mode triplet:
/// pump_coupling · ∬ u_pump·u_signal·u_idler dx dy (profiles are real, so
/// conjugation is a no-op). Units μm⁻¹; enters the JSA as a constant factor.
pub fn overlap_weight(
    pump: &TransverseModeModel,
    signal: &TransverseModeModel,
    idler: &TransverseModeModel,
    pump_coupling: Complex64,
) -> Result<Complex64, ModeError> {
    if !pump.same_geometry(signal) || !pump.same_geometry(idler) {
        return Err(ModeError::GeometryMismatch);
    }
    // Separable profiles: the double integral factorizes per axis.
    let ix = triple_sine_integral(
        pump.label().h,
        signal.label().h,
        idler.label().h,
        pump.width_um(),
    );
    let iy = triple_sine_integral(
        pump.label().v,
        signal.label().v,
        idler.label().v,
        pump.depth_um(),
    );
    let scale = (2.0f64 / pump.width_um()).sqrt()
        * (2.0f64 / signal.width_um()).sqrt()
        * (2.0f64 / idler.width_um()).sqrt()
        * (2.0f64 / pump.depth_um()).sqrt()
        * (2.0f64 / signal.depth_um()).sqrt()
        * (2.0f64 / idler.depth_um()).sqrt();
    // scale already carries all six normalization factors; the per-axis
    // integrals below are over bare sines.
    Ok(pump_coupling * (scale * ix * iy))
}

/// ∫₀^a sin((p+1)πx/a)·sin((q+1)πx/a)·sin((r+1)πx/a) dx by composite
/// three-point Gauss–Legendre quadrature with [`QUAD_PANELS`] panels.
fn triple_sine_integral(p: u8, q: u8, r: u8, extent: f64) -> f64 {
    let kp = (p as f64 + 1.0) * std::f64::consts::PI / extent;
    let kq = (q as f64 + 1.0) * std::f64::consts::PI / extent;
    let kr = (r as f64 + 1.0) * std::f64::consts::PI / extent;
    composite_gl3(0.0, extent, QUAD_PANELS, |x| {
        (kp * x).sin() * (kq * x).sin() * (kr * x).sin()
    })
}

/// Composite 3-point Gauss–Legendre rule over [a, b] with `panels` panels.
pub fn composite_gl3<F: Fn(f64) -> f64>(a: f64, b: f64, panels: usize, f: F) -> f64 {
    // Nodes ±√(3/5), 0 and weights 5/9, 8/9 on the reference [-1, 1].
    let node = (3.0f64 / 5.0).sqrt();
    let (w_outer, w_inner) = (5.0 / 9.0, 8.0 / 9.0);
    let h = (b - a) / panels as f64;
    let half = 0.5 * h;
    let mut acc = 0.0;
    for k in 0..panels {
        let mid = a + (k as f64 + 0.5) * h;
        acc += w_outer * f(mid - half * node) + w_inner * f(mid) + w_outer * f(mid + half * node);
    }
    acc * half
}
