//! Joint spectral amplitude assembly: per-triplet JSA grids, intensities,
//! marginals, and the incoherent multi-triplet decomposition.
//!
//! Distinct mode triplets are distinguishable, so their contributions add
//! in intensity, never in amplitude.

use thiserror::Error;

use crate::grid::{trapezoid_weight, Axis, GridError, JsaGrid, JsiGrid, SpectralGrid};
use crate::phasematching::{phase_mismatch, pm_function, ModeTriplet, PhaseMatchingError, WaveguideSpec};
use crate::pump::PumpSpec;

#[derive(Debug, Error)]
pub enum JsaError {
    #[error(transparent)]
    Grid(#[from] GridError),

    #[error(transparent)]
    PhaseMatching(#[from] PhaseMatchingError),

    #[error("at grid point (ω_s = {omega_s} rad/s, ω_i = {omega_i} rad/s): {source}")]
    Evaluation {
        omega_s: f64,
        omega_i: f64,
        source: PhaseMatchingError,
    },

    #[error("decomposition needs at least one triplet")]
    EmptyTriplets,
}

/// f(ω_s, ω_i) = weight · α(ω_s + ω_i) · Φ(Δk(ω_s, ω_i), L) on the grid.
pub fn compute_jsa(
    wg: &WaveguideSpec,
    t: &ModeTriplet,
    pump: &PumpSpec,
    signal_axis: &Axis,
    idler_axis: &Axis,
) -> Result<JsaGrid, JsaError> {
    wg.validate_triplet(t)?;
    precheck_ranges(wg, t, signal_axis, idler_axis)?;

    let length = wg.length_m();
    let weight = t.weight;
    SpectralGrid::try_build(signal_axis.clone(), idler_axis.clone(), |ws, wi| {
        let dk = phase_mismatch(wg, t, ws, wi).map_err(|source| JsaError::Evaluation {
            omega_s: ws,
            omega_i: wi,
            source,
        })?;
        Ok(weight * pump.envelope(ws + wi) * pm_function(dk, length))
    })
}

/// Fail fast when a grid's wavelength span leaves a dispersion window, so
/// range violations surface before any per-point work.
fn precheck_ranges(
    wg: &WaveguideSpec,
    t: &ModeTriplet,
    signal_axis: &Axis,
    idler_axis: &Axis,
) -> Result<(), JsaError> {
    let d = wg.dispersion();
    let check = |mode, span: (f64, f64)| -> Result<(), JsaError> {
        for lambda in [span.0, span.1] {
            d.effective_index(mode, lambda)
                .map_err(PhaseMatchingError::from)?;
        }
        Ok(())
    };
    check(t.signal_mode, signal_axis.wavelength_span_um())?;
    check(t.idler_mode, idler_axis.wavelength_span_um())?;
    let pump_span = (
        crate::constants::lambda_um_from_omega(signal_axis.max() + idler_axis.max()),
        crate::constants::lambda_um_from_omega(signal_axis.min() + idler_axis.min()),
    );
    check(t.pump_mode, pump_span)
}

/// Pointwise |f|²: intensity grid of a JSA grid.
pub fn jsi(grid: &JsaGrid) -> JsiGrid {
    grid.map(|v| v.norm_sqr())
}

/// Marginal spectra of an intensity grid, integrated with the trapezoid
/// rule over the opposite axis.
#[derive(Debug, Clone)]
pub struct Marginals {
    /// Signal spectrum over ω_s; entry i is ∫ J(ω_s[i], ω_i) dω_i.
    pub signal: Vec<f64>,
    /// Idler spectrum over ω_i; entry j is ∫ J(ω_s, ω_i[j]) dω_s.
    pub idler: Vec<f64>,
    signal_step: f64,
    idler_step: f64,
}

impl Marginals {
    /// ∫ signal(ω_s) dω_s — equals [`Marginals::idler_mass`] up to rounding.
    pub fn signal_mass(&self) -> f64 {
        integrate(&self.signal, self.signal_step)
    }

    /// ∫ idler(ω_i) dω_i.
    pub fn idler_mass(&self) -> f64 {
        integrate(&self.idler, self.idler_step)
    }
}

fn integrate(values: &[f64], step: f64) -> f64 {
    values
        .iter()
        .enumerate()
        .map(|(k, v)| trapezoid_weight(k, values.len()) * v)
        .sum::<f64>()
        * step
}

/// Marginal spectra of a non-negative grid.
pub fn marginals(grid: &JsiGrid) -> Marginals {
    let ns = grid.signal_axis().len();
    let ni = grid.idler_axis().len();
    let ds = grid.signal_axis().step();
    let di = grid.idler_axis().step();

    let mut signal = vec![0.0; ns];
    let mut idler = vec![0.0; ni];
    for (is, row) in grid.rows().enumerate() {
        let ws = trapezoid_weight(is, ns);
        for (ii, &v) in row.iter().enumerate() {
            signal[is] += trapezoid_weight(ii, ni) * v;
            idler[ii] += ws * v;
        }
    }
    for v in &mut signal {
        *v *= di;
    }
    for v in &mut idler {
        *v *= ds;
    }
    Marginals {
        signal,
        idler,
        signal_step: ds,
        idler_step: di,
    }
}

/// One triplet's intensity contribution.
#[derive(Debug, Clone)]
pub struct TripletComponent {
    pub triplet: ModeTriplet,
    pub jsi: JsiGrid,
    /// Trapezoid-integrated JSI mass over the grid window.
    pub mass: f64,
}

/// Per-triplet intensities plus their pointwise (incoherent) sum.
#[derive(Debug, Clone)]
pub struct TripletDecomposition {
    pub components: Vec<TripletComponent>,
    pub total: JsiGrid,
}

/// Compute every triplet's JSI on a shared grid and the incoherent total.
/// Component order follows the input order.
pub fn decompose(
    wg: &WaveguideSpec,
    triplets: &[ModeTriplet],
    pump: &PumpSpec,
    signal_axis: &Axis,
    idler_axis: &Axis,
) -> Result<TripletDecomposition, JsaError> {
    if triplets.is_empty() {
        return Err(JsaError::EmptyTriplets);
    }
    let mut components = Vec::with_capacity(triplets.len());
    let mut total = vec![0.0; signal_axis.len() * idler_axis.len()];
    for t in triplets {
        let amp = compute_jsa(wg, t, pump, signal_axis, idler_axis)?;
        let intensity = jsi(&amp);
        for (acc, v) in total.iter_mut().zip(intensity.values()) {
            *acc += v;
        }
        let mass = intensity.mass();
        components.push(TripletComponent {
            triplet: *t,
            jsi: intensity,
            mass,
        });
    }
    let total = SpectralGrid::from_values(signal_axis.clone(), idler_axis.clone(), total)?;
    Ok(TripletDecomposition { components, total })
}
