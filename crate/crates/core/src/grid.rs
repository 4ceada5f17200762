//! Rectangular spectral grids over (ω_s, ω_i).
//!
//! Grid evaluation is a pure map over the index space, so the parallel and
//! sequential builders produce bit-identical values; the partitioning never
//! influences the arithmetic. The `parallel` feature (default) routes
//! [`SpectralGrid::build`] and [`SpectralGrid::try_build`] through rayon;
//! the `*_seq` variants are always available.

use num_complex::Complex64;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use thiserror::Error;

use crate::constants::{lambda_nm_from_omega, omega_from_lambda_nm};

#[derive(Debug, Error)]
pub enum GridError {
    #[error("invalid axis: {0}")]
    InvalidAxis(String),

    #[error("value dimensions {rows}x{cols} do not match axes {ns}x{ni}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        ns: usize,
        ni: usize,
    },
}

/// A uniformly spaced angular-frequency axis, strictly increasing, rad/s.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    samples: Vec<f64>,
    step: f64,
}

impl Axis {
    /// Uniform axis from `min` to `max` rad/s inclusive with `n >= 2` samples.
    pub fn from_omega(min: f64, max: f64, n: usize) -> Result<Self, GridError> {
        if n < 2 {
            return Err(GridError::InvalidAxis(format!(
                "need at least 2 samples, got {n}"
            )));
        }
        if !(min.is_finite() && max.is_finite() && min > 0.0 && max > min) {
            return Err(GridError::InvalidAxis(format!(
                "need 0 < min < max, got [{min}, {max}]"
            )));
        }
        let step = (max - min) / (n - 1) as f64;
        let samples = (0..n).map(|k| min + k as f64 * step).collect();
        Ok(Self { samples, step })
    }

    /// Axis covering a wavelength window given in nm. The resulting axis is
    /// uniform in ω (so the shorter wavelength maps to the upper end).
    pub fn from_wavelength_nm(min_nm: f64, max_nm: f64, n: usize) -> Result<Self, GridError> {
        if !(min_nm > 0.0 && max_nm > min_nm) {
            return Err(GridError::InvalidAxis(format!(
                "need 0 < min < max, got [{min_nm}, {max_nm}] nm"
            )));
        }
        Self::from_omega(
            omega_from_lambda_nm(max_nm),
            omega_from_lambda_nm(min_nm),
            n,
        )
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn min(&self) -> f64 {
        self.samples[0]
    }

    pub fn max(&self) -> f64 {
        self.samples[self.samples.len() - 1]
    }

    /// Sample spacing in rad/s.
    pub fn step(&self) -> f64 {
        self.step
    }

    /// Display labels: the vacuum wavelength of each sample, nm.
    pub fn wavelengths_nm(&self) -> Vec<f64> {
        self.samples.iter().map(|&w| lambda_nm_from_omega(w)).collect()
    }

    /// Wavelength window [shortest, longest] touched by the axis, μm.
    pub fn wavelength_span_um(&self) -> (f64, f64) {
        (
            lambda_nm_from_omega(self.max()) * 1e-3,
            lambda_nm_from_omega(self.min()) * 1e-3,
        )
    }
}

/// N_s × N_i matrix of values over a signal axis (rows) and idler axis
/// (columns), stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGrid<T> {
    signal: Axis,
    idler: Axis,
    values: Vec<T>,
}

/// Complex joint spectral amplitude grid.
pub type JsaGrid = SpectralGrid<Complex64>;
/// Non-negative joint spectral intensity grid.
pub type JsiGrid = SpectralGrid<f64>;

impl<T> SpectralGrid<T> {
    pub fn from_values(signal: Axis, idler: Axis, values: Vec<T>) -> Result<Self, GridError> {
        if values.len() != signal.len() * idler.len() {
            return Err(GridError::ShapeMismatch {
                rows: values.len() / idler.len().max(1),
                cols: idler.len(),
                ns: signal.len(),
                ni: idler.len(),
            });
        }
        Ok(Self {
            signal,
            idler,
            values,
        })
    }

    pub fn signal_axis(&self) -> &Axis {
        &self.signal
    }

    pub fn idler_axis(&self) -> &Axis {
        &self.idler
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn value(&self, is: usize, ii: usize) -> &T {
        &self.values[is * self.idler.len() + ii]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.values.chunks(self.idler.len())
    }

    /// Pointwise transform keeping the axes.
    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> SpectralGrid<U> {
        SpectralGrid {
            signal: self.signal.clone(),
            idler: self.idler.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }
}

impl<T: Send> SpectralGrid<T> {
    /// Evaluate `f(ω_s, ω_i)` at every grid point. Runs on the rayon pool
    /// when the `parallel` feature is enabled; output is identical to
    /// [`SpectralGrid::build_seq`] either way.
    pub fn build<F>(signal: Axis, idler: Axis, f: F) -> Self
    where
        F: Fn(f64, f64) -> T + Sync,
    {
        #[cfg(feature = "parallel")]
        {
            let ni = idler.len();
            let values = (0..signal.len() * ni)
                .into_par_iter()
                .map(|idx| f(signal.samples[idx / ni], idler.samples[idx % ni]))
                .collect();
            Self {
                signal,
                idler,
                values,
            }
        }
        #[cfg(not(feature = "parallel"))]
        {
            Self::build_seq(signal, idler, f)
        }
    }

    /// Sequential counterpart of [`SpectralGrid::build`].
    pub fn build_seq<F>(signal: Axis, idler: Axis, f: F) -> Self
    where
        F: Fn(f64, f64) -> T,
    {
        let mut values = Vec::with_capacity(signal.len() * idler.len());
        for &ws in &signal.samples {
            for &wi in &idler.samples {
                values.push(f(ws, wi));
            }
        }
        Self {
            signal,
            idler,
            values,
        }
    }

    /// Fallible evaluation; the first error aborts the build.
    pub fn try_build<F, E>(signal: Axis, idler: Axis, f: F) -> Result<Self, E>
    where
        F: Fn(f64, f64) -> Result<T, E> + Sync,
        E: Send,
    {
        #[cfg(feature = "parallel")]
        {
            let ni = idler.len();
            let values = (0..signal.len() * ni)
                .into_par_iter()
                .map(|idx| f(signal.samples[idx / ni], idler.samples[idx % ni]))
                .collect::<Result<Vec<T>, E>>()?;
            Ok(Self {
                signal,
                idler,
                values,
            })
        }
        #[cfg(not(feature = "parallel"))]
        {
            Self::try_build_seq(signal, idler, f)
        }
    }

    /// Sequential counterpart of [`SpectralGrid::try_build`].
    pub fn try_build_seq<F, E>(signal: Axis, idler: Axis, f: F) -> Result<Self, E>
    where
        F: Fn(f64, f64) -> Result<T, E>,
    {
        let mut values = Vec::with_capacity(signal.len() * idler.len());
        for &ws in &signal.samples {
            for &wi in &idler.samples {
                values.push(f(ws, wi)?);
            }
        }
        Ok(Self {
            signal,
            idler,
            values,
        })
    }
}

impl JsiGrid {
    /// Trapezoid-rule mass ∬ J dω_s dω_i over the covered window.
    pub fn mass(&self) -> f64 {
        let ns = self.signal.len();
        let ni = self.idler.len();
        let mut acc = 0.0;
        for is in 0..ns {
            let ws = trapezoid_weight(is, ns);
            let row = &self.values[is * ni..(is + 1) * ni];
            let mut row_acc = 0.0;
            for (ii, v) in row.iter().enumerate() {
                row_acc += trapezoid_weight(ii, ni) * v;
            }
            acc += ws * row_acc;
        }
        acc * self.signal.step * self.idler.step
    }

    /// Largest value on the grid.
    pub fn peak(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// Trapezoid end-point halving: ½ at the first and last sample, 1 inside.
pub(crate) fn trapezoid_weight(idx: usize, len: usize) -> f64 {
    if idx == 0 || idx + 1 == len {
        0.5
    } else {
        1.0
    }
}
