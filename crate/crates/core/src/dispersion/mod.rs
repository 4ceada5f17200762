//! Modal dispersion: effective refractive indices and wavenumbers per
//! waveguide mode, loaded from declarative dispersion-data files.
//!
//! Queries outside a model's declared wavelength window are hard errors,
//! never extrapolations.

mod parse;

pub use parse::parse_dispersion_file;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::constants::{lambda_um_from_omega, SPEED_OF_LIGHT};

/// Errors from dispersion-file parsing and index queries.
#[derive(Debug, Error)]
pub enum DispersionError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("schema error: {message}")]
    Schema { message: String },

    #[error("unknown mode label \"{label}\"")]
    UnknownMode { label: ModeLabel },

    #[error(
        "wavelength {lambda_um} um is outside the valid range [{lo}, {hi}] um of mode \"{label}\""
    )]
    OutOfRange {
        label: ModeLabel,
        lambda_um: f64,
        lo: f64,
        hi: f64,
    },

    #[error("mode \"{label}\" yields non-physical index {n} at {lambda_um} um")]
    InvalidIndex {
        label: ModeLabel,
        lambda_um: f64,
        n: f64,
    },

    #[error("invalid model: {0}")]
    InvalidModel(String),
}

/// Transverse mode label: horizontal and vertical mode indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeLabel {
    pub h: u8,
    pub v: u8,
}

impl ModeLabel {
    pub fn new(h: u8, v: u8) -> Self {
        Self { h, v }
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.h < 10 && self.v < 10 {
            write!(f, "{}{}", self.h, self.v)
        } else {
            write!(f, "{},{}", self.h, self.v)
        }
    }
}

impl FromStr for ModeLabel {
    type Err = String;

    /// Accepts the compact two-digit form ("00", "21") or "h,v" integers.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some((a, b)) = s.split_once(',') {
            let h = a.trim().parse::<u8>().map_err(|_| format!("bad mode index \"{a}\""))?;
            let v = b.trim().parse::<u8>().map_err(|_| format!("bad mode index \"{b}\""))?;
            return Ok(Self { h, v });
        }
        let chars: Vec<char> = s.chars().collect();
        if chars.len() == 2 && chars.iter().all(|c| c.is_ascii_digit()) {
            return Ok(Self {
                h: chars[0] as u8 - b'0',
                v: chars[1] as u8 - b'0',
            });
        }
        Err(format!("bad mode label \"{s}\" (expected e.g. \"00\" or \"1,2\")"))
    }
}

/// Analytic functional form of a [`SellmeierModel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SellmeierForm {
    /// n(λ) = c₀, wavelength independent.
    Constant,
    /// n²(λ) = c₀ + Σᵢ bᵢ λ² / (λ² − cᵢ) with λ in μm and coefficients
    /// ordered [c₀, b₁, c₁, b₂, c₂, ...].
    Standard,
}

/// Analytic index model with an explicit validity window in μm.
#[derive(Debug, Clone)]
pub struct SellmeierModel {
    form: SellmeierForm,
    coefficients: Vec<f64>,
    valid_range_um: (f64, f64),
}

impl SellmeierModel {
    pub fn new(
        form: SellmeierForm,
        coefficients: Vec<f64>,
        valid_range_um: (f64, f64),
    ) -> Result<Self, DispersionError> {
        check_range(valid_range_um)?;
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(DispersionError::InvalidModel(
                "all coefficients must be finite".into(),
            ));
        }
        match form {
            SellmeierForm::Constant if coefficients.len() != 1 => {
                return Err(DispersionError::InvalidModel(
                    "constant form takes exactly one coefficient".into(),
                ))
            }
            SellmeierForm::Standard
                if coefficients.len() < 3 || coefficients.len().is_multiple_of(2) =>
            {
                return Err(DispersionError::InvalidModel(
                    "standard form takes an odd coefficient count >= 3 (c0, then b/c pairs)"
                        .into(),
                ))
            }
            _ => {}
        }
        Ok(Self {
            form,
            coefficients,
            valid_range_um,
        })
    }

    pub fn constant(n: f64, valid_range_um: (f64, f64)) -> Result<Self, DispersionError> {
        Self::new(SellmeierForm::Constant, vec![n], valid_range_um)
    }

    pub fn valid_range_um(&self) -> (f64, f64) {
        self.valid_range_um
    }

    /// Raw index without the per-mode offset; range is checked by the caller.
    fn evaluate(&self, lambda_um: f64) -> f64 {
        match self.form {
            SellmeierForm::Constant => self.coefficients[0],
            SellmeierForm::Standard => {
                let l2 = lambda_um * lambda_um;
                let mut n_sq = self.coefficients[0];
                for pair in self.coefficients[1..].chunks_exact(2) {
                    n_sq += pair[0] * l2 / (l2 - pair[1]);
                }
                n_sq.sqrt()
            }
        }
    }
}

/// Tabulated (λ, n) samples, linearly interpolated.
#[derive(Debug, Clone)]
pub struct TabulatedIndex {
    points: Vec<(f64, f64)>,
    valid_range_um: (f64, f64),
}

impl TabulatedIndex {
    /// Points must be strictly increasing in wavelength, with at least two
    /// samples, and must span the declared range.
    pub fn new(
        points: Vec<(f64, f64)>,
        valid_range_um: (f64, f64),
    ) -> Result<Self, DispersionError> {
        check_range(valid_range_um)?;
        if points.len() < 2 {
            return Err(DispersionError::InvalidModel(
                "tabulated model needs at least two points".into(),
            ));
        }
        if points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
            return Err(DispersionError::InvalidModel(
                "tabulated samples must be finite".into(),
            ));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(DispersionError::InvalidModel(
                "tabulated wavelengths must be strictly increasing".into(),
            ));
        }
        if points[0].0 > valid_range_um.0 || points[points.len() - 1].0 < valid_range_um.1 {
            return Err(DispersionError::InvalidModel(format!(
                "table [{}, {}] um does not cover the declared range [{}, {}] um",
                points[0].0,
                points[points.len() - 1].0,
                valid_range_um.0,
                valid_range_um.1
            )));
        }
        Ok(Self {
            points,
            valid_range_um,
        })
    }

    fn evaluate(&self, lambda_um: f64) -> f64 {
        let pts = &self.points;
        // Index of the first point with λ >= lambda_um.
        let idx = pts.partition_point(|p| p.0 < lambda_um);
        if idx == 0 {
            return pts[0].1;
        }
        if idx == pts.len() {
            return pts[pts.len() - 1].1;
        }
        let (x0, y0) = pts[idx - 1];
        let (x1, y1) = pts[idx];
        y0 + (y1 - y0) * (lambda_um - x0) / (x1 - x0)
    }
}

/// Base index curve of a mode: analytic or tabulated.
#[derive(Debug, Clone)]
pub enum IndexBase {
    Analytic(SellmeierModel),
    Table(TabulatedIndex),
}

impl IndexBase {
    fn valid_range_um(&self) -> (f64, f64) {
        match self {
            IndexBase::Analytic(m) => m.valid_range_um(),
            IndexBase::Table(t) => t.valid_range_um,
        }
    }

    fn evaluate(&self, lambda_um: f64) -> f64 {
        match self {
            IndexBase::Analytic(m) => m.evaluate(lambda_um),
            IndexBase::Table(t) => t.evaluate(lambda_um),
        }
    }
}

/// Per-mode effective-index model: a base curve plus a polynomial offset
/// in wavelength (μm powers). An empty offset means no correction.
#[derive(Debug, Clone)]
pub struct ModeDispersionModel {
    label: ModeLabel,
    base: IndexBase,
    offset: Vec<f64>,
}

impl ModeDispersionModel {
    pub fn new(label: ModeLabel, base: IndexBase, offset: Vec<f64>) -> Result<Self, DispersionError> {
        if offset.iter().any(|c| !c.is_finite()) {
            return Err(DispersionError::InvalidModel(
                "offset polynomial coefficients must be finite".into(),
            ));
        }
        Ok(Self { label, base, offset })
    }

    pub fn label(&self) -> ModeLabel {
        self.label
    }

    pub fn valid_range_um(&self) -> (f64, f64) {
        self.base.valid_range_um()
    }

    fn evaluate(&self, lambda_um: f64) -> Result<f64, DispersionError> {
        let (lo, hi) = self.valid_range_um();
        if !(lambda_um >= lo && lambda_um <= hi) {
            return Err(DispersionError::OutOfRange {
                label: self.label,
                lambda_um,
                lo,
                hi,
            });
        }
        let mut n = self.base.evaluate(lambda_um);
        // Horner evaluation of the offset polynomial.
        n += self
            .offset
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * lambda_um + c);
        if !n.is_finite() || n < 1.0 {
            return Err(DispersionError::InvalidIndex {
                label: self.label,
                lambda_um,
                n,
            });
        }
        Ok(n)
    }
}

/// Immutable map from mode labels to dispersion models. All queries are
/// pure, so a provider can be shared freely across worker threads.
#[derive(Debug, Clone)]
pub struct DispersionProvider {
    models: BTreeMap<ModeLabel, ModeDispersionModel>,
    metadata: String,
}

impl DispersionProvider {
    pub fn new(
        models: Vec<ModeDispersionModel>,
        metadata: impl Into<String>,
    ) -> Result<Self, DispersionError> {
        if models.is_empty() {
            return Err(DispersionError::Schema {
                message: "dispersion data declares no modes".into(),
            });
        }
        let mut map = BTreeMap::new();
        for m in models {
            let label = m.label();
            if map.insert(label, m).is_some() {
                return Err(DispersionError::Schema {
                    message: format!("duplicate mode label \"{label}\""),
                });
            }
        }
        Ok(Self {
            models: map,
            metadata: metadata.into(),
        })
    }

    pub fn metadata(&self) -> &str {
        &self.metadata
    }

    pub fn mode_labels(&self) -> impl Iterator<Item = ModeLabel> + '_ {
        self.models.keys().copied()
    }

    pub fn model(&self, mode: ModeLabel) -> Result<&ModeDispersionModel, DispersionError> {
        self.models
            .get(&mode)
            .ok_or(DispersionError::UnknownMode { label: mode })
    }

    /// Declared wavelength validity window of a mode, in μm.
    pub fn valid_range_um(&self, mode: ModeLabel) -> Result<(f64, f64), DispersionError> {
        Ok(self.model(mode)?.valid_range_um())
    }

    /// Effective refractive index of `mode` at vacuum wavelength `lambda_um`.
    pub fn effective_index(&self, mode: ModeLabel, lambda_um: f64) -> Result<f64, DispersionError> {
        self.model(mode)?.evaluate(lambda_um)
    }

    /// Wavenumber k = n_eff(λ)·ω/c in rad/m at angular frequency `omega` rad/s.
    pub fn wavenumber(&self, mode: ModeLabel, omega: f64) -> Result<f64, DispersionError> {
        let lambda_um = lambda_um_from_omega(omega);
        let n = self.effective_index(mode, lambda_um)?;
        Ok(n * omega / SPEED_OF_LIGHT)
    }
}

fn check_range(range: (f64, f64)) -> Result<(), DispersionError> {
    if !(range.0.is_finite() && range.1.is_finite() && range.0 > 0.0 && range.1 > range.0) {
        return Err(DispersionError::InvalidModel(format!(
            "invalid wavelength range [{}, {}] um",
            range.0, range.1
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::omega_from_lambda_um;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn constant_provider(n: f64) -> DispersionProvider {
        let base = IndexBase::Analytic(SellmeierModel::constant(n, (0.3, 1.2)).unwrap());
        let model = ModeDispersionModel::new(ModeLabel::new(0, 0), base, vec![]).unwrap();
        DispersionProvider::new(vec![model], "test").unwrap()
    }

    #[test]
    fn constant_index_any_wavelength() {
        let p = constant_provider(2.0);
        assert_eq!(p.effective_index(ModeLabel::new(0, 0), 0.8).unwrap(), 2.0);
        assert_eq!(p.effective_index(ModeLabel::new(0, 0), 0.31).unwrap(), 2.0);
    }

    #[test]
    fn vacuum_index() {
        let p = constant_provider(1.0);
        assert_eq!(p.effective_index(ModeLabel::new(0, 0), 0.8).unwrap(), 1.0);
    }

    #[test]
    fn out_of_range_is_error_not_extrapolation() {
        let p = constant_provider(2.0);
        assert!(matches!(
            p.effective_index(ModeLabel::new(0, 0), 1.3),
            Err(DispersionError::OutOfRange { .. })
        ));
        assert!(matches!(
            p.effective_index(ModeLabel::new(0, 0), 0.2),
            Err(DispersionError::OutOfRange { .. })
        ));
    }

    #[test]
    fn unknown_mode_is_error() {
        let p = constant_provider(2.0);
        assert!(matches!(
            p.effective_index(ModeLabel::new(1, 0), 0.8),
            Err(DispersionError::UnknownMode { .. })
        ));
    }

    #[test]
    fn tabulated_linear_interpolation() {
        // Hand interpolation: halfway between 1.80 and 1.78 is 1.79.
        let table = TabulatedIndex::new(vec![(0.8, 1.80), (0.9, 1.78)], (0.8, 0.9)).unwrap();
        let model =
            ModeDispersionModel::new(ModeLabel::new(0, 0), IndexBase::Table(table), vec![]).unwrap();
        let p = DispersionProvider::new(vec![model], "test").unwrap();
        assert_relative_eq!(
            p.effective_index(ModeLabel::new(0, 0), 0.85).unwrap(),
            1.79,
            max_relative = 1e-14
        );
    }

    #[test]
    fn offset_polynomial_applies() {
        let base = IndexBase::Analytic(SellmeierModel::constant(2.0, (0.3, 1.2)).unwrap());
        // n(λ) = 2.0 + 0.1 − 0.05 λ
        let model =
            ModeDispersionModel::new(ModeLabel::new(0, 0), base, vec![0.1, -0.05]).unwrap();
        let p = DispersionProvider::new(vec![model], "test").unwrap();
        assert_relative_eq!(
            p.effective_index(ModeLabel::new(0, 0), 0.8).unwrap(),
            2.1 - 0.05 * 0.8,
            max_relative = 1e-15
        );
    }

    #[test]
    fn sublunary_index_rejected() {
        let base = IndexBase::Analytic(SellmeierModel::constant(1.2, (0.3, 1.2)).unwrap());
        let model =
            ModeDispersionModel::new(ModeLabel::new(0, 0), base, vec![-0.5]).unwrap();
        let p = DispersionProvider::new(vec![model], "test").unwrap();
        assert!(matches!(
            p.effective_index(ModeLabel::new(0, 0), 0.8),
            Err(DispersionError::InvalidIndex { .. })
        ));
    }

    #[test]
    fn standard_sellmeier_matches_direct_formula() {
        // BK7-like single-resonance fit, evaluated independently below.
        let coeffs = vec![1.0, 1.03961212, 0.00600069867];
        let m = SellmeierModel::new(SellmeierForm::Standard, coeffs.clone(), (0.4, 1.0)).unwrap();
        let model =
            ModeDispersionModel::new(ModeLabel::new(0, 0), IndexBase::Analytic(m), vec![]).unwrap();
        let p = DispersionProvider::new(vec![model], "test").unwrap();
        let lam: f64 = 0.5876;
        let l2 = lam * lam;
        let expected = (coeffs[0] + coeffs[1] * l2 / (l2 - coeffs[2])).sqrt();
        assert_relative_eq!(
            p.effective_index(ModeLabel::new(0, 0), lam).unwrap(),
            expected,
            max_relative = 1e-15
        );
    }

    #[test]
    fn wavenumber_vacuum_and_scaling() {
        // n ≡ 1, λ = 1 μm → k = 2π × 10^6 rad/m; n ≡ 2 doubles it.
        let omega = omega_from_lambda_um(1.0);
        let p1 = constant_provider(1.0);
        let p2 = constant_provider(2.0);
        let k1 = p1.wavenumber(ModeLabel::new(0, 0), omega).unwrap();
        let k2 = p2.wavenumber(ModeLabel::new(0, 0), omega).unwrap();
        assert_relative_eq!(k1, 2.0 * std::f64::consts::PI * 1e6, max_relative = 1e-12);
        assert_relative_eq!(k2, 4.0 * std::f64::consts::PI * 1e6, max_relative = 1e-12);
    }

    #[test]
    fn wavenumber_tabulated_against_independent_evaluation() {
        // KTP-like effective-index samples around the down-conversion band.
        let pts = vec![(0.80, 1.846), (0.85, 1.841), (0.90, 1.837)];
        let table = TabulatedIndex::new(pts.clone(), (0.80, 0.90)).unwrap();
        let model =
            ModeDispersionModel::new(ModeLabel::new(0, 0), IndexBase::Table(table), vec![]).unwrap();
        let p = DispersionProvider::new(vec![model], "test").unwrap();

        // Spreadsheet-style re-evaluation: interpolate by hand, then n·ω/c.
        let lam = 0.836;
        let t = (lam - 0.80) / (0.85 - 0.80);
        let n = 1.846 + t * (1.841 - 1.846);
        let omega = omega_from_lambda_um(lam);
        let expected = n * omega / 2.99792458e8;
        assert_relative_eq!(
            p.wavenumber(ModeLabel::new(0, 0), omega).unwrap(),
            expected,
            max_relative = 1e-12
        );
    }

    #[test]
    fn table_must_cover_declared_range() {
        assert!(TabulatedIndex::new(vec![(0.5, 1.5), (0.6, 1.5)], (0.4, 0.7)).is_err());
        assert!(TabulatedIndex::new(vec![(0.5, 1.5)], (0.5, 0.5)).is_err());
        assert!(TabulatedIndex::new(vec![(0.5, 1.5), (0.5, 1.6)], (0.5, 0.6)).is_err());
    }

    #[test]
    fn mode_label_parsing_and_display() {
        assert_eq!("00".parse::<ModeLabel>().unwrap(), ModeLabel::new(0, 0));
        assert_eq!("21".parse::<ModeLabel>().unwrap(), ModeLabel::new(2, 1));
        assert_eq!("3,12".parse::<ModeLabel>().unwrap(), ModeLabel::new(3, 12));
        assert!("x1".parse::<ModeLabel>().is_err());
        assert!("123".parse::<ModeLabel>().is_err());
        assert_eq!(ModeLabel::new(0, 1).to_string(), "01");
        assert_eq!(ModeLabel::new(3, 12).to_string(), "3,12");
    }

    proptest! {
        // k(ω)·c/ω recovers n_eff(2πc/ω) to floating tolerance.
        #[test]
        fn wavenumber_index_round_trip(lam in 0.31f64..1.19, n0 in 1.0f64..3.5) {
            let p = constant_provider(n0);
            let omega = omega_from_lambda_um(lam);
            let k = p.wavenumber(ModeLabel::new(0, 0), omega).unwrap();
            let n = p.effective_index(ModeLabel::new(0, 0), lam).unwrap();
            prop_assert!((k * 2.99792458e8 / omega - n).abs() <= 1e-12 * n.abs());
        }

        // With n ≡ n0 the wavenumber is linear in ω with slope n0/c.
        #[test]
        fn constant_model_linearity(lam in 0.31f64..1.19, n0 in 1.0f64..3.5) {
            let p = constant_provider(n0);
            let omega = omega_from_lambda_um(lam);
            let k = p.wavenumber(ModeLabel::new(0, 0), omega).unwrap();
            prop_assert!((k - n0 / 2.99792458e8 * omega).abs() <= 1e-9 * k);
        }

        // Interpolated values stay between the bracketing samples.
        #[test]
        fn interpolation_bounded_by_samples(t in 0.0f64..1.0) {
            let table = TabulatedIndex::new(
                vec![(0.8, 1.80), (0.9, 1.78), (1.0, 1.77)],
                (0.8, 1.0),
            ).unwrap();
            let lam = 0.8 + 0.2 * t;
            let n = table.evaluate(lam);
            prop_assert!((1.77..=1.80).contains(&n));
            let (lo, hi) = if lam <= 0.9 { (1.78, 1.80) } else { (1.77, 1.78) };
            prop_assert!(n >= lo - 1e-15 && n <= hi + 1e-15);
        }
    }
}
