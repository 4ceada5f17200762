//! Spectral-separation and photon-counting chain: trigger bandpass, signal
//! long-pass, detector efficiencies and dark counts, coincidence window,
//! accidental-coincidence correction, and reduction of measured count-rate
//! tables.

use thiserror::Error;

use crate::grid::trapezoid_weight;
use crate::jsa::TripletDecomposition;

#[derive(Debug, Error)]
pub enum DetectionError {
    #[error("invalid filter spec: {0}")]
    InvalidFilter(String),

    #[error("invalid detector spec: {0}")]
    InvalidDetector(String),

    #[error("total JSI mass is zero; rates are undefined")]
    ZeroJsiMass,

    #[error("trigger rate is zero; the coincidence ratio is undefined")]
    ZeroTriggerRate,

    #[error("negative rate: {0}")]
    NegativeRate(String),

    #[error("the pulsed accidental model needs a repetition rate")]
    MissingRepetitionRate,

    #[error("measured-rows parse error at line {line}: {message}")]
    RowParse { line: usize, message: String },
}

/// Spectral response shape of the trigger bandpass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriggerShape {
    Gaussian,
    Tophat,
}

/// Spectral separation stage: trigger-arm bandpass (fiber-tip collection)
/// and signal-arm long-pass (knife edge), plus broadband transmissions.
#[derive(Debug, Clone, Copy)]
pub struct FilterSpec {
    pub trigger_center_nm: f64,
    pub trigger_fwhm_nm: f64,
    pub trigger_shape: TriggerShape,
    /// Long-pass edge on the signal arm; shorter wavelengths are blocked.
    pub signal_cutoff_nm: f64,
    pub trigger_broadband: f64,
    pub signal_broadband: f64,
}

impl FilterSpec {
    pub fn validate(&self) -> Result<(), DetectionError> {
        if !self.trigger_fwhm_nm.is_finite() || self.trigger_fwhm_nm <= 0.0 {
            return Err(DetectionError::InvalidFilter(format!(
                "trigger FWHM must be positive, got {} nm",
                self.trigger_fwhm_nm
            )));
        }
        for (name, t) in [
            ("trigger", self.trigger_broadband),
            ("signal", self.signal_broadband),
        ] {
            if !(0.0..=1.0).contains(&t) {
                return Err(DetectionError::InvalidFilter(format!(
                    "{name} broadband transmission must be in [0, 1], got {t}"
                )));
            }
        }
        Ok(())
    }

    /// Trigger-arm transmission at wavelength λ (nm), in [0, 1].
    pub fn trigger_transmission(&self, lambda_nm: f64) -> f64 {
        let t = match self.trigger_shape {
            TriggerShape::Gaussian => {
                let d = lambda_nm - self.trigger_center_nm;
                (-4.0 * std::f64::consts::LN_2 * d * d
                    / (self.trigger_fwhm_nm * self.trigger_fwhm_nm))
                    .exp()
            }
            TriggerShape::Tophat => {
                if (lambda_nm - self.trigger_center_nm).abs() <= 0.5 * self.trigger_fwhm_nm {
                    1.0
                } else {
                    0.0
                }
            }
        };
        t * self.trigger_broadband
    }

    /// Signal-arm transmission: an ideal knife edge at the cutoff.
    pub fn signal_transmission(&self, lambda_nm: f64) -> f64 {
        if lambda_nm < self.signal_cutoff_nm {
            0.0
        } else {
            self.signal_broadband
        }
    }
}

/// Photon-counting module: quantum efficiency and dark-count rate.
#[derive(Debug, Clone, Copy)]
pub struct DetectorSpec {
    pub efficiency: f64,
    pub dark_hz: f64,
}

impl DetectorSpec {
    pub fn validate(&self) -> Result<(), DetectionError> {
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(DetectionError::InvalidDetector(format!(
                "efficiency must be in [0, 1], got {}",
                self.efficiency
            )));
        }
        if !self.dark_hz.is_finite() || self.dark_hz < 0.0 {
            return Err(DetectionError::InvalidDetector(format!(
                "dark rate must be >= 0, got {}",
                self.dark_hz
            )));
        }
        Ok(())
    }
}

/// Which grid axis feeds the trigger arm. The trigger band of the reference
/// configuration lies above degeneracy, on the idler axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriggerArm {
    Idler,
    Signal,
}

/// Accidental-coincidence model. `Cw` is R_s·R_t·τ_w; `Pulsed` counts one
/// temporal slot per pump pulse: R_s·R_t/R_rep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AccidentalModel {
    Cw,
    Pulsed { rep_rate_hz: f64 },
}

/// Singles, trigger, coincidence and accidental rates with the derived
/// coincidence-to-trigger ratios.
#[derive(Debug, Clone, Copy)]
pub struct RateReport {
    pub r_s_hz: f64,
    pub r_t_hz: f64,
    pub r_c_hz: f64,
    pub r_acc_hz: f64,
    pub ratio_raw: f64,
    pub ratio_corrected: f64,
}

impl RateReport {
    /// Build a report from the four rates; fails on negative rates or a
    /// zero trigger rate (the ratios would be undefined).
    pub fn new(r_s_hz: f64, r_t_hz: f64, r_c_hz: f64, r_acc_hz: f64) -> Result<Self, DetectionError> {
        for (name, r) in [
            ("R_s", r_s_hz),
            ("R_t", r_t_hz),
            ("R_c", r_c_hz),
            ("R_acc", r_acc_hz),
        ] {
            if !r.is_finite() || r < 0.0 {
                return Err(DetectionError::NegativeRate(format!("{name} = {r} Hz")));
            }
        }
        if r_t_hz == 0.0 {
            return Err(DetectionError::ZeroTriggerRate);
        }
        Ok(Self {
            r_s_hz,
            r_t_hz,
            r_c_hz,
            r_acc_hz,
            ratio_raw: r_c_hz / r_t_hz,
            ratio_corrected: (r_c_hz - r_acc_hz) / r_t_hz,
        })
    }
}

/// Accidental coincidence rate R_s·R_t·τ_w (cw approximation).
pub fn accidental_rate(r_s_hz: f64, r_t_hz: f64, window_s: f64) -> f64 {
    r_s_hz * r_t_hz * window_s
}

/// Predict count rates from a JSI decomposition.
///
/// The JSI-weighted mean transmissions over the normalized total intensity
/// give
///   R_t = pair_rate·⟨T_trig⟩·η_t + dark_t,
///   R_s = pair_rate·⟨T_sig⟩·η_s + dark_s,
///   R_c = pair_rate·⟨T_trig·T_sig⟩·η_t·η_s,
/// and the accidental rate follows the selected model.
#[allow(clippy::too_many_arguments)]
pub fn predict_rates(
    dec: &TripletDecomposition,
    pair_rate_hz: f64,
    filters: &FilterSpec,
    trigger_detector: &DetectorSpec,
    signal_detector: &DetectorSpec,
    window_s: f64,
    trigger_arm: TriggerArm,
    accidental: AccidentalModel,
) -> Result<RateReport, DetectionError> {
    filters.validate()?;
    trigger_detector.validate()?;
    signal_detector.validate()?;
    if !pair_rate_hz.is_finite() || pair_rate_hz <= 0.0 {
        return Err(DetectionError::NegativeRate(format!(
            "pair rate must be positive, got {pair_rate_hz} Hz"
        )));
    }

    let grid = &dec.total;
    let signal_nm = grid.signal_axis().wavelengths_nm();
    let idler_nm = grid.idler_axis().wavelengths_nm();

    // Per-axis transmissions; the trigger arm picks which axis sees the
    // bandpass and which the knife edge.
    let (t_trig, t_sig): (Vec<f64>, Vec<f64>) = match trigger_arm {
        TriggerArm::Idler => (
            idler_nm.iter().map(|&l| filters.trigger_transmission(l)).collect(),
            signal_nm.iter().map(|&l| filters.signal_transmission(l)).collect(),
        ),
        TriggerArm::Signal => (
            signal_nm.iter().map(|&l| filters.trigger_transmission(l)).collect(),
            idler_nm.iter().map(|&l| filters.signal_transmission(l)).collect(),
        ),
    };

    let ns = grid.signal_axis().len();
    let ni = grid.idler_axis().len();
    let mut mass = 0.0;
    let mut mean_trig = 0.0;
    let mut mean_sig = 0.0;
    let mut mean_joint = 0.0;
    for (is, row) in grid.rows().enumerate() {
        let ws = trapezoid_weight(is, ns);
        for (ii, &j) in row.iter().enumerate() {
            let w = ws * trapezoid_weight(ii, ni) * j;
            let (trig, sig) = match trigger_arm {
                TriggerArm::Idler => (t_trig[ii], t_sig[is]),
                TriggerArm::Signal => (t_trig[is], t_sig[ii]),
            };
            mass += w;
            mean_trig += w * trig;
            mean_sig += w * sig;
            mean_joint += w * trig * sig;
        }
    }
    if mass <= 0.0 {
        return Err(DetectionError::ZeroJsiMass);
    }
    mean_trig /= mass;
    mean_sig /= mass;
    mean_joint /= mass;

    let r_t = pair_rate_hz * mean_trig * trigger_detector.efficiency + trigger_detector.dark_hz;
    let r_s = pair_rate_hz * mean_sig * signal_detector.efficiency + signal_detector.dark_hz;
    let r_c =
        pair_rate_hz * mean_joint * trigger_detector.efficiency * signal_detector.efficiency;
    let r_acc = match accidental {
        AccidentalModel::Cw => accidental_rate(r_s, r_t, window_s),
        AccidentalModel::Pulsed { rep_rate_hz } => {
            if !rep_rate_hz.is_finite() || rep_rate_hz <= 0.0 {
                return Err(DetectionError::MissingRepetitionRate);
            }
            r_s * r_t / rep_rate_hz
        }
    };
    RateReport::new(r_s, r_t, r_c, r_acc)
}

/// One measured row: fiber-tip center wavelength and the three count rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasuredRow {
    pub lambda_nm: f64,
    pub r_s_hz: f64,
    pub r_t_hz: f64,
    pub r_c_hz: f64,
}

/// A reduced measured row: the rate report plus Poisson standard errors
/// for the counting interval.
#[derive(Debug, Clone, Copy)]
pub struct ReducedRow {
    pub lambda_nm: f64,
    pub report: RateReport,
    pub sigma_r_s_hz: f64,
    pub sigma_r_t_hz: f64,
    pub sigma_r_c_hz: f64,
    /// Quotient-propagated error on ratio_raw: ratio·√(1/N_c + 1/N_t).
    pub sigma_ratio_raw: f64,
}

/// Reduce measured rows to reports with accidental correction and Poisson
/// errors. `interval_s` is the counting interval behind each rate.
pub fn reduce_measured(
    rows: &[MeasuredRow],
    window_s: f64,
    interval_s: f64,
) -> Result<Vec<ReducedRow>, DetectionError> {
    rows.iter()
        .map(|row| {
            if row.r_t_hz <= 0.0 {
                return Err(DetectionError::ZeroTriggerRate);
            }
            let r_acc = accidental_rate(row.r_s_hz, row.r_t_hz, window_s);
            let report = RateReport::new(row.r_s_hz, row.r_t_hz, row.r_c_hz, r_acc)?;
            let sigma = |r: f64| (r / interval_s).sqrt();
            let n_c = row.r_c_hz * interval_s;
            let n_t = row.r_t_hz * interval_s;
            let sigma_ratio = if n_c > 0.0 {
                report.ratio_raw * (1.0 / n_c + 1.0 / n_t).sqrt()
            } else {
                0.0
            };
            Ok(ReducedRow {
                lambda_nm: row.lambda_nm,
                report,
                sigma_r_s_hz: sigma(row.r_s_hz),
                sigma_r_t_hz: sigma(row.r_t_hz),
                sigma_r_c_hz: sigma(row.r_c_hz),
                sigma_ratio_raw: sigma_ratio,
            })
        })
        .collect()
}

/// Parse the measured-rows CSV: header `lambda_nm,Rs_hz,Rt_hz,Rc_hz`, one
/// numeric row per line. `#`-prefixed lines are comments.
pub fn parse_measured_csv(content: &str) -> Result<Vec<MeasuredRow>, DetectionError> {
    let mut rows = Vec::new();
    let mut saw_header = false;
    for (idx, raw) in content.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols != ["lambda_nm", "Rs_hz", "Rt_hz", "Rc_hz"] {
                return Err(DetectionError::RowParse {
                    line: line_no,
                    message: format!(
                        "expected header \"lambda_nm,Rs_hz,Rt_hz,Rc_hz\", got \"{line}\""
                    ),
                });
            }
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(DetectionError::RowParse {
                line: line_no,
                message: format!("expected 4 fields, got {}", fields.len()),
            });
        }
        let mut vals = [0.0; 4];
        for (k, f) in fields.iter().enumerate() {
            vals[k] = f.parse::<f64>().map_err(|_| DetectionError::RowParse {
                line: line_no,
                message: format!("\"{f}\" is not a number"),
            })?;
        }
        rows.push(MeasuredRow {
            lambda_nm: vals[0],
            r_s_hz: vals[1],
            r_t_hz: vals[2],
            r_c_hz: vals[3],
        });
    }
    if !saw_header {
        return Err(DetectionError::RowParse {
            line: 1,
            message: "missing header \"lambda_nm,Rs_hz,Rt_hz,Rc_hz\"".into(),
        });
    }
    Ok(rows)
}
