//! Declarative run configuration: TOML schema, dotted-key overrides, and
//! conversion into the core model types.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use serde::Deserialize;

use wgspdc::constants::omega_from_lambda_nm;
use wgspdc::detection::{AccidentalModel, DetectorSpec, FilterSpec, TriggerArm, TriggerShape};
use wgspdc::dispersion::{parse_dispersion_file, DispersionProvider, ModeLabel};
use wgspdc::grid::Axis;
use wgspdc::modes::{overlap_weight, TransverseModeModel};
use wgspdc::phasematching::{LocusScan, ModeTriplet, WaveguideSpec};
use wgspdc::pump::{PumpShape, PumpSpec};

use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub dispersion: Option<DispersionSection>,
    pub waveguide: Option<WaveguideSection>,
    pub pump: Option<PumpSection>,
    pub geometry: Option<GeometrySection>,
    #[serde(default, rename = "triplet")]
    pub triplets: Vec<TripletSection>,
    pub grid: Option<GridSection>,
    #[serde(default)]
    pub filters: FiltersSection,
    #[serde(default)]
    pub detectors: DetectorsSection,
    #[serde(default)]
    pub rates: RatesSection,
    pub locus: Option<LocusSection>,
    pub scan: Option<ScanSection>,
    pub design: Option<DesignSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersionSection {
    pub file: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveguideSection {
    pub length_mm: f64,
    pub qpm_period_um: f64,
    #[serde(default = "one_u32")]
    pub qpm_order: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpSection {
    pub center_nm: f64,
    pub fwhm_nm: f64,
    #[serde(default = "gaussian_str")]
    pub shape: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub width_um: f64,
    pub depth_um: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripletSection {
    pub pump: String,
    pub signal: String,
    pub idler: String,
    /// Explicit weight override; bypasses the transverse-profile model.
    pub weight_re: Option<f64>,
    pub weight_im: Option<f64>,
    /// Pump coupling multiplying the computed overlap (default 1 + 0i).
    pub coupling_re: Option<f64>,
    pub coupling_im: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub signal_min_nm: f64,
    pub signal_max_nm: f64,
    pub signal_samples: usize,
    pub idler_min_nm: f64,
    pub idler_max_nm: f64,
    pub idler_samples: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FiltersSection {
    pub trigger_center_nm: f64,
    pub trigger_fwhm_nm: f64,
    pub trigger_shape: String,
    pub signal_cutoff_nm: f64,
    pub trigger_broadband: f64,
    pub signal_broadband: f64,
}

impl Default for FiltersSection {
    fn default() -> Self {
        Self {
            trigger_center_nm: 885.0,
            trigger_fwhm_nm: 6.0,
            trigger_shape: "gaussian".into(),
            signal_cutoff_nm: 0.0,
            trigger_broadband: 1.0,
            signal_broadband: 1.0,
        }
    }
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct DetectorsSection {
    pub trigger: DetectorSection,
    pub signal: DetectorSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectorSection {
    pub efficiency: f64,
    pub dark_hz: f64,
}

impl Default for DetectorSection {
    fn default() -> Self {
        Self {
            efficiency: 1.0,
            dark_hz: 0.0,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RatesSection {
    pub pair_rate_hz: Option<f64>,
    pub coincidence_window_ns: f64,
    pub accidental_model: String,
    pub rep_rate_hz: Option<f64>,
    pub trigger_arm: String,
    pub counting_interval_s: f64,
}

impl Default for RatesSection {
    fn default() -> Self {
        Self {
            pair_rate_hz: None,
            coincidence_window_ns: 5.0,
            accidental_model: "cw".into(),
            rep_rate_hz: None,
            trigger_arm: "idler".into(),
            counting_interval_s: 300.0,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocusSection {
    pub signal_min_nm: f64,
    pub signal_max_nm: f64,
    #[serde(default = "default_locus_samples")]
    pub samples: usize,
    pub idler_min_nm: f64,
    pub idler_max_nm: f64,
    #[serde(default = "default_bracket_steps")]
    pub bracket_steps: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance_rad_m: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub center_nm: Vec<f64>,
    pub fwhm_nm: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSection {
    pub pump_nm: f64,
    pub signal_nm: f64,
    pub idler_nm: f64,
    #[serde(default = "one_u32")]
    pub order: u32,
    /// Index into the triplet list naming the mode combination to match.
    #[serde(default)]
    pub triplet: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub format: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            format: "both".into(),
        }
    }
}

fn one_u32() -> u32 {
    1
}

fn gaussian_str() -> String {
    "gaussian".into()
}

fn default_locus_samples() -> usize {
    65
}

fn default_bracket_steps() -> usize {
    400
}

fn default_tolerance() -> f64 {
    1e-6
}

/// Which artifact formats to write.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

impl OutputFormat {
    pub fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
}

/// Load a config file, apply `--set key=value` overrides, and deserialize.
/// Overrides win over file values.
pub fn load_config(path: &Path, sets: &[String]) -> Result<(RawConfig, PathBuf), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(&format!("reading config {}", path.display()), e))?;
    let mut value: toml::Value = text
        .parse()
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    for set in sets {
        apply_override(&mut value, set)?;
    }
    let config: RawConfig = value
        .try_into()
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let dir = path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    Ok((config, dir))
}

/// Apply one `key.path=value` override onto the parsed TOML tree. The value
/// is parsed as TOML; anything unparseable is taken as a bare string.
fn apply_override(root: &mut toml::Value, set: &str) -> Result<(), CliError> {
    let (key, raw) = set
        .split_once('=')
        .ok_or_else(|| CliError::config(format!("override \"{set}\" is not KEY=VALUE")))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(CliError::config(format!("override \"{set}\" has an empty key")));
    }
    let parsed = parse_toml_scalar(raw.trim());

    let segments: Vec<&str> = key.split('.').collect();
    let mut cursor = root;
    for (idx, segment) in segments.iter().enumerate() {
        let last = idx + 1 == segments.len();
        if let Ok(array_index) = segment.parse::<usize>() {
            let arr = cursor.as_array_mut().ok_or_else(|| {
                CliError::config(format!("override key \"{key}\": \"{segment}\" indexes a non-array"))
            })?;
            let slot = arr.get_mut(array_index).ok_or_else(|| {
                CliError::config(format!("override key \"{key}\": index {array_index} out of range"))
            })?;
            if last {
                *slot = parsed;
                return Ok(());
            }
            cursor = slot;
        } else {
            let table = cursor.as_table_mut().ok_or_else(|| {
                CliError::config(format!("override key \"{key}\": \"{segment}\" indexes a non-table"))
            })?;
            if last {
                table.insert(segment.to_string(), parsed);
                return Ok(());
            }
            cursor = table
                .entry(segment.to_string())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        }
    }
    Ok(())
}

fn parse_toml_scalar(raw: &str) -> toml::Value {
    let wrapped = format!("v = {raw}");
    match wrapped.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap(),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

/// Everything the physics subcommands need, built from a [`RawConfig`].
/// The waveguide keeps the dispersion provider alive.
pub struct ModelBundle {
    pub waveguide: WaveguideSpec,
    pub pump: PumpSpec,
    pub triplets: Vec<ModeTriplet>,
    pub signal_axis: Axis,
    pub idler_axis: Axis,
}

impl RawConfig {
    fn require<'a, T>(section: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
        section
            .as_ref()
            .ok_or_else(|| CliError::config(format!("missing required config section [{name}]")))
    }

    pub fn output_format(&self) -> Result<OutputFormat, CliError> {
        match self.output.format.as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "both" => Ok(OutputFormat::Both),
            other => Err(CliError::config(format!(
                "output.format must be csv, json, or both, got \"{other}\""
            ))),
        }
    }

    pub fn load_provider(&self, config_dir: &Path) -> Result<Arc<DispersionProvider>, CliError> {
        let section = Self::require(&self.dispersion, "dispersion")?;
        let path = if section.file.is_absolute() {
            section.file.clone()
        } else {
            config_dir.join(&section.file)
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::io(&format!("reading dispersion file {}", path.display()), e))?;
        let provider = parse_dispersion_file(&text)
            .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        Ok(Arc::new(provider))
    }

    pub fn pump_spec(&self) -> Result<PumpSpec, CliError> {
        let p = Self::require(&self.pump, "pump")?;
        let shape = match p.shape.as_str() {
            "gaussian" => PumpShape::Gaussian,
            other => {
                return Err(CliError::config(format!(
                    "pump.shape must be \"gaussian\", got \"{other}\""
                )))
            }
        };
        PumpSpec::new(p.center_nm * 1e-3, p.fwhm_nm * 1e-3, shape)
            .map_err(|e| CliError::config(e.to_string()))
    }

    fn parse_label(text: &str, key: &str) -> Result<ModeLabel, CliError> {
        text.parse::<ModeLabel>()
            .map_err(|e| CliError::config(format!("{key}: {e}")))
    }

    pub fn build_triplets(
        &self,
        provider: &Arc<DispersionProvider>,
    ) -> Result<Vec<ModeTriplet>, CliError> {
        if self.triplets.is_empty() {
            return Err(CliError::config(
                "at least one [[triplet]] block is required",
            ));
        }
        let geometry = self
            .geometry
            .as_ref()
            .map(|g| -> Result<_, CliError> {
                Ok((g.width_um, g.depth_um))
            })
            .transpose()?;

        self.triplets
            .iter()
            .enumerate()
            .map(|(k, t)| {
                let pump = Self::parse_label(&t.pump, &format!("triplet.{k}.pump"))?;
                let signal = Self::parse_label(&t.signal, &format!("triplet.{k}.signal"))?;
                let idler = Self::parse_label(&t.idler, &format!("triplet.{k}.idler"))?;
                for label in [pump, signal, idler] {
                    provider.model(label).map_err(|e| {
                        CliError::config(format!("triplet.{k}: {e} (not in the dispersion file)"))
                    })?;
                }
                let weight = match (t.weight_re, t.weight_im) {
                    (None, None) => {
                        let (w, d) = geometry.ok_or_else(|| {
                            CliError::config(format!(
                                "triplet.{k} has no explicit weight and no [geometry] section \
                                 is present to compute one"
                            ))
                        })?;
                        let coupling = Complex64::new(
                            t.coupling_re.unwrap_or(1.0),
                            t.coupling_im.unwrap_or(0.0),
                        );
                        let mk = |label| TransverseModeModel::rectangular(label, w, d);
                        overlap_weight(&mk(pump)?, &mk(signal)?, &mk(idler)?, coupling)?
                    }
                    (re, im) => {
                        if t.coupling_re.is_some() || t.coupling_im.is_some() {
                            return Err(CliError::config(format!(
                                "triplet.{k}: give either an explicit weight or a coupling, \
                                 not both"
                            )));
                        }
                        Complex64::new(re.unwrap_or(0.0), im.unwrap_or(0.0))
                    }
                };
                Ok(ModeTriplet::new(pump, signal, idler, weight))
            })
            .collect()
    }

    pub fn build_waveguide(
        &self,
        provider: Arc<DispersionProvider>,
    ) -> Result<WaveguideSpec, CliError> {
        let wgs = Self::require(&self.waveguide, "waveguide")?;
        let labels: Vec<ModeLabel> = provider.mode_labels().collect();
        WaveguideSpec::new(
            wgs.length_mm * 1e-3,
            wgs.qpm_period_um * 1e-6,
            wgs.qpm_order,
            labels,
            provider,
        )
        .map_err(|e| CliError::config(e.to_string()))
    }

    pub fn build_axes(&self) -> Result<(Axis, Axis), CliError> {
        let g = Self::require(&self.grid, "grid")?;
        let signal = Axis::from_wavelength_nm(g.signal_min_nm, g.signal_max_nm, g.signal_samples)
            .map_err(|e| CliError::config(format!("grid signal axis: {e}")))?;
        let idler = Axis::from_wavelength_nm(g.idler_min_nm, g.idler_max_nm, g.idler_samples)
            .map_err(|e| CliError::config(format!("grid idler axis: {e}")))?;
        Ok((signal, idler))
    }

    /// Build the full model bundle used by jsa/rates/scan.
    pub fn build_model(&self, config_dir: &Path) -> Result<ModelBundle, CliError> {
        let provider = self.load_provider(config_dir)?;
        let triplets = self.build_triplets(&provider)?;
        let waveguide = self.build_waveguide(provider)?;
        let pump = self.pump_spec()?;
        let (signal_axis, idler_axis) = self.build_axes()?;
        Ok(ModelBundle {
            waveguide,
            pump,
            triplets,
            signal_axis,
            idler_axis,
        })
    }

    pub fn filter_spec(&self) -> Result<FilterSpec, CliError> {
        let f = &self.filters;
        let shape = match f.trigger_shape.as_str() {
            "gaussian" => TriggerShape::Gaussian,
            "tophat" => TriggerShape::Tophat,
            other => {
                return Err(CliError::config(format!(
                    "filters.trigger_shape must be \"gaussian\" or \"tophat\", got \"{other}\""
                )))
            }
        };
        let spec = FilterSpec {
            trigger_center_nm: f.trigger_center_nm,
            trigger_fwhm_nm: f.trigger_fwhm_nm,
            trigger_shape: shape,
            signal_cutoff_nm: f.signal_cutoff_nm,
            trigger_broadband: f.trigger_broadband,
            signal_broadband: f.signal_broadband,
        };
        spec.validate().map_err(|e| CliError::config(e.to_string()))?;
        Ok(spec)
    }

    pub fn detector_specs(&self) -> Result<(DetectorSpec, DetectorSpec), CliError> {
        let mk = |d: &DetectorSection| -> Result<DetectorSpec, CliError> {
            let spec = DetectorSpec {
                efficiency: d.efficiency,
                dark_hz: d.dark_hz,
            };
            spec.validate().map_err(|e| CliError::config(e.to_string()))?;
            Ok(spec)
        };
        Ok((mk(&self.detectors.trigger)?, mk(&self.detectors.signal)?))
    }

    pub fn trigger_arm(&self) -> Result<TriggerArm, CliError> {
        match self.rates.trigger_arm.as_str() {
            "idler" => Ok(TriggerArm::Idler),
            "signal" => Ok(TriggerArm::Signal),
            other => Err(CliError::config(format!(
                "rates.trigger_arm must be \"idler\" or \"signal\", got \"{other}\""
            ))),
        }
    }

    pub fn accidental_model(&self) -> Result<AccidentalModel, CliError> {
        match self.rates.accidental_model.as_str() {
            "cw" => Ok(AccidentalModel::Cw),
            "pulsed" => {
                let rep = self.rates.rep_rate_hz.ok_or_else(|| {
                    CliError::config(
                        "rates.rep_rate_hz is required when accidental_model = \"pulsed\"",
                    )
                })?;
                Ok(AccidentalModel::Pulsed { rep_rate_hz: rep })
            }
            other => Err(CliError::config(format!(
                "rates.accidental_model must be \"cw\" or \"pulsed\", got \"{other}\""
            ))),
        }
    }

    pub fn coincidence_window_s(&self) -> f64 {
        self.rates.coincidence_window_ns * 1e-9
    }

    pub fn pair_rate_hz(&self) -> Result<f64, CliError> {
        self.rates.pair_rate_hz.ok_or_else(|| {
            CliError::config("rates.pair_rate_hz is required for this command")
        })
    }

    pub fn locus_scan(&self) -> Result<LocusScan, CliError> {
        let l = Self::require(&self.locus, "locus")?;
        if !(l.signal_min_nm > 0.0 && l.signal_max_nm > l.signal_min_nm) {
            return Err(CliError::config(
                "locus signal wavelength range must be positive and ordered",
            ));
        }
        if !(l.idler_min_nm > 0.0 && l.idler_max_nm > l.idler_min_nm) {
            return Err(CliError::config(
                "locus idler wavelength range must be positive and ordered",
            ));
        }
        Ok(LocusScan {
            omega_s_min: omega_from_lambda_nm(l.signal_max_nm),
            omega_s_max: omega_from_lambda_nm(l.signal_min_nm),
            omega_s_samples: l.samples,
            omega_i_min: omega_from_lambda_nm(l.idler_max_nm),
            omega_i_max: omega_from_lambda_nm(l.idler_min_nm),
            bracket_steps: l.bracket_steps,
            tolerance_rad_m: l.tolerance_rad_m,
        })
    }

    pub fn scan_section(&self) -> Result<&ScanSection, CliError> {
        let s = Self::require(&self.scan, "scan")?;
        if s.center_nm.is_empty() || s.fwhm_nm.is_empty() {
            return Err(CliError::config(
                "scan.center_nm and scan.fwhm_nm must be non-empty",
            ));
        }
        Ok(s)
    }

    pub fn design_section(&self) -> Result<&DesignSection, CliError> {
        Self::require(&self.design, "design")
    }
}
