//! Artifact writers. Every float is serialized as a fixed 17-significant-
//! digit decimal (`{:.16e}`), in both CSV and JSON, so identical inputs
//! produce byte-identical files regardless of thread count or platform
//! libm differences in printing. Field and column orders are fixed and
//! documented in the README.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::ser::Formatter;

use wgspdc::grid::{Axis, JsaGrid, JsiGrid};
use wgspdc::phasematching::LocusResult;

use crate::error::CliError;

/// 17-significant-digit scientific notation; round-trips any f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// serde_json formatter that prints every float via [`fmt_f64`].
struct SciFormatter;

impl Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        writer.write_all(format!("{value:.8e}").as_bytes())
    }
}

/// Serialize `value` as JSON to `path` with the fixed float format.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(&display(path), e))?;
    let mut writer = BufWriter::new(file);
    let mut ser = serde_json::Serializer::with_formatter(&mut writer, SciFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| CliError::Io(format!("{}: {e}", display(path))))?;
    writer
        .write_all(b"\n")
        .and_then(|_| writer.flush())
        .map_err(|e| CliError::io(&display(path), e))?;
    Ok(())
}

pub fn create_text(path: &Path) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(
        File::create(path).map_err(|e| CliError::io(&display(path), e))?,
    ))
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

fn join_f64(values: impl IntoIterator<Item = f64>) -> String {
    values
        .into_iter()
        .map(fmt_f64)
        .collect::<Vec<_>>()
        .join(",")
}

/// Matrix CSV layout shared by JSI and JSA component files:
/// two idler header rows (ω then λ), a column-label row, then one row per
/// signal sample: `omega_s,lambda_s,v0,v1,...`.
fn write_grid_csv<F: Fn(usize, usize) -> f64>(
    path: &Path,
    signal: &Axis,
    idler: &Axis,
    value_at: F,
) -> Result<(), CliError> {
    let mut w = create_text(path)?;
    let io_err = |e: std::io::Error| CliError::io(&display(path), e);
    writeln!(w, "idler_omega_rad_s,,{}", join_f64(idler.samples().iter().copied()))
        .map_err(io_err)?;
    writeln!(w, "idler_lambda_nm,,{}", join_f64(idler.wavelengths_nm())).map_err(io_err)?;
    writeln!(w, "signal_omega_rad_s,signal_lambda_nm,values").map_err(io_err)?;
    let signal_nm = signal.wavelengths_nm();
    for (is, (&ws, &ls)) in signal.samples().iter().zip(&signal_nm).enumerate() {
        let row = join_f64((0..idler.len()).map(|ii| value_at(is, ii)));
        writeln!(w, "{},{},{}", fmt_f64(ws), fmt_f64(ls), row).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn write_jsi_csv(path: &Path, grid: &JsiGrid) -> Result<(), CliError> {
    write_grid_csv(path, grid.signal_axis(), grid.idler_axis(), |is, ii| {
        *grid.value(is, ii)
    })
}

/// Complex grids export as a pair of real matrices.
pub fn write_jsa_csv(stem: &Path, grid: &JsaGrid) -> Result<(PathBuf, PathBuf), CliError> {
    let re_path = stem.with_extension("re.csv");
    let im_path = stem.with_extension("im.csv");
    write_grid_csv(&re_path, grid.signal_axis(), grid.idler_axis(), |is, ii| {
        grid.value(is, ii).re
    })?;
    write_grid_csv(&im_path, grid.signal_axis(), grid.idler_axis(), |is, ii| {
        grid.value(is, ii).im
    })?;
    Ok((re_path, im_path))
}

pub fn write_locus_csv(path: &Path, locus: &LocusResult) -> Result<(), CliError> {
    let mut w = create_text(path)?;
    let io_err = |e: std::io::Error| CliError::io(&display(path), e);
    writeln!(
        w,
        "signal_omega_rad_s,signal_lambda_nm,idler_omega_rad_s,idler_lambda_nm,delta_k_rad_m"
    )
    .map_err(io_err)?;
    for p in &locus.points {
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt_f64(p.omega_s),
            fmt_f64(wgspdc::constants::lambda_nm_from_omega(p.omega_s)),
            fmt_f64(p.omega_i),
            fmt_f64(wgspdc::constants::lambda_nm_from_omega(p.omega_i)),
            fmt_f64(p.residual_rad_m),
        )
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

// ---------------------------------------------------------------------
// JSON artifact schemas (field order is the declaration order).
// ---------------------------------------------------------------------

#[derive(Serialize)]
pub struct WaveguideMeta {
    pub length_m: f64,
    pub qpm_period_m: f64,
    pub qpm_order: u32,
    pub modes: Vec<String>,
    pub dispersion_source: String,
}

#[derive(Serialize)]
pub struct PumpMeta {
    pub center_nm: f64,
    pub fwhm_nm: f64,
    pub shape: &'static str,
}

#[derive(Serialize)]
pub struct TripletMeta {
    pub pump: String,
    pub signal: String,
    pub idler: String,
    pub weight_re: f64,
    pub weight_im: f64,
}

#[derive(Serialize)]
pub struct AxisMeta {
    pub samples: usize,
    pub omega_rad_s: Vec<f64>,
    pub lambda_nm: Vec<f64>,
}

impl AxisMeta {
    pub fn new(axis: &Axis) -> Self {
        Self {
            samples: axis.len(),
            omega_rad_s: axis.samples().to_vec(),
            lambda_nm: axis.wavelengths_nm(),
        }
    }
}

#[derive(Serialize)]
pub struct GridJson {
    pub kind: &'static str,
    pub waveguide: WaveguideMeta,
    pub pump: PumpMeta,
    /// Absent on the total grid, which sums all triplets.
    pub triplet: Option<TripletMeta>,
    pub signal_axis: AxisMeta,
    pub idler_axis: AxisMeta,
    /// JSI payload: rows over the signal axis.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<Vec<f64>>>,
    /// JSA payload: real and imaginary parts, rows over the signal axis.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values_re: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values_im: Option<Vec<Vec<f64>>>,
}

pub fn jsi_rows(grid: &JsiGrid) -> Vec<Vec<f64>> {
    grid.rows().map(|r| r.to_vec()).collect()
}

pub fn jsa_rows(grid: &JsaGrid) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    (
        grid.rows().map(|r| r.iter().map(|v| v.re).collect()).collect(),
        grid.rows().map(|r| r.iter().map(|v| v.im).collect()).collect(),
    )
}

#[derive(Serialize)]
pub struct LocusPointJson {
    pub signal_omega_rad_s: f64,
    pub signal_lambda_nm: f64,
    pub idler_omega_rad_s: f64,
    pub idler_lambda_nm: f64,
    pub delta_k_rad_m: f64,
}

#[derive(Serialize)]
pub struct LocusSkipJson {
    pub signal_omega_rad_s: f64,
    pub reason: String,
}

#[derive(Serialize)]
pub struct LocusJson {
    pub triplet: TripletMeta,
    pub tolerance_rad_m: f64,
    pub points: Vec<LocusPointJson>,
    pub skipped: Vec<LocusSkipJson>,
}

#[derive(Serialize)]
pub struct RateReportJson {
    pub r_s_hz: f64,
    pub r_t_hz: f64,
    pub r_c_hz: f64,
    pub r_acc_hz: f64,
    pub ratio_raw: f64,
    pub ratio_corrected: f64,
}

impl From<&wgspdc::RateReport> for RateReportJson {
    fn from(r: &wgspdc::RateReport) -> Self {
        Self {
            r_s_hz: r.r_s_hz,
            r_t_hz: r.r_t_hz,
            r_c_hz: r.r_c_hz,
            r_acc_hz: r.r_acc_hz,
            ratio_raw: r.ratio_raw,
            ratio_corrected: r.ratio_corrected,
        }
    }
}

#[derive(Serialize)]
pub struct RatesJson {
    pub pair_rate_hz: f64,
    pub coincidence_window_s: f64,
    pub trigger_arm: &'static str,
    pub accidental_model: String,
    pub report: RateReportJson,
}

#[derive(Serialize)]
pub struct ReducedRowJson {
    pub lambda_nm: f64,
    pub r_s_hz: f64,
    pub r_t_hz: f64,
    pub r_c_hz: f64,
    pub r_acc_hz: f64,
    pub ratio_raw_pct: f64,
    pub ratio_corrected_pct: f64,
    pub sigma_r_s_hz: f64,
    pub sigma_r_t_hz: f64,
    pub sigma_r_c_hz: f64,
    pub sigma_ratio_raw_pct: f64,
}

#[derive(Serialize)]
pub struct ReduceJson {
    pub coincidence_window_s: f64,
    pub counting_interval_s: f64,
    pub rows: Vec<ReducedRowJson>,
}

#[derive(Serialize)]
pub struct DesignPeriodJson {
    pub pump_nm: f64,
    pub signal_nm: f64,
    pub idler_nm: f64,
    pub qpm_order: u32,
    pub triplet: TripletMeta,
    pub period_um: f64,
    pub period_m: f64,
    /// Δk at the design point when the returned period is applied.
    pub residual_rad_m: f64,
}

#[derive(Serialize)]
pub struct IsolationJson {
    pub center_nm: f64,
    pub fwhm_nm: f64,
    pub isolation: f64,
    pub dominant_triplet: String,
    pub tied: bool,
    pub masses: Vec<MassJson>,
}

#[derive(Serialize)]
pub struct MassJson {
    pub triplet: String,
    pub mass: f64,
}

#[derive(Serialize)]
pub struct ScanJson {
    pub reports: Vec<IsolationJson>,
}
