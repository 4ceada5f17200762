//! Subcommand implementations. Each writes its artifacts under the output
//! directory and prints a one-line summary per file written.

use std::path::{Path, PathBuf};

use wgspdc::constants::lambda_nm_from_omega;
use wgspdc::design::scan_pump;
use wgspdc::detection::{parse_measured_csv, predict_rates, reduce_measured, TriggerArm};
use wgspdc::jsa::{compute_jsa, decompose};
use wgspdc::phasematching::{phase_mismatch, pm_locus, qpm_period_for, WaveguideSpec};

use crate::config::{OutputFormat, RawConfig};
use crate::error::CliError;
use crate::export::{self, fmt_f64};

pub struct Context<'a> {
    pub config: &'a RawConfig,
    pub config_dir: &'a Path,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
}

impl Context<'_> {
    fn ensure_out_dir(&self) -> Result<(), CliError> {
        std::fs::create_dir_all(&self.out_dir)
            .map_err(|e| CliError::io(&self.out_dir.display().to_string(), e))
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

fn note(path: &Path) {
    println!("wrote {}", path.display());
}

fn waveguide_meta(wg: &WaveguideSpec) -> export::WaveguideMeta {
    export::WaveguideMeta {
        length_m: wg.length_m(),
        qpm_period_m: wg.qpm_period_m(),
        qpm_order: wg.qpm_order(),
        modes: wg.mode_labels().iter().map(|l| l.to_string()).collect(),
        dispersion_source: wg.dispersion().metadata().to_string(),
    }
}

fn pump_meta(pump: &wgspdc::PumpSpec) -> export::PumpMeta {
    export::PumpMeta {
        center_nm: pump.center_um() * 1e3,
        fwhm_nm: pump.fwhm_um() * 1e3,
        shape: "gaussian",
    }
}

fn triplet_meta(t: &wgspdc::ModeTriplet) -> export::TripletMeta {
    export::TripletMeta {
        pump: t.pump_mode.to_string(),
        signal: t.signal_mode.to_string(),
        idler: t.idler_mode.to_string(),
        weight_re: t.weight.re,
        weight_im: t.weight.im,
    }
}

/// `jsa`: per-triplet complex JSA and JSI grids plus the incoherent total.
pub fn run_jsa(ctx: &Context) -> Result<(), CliError> {
    let model = ctx.config.build_model(ctx.config_dir)?;
    ctx.ensure_out_dir()?;

    let dec = decompose(
        &model.waveguide,
        &model.triplets,
        &model.pump,
        &model.signal_axis,
        &model.idler_axis,
    )?;

    for (k, (t, component)) in model.triplets.iter().zip(&dec.components).enumerate() {
        let amplitude = compute_jsa(
            &model.waveguide,
            t,
            &model.pump,
            &model.signal_axis,
            &model.idler_axis,
        )?;
        let stem = format!("jsa_t{k}_{}", t.id());
        if ctx.format.csv() {
            let (re_path, im_path) = export::write_jsa_csv(&ctx.path(&stem), &amplitude)?;
            note(&re_path);
            note(&im_path);
            let jsi_path = ctx.path(&format!("jsi_t{k}_{}.csv", t.id()));
            export::write_jsi_csv(&jsi_path, &component.jsi)?;
            note(&jsi_path);
        }
        if ctx.format.json() {
            let (values_re, values_im) = export::jsa_rows(&amplitude);
            let json = export::GridJson {
                kind: "jsa",
                waveguide: waveguide_meta(&model.waveguide),
                pump: pump_meta(&model.pump),
                triplet: Some(triplet_meta(t)),
                signal_axis: export::AxisMeta::new(&model.signal_axis),
                idler_axis: export::AxisMeta::new(&model.idler_axis),
                values: None,
                values_re: Some(values_re),
                values_im: Some(values_im),
            };
            let path = ctx.path(&format!("{stem}.json"));
            export::write_json(&path, &json)?;
            note(&path);
        }
    }

    if ctx.format.csv() {
        let path = ctx.path("jsi_total.csv");
        export::write_jsi_csv(&path, &dec.total)?;
        note(&path);
    }
    if ctx.format.json() {
        let json = export::GridJson {
            kind: "jsi",
            waveguide: waveguide_meta(&model.waveguide),
            pump: pump_meta(&model.pump),
            triplet: None,
            signal_axis: export::AxisMeta::new(&model.signal_axis),
            idler_axis: export::AxisMeta::new(&model.idler_axis),
            values: Some(export::jsi_rows(&dec.total)),
            values_re: None,
            values_im: None,
        };
        let path = ctx.path("jsi_total.json");
        export::write_json(&path, &json)?;
        note(&path);
    }

    println!("total JSI mass {}", fmt_f64(dec.total.mass()));
    Ok(())
}

/// `locus`: Δk = 0 curves per triplet.
pub fn run_locus(ctx: &Context) -> Result<(), CliError> {
    let provider = ctx.config.load_provider(ctx.config_dir)?;
    let triplets = ctx.config.build_triplets(&provider)?;
    let waveguide = ctx.config.build_waveguide(provider)?;
    let scan = ctx.config.locus_scan()?;
    ctx.ensure_out_dir()?;

    for (k, t) in triplets.iter().enumerate() {
        let result = pm_locus(&waveguide, t, &scan)?;
        if ctx.format.csv() {
            let path = ctx.path(&format!("locus_t{k}_{}.csv", t.id()));
            export::write_locus_csv(&path, &result)?;
            note(&path);
        }
        if ctx.format.json() {
            let json = export::LocusJson {
                triplet: triplet_meta(t),
                tolerance_rad_m: scan.tolerance_rad_m,
                points: result
                    .points
                    .iter()
                    .map(|p| export::LocusPointJson {
                        signal_omega_rad_s: p.omega_s,
                        signal_lambda_nm: lambda_nm_from_omega(p.omega_s),
                        idler_omega_rad_s: p.omega_i,
                        idler_lambda_nm: lambda_nm_from_omega(p.omega_i),
                        delta_k_rad_m: p.residual_rad_m,
                    })
                    .collect(),
                skipped: result
                    .skipped
                    .iter()
                    .map(|s| export::LocusSkipJson {
                        signal_omega_rad_s: s.omega_s,
                        reason: s.reason.clone(),
                    })
                    .collect(),
            };
            let path = ctx.path(&format!("locus_t{k}_{}.json", t.id()));
            export::write_json(&path, &json)?;
            note(&path);
        }
        println!(
            "triplet {} locus: {} points, {} skipped",
            t.id(),
            result.points.len(),
            result.skipped.len()
        );
    }
    Ok(())
}

/// `rates`: predicted singles/trigger/coincidence/accidental rates.
pub fn run_rates(ctx: &Context) -> Result<(), CliError> {
    let model = ctx.config.build_model(ctx.config_dir)?;
    let filters = ctx.config.filter_spec()?;
    let (det_t, det_s) = ctx.config.detector_specs()?;
    let arm = ctx.config.trigger_arm()?;
    let accidental = ctx.config.accidental_model()?;
    let pair_rate = ctx.config.pair_rate_hz()?;
    let window = ctx.config.coincidence_window_s();
    ctx.ensure_out_dir()?;

    let dec = decompose(
        &model.waveguide,
        &model.triplets,
        &model.pump,
        &model.signal_axis,
        &model.idler_axis,
    )?;
    let report = predict_rates(&dec, pair_rate, &filters, &det_t, &det_s, window, arm, accidental)?;

    if ctx.format.csv() {
        let path = ctx.path("rates.csv");
        let mut w = export::create_text(&path)?;
        use std::io::Write;
        writeln!(w, "Rs_hz,Rt_hz,Rc_hz,Racc_hz,ratio_raw,ratio_corrected")
            .and_then(|_| {
                writeln!(
                    w,
                    "{},{},{},{},{},{}",
                    fmt_f64(report.r_s_hz),
                    fmt_f64(report.r_t_hz),
                    fmt_f64(report.r_c_hz),
                    fmt_f64(report.r_acc_hz),
                    fmt_f64(report.ratio_raw),
                    fmt_f64(report.ratio_corrected),
                )
            })
            .and_then(|_| w.flush())
            .map_err(|e| CliError::io(&path.display().to_string(), e))?;
        note(&path);
    }
    if ctx.format.json() {
        let json = export::RatesJson {
            pair_rate_hz: pair_rate,
            coincidence_window_s: window,
            trigger_arm: match arm {
                TriggerArm::Idler => "idler",
                TriggerArm::Signal => "signal",
            },
            accidental_model: ctx.config.rates.accidental_model.clone(),
            report: export::RateReportJson::from(&report),
        };
        let path = ctx.path("rates.json");
        export::write_json(&path, &json)?;
        note(&path);
    }

    println!(
        "ratio_raw {} ratio_corrected {}",
        fmt_f64(report.ratio_raw),
        fmt_f64(report.ratio_corrected)
    );
    Ok(())
}

/// `reduce`: accidental-correct a measured-rates table.
pub fn run_reduce(ctx: &Context, rows_path: &Path) -> Result<(), CliError> {
    let window = ctx.config.coincidence_window_s();
    let interval = ctx.config.rates.counting_interval_s;
    let text = std::fs::read_to_string(rows_path)
        .map_err(|e| CliError::io(&rows_path.display().to_string(), e))?;
    let rows = parse_measured_csv(&text)
        .map_err(|e| CliError::data(format!("{}: {e}", rows_path.display())))?;
    let reduced = reduce_measured(&rows, window, interval)?;
    ctx.ensure_out_dir()?;

    if ctx.format.csv() {
        let path = ctx.path("reduce.csv");
        let mut w = export::create_text(&path)?;
        use std::io::Write;
        let io_err = |e: std::io::Error| CliError::io(&path.display().to_string(), e);
        writeln!(
            w,
            "lambda_nm,Rs_hz,Rt_hz,Rc_hz,Racc_hz,ratio_raw_pct,ratio_corrected_pct,\
             sigma_Rs_hz,sigma_Rt_hz,sigma_Rc_hz,sigma_ratio_raw_pct"
        )
        .map_err(io_err)?;
        for r in &reduced {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{}",
                fmt_f64(r.lambda_nm),
                fmt_f64(r.report.r_s_hz),
                fmt_f64(r.report.r_t_hz),
                fmt_f64(r.report.r_c_hz),
                fmt_f64(r.report.r_acc_hz),
                fmt_f64(r.report.ratio_raw * 100.0),
                fmt_f64(r.report.ratio_corrected * 100.0),
                fmt_f64(r.sigma_r_s_hz),
                fmt_f64(r.sigma_r_t_hz),
                fmt_f64(r.sigma_r_c_hz),
                fmt_f64(r.sigma_ratio_raw * 100.0),
            )
            .map_err(io_err)?;
        }
        w.flush().map_err(io_err)?;
        note(&path);
    }
    if ctx.format.json() {
        let json = export::ReduceJson {
            coincidence_window_s: window,
            counting_interval_s: interval,
            rows: reduced
                .iter()
                .map(|r| export::ReducedRowJson {
                    lambda_nm: r.lambda_nm,
                    r_s_hz: r.report.r_s_hz,
                    r_t_hz: r.report.r_t_hz,
                    r_c_hz: r.report.r_c_hz,
                    r_acc_hz: r.report.r_acc_hz,
                    ratio_raw_pct: r.report.ratio_raw * 100.0,
                    ratio_corrected_pct: r.report.ratio_corrected * 100.0,
                    sigma_r_s_hz: r.sigma_r_s_hz,
                    sigma_r_t_hz: r.sigma_r_t_hz,
                    sigma_r_c_hz: r.sigma_r_c_hz,
                    sigma_ratio_raw_pct: r.sigma_ratio_raw * 100.0,
                })
                .collect(),
        };
        let path = ctx.path("reduce.json");
        export::write_json(&path, &json)?;
        note(&path);
    }

    for r in &reduced {
        println!(
            "{} nm: ratio_raw {:.4}% corrected {:.4}%",
            r.lambda_nm,
            r.report.ratio_raw * 100.0,
            r.report.ratio_corrected * 100.0
        );
    }
    Ok(())
}

/// `design-period`: QPM period matching the configured target wavelengths.
pub fn run_design_period(ctx: &Context) -> Result<(), CliError> {
    let provider = ctx.config.load_provider(ctx.config_dir)?;
    let triplets = ctx.config.build_triplets(&provider)?;
    let design = ctx.config.design_section()?;
    let triplet = triplets.get(design.triplet).ok_or_else(|| {
        CliError::config(format!(
            "design.triplet = {} is out of range ({} triplets configured)",
            design.triplet,
            triplets.len()
        ))
    })?;

    let period = qpm_period_for(
        &provider,
        triplet,
        design.pump_nm * 1e-3,
        design.signal_nm * 1e-3,
        design.idler_nm * 1e-3,
        design.order,
    )?;

    // Round-trip residual at the design point with the returned period.
    let labels: Vec<_> = provider.mode_labels().collect();
    let check_wg = WaveguideSpec::new(1e-3, period, design.order, labels, provider.clone())
        .map_err(|e| CliError::data(e.to_string()))?;
    let residual = phase_mismatch(
        &check_wg,
        triplet,
        wgspdc::constants::omega_from_lambda_nm(design.signal_nm),
        wgspdc::constants::omega_from_lambda_nm(design.idler_nm),
    )?;

    ctx.ensure_out_dir()?;
    if ctx.format.csv() {
        let path = ctx.path("design_period.csv");
        let mut w = export::create_text(&path)?;
        use std::io::Write;
        writeln!(w, "period_um,period_m,residual_rad_m")
            .and_then(|_| {
                writeln!(
                    w,
                    "{},{},{}",
                    fmt_f64(period * 1e6),
                    fmt_f64(period),
                    fmt_f64(residual)
                )
            })
            .and_then(|_| w.flush())
            .map_err(|e| CliError::io(&path.display().to_string(), e))?;
        note(&path);
    }
    if ctx.format.json() {
        let json = export::DesignPeriodJson {
            pump_nm: design.pump_nm,
            signal_nm: design.signal_nm,
            idler_nm: design.idler_nm,
            qpm_order: design.order,
            triplet: triplet_meta(triplet),
            period_um: period * 1e6,
            period_m: period,
            residual_rad_m: residual,
        };
        let path = ctx.path("design_period.json");
        export::write_json(&path, &json)?;
        note(&path);
    }

    println!("period {} um (residual {} rad/m)", fmt_f64(period * 1e6), fmt_f64(residual));
    Ok(())
}

/// `scan`: pump center/bandwidth isolation scan.
pub fn run_scan(ctx: &Context) -> Result<(), CliError> {
    let model = ctx.config.build_model(ctx.config_dir)?;
    let scan = ctx.config.scan_section()?;
    ctx.ensure_out_dir()?;

    let reports = scan_pump(
        &model.waveguide,
        &model.triplets,
        &model.pump,
        &scan.center_nm,
        &scan.fwhm_nm,
        &model.signal_axis,
        &model.idler_axis,
    )?;

    let triplet_ids: Vec<String> = model.triplets.iter().map(|t| t.id()).collect();
    if ctx.format.csv() {
        let path = ctx.path("scan.csv");
        let mut w = export::create_text(&path)?;
        use std::io::Write;
        let io_err = |e: std::io::Error| CliError::io(&path.display().to_string(), e);
        let mass_cols: Vec<String> =
            triplet_ids.iter().map(|id| format!("mass_{id}")).collect();
        writeln!(
            w,
            "center_nm,fwhm_nm,isolation,dominant_triplet,{}",
            mass_cols.join(",")
        )
        .map_err(io_err)?;
        for r in &reports {
            let masses = r
                .masses
                .iter()
                .map(|(_, m)| fmt_f64(*m))
                .collect::<Vec<_>>()
                .join(",");
            writeln!(
                w,
                "{},{},{},{},{}",
                fmt_f64(r.pump_center_nm.unwrap_or_default()),
                fmt_f64(r.pump_fwhm_nm.unwrap_or_default()),
                fmt_f64(r.isolation),
                r.dominant_id,
                masses
            )
            .map_err(io_err)?;
        }
        w.flush().map_err(io_err)?;
        note(&path);
    }
    if ctx.format.json() {
        let json = export::ScanJson {
            reports: reports
                .iter()
                .map(|r| export::IsolationJson {
                    center_nm: r.pump_center_nm.unwrap_or_default(),
                    fwhm_nm: r.pump_fwhm_nm.unwrap_or_default(),
                    isolation: r.isolation,
                    dominant_triplet: r.dominant_id.clone(),
                    tied: !r.tied_with.is_empty(),
                    masses: r
                        .masses
                        .iter()
                        .map(|(id, m)| export::MassJson {
                            triplet: id.clone(),
                            mass: *m,
                        })
                        .collect(),
                })
                .collect(),
        };
        let path = ctx.path("scan.json");
        export::write_json(&path, &json)?;
        note(&path);
    }

    let best = reports
        .iter()
        .max_by(|a, b| a.isolation.total_cmp(&b.isolation))
        .expect("scan reports are non-empty");
    println!(
        "best isolation {} at center {} nm fwhm {} nm (dominant {})",
        fmt_f64(best.isolation),
        fmt_f64(best.pump_center_nm.unwrap_or_default()),
        fmt_f64(best.pump_fwhm_nm.unwrap_or_default()),
        best.dominant_id
    );
    Ok(())
}
