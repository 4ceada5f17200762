//! Design-module behavior on the separated-loci synthetic dispersion case:
//! two triplets whose phase-matching ridges sit several pump bandwidths
//! apart along the pump-frequency direction.

use std::sync::Arc;

use num_complex::Complex64;
use wgspdc::constants::omega_from_lambda_um;
use wgspdc::design::{isolation, scan_pump, DesignError};
use wgspdc::dispersion::parse_dispersion_file;
use wgspdc::grid::Axis;
use wgspdc::jsa::decompose;
use wgspdc::phasematching::{pm_locus, qpm_period_for, LocusScan, ModeTriplet, WaveguideSpec};
use wgspdc::pump::PumpSpec;
use wgspdc::ModeLabel;

const DISPERSION: &str = "\
source = synthetic two-mode data
mode = 00
kind = constant
range_um = 0.35 1.25
n = 2.3
offset = 0 0 -0.2

mode = 01
kind = constant
range_um = 0.35 1.25
n = 2.308
offset = 0 0 -0.2
";

fn setup() -> (WaveguideSpec, [ModeTriplet; 2], PumpSpec) {
    let provider = Arc::new(parse_dispersion_file(DISPERSION).unwrap());
    let l00 = ModeLabel::new(0, 0);
    let l01 = ModeLabel::new(0, 1);
    let ta = ModeTriplet::new(l00, l00, l00, Complex64::new(1.0, 0.0));
    let tb = ModeTriplet::new(l00, l01, l01, Complex64::new(1.0, 0.0));
    let period = qpm_period_for(&provider, &ta, 0.418, 0.836, 0.836, 1).unwrap();
    let wg = WaveguideSpec::new(1.3e-3, period, 1, vec![l00, l01], provider).unwrap();
    let pump = PumpSpec::gaussian(0.418, 0.005).unwrap();
    (wg, [ta, tb], pump)
}

fn axes(n: usize) -> Axis {
    Axis::from_wavelength_nm(760.0, 960.0, n).unwrap()
}

#[test]
fn separated_loci_isolate_the_pumped_triplet() {
    let (wg, triplets, pump) = setup();
    let axis = axes(257);
    let dec = decompose(&wg, &triplets, &pump, &axis, &axis).unwrap();
    let report = isolation(&dec).unwrap();
    assert_eq!(report.dominant_id, "00-00-00");
    assert!(report.isolation > 0.99, "isolation = {}", report.isolation);

    // Brute-force mass oracle: re-integrate each component grid with an
    // explicit trapezoid double loop and recompute the fraction.
    let brute: Vec<f64> = dec
        .components
        .iter()
        .map(|c| {
            let ns = c.jsi.signal_axis().len();
            let ni = c.jsi.idler_axis().len();
            let mut acc = 0.0;
            for is in 0..ns {
                for ii in 0..ni {
                    let mut w = 1.0;
                    if is == 0 || is == ns - 1 {
                        w *= 0.5;
                    }
                    if ii == 0 || ii == ni - 1 {
                        w *= 0.5;
                    }
                    acc += w * c.jsi.value(is, ii);
                }
            }
            acc * c.jsi.signal_axis().step() * c.jsi.idler_axis().step()
        })
        .collect();
    let brute_isolation = brute[0] / (brute[0] + brute[1]);
    assert!(
        (report.isolation - brute_isolation).abs() <= 1e-10 * brute_isolation,
        "{} vs brute {}",
        report.isolation,
        brute_isolation
    );
}

#[test]
fn scan_matches_direct_isolation_calls() {
    let (wg, triplets, pump) = setup();
    let axis = axes(129);
    let centers = [418.0, 447.0];
    let fwhms = [10.0, 5.0];
    let reports = scan_pump(&wg, &triplets, &pump, &centers, &fwhms, &axis, &axis).unwrap();
    assert_eq!(reports.len(), 4);

    // Row-major over centers then fwhms, and bit-equal to direct calls.
    let mut k = 0;
    for &c in &centers {
        for &f in &fwhms {
            let report = &reports[k];
            assert_eq!(report.pump_center_nm, Some(c));
            assert_eq!(report.pump_fwhm_nm, Some(f));
            let direct_pump = PumpSpec::gaussian(c * 1e-3, f * 1e-3).unwrap();
            let dec = decompose(&wg, &triplets, &direct_pump, &axis, &axis).unwrap();
            let direct = isolation(&dec).unwrap();
            assert_eq!(report.isolation, direct.isolation);
            assert_eq!(report.dominant, direct.dominant);
            k += 1;
        }
    }
}

#[test]
fn singleton_scan_equals_direct_call() {
    let (wg, triplets, pump) = setup();
    let axis = axes(129);
    let reports =
        scan_pump(&wg, &triplets, &pump, &[418.0], &[5.0], &axis, &axis).unwrap();
    assert_eq!(reports.len(), 1);
    let dec = decompose(&wg, &triplets, &pump, &axis, &axis).unwrap();
    let direct = isolation(&dec).unwrap();
    assert_eq!(reports[0].isolation, direct.isolation);
}

#[test]
fn empty_scan_lists_are_errors() {
    let (wg, triplets, pump) = setup();
    let axis = axes(65);
    assert!(matches!(
        scan_pump(&wg, &triplets, &pump, &[418.0], &[], &axis, &axis),
        Err(DesignError::EmptyScan)
    ));
    assert!(matches!(
        scan_pump(&wg, &triplets, &pump, &[], &[5.0], &axis, &axis),
        Err(DesignError::EmptyScan)
    ));
}

#[test]
fn narrowing_the_pump_never_hurts_isolation() {
    let (wg, triplets, pump) = setup();
    let axis = axes(321);
    let fwhms = [40.0, 30.0, 20.0, 15.0, 10.0, 8.0, 5.0, 3.0, 2.0];
    let reports =
        scan_pump(&wg, &triplets, &pump, &[418.0], &fwhms, &axis, &axis).unwrap();
    for pair in reports.windows(2) {
        assert!(
            pair[1].isolation >= pair[0].isolation,
            "isolation dropped from {} (fwhm {:?}) to {} (fwhm {:?})",
            pair[0].isolation,
            pair[0].pump_fwhm_nm,
            pair[1].isolation,
            pair[1].pump_fwhm_nm
        );
    }
}

#[test]
fn dominant_triplet_stable_under_grid_refinement() {
    let (wg, triplets, pump) = setup();
    let coarse = isolation(&decompose(&wg, &triplets, &pump, &axes(129), &axes(129)).unwrap())
        .unwrap();
    let fine = isolation(&decompose(&wg, &triplets, &pump, &axes(257), &axes(257)).unwrap())
        .unwrap();
    assert_eq!(coarse.dominant_id, fine.dominant_id);
    assert!((coarse.isolation - fine.isolation).abs() < 1e-3);
}

#[test]
fn weight_scale_invariance_of_isolation() {
    let (wg, triplets, pump) = setup();
    let axis = axes(129);
    let scaled: Vec<ModeTriplet> = triplets
        .iter()
        .map(|t| ModeTriplet::new(t.pump_mode, t.signal_mode, t.idler_mode, t.weight * 3.7))
        .collect();
    let a = isolation(&decompose(&wg, &triplets, &pump, &axis, &axis).unwrap()).unwrap();
    let b = isolation(&decompose(&wg, &scaled, &pump, &axis, &axis).unwrap()).unwrap();
    assert!((a.isolation - b.isolation).abs() <= 1e-12);
    assert_eq!(a.dominant, b.dominant);
}

#[test]
fn loci_of_the_two_triplets_are_far_apart() {
    let (wg, triplets, _) = setup();
    let scan = LocusScan {
        omega_s_min: omega_from_lambda_um(0.95),
        omega_s_max: omega_from_lambda_um(0.76),
        omega_s_samples: 41,
        omega_i_min: omega_from_lambda_um(1.05),
        omega_i_max: omega_from_lambda_um(0.70),
        bracket_steps: 600,
        tolerance_rad_m: 1e-6,
    };
    let a = pm_locus(&wg, &triplets[0], &scan).unwrap();
    let b = pm_locus(&wg, &triplets[1], &scan).unwrap();
    assert!(!a.points.is_empty() && !b.points.is_empty());

    // Verify every returned point against phase_mismatch directly.
    for (t, r) in triplets.iter().zip([&a, &b]) {
        for p in &r.points {
            let dk = wgspdc::phase_mismatch(&wg, t, p.omega_s, p.omega_i).unwrap();
            assert!(dk.abs() <= 1e-6, "residual {dk}");
        }
    }

    // The pump-frequency gap between the two curves is several pump
    // bandwidths (Δω ≈ 5.39e13 rad/s for 418/5 nm).
    let min_a = a.points.iter().map(|p| p.omega_s + p.omega_i).fold(f64::INFINITY, f64::min);
    let max_b = b.points.iter().map(|p| p.omega_s + p.omega_i).fold(f64::NEG_INFINITY, f64::max);
    let pump_bw = wgspdc::bandwidth_to_omega(0.418, 0.005);
    assert!(
        min_a - max_b >= 3.0 * pump_bw,
        "gap {} rad/s is below 3 pump bandwidths",
        min_a - max_b
    );
}
