//! One function per CLI subcommand, all writing into a tracked artifact set.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use geospin::analysis::{
    allan_deviation, amplitude_spectrum, campaign_sensitivity, exclusion_curve, PeakConfig, Window,
};
use geospin::comag::{extract_pseudofield, forward_model, noise_budget, xe129, xe131};
use geospin::earth_source::{build_grid, total_polarized_spins, GridResolution, PolarizationSign};
use geospin::orbit::{parse_tle, propagate_circular};
use geospin::ssvi::{integrate_field, normal_power_fraction, FieldSample, InteractionKernel, KernelRegistry};
use geospin::{
    Error as CoreError, FieldSeries64, GaussCoefficients64, OrbitStateSeries64, RadialProfile64,
    SensorConfig64, SpinSourceGrid64, TwoLineElement64, Vec64,
};

use crate::artifacts::{csv_table, parse_csv, svg_line_plot, ArtifactSet};
use crate::config::PipelineConfig;
use crate::CliError;

/// Classify core errors for exit codes: I/O, numeric-domain, or input/config.
fn core_err(module: &str, e: CoreError) -> CliError {
    match e {
        CoreError::Io(inner) => CliError::Io(format!("{module}: {inner}")),
        CoreError::Domain(_) | CoreError::Singularity { .. } => {
            CliError::Numeric(format!("{module}: {e}"))
        }
        other => CliError::Config(format!("{module}: {other}")),
    }
}

fn load_coefficients(cfg: &PipelineConfig) -> Result<GaussCoefficients64, CliError> {
    let f = File::open(&cfg.paths.wmm_coefficients).map_err(|e| {
        CliError::Io(format!(
            "cannot open {}: {e}",
            cfg.paths.wmm_coefficients.display()
        ))
    })?;
    GaussCoefficients64::from_reader(BufReader::new(f)).map_err(|e| core_err("geomag", e))
}

fn load_profile(cfg: &PipelineConfig) -> Result<RadialProfile64, CliError> {
    let f = File::open(&cfg.paths.earth_profile).map_err(|e| {
        CliError::Io(format!(
            "cannot open {}: {e}",
            cfg.paths.earth_profile.display()
        ))
    })?;
    RadialProfile64::from_csv_reader(BufReader::new(f)).map_err(|e| core_err("earth-source", e))
}

fn load_tle(cfg: &PipelineConfig) -> Result<TwoLineElement64, CliError> {
    let text = std::fs::read_to_string(&cfg.paths.tle)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", cfg.paths.tle.display())))?;
    parse_tle(&text).map_err(|e| core_err("orbit", e))
}

/// Propagate the configured window; `start_s` shifts the window along the
/// orbit by dropping leading samples (sample times stay epoch-referenced).
fn build_orbit(cfg: &PipelineConfig, tle: &TwoLineElement64) -> Result<OrbitStateSeries64, CliError> {
    let total = cfg.window.start_s + cfg.duration_s();
    let mut orbit =
        propagate_circular(tle, total, cfg.window.dt_s).map_err(|e| core_err("orbit", e))?;
    let skip = (cfg.window.start_s / cfg.window.dt_s).round() as usize;
    if skip > 0 {
        orbit.samples.drain(..skip.min(orbit.samples.len()));
    }
    if orbit.samples.len() < 2 {
        return Err(CliError::Config(
            "window leaves fewer than two orbit samples".into(),
        ));
    }
    Ok(orbit)
}

fn build_source(
    cfg: &PipelineConfig,
    coeffs: &GaussCoefficients64,
    profile: &RadialProfile64,
) -> Result<SpinSourceGrid64, CliError> {
    let sign = if cfg.grid.parallel_polarization {
        PolarizationSign::Parallel
    } else {
        PolarizationSign::AntiParallel
    };
    build_grid(
        profile,
        coeffs,
        GridResolution::new(cfg.grid.n_r, cfg.grid.n_theta, cfg.grid.n_phi),
        (cfg.grid.r_min_m, cfg.grid.r_max_m),
        sign,
    )
    .map_err(|e| core_err("earth-source", e))
}

fn make_kernel(cfg: &PipelineConfig, coupling: f64, lambda: f64) -> Result<InteractionKernel<f64>, CliError> {
    if cfg.kernel.kind != "vs" {
        // Resolve through the registry purely to produce the canonical
        // unregistered-kernel error for reserved names.
        let reg = KernelRegistry::<f64>::new();
        reg.resolve(&cfg.kernel.kind)
            .map_err(|e| core_err("interaction", e))?;
    }
    InteractionKernel::spin_velocity(coupling, lambda).map_err(|e| core_err("interaction", e))
}

fn sensor_config(cfg: &PipelineConfig, axis: Vec64) -> SensorConfig64 {
    SensorConfig64 {
        bias_field: cfg.sensor.bias_field_t,
        sensitive_axis: axis,
        shield_factor: cfg.sensor.shield_factor,
        calibration_error: cfg.sensor.calibration_error,
        gyro_noise: cfg.sensor.gyro_noise_deg_s.to_radians(),
        laser_coefficient: cfg.sensor.laser_coefficient_t_per_ppm,
        laser_stability_ppm: cfg.sensor.laser_stability_ppm,
        shot_sensitivity: cfg.sensor.shot_sensitivity_t,
        rng_seed: cfg.rng_seed,
    }
}

/// Raw geomagnetic vector along the orbit, inertial axes, tesla.
fn ambient_along_orbit(
    coeffs: &GaussCoefficients64,
    orbit: &OrbitStateSeries64,
) -> Result<Vec<Vec64>, CliError> {
    let c = geospin::Constants64::get();
    orbit
        .samples
        .iter()
        .map(|s| {
            let b_ecef = coeffs
                .evaluate_field_cartesian(s.pos_ecef, coeffs.max_degree)
                .map_err(|e| core_err("geomag", e))?;
            Ok(b_ecef.rotated_z(c.omega_earth * s.t))
        })
        .collect()
}

const FIELD_CSV: &str = "field_series.csv";
const EXTRACTED_CSV: &str = "extracted_field.csv";

pub fn simulate_field(cfg: &PipelineConfig, out: &mut ArtifactSet) -> Result<(), CliError> {
    let coeffs = load_coefficients(cfg)?;
    let profile = load_profile(cfg)?;
    let tle = load_tle(cfg)?;
    let grid = build_source(cfg, &coeffs, &profile)?;
    let orbit = build_orbit(cfg, &tle)?;
    let kernel = make_kernel(cfg, cfg.kernel.coupling, cfg.kernel.lambda_m)?;

    let series = integrate_field(&grid, &orbit, &kernel).map_err(|e| core_err("interaction", e))?;
    let fraction = normal_power_fraction(&series, &orbit).map_err(|e| core_err("interaction", e))?;

    let peak = series
        .samples
        .iter()
        .map(|s| s.projection.abs())
        .fold(0.0_f64, f64::max);
    let rms = (series
        .samples
        .iter()
        .map(|s| s.projection * s.projection)
        .sum::<f64>()
        / series.samples.len() as f64)
        .sqrt();
    let spins = total_polarized_spins(&grid);

    out.write(
        FIELD_CSV,
        &csv_table(
            "t_s,bx_eci_t,by_eci_t,bz_eci_t,b_normal_t",
            series
                .samples
                .iter()
                .map(|s| vec![s.t, s.b_eci.x, s.b_eci.y, s.b_eci.z, s.projection]),
        ),
    )?;
    if cfg.grid.export_cells {
        out.write(
            "source_grid.csv",
            &csv_table(
                "x_m,y_m,z_m,volume_m3,density_per_m3,px,py,pz",
                grid.cells.iter().map(|c| {
                    vec![
                        c.center.x,
                        c.center.y,
                        c.center.z,
                        c.volume,
                        c.density,
                        c.polarization.x,
                        c.polarization.y,
                        c.polarization.z,
                    ]
                }),
            ),
        )?;
    }
    let summary = serde_json::json!({
        "samples": series.samples.len(),
        "dt_s": series.dt,
        "duration_s": series.samples.len() as f64 * series.dt,
        "coupling": cfg.kernel.coupling,
        "lambda_m": json_float(cfg.kernel.lambda_m),
        "peak_normal_projection_t": peak,
        "rms_normal_projection_t": rms,
        "normal_power_fraction": fraction,
        "total_polarized_spins": spins,
        "grid_cells": grid.cells.len(),
        "orbit_radius_m": orbit.radius,
        "orbit_period_s": std::f64::consts::TAU / orbit.angular_rate,
    });
    out.write("field_summary.json", &to_json(&summary)?)?;
    let (ts, ps): (Vec<f64>, Vec<f64>) = series
        .samples
        .iter()
        .map(|s| (s.t, s.projection))
        .unzip();
    out.write(
        "field_projection.svg",
        &svg_line_plot(
            "Orbit-normal pseudomagnetic field",
            "t [s]",
            "B_normal [T]",
            &ts,
            &ps,
            false,
        ),
    )?;
    Ok(())
}

pub fn simulate_sensor(cfg: &PipelineConfig, out: &mut ArtifactSet) -> Result<(), CliError> {
    let coeffs = load_coefficients(cfg)?;
    let tle = load_tle(cfg)?;
    let orbit = build_orbit(cfg, &tle)?;

    let field_path = out.path(FIELD_CSV);
    let series = read_field_series(&field_path, &orbit)?;
    let ambient = ambient_along_orbit(&coeffs, &orbit)?;
    let rotation = vec![cfg.sensor.platform_rotation_rad_s; series.samples.len()];
    let sensor = sensor_config(cfg, series.projection_axis);

    let record = forward_model(&series, &ambient, &rotation, &sensor, (xe129(), xe131()))
        .map_err(|e| core_err("comagnetometer", e))?;
    let extracted = extract_pseudofield(&record, (xe129(), xe131()), &sensor)
        .map_err(|e| core_err("comagnetometer", e))?;

    out.write(
        "precession.csv",
        &csv_table(
            "t_s,omega1_rad_s,omega2_rad_s,omega_rot_true_rad_s,omega_rot_meas_rad_s,b_gmf_applied_t",
            record.samples.iter().map(|s| {
                vec![
                    s.t,
                    s.omega_1,
                    s.omega_2,
                    s.omega_rot_true,
                    s.omega_rot_measured,
                    s.b_gmf_applied,
                ]
            }),
        ),
    )?;
    out.write(
        EXTRACTED_CSV,
        &csv_table(
            "t_s,b_extracted_t",
            record
                .samples
                .iter()
                .zip(&extracted)
                .map(|(s, &b)| vec![s.t, b]),
        ),
    )?;
    // Residual against the injected projection: quantifies everything the
    // inversion does not cancel (noise, leakage, calibration error).
    let n = extracted.len() as f64;
    let mean_residual = series
        .samples
        .iter()
        .zip(&extracted)
        .map(|(s, &b)| b - s.projection)
        .sum::<f64>()
        / n;
    let rms_residual = (series
        .samples
        .iter()
        .zip(&extracted)
        .map(|(s, &b)| (b - s.projection - mean_residual).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    let peak_ambient = ambient.iter().map(|b| b.norm()).fold(0.0_f64, f64::max);
    let summary = serde_json::json!({
        "samples": extracted.len(),
        "dt_s": series.dt,
        "omega1_sign": record.convention.omega_1_sign,
        "omega2_sign": record.convention.omega_2_sign,
        "peak_ambient_t": peak_ambient,
        "mean_extraction_offset_t": mean_residual,
        "rms_extraction_residual_t": rms_residual,
    });
    out.write("sensor_summary.json", &to_json(&summary)?)?;
    let ts: Vec<f64> = record.samples.iter().map(|s| s.t).collect();
    out.write(
        "extracted_field.svg",
        &svg_line_plot(
            "Extracted pseudomagnetic field",
            "t [s]",
            "B_extracted [T]",
            &ts,
            &extracted,
            false,
        ),
    )?;
    Ok(())
}

/// Load the series the analysis commands operate on.
fn analysis_series(cfg: &PipelineConfig, out: &ArtifactSet) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let (name, column) = match cfg.analysis.source.as_str() {
        "field" => (FIELD_CSV, "b_normal_t"),
        _ => (EXTRACTED_CSV, "b_extracted_t"),
    };
    let path = out.path(name);
    if !path.is_file() {
        return Err(CliError::Io(format!(
            "{} not found; run the producing simulation command first",
            path.display()
        )));
    }
    let (header, rows) = parse_csv(&path)?;
    let t_idx = column_index(&header, "t_s", &path)?;
    let v_idx = column_index(&header, column, &path)?;
    Ok(rows
        .iter()
        .map(|r| (r[t_idx], r[v_idx]))
        .unzip())
}

fn column_index(header: &[String], name: &str, path: &Path) -> Result<usize, CliError> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| CliError::Io(format!("{}: missing column {name}", path.display())))
}

pub fn spectrum(cfg: &PipelineConfig, out: &mut ArtifactSet) -> Result<(), CliError> {
    let tle = load_tle(cfg)?;
    let (ts, vs) = analysis_series(cfg, out)?;
    if ts.len() < 2 {
        return Err(CliError::Config("series too short for a spectrum".into()));
    }
    let dt = ts[1] - ts[0];
    let duration = ts.len() as f64 * dt;
    let period = tle.period();
    if duration < 2.0 * period {
        return Err(CliError::Config(format!(
            "series covers {duration:.0} s; spectra need at least two orbital periods ({:.0} s)",
            2.0 * period
        )));
    }
    let window = match cfg.analysis.spectrum_window.as_str() {
        "hann" => Window::Hann,
        _ => Window::None,
    };
    let spec = amplitude_spectrum(&vs, dt, window, &PeakConfig::default())
        .map_err(|e| core_err("analysis", e))?;

    out.write(
        "spectrum.csv",
        &csv_table(
            "f_hz,amplitude_t",
            spec.frequencies
                .iter()
                .zip(&spec.amplitudes)
                .map(|(&f, &a)| vec![f, a]),
        ),
    )?;
    let peaks: Vec<_> = spec
        .peaks
        .iter()
        .take(10)
        .map(|p| serde_json::json!({"f_hz": p.frequency, "amplitude_t": p.amplitude}))
        .collect();
    let summary = serde_json::json!({
        "samples": vs.len(),
        "dt_s": dt,
        "window": cfg.analysis.spectrum_window,
        "main_line_hz": spec.main_line,
        "split_hz": spec.split,
        "split_resolved": spec.split_resolved,
        "peaks": peaks,
    });
    out.write("spectrum.json", &to_json(&summary)?)?;
    out.write(
        "spectrum.svg",
        &svg_line_plot(
            "Amplitude spectrum",
            "f [Hz]",
            "amplitude [T]",
            &spec.frequencies,
            &spec.amplitudes,
            false,
        ),
    )?;
    Ok(())
}

pub fn allan(cfg: &PipelineConfig, out: &mut ArtifactSet) -> Result<(), CliError> {
    let (ts, vs) = analysis_series(cfg, out)?;
    if ts.len() < 2 {
        return Err(CliError::Config("series too short for Allan statistics".into()));
    }
    let dt = ts[1] - ts[0];
    let curve = allan_deviation(&vs, dt, &cfg.analysis.tau_list_s)
        .map_err(|e| core_err("analysis", e))?;
    out.write(
        "allan.csv",
        &csv_table(
            "tau_s,sigma_t,pair_count,snapped",
            curve
                .taus
                .iter()
                .zip(&curve.sigmas)
                .zip(&curve.counts)
                .zip(&curve.snapped)
                .map(|(((&t, &s), &c), &snap)| vec![t, s, c as f64, snap as u8 as f64]),
        ),
    )?;
    let summary = serde_json::json!({
        "dt_s": dt,
        "taus_s": curve.taus,
        "sigmas_t": curve.sigmas,
        "snapped": curve.snapped,
    });
    out.write("allan.json", &to_json(&summary)?)?;
    out.write(
        "allan.svg",
        &svg_line_plot(
            "Allan deviation",
            "tau [s]",
            "sigma [T]",
            &curve.taus,
            &curve.sigmas,
            true,
        ),
    )?;
    Ok(())
}

pub fn exclusion(cfg: &PipelineConfig, out: &mut ArtifactSet) -> Result<(), CliError> {
    let coeffs = load_coefficients(cfg)?;
    let profile = load_profile(cfg)?;
    let tle = load_tle(cfg)?;
    let grid = build_source(cfg, &coeffs, &profile)?;
    let orbit = build_orbit(cfg, &tle)?;

    if cfg.analysis.lambda_grid_m.is_empty() {
        return Err(CliError::Config("analysis.lambda_grid_m is empty".into()));
    }
    // Signal amplitude per unit coupling at each interaction range.
    let mut amplitudes = Vec::with_capacity(cfg.analysis.lambda_grid_m.len());
    for &lambda in &cfg.analysis.lambda_grid_m {
        let kernel = make_kernel(cfg, 1.0, lambda)?;
        let series =
            integrate_field(&grid, &orbit, &kernel).map_err(|e| core_err("interaction", e))?;
        let peak = series
            .samples
            .iter()
            .map(|s| s.projection.abs())
            .fold(0.0_f64, f64::max);
        amplitudes.push(peak);
    }
    let threshold = if cfg.analysis.detection_threshold_t > 0.0 {
        cfg.analysis.detection_threshold_t
    } else {
        campaign_sensitivity(
            cfg.sensor.shot_sensitivity_t,
            cfg.analysis.shot_time_s,
            cfg.analysis.campaign_days,
        )
        .map_err(|e| core_err("analysis", e))?
    };
    let curve = exclusion_curve(&cfg.analysis.lambda_grid_m, &amplitudes, threshold)
        .map_err(|e| core_err("analysis", e))?;

    out.write(
        "exclusion.csv",
        &csv_table(
            "lambda_m,amplitude_t_per_coupling,coupling_limit,unbounded",
            curve
                .lambdas
                .iter()
                .zip(&curve.amplitudes)
                .zip(&curve.limits)
                .zip(&curve.unbounded)
                .map(|(((&l, &a), &lim), &u)| vec![l, a, lim, u as u8 as f64]),
        ),
    )?;
    // Orders of magnitude gained over the configured coupling, per range.
    let improvement: Vec<f64> = curve
        .limits
        .iter()
        .map(|&lim| cfg.kernel.coupling / lim)
        .collect();
    let summary = serde_json::json!({
        "detection_threshold_t": threshold,
        "configured_coupling": cfg.kernel.coupling,
        "lambdas_m": curve.lambdas,
        "coupling_limits": curve.limits.iter().map(|&v| json_float(v)).collect::<Vec<_>>(),
        "improvement_over_configured": improvement.iter().map(|&v| json_float(v)).collect::<Vec<_>>(),
        "unbounded": curve.unbounded,
    });
    out.write("exclusion.json", &to_json(&summary)?)?;
    out.write(
        "exclusion.svg",
        &svg_line_plot(
            "Forecast coupling exclusion",
            "lambda [m]",
            "coupling limit",
            &curve.lambdas,
            &curve.limits,
            true,
        ),
    )?;
    Ok(())
}

pub fn budget(cfg: &PipelineConfig, out: &mut ArtifactSet) -> Result<(), CliError> {
    let coeffs = load_coefficients(cfg)?;
    let tle = load_tle(cfg)?;
    let orbit = build_orbit(cfg, &tle)?;
    let ambient = ambient_along_orbit(&coeffs, &orbit)?;
    let peak_ambient = ambient.iter().map(|b| b.norm()).fold(0.0_f64, f64::max);

    let sensor = sensor_config(cfg, orbit.normal_eci);
    let budget = noise_budget(&sensor, (xe129(), xe131()), peak_ambient)
        .map_err(|e| core_err("comagnetometer", e))?;
    let campaign = campaign_sensitivity(
        cfg.sensor.shot_sensitivity_t,
        cfg.analysis.shot_time_s,
        cfg.analysis.campaign_days,
    )
    .map_err(|e| core_err("analysis", e))?;
    let summary = serde_json::json!({
        "peak_ambient_t": peak_ambient,
        "laser_t": budget.laser,
        "gyro_residual_t": budget.gyro_residual,
        "shield_leakage_t": budget.shield_leakage,
        "shot_t": budget.shot,
        "total_t": budget.total,
        "campaign_sensitivity_t": campaign,
        "campaign_days": cfg.analysis.campaign_days,
        "shot_time_s": cfg.analysis.shot_time_s,
    });
    out.write("budget.json", &to_json(&summary)?)?;
    Ok(())
}

fn read_field_series(path: &Path, orbit: &OrbitStateSeries64) -> Result<FieldSeries64, CliError> {
    if !path.is_file() {
        return Err(CliError::Io(format!(
            "{} not found; run simulate-field first",
            path.display()
        )));
    }
    let (header, rows) = parse_csv(path)?;
    let t = column_index(&header, "t_s", path)?;
    let bx = column_index(&header, "bx_eci_t", path)?;
    let by = column_index(&header, "by_eci_t", path)?;
    let bz = column_index(&header, "bz_eci_t", path)?;
    let bp = column_index(&header, "b_normal_t", path)?;
    if rows.len() != orbit.samples.len() {
        return Err(CliError::Config(format!(
            "{}: {} samples, but the configured window yields {}",
            path.display(),
            rows.len(),
            orbit.samples.len()
        )));
    }
    Ok(FieldSeries64 {
        samples: rows
            .iter()
            .map(|r| FieldSample {
                t: r[t],
                b_eci: Vec64::new(r[bx], r[by], r[bz]),
                projection: r[bp],
            })
            .collect(),
        dt: orbit.dt,
        projection_axis: orbit.normal_eci,
    })
}

fn to_json(v: &serde_json::Value) -> Result<String, CliError> {
    serde_json::to_string_pretty(v).map_err(|e| CliError::Io(format!("json: {e}")))
}

/// JSON has no infinity; non-finite values become strings.
fn json_float(v: f64) -> serde_json::Value {
    if v.is_finite() {
        serde_json::json!(v)
    } else {
        serde_json::json!(v.to_string())
    }
}
