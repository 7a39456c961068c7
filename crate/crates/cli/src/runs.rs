//! Run targets: figure data generation, the decode experiment, and the
//! parameter-validity report.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use upwave::asymptotics::{approx_field, effect_range, tau_m, tau_ts_plus};
use upwave::medium::{assumption_margins, penetration_length, GuideMedium};
use upwave::propagation::{field_series, peak_time, train_series, TimeSeries};
use upwave::receiver::{decode, detect_peaks, simultaneity_report, PeakEvent};
use upwave::source::{window_value, SourceSpec, WindowKind, WindowSpec};

use crate::config::ExperimentConfig;
use crate::CliError;

fn to_cli(e: upwave::Error) -> CliError {
    match e {
        upwave::Error::Tolerance { residual, tolerance } => CliError::Numeric(format!(
            "residual {residual:e} exceeds tolerance {tolerance:e}"
        )),
        other => CliError::Numeric(other.to_string()),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let body = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Config(format!("serialize: {e}")))?;
    fs::write(path, body + "\n").map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Summary skeleton every run emits: target name plus the resolved config,
/// so the run can be reproduced from the summary alone.
fn summary_base(target: &str, cfg: &ExperimentConfig) -> serde_json::Value {
    json!({ "target": target, "resolved_config": cfg })
}

fn z_label(z: f64) -> String {
    if z.fract() == 0.0 {
        format!("{}", z as i64)
    } else {
        format!("{z}").replace('.', "p")
    }
}

fn decimate(ts: &TimeSeries, every: usize) -> TimeSeries {
    if every <= 1 {
        return ts.clone();
    }
    TimeSeries {
        z: ts.z,
        times: ts.times.iter().step_by(every).copied().collect(),
        values: ts.values.iter().step_by(every).copied().collect(),
        meta: ts.meta.clone(),
    }
}

pub fn run_figure(name: &str, cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(|e| CliError::Config(format!("{}: {e}", out.display())))?;
    match name {
        "fig1" => fig1(cfg, out),
        "fig2" => fig2(cfg, out),
        "fig3" => fig3(cfg, out),
        "fig4" => fig4(cfg, out),
        "fig5" => fig5(cfg, out),
        "fig6" => fig6(cfg, out),
        other => Err(CliError::Config(format!("unknown figure {other:?}"))),
    }
}

/// Window shapes: the four edge variants over the source band.
fn fig1(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let alphas = [cfg.source.alpha, 2.0 * cfg.source.alpha];
    let mut specs: Vec<(String, WindowSpec<f64>)> = Vec::new();
    for &alpha in &alphas {
        for (tag, kind) in [("f2", WindowKind::LinearEdge), ("f3", WindowKind::SmoothEdge)] {
            let w = WindowSpec::new(kind, cfg.source.delta_omega, alpha)
                .map_err(|e| CliError::Config(e.to_string()))?;
            specs.push((format!("{tag}_alpha{:.0}MHz", alpha / 1e6), w));
        }
    }
    let half = cfg.source.delta_omega + alphas[1];
    let n = 2001;
    let mut body = String::from("offset_rad_s");
    for (name, _) in &specs {
        body.push(',');
        body.push_str(name);
    }
    body.push('\n');
    for i in 0..n {
        let off = -half + 2.0 * half * i as f64 / (n - 1) as f64;
        body.push_str(&format!("{off:e}"));
        for (_, w) in &specs {
            body.push_str(&format!(",{:e}", window_value(w, off)));
        }
        body.push('\n');
    }
    let csv = out.join("fig1_windows.csv");
    fs::write(&csv, body).map_err(|e| CliError::Config(format!("{}: {e}", csv.display())))?;
    let mut summary = summary_base("fig1", cfg);
    summary["files"] = json!(["fig1_windows.csv"]);
    write_json(&out.join("fig1_summary.json"), &summary)
}

/// Exact signal at one distance for both smooth window variants, plus the
/// saddle-approximation envelopes.
fn fig2(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let m = cfg.core_medium()?;
    let q = cfg.core_quadrature()?;
    let z = cfg.sweep.positions()?[0];
    let mut peaks = serde_json::Map::new();
    let mut files = vec![];
    for (tag, kind) in [("m2", WindowKind::LinearEdge), ("m3", WindowKind::SmoothEdge)] {
        let s = cfg.source_variant(kind, cfg.source.alpha)?;
        let ts = field_series(z, &s, &m, &q).map_err(to_cli)?;
        let name = format!("fig2_{tag}.csv");
        decimate(&ts, cfg.output.decimate)
            .write_csv(&out.join(&name))
            .map_err(to_cli)?;
        let (tau, h) = peak_time(&ts, 0.0).map_err(to_cli)?;
        peaks.insert(tag.into(), json!({ "tau_t_seconds": tau, "height_abs2": h }));
        files.push(name);
    }

    // Saddle-pole approximation for the sharp-onset reference.
    let s = cfg.core_source()?;
    let mut body = String::from("t_seconds,approx_abs2,env_lo,env_hi\n");
    for t in q.t_grid.times().iter().step_by(cfg.output.decimate.max(1)) {
        if *t <= z / m.c {
            continue;
        }
        let e = approx_field(z, *t, &s, &m).map_err(to_cli)?;
        body.push_str(&format!(
            "{:e},{:e},{:e},{:e}\n",
            t,
            e.approx.norm_sqr(),
            e.env_lo,
            e.env_hi
        ));
    }
    let name = "fig2_saddle.csv";
    fs::write(out.join(name), body)
        .map_err(|e| CliError::Config(format!("{name}: {e}")))?;
    files.push(name.to_string());

    let mut summary = summary_base("fig2", cfg);
    summary["z_meters"] = json!(z);
    summary["peaks"] = json!(peaks);
    summary["files"] = json!(files);
    write_json(&out.join("fig2_summary.json"), &summary)
}

/// Peak arrival time versus distance for the four window variants, with the
/// saddle prediction and the effect-range markers.
fn fig3(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let m = cfg.core_medium()?;
    let q = cfg.core_quadrature()?;
    let zs = cfg.sweep.positions()?;
    let variants = [
        ("m2_alpha1", WindowKind::LinearEdge, cfg.source.alpha),
        ("m3_alpha1", WindowKind::SmoothEdge, cfg.source.alpha),
        ("m2_alpha2", WindowKind::LinearEdge, 2.0 * cfg.source.alpha),
        ("m3_alpha2", WindowKind::SmoothEdge, 2.0 * cfg.source.alpha),
    ];
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for &(_, kind, alpha) in &variants {
        let s = cfg.source_variant(kind, alpha)?;
        let taus: Result<Vec<f64>, CliError> = zs
            .par_iter()
            .map(|&z| {
                let ts = field_series(z, &s, &m, &q).map_err(to_cli)?;
                Ok(peak_time(&ts, 0.0).map_err(to_cli)?.0)
            })
            .collect();
        columns.push(taus?);
    }
    let s = cfg.core_source()?;
    let saddle: Vec<Option<f64>> = zs.iter().map(|&z| tau_ts_plus(z, &s, &m).ok()).collect();

    let mut body = String::from("z_meters");
    for (name, _, _) in &variants {
        body.push_str(&format!(",tau_t_{name}"));
    }
    body.push_str(",tau_ts_plus\n");
    for (i, z) in zs.iter().enumerate() {
        body.push_str(&format!("{z:e}"));
        for col in &columns {
            body.push_str(&format!(",{:e}", col[i]));
        }
        match saddle[i] {
            Some(t) => body.push_str(&format!(",{t:e}\n")),
            None => body.push_str(",nan\n"),
        }
    }
    let csv = out.join("fig3_tau.csv");
    fs::write(&csv, body).map_err(|e| CliError::Config(format!("{}: {e}", csv.display())))?;

    let mut summary = summary_base("fig3", cfg);
    match effect_range(&s, &m, None) {
        Ok(r) => {
            summary["markers"] = json!({
                "z_min_meters": r.z_min,
                "z_max_meters": r.z_max,
                "z_m_meters": r.z_m,
                "tau_m_seconds": r.tau_m,
                "xi": r.xi,
            });
        }
        Err(e) => summary["markers_error"] = json!(e.to_string()),
    }
    summary["files"] = json!(["fig3_tau.csv"]);
    write_json(&out.join("fig3_summary.json"), &summary)
}

/// Arrival-time sweeps while varying the carrier (a) and the absorption (b).
fn fig4(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let q = cfg.core_quadrature()?;
    let zs = cfg.sweep.positions()?;
    let window = cfg.core_source()?.window;

    let sweep = |s: SourceSpec<f64>, m: GuideMedium<f64>| -> Result<Vec<f64>, CliError> {
        zs.par_iter()
            .map(|&z| {
                let ts = field_series(z, &s, &m, &q).map_err(to_cli)?;
                Ok(peak_time(&ts, 0.0).map_err(to_cli)?.0)
            })
            .collect()
    };

    // (a) carrier below, just below, and above cut-off.
    let omega0s = [9.49e9, 9.499e9, 9.51e9];
    let m = cfg.core_medium()?;
    let mut cols_a = Vec::new();
    for &w0 in &omega0s {
        let s = SourceSpec::new(w0, window).map_err(|e| CliError::Config(e.to_string()))?;
        cols_a.push(sweep(s, m)?);
    }
    // (b) absorption around the baseline.
    let n1s = [0.75 * cfg.medium.n1, cfg.medium.n1, 1.25 * cfg.medium.n1];
    let s = cfg.core_source()?;
    let mut cols_b = Vec::new();
    for &n1 in &n1s {
        let m = GuideMedium::new(cfg.medium.omega_c, n1)
            .map_err(|e| CliError::Config(e.to_string()))?;
        cols_b.push(sweep(s, m)?);
    }

    for (name, labels, cols) in [
        ("fig4a_carrier.csv", omega0s.map(|v| format!("tau_t_omega0_{v:e}")), &cols_a),
        ("fig4b_absorption.csv", n1s.map(|v| format!("tau_t_n1_{v:e}")), &cols_b),
    ] {
        let mut body = String::from("z_meters");
        for l in &labels {
            body.push_str(&format!(",{l}"));
        }
        body.push('\n');
        for (i, z) in zs.iter().enumerate() {
            body.push_str(&format!("{z:e}"));
            for col in cols.iter() {
                body.push_str(&format!(",{:e}", col[i]));
            }
            body.push('\n');
        }
        fs::write(out.join(name), body)
            .map_err(|e| CliError::Config(format!("{name}: {e}")))?;
    }

    let mut summary = summary_base("fig4", cfg);
    summary["files"] = json!(["fig4a_carrier.csv", "fig4b_absorption.csv"]);
    write_json(&out.join("fig4_summary.json"), &summary)
}

fn train_sweep(cfg: &ExperimentConfig) -> Result<Vec<(f64, TimeSeries)>, CliError> {
    let m = cfg.core_medium()?;
    let q = cfg.core_quadrature()?;
    let train = cfg.core_train()?;
    cfg.sweep
        .positions()?
        .par_iter()
        .map(|&z| Ok((z, train_series(z, &train, &m, &q).map_err(to_cli)?)))
        .collect()
}

/// Pulse-train signal at each receiver position.
fn fig5(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let series = train_sweep(cfg)?;
    let rcfg = cfg.core_receiver()?;
    let mut files = vec![];
    let mut peaks = serde_json::Map::new();
    for (z, ts) in &series {
        let name = format!("fig5_z{}.csv", z_label(*z));
        decimate(ts, cfg.output.decimate).write_csv(&out.join(&name)).map_err(to_cli)?;
        let events = detect_peaks(ts, &rcfg).map_err(to_cli)?;
        peaks.insert(z_label(*z), json!(events));
        files.push(name);
    }
    let mut summary = summary_base("fig5", cfg);
    summary["peaks"] = json!(peaks);
    summary["files"] = json!(files);
    write_json(&out.join("fig5_summary.json"), &summary)
}

/// Detection times versus distance with the light-relay reference lines.
fn fig6(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let series = train_sweep(cfg)?;
    let rcfg = cfg.core_receiver()?;
    let m = cfg.core_medium()?;
    let mut body = String::from("z_meters,peak_index,tau_p_seconds,height_abs2\n");
    let mut per_receiver = Vec::new();
    for (z, ts) in &series {
        let events = detect_peaks(ts, &rcfg).map_err(to_cli)?;
        for (i, e) in events.iter().enumerate() {
            body.push_str(&format!("{z:e},{i},{:e},{:e}\n", e.tau_p, e.height));
        }
        per_receiver.push((*z, events));
    }
    let csv = out.join("fig6_tau_p.csv");
    fs::write(&csv, body).map_err(|e| CliError::Config(format!("{}: {e}", csv.display())))?;

    let mut summary = summary_base("fig6", cfg);
    match simultaneity_report(&per_receiver, m.c) {
        Ok(r) => summary["simultaneity"] = json!(r),
        Err(e) => summary["simultaneity_error"] = json!(e.to_string()),
    }
    summary["files"] = json!(["fig6_tau_p.csv"]);
    write_json(&out.join("fig6_summary.json"), &summary)
}

#[derive(Serialize)]
struct ReceiverReport {
    z_meters: f64,
    events: Vec<PeakEvent>,
    bits: Option<String>,
    error: Option<String>,
}

/// Full receiver protocol; exit 4 when decoding disagrees or a margin is
/// negative, with the report written either way.
pub fn run_decode(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(|e| CliError::Config(format!("{}: {e}", out.display())))?;
    if cfg.sweep.positions()?.len() < 2 {
        return Err(CliError::Config(
            "decode needs at least two receiver positions".into(),
        ));
    }
    let series = train_sweep(cfg)?;
    let rcfg = cfg.core_receiver()?;
    let m = cfg.core_medium()?;

    let mut reports = Vec::new();
    let mut per_receiver = Vec::new();
    let mut failures: Vec<String> = Vec::new();
    for (z, ts) in &series {
        let events = detect_peaks(ts, &rcfg).map_err(to_cli)?;
        let (bits, error) = match decode(&events) {
            Ok(msg) => (Some(msg.as_string()), None),
            Err(e) => {
                failures.push(format!("z = {z} m: {e}"));
                (None, Some(e.to_string()))
            }
        };
        reports.push(ReceiverReport { z_meters: *z, events: events.clone(), bits, error });
        per_receiver.push((*z, events));
    }
    let distinct: std::collections::BTreeSet<_> =
        reports.iter().filter_map(|r| r.bits.clone()).collect();
    if distinct.len() > 1 {
        failures.push(format!("receivers disagree: {distinct:?}"));
    }
    let simultaneity = match simultaneity_report(&per_receiver, m.c) {
        Ok(r) => {
            if !r.pass {
                failures.push("negative light-relay margin".into());
            }
            json!(r)
        }
        Err(e) => {
            failures.push(e.to_string());
            json!({ "error": e.to_string() })
        }
    };

    let mut report = summary_base("decode", cfg);
    report["receivers"] = json!(reports);
    report["simultaneity"] = simultaneity;
    report["failures"] = json!(failures);
    report["pass"] = json!(failures.is_empty());
    write_json(&out.join("decode_report.json"), &report)?;
    println!("{}", serde_json::to_string_pretty(&report["pass"]).unwrap());
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Protocol(failures.join("; ")))
    }
}

/// Parameter sanity report: reduction-validity margins, effect range,
/// penetration lengths, and regime warnings.
pub fn run_validate(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(|e| CliError::Config(format!("{}: {e}", out.display())))?;
    let m = cfg.core_medium()?;
    let s = cfg.core_source()?;
    let mut report = summary_base("validate", cfg);
    let mut warnings: Vec<String> = Vec::new();

    if s.omega0 >= m.omega_c {
        warnings.push(
            "omega0 >= omega_c: forerunner regime, a much larger peak appears at small z".into(),
        );
    }
    report["xi"] = json!(m.omega_c / s.omega0);

    if let Some(l) = m.lorentz {
        let half = s.window.support_halfwidth().unwrap_or(0.0);
        let margins = assumption_margins(s.omega0, half.max(1.0), &l, 10.0)
            .map_err(|e| CliError::Config(e.to_string()))?;
        if !margins.valid {
            warnings.push("Lorentz-to-reduced-index reduction margins below threshold".into());
        }
        report["validity"] = json!(margins);
    }

    match effect_range(&s, &m, cfg.receiver.as_ref().map(|r| r.l0)) {
        Ok(r) => report["effect_range"] = json!(r),
        Err(e) => {
            report["effect_range_error"] = json!(e.to_string());
            warnings.push(format!("effect range unavailable: {e}"));
        }
    }
    match tau_m(&s, &m) {
        Ok(t) => report["tau_m_seconds"] = json!(t),
        Err(e) => report["tau_m_error"] = json!(e.to_string()),
    }
    let edge = s.omega0 + s.window.delta_omega;
    report["penetration"] = json!({
        "at_omega0_meters": penetration_length(s.omega0, &m),
        "at_band_edge_meters": penetration_length(edge, &m),
    });
    report["warnings"] = json!(warnings);

    let body = serde_json::to_string_pretty(&report).unwrap();
    println!("{body}");
    write_json(&out.join("validate_report.json"), &report)
}

/// Output directory resolution: flag, then environment, then default.
pub fn resolve_out(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("UPWAVE_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}
