//! Report serialization: a directory of CSV files plus one `manifest.toml`
//! carrying run parameters, grid settings, and a SHA-256 checksum of every
//! emitted file.
//!
//! Writes are atomic at directory granularity: files are staged into a
//! sibling temporary directory which then replaces the destination by
//! rename, so readers never observe a half-written report. All numbers are
//! emitted with the shortest round-trip decimal form, making repeated runs
//! byte-identical.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::experiments::{
    DifferentialReport, ExperimentsError, PenetrationReport, SweepPlan, SweepReport,
};
use crate::fdtd::SimulationRun;

#[derive(Serialize)]
struct Manifest {
    run: RunSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<GridSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    inclusion: Option<InclusionSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    results: Option<ResultsSection>,
    checksums: BTreeMap<String, String>,
}

#[derive(Serialize)]
struct RunSection {
    experiment: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    amplitude_v_per_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    frequencies_hz: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    band_center_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    axis: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    points: Option<Vec<String>>,
}

#[derive(Serialize)]
struct GridSection {
    dz_m: f64,
    dt_s: f64,
    cells: usize,
    steps: usize,
    duration_s: f64,
    binding: String,
}

#[derive(Serialize)]
struct InclusionSection {
    tissue: String,
    center_depth_m: f64,
    thickness_m: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma_override_s_per_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eps_override: Option<f64>,
}

#[derive(Serialize)]
struct ResultsSection {
    delay_xcorr_baseline_s: f64,
    delay_xcorr_tumor_s: f64,
    delta_delay_s: f64,
    delay_group_baseline_s: f64,
    delay_group_tumor_s: f64,
    delta_group_delay_s: f64,
    max_abs_delta_s11_db: f64,
    final_energy_ratio_baseline: f64,
    final_energy_ratio_tumor: f64,
}

fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        let _ = write!(out, "{b:02x}");
    }
    out
}

/// Emitted files as (relative path, content) pairs, deterministic order.
type Files = Vec<(String, String)>;

fn csv_field(report: &PenetrationReport, index: usize) -> String {
    let field = &report.fields[index];
    let mut s = String::from("depth_m,e_Vpm\n");
    for (z, e) in field.z.iter().zip(&field.e) {
        let _ = writeln!(s, "{},{}", z, report.amplitude * e.norm());
    }
    s
}

fn csv_sar(report: &PenetrationReport, index: usize) -> String {
    let sar = &report.sars[index];
    let mut s = String::from("depth_m,sar_Wkg,tissue_name\n");
    for ((z, v), name) in sar.z.iter().zip(&sar.sar).zip(&sar.tissue) {
        let _ = writeln!(s, "{},{},{}", z, v, name);
    }
    s
}

fn csv_probes(run: &SimulationRun) -> String {
    let mut s = String::from("time_s,e_tx_Vpm,e_rx_Vpm\n");
    for (n, (tx, rx)) in run.tx.iter().zip(&run.rx).enumerate() {
        let _ = writeln!(s, "{},{},{}", (n + 1) as f64 * run.grid.dt, tx, rx);
    }
    s
}

fn csv_envelope(run: &SimulationRun) -> String {
    let grid = &run.grid;
    let span = (grid.stack_end_index - grid.stack_start_index) as f64 * grid.dz;
    let mut s = String::from("depth_m,e_max_Vpm\n");
    for (i, e) in run.envelope.iter().enumerate() {
        let depth = grid.node_depth(i);
        if depth >= 0.0 && depth <= span {
            let _ = writeln!(s, "{},{}", depth, e);
        }
    }
    s
}

fn csv_sparams(sp: &crate::fdtd::SParamResult) -> String {
    let mut s = String::from("frequency_Hz,s11_re,s11_im,s11_dB,s21_re,s21_im,s21_dB\n");
    for (k, f) in sp.frequencies.iter().enumerate() {
        let (g, t) = (sp.s11[k], sp.s21[k]);
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            f,
            g.re,
            g.im,
            20.0 * g.norm().log10(),
            t.re,
            t.im,
            20.0 * t.norm().log10()
        );
    }
    s
}

fn csv_scalar_series(header: &str, xs: &[f64], ys: &[f64]) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for (x, y) in xs.iter().zip(ys) {
        let _ = writeln!(s, "{},{}", x, y);
    }
    s
}

fn penetration_files(report: &PenetrationReport) -> Files {
    let mut files = Vec::new();
    for (i, f) in report.frequencies.iter().enumerate() {
        let mhz = (f / 1e6).round() as i64;
        files.push((format!("field_{i:02}_{mhz}MHz.csv"), csv_field(report, i)));
        files.push((format!("sar_{i:02}_{mhz}MHz.csv"), csv_sar(report, i)));
    }
    files
}

fn differential_files(report: &DifferentialReport) -> Files {
    let base = &report.baseline;
    let tum = &report.tumor;
    let unit_mag = |field: &crate::tmm::FieldProfile| -> Vec<f64> {
        field.e.iter().map(|e| report.amplitude * e.norm()).collect()
    };
    vec![
        ("sparams_baseline.csv".into(), csv_sparams(&base.sparams)),
        ("sparams_tumor.csv".into(), csv_sparams(&tum.sparams)),
        (
            "delta_s11.csv".into(),
            csv_scalar_series(
                "frequency_Hz,delta_s11_dB",
                &base.sparams.frequencies,
                &report.delta_s11_db,
            ),
        ),
        ("probes_baseline.csv".into(), csv_probes(&base.run)),
        ("probes_tumor.csv".into(), csv_probes(&tum.run)),
        ("envelope_baseline.csv".into(), csv_envelope(&base.run)),
        ("envelope_tumor.csv".into(), csv_envelope(&tum.run)),
        (
            "field_baseline.csv".into(),
            csv_scalar_series("depth_m,e_Vpm", &base.field.z, &unit_mag(&base.field)),
        ),
        (
            "field_tumor.csv".into(),
            csv_scalar_series("depth_m,e_Vpm", &tum.field.z, &unit_mag(&tum.field)),
        ),
        (
            "delta_field.csv".into(),
            csv_scalar_series("depth_m,delta_e_Vpm", &base.field.z, &report.delta_e),
        ),
        (
            "sar_baseline.csv".into(),
            sar_csv_of(&base.sar),
        ),
        ("sar_tumor.csv".into(), sar_csv_of(&tum.sar)),
        (
            "delta_sar.csv".into(),
            csv_scalar_series("depth_m,delta_sar_Wkg", &base.sar.z, &report.delta_sar),
        ),
    ]
}

fn sar_csv_of(sar: &crate::dosimetry::SarProfile) -> String {
    let mut s = String::from("depth_m,sar_Wkg,tissue_name\n");
    for ((z, v), name) in sar.z.iter().zip(&sar.sar).zip(&sar.tissue) {
        let _ = writeln!(s, "{},{},{}", z, v, name);
    }
    s
}

fn penetration_manifest(report: &PenetrationReport, checksums: BTreeMap<String, String>) -> Manifest {
    Manifest {
        run: RunSection {
            experiment: "penetrate".into(),
            preset: Some(report.preset.name().into()),
            amplitude_v_per_m: Some(report.amplitude),
            frequencies_hz: Some(report.frequencies.clone()),
            band_center_hz: None,
            axis: None,
            points: None,
        },
        grid: None,
        inclusion: None,
        results: None,
        checksums,
    }
}

fn differential_manifest(
    report: &DifferentialReport,
    checksums: BTreeMap<String, String>,
) -> Manifest {
    let grid = &report.baseline.run.grid;
    let max_abs = report
        .delta_s11_db
        .iter()
        .fold(0.0f64, |m, d| m.max(d.abs()));
    Manifest {
        run: RunSection {
            experiment: "detect".into(),
            preset: Some(report.preset.name().into()),
            amplitude_v_per_m: Some(report.amplitude),
            frequencies_hz: None,
            band_center_hz: Some(report.band_center_hz),
            axis: None,
            points: None,
        },
        grid: Some(GridSection {
            dz_m: grid.dz,
            dt_s: grid.dt,
            cells: grid.cell_count(),
            steps: report.baseline.run.tx.len(),
            duration_s: report.baseline.run.duration,
            binding: grid.binding.to_string(),
        }),
        inclusion: Some(InclusionSection {
            tissue: report.scenario.tissue.clone(),
            center_depth_m: report.scenario.center_depth,
            thickness_m: report.scenario.thickness,
            sigma_override_s_per_m: report.scenario.sigma_override,
            eps_override: report.scenario.eps_override,
        }),
        results: Some(ResultsSection {
            delay_xcorr_baseline_s: report.baseline.delay_xcorr_s,
            delay_xcorr_tumor_s: report.tumor.delay_xcorr_s,
            delta_delay_s: report.delta_delay_s,
            delay_group_baseline_s: report.baseline.delay_group_s,
            delay_group_tumor_s: report.tumor.delay_group_s,
            delta_group_delay_s: report.delta_group_delay_s,
            max_abs_delta_s11_db: max_abs,
            final_energy_ratio_baseline: report.baseline.run.final_energy_ratio,
            final_energy_ratio_tumor: report.tumor.run.final_energy_ratio,
        }),
        checksums,
    }
}

static STAGE_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Build the report in a sibling staging directory, then atomically replace
/// `dest` with it.
fn commit(dest: &Path, files: Files, manifest: Manifest) -> Result<(), ExperimentsError> {
    let parent = match dest.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => std::path::PathBuf::from("."),
    };
    fs::create_dir_all(&parent)?;
    let stage = parent.join(format!(
        ".stage-{}-{}",
        std::process::id(),
        STAGE_COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    let result = (|| -> Result<(), ExperimentsError> {
        fs::create_dir_all(&stage)?;
        for (rel, content) in &files {
            let path = stage.join(rel);
            if let Some(dir) = path.parent() {
                fs::create_dir_all(dir)?;
            }
            fs::write(path, content)?;
        }
        let text = toml::to_string(&manifest).expect("manifest serializes");
        fs::write(stage.join("manifest.toml"), text)?;
        if dest.exists() {
            fs::remove_dir_all(dest)?;
        }
        fs::rename(&stage, dest)?;
        Ok(())
    })();
    if result.is_err() {
        let _ = fs::remove_dir_all(&stage);
    }
    result
}

fn checksum_map(files: &Files) -> BTreeMap<String, String> {
    files
        .iter()
        .map(|(rel, content)| (rel.clone(), sha256_hex(content.as_bytes())))
        .collect()
}

/// Write a penetration report as CSVs plus `manifest.toml` under `dest`.
pub fn write_penetration(
    dest: &Path,
    report: &PenetrationReport,
) -> Result<(), ExperimentsError> {
    let files = penetration_files(report);
    let manifest = penetration_manifest(report, checksum_map(&files));
    commit(dest, files, manifest)
}

/// Write a differential report as CSVs plus `manifest.toml` under `dest`.
pub fn write_differential(
    dest: &Path,
    report: &DifferentialReport,
) -> Result<(), ExperimentsError> {
    let files = differential_files(report);
    let manifest = differential_manifest(report, checksum_map(&files));
    commit(dest, files, manifest)
}

/// Write one subdirectory per sweep point plus a root `manifest.toml`
/// covering every emitted file.
pub fn write_sweep(
    dest: &Path,
    plan: &SweepPlan,
    reports: &[SweepReport],
) -> Result<(), ExperimentsError> {
    let labels = plan.point_labels();
    let mut files = Files::new();
    let mut points = Vec::new();
    for (i, (report, label)) in reports.iter().zip(&labels).enumerate() {
        let sub = format!("{i:02}_{label}");
        let inner = match report {
            SweepReport::Penetration(p) => penetration_files(p),
            SweepReport::Differential(d) => differential_files(d),
        };
        for (rel, content) in inner {
            files.push((format!("{sub}/{rel}"), content));
        }
        points.push(sub);
    }
    let manifest = Manifest {
        run: RunSection {
            experiment: "sweep".into(),
            preset: None,
            amplitude_v_per_m: None,
            frequencies_hz: None,
            band_center_hz: None,
            axis: Some(plan.axis_name().into()),
            points: Some(points),
        },
        grid: None,
        inclusion: None,
        results: None,
        checksums: checksum_map(&files),
    };
    commit(dest, files, manifest)
}
