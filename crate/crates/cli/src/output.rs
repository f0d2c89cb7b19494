//! Plot-ready result files. Numbers use Rust's shortest round-trip
//! formatting, which is locale independent.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use uplink_core::experiment::{RateCurves, SweepRow};
use uplink_core::oracle::{ValidationCase, ValidationResult};

use crate::config::Format;
use crate::CliError;

#[derive(Serialize)]
struct SweepRecord {
    cm_ratio: f64,
    d_r_km: f64,
    beta_db: f64,
    shadowing: bool,
    hopping: bool,
    fading_model: &'static str,
    avg_outage: f64,
    std_outage: f64,
    rate_bpcu: f64,
    ase_bpcu_per_km2: f64,
    n_trials: usize,
    seed: u64,
}

impl From<&SweepRow> for SweepRecord {
    fn from(r: &SweepRow) -> Self {
        Self {
            cm_ratio: r.cm_ratio,
            d_r_km: r.d_r_km,
            beta_db: r.beta_db,
            shadowing: r.shadowing,
            hopping: r.hopping,
            fading_model: r.fading_model.as_str(),
            avg_outage: r.avg_outage,
            std_outage: r.std_outage,
            rate_bpcu: r.rate_bpcu,
            ase_bpcu_per_km2: r.ase_bpcu_per_km2,
            n_trials: r.n_trials,
            seed: r.seed,
        }
    }
}

#[derive(Serialize)]
struct TrialRecord {
    cm_ratio: f64,
    beta_db: f64,
    shadowing: bool,
    hopping: bool,
    fading_model: &'static str,
    trial: usize,
    outage: f64,
}

#[derive(Serialize)]
struct CurveRecord {
    uplink_id: String,
    rate_bpcu: f64,
    outage: f64,
}

#[derive(Serialize)]
struct ValidationRecord {
    case: usize,
    interferers: usize,
    m0: u32,
    hopping: bool,
    beta: f64,
    gamma0: f64,
    closed_form: f64,
    estimate: f64,
    stderr: f64,
    draws: u64,
    pass: bool,
}

fn write_csv<T: Serialize>(
    path: &Path,
    records: impl IntoIterator<Item = T>,
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// `sweep.csv` (plus `trials.csv` when per-trial outages were kept) or `sweep.json`.
pub fn write_sweep(dir: &Path, format: Format, rows: &[SweepRow]) -> Result<PathBuf, CliError> {
    match format {
        Format::Json => {
            let path = dir.join("sweep.json");
            write_json(&path, rows)?;
            Ok(path)
        }
        Format::Csv => {
            let path = dir.join("sweep.csv");
            write_csv(&path, rows.iter().map(SweepRecord::from))?;
            if rows.iter().any(|r| r.trial_outages.is_some()) {
                let trials = rows.iter().flat_map(|r| {
                    r.trial_outages
                        .iter()
                        .flatten()
                        .enumerate()
                        .map(move |(trial, &outage)| TrialRecord {
                            cm_ratio: r.cm_ratio,
                            beta_db: r.beta_db,
                            shadowing: r.shadowing,
                            hopping: r.hopping,
                            fading_model: r.fading_model.as_str(),
                            trial,
                            outage,
                        })
                });
                write_csv(&dir.join("trials.csv"), trials)?;
            }
            Ok(path)
        }
    }
}

fn curve_records(c: &RateCurves) -> Vec<CurveRecord> {
    let mut out = Vec::new();
    for ((mobile, _), curve) in c.uplinks.iter().zip(&c.curves) {
        for (&rate, &outage) in c.rates.iter().zip(curve) {
            out.push(CurveRecord {
                uplink_id: mobile.to_string(),
                rate_bpcu: rate,
                outage,
            });
        }
    }
    for (&rate, &outage) in c.rates.iter().zip(&c.average) {
        out.push(CurveRecord {
            uplink_id: "avg".into(),
            rate_bpcu: rate,
            outage,
        });
    }
    out
}

/// `rate_curve.csv` with one block of rows per uplink then the `avg` rows, or `rate_curve.json`.
pub fn write_rate_curves(
    dir: &Path,
    format: Format,
    curves: &RateCurves,
) -> Result<PathBuf, CliError> {
    let records = curve_records(curves);
    match format {
        Format::Csv => {
            let path = dir.join("rate_curve.csv");
            write_csv(&path, records)?;
            Ok(path)
        }
        Format::Json => {
            let path = dir.join("rate_curve.json");
            write_json(&path, &records)?;
            Ok(path)
        }
    }
}

pub fn write_validation(
    dir: &Path,
    format: Format,
    cases: &[ValidationCase],
    results: &[ValidationResult],
) -> Result<PathBuf, CliError> {
    let records: Vec<ValidationRecord> = cases
        .iter()
        .zip(results)
        .enumerate()
        .map(|(k, (c, r))| ValidationRecord {
            case: k,
            interferers: c.profile.interferer_count(),
            m0: c.profile.m0,
            hopping: c.hopping,
            beta: c.beta,
            gamma0: c.profile.gamma0,
            closed_form: r.closed_form,
            estimate: r.estimate.outage,
            stderr: r.estimate.stderr,
            draws: r.estimate.draws,
            pass: r.pass,
        })
        .collect();
    match format {
        Format::Csv => {
            let path = dir.join("validate.csv");
            write_csv(&path, records)?;
            Ok(path)
        }
        Format::Json => {
            let path = dir.join("validate.json");
            write_json(&path, &records)?;
            Ok(path)
        }
    }
}
