//! Report serialization: fixed CSV schemas, 12-significant-digit float
//! formatting, and atomic file writes (temp file in the target directory,
//! then rename).

use anyhow::{Context, Result};
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::LoopConfig;

/// Mandatory header of phases.csv.
pub const PHASES_HEADER: &str =
    "n,gamma_wilson,gamma_closed,gamma_D,gamma_S,discrepancy,dim,K,converged";

/// Mandatory header of sweep.csv.
pub const SWEEP_HEADER: &str = "level,dim,K,gamma_wilson,delta_prev";

/// Mandatory header of integrand.csv.
pub const INTEGRAND_HEADER: &str = "level,k,segment_arg";

/// Route-agreement tolerance a level must meet to be flagged converged.
pub const DISCREPANCY_TOL: f64 = 1e-3;

/// Largest phase drift allowed under one doubling of (dim, K) for a level
/// to be flagged converged.
pub const DOUBLING_TOL: f64 = 1e-4;

/// 12 significant digits, lowercase scientific exponent.
pub fn sig12(x: f64) -> String {
    format!("{:.11e}", x)
}

/// Write a file atomically: the contents land under the final name only
/// complete, never half-written.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("cannot create temporary file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())
        .with_context(|| format!("cannot write {}", path.display()))?;
    tmp.persist(path)
        .with_context(|| format!("cannot move report into place at {}", path.display()))?;
    Ok(())
}

/// One level's results, as reported in phases.csv and report.json.
#[derive(Clone, Debug, Serialize)]
pub struct PhaseRow {
    pub n: usize,
    pub gamma_wilson: f64,
    pub gamma_closed: f64,
    pub gamma_displacement: f64,
    pub gamma_squeeze: f64,
    pub discrepancy: f64,
    pub dim: usize,
    pub segments: usize,
    pub min_overlap: f64,
    pub doubling_delta: f64,
    pub converged: bool,
}

pub fn phases_csv(rows: &[PhaseRow]) -> String {
    let mut out = String::from(PHASES_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.n,
            sig12(r.gamma_wilson),
            sig12(r.gamma_closed),
            sig12(r.gamma_displacement),
            sig12(r.gamma_squeeze),
            sig12(r.discrepancy),
            r.dim,
            r.segments,
            r.converged,
        ));
    }
    out
}

/// One row of the convergence sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub level: usize,
    pub dim: usize,
    pub segments: usize,
    pub gamma_wilson: f64,
    /// Drift from the previous resolution; absent on the first row of a
    /// level.
    pub delta_prev: Option<f64>,
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.level,
            r.dim,
            r.segments,
            sig12(r.gamma_wilson),
            r.delta_prev.map(sig12).unwrap_or_default(),
        ));
    }
    out
}

/// Per-segment contributions of one level, for external plotting.
pub struct IntegrandRows<'a> {
    pub level: usize,
    pub segment_args: &'a [f64],
}

pub fn integrand_csv(levels: &[IntegrandRows<'_>]) -> String {
    let mut out = String::from(INTEGRAND_HEADER);
    out.push('\n');
    for rows in levels {
        for (k, arg) in rows.segment_args.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", rows.level, k, sig12(*arg)));
        }
    }
    out
}

/// The full machine-readable run report.
#[derive(Serialize)]
pub struct RunReport<'a> {
    pub version: &'a str,
    pub config: &'a LoopConfig,
    pub phases: &'a [PhaseRow],
    pub hannay: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma0_grid: Option<f64>,
    pub convergence: &'a [SweepRow],
    /// Wall-clock duration; the only non-deterministic field, therefore
    /// never part of the CSV outputs.
    pub timing_ms: u128,
}

pub fn report_json(report: &RunReport<'_>) -> Result<String> {
    let mut text = serde_json::to_string_pretty(report).context("cannot serialize report")?;
    text.push('\n');
    Ok(text)
}

/// Resolve an output file inside the chosen directory.
pub fn out_path(out_dir: &Path, name: &str) -> PathBuf {
    out_dir.join(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_carry_twelve_significant_digits() {
        assert_eq!(sig12(std::f64::consts::PI), "3.14159265359e0");
        assert_eq!(sig12(-1.0 / 3.0e5), "-3.33333333333e-6");
        assert_eq!(sig12(0.0), "0.00000000000e0");
        assert_eq!(sig12(-std::f64::consts::FRAC_PI_2), "-1.57079632679e0");
    }

    #[test]
    fn phase_rows_format_with_the_documented_header() {
        let rows = [PhaseRow {
            n: 2,
            gamma_wilson: -0.873_937,
            gamma_closed: -0.873_948,
            gamma_displacement: 0.0,
            gamma_squeeze: -0.873_948,
            discrepancy: 1.1e-5,
            dim: 80,
            segments: 400,
            min_overlap: 0.9998,
            doubling_delta: 3.0e-5,
            converged: true,
        }];
        let text = phases_csv(&rows);
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "n,gamma_wilson,gamma_closed,gamma_D,gamma_S,discrepancy,dim,K,converged"
        );
        assert_eq!(
            lines.next().unwrap(),
            "2,-8.73937000000e-1,-8.73948000000e-1,0.00000000000e0,-8.73948000000e-1,1.10000000000e-5,80,400,true"
        );
        assert_eq!(lines.next(), None);
    }

    #[test]
    fn sweep_rows_leave_the_first_delta_empty() {
        let rows = [
            SweepRow {
                level: 0,
                dim: 80,
                segments: 400,
                gamma_wilson: -0.29131,
                delta_prev: None,
            },
            SweepRow {
                level: 0,
                dim: 160,
                segments: 800,
                gamma_wilson: -0.29132,
                delta_prev: Some(1.0e-5),
            },
        ];
        let text = sweep_csv(&rows);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "level,dim,K,gamma_wilson,delta_prev");
        assert!(
            lines[1].ends_with(','),
            "first step should end with an empty field: {}",
            lines[1]
        );
        assert_eq!(lines[2], "0,160,800,-2.91320000000e-1,1.00000000000e-5");
    }

    #[test]
    fn integrand_rows_are_numbered_per_segment() {
        let args = [0.25, -0.5];
        let text = integrand_csv(&[IntegrandRows {
            level: 1,
            segment_args: &args,
        }]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "level,k,segment_arg");
        assert_eq!(lines[1], "1,0,2.50000000000e-1");
        assert_eq!(lines[2], "1,1,-5.00000000000e-1");
    }

    #[test]
    fn atomic_writes_land_complete_and_replace_cleanly() {
        let dir = tempfile::tempdir().unwrap();
        let target = dir.path().join("nested").join("table.csv");
        write_atomic(&target, "first\n").unwrap();
        assert_eq!(std::fs::read_to_string(&target).unwrap(), "first\n");
        write_atomic(&target, "second\n").unwrap();
        assert_eq!(std::fs::read_to_string(&target).unwrap(), "second\n");
    }
}
