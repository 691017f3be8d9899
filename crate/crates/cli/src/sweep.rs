//! The `sweep` subcommand: rerun a configured loop at successively doubled
//! (dim, K) and tabulate how much every level's phase moves.

use std::path::Path;

use anholonomy::berry::ParamLoop;
use anholonomy::ops::MAX_DIM;

use crate::config::LoopConfig;
use crate::fail::Failure;
use crate::report::{out_path, sig12, sweep_csv, write_atomic, SweepRow};
use crate::run::{phase_parts, OutputOptions};

/// Most doublings one sweep may request.
pub const MAX_DOUBLINGS: u32 = 3;

pub fn sweep(config_path: &Path, doublings: u32, opts: &OutputOptions) -> Result<(), Failure> {
    let config = LoopConfig::load(config_path).map_err(Failure::validation)?;
    if doublings > MAX_DOUBLINGS {
        return Err(Failure::Validation(format!(
            "sweep supports at most {MAX_DOUBLINGS} doublings, got {doublings}"
        )));
    }
    let dim0 = opts.dim.unwrap_or(config.dim);
    let dim_last = dim0 << doublings;
    if dim_last > MAX_DIM {
        return Err(Failure::Validation(format!(
            "doubling dim {dim0} {doublings} times needs dimension {dim_last}, \
             beyond the dense-storage cap of {MAX_DIM}"
        )));
    }

    let loops: Vec<ParamLoop> = (0..=doublings)
        .map(|step| config.build_loop(opts.segments, step))
        .collect::<anyhow::Result<_>>()
        .map_err(Failure::validation)?;

    let mut rows: Vec<SweepRow> = Vec::new();
    for &n in &config.levels {
        let mut previous: Option<f64> = None;
        for (step, lp) in loops.iter().enumerate() {
            let dim = dim0 << step;
            let (wilson, _, _) =
                phase_parts(config.mode, lp, n, dim).map_err(Failure::from_core)?;
            let delta = previous.map(|p| (wilson.phase - p).abs());
            rows.push(SweepRow {
                level: n,
                dim,
                segments: lp.segments(),
                gamma_wilson: wilson.phase,
                delta_prev: delta,
            });
            previous = Some(wilson.phase);
            println!(
                "level={n}  dim={dim}  K={}  gamma_wilson={}  delta_prev={}",
                lp.segments(),
                sig12(wilson.phase),
                delta.map(sig12).unwrap_or_else(|| "-".into())
            );
        }
    }

    write_atomic(&out_path(&opts.out_dir, "sweep.csv"), &sweep_csv(&rows))
        .map_err(Failure::validation)?;
    println!("wrote sweep.csv to {}", opts.out_dir.display());
    Ok(())
}
