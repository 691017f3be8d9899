//! The `run` subcommand: evaluate every requested level on the configured
//! loop, flag convergence by one doubling of (dim, K), and write the
//! reports.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anholonomy::berry::{
    closed_form_displacement_phase, closed_form_squeeze_phase, loop_states,
    wilson_phase_from_states, ParamLoop, WilsonPhase,
};
use anholonomy::multiphoton::multiphoton_eigenstate;
use anholonomy::ops::{StateVector, MAX_DIM};
use anholonomy::position::gamma0_grid;

use crate::config::{LoopConfig, Mode};
use crate::fail::Failure;
use crate::report::{
    integrand_csv, out_path, phases_csv, report_json, sig12, write_atomic, IntegrandRows, PhaseRow,
    RunReport, SweepRow, DISCREPANCY_TOL, DOUBLING_TOL,
};

/// Flags shared by the subcommands that compute loops.
pub struct OutputOptions {
    pub out_dir: PathBuf,
    pub dim: Option<usize>,
    pub segments: Option<usize>,
    pub emit_integrand: bool,
}

/// Discrete phase plus the two closed-form parts of one level on one loop.
pub fn phase_parts(
    mode: Mode,
    lp: &ParamLoop,
    n: usize,
    dim: usize,
) -> anholonomy::Result<(WilsonPhase, f64, f64)> {
    let wilson = match mode {
        Mode::Oscillator => wilson_phase_from_states(&loop_states(lp, n, dim)?)?,
        Mode::Multiphoton => {
            let states: Vec<StateVector> = lp
                .points()
                .iter()
                .map(|p| multiphoton_eigenstate(n, p, dim))
                .collect::<anholonomy::Result<_>>()?;
            wilson_phase_from_states(&states)?
        }
    };
    let squeeze_level = match mode {
        Mode::Oscillator => n,
        Mode::Multiphoton => 2 * n,
    };
    Ok((
        wilson,
        closed_form_displacement_phase(lp),
        closed_form_squeeze_phase(lp, squeeze_level),
    ))
}

pub fn run(config_path: &Path, opts: &OutputOptions) -> Result<(), Failure> {
    let started = Instant::now();
    let config = LoopConfig::load(config_path).map_err(Failure::validation)?;
    let dim = opts.dim.unwrap_or(config.dim);
    let lp = config
        .build_loop(opts.segments, 0)
        .map_err(Failure::validation)?;
    let lp_fine = config
        .build_loop(opts.segments, 1)
        .map_err(Failure::validation)?;
    let dim_fine = (2 * dim).min(MAX_DIM);

    let mut rows: Vec<PhaseRow> = Vec::new();
    let mut convergence: Vec<SweepRow> = Vec::new();
    let mut segment_args: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut coarse_phases: HashMap<usize, f64> = HashMap::new();

    for &n in &config.levels {
        let (wilson, gamma_d, gamma_s) =
            phase_parts(config.mode, &lp, n, dim).map_err(Failure::from_core)?;
        let gamma_closed = gamma_d + gamma_s;
        let discrepancy = (wilson.phase - gamma_closed).abs();
        let (fine, _, _) =
            phase_parts(config.mode, &lp_fine, n, dim_fine).map_err(Failure::from_core)?;
        let delta = (fine.phase - wilson.phase).abs();
        let converged = discrepancy < DISCREPANCY_TOL && delta < DOUBLING_TOL;

        convergence.push(SweepRow {
            level: n,
            dim,
            segments: lp.segments(),
            gamma_wilson: wilson.phase,
            delta_prev: None,
        });
        convergence.push(SweepRow {
            level: n,
            dim: dim_fine,
            segments: lp_fine.segments(),
            gamma_wilson: fine.phase,
            delta_prev: Some(delta),
        });
        coarse_phases.insert(n, wilson.phase);
        rows.push(PhaseRow {
            n,
            gamma_wilson: wilson.phase,
            gamma_closed,
            gamma_displacement: gamma_d,
            gamma_squeeze: gamma_s,
            discrepancy,
            dim,
            segments: lp.segments(),
            min_overlap: wilson.min_overlap,
            doubling_delta: delta,
            converged,
        });
        segment_args.push((n, wilson.segment_args));
    }

    // anholonomy angle from the two lowest levels of the active tower
    let level_phase = |n: usize| -> Result<f64, Failure> {
        match coarse_phases.get(&n) {
            Some(&g) => Ok(g),
            None => Ok(phase_parts(config.mode, &lp, n, dim)
                .map_err(Failure::from_core)?
                .0
                .phase),
        }
    };
    let hannay = level_phase(0)? - level_phase(1)?;

    let gamma0_on_grid = match &config.grid {
        Some(options) => {
            let spec = options.to_spec().map_err(Failure::validation)?;
            Some(gamma0_grid(&lp, &spec).map_err(Failure::from_core)?)
        }
        None => None,
    };

    write_atomic(&out_path(&opts.out_dir, "phases.csv"), &phases_csv(&rows))
        .map_err(Failure::validation)?;
    let report = RunReport {
        version: env!("CARGO_PKG_VERSION"),
        config: &config,
        phases: &rows,
        hannay,
        gamma0_grid: gamma0_on_grid,
        convergence: &convergence,
        timing_ms: started.elapsed().as_millis(),
    };
    write_atomic(
        &out_path(&opts.out_dir, "report.json"),
        &report_json(&report).map_err(Failure::validation)?,
    )
    .map_err(Failure::validation)?;
    let mut written = vec!["phases.csv", "report.json"];
    if opts.emit_integrand {
        let levels: Vec<IntegrandRows<'_>> = segment_args
            .iter()
            .map(|(n, args)| IntegrandRows {
                level: *n,
                segment_args: args,
            })
            .collect();
        write_atomic(
            &out_path(&opts.out_dir, "integrand.csv"),
            &integrand_csv(&levels),
        )
        .map_err(Failure::validation)?;
        written.push("integrand.csv");
    }

    for r in &rows {
        println!(
            "n={}  gamma_wilson={}  gamma_closed={}  discrepancy={}  converged={}",
            r.n,
            sig12(r.gamma_wilson),
            sig12(r.gamma_closed),
            sig12(r.discrepancy),
            r.converged
        );
    }
    println!("hannay={}", sig12(hannay));
    if let Some(g) = gamma0_on_grid {
        println!("gamma0_grid={}", sig12(g));
    }
    println!("wrote {} to {}", written.join(", "), opts.out_dir.display());

    let stragglers: Vec<String> = rows
        .iter()
        .filter(|r| !r.converged)
        .map(|r| r.n.to_string())
        .collect();
    if stragglers.is_empty() {
        Ok(())
    } else {
        Err(Failure::Numerical(format!(
            "levels [{}] missed the convergence tolerances \
             (route discrepancy < {DISCREPANCY_TOL:e}, doubling drift < {DOUBLING_TOL:e})",
            stragglers.join(", ")
        )))
    }
}
