//! Experiment harnesses. Each one returns plain rows that serialize to CSV
//! with a fixed header; writing them out is left to the caller.
//!
//! Every `(d, seed)` cell derives its channel stream and its optimizer seed
//! from `(seed, d)` alone, so all schemes in a cell see the same channel and
//! reruns reproduce identical numbers regardless of thread scheduling.

mod config;
mod converge;
mod oracle;
mod sanity;
mod sweep;
mod timing;

pub use config::{
    parse_list, parse_schemes, parse_seed_list, ExperimentConfig, PathlossExponents, Scheme,
    DEFAULT_D_GRID,
};
pub use converge::{convergence_run, ConvergenceRow};
pub use oracle::{oracle_check, OracleConfig, OracleReport, OracleRow};
pub use sanity::{hho_sanity, rastrigin, sphere, SanityConfig, SanityReport, SanityRow, TestFunction};
pub use sweep::{
    difference_report, read_records, run_cell, sweep_distance, DiffRow, ExperimentRecord,
};
pub use timing::{linear_fit_r2, timing_run, TimingRow};

use crate::channel::{realize_channels, Geometry};
use crate::error::Result;
use crate::hho::{HarrisHawks, HhoConfig, OptimizeResult};
use crate::problem::{BeamformingSolution, ProblemInstance};
use crate::rng::{derive_seed, substream};
use serde::Serialize;
use std::io::Write;
use std::path::Path;

const CHANNEL_STREAM: u64 = 0xC4A7;
const HHO_STREAM: u64 = 0x4A0C;

/// Channel realization and problem for one `(d, seed)` cell.
pub fn build_instance(config: &ExperimentConfig, d: f64, seed: u64) -> Result<ProblemInstance> {
    let geometry = Geometry::reference(d)?;
    let mut rng = substream(seed, &[CHANNEL_STREAM, d.to_bits()]);
    let channels = realize_channels(&geometry, config.m, config.layout(), &config.channel_params(), &mut rng)?;
    ProblemInstance::new(channels, config.p_ap_watts(), config.sigma2_watts(), config.mu)
}

pub fn hho_seed(d: f64, seed: u64) -> u64 {
    derive_seed(seed, &[HHO_STREAM, d.to_bits()])
}

/// HHO outcome mapped back to a beamforming solution.
#[derive(Debug, Clone)]
pub struct HhoBeamforming {
    pub result: OptimizeResult,
    /// Best solution, with `w` scaled onto the power budget if the penalty
    /// let it overshoot.
    pub solution: BeamformingSolution,
    pub power: f64,
}

/// Runs HHO on `instance` from the MRT seed plus uniform random hawks.
pub fn run_hho(
    instance: &ProblemInstance,
    q: usize,
    t: usize,
    seed: u64,
    execution: crate::Execution,
) -> Result<HhoBeamforming> {
    let config = HhoConfig::new(q, t, instance.search_bounds())
        .with_seed(seed)
        .with_execution(execution);
    let optimizer = HarrisHawks::new(config)?;
    let seeds = vec![instance.mrt_seed()?];
    let result = optimizer.optimize(instance, &seeds)?;
    let solution = instance.decode(&result.best_position)?.project_feasible(instance.p_ap);
    let power = instance.received_power(&solution)?;
    Ok(HhoBeamforming {
        result,
        solution,
        power,
    })
}

/// Serializes `rows` as CSV (header included) into `out`.
pub fn write_csv<T: Serialize, W: Write>(out: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    write_csv(std::fs::File::create(path)?, rows)
}

pub fn to_csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

pub(crate) fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub(crate) fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}
