use super::{build_instance, hho_seed, run_hho, ExperimentConfig};
use crate::error::{Error, Result};
use crate::exec::Execution;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    #[serde(rename = "Q")]
    pub q: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub wall_time_s: f64,
    pub best_fitness_w: f64,
}

/// Times one HHO run per `(Q, T)` grid point on the instance at `d` with the
/// first configured seed. Each point is run `repeats` times sequentially and
/// the fastest time is kept.
pub fn timing_run(
    config: &ExperimentConfig,
    grid: &[(usize, usize)],
    d: f64,
    repeats: usize,
) -> Result<Vec<TimingRow>> {
    config.validate()?;
    if grid.is_empty() {
        return Err(Error::Config("timing grid is empty".into()));
    }
    if let Some(&(q, _)) = grid.iter().find(|(q, t)| *q < 2 || *t < 1) {
        return Err(Error::Config(format!("invalid grid point with Q = {q}")));
    }
    let seed = config.seeds[0];
    let instance = build_instance(config, d, seed)?;
    grid.iter()
        .map(|&(q, t)| {
            let mut best_time = f64::INFINITY;
            let mut fitness = f64::NAN;
            for _ in 0..repeats.max(1) {
                let run = run_hho(&instance, q, t, hho_seed(d, seed), Execution::Sequential)?;
                best_time = best_time.min(run.result.wall_time.as_secs_f64());
                fitness = run.result.best_fitness;
            }
            Ok(TimingRow {
                q,
                t,
                wall_time_s: best_time,
                best_fitness_w: fitness,
            })
        })
        .collect()
}

/// Least-squares fit `y ≈ a + b·x`; returns `(a, b, R²)`.
pub fn linear_fit_r2(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    (intercept, slope, 1.0 - ss_res / syy)
}
