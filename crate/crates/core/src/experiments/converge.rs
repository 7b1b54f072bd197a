use super::{build_instance, hho_seed, ExperimentConfig};
use crate::error::Result;
use crate::exec::map_ordered;
use crate::problem::snr_db;
use serde::{Deserialize, Serialize};

/// Best-so-far fitness after each iteration of one HHO run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub seed: u64,
    pub iteration: usize,
    pub best_fitness_w: f64,
    pub best_snr_db: f64,
}

/// HHO traces at distance `d`, one run per configured seed.
pub fn convergence_run(config: &ExperimentConfig, d: f64) -> Result<Vec<ConvergenceRow>> {
    config.validate()?;
    let runs = map_ordered(config.execution, &config.seeds, |_, &seed| -> Result<Vec<ConvergenceRow>> {
        let instance = build_instance(config, d, seed)?;
        let run = super::run_hho(&instance, config.q, config.t, hho_seed(d, seed), config.execution)?;
        Ok(run
            .result
            .trace
            .iter()
            .enumerate()
            .map(|(k, &f)| ConvergenceRow {
                seed,
                iteration: k + 1,
                best_fitness_w: f,
                best_snr_db: snr_db(f, instance.sigma2),
            })
            .collect())
    });
    let mut rows = Vec::new();
    for r in runs {
        rows.extend(r?);
    }
    Ok(rows)
}
