use super::{build_instance, hho_seed, mean_std, run_hho, ExperimentConfig, Scheme};
use crate::baselines::{alternating_optimize, no_irs, AoOptions};
use crate::error::{Error, Result};
use crate::exec::map_ordered;
use crate::problem::{snr_db, ProblemInstance};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Read;
use std::time::Instant;

/// One scheme run on one `(d, seed)` cell.
///
/// CSV header: `scheme,d_m,seed,snr_db,power_w,wall_time_s,Q,T,iterations`.
/// `Q` and `T` are zero for the baselines; `iterations` is the AO round count
/// or the HHO iteration budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub scheme: Scheme,
    pub d_m: f64,
    pub seed: u64,
    pub snr_db: f64,
    pub power_w: f64,
    pub wall_time_s: f64,
    #[serde(rename = "Q")]
    pub q: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub iterations: usize,
}

fn run_scheme(
    config: &ExperimentConfig,
    instance: &ProblemInstance,
    scheme: Scheme,
    d: f64,
    seed: u64,
) -> Result<ExperimentRecord> {
    let start = Instant::now();
    let (power, q, t, iterations) = match scheme {
        Scheme::NoIrs => {
            let r = no_irs(&instance.channels, instance.p_ap)?;
            (r.power, 0, 0, r.iterations)
        }
        Scheme::Ao => {
            let opts = AoOptions {
                tol: config.ao_tol,
                max_iter: config.ao_max_iter,
            };
            let r = alternating_optimize(&instance.channels, instance.p_ap, opts)?;
            (r.power, 0, 0, r.iterations)
        }
        Scheme::Hho => {
            let r = run_hho(instance, config.q, config.t, hho_seed(d, seed), config.execution)?;
            (r.power, config.q, config.t, config.t)
        }
    };
    Ok(ExperimentRecord {
        scheme,
        d_m: d,
        seed,
        snr_db: snr_db(power, instance.sigma2),
        power_w: power,
        wall_time_s: start.elapsed().as_secs_f64(),
        q,
        t,
        iterations,
    })
}

/// Realizes the channel of cell `(d, seed)` once and runs every configured
/// scheme on it.
pub fn run_cell(config: &ExperimentConfig, d: f64, seed: u64) -> Result<Vec<ExperimentRecord>> {
    let instance = build_instance(config, d, seed)?;
    config
        .schemes
        .iter()
        .map(|&s| run_scheme(config, &instance, s, d, seed))
        .collect()
}

/// All schemes over every `(d, seed)` cell, sorted by `(scheme, d, seed)`.
pub fn sweep_distance(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    config.validate()?;
    let cells: Vec<(f64, u64)> = config
        .d_list
        .iter()
        .flat_map(|&d| config.seeds.iter().map(move |&s| (d, s)))
        .collect();
    let per_cell = map_ordered(config.execution, &cells, |_, &(d, s)| run_cell(config, d, s));
    let mut records = Vec::with_capacity(cells.len() * config.schemes.len());
    for cell in per_cell {
        records.extend(cell?);
    }
    records.sort_by(|a, b| {
        a.scheme
            .name()
            .cmp(b.scheme.name())
            .then(a.d_m.total_cmp(&b.d_m))
            .then(a.seed.cmp(&b.seed))
    });
    Ok(records)
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<ExperimentRecord>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

/// Per-distance statistics of `snr_a − snr_b` over seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffRow {
    pub d_m: f64,
    pub mean_diff_db: f64,
    pub std_diff_db: f64,
    pub seeds: usize,
}

/// Pairs the records of two schemes by `(d, seed)` and summarizes their SNR
/// difference per distance. Every `(d, seed)` present for either scheme must
/// be present for both.
pub fn difference_report(records: &[ExperimentRecord], a: Scheme, b: Scheme) -> Result<Vec<DiffRow>> {
    let index = |s: Scheme| -> BTreeMap<(u64, u64), f64> {
        records
            .iter()
            .filter(|r| r.scheme == s)
            .map(|r| ((r.d_m.to_bits(), r.seed), r.snr_db))
            .collect()
    };
    let (ia, ib) = (index(a), index(b));
    for (this, other, name) in [(&ia, &ib, b), (&ib, &ia, a)] {
        if let Some(&(d, seed)) = this.keys().find(|k| !other.contains_key(k)) {
            return Err(Error::MissingPair {
                scheme: name.to_string(),
                d_m: f64::from_bits(d),
                seed,
            });
        }
    }
    if ia.is_empty() {
        return Err(Error::Config(format!("no records for schemes {a} and {b}")));
    }

    let mut by_d: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for (&(d, seed), &sa) in &ia {
        by_d.entry(d).or_default().push(sa - ib[&(d, seed)]);
    }
    let mut rows: Vec<DiffRow> = by_d
        .into_iter()
        .map(|(d, diffs)| {
            let (mean, std) = mean_std(&diffs);
            DiffRow {
                d_m: f64::from_bits(d),
                mean_diff_db: mean,
                std_diff_db: std,
                seeds: diffs.len(),
            }
        })
        .collect();
    rows.sort_by(|x, y| x.d_m.total_cmp(&y.d_m));
    Ok(rows)
}
