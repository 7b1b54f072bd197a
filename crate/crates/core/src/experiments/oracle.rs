use super::{build_instance, median, run_hho, ExperimentConfig};
use crate::baselines::{alternating_optimize, brute_force, closed_form_optimum_m1, AoOptions};
use crate::error::{Error, Result};
use crate::exec::map_ordered;
use crate::rng::derive_seed;
use serde::{Deserialize, Serialize};

pub const AO_RATIO_TOL: f64 = 1e-6;
pub const BRUTE_FORCE_MIN_RATIO: f64 = 0.995;
pub const HHO_MIN_MEDIAN_RATIO: f64 = 0.98;
pub const MAX_ORACLE_N: usize = 6;

const ORACLE_HHO_STREAM: u64 = 0x04AC;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    /// Link model, power levels and distances; `M` must be 1.
    pub experiment: ExperimentConfig,
    pub n_list: Vec<usize>,
    pub instances: usize,
    pub hho_seeds: Vec<u64>,
    pub q: usize,
    pub t: usize,
    pub phase_levels: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            experiment: ExperimentConfig {
                m: 1,
                ..ExperimentConfig::default()
            },
            n_list: vec![2, 4, 6],
            instances: 10,
            hho_seeds: (0..10).collect(),
            q: 50,
            t: 500,
            phase_levels: 64,
        }
    }
}

/// Every ratio is relative to the single-antenna closed-form optimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub instance: usize,
    pub d_m: f64,
    pub closed_form_w: f64,
    pub ao_ratio: f64,
    pub brute_force_ratio: f64,
    pub hho_median_ratio: f64,
    pub hho_min_ratio: f64,
}

impl OracleRow {
    pub fn ao_ok(&self) -> bool {
        (self.ao_ratio - 1.0).abs() <= AO_RATIO_TOL
    }

    pub fn brute_force_ok(&self) -> bool {
        self.brute_force_ratio >= BRUTE_FORCE_MIN_RATIO && self.brute_force_ratio <= 1.0 + 1e-9
    }

    pub fn hho_ok(&self) -> bool {
        self.hho_median_ratio >= HHO_MIN_MEDIAN_RATIO
    }
}

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub rows: Vec<OracleRow>,
}

impl OracleReport {
    pub fn ao_ok(&self) -> bool {
        self.rows.iter().all(OracleRow::ao_ok)
    }

    pub fn brute_force_ok(&self) -> bool {
        self.rows.iter().all(OracleRow::brute_force_ok)
    }

    pub fn hho_ok(&self) -> bool {
        self.rows.iter().all(OracleRow::hho_ok)
    }

    pub fn passed(&self) -> bool {
        self.ao_ok() && self.brute_force_ok() && self.hho_ok()
    }
}

/// Runs AO, grid search and HHO on random single-antenna instances and
/// compares each against the closed-form optimum.
pub fn oracle_check(config: &OracleConfig) -> Result<OracleReport> {
    let exp = &config.experiment;
    if exp.m != 1 {
        return Err(Error::RequiresSingleAntenna(exp.m));
    }
    exp.validate()?;
    if let Some(&n) = config.n_list.iter().find(|&&n| n == 0 || n > MAX_ORACLE_N) {
        return Err(Error::Config(format!(
            "oracle instances need 1 ≤ N ≤ {MAX_ORACLE_N}, got {n}"
        )));
    }
    if config.instances == 0 || config.hho_seeds.is_empty() {
        return Err(Error::Config("oracle check needs instances and HHO seeds".into()));
    }

    let cases: Vec<(usize, usize)> = config
        .n_list
        .iter()
        .flat_map(|&n| (0..config.instances).map(move |k| (n, k)))
        .collect();
    let rows = map_ordered(exp.execution, &cases, |_, &(n, k)| -> Result<OracleRow> {
        let cfg = ExperimentConfig {
            n_x: n,
            n_y: 1,
            ..exp.clone()
        };
        let d = cfg.d_list[k % cfg.d_list.len()];
        let instance = build_instance(&cfg, d, k as u64)?;
        let ch = &instance.channels;
        let opt = closed_form_optimum_m1(ch, instance.p_ap)?;
        let ao = alternating_optimize(ch, instance.p_ap, AoOptions::default())?;
        let bf = brute_force(ch, instance.p_ap, config.phase_levels)?;
        let hho: Vec<f64> = config
            .hho_seeds
            .iter()
            .map(|&s| {
                let seed = derive_seed(s, &[ORACLE_HHO_STREAM, n as u64, k as u64]);
                run_hho(&instance, config.q, config.t, seed, exp.execution).map(|r| r.power / opt)
            })
            .collect::<Result<_>>()?;
        Ok(OracleRow {
            n,
            instance: k,
            d_m: d,
            closed_form_w: opt,
            ao_ratio: ao.power / opt,
            brute_force_ratio: bf / opt,
            hho_median_ratio: median(&hho),
            hho_min_ratio: hho.iter().copied().fold(f64::INFINITY, f64::min),
        })
    });
    Ok(OracleReport {
        rows: rows.into_iter().collect::<Result<_>>()?,
    })
}
