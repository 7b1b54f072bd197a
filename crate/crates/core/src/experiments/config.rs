use crate::channel::{
    dbm_to_watts, ChannelParams, IrsLayout, LosMode, DEFAULT_EXPONENT_AP_IRS,
    DEFAULT_EXPONENT_AP_USER, DEFAULT_EXPONENT_IRS_USER,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::problem::DEFAULT_MU;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub const DEFAULT_D_GRID: [f64; 13] = [
    10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0, 45.0, 48.0, 50.0, 51.0, 55.0, 60.0,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "no-irs")]
    NoIrs,
    #[serde(rename = "ao")]
    Ao,
    #[serde(rename = "hho")]
    Hho,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::NoIrs, Scheme::Ao, Scheme::Hho];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::NoIrs => "no-irs",
            Scheme::Ao => "ao",
            Scheme::Hho => "hho",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown scheme {s:?} (expected no-irs, ao or hho)")))
    }
}

/// Path-loss exponents per link. The reference loss, penetration loss and
/// element gain are fixed; the exponents are the free part of the link model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PathlossExponents {
    pub ap_user: f64,
    pub ap_irs: f64,
    pub irs_user: f64,
}

impl Default for PathlossExponents {
    fn default() -> Self {
        Self {
            ap_user: DEFAULT_EXPONENT_AP_USER,
            ap_irs: DEFAULT_EXPONENT_AP_IRS,
            irs_user: DEFAULT_EXPONENT_IRS_USER,
        }
    }
}

/// Experiment settings. JSON files use these field names; anything omitted
/// takes its default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "N_x")]
    pub n_x: usize,
    #[serde(rename = "N_y")]
    pub n_y: usize,
    pub p_ap_dbm: f64,
    pub sigma2_dbm: f64,
    pub mu: f64,
    pub d_list: Vec<f64>,
    #[serde(rename = "Q")]
    pub q: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub seeds: Vec<u64>,
    pub schemes: Vec<Scheme>,
    pub pathloss_exponents: PathlossExponents,
    pub los_mode: LosMode,
    pub ao_tol: f64,
    pub ao_max_iter: usize,
    pub execution: Execution,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            m: 8,
            n_x: 5,
            n_y: 10,
            p_ap_dbm: 5.0,
            sigma2_dbm: -80.0,
            mu: DEFAULT_MU,
            d_list: DEFAULT_D_GRID.to_vec(),
            q: 80,
            t: 500,
            seeds: (0..10).collect(),
            schemes: Scheme::ALL.to_vec(),
            pathloss_exponents: PathlossExponents::default(),
            los_mode: LosMode::default(),
            ao_tol: crate::baselines::DEFAULT_AO_TOL,
            ao_max_iter: crate::baselines::DEFAULT_AO_MAX_ITER,
            execution: Execution::default(),
            out: PathBuf::from("results"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn layout(&self) -> IrsLayout {
        IrsLayout::new(self.n_x, self.n_y)
    }

    /// `N = N_x · N_y`.
    pub fn n(&self) -> usize {
        self.n_x * self.n_y
    }

    pub fn p_ap_watts(&self) -> f64 {
        dbm_to_watts(self.p_ap_dbm)
    }

    pub fn sigma2_watts(&self) -> f64 {
        dbm_to_watts(self.sigma2_dbm)
    }

    pub fn channel_params(&self) -> ChannelParams {
        let e = self.pathloss_exponents;
        let mut params = ChannelParams::with_exponents(e.ap_user, e.ap_irs, e.irs_user);
        params.los_mode = self.los_mode;
        params
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.m == 0 {
            return bad("M must be at least 1".into());
        }
        if self.q < 2 {
            return bad(format!("population size Q must be at least 2, got {}", self.q));
        }
        if self.t < 1 {
            return bad("iteration budget T must be at least 1".into());
        }
        if !self.p_ap_dbm.is_finite() || !self.sigma2_dbm.is_finite() {
            return bad("power levels must be finite".into());
        }
        if !(self.mu > 0.0) {
            return bad(format!("penalty factor mu must be positive, got {}", self.mu));
        }
        if self.d_list.is_empty() || self.d_list.iter().any(|d| !d.is_finite()) {
            return bad("d_list must be a non-empty list of finite distances".into());
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        if self.schemes.is_empty() {
            return bad("at least one scheme is required".into());
        }
        if !(self.ao_tol > 0.0) || self.ao_max_iter == 0 {
            return bad("AO tolerance and iteration cap must be positive".into());
        }
        self.channel_params().validate()
    }
}

/// Parses `"1,2,5"` or a half-open range `"0..10"`.
pub fn parse_seed_list(s: &str) -> Result<Vec<u64>> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| Error::Config(format!("bad seed range {s:?}")))?;
        let b: u64 = b.trim().parse().map_err(|_| Error::Config(format!("bad seed range {s:?}")))?;
        if a >= b {
            return Err(Error::Config(format!("empty seed range {s:?}")));
        }
        return Ok((a..b).collect());
    }
    parse_list(s)
}

pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::Config(format!("cannot parse {p:?} in list {s:?}")))
        })
        .collect()
}

pub fn parse_schemes(s: &str) -> Result<Vec<Scheme>> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(str::parse).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_reference_setup() {
        let c = ExperimentConfig::default();
        assert_eq!((c.m, c.n_x, c.n_y, c.n()), (8, 5, 10, 50));
        assert!((c.p_ap_watts() - 10f64.powf(0.5) * 1e-3).abs() < 1e-15);
        assert!((c.sigma2_watts() - 1e-11).abs() < 1e-24);
        assert_eq!(c.mu, 1.0);
        assert_eq!(c.seeds.len(), 10);
        c.validate().unwrap();
    }

    #[test]
    fn json_uses_field_names_and_defaults() {
        let c = ExperimentConfig::from_json_str(r#"{"M": 4, "Q": 20, "T": 7, "schemes": ["ao", "hho"], "d_list": [20, 40]}"#).unwrap();
        assert_eq!((c.m, c.q, c.t), (4, 20, 7));
        assert_eq!(c.schemes, vec![Scheme::Ao, Scheme::Hho]);
        assert_eq!(c.n_x, 5);
        assert!(ExperimentConfig::from_json_str(r#"{"Q": 1}"#).is_err());
        assert!(ExperimentConfig::from_json_str(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn list_parsing() {
        assert_eq!(parse_seed_list("0..4").unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(parse_seed_list("3, 9,1").unwrap(), vec![3, 9, 1]);
        assert!(parse_seed_list("4..4").is_err());
        assert_eq!(parse_list::<f64>("20,40.5").unwrap(), vec![20.0, 40.5]);
        assert_eq!(parse_schemes("hho,no-irs").unwrap(), vec![Scheme::Hho, Scheme::NoIrs]);
        assert!(parse_schemes("sdr").is_err());
    }
}
