use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("dimension mismatch in {what}: expected {expected}, got {actual}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("{seeds} seed positions do not fit in a population of {population}")]
    TooManySeeds { seeds: usize, population: usize },
    #[error("seed position {index} lies outside the search box")]
    SeedOutOfBounds { index: usize },
    #[error("distance must be positive, got {0} m")]
    NonPositiveDistance(f64),
    #[error("direct channel h_d is identically zero")]
    ZeroChannel,
    #[error("operation requires a single transmit antenna, got M = {0}")]
    RequiresSingleAntenna(usize),
    #[error("grid search supports at most {max} transmit antennas, got M = {actual}")]
    TooManyAntennas { max: usize, actual: usize },
    #[error("grid search needs {candidates} evaluations, limit is {limit}")]
    EnumerationLimit { candidates: u128, limit: u128 },
    #[error("scheme {scheme:?} has no record for d = {d_m} m, seed {seed}")]
    MissingPair { scheme: String, d_m: f64, seed: u64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
