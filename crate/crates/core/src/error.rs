use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("invalid word: {0}")]
    InvalidWord(String),
    #[error("word too short: {0}")]
    InsufficientWord(String),
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("invalid subset: {0}")]
    InvalidSubset(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("matrix is reducible, Perron data not unique")]
    NoUniquePerron,
    #[error("power iteration did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("Gibbs identity violated: log lambda = {log_lambda}, h + integral = {free_energy}")]
    GibbsIdentity { log_lambda: f64, free_energy: f64 },
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("typical set empty at depth {n}; increase n")]
    IncreaseN { n: usize },
    #[error("invalid cover: {0}")]
    InvalidCover(String),
    #[error("invalid budget: {0}")]
    InvalidBudget(String),
}

pub type Result<T> = std::result::Result<T, Error>;
