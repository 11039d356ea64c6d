use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("metric violation: {0}")]
    MetricViolation(String),
    #[error("spaces do not match: {0}")]
    SpaceMismatch(String),
    #[error("bad map: {0}")]
    BadMap(String),
    #[error("bad graph: {0}")]
    BadGraph(String),
    #[error("map {0} is not coarsely surjective: no finite r with N_r(f(X)) = Y")]
    NotCoarselySurjective(String),
    #[error("sigma = {sigma} is below the surjectivity radius r = {r}")]
    SigmaBelowRadius { sigma: f64, r: f64 },
    #[error("weight function carries no doubling certificate for r = {0}")]
    NoDoublingCertificate(f64),
    #[error("weight function fails t <= theta(t) at realized t = {0}")]
    WeightBelowIdentity(f64),
    #[error("witness ({a}, {b}) is not an upper control: violated at ({p}, {q})")]
    InvalidWitness { a: f64, b: f64, p: String, q: String },
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("parse error at {pointer}: {message}")]
    Parse { pointer: String, message: String },
    #[error("non-integral input in exact mode: {0}")]
    NonIntegral(String),
    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
