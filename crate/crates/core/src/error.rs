use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ell must be at least 4, got {0}")]
    EllTooSmall(usize),
    #[error("ell = {ell} exceeds the supported maximum of {max}")]
    EllUnsupported { ell: usize, max: usize },
    #[error("hypergraph has {got} vertices, canonical labeling supports at most {max}")]
    TooManyVertices { got: usize, max: usize },
    #[error("process needs at least 4 vertices, got n = {0}")]
    TooFewVertices(usize),
    #[error("n = {n} needs about {needed} bytes, budget is {budget}")]
    MemoryBudget { n: usize, needed: u64, budget: u64 },
    #[error("time t = {0} lies outside [0, 1/6]")]
    TimeOutOfRange(f64),
    #[error("pair {0}{1} is not alive")]
    DeadPair(u32, u32),
    #[error("triple {0:?} is not available")]
    NotAvailable([u32; 3]),
    #[error("invalid triple {0:?}")]
    InvalidTriple([u32; 3]),
    #[error("pattern too large: {0}")]
    PatternTooLarge(String),
    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
