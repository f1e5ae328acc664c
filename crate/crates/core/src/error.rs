use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{a} is not invertible modulo {modulus} (gcd = {gcd})")]
    NotInvertible { a: i64, modulus: u64, gcd: u64 },

    #[error("moduli {left} and {right} are not coprime")]
    NonCoprime { left: String, right: String },

    #[error("repeated Hecke eigenvalue in weight {weight}; a finer operator is needed")]
    DegenerateHecke { weight: u32 },

    #[error("table exhausted: need index {needed}, table holds {available}")]
    TableExhausted { needed: u64, available: u64 },

    #[error("table exhausted at weight {weight}: need length {needed}, table holds {available}")]
    WeightTable { weight: u32, needed: u64, available: u64 },

    #[error("no convergence: achieved {achieved:e}, target {target:e}")]
    Convergence { achieved: f64, target: f64 },

    #[error("contour point {re}+{im}i lies within {dist:e} of a Gamma pole")]
    PoleProximity { re: f64, im: f64, dist: f64 },

    #[error("contour tail {tail:e} exceeds tolerance {tolerance:e}")]
    ContourTruncation { tail: f64, tolerance: f64 },

    #[error("x = {x} is below the asymptotic regime (needs x >= {min})")]
    AsymptoticRegime { x: f64, min: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("cache error: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
