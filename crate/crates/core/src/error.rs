use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A density matrix failed one of its structural invariants.
    #[error("invalid density matrix: {invariant} violated ({detail})")]
    InvalidState { invariant: &'static str, detail: String },

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    /// The second-order population of |eg> went non-positive, i.e. the
    /// coupling is too strong for the expansion at this time.
    #[error("out of perturbative regime at xi = {xi}, K = {coupling}: rho22 = {rho22}")]
    OutOfRegime { xi: f64, coupling: f64, rho22: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
