use thiserror::Error;

/// Errors raised by the modeling and search layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// A penalty model left its domain of definition (e.g. crosstalk too
    /// large for the BER target). Callers treat this as an infeasible point.
    #[error("penalty undefined: {0}")]
    Infeasible(String),

    #[error("quadrature did not converge on [{lo}, {hi}]: estimate {estimate:e}, error {error:e} after {evaluations} evaluations")]
    Quadrature {
        lo: f64,
        hi: f64,
        estimate: f64,
        error: f64,
        evaluations: usize,
    },

    #[error("no feasible duplet; closest is N={n_lambda} at {baud} Gbaud with deficit {deficit_db:.3} dB")]
    NoFeasibleDuplet {
        n_lambda: u32,
        baud: f64,
        deficit_db: f64,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
