use thiserror::Error;

/// Errors raised by the numerical kernels, models and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// No sign change was found while growing the search bracket.
    #[error("no sign change found in [{lo}, {hi}] after {expansions} expansions")]
    BracketFailure { lo: f64, hi: f64, expansions: u32 },

    #[error("non-finite value {value} encountered at x = {at}")]
    NonFinite { at: f64, value: f64 },

    #[error("query {query} outside [{lo}, {hi}]")]
    OutOfRange { query: f64, lo: f64, hi: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// The model provides neither a closed form nor a conditional sampler.
    #[error("conditional expectation oracle unavailable for model `{0}`")]
    OracleUnavailable(String),

    #[error("contract is not admissible: {0}")]
    InadmissibleContract(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The English clock ran past the top of the value support.
    #[error("clock did not terminate (price reached {price})")]
    NonTermination { price: f64 },

    #[error("empty input")]
    EmptyInput,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
