use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("curve is not admissible at s = {s}: dx/ds = {dx}")]
    NotAdmissible { s: f64, dx: f64 },

    #[error("degenerate Frenet frame at {}: {quantity} = {value:e}", at(*.index, *.s))]
    FrenetDegenerate {
        index: Option<usize>,
        s: f64,
        quantity: &'static str,
        value: f64,
    },

    #[error("lightlike degeneracy at {}: {what}", at(*.index, *.s))]
    LightlikeDegeneracy {
        index: Option<usize>,
        s: f64,
        what: String,
    },

    #[error("grid too small: need at least {needed} samples, got {got}")]
    GridTooSmall { needed: usize, got: usize },

    #[error("insufficient history: need at least {needed} time levels, got {got}")]
    InsufficientHistory { needed: usize, got: usize },

    #[error("evolution step {step} produced non-finite positions")]
    StepRejected { step: usize },

    #[error("evolution aborted at time index {step}: {source}")]
    Evolution {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("frame Gram matrix drifted by {deviation:e} at step {step} (bound {bound:e})")]
    GramDrift {
        step: usize,
        deviation: f64,
        bound: f64,
    },

    #[error("domain [{a}, {b}] is not a grid sub-interval of [{min}, {max}]")]
    DomainOutOfRange { a: f64, b: f64, min: f64, max: f64 },

    #[error("matrix norm {norm} exceeds the scaling-and-squaring limit")]
    NormTooLarge { norm: f64 },

    #[error("cannot fit convergence order ({})", if *.saturated { "errors saturated at round-off" } else { "not enough usable refinement levels" })]
    DegenerateFit { saturated: bool },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn at(index: Option<usize>, s: f64) -> String {
    match index {
        Some(i) => format!("grid index {i} (s = {s})"),
        None => format!("s = {s}"),
    }
}

impl Error {
    /// Geometric failures (as opposed to malformed input).
    pub fn is_degeneracy(&self) -> bool {
        match self {
            Error::FrenetDegenerate { .. }
            | Error::LightlikeDegeneracy { .. }
            | Error::NotAdmissible { .. }
            | Error::StepRejected { .. }
            | Error::GramDrift { .. } => true,
            Error::Evolution { source, .. } => source.is_degeneracy(),
            _ => false,
        }
    }
}
