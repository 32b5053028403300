use thiserror::Error;

use crate::expr::ParseError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("bilinear has imaginary residue {residue:e} (broken gamma basis?)")]
    NonRealBilinear { residue: f64 },

    #[error("singular spinor: Phi^2 + Theta^2 = {invariant:e} below threshold {threshold:e}")]
    SingularSpinor { invariant: f64, threshold: f64 },

    #[error("invalid polar data: {0}")]
    InvalidPolarData(String),

    #[error("matrix is not in the spin group: {0}")]
    NotSpinGroup(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("unknown symbol `{0}` in expression")]
    UnknownSymbol(String),

    #[error("point {point:?} lies outside the chart domain ({reason})")]
    OutOfDomain { point: [f64; 4], reason: String },

    #[error("degenerate tetrad at {point:?}: normalized determinant {ratio:e}")]
    DegenerateTetrad { point: [f64; 4], ratio: f64 },

    #[error("vector field `{name}` is not Killing at {point:?}: residual {residual:e}")]
    NotKilling {
        name: String,
        point: [f64; 4],
        residual: f64,
    },

    #[error("field is not weakly invariant along `{name}`: max bilinear Lie derivative {residual:e}")]
    NotWeaklyInvariant { name: String, residual: f64 },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by malformed or inconsistent input, as opposed
    /// to a failed identity.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::NonRealBilinear { .. } | Error::NotWeaklyInvariant { .. })
    }
}
