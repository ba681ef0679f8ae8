use thiserror::Error;

/// Errors raised by the framing, element, assembly and solver layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Serret-Frenet frame undefined: |r' x r''| = {cross_norm:e} at x = {x}")]
    InflectionPoint { x: f64, cross_norm: f64 },

    #[error("antipodal tangents between stations {from} and {to} (t_prev . t = {dot})")]
    AntipodalTangent { from: f64, to: f64, dot: f64 },

    #[error("rotation-angle derivative singular at x = {x} (t_prev . t = {dot})")]
    DerivativeSingularity { x: f64, dot: f64 },

    #[error("x = {x} outside the element domain [0, {length}]")]
    Domain { x: f64, length: f64 },

    #[error("degenerate tangent |r'| = {stretch:e} at x = {x}")]
    DegenerateTangent { x: f64, stretch: f64 },

    #[error("element {index}: {source}")]
    Element { index: usize, source: Box<Error> },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("joint {index}: {reason}")]
    JointConfig { index: usize, reason: String },

    #[error("Newton failed to converge at step {step}, iteration {iter}, residual {residual:e}")]
    NonConvergence { step: usize, iter: usize, residual: f64 },

    #[error("constraint drift |g| = {residual:e} exceeds {limit:e}")]
    ConstraintDrift { residual: f64, limit: f64 },

    #[error("projected stiffness is indefinite (min eigenvalue {min_eigenvalue:e})")]
    Indefinite { min_eigenvalue: f64 },

    #[error("singular linear system ({0})")]
    SingularMatrix(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn in_element(self, index: usize) -> Error {
        match self {
            e @ Error::Element { .. } => e,
            e => Error::Element { index, source: Box::new(e) },
        }
    }
}
