use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not skew-symmetric (symmetric part {0:.3e})")]
    NotSkew(f64),

    #[error("matrix is not a rotation (orthogonality drift {0:.3e})")]
    NotOrthogonal(f64),

    #[error("rotation angle {angle:.6} is at or beyond the Cayley chart boundary")]
    AngleAtPi { angle: f64 },

    #[error("quad is not in C''(E): base gap {gap:.3e}")]
    IncompatibleQuad { gap: f64 },

    #[error("Newton iteration did not converge after {iter} iterations (residual {residual:.3e})")]
    NoConvergence { iter: usize, residual: f64 },

    #[error("Jacobian is singular (condition number {cond:.3e})")]
    SingularJacobian { cond: f64 },

    #[error("Legendre transform is near singular (condition number {cond:.3e})")]
    NearSingularLegendre { cond: f64 },

    #[error("system is not well posed: {var} variational + {kin} kinematic equations for dim E = {total}")]
    IllPosed { var: usize, kin: usize, total: usize },

    #[error("bundle maps are not mutually inverse (round-trip error {0:.3e})")]
    InconsistentDiffeo(f64),

    #[error("algebra element is not admissible for the momentum map (residual {0:.3e})")]
    NotInGD(f64),

    #[error("invalid inertia tensor: {0}")]
    InvalidInertia(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("step {index}: {source}")]
    AtStep {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn at_step(self, index: usize) -> Self {
        Error::AtStep {
            index,
            source: Box::new(self),
        }
    }

    /// The underlying error with any step annotation stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtStep { source, .. } => source.root(),
            e => e,
        }
    }
}
