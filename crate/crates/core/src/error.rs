use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot compose an empty list of transfer matrices")]
    EmptyProduct,

    #[error("transfer matrix is degenerate (m22 = 0)")]
    DegenerateMatrix,

    #[error("polarizability {re} + {im}i is not a passive element")]
    ActiveElement { re: f64, im: f64 },

    #[error("absorbed fraction {target} is not reachable (maximum {max} for this real part)")]
    UnreachableAbsorption { target: f64, max: f64 },

    #[error("element positions must be strictly increasing (violated at index {index})")]
    NonMonotonePositions { index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("perfect-mirror resonance solving requires a lossless array")]
    LossyPerfectCavity,

    #[error("this operation requires partially transmitting end mirrors")]
    PerfectMirrors,

    #[error("no resonance found near k = {0}")]
    NoResonance(f64),

    #[error("lost track of the resonance while displacing element {element}")]
    TrackingLost { element: usize },

    #[error("finite difference did not converge: {coarse} (h) vs {fine} (h/2)")]
    NotConverged { coarse: f64, fine: f64 },

    #[error("plate sits exactly on an etalon resonance (sin(nkl) = 0)")]
    EtalonResonance,
}

pub type Result<T> = std::result::Result<T, Error>;
