use thiserror::Error;

/// Every failure the library reports.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid interval [{a}, {b}] or node count {n}")]
    InvalidInterval { n: usize, a: f64, b: f64 },
    #[error("invalid sphere grid counts {n_theta}x{n_phi}")]
    InvalidCounts { n_theta: usize, n_phi: usize },
    #[error("argument {re}{im:+}i lies on the branch cut")]
    BranchCut { re: f64, im: f64 },
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("samples must be on a uniform grid")]
    NonUniformGrid,
    #[error("spatial origin has no direction")]
    DegenerateOrigin,
    #[error("value {0} outside the domain of the map")]
    Domain(f64),
    #[error("point (t={t}, |x|={r}) is outside the double cone")]
    OutsideCone { t: f64, r: f64 },
    #[error("bump support leaves the unit disc (|c| + r = {0})")]
    SupportLeavesDisc(f64),
    #[error("negative mass {0}")]
    NegativeMass(f64),
    #[error("mass mismatch: {0} vs {1}")]
    MassMismatch(f64, f64),
    #[error("grid mismatch between operands")]
    GridMismatch,
    #[error("regularization requires Im(t) != 0")]
    Unregularized,
    #[error("extrapolation unstable: error estimate {estimate:e} above {tolerance:e}")]
    ExtrapolationUnstable { estimate: f64, tolerance: f64 },
    #[error("truncation at the edge of the log grid: {0:e} relative")]
    ResampleFailure(f64),
    #[error("imaginary residue {0:e} above tolerance")]
    ImaginaryResidue(f64),
    #[error("parameter outside the strip 0 <= Im(tau) <= 2pi: {0}")]
    StripViolation(f64),
    #[error("flow left the closed double cone")]
    FlowLeftCone,
    #[error("fit unstable: residual {0:e}")]
    FitUnstable(f64),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
