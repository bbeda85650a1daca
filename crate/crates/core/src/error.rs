use crate::C64;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("singular point at {0}")]
    SingularPoint(C64),
    #[error("branch undefined: point lies {distance:.3e} from the anchoring contour")]
    BranchUndefined { distance: f64 },
    #[error("contour comes within {distance:.3e} of the singular set (margin {margin})")]
    ContourTooCloseToSingularity { distance: f64, margin: f64 },
    #[error("invalid epsilon profile: {0}")]
    InvalidProfile(&'static str),
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("invalid parameters: {0}")]
    InvalidParameters(&'static str),
    #[error("no bound states: A = {0} must exceed 1")]
    NoBoundStates(f64),
    #[error("cubic for delta is degenerate at beta = 0; use the linear root")]
    DegenerateCubic,
    #[error("delta must be positive, got {0}")]
    InvalidDelta(f64),
    #[error("N = {n} is not admissible (A - N - 1 = {delta} <= 0)")]
    InadmissibleN { n: u32, delta: f64 },
    #[error("no normalizable state for N = {0} and the requested branch")]
    NoSuchState(u32),
    #[error("bad hypergeometric parameters: {0}")]
    BadParameters(&'static str),
    #[error("grid too coarse: {points} points, need at least {required}")]
    GridTooCoarse { points: usize, required: usize },
    #[error("winding number {0} is not close to an integer; refine the grid")]
    WindingNotInteger(f64),
    #[error("decay tail too short: {points} points, need at least {required}")]
    TailTooShort { points: usize, required: usize },
    #[error("grid is not symmetric about t = 0")]
    AsymmetricGrid,
    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),
    #[error("shift coincides with an eigenvalue")]
    ShiftIsEigenvalue,
    #[error("operator dimension {dim} exceeds dense cap {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),
    #[error("continued eigenvector cannot be trusted even {depth:.3} off the contour")]
    UntrustedContinuation { depth: f64 },
}
