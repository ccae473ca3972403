use thiserror::Error;

/// Everything that can go wrong while building potentials, evolving packets or
/// extracting scattering coefficients.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported level pair ({0}, {1}); only (2, 1) and (3, 1) are defined")]
    UnsupportedLevels(u8, u8),

    #[error("invalid value for `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("susceptibility pole at x = {x:e} m (|denominator| = {denominator:e} rad²/s²)")]
    ResonantPole { x: f64, denominator: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid resolves |k| <= {k_max:.4} but the run needs {required:.4} (v0 = {v0}, depth = {depth})")]
    Nyquist { k_max: f64, required: f64, v0: f64, depth: f64 },

    #[error("initial packet density at the domain edge is {tail:e} (> 1e-8); edges must lie at least {required:.3} from the packet center")]
    PacketTail { tail: f64, required: f64 },

    #[error("potential and wavepacket are sampled on different grids")]
    GridMismatch,

    #[error("wavefunction reached the domain boundary at tau' = {tau}: edge/peak density {ratio:e}")]
    BoundaryContact { tau: f64, ratio: f64 },

    #[error("split points ({xi_l}, {xi_r}) must be ordered and lie inside [{xi_min}, {xi_max}]")]
    SplitOutsideGrid { xi_l: f64, xi_r: f64, xi_min: f64, xi_max: f64 },

    #[error("|Re V| never drops below {threshold:e} x depth on the {side} side of the well inside the grid")]
    SplitThresholdNotMet { threshold: f64, side: &'static str },

    #[error("potential has zero depth; nothing to calibrate")]
    ZeroDepth,

    #[error("piecewise potential: {0}")]
    InvalidSegments(String),

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("R + T = {sum} is not within 1e-3 of 1; run is lossy")]
    BudgetViolation { sum: f64 },

    #[error("trapping-dominated run (L = {l:.4} > 0.05); beam-splitter model invalid")]
    TrappingDominated { l: f64 },

    #[error("absorbing mask is not allowed in measurement mode")]
    MaskInMeasurement,

    #[error("{0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
