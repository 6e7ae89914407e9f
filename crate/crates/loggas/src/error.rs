use crate::mpnum::Cx;

pub type Result<T> = std::result::Result<T, Error>;

/// Crate-wide error type. Numerical failures carry enough context to diagnose
/// the run that produced them.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("quadrature did not converge after max refinement; last two estimates {prev} and {last}")]
    QuadratureNonConvergence { prev: Cx, last: Cx },

    #[error("step size underflow near unresolved singularity; last point {last_point}")]
    StepUnderflow { last_point: Cx },

    #[error("root continuation collided with a branch point near t = {t}")]
    ContinuationCollision { t: Cx },

    #[error("classifier endpoint 2x^3 = {s} is within tolerance of the pole at 0")]
    ClassifierPole { s: Cx },

    #[error("branch selection ambiguity at sample {sample}: mapped x = {x} falls outside the one-cut x-region")]
    BranchAmbiguity { sample: usize, x: Cx },

    #[error("critical-graph topology mismatch: expected {expected}, traced {found}")]
    TopologyMismatch { expected: String, found: String },

    #[error("required arc {0} absent from critical graph")]
    MissingArc(String),

    #[error("negative equilibrium density {value} at {z}; branch misassignment")]
    NegativeDensity { z: Cx, value: f64 },

    #[error("extrapolated limit did not stabilize: estimates {0}, {1}, {2}")]
    ExtrapolationDiverged(Cx, Cx, Cx),

    #[error("|h_{n}| underflow (possible degenerate non-Hermitian orthogonality)")]
    DegenerateOrthogonality { n: usize },

    #[error("contour too short: tail truncation bound unreachable (need |e^-NV| < 2^-{need_log2} on the tail)")]
    TailTruncation { need_log2: i64 },

    #[error("evaluation point {z} is within tolerance of a branch point")]
    NearBranchPoint { z: Cx },

    #[error("on-cut evaluation at {z} requires a side flag")]
    SideRequired { z: Cx },

    #[error("integration path crosses a phase-boundary arc near {t}")]
    PathCrossesBoundary { t: Cx },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
