use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid mode layout: {0}")]
    InvalidLayout(String),

    #[error("rail {rail} out of range (layout has {total} rails)")]
    RailOutOfRange { rail: usize, total: usize },

    #[error("spatial mode {mode} out of range (N = {n})")]
    ModeOutOfRange { mode: usize, n: usize },

    #[error("internal index {index} out of range (d = {d})")]
    InternalIndexOutOfRange { index: usize, d: usize },

    #[error("mode superposition is empty")]
    EmptySuperposition,

    #[error("mode superposition repeats rail {0}")]
    DuplicateRail(usize),

    #[error("states live on different mode layouts")]
    LayoutMismatch,

    #[error("operation undefined on the zero state")]
    ZeroState,

    #[error("invalid sculpting bigraph: {0}")]
    InvalidGraph(String),

    #[error("edge colour {0} is outside the matching-sum regime (needs Fourier 0 or d-1)")]
    UnsupportedColor(String),

    #[error("state has bunched residual norm {residual:.3e} above tolerance {tol:.3e}")]
    ResidualTooLarge { residual: f64, tol: f64 },

    #[error("photon count mismatch: expected {expected}, found {found}")]
    PhotonCount { expected: u32, found: u32 },

    #[error("qudit dimensions differ: ({0}, {1}) vs ({2}, {3})")]
    DimensionMismatch(usize, usize, usize, usize),

    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("reflectivity {0} outside (0, 1)")]
    InvalidReflectivity(f64),

    #[error("dot {dot} has {edges} edges; the subtraction gadget supports at most 2")]
    DotTooLarge { dot: usize, edges: usize },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
}
