use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid signature ({p}, {q}): both indices must be at least 1")]
    InvalidSignature { p: usize, q: usize },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not in the group (residual {residual:e} > {tol:e})")]
    NotInGroup { residual: f64, tol: f64 },
    #[error("unsupported signature: {0}")]
    UnsupportedSignature(String),
    #[error("vector is not isotropic (|Q(x,x)| = {0:e})")]
    NotIsotropic(f64),

    #[error("lines {0} and {1} are not opposite")]
    NotPairwiseOpposite(usize, usize),
    #[error("orientation determinant {margin:e} below threshold")]
    AmbiguousOrientation { margin: f64 },
    #[error("Gram spectrum straddles the signature tolerance (margin {margin:e})")]
    AmbiguousSignature { margin: f64 },
    #[error("subtriple ({0}, {1}, {2}): {3}")]
    Subtriple(usize, usize, usize, Box<Error>),
    #[error("line is not in the open interval")]
    NotInInterval,
    #[error("chart point outside the unit ball (|c|^2 = {0})")]
    OutsideChart(f64),
    #[error("tuple is not maximal")]
    NotMaximal,

    #[error("element is not Shilov-hyperbolic: {0}")]
    NotShilov(String),
    #[error("spectral gap too small: |l1| - |l2| = {gap:e}")]
    SpectralGapTooSmall { gap: f64 },
    #[error("no contracting power found up to {n_max}")]
    NoPowerFound { n_max: usize },
    #[error("construction failed at {stage}")]
    ConstructionFailed { stage: String },
    #[error("containment {which} failed at sample {sample} (margin {margin:e})")]
    ContainmentFailed { which: String, sample: usize, margin: f64 },

    #[error("no fixed line found after {max_iter} iterations")]
    NoFixedLineFound { max_iter: usize },
    #[error("commutator does not map the closed interval into itself")]
    NotSelfMapping,

    #[error("{name} = {value} outside {range}")]
    OutOfRange { name: &'static str, value: f64, range: &'static str },
    #[error("quadrature too coarse: {0}")]
    QuadratureTooCoarse(String),

    #[error("bracket closure still growing at depth {depth}")]
    DepthExhausted { depth: usize },
    #[error("condition {which} failed on sample {sample} (residual {residual:e})")]
    ConditionFailed { which: &'static str, sample: usize, residual: f64 },

    #[error("points coincide")]
    CoincidentPoints,
    #[error("configuration is in the excluded set: {0}")]
    NotInGenericSet(String),
    #[error("subspaces are not transverse")]
    NotTransverse,
}

impl Error {
    /// True for errors caused by a quantity sitting inside a tolerance band,
    /// where a different tolerance could change the answer.
    pub fn is_inconclusive(&self) -> bool {
        match self {
            Error::AmbiguousOrientation { .. }
            | Error::AmbiguousSignature { .. }
            | Error::SpectralGapTooSmall { .. } => true,
            Error::Subtriple(_, _, _, inner) => inner.is_inconclusive(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
