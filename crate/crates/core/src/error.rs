use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier '{name}' at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("domain error in '{subexpression}': {reason}")]
    Domain {
        subexpression: String,
        reason: String,
    },
    #[error("point has {found} coordinates, expression needs at least {expected}")]
    PointDimension { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),

    #[error("spec format error: {0}")]
    Format(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid signature tag '{0}' (expected riemannian or lorentzian)")]
    InvalidSignature(String),

    #[error(
        "point {point:?} is within {margin} of the chart boundary in coordinate '{coordinate}'"
    )]
    ChartBoundary {
        point: Vec<f64>,
        coordinate: String,
        margin: f64,
    },
    #[error("metric eigenvalues {eigenvalues:?} do not match the {expected} signature")]
    SignatureMismatch {
        expected: String,
        eigenvalues: Vec<f64>,
    },
    #[error("metric is near-singular (|det g| = {det:e})")]
    NearSingular { det: f64 },
    #[error("Killing field is not timelike (g_L(T,T) = {norm})")]
    NotTimelike { norm: f64 },
    #[error("Killing field is not unit length (g_L(T,T) = {norm})")]
    NotUnit { norm: f64 },
    #[error("frame vectors are linearly dependent")]
    RankDeficientFrame,
    #[error("degenerate metric while completing a frame")]
    DegenerateFrame,
    #[error("expression composition failed: {0}")]
    Composition(String),

    #[error("nabla T composed with itself is not self-adjoint (asymmetry {0:e})")]
    NotSelfAdjoint(f64),
    #[error("nabla T composed with itself has a positive eigenvalue {0:e}")]
    PositiveEigenvalue(f64),
    #[error("nonzero eigenspace of nabla T composed with itself has odd dimension {dimension} (eigenvalue {eigenvalue:e})")]
    OddEigenspace { eigenvalue: f64, dimension: usize },
    #[error("frame is not adapted: pairing residual {0:e}")]
    FrameNotAdapted(f64),

    #[error("positivity requires a symmetric operator, got {0}")]
    NonSymmetric(String),
    #[error("k = {k} out of range 1..={max}")]
    KOutOfRange { k: usize, max: usize },
    #[error("p = {p} out of range for n = {n} (need n >= 3 and 1 <= p <= n/2)")]
    POutOfRange { n: usize, p: usize },
    #[error("grid error: {0}")]
    Grid(String),

    #[error("at point {point:?}: {source}")]
    AtPoint {
        point: Vec<f64>,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn at(self, point: &[f64]) -> Error {
        match self {
            e @ Error::AtPoint { .. } => e,
            e => Error::AtPoint {
                point: point.to_vec(),
                source: Box::new(e),
            },
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
