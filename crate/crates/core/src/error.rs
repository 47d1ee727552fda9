//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("chart `{chart}` is degenerate at (s, t) = ({s:.6}, {t:.6}): |r_s x r_t| = {mag:.3e}; keep nodes strictly interior to polar directions (the Gauss-Legendre rule offsets them automatically)")]
    DegenerateChart {
        chart: String,
        s: f64,
        t: f64,
        mag: f64,
    },

    #[error("first fundamental form is not positive definite: EG - F^2 = {det:.6e}")]
    IndefiniteMetric { det: f64 },

    #[error("curvature data violates H^2 >= K: H^2 = {h_squared:.6e}, K = {k:.6e}")]
    InvalidCurvaturePair { h_squared: f64, k: f64 },

    #[error("resolution {n_s}x{n_t} too coarse: at least 4 nodes per direction")]
    ResolutionTooCoarse { n_s: usize, n_t: usize },

    #[error("quadrature `{0}` has no nodes")]
    EmptyQuadrature(String),

    #[error("mesh parse error at line {line}: {message}")]
    MeshParse { line: usize, message: String },

    #[error("open surface: edge ({a}, {b}) borders a single triangle")]
    MeshOpenBoundary { a: usize, b: usize },

    #[error("non-manifold edge ({a}, {b}) shared by {count} triangles")]
    MeshNonManifold { a: usize, b: usize, count: usize },

    #[error("inconsistent winding across edge ({a}, {b}); mesh is not orientable as given")]
    MeshInconsistentWinding { a: usize, b: usize },

    #[error("nodes {i} and {j} nearly coincide: distance {dist:.3e} <= {threshold:.3e}")]
    CoincidentNodes {
        i: usize,
        j: usize,
        dist: f64,
        threshold: f64,
    },

    #[error("kernel evaluation requires x != y")]
    CoincidentKernelPoints,

    #[error("vector length {got} does not match matrix size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-positive quadrature weight w[{index}] = {weight:.6e}")]
    NonPositiveWeight { index: usize, weight: f64 },

    #[error("inversion center ({x:.4}, {y:.4}, {z:.4}) lies on or too close to the surface: distance {dist:.3e} < {threshold:.3e}")]
    InversionCenterOnSurface {
        x: f64,
        y: f64,
        z: f64,
        dist: f64,
        threshold: f64,
    },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("eigensolver failed: {0}")]
    EigenSolver(String),

    #[error("invalid fit window [{j_min}, {j_max}] for {n} values")]
    InvalidWindow { j_min: usize, j_max: usize, n: usize },

    #[error("covector xi must be nonzero")]
    ZeroCovector,

    #[error("point is not conformal (E = G, F = 0 required); use the coordinate-free Weyl density instead")]
    NonConformalPoint,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
