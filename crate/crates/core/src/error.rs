use num_complex::Complex64;
use thiserror::Error;

use crate::ode::OdeError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("SingularLimit: epsilon = 0 has no slow-time vector field; use the layer or reduced problem")]
    SingularLimit,
    #[error("DegenerateJump: jump condition undefined at u = 0")]
    DegenerateJump,
    #[error("FoldCollision: reduced orbit reaches the fold at (u, w) = ({u}, {w}) away from the canard point")]
    FoldCollision { u: f64, w: f64 },
    #[error("NoConvergence: Newton stopped after {iterations} iterations with residual {best_residual:e}")]
    NoConvergence { iterations: usize, best_residual: f64 },
    #[error("DomainTooShort: boundary projection residual {residual:e} exceeds {tol:e}")]
    DomainTooShort { residual: f64, tol: f64 },
    #[error("ContinuationStuck: minimum step reached; last converged c = {last_c}")]
    ContinuationStuck { last_c: f64 },
    #[error("BadProfileFile: {0}")]
    BadProfileFile(String),
    #[error("OutOfDomain: z = {z} outside [{lo}, {hi}]")]
    OutOfDomain { z: f64, lo: f64, hi: f64 },
    #[error("BranchPoint: lambda = {0} lies on a branch point of the spatial eigenvalues")]
    BranchPoint(Complex64),
    #[error("NearDegenerate: spatial eigenvalues within {gap:e} at lambda = {lambda}")]
    NearDegenerate { lambda: Complex64, gap: f64 },
    #[error("NoStabilisingWeight: c^2 <= 4 epsilon")]
    NoStabilisingWeight,
    #[error("DegenerateFrame: columns do not span a plane")]
    DegenerateFrame,
    #[error("NotInChart: upper block has condition number {cond:e}")]
    NotInChart { cond: f64 },
    #[error("ChartSingularity: Riccati solution left the chart near z = {z}")]
    ChartSingularity { z: f64 },
    #[error("integration failed: {0}")]
    Integration(#[from] OdeError),
    #[error("OnPath: |E| = {modulus:e} below path floor at lambda = {lambda}")]
    OnPath { lambda: Complex64, modulus: f64 },
    #[error("NonConvergentRefinement: sample budget {budget} exhausted")]
    NonConvergentRefinement { budget: usize },
    #[error("winding residual {residual} not close to an integer")]
    NonIntegerWinding { residual: f64 },
    #[error("ClusterUnresolved: winding {winding} in cell centred at {centre} at minimum size")]
    ClusterUnresolved { winding: i64, centre: Complex64 },
    #[error("RootLost: root tracking failed at c = {c}")]
    RootLost { c: f64 },
    #[error("internal consistency check failed: {0}")]
    Internal(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerics, as opposed to bad input or IO.
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::InvalidParams(_) | Error::Config(_) | Error::Io(_) | Error::BadProfileFile(_))
    }
}
