//! Crate-wide error type. Variants carry enough context to be actionable;
//! the CLI maps them onto its exit codes (2 verification, 3 usage, 4
//! excluded space).

use thiserror::Error;

use crate::C64;

#[derive(Debug, Error)]
pub enum Error {
    /// Family/parameter combination outside the catalog (for example
    /// SO0(2,2), which is not irreducible, or p below the family's range).
    #[error("invalid space {family}{p}: {reason}", p = fmt_p(.p))]
    InvalidSpace {
        family: String,
        p: Option<u32>,
        reason: String,
    },

    /// Space is in the catalog but excluded from meromorphic continuation
    /// (even-multiplicity long roots make the density analytic, so the
    /// resolvent continues without resonances).
    #[error("space {family}{p} is excluded from continuation: {reason}", p = fmt_p(.p))]
    ExcludedSpace {
        family: String,
        p: Option<u32>,
        reason: String,
    },

    /// Evaluation requested exactly at a non-removable pole.
    #[error("evaluation at a pole: {what} at {where_}")]
    PoleHit { what: String, where_: String },

    /// z outside the admissible region for the requested operation.
    #[error("inadmissible z = {z}: {reason}")]
    InadmissibleZ { z: C64, reason: String },

    /// Quadrature nodes too close to a pole of the integrand even after the
    /// node-doubling fallback.
    #[error(
        "contour node within {distance:.3e} of a pole of the integrand \
         (need {required:.3e}) at {nodes} nodes"
    )]
    PoleProximity {
        distance: f64,
        required: f64,
        nodes: usize,
    },

    /// Trapezoidal refinement hit the node cap before meeting the relative
    /// tolerance.
    #[error(
        "quadrature did not converge: rel. change {achieved:.3e} > {wanted:.3e} \
         at {nodes} nodes"
    )]
    QuadratureDivergence {
        achieved: f64,
        wanted: f64,
        nodes: usize,
    },

    /// No deformation radius satisfies both the ellipse clearance and the
    /// pole-set condition for the given z.
    #[error("no admissible deformation radius for z = {z}: {reason}")]
    NoValidRadius { z: C64, reason: String },

    /// Path passed within the safety margin of a branch point during
    /// continuation.
    #[error("continuation path within {distance:.3e} of branch point {location} (ell = {ell})")]
    BranchPointProximity {
        ell: usize,
        location: C64,
        distance: f64,
    },

    /// Resonance sits exactly at a branch point of its own chart coordinate
    /// (|z| = L_n); the local residue machinery does not apply there.
    #[error(
        "degenerate chart: resonance at |z| = L_{n} exactly \
         (4*radius_sq = {four_radius_sq}); local coordinate branches there"
    )]
    DegenerateChart { n: usize, four_radius_sq: i64 },

    /// A verification suite found a mismatch.
    #[error("verification failed [{suite}]: {detail}")]
    VerificationFailure { suite: String, detail: String },

    /// Malformed CLI input.
    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn fmt_p(p: &Option<u32>) -> String {
    match p {
        Some(p) => format!("(p={p})"),
        None => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// CLI exit code for this error: 2 verification failure, 3 usage,
    /// 4 excluded space, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::VerificationFailure { .. } => 2,
            Error::Usage(_) | Error::InvalidSpace { .. } => 3,
            Error::ExcludedSpace { .. } => 4,
            _ => 1,
        }
    }
}
