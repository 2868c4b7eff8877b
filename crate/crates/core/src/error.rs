use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("derivative undefined at non-smooth stitch x = {x}")]
    NonSmoothStitch { x: f64 },

    #[error("target is not feasible: {0}")]
    Infeasible(String),

    #[error(
        "target lies on the boundary of the feasible region (row {row}); no smooth witness exists"
    )]
    NotStrict { row: u8 },

    #[error("invalid jet: {0}")]
    InvalidJet(String),

    #[error("invalid polyline: {0}")]
    InvalidPolyline(String),

    #[error("point ({u}, {v}) is outside the admissible triangle")]
    OutsideTriangle { u: f64, v: f64 },

    #[error("parameters violate the admissible set: {0}")]
    Inadmissible(String),

    #[error("{level} bracket [{lo}, {hi}] has no sign change ({f_lo}, {f_hi})")]
    BracketFailure {
        level: &'static str,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("gave up after {halvings} halvings; last failing condition: {condition}")]
    RetryExhausted { halvings: u32, condition: String },

    #[error("achieved {achieved:?} misses target {target:?} by more than {tol:e}")]
    ToleranceNotMet {
        target: [f64; 3],
        achieved: [f64; 3],
        tol: f64,
    },

    #[error("order {0} is not supported (0..=3)")]
    UnsupportedOrder(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
