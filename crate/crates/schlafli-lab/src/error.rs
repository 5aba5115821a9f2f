//! Error type shared across the crate.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    /// A 4-vector that should lie on the upper hyperboloid sheet does not.
    #[error("point is off the hyperboloid sheet: {0}")]
    OffSheet(String),

    /// A direction vector with non-positive spacelike norm where one is required.
    #[error("degenerate direction: {0}")]
    DegenerateDirection(String),

    /// Translation length ≤ 0 or an otherwise non-loxodromic request.
    #[error("non-loxodromic: {0}")]
    NonLoxodromic(String),

    /// Convex hull could not be built from the input points.
    #[error("degenerate hull: {0}")]
    DegenerateHull(String),

    /// Input point lies outside the open unit Klein ball.
    #[error("point outside the unit Klein ball: |y| = {0}")]
    OutsideKleinBall(f64),

    /// Adaptive quadrature failed to reach the requested tolerance.
    #[error("quadrature did not converge: requested tol {tol:e}, estimated error {estimate:e}")]
    QuadratureBudget { tol: f64, estimate: f64 },

    /// The face lattice changed somewhere inside a finite-difference stencil.
    #[error("combinatorial change inside stencil at t = {0}")]
    CombinatorialChange(f64),

    /// Imaginary part of a complex length jumped branches inside a stencil.
    #[error("branch crossing in complex length near t = {0}")]
    BranchCrossing(f64),

    /// Word evaluates to an elliptic or parabolic element.
    #[error("word {index} ({word:?}) is not loxodromic: |Re lambda| = {re:e}")]
    NotLoxodromic { index: usize, word: String, re: f64 },

    /// Refinement split would destroy local convexity.
    #[error("non-convex split: {0}")]
    NonConvexSplit(String),

    /// Chain half-spaces fail the local convexity checks.
    #[error("non-convex chain: {0}")]
    NonConvexChain(String),

    /// The two routes for ⟨δI, HI − II⟩ disagree beyond tolerance.
    #[error("convention mismatch in normal-flow integrand: |{0:e}|")]
    ConventionMismatch(f64),

    /// Unknown builtin family, suite or deformation name.
    #[error("unknown name: {0}")]
    UnknownName(String),

    /// Malformed input file or JSON value.
    #[error("bad input{}: {msg}", path.as_ref().map(|p| format!(" at {p}")).unwrap_or_default())]
    BadInput { path: Option<String>, msg: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn bad_input(msg: impl Into<String>) -> Self {
        Error::BadInput { path: None, msg: msg.into() }
    }

    pub fn bad_input_at(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::BadInput { path: Some(path.into()), msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
