//! Centralized numerical tolerances.
//!
//! Every threshold used by constructors, checks and the verification suites
//! is defined here, grouped by what it guards. Tests pin these values; loosen
//! one only with a matching change in the suite baselines.

/// Hyperboloid constraint ⟨x,x⟩ = −1 for points.
pub const ON_SHEET: f64 = 1e-12;

/// Tangency constraint ⟨base,v⟩ = 0 for tangent vectors.
pub const TANGENT: f64 = 1e-12;

/// Unit spacelike normal constraint ⟨n,n⟩ = 1 for planes.
pub const UNIT_NORMAL: f64 = 1e-12;

/// Lorentz condition LᵀηL = η for isometries.
pub const LORENTZ: f64 = 1e-10;

/// Domain guard for arccosh in point distances: −⟨p,q⟩ ≥ 1 − DIST_DOMAIN.
pub const DIST_DOMAIN: f64 = 1e-9;

/// Points are renormalized onto the hyperboloid once the constraint drift
/// after a matrix application exceeds this.
pub const RENORM_DRIFT: f64 = 1e-13;

/// Vertex-on-face-plane incidence and half-space containment slack.
pub const FACE_INCIDENCE: f64 = 1e-9;

/// Exterior dihedral angles must lie in (EDGE_ANGLE_MIN, π − EDGE_ANGLE_MIN).
pub const EDGE_ANGLE_MIN: f64 = 1e-9;

/// Hull faces whose planes agree within this are merged into one face.
pub const COPLANAR_MERGE: f64 = 1e-10;

/// Default absolute tolerance for the Klein-model volume quadrature.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

/// Default central-difference step for family derivatives.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Chart-coordinate step for numerically computed fundamental forms.
/// Used with one Richardson level (h and h/2), so second derivatives carry
/// O(h⁴) truncation ≈ 6e-10 while the rounding term stays ≈ 1e-16/h² ≈ 4e-12.
pub const CHART_FD_STEP: f64 = 5e-3;

/// Slack for Vol*(inner) ≥ Vol*(outer) on nested bodies.
pub const MONOTONICITY_SLACK: f64 = 1e-9;

/// Consistency of H = tr(I⁻¹II) and K_e = det(I⁻¹II) inside FundamentalForms.
pub const FORMS_CONSISTENCY: f64 = 1e-10;

/// Agreement demanded between the two routes of the normal-flow integrand
/// (tensor contraction vs −4·f·K_e); a mismatch beyond this is a convention bug.
pub const CONVENTION_MISMATCH: f64 = 1e-9;

/// Residual tolerance for the Schläfli and dual-Schläfli checks on the
/// built-in families at the default stencil.
pub const VARIATION_RESIDUAL: f64 = 1e-6;
