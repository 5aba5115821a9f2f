//! Verification engines for the variation formulas.
//!
//! Polyhedral side: central differences of Vol and Vol* along a family
//! against ½ Σ ℓ δθ and −½ Σ θ δℓ. Smooth side: closed-form model families
//! (geodesic spheres, plane windows, line tubes) where dVol*/dt equals
//! ¼ ∫ ⟨δI, H I − II⟩ da, with the 2-tensor product induced by I. The two
//! polyhedral formulas differ by a Leibniz term that is exact algebra on the
//! edge data, so checking both pins the volume quadrature and the edge
//! derivatives independently.

use nalgebra::{Matrix2, Vector2, Vector3};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minkowski::{HPlane, MPoint};
use crate::numerics::integrate_gl;
use crate::polyhedra::{edge_data_derivative, hull, ConvexPolyhedron, PolyhedronFamily};
use crate::tol;
use crate::tubes::{tensor_dot, FundamentalForms, PlaneChart};

/// One finite-difference-vs-formula comparison.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct VariationReport {
    pub t: f64,
    /// Finite-difference derivative.
    pub lhs: f64,
    /// Formula value.
    pub rhs: f64,
    pub residual: f64,
    pub stencil: Stencil,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Stencil {
    pub h: f64,
    pub order: u32,
}

impl VariationReport {
    pub fn new(t: f64, lhs: f64, rhs: f64, h: f64) -> Self {
        VariationReport { t, lhs, rhs, residual: (lhs - rhs).abs(), stencil: Stencil { h, order: 2 } }
    }
}

/// dVol/dt against ½ Σ ℓ(e) δθ(e); both sides share the stencil `h`.
pub fn schlafli_check(
    family: &PolyhedronFamily,
    t: f64,
    h: f64,
    quad_tol: f64,
) -> Result<VariationReport> {
    let vp = family.polyhedron_at(t + h)?.volume(quad_tol)?;
    let vm = family.polyhedron_at(t - h)?.volume(quad_tol)?;
    let lhs = (vp - vm) / (2.0 * h);
    let rows = edge_data_derivative(family, t, h)?;
    let rhs = 0.5 * rows.iter().map(|r| r.length * r.d_exterior_angle).sum::<f64>();
    Ok(VariationReport::new(t, lhs, rhs, h))
}

/// dVol*/dt against −½ Σ θ(e) δℓ(e).
pub fn dual_schlafli_check(
    family: &PolyhedronFamily,
    t: f64,
    h: f64,
    quad_tol: f64,
) -> Result<VariationReport> {
    let vp = family.polyhedron_at(t + h)?.dual_volume(quad_tol)?;
    let vm = family.polyhedron_at(t - h)?.dual_volume(quad_tol)?;
    let lhs = (vp - vm) / (2.0 * h);
    let rows = edge_data_derivative(family, t, h)?;
    let rhs = -0.5 * rows.iter().map(|r| r.exterior_angle * r.d_length).sum::<f64>();
    Ok(VariationReport::new(t, lhs, rhs, h))
}

// ---------------------------------------------------------------------------
// Smooth model families
// ---------------------------------------------------------------------------

/// Closed-form smooth families of convex bodies: every member carries exact
/// I_t, II_t, H_t, area element and δI in a fixed chart basis.
#[derive(Debug, Clone)]
pub enum SmoothFamily {
    /// Geodesic sphere of radius r(t) = r0 + rate·t.
    GeodesicSphere { r0: f64, rate: f64 },
    /// ε-slab over a plane window: chart square [−half_width, half_width]²,
    /// ε(t) = eps0 + rate·t. Only the moving top surface enters Vol*.
    PlaneWindow { eps0: f64, rate: f64, half_width: f64 },
    /// Full ε-tube around a geodesic segment, ε(t) = eps0 + rate·t.
    LineTube { eps0: f64, rate: f64, length: f64 },
}

impl SmoothFamily {
    pub fn builtin(kind: &str, params: &serde_json::Value) -> Result<Self> {
        let get = |key: &str, default: f64| -> f64 {
            params.get(key).and_then(|v| v.as_f64()).unwrap_or(default)
        };
        match kind {
            "builtin:sphere-grow-v1" => {
                Ok(SmoothFamily::GeodesicSphere { r0: get("r0", 0.5), rate: get("rate", 1.0) })
            }
            "builtin:plane-window-v1" => Ok(SmoothFamily::PlaneWindow {
                eps0: get("eps0", 0.4),
                rate: get("rate", 1.0),
                half_width: get("half_width", 0.4),
            }),
            "builtin:line-tube-grow-v1" => Ok(SmoothFamily::LineTube {
                eps0: get("eps0", 0.5),
                rate: get("rate", 1.0),
                length: get("length", 2.0),
            }),
            other => Err(Error::UnknownName(other.into())),
        }
    }

    /// Normal speed of the boundary (the `f` of an outward normal flow).
    pub fn normal_speed(&self) -> f64 {
        match self {
            SmoothFamily::GeodesicSphere { rate, .. }
            | SmoothFamily::PlaneWindow { rate, .. }
            | SmoothFamily::LineTube { rate, .. } => *rate,
        }
    }

    fn parameter_at(&self, t: f64) -> f64 {
        match self {
            SmoothFamily::GeodesicSphere { r0, rate } => r0 + rate * t,
            SmoothFamily::PlaneWindow { eps0, rate, .. } => eps0 + rate * t,
            SmoothFamily::LineTube { eps0, rate, .. } => eps0 + rate * t,
        }
    }

    /// Forms in the family's chart at a representative point.
    pub fn forms_at(&self, t: f64, point: Vector2<f64>) -> Result<FundamentalForms> {
        let p = self.parameter_at(t);
        match self {
            SmoothFamily::GeodesicSphere { .. } => {
                let g = sphere_round_metric(point.x);
                let i = p.sinh().powi(2) * g;
                let ii = -p.sinh() * p.cosh() * g;
                FundamentalForms::from_all(i, ii, -2.0 / p.tanh(), 1.0 / p.tanh().powi(2))
            }
            SmoothFamily::PlaneWindow { .. } => {
                crate::tubes::plane_tube_forms(&self.plane_chart()?, p, point)
            }
            SmoothFamily::LineTube { .. } => crate::tubes::line_tube_forms(p, point.x, point.y),
        }
    }

    /// δI = dI/dt in the same chart basis; equals −2 f II for these normal
    /// flows.
    pub fn delta_i_at(&self, t: f64, point: Vector2<f64>) -> Result<Matrix2<f64>> {
        let p = self.parameter_at(t);
        let rate = self.normal_speed();
        match self {
            SmoothFamily::GeodesicSphere { .. } => {
                Ok(rate * (2.0 * p).sinh() * sphere_round_metric(point.x))
            }
            SmoothFamily::PlaneWindow { .. } => {
                let g = self.plane_chart()?.metric(point);
                Ok(rate * (2.0 * p).sinh() * g)
            }
            SmoothFamily::LineTube { .. } => Ok(rate * (2.0 * p).sinh() * Matrix2::identity()),
        }
    }

    fn plane_chart(&self) -> Result<PlaneChart> {
        PlaneChart::new(HPlane::new(nalgebra::Vector4::new(0.0, 0.0, 0.0, 1.0))?)
    }

    /// Closed-form dual volume of the body at time t (for the plane window,
    /// the contribution of the moving top surface).
    pub fn dual_volume_at(&self, t: f64) -> Result<f64> {
        let p = self.parameter_at(t);
        match self {
            SmoothFamily::GeodesicSphere { .. } => {
                if p <= 0.0 {
                    return Err(Error::bad_input("sphere radius must stay positive"));
                }
                // Vol = π(sinh 2r − 2r); ½∫H = −2π sinh 2r.
                Ok(-std::f64::consts::PI * ((2.0 * p).sinh() + 2.0 * p))
            }
            SmoothFamily::PlaneWindow { .. } => {
                let a0 = self.window_base_area()?;
                Ok(a0 * (p / 2.0 - (2.0 * p).sinh() / 4.0))
            }
            SmoothFamily::LineTube { length, .. } => {
                crate::tubes::solid_torus_dual_volume(*length, p)
            }
        }
    }

    /// g_P-area of the base window (plane-window family only), by quadrature.
    pub fn window_base_area(&self) -> Result<f64> {
        let SmoothFamily::PlaneWindow { half_width, .. } = self else {
            return Err(Error::bad_input("window area only defined for the plane window"));
        };
        let chart = self.plane_chart()?;
        let a = *half_width;
        Ok(integrate_gl(
            |x| {
                integrate_gl(
                    |y| chart.metric(Vector2::new(x, y)).determinant().sqrt(),
                    -a,
                    a,
                    16,
                    1,
                )
            },
            -a,
            a,
            16,
            1,
        ))
    }

    /// ¼ ∫ ⟨δI, H I − II⟩ da by 2D quadrature over the family's chart.
    pub fn dual_variation_integral(&self, t: f64) -> Result<f64> {
        let integrand = |point: Vector2<f64>| -> Result<f64> {
            let f = self.forms_at(t, point)?;
            let di = self.delta_i_at(t, point)?;
            let cross = f.h * f.i - f.ii;
            Ok(tensor_dot(&f.i, &di, &cross) * f.i.determinant().sqrt())
        };
        let value = match self {
            SmoothFamily::GeodesicSphere { .. } => {
                // Chart (φ, θ); the integrand is θ-independent.
                let phi = integrate_gl(
                    |x| integrand(Vector2::new(x, 0.0)).expect("sphere chart total"),
                    1e-9,
                    std::f64::consts::PI - 1e-9,
                    24,
                    2,
                );
                2.0 * std::f64::consts::PI * phi
            }
            SmoothFamily::PlaneWindow { half_width, .. } => {
                let a = *half_width;
                integrate_gl(
                    |x| {
                        integrate_gl(
                            |y| integrand(Vector2::new(x, y)).expect("window chart total"),
                            -a,
                            a,
                            16,
                            1,
                        )
                    },
                    -a,
                    a,
                    16,
                    1,
                )
            }
            SmoothFamily::LineTube { length, .. } => {
                let l = *length;
                integrate_gl(
                    |s| {
                        integrate_gl(
                            |th| integrand(Vector2::new(s, th)).expect("tube chart total"),
                            0.0,
                            2.0 * std::f64::consts::PI,
                            16,
                            1,
                        )
                    },
                    0.0,
                    l,
                    16,
                    1,
                )
            }
        };
        Ok(0.25 * value)
    }
}

// Round metric of the unit sphere in (φ, θ) coordinates at colatitude φ.
fn sphere_round_metric(phi: f64) -> Matrix2<f64> {
    Matrix2::new(1.0, 0.0, 0.0, phi.sin().powi(2))
}

/// JSON form of a smooth model family: builtin name plus parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmoothFamilySpec {
    pub kind: String,
    #[serde(default)]
    pub params: serde_json::Value,
}

impl SmoothFamilySpec {
    pub fn build(&self) -> Result<SmoothFamily> {
        SmoothFamily::builtin(&self.kind, &self.params)
    }
}

/// dVol*/dt of a smooth model family against ¼ ∫ ⟨δI, H I − II⟩ da.
pub fn smooth_dual_variation_check(family: &SmoothFamily, t: f64) -> Result<VariationReport> {
    let h = 1e-5;
    let lhs = (family.dual_volume_at(t + h)? - family.dual_volume_at(t - h)?) / (2.0 * h);
    let rhs = family.dual_variation_integral(t)?;
    Ok(VariationReport::new(t, lhs, rhs, h))
}

/// ⟨δI, H I − II⟩ for an outward normal flow of speed `f`, computed two ways:
/// tensor contraction of δI = −2 f II against H I − II, and the closed form
/// −4 f K_e. The two routes must agree to `tol::CONVENTION_MISMATCH`.
pub fn normal_flow_integrand(
    family: &SmoothFamily,
    t: f64,
    point: Vector2<f64>,
    f_speed: f64,
) -> Result<f64> {
    if f_speed < 0.0 {
        return Err(Error::bad_input("normal speed must be >= 0"));
    }
    let forms = family.forms_at(t, point)?;
    let delta_i = -2.0 * f_speed * forms.ii;
    let via_contraction = tensor_dot(&forms.i, &delta_i, &(forms.h * forms.i - forms.ii));
    let via_curvature = -4.0 * f_speed * forms.k_e;
    let gap = (via_contraction - via_curvature).abs();
    if gap > tol::CONVENTION_MISMATCH * (1.0 + via_curvature.abs()) {
        return Err(Error::ConventionMismatch(gap));
    }
    Ok(via_contraction)
}

// ---------------------------------------------------------------------------
// Monotonicity and continuity
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MonotonicityReport {
    pub contained: bool,
    /// Vol*(inner) − Vol*(outer); sound only when `contained`.
    pub margin: Option<f64>,
}

/// Vertex containment of `inner` in `outer` and, when nested, the dual
/// volume gap Vol*(inner) − Vol*(outer) (expected ≥ 0 up to quadrature).
pub fn monotonicity_check(
    inner: &ConvexPolyhedron,
    outer: &ConvexPolyhedron,
    quad_tol: f64,
) -> Result<MonotonicityReport> {
    let contained =
        inner.vertices().iter().all(|v| outer.contains(v, tol::FACE_INCIDENCE));
    if !contained {
        return Ok(MonotonicityReport { contained, margin: None });
    }
    let margin = inner.dual_volume(quad_tol)? - outer.dual_volume(quad_tol)?;
    Ok(MonotonicityReport { contained, margin: Some(margin) })
}

/// Max |Vol*(P′) − Vol*(P)| over seeded vertex perturbations of Klein norm
/// ≤ δ. Perturbation directions are fixed by the seed, so halving δ halves
/// the probe displacement exactly.
pub fn continuity_probe(
    poly: &ConvexPolyhedron,
    delta: f64,
    seed: u64,
    quad_tol: f64,
) -> Result<f64> {
    if delta == 0.0 {
        return Ok(0.0);
    }
    let base = poly.dual_volume(quad_tol)?;
    let edge_keys = |p: &ConvexPolyhedron| -> Vec<(usize, usize)> {
        let mut keys: Vec<_> = p
            .edges()
            .iter()
            .map(|e| {
                let (a, b) = e.source_vertices;
                (a.min(b), a.max(b))
            })
            .collect();
        keys.sort_unstable();
        keys
    };
    let reference = edge_keys(poly);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let moved: Vec<MPoint> = poly
            .vertices()
            .iter()
            .map(|v| {
                let dir = Vector3::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                );
                let dir = if dir.norm() > 1e-12 { dir.normalize() } else { Vector3::x() };
                MPoint::from_klein(v.klein() + delta * dir)
            })
            .collect::<Result<_>>()?;
        let perturbed = hull(&moved)?;
        if edge_keys(&perturbed) != reference {
            return Err(Error::CombinatorialChange(delta));
        }
        worst = worst.max((perturbed.dual_volume(quad_tol)? - base).abs());
    }
    Ok(worst)
}
