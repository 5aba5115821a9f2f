//! Equidistant-surface geometry: fundamental forms of ε-surfaces from planes
//! and lines, tube volumes over flat pieces / bending lines / vertices, the
//! ε-expansion of dual volumes, finitely bent chains with refinement, and the
//! convexity margin of deformed support surfaces.
//!
//! Conventions: shape operator B = −D_Uν with the normal ν pointing outwards
//! the ε-neighborhood, so convex bodies have II ≤ 0. The ε-surface of a plane
//! carries I = cosh²ε g_P and II = −tanh ε I; the ε-surface of a line carries
//! I = cosh²ε ds² + sinh²ε dθ² and II = −cosh ε sinh ε (ds² + dθ²).

use nalgebra::{Matrix2, Vector2, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minkowski::{mcross, mdot, HGeodesic, HPlane, Isometry, MPoint, TangentVec};
use crate::numerics::{pencil_eigenvalues, richardson};
use crate::polyhedra::ConvexPolyhedron;
use crate::tol;

/// First and second fundamental forms with derived curvatures, in a declared
/// 2D chart basis.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FundamentalForms {
    #[serde(skip)]
    pub i: Matrix2<f64>,
    #[serde(skip)]
    pub ii: Matrix2<f64>,
    pub h: f64,
    pub k_e: f64,
}

impl FundamentalForms {
    /// Build from I and II; H and K_e come from the shape operator I⁻¹II.
    pub fn new(i: Matrix2<f64>, ii: Matrix2<f64>) -> Result<Self> {
        if i[(0, 0)] <= 0.0 || i.determinant() <= 0.0 {
            return Err(Error::bad_input("first fundamental form must be positive definite"));
        }
        let sym = (i[(0, 1)] - i[(1, 0)]).abs() + (ii[(0, 1)] - ii[(1, 0)]).abs();
        if sym > 1e-8 {
            return Err(Error::bad_input(format!("forms must be symmetric, residual {sym:e}")));
        }
        let b = i.try_inverse().unwrap() * ii;
        Ok(FundamentalForms { i, ii, h: b.trace(), k_e: b.determinant() })
    }

    /// Build from all four fields, checking H = tr(I⁻¹II) and K_e = det(I⁻¹II).
    pub fn from_all(i: Matrix2<f64>, ii: Matrix2<f64>, h: f64, k_e: f64) -> Result<Self> {
        let forms = Self::new(i, ii)?;
        let scale = 1.0 + h.abs() + k_e.abs();
        if (forms.h - h).abs() > tol::FORMS_CONSISTENCY * scale
            || (forms.k_e - k_e).abs() > tol::FORMS_CONSISTENCY * scale
        {
            return Err(Error::bad_input(format!(
                "H/K_e inconsistent with forms: {} vs {h}, {} vs {k_e}",
                forms.h, forms.k_e
            )));
        }
        Ok(FundamentalForms { i, ii, h, k_e })
    }

    /// Eigenvalues of the shape operator (principal curvatures), ascending.
    pub fn principal_curvatures(&self) -> (f64, f64) {
        pencil_eigenvalues(&self.i, &self.ii)
    }

    /// II negative semi-definite up to `slack` (convexity with our sign).
    pub fn is_convex(&self, slack: f64) -> bool {
        self.principal_curvatures().1 <= slack
    }
}

/// Scalar product on 2-tensors induced by I: ⟨A,B⟩ = tr(I⁻¹A I⁻¹B).
pub fn tensor_dot(i: &Matrix2<f64>, a: &Matrix2<f64>, b: &Matrix2<f64>) -> f64 {
    let inv = i.try_inverse().expect("metric invertible");
    (inv * a * inv * b).trace()
}

// ---------------------------------------------------------------------------
// ε-surfaces from planes and lines
// ---------------------------------------------------------------------------

/// Projective disk chart of a plane: p(u) = (q₀ + u₁τ₁ + u₂τ₂)/√(1−|u|²),
/// |u| < 1, with (q₀, τ₁, τ₂) an orthonormal frame of the plane. The induced
/// metric is the 2D Klein form ((1−|u|²)δ + u uᵀ)/(1−|u|²)².
#[derive(Debug, Clone, Copy)]
pub struct PlaneChart {
    pub plane: HPlane,
    q0: MPoint,
    t1: Vector4<f64>,
    t2: Vector4<f64>,
}

impl PlaneChart {
    pub fn new(plane: HPlane) -> Result<Self> {
        let q0 = plane.foot(&MPoint::origin());
        let seed = if plane.normal()[1].abs() < 0.9 {
            Vector4::new(0.0, 1.0, 0.0, 0.0)
        } else {
            Vector4::new(0.0, 0.0, 1.0, 0.0)
        };
        let raw = TangentVec::project(q0, seed);
        let t1 = TangentVec {
            base: q0,
            v: raw.v - mdot(&raw.v, plane.normal()) * plane.normal(),
        }
        .normalized()?;
        let t2 = TangentVec { base: q0, v: mcross(q0.coords(), plane.normal(), &t1.v) }
            .normalized()?;
        Ok(PlaneChart { plane, q0, t1: t1.v, t2: t2.v })
    }

    pub fn point(&self, u: Vector2<f64>) -> Result<MPoint> {
        let r2 = u.norm_squared();
        if r2 >= 1.0 {
            return Err(Error::bad_input("chart coordinate outside the unit disk"));
        }
        MPoint::renormalized(self.q0.coords() + u.x * self.t1 + u.y * self.t2)
    }

    /// Induced plane metric at `u` in this chart basis.
    pub fn metric(&self, u: Vector2<f64>) -> Matrix2<f64> {
        let r2 = u.norm_squared();
        let d = (1.0 - r2).powi(2);
        Matrix2::new(
            (1.0 - r2 + u.x * u.x) / d,
            u.x * u.y / d,
            u.x * u.y / d,
            (1.0 - r2 + u.y * u.y) / d,
        )
    }

    /// Normal exponential η_ε(u) = exp_{p(u)}(ε ν), with ν the plane normal
    /// pointing out of the half-space.
    pub fn eta(&self, eps: f64, u: Vector2<f64>) -> Result<MPoint> {
        let p = self.point(u)?;
        MPoint::renormalized(eps.cosh() * p.coords() + eps.sinh() * self.plane.normal())
    }

    /// Outward unit normal of the ε-surface at chart point `u`.
    pub fn eta_normal(&self, eps: f64, u: Vector2<f64>) -> Result<TangentVec> {
        let p = self.point(u)?;
        let v = eps.sinh() * p.coords() + eps.cosh() * self.plane.normal();
        TangentVec::new(self.eta(eps, u)?, v)
    }
}

/// Closed-form fundamental forms of the plane ε-surface in the disk chart:
/// I = cosh²ε g_P, II = −tanh ε I, H = −2 tanh ε, K_e = tanh²ε.
pub fn plane_tube_forms(chart: &PlaneChart, eps: f64, u: Vector2<f64>) -> Result<FundamentalForms> {
    if eps <= 0.0 {
        return Err(Error::bad_input("plane tube needs eps > 0"));
    }
    let g = chart.metric(u);
    let i = eps.cosh().powi(2) * g;
    let ii = -eps.tanh() * i;
    FundamentalForms::from_all(i, ii, -2.0 * eps.tanh(), eps.tanh().powi(2))
}

/// Embedding ψ_ε(s,θ) of the ε-surface around the standard axis
/// (cosh s, sinh s, 0, 0), with parallel frame e₁ = ê₂, e₂ = ê₃.
pub fn line_psi_embedding(eps: f64, s: f64, theta: f64) -> MPoint {
    let x = Vector4::new(
        eps.cosh() * s.cosh(),
        eps.cosh() * s.sinh(),
        eps.sinh() * theta.cos(),
        eps.sinh() * theta.sin(),
    );
    MPoint::renormalized(x).expect("psi stays on the sheet")
}

/// Closed-form fundamental forms of the line ε-surface in the (s,θ) chart:
/// I = cosh²ε ds² + sinh²ε dθ², II = −cosh ε sinh ε (ds² + dθ²); principal
/// curvatures −tanh ε and −coth ε, so K_e = 1 for every ε > 0.
pub fn line_tube_forms(eps: f64, _s: f64, _theta: f64) -> Result<FundamentalForms> {
    if eps <= 0.0 {
        return Err(Error::bad_input("line tube chart degenerates at eps = 0 (sinh eps = 0)"));
    }
    let i = Matrix2::new(eps.cosh().powi(2), 0.0, 0.0, eps.sinh().powi(2));
    let ii = -eps.cosh() * eps.sinh() * Matrix2::identity();
    FundamentalForms::from_all(i, ii, -(eps.tanh() + 1.0 / eps.tanh()), 1.0)
}

/// Fundamental forms of an arbitrary chart map by Richardson-refined central
/// differences. `outward_hint` fixes the normal sign: the computed ν has
/// positive Minkowski product with it.
pub fn numeric_forms<F>(chart: F, u: Vector2<f64>, outward_hint: &Vector4<f64>) -> Result<FundamentalForms>
where
    F: Fn(Vector2<f64>) -> Result<MPoint>,
{
    let h = tol::CHART_FD_STEP;
    let eval = |du: Vector2<f64>| -> Result<Vector4<f64>> { Ok(*chart(u + du)?.coords()) };
    let first = |h: f64, k: usize| -> Result<Vector4<f64>> {
        let mut e = Vector2::zeros();
        e[k] = h;
        Ok((eval(e)? - eval(-e)?) / (2.0 * h))
    };
    let second_diag = |h: f64, k: usize| -> Result<Vector4<f64>> {
        let mut e = Vector2::zeros();
        e[k] = h;
        Ok((eval(e)? - 2.0 * eval(Vector2::zeros())? + eval(-e)?) / (h * h))
    };
    let second_mixed = |h: f64| -> Result<Vector4<f64>> {
        let (pp, pm) = (Vector2::new(h, h), Vector2::new(h, -h));
        Ok((eval(pp)? - eval(pm)? - eval(-pm)? + eval(-pp)?) / (4.0 * h * h))
    };
    // One Richardson level: D = (4 D(h/2) − D(h)) / 3.
    let refine = |coarse: Vector4<f64>, fine: Vector4<f64>| (4.0 * fine - coarse) / 3.0;

    let e1 = refine(first(h, 0)?, first(h / 2.0, 0)?);
    let e2 = refine(first(h, 1)?, first(h / 2.0, 1)?);
    let s11 = refine(second_diag(h, 0)?, second_diag(h / 2.0, 0)?);
    let s22 = refine(second_diag(h, 1)?, second_diag(h / 2.0, 1)?);
    let s12 = refine(second_mixed(h)?, second_mixed(h / 2.0)?);

    let i = Matrix2::new(mdot(&e1, &e1), mdot(&e1, &e2), mdot(&e2, &e1), mdot(&e2, &e2));
    let base = chart(u)?;
    let mut nu = mcross(base.coords(), &e1, &e2);
    let norm2 = mdot(&nu, &nu);
    if norm2 <= 0.0 {
        return Err(Error::DegenerateDirection("chart normal is not spacelike".into()));
    }
    nu /= norm2.sqrt();
    if mdot(&nu, outward_hint) < 0.0 {
        nu = -nu;
    }
    // With B = −D_Uν and outward ν, II(U,V) = ⟨ν, D²Φ(U,V)⟩; the hyperboloid
    // normal component of the ambient second derivative drops out since
    // ⟨ν, Φ⟩ = 0.
    let ii = Matrix2::new(mdot(&nu, &s11), mdot(&nu, &s12), mdot(&nu, &s12), mdot(&nu, &s22));
    FundamentalForms::new(i, ii)
}

// ---------------------------------------------------------------------------
// Tube volumes and the dual-volume expansion
// ---------------------------------------------------------------------------

/// Base geometry of an ε-neighborhood piece.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum TubeBase {
    /// Totally geodesic patch of given area, thickened on one side.
    FlatPatch { area: f64 },
    /// Bending-line wedge: geodesic segment with an angular sector.
    Wedge { length: f64, angle: f64 },
    /// Vertex cone with the given exterior solid angle.
    VertexCone { solid_angle: f64 },
    /// Closed geodesic of the given length as a degenerate core; the bending
    /// weight of a full turn is fixed at 2π.
    SolidTorusCore { length: f64, weight: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TubeSpec {
    pub base: TubeBase,
    pub eps: f64,
}

impl TubeSpec {
    pub fn new(base: TubeBase, eps: f64) -> Result<Self> {
        if eps < 0.0 {
            return Err(Error::bad_input("eps must be >= 0"));
        }
        match &base {
            TubeBase::FlatPatch { area } if *area < 0.0 => {
                return Err(Error::bad_input("area must be >= 0"))
            }
            TubeBase::Wedge { length, angle } => {
                if *length < 0.0 || *angle < 0.0 || *angle > 2.0 * std::f64::consts::PI {
                    return Err(Error::bad_input("wedge needs length >= 0, 0 <= angle <= 2pi"));
                }
            }
            TubeBase::VertexCone { solid_angle } => {
                if *solid_angle < 0.0 || *solid_angle > 4.0 * std::f64::consts::PI {
                    return Err(Error::bad_input("solid angle must lie in [0, 4pi]"));
                }
            }
            TubeBase::SolidTorusCore { length, weight } => {
                if *length < 0.0 || *weight < 0.0 {
                    return Err(Error::bad_input("torus core needs length, weight >= 0"));
                }
            }
            _ => {}
        }
        Ok(TubeSpec { base, eps })
    }

    pub fn solid_torus(length: f64, eps: f64) -> Result<Self> {
        Self::new(TubeBase::SolidTorusCore { length, weight: 2.0 * std::f64::consts::PI }, eps)
    }
}

/// Volume of the ε-piece over the base:
/// flat A(sinh 2ε/2 + ε)/2, wedge θℓ(cosh 2ε − 1)/4,
/// cone Ω(sinh 2ε − 2ε)/4, solid torus πℓ sinh²ε.
///
/// The wedge form integrates cosh t sinh t over [0,ε]×[0,θ]×γ, which equals
/// (cosh 2ε − 1)/4 per unit length and angle.
pub fn tube_volume(spec: &TubeSpec) -> f64 {
    let e = spec.eps;
    match spec.base {
        TubeBase::FlatPatch { area } => area * ((2.0 * e).sinh() / 2.0 + e) / 2.0,
        TubeBase::Wedge { length, angle } => angle * length * ((2.0 * e).cosh() - 1.0) / 4.0,
        TubeBase::VertexCone { solid_angle } => solid_angle * ((2.0 * e).sinh() - 2.0 * e) / 4.0,
        TubeBase::SolidTorusCore { length, .. } => {
            std::f64::consts::PI * length * e.sinh().powi(2)
        }
    }
}

/// ∫ H da over the ε-surface of a finitely bent boundary with Euler
/// characteristic χ ≤ 0 and bending length ℓμ: −2π|χ| sinh 2ε − ℓμ cosh 2ε.
pub fn mean_curvature_integral(chi: i64, l_mu: f64, eps: f64) -> Result<f64> {
    if chi > 0 {
        return Err(Error::bad_input("boundary Euler characteristic must be <= 0"));
    }
    if l_mu < 0.0 || eps < 0.0 {
        return Err(Error::bad_input("need l_mu >= 0 and eps >= 0"));
    }
    let chi = chi.unsigned_abs() as f64;
    Ok(-2.0 * std::f64::consts::PI * chi * (2.0 * eps).sinh() - l_mu * (2.0 * eps).cosh())
}

/// Dual volume of the ε-neighborhood of a core with data (Vol*₀, ℓμ, χ):
/// Vol*₀ − (ℓμ/4)(cosh 2ε − 1) − (π/2)|χ|(sinh 2ε − 2ε).
///
/// The leading term carries a plus sign: the Leibniz assembly from the tube
/// volumes and the mean-curvature integral fixes it, and the solid-torus
/// closed form −πℓ cosh²ε agrees.
pub fn core_dual_volume_expansion(vstar0: f64, l_mu: f64, chi: i64, eps: f64) -> f64 {
    let chi = chi.unsigned_abs() as f64;
    vstar0
        - l_mu / 4.0 * ((2.0 * eps).cosh() - 1.0)
        - std::f64::consts::PI / 2.0 * chi * ((2.0 * eps).sinh() - 2.0 * eps)
}

/// Closed-form dual volume of the ε-tube around a closed geodesic of length
/// ℓ: Vol(N_ε) + ½∫H da = πℓ sinh²ε − πℓ cosh 2ε = −πℓ cosh²ε.
pub fn solid_torus_dual_volume(length: f64, eps: f64) -> Result<f64> {
    let spec = TubeSpec::solid_torus(length, eps)?;
    let l_mu = 2.0 * std::f64::consts::PI * length;
    Ok(tube_volume(&spec) + 0.5 * mean_curvature_integral(0, l_mu, eps)?)
}

/// Exact face/edge/vertex assembly of the ε-neighborhood of a compact convex
/// polyhedron: volume, mean-curvature integral over S_ε, and dual volume.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NeighborhoodAssembly {
    pub eps: f64,
    pub volume: f64,
    pub mean_curvature_integral: f64,
    pub dual_volume: f64,
}

/// Assemble Vol(N_ε P), ∫_{S_ε} H da and Vol*(N_ε P) from closed forms over
/// the faces (flat pieces), edges (wedges of angle θ(e)) and vertices
/// (sphere sectors of exterior solid angle Ω_v). The decomposition by nearest
/// point is exact for convex polyhedra.
pub fn polyhedron_neighborhood(
    poly: &ConvexPolyhedron,
    quad_tol: f64,
    eps: f64,
) -> Result<NeighborhoodAssembly> {
    let base_volume = poly.volume(quad_tol)?;
    Ok(assemble_neighborhood(
        base_volume,
        poly.boundary_area(),
        poly.edge_bending_sum(),
        poly.vertex_solid_angles().iter().sum(),
        eps,
    ))
}

fn assemble_neighborhood(
    base_volume: f64,
    area: f64,
    bending: f64,
    omega: f64,
    eps: f64,
) -> NeighborhoodAssembly {
    let s2 = (2.0 * eps).sinh();
    let c2 = (2.0 * eps).cosh();
    let volume = base_volume
        + area * (s2 / 2.0 + eps) / 2.0
        + bending * (c2 - 1.0) / 4.0
        + omega * (s2 - 2.0 * eps) / 4.0;
    // Flat translates: −A sinh 2ε; wedge sectors: −θℓ cosh 2ε;
    // sphere sectors: −Ω sinh 2ε.
    let ih = -area * s2 - bending * c2 - omega * s2;
    NeighborhoodAssembly { eps, volume, mean_curvature_integral: ih, dual_volume: volume + 0.5 * ih }
}

/// Richardson-extrapolated ε → 0 limit of Vol*(N_ε P), one halving ladder of
/// `levels` nodes starting at `eps0`. Converges to the dual volume; the
/// expansion has a genuine linear term −(4π + Area(∂P))·ε from the vertex
/// sphere sectors, so the ladder eliminates exponents 1..levels−1.
pub fn dual_volume_epsilon_limit(
    poly: &ConvexPolyhedron,
    quad_tol: f64,
    eps0: f64,
    levels: usize,
) -> Result<f64> {
    let base_volume = poly.volume(quad_tol)?;
    let (area, bending) = (poly.boundary_area(), poly.edge_bending_sum());
    let omega: f64 = poly.vertex_solid_angles().iter().sum();
    let mut samples = Vec::with_capacity(levels);
    let mut eps = eps0;
    for _ in 0..levels {
        samples.push((eps, assemble_neighborhood(base_volume, area, bending, omega, eps).dual_volume));
        eps /= 2.0;
    }
    let orders: Vec<f64> = (1..levels).map(|k| k as f64).collect();
    Ok(richardson(&samples, &orders))
}

// ---------------------------------------------------------------------------
// Finitely bent chains
// ---------------------------------------------------------------------------

/// A finitely bent convex boundary model: half-spaces H₀..H_{n+1} whose
/// boundary planes all contain the direction ê₃ and meet the cross-section
/// H² = {x₃ = 0} in a convex polygonal chain. Bending lines sit at arc
/// positions s₁ < … < s_n along the chain with exterior angles θᵢ; the
/// compact window spans [w_lo, w_hi] transversally and length L along the
/// lines (Fermi coordinates).
#[derive(Debug, Clone)]
pub struct BentChain {
    half_spaces: Vec<HPlane>,
    lines: Vec<HGeodesic>,
    angles: Vec<f64>,
    positions: Vec<f64>,
    window: (f64, f64),
    window_length: f64,
}

impl BentChain {
    /// Unfold a chain from (position, exterior angle) pairs. The first
    /// half-space is {x₂ ≤ 0}; each bend rotates the boundary away from the
    /// region by its exterior angle.
    pub fn unfolded(bends: &[(f64, f64)], window: (f64, f64), window_length: f64) -> Result<Self> {
        if bends.is_empty() {
            return Err(Error::NonConvexChain("need at least one bending line".into()));
        }
        if !bends.windows(2).all(|w| w[0].0 < w[1].0) {
            return Err(Error::NonConvexChain("bend positions must be strictly increasing".into()));
        }
        if window.0 >= bends[0].0 || window.1 <= bends[bends.len() - 1].0 {
            return Err(Error::NonConvexChain("window must contain all bending lines".into()));
        }
        if window_length <= 0.0 {
            return Err(Error::NonConvexChain("window length must be positive".into()));
        }
        let total: f64 = bends.iter().map(|b| b.1).sum();
        for &(_, th) in bends {
            if !(0.0..std::f64::consts::PI).contains(&th) {
                return Err(Error::NonConvexSplit(format!("angle {th} outside [0, pi)")));
            }
        }
        if total >= std::f64::consts::PI {
            return Err(Error::NonConvexChain("total turning must stay below pi".into()));
        }

        // Walk the cross-section in the (x0,x1,x2) hyperboloid.
        let mut p = Vector3::new(1.0, 0.0, 0.0);
        let mut t = Vector3::new(0.0, 1.0, 0.0);
        let mut n = Vector3::new(0.0, 0.0, 1.0);
        let lift = |v: &Vector3<f64>| Vector4::new(v.x, v.y, v.z, 0.0);
        let e3 = Vector4::new(0.0, 0.0, 0.0, 1.0);

        let mut half_spaces = vec![HPlane::new(lift(&n))?];
        let mut lines = Vec::new();
        let mut angles = Vec::new();
        let mut positions = Vec::new();
        let mut s_prev = 0.0;
        for &(s, th) in bends {
            // Advance along the current geodesic segment.
            let d = s - s_prev;
            let (pp, tt) = (p, t);
            p = d.cosh() * pp + d.sinh() * tt;
            t = d.sinh() * pp + d.cosh() * tt;
            s_prev = s;
            let base = MPoint::renormalized(lift(&p))?;
            let dir = TangentVec::new(base, e3)?;
            lines.push(HGeodesic::new(base, dir)?);
            angles.push(th);
            positions.push(s);
            // Turn by the exterior angle, away from the region, so the
            // intersection of the half-spaces stays below the chain.
            let (tn, nn) = (th.cos() * t - th.sin() * n, th.sin() * t + th.cos() * n);
            t = tn;
            n = nn;
            half_spaces.push(HPlane::new(lift(&n))?);
        }

        let chain = BentChain {
            half_spaces,
            lines,
            angles,
            positions,
            window,
            window_length,
        };
        chain.validate()?;
        Ok(chain)
    }

    fn validate(&self) -> Result<()> {
        for w in self.half_spaces.windows(2) {
            let c = mdot(w[0].normal(), w[1].normal());
            if !(-1.0 + 1e-12..=1.0 + 1e-12).contains(&c) {
                return Err(Error::NonConvexChain(format!(
                    "consecutive planes do not meet inside H3: <n,n'> = {c}"
                )));
            }
        }
        // Every bending line must lie inside every half-space.
        for line in &self.lines {
            for y in [-0.6, 0.0, 0.6] {
                let q = line.at(y * self.window_length);
                for hs in &self.half_spaces {
                    if !hs.contains(&q, tol::FACE_INCIDENCE) {
                        return Err(Error::NonConvexChain(
                            "a bending line escapes the intersection".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn half_spaces(&self) -> &[HPlane] {
        &self.half_spaces
    }

    pub fn lines(&self) -> &[HGeodesic] {
        &self.lines
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    /// Total bending Σθᵢ collected by one transverse crossing.
    pub fn transverse_bending_sum(&self) -> f64 {
        self.angles.iter().sum()
    }

    /// Per-line window segment lengths ℓᵢ (all equal to the window length).
    pub fn line_lengths(&self) -> Vec<f64> {
        vec![self.window_length; self.lines.len()]
    }

    /// Window bending length Σ θᵢ ℓᵢ.
    pub fn window_bending_length(&self) -> f64 {
        self.window_length * self.transverse_bending_sum()
    }

    /// Face patch areas inside the window, in Fermi coordinates around the
    /// cross-section: a strip of transverse width Δs has area Δs·2 sinh(L/2).
    pub fn face_patch_areas(&self) -> Vec<f64> {
        let girth = 2.0 * (self.window_length / 2.0).sinh();
        let mut cuts = Vec::with_capacity(self.positions.len() + 2);
        cuts.push(self.window.0);
        cuts.extend_from_slice(&self.positions);
        cuts.push(self.window.1);
        cuts.windows(2).map(|w| (w[1] - w[0]) * girth).collect()
    }

    /// Volume of the ε-neighborhood over the window: flat strips plus wedges.
    pub fn tube_volume(&self, eps: f64) -> f64 {
        let flats: f64 = self
            .face_patch_areas()
            .iter()
            .map(|&a| tube_volume(&TubeSpec { base: TubeBase::FlatPatch { area: a }, eps }))
            .sum();
        let wedges: f64 = self
            .angles
            .iter()
            .map(|&th| {
                tube_volume(&TubeSpec {
                    base: TubeBase::Wedge { length: self.window_length, angle: th },
                    eps,
                })
            })
            .sum();
        flats + wedges
    }

    /// ∫H over the ε-surface of the window, assembled from the plane and line
    /// surface pieces: −(ΣA) sinh 2ε − (Σθℓ) cosh 2ε.
    pub fn mean_curvature_integral(&self, eps: f64) -> f64 {
        let area: f64 = self.face_patch_areas().iter().sum();
        -area * (2.0 * eps).sinh() - self.window_bending_length() * (2.0 * eps).cosh()
    }

    /// Replace bending line `index` (angle θ) by two lines with angles
    /// θ′ + θ″ = θ, the second at `new_position`. A zero θ″ leaves the
    /// geometry unchanged up to a null line.
    pub fn refine(&self, index: usize, split: (f64, f64, f64)) -> Result<BentChain> {
        let (th1, th2, new_pos) = split;
        if index >= self.angles.len() {
            return Err(Error::NonConvexSplit(format!("no bending line {index}")));
        }
        if th1 < 0.0 || th2 < 0.0 {
            return Err(Error::NonConvexSplit("split angles must be >= 0".into()));
        }
        let th = self.angles[index];
        if (th1 + th2 - th).abs() > 1e-12 {
            return Err(Error::NonConvexSplit(format!(
                "split angles {th1} + {th2} must telescope to {th}"
            )));
        }
        let upper = if index + 1 < self.positions.len() {
            self.positions[index + 1]
        } else {
            self.window.1
        };
        if new_pos <= self.positions[index] || new_pos >= upper {
            return Err(Error::NonConvexSplit(format!(
                "new line position {new_pos} must lie in ({}, {upper})",
                self.positions[index]
            )));
        }
        let mut bends: Vec<(f64, f64)> =
            self.positions.iter().copied().zip(self.angles.iter().copied()).collect();
        bends[index].1 = th1;
        bends.insert(index + 1, (new_pos, th2));
        BentChain::unfolded(&bends, self.window, self.window_length)
    }

    /// Whether `p` lies in the intersection of the half-spaces.
    pub fn contains(&self, p: &MPoint) -> bool {
        self.half_spaces.iter().all(|h| h.contains(p, tol::FACE_INCIDENCE))
    }

    /// Distance from `p` to the intersection of the half-spaces. Candidates
    /// are the metric feet on face strips (valid when the foot stays in all
    /// half-spaces) and the distances to the bending lines; both kinds of
    /// candidate only over-estimate, and the true nearest point is among them.
    pub fn distance(&self, p: &MPoint) -> f64 {
        if self.contains(p) {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for hs in &self.half_spaces {
            let d = hs.signed_distance(p);
            if d <= 0.0 {
                continue;
            }
            let foot = hs.foot(p);
            if self.half_spaces.iter().all(|o| o.contains(&foot, tol::FACE_INCIDENCE)) {
                best = best.min(d);
            }
        }
        for line in &self.lines {
            let alpha = -mdot(p.coords(), line.base().coords());
            let beta = mdot(p.coords(), &line.direction().v);
            let r2 = alpha * alpha - beta * beta;
            if r2 >= 1.0 {
                best = best.min(r2.sqrt().acosh());
            }
        }
        best
    }

    /// Fundamental forms sampled over the ε-surface pieces of the window:
    /// plane pieces over each face strip and line pieces over each wedge.
    pub fn surface_forms(&self, eps: f64, per_piece: usize) -> Result<Vec<FundamentalForms>> {
        let mut out = Vec::new();
        for hs in &self.half_spaces {
            let chart = PlaneChart::new(*hs)?;
            for k in 0..per_piece {
                let r = 0.3 * (k as f64 + 0.5) / per_piece as f64;
                let u = Vector2::new(r, -0.5 * r);
                out.push(plane_tube_forms(&chart, eps, u)?);
            }
        }
        for (_line, &th) in self.lines.iter().zip(&self.angles) {
            if th == 0.0 {
                continue;
            }
            for k in 0..per_piece {
                let s = self.window_length * ((k as f64 + 0.5) / per_piece as f64 - 0.5);
                out.push(line_tube_forms(eps, s, th * k as f64 / per_piece as f64)?);
            }
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Convexity margin of deformed support surfaces
// ---------------------------------------------------------------------------

/// Builtin diffeomorphism families F_t of H³ with F₀ = id.
#[derive(Debug, Clone)]
pub enum DiffeoFamily {
    /// F_t = id for all t.
    Identity,
    /// A path of isometries (screw motion with parameter t).
    IsometryPath,
    /// Klein-coordinate dilation y ↦ (1+t)y.
    KleinDilation,
}

impl DiffeoFamily {
    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "builtin:identity-v1" => Ok(DiffeoFamily::Identity),
            "builtin:isometry-path-v1" => Ok(DiffeoFamily::IsometryPath),
            "builtin:dilation-v1" => Ok(DiffeoFamily::KleinDilation),
            other => Err(Error::UnknownName(other.into())),
        }
    }

    pub fn apply(&self, t: f64, p: &MPoint) -> Result<MPoint> {
        match self {
            DiffeoFamily::Identity => Ok(*p),
            DiffeoFamily::IsometryPath => Ok(self.isometry_at(t)?.apply(p)),
            DiffeoFamily::KleinDilation => MPoint::from_klein((1.0 + t) * p.klein()),
        }
    }

    fn isometry_at(&self, t: f64) -> Result<Isometry> {
        let axis = HGeodesic::new(
            MPoint::origin(),
            TangentVec::new(MPoint::origin(), Vector4::new(0.0, 0.48, 0.6, 0.64))?.normalized()?,
        )?;
        Ok(crate::minkowski::translation_along(&axis, 0.5 * t)
            .compose(&crate::minkowski::rotation_about(&axis, 0.4 * t)))
    }
}

/// Largest eigenvalue of I_t⁻¹(II_t + tanh ε I_t) over probe points of the
/// pushed-forward ε-surface F_t(S_ε H), with forms computed numerically from
/// the deformed chart. Zero (to stencil accuracy) at t = 0; the growth rate
/// in |t| measures how fast convexity can degrade under the deformation.
pub fn convexity_margin(
    family: &DiffeoFamily,
    plane: &HPlane,
    eps: f64,
    t: f64,
    probes: &[Vector2<f64>],
) -> Result<f64> {
    if eps <= 0.0 {
        return Err(Error::bad_input("margin needs eps > 0"));
    }
    let chart = PlaneChart::new(*plane)?;
    let mut worst = f64::NEG_INFINITY;
    for &u in probes {
        let pushed = |uu: Vector2<f64>| -> Result<MPoint> { family.apply(t, &chart.eta(eps, uu)?) };
        // Outward side marker: push a point slightly beyond the surface.
        let nu0 = chart.eta_normal(eps, u)?;
        let outside = MPoint::renormalized(
            (1e-3f64).cosh() * nu0.base.coords() + (1e-3f64).sinh() * nu0.v,
        )?;
        let hint = {
            let a = family.apply(t, &outside)?;
            let b = family.apply(t, &nu0.base)?;
            a.coords() - b.coords()
        };
        let forms = numeric_forms(pushed, u, &hint)?;
        let shifted = forms.ii + eps.tanh() * forms.i;
        let (_, top) = pencil_eigenvalues(&forms.i, &shifted);
        worst = worst.max(top);
    }
    Ok(worst)
}

/// Default probe grid for margin checks.
pub fn default_margin_probes() -> Vec<Vector2<f64>> {
    let mut probes = Vec::new();
    for i in -1..=1 {
        for j in -1..=1 {
            probes.push(Vector2::new(0.18 * i as f64 + 0.03, 0.18 * j as f64 - 0.02));
        }
    }
    probes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate_adaptive, integrate_gl};

    fn base_plane() -> HPlane {
        HPlane::new(Vector4::new(0.0, 0.0, 0.0, 1.0)).unwrap()
    }

    #[test]
    fn plane_tube_forms_match_closed_identities() {
        let chart = PlaneChart::new(base_plane()).unwrap();
        let u = Vector2::new(0.2, -0.1);
        // ε → 0: I → g_P, II → 0.
        let tiny = plane_tube_forms(&chart, 1e-9, u).unwrap();
        assert!((tiny.i - chart.metric(u)).abs().max() < 1e-8);
        assert!(tiny.ii.abs().max() < 1e-8);
        let f = plane_tube_forms(&chart, 1.0, u).unwrap();
        assert!((f.h + 2.0 * 1.0f64.tanh()).abs() < 1e-12, "H(1) = {}", f.h);
        assert!((f.k_e - 1.0f64.tanh().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn plane_tube_forms_match_fd_oracle() {
        let plane = HPlane::new(Vector4::new(0.15, 0.3, -0.2, 0.95)).unwrap();
        let chart = PlaneChart::new(plane).unwrap();
        for eps in [0.3, 1.0] {
            for u in [Vector2::new(0.0, 0.0), Vector2::new(0.25, 0.1), Vector2::new(-0.2, 0.3)] {
                let closed = plane_tube_forms(&chart, eps, u).unwrap();
                let nu = chart.eta_normal(eps, u).unwrap();
                let numeric =
                    numeric_forms(|uu| chart.eta(eps, uu), u, &nu.v).unwrap();
                assert!((closed.i - numeric.i).abs().max() < 1e-8, "I mismatch");
                assert!((closed.ii - numeric.ii).abs().max() < 1e-8, "II mismatch");
                assert!((closed.h - numeric.h).abs() < 1e-8, "H mismatch");
            }
        }
    }

    #[test]
    fn line_tube_forms_match_fd_oracle() {
        for eps in [0.5, 1.1] {
            for (s, th) in [(0.0, 0.3), (0.4, 1.2), (-0.6, 2.0)] {
                let closed = line_tube_forms(eps, s, th).unwrap();
                assert!((closed.k_e - 1.0).abs() < 1e-12);
                // Chart (s,θ) ↦ ψ_ε with outward hint = radial direction.
                let hint = *line_psi_embedding(eps + 1e-3, s, th).coords()
                    - *line_psi_embedding(eps, s, th).coords();
                let numeric = numeric_forms(
                    |u| Ok(line_psi_embedding(eps, u.x, u.y)),
                    Vector2::new(s, th),
                    &hint,
                )
                .unwrap();
                assert!((closed.i - numeric.i).abs().max() < 1e-8);
                assert!((closed.ii - numeric.ii).abs().max() < 1e-8);
            }
        }
        assert!(line_tube_forms(0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn line_tube_area_element() {
        // Jacobian of ψ_ε per ds dθ is sinh ε cosh ε; at ε = 0.5 ≈ 0.58760.
        let eps = 0.5;
        let f = line_tube_forms(eps, 0.0, 0.0).unwrap();
        let area_el = f.i.determinant().sqrt();
        assert!((area_el - eps.sinh() * eps.cosh()).abs() < 1e-12);
        assert!((area_el - 0.58760).abs() < 5e-6);
    }

    #[test]
    fn tube_volumes_at_zero_eps_vanish() {
        for base in [
            TubeBase::FlatPatch { area: 2.0 },
            TubeBase::Wedge { length: 1.0, angle: 1.0 },
            TubeBase::VertexCone { solid_angle: 2.0 },
            TubeBase::SolidTorusCore { length: 1.5, weight: 2.0 * std::f64::consts::PI },
        ] {
            assert_eq!(tube_volume(&TubeSpec::new(base, 0.0).unwrap()), 0.0);
        }
    }

    #[test]
    fn wedge_volume_matches_3d_quadrature() {
        // ∭ cosh t sinh t dt dθ dℓ over [0,ε]×[0,θ₀]×[0,ℓ].
        let (theta0, l, eps) = (std::f64::consts::FRAC_PI_2, 2.0, 1.0);
        let spec = TubeSpec::new(TubeBase::Wedge { length: l, angle: theta0 }, eps).unwrap();
        let closed = tube_volume(&spec);
        let radial = integrate_gl(|t: f64| t.cosh() * t.sinh(), 0.0, eps, 16, 2);
        let quad = radial * theta0 * l;
        assert!((closed - quad).abs() < 1e-12);
        assert!((closed - 2.1694).abs() < 1e-4, "closed {closed}");
    }

    #[test]
    fn flat_volume_matches_quadrature() {
        let (area, eps) = (1.7, 0.8);
        let spec = TubeSpec::new(TubeBase::FlatPatch { area }, eps).unwrap();
        let quad = area
            * integrate_adaptive(&|t: f64| t.cosh().powi(2), 0.0, eps, 1e-12).unwrap();
        assert!((tube_volume(&spec) - quad).abs() < 1e-10);
    }

    #[test]
    fn full_cone_is_a_ball() {
        let eps = 0.75;
        let spec =
            TubeSpec::new(TubeBase::VertexCone { solid_angle: 4.0 * std::f64::consts::PI }, eps)
                .unwrap();
        let ball = std::f64::consts::PI * ((2.0 * eps).sinh() - 2.0 * eps);
        assert!((tube_volume(&spec) - ball).abs() < 1e-12);
    }

    #[test]
    fn mean_curvature_closed_form() {
        // ε → 0 leaves the bending term: −ℓμ.
        let lmu = 3.7;
        assert!((mean_curvature_integral(0, lmu, 0.0).unwrap() + lmu).abs() < 1e-15);
        assert!(mean_curvature_integral(2, 1.0, 0.1).is_err());

        // Solid torus ℓ = 2: −4π cosh 2ε against surface quadrature of H.
        let (l, eps) = (2.0, 0.45);
        let closed = mean_curvature_integral(0, 2.0 * std::f64::consts::PI * l, eps).unwrap();
        let forms = line_tube_forms(eps, 0.0, 0.0).unwrap();
        let da = forms.i.determinant().sqrt();
        let quad = integrate_gl(
            |_s| integrate_gl(|_th| forms.h * da, 0.0, 2.0 * std::f64::consts::PI, 8, 1),
            0.0,
            l,
            8,
            1,
        );
        assert!((closed - quad).abs() < 1e-8, "closed {closed} vs quad {quad}");
    }

    #[test]
    fn solid_torus_identity_three_ways() {
        for l in [1.0, 2.0] {
            for k in 1..=10 {
                let eps = 0.1 * k as f64;
                let direct = -std::f64::consts::PI * l * eps.cosh().powi(2);
                let leibniz = solid_torus_dual_volume(l, eps).unwrap();
                let expansion = core_dual_volume_expansion(
                    -std::f64::consts::PI * l,
                    2.0 * std::f64::consts::PI * l,
                    0,
                    eps,
                );
                assert!((direct - leibniz).abs() < 1e-9);
                assert!((direct - expansion).abs() < 1e-9);
            }
        }
        // ℓ=1, ε=0.3 spot value.
        let v = core_dual_volume_expansion(
            -std::f64::consts::PI,
            2.0 * std::f64::consts::PI,
            0,
            0.3,
        );
        assert!((v + std::f64::consts::PI * 0.3f64.cosh().powi(2)).abs() < 1e-12);
        assert!((v + 3.43290).abs() < 1e-4);
    }

    #[test]
    fn expansion_at_zero_eps_is_identity() {
        assert_eq!(core_dual_volume_expansion(-2.5, 7.0, -2, 0.0), -2.5);
    }

    #[test]
    fn polyhedron_assembly_limits_to_dual_volume() {
        let p = crate::polyhedra::hull(&crate::polyhedra::base_tetra()).unwrap();
        let dual = p.dual_volume(1e-11).unwrap();
        // The assembly at small ε approaches the dual volume linearly with
        // slope −ΣΩ; a 5-node halving ladder removes exponents 1..4.
        let lim = dual_volume_epsilon_limit(&p, 1e-11, 0.02, 5).unwrap();
        assert!((lim - dual).abs() < 1e-9, "limit {lim} vs dual {dual}");

        // The assembled neighborhood dual volume is monotone (it shrinks as
        // the body grows) and exceeds none of the values at smaller ε.
        let a1 = polyhedron_neighborhood(&p, 1e-11, 0.1).unwrap();
        let a2 = polyhedron_neighborhood(&p, 1e-11, 0.2).unwrap();
        assert!(a2.dual_volume < a1.dual_volume && a1.dual_volume < dual);
    }

    #[test]
    fn chain_construction_and_invariants() {
        let chain =
            BentChain::unfolded(&[(0.0, 0.4), (0.25, 0.3), (0.6, 0.5)], (-0.4, 1.0), 1.2).unwrap();
        assert_eq!(chain.half_spaces().len(), 4);
        assert_eq!(chain.lines().len(), 3);
        for (i, w) in chain.half_spaces().windows(2).enumerate() {
            let c = mdot(w[0].normal(), w[1].normal());
            assert!((c.acos() - chain.angles()[i]).abs() < 1e-12);
        }
        assert!((chain.transverse_bending_sum() - 1.2).abs() < 1e-12);
        // Degenerate and non-convex chains are rejected.
        assert!(BentChain::unfolded(&[(0.0, -0.1)], (-1.0, 1.0), 1.0).is_err());
        assert!(BentChain::unfolded(&[(0.0, 1.6), (0.1, 1.6)], (-1.0, 1.0), 1.0).is_err());
    }

    #[test]
    fn chain_surface_is_convex() {
        let chain =
            BentChain::unfolded(&[(0.0, 0.5), (0.3, 0.35)], (-0.5, 0.8), 1.0).unwrap();
        for eps in [0.05, 0.3, 1.0] {
            for f in chain.surface_forms(eps, 4).unwrap() {
                assert!(f.is_convex(1e-9), "II has positive eigenvalue at eps {eps}");
            }
        }
    }

    #[test]
    fn chain_window_assembly_matches_wedge_and_flat_forms() {
        let chain = BentChain::unfolded(&[(0.0, 0.7)], (-0.5, 0.5), 0.9).unwrap();
        let eps = 0.35f64;
        let flat_area: f64 = chain.face_patch_areas().iter().sum();
        let expect_vol = flat_area * ((2.0 * eps).sinh() / 2.0 + eps) / 2.0
            + 0.7 * 0.9 * ((2.0 * eps).cosh() - 1.0) / 4.0;
        assert!((chain.tube_volume(eps) - expect_vol).abs() < 1e-12);
        let expect_ih = -flat_area * (2.0 * eps).sinh() - 0.7 * 0.9 * (2.0 * eps).cosh();
        assert!((chain.mean_curvature_integral(eps) - expect_ih).abs() < 1e-12);
    }

    #[test]
    fn refine_telescopes_and_rejects_bad_splits() {
        let chain = BentChain::unfolded(&[(0.0, 0.8)], (-0.5, 0.9), 1.0).unwrap();
        let refined = chain.refine(0, (0.5, 0.3, 0.2)).unwrap();
        assert_eq!(refined.lines().len(), 2);
        assert!((refined.transverse_bending_sum() - 0.8).abs() < 1e-12);
        // Null split keeps the bending sum and geometry.
        let null = chain.refine(0, (0.8, 0.0, 0.2)).unwrap();
        assert!((null.transverse_bending_sum() - 0.8).abs() < 1e-12);
        assert!(chain.refine(0, (0.5, 0.5, 0.2)).is_err(), "sum must telescope");
        assert!(chain.refine(0, (0.9, -0.1, 0.2)).is_err(), "negative angle");
        assert!(chain.refine(0, (0.5, 0.3, -0.2)).is_err(), "position before the line");
    }

    #[test]
    fn equal_refinement_splits_telescope_to_theta() {
        // θ₀ split into n equal wedges along the window keeps Σθ exactly.
        let theta0 = 0.9;
        let mut chain = BentChain::unfolded(&[(0.0, theta0)], (-0.4, 0.8), 1.0).unwrap();
        for n in 1..5 {
            let idx = chain.angles().len() - 1;
            let th = chain.angles()[idx];
            let pos = chain.positions()[idx];
            chain = chain.refine(idx, (th / 2.0, th / 2.0, pos + 0.4 / (n as f64 + 1.0))).unwrap();
            assert!((chain.transverse_bending_sum() - theta0).abs() < 1e-12);
        }
    }

    #[test]
    fn refined_chain_distance_fields_converge() {
        // Distance-field oracle: refine a single wedge dyadically toward a
        // spread-out bending measure; the sampled gradients of the distance
        // field must approach the finest stage monotonically.
        let window = (-0.3, 0.6);
        let mut chain = BentChain::unfolded(&[(0.15, 0.8)], window, 1.0).unwrap();
        let mut stages = vec![chain.clone()];
        for stage in 0..4 {
            let m = chain.lines().len();
            let offset = 0.3 / f64::powi(2.0, stage + 2);
            for i in (0..m).rev() {
                let th = chain.angles()[i];
                let pos = chain.positions()[i];
                chain = chain.refine(i, (th / 2.0, th / 2.0, pos + offset)).unwrap();
            }
            stages.push(chain.clone());
        }
        let finest = stages.pop().unwrap();

        let mut probes = Vec::new();
        for i in 0..6 {
            for &x3 in &[-0.12, 0.0, 0.12] {
                probes.push(Vector3::new(-0.05 + 0.08 * i as f64, 0.3, x3));
            }
        }
        let grad = |c: &BentChain, y: Vector3<f64>| -> Vector3<f64> {
            let h = 1e-4;
            let mut g = Vector3::zeros();
            for k in 0..3 {
                let mut e = Vector3::zeros();
                e[k] = h;
                let dp = c.distance(&MPoint::from_klein(y + e).unwrap());
                let dm = c.distance(&MPoint::from_klein(y - e).unwrap());
                g[k] = (dp - dm) / (2.0 * h);
            }
            g
        };
        let deviation = |c: &BentChain| -> f64 {
            probes
                .iter()
                .map(|&y| (grad(c, y) - grad(&finest, y)).norm())
                .fold(0.0f64, f64::max)
        };
        let devs: Vec<f64> = stages.iter().map(deviation).collect();
        for probe in &probes {
            assert!(finest.distance(&MPoint::from_klein(*probe).unwrap()) > 0.05);
        }
        for w in devs.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "gradient deviation grew: {devs:?}");
        }
        assert!(*devs.last().unwrap() < devs[0], "no convergence: {devs:?}");
    }

    #[test]
    fn margin_vanishes_for_identity_and_isometries() {
        let probes = default_margin_probes();
        let plane = base_plane();
        let id = DiffeoFamily::builtin("builtin:identity-v1").unwrap();
        for eps in [0.2, 0.6] {
            let m = convexity_margin(&id, &plane, eps, 0.3, &probes).unwrap();
            assert!(m.abs() <= 1e-9, "identity margin {m:e}");
        }
        let iso = DiffeoFamily::builtin("builtin:isometry-path-v1").unwrap();
        for t in [-0.2, 0.15] {
            let m = convexity_margin(&iso, &plane, 0.4, t, &probes).unwrap();
            assert!(m.abs() <= 1e-8, "isometry margin {m:e}");
        }
    }

    #[test]
    fn margin_grows_linearly_under_dilation() {
        let probes = default_margin_probes();
        let plane = base_plane();
        let fam = DiffeoFamily::builtin("builtin:dilation-v1").unwrap();
        let eps = 0.3;
        let m0 = convexity_margin(&fam, &plane, eps, 0.0, &probes).unwrap();
        assert!(m0.abs() <= 1e-9, "margin(0) = {m0:e}");
        let ts = [-0.02, -0.01, -0.005, 0.005, 0.01, 0.02];
        let mut margins = Vec::new();
        for &t in &ts {
            margins.push(convexity_margin(&fam, &plane, eps, t, &probes).unwrap());
        }
        // A single fitted slope bounds every probe: margin(t) <= D|t|.
        let d = ts
            .iter()
            .zip(&margins)
            .map(|(t, m)| m / t.abs())
            .fold(0.0f64, f64::max);
        assert!(d.is_finite() && d < 50.0, "fitted D = {d}");
        for (t, m) in ts.iter().zip(&margins) {
            assert!(*m <= d * t.abs() + 1e-12);
        }
        // O(|t|) evidence: per sign the ratio margin/t is nearly constant
        // (expanding and shrinking dilation pick different eigen branches).
        for sign in [-1.0, 1.0] {
            let r: Vec<f64> = ts
                .iter()
                .zip(&margins)
                .filter(|(t, _)| t.signum() == sign)
                .map(|(t, m)| (m / t.abs()).abs())
                .collect();
            let (lo, hi) = (
                r.iter().cloned().fold(f64::INFINITY, f64::min),
                r.iter().cloned().fold(0.0f64, f64::max),
            );
            assert!(hi / lo < 1.5, "ratios not linear: {r:?}");
        }
    }
}
