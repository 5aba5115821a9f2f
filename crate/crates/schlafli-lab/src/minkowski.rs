//! Hyperboloid-model primitives for H³.
//!
//! Points live on the upper sheet of ⟨x,x⟩ = −1 in Minkowski space with
//! signature (−,+,+,+); planes are cut out by unit spacelike normals, and
//! orientation-preserving isometries carry a dual representation: a 4×4
//! Lorentz matrix acting on the sheet and a 2×2 complex unit-determinant
//! matrix acting on the boundary sphere. The 2×2 form is authoritative for
//! traces and complex lengths.

use nalgebra::{Matrix2, Matrix4, Vector3, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::tol;

/// Minkowski inner product of signature (−,+,+,+).
#[inline]
pub fn mdot(a: &Vector4<f64>, b: &Vector4<f64>) -> f64 {
    -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

/// Minkowski metric matrix η = diag(−1,1,1,1).
pub fn eta() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::new(-1.0, 1.0, 1.0, 1.0))
}

/// Vector Minkowski-orthogonal to three given vectors, via the cofactor
/// expansion of det(·, a, b, c) with the index raised by η. Orientation is
/// only fixed up to the orientation of (a,b,c); callers align the sign.
pub fn mcross(a: &Vector4<f64>, b: &Vector4<f64>, c: &Vector4<f64>) -> Vector4<f64> {
    let minor = |i: usize| -> f64 {
        let cols: Vec<usize> = (0..4).filter(|&j| j != i).collect();
        let m = nalgebra::Matrix3::new(
            a[cols[0]], a[cols[1]], a[cols[2]],
            b[cols[0]], b[cols[1]], b[cols[2]],
            c[cols[0]], c[cols[1]], c[cols[2]],
        );
        m.determinant()
    };
    // Covector w_i = (-1)^i minor_i, then raise with η.
    let w = Vector4::new(minor(0), -minor(1), minor(2), -minor(3));
    Vector4::new(-w[0], w[1], w[2], w[3])
}

/// A point of H³ on the upper hyperboloid sheet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MPoint {
    x: Vector4<f64>,
}

impl MPoint {
    pub fn new(x: Vector4<f64>) -> Result<Self> {
        let q = mdot(&x, &x);
        if (q + 1.0).abs() > tol::ON_SHEET {
            return Err(Error::OffSheet(format!("<x,x> = {q}")));
        }
        if x[0] < 1.0 - tol::ON_SHEET {
            return Err(Error::OffSheet(format!("x0 = {} < 1", x[0])));
        }
        Ok(MPoint { x })
    }

    /// The point (1,0,0,0).
    pub fn origin() -> Self {
        MPoint { x: Vector4::new(1.0, 0.0, 0.0, 0.0) }
    }

    /// Lift of Klein-ball coordinates y, |y| < 1.
    pub fn from_klein(y: Vector3<f64>) -> Result<Self> {
        let r2 = y.norm_squared();
        if r2 >= 1.0 {
            return Err(Error::OutsideKleinBall(r2.sqrt()));
        }
        let s = (1.0 - r2).sqrt();
        Ok(MPoint { x: Vector4::new(1.0, y.x, y.y, y.z) / s })
    }

    /// Klein-ball coordinates (x₁/x₀, x₂/x₀, x₃/x₀).
    pub fn klein(&self) -> Vector3<f64> {
        Vector3::new(self.x[1], self.x[2], self.x[3]) / self.x[0]
    }

    pub fn coords(&self) -> &Vector4<f64> {
        &self.x
    }

    /// Rescale a timelike vector onto the sheet; used after matrix
    /// application to bound constraint drift.
    pub fn renormalized(x: Vector4<f64>) -> Result<Self> {
        let q = mdot(&x, &x);
        if q >= -1e-12 || x[0] <= 0.0 {
            return Err(Error::OffSheet(format!("cannot renormalize, <x,x> = {q}")));
        }
        Ok(MPoint { x: x / (-q).sqrt() })
    }

    /// Euclidean norm of the Minkowski coordinate difference. Unlike `dist`,
    /// this compares nearly equal points at full double precision (arccosh
    /// loses half the digits near 1).
    pub fn coord_gap(&self, other: &MPoint) -> f64 {
        (self.x - other.x).norm()
    }
}

/// Hyperbolic distance arccosh(−⟨p,q⟩).
pub fn dist(p: &MPoint, q: &MPoint) -> Result<f64> {
    let c = -mdot(&p.x, &q.x);
    if c < 1.0 - tol::DIST_DOMAIN {
        return Err(Error::OffSheet(format!("-<p,q> = {c} < 1")));
    }
    Ok(c.max(1.0).acosh())
}

/// A tangent vector at a base point: ⟨base, v⟩ = 0.
#[derive(Debug, Clone, Copy)]
pub struct TangentVec {
    pub base: MPoint,
    pub v: Vector4<f64>,
}

impl TangentVec {
    pub fn new(base: MPoint, v: Vector4<f64>) -> Result<Self> {
        let t = mdot(base.coords(), &v);
        if t.abs() > tol::TANGENT * (1.0 + v.norm()) {
            return Err(Error::DegenerateDirection(format!("<base,v> = {t}")));
        }
        Ok(TangentVec { base, v })
    }

    /// Project an arbitrary 4-vector onto the tangent space at `base`.
    pub fn project(base: MPoint, w: Vector4<f64>) -> Self {
        let v = w + mdot(base.coords(), &w) * base.coords();
        TangentVec { base, v }
    }

    pub fn norm_squared(&self) -> f64 {
        mdot(&self.v, &self.v)
    }

    pub fn normalized(&self) -> Result<Self> {
        let n2 = self.norm_squared();
        if n2 <= 0.0 || n2.sqrt() < 1e-300 {
            return Err(Error::DegenerateDirection("zero or non-spacelike tangent".into()));
        }
        Ok(TangentVec { base: self.base, v: self.v / n2.sqrt() })
    }
}

/// Exponential map: walks distance t·‖v‖ from the base point of `v`.
///
/// `exp_map(v, 1)` is the Riemannian exponential of v; for unit v the curve
/// t ↦ exp_map(v, t) is the unit-speed geodesic with initial velocity v.
pub fn exp_map(v: &TangentVec, t: f64) -> Result<MPoint> {
    let n2 = v.norm_squared();
    if n2 <= 0.0 {
        return Err(Error::DegenerateDirection(format!("<v,v> = {n2} must be > 0")));
    }
    let n = n2.sqrt();
    let s = t * n;
    let x = s.cosh() * v.base.coords() + s.sinh() / n * v.v;
    MPoint::renormalized(x)
}

/// A complete unit-speed geodesic γ(s) = cosh(s)·p + sinh(s)·u.
#[derive(Debug, Clone, Copy)]
pub struct HGeodesic {
    p: MPoint,
    u: TangentVec,
}

impl HGeodesic {
    pub fn new(p: MPoint, u: TangentVec) -> Result<Self> {
        Ok(HGeodesic { p, u: u.normalized()? })
    }

    /// Geodesic from `p` through `q`.
    pub fn through(p: &MPoint, q: &MPoint) -> Result<Self> {
        let u = TangentVec::project(*p, *q.coords()).normalized()?;
        Ok(HGeodesic { p: *p, u })
    }

    pub fn base(&self) -> &MPoint {
        &self.p
    }

    pub fn direction(&self) -> &TangentVec {
        &self.u
    }

    pub fn at(&self, s: f64) -> MPoint {
        MPoint { x: s.cosh() * self.p.x + s.sinh() * self.u.v }
    }

    /// Unit velocity γ'(s), a tangent vector at γ(s).
    pub fn velocity(&self, s: f64) -> TangentVec {
        TangentVec { base: self.at(s), v: s.sinh() * self.p.x + s.cosh() * self.u.v }
    }

    pub fn reversed(&self) -> Self {
        HGeodesic { p: self.p, u: TangentVec { base: self.p, v: -self.u.v } }
    }
}

/// Parallel transport of `w` along `geo` from parameter 0 to `s`.
///
/// Along a hyperboloid geodesic the orthogonal complement of span{p,u} is
/// carried unchanged while the u-component follows the velocity.
pub fn parallel_transport(w: &TangentVec, geo: &HGeodesic, s: f64) -> Result<TangentVec> {
    let dp = mdot(&w.v, geo.base().coords());
    if dp.abs() > 1e-9 * (1.0 + w.v.norm()) {
        return Err(Error::DegenerateDirection(
            "transported vector must be tangent at the geodesic base point".into(),
        ));
    }
    let a = mdot(&w.v, &geo.u.v);
    let perp = w.v - a * geo.u.v;
    let vel = geo.velocity(s);
    Ok(TangentVec { base: vel.base, v: a * vel.v + perp })
}

/// An oriented plane; the closed half-space it bounds is { x : ⟨x,n⟩ ≤ 0 }.
#[derive(Debug, Clone, Copy)]
pub struct HPlane {
    n: Vector4<f64>,
}

impl HPlane {
    /// Normalizes a spacelike normal to ⟨n,n⟩ = 1.
    pub fn new(n: Vector4<f64>) -> Result<Self> {
        let q = mdot(&n, &n);
        if q <= 0.0 {
            return Err(Error::DegenerateDirection(format!("normal has <n,n> = {q} <= 0")));
        }
        Ok(HPlane { n: n / q.sqrt() })
    }

    pub fn normal(&self) -> &Vector4<f64> {
        &self.n
    }

    /// Signed distance arcsinh(⟨p,n⟩): negative inside the half-space.
    pub fn signed_distance(&self, p: &MPoint) -> f64 {
        mdot(p.coords(), &self.n).asinh()
    }

    /// Half-space membership with slack.
    pub fn contains(&self, p: &MPoint, slack: f64) -> bool {
        mdot(p.coords(), &self.n) <= slack
    }

    /// Metric projection of `p` onto the plane.
    pub fn foot(&self, p: &MPoint) -> MPoint {
        let d = mdot(p.coords(), &self.n);
        let x = p.coords() - d * self.n;
        MPoint { x: x / (1.0 + d * d).sqrt() }
    }

    pub fn flipped(&self) -> Self {
        HPlane { n: -self.n }
    }
}

/// Signed distance from the plane, per the half-space orientation of `plane`.
pub fn plane_signed_distance(plane: &HPlane, p: &MPoint) -> f64 {
    plane.signed_distance(p)
}

/// A 2×2 complex matrix of unit determinant acting on the boundary sphere.
#[derive(Debug, Clone, Copy)]
pub struct Sl2(pub Matrix2<Complex64>);

impl Sl2 {
    pub fn new(m: Matrix2<Complex64>) -> Result<Self> {
        let d = m.determinant();
        if (d - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::NonLoxodromic(format!("det = {d} != 1")));
        }
        Ok(Sl2(m))
    }

    pub fn identity() -> Self {
        Sl2(Matrix2::identity())
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn inverse(&self) -> Self {
        let m = self.0;
        Sl2(Matrix2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]))
    }

    pub fn compose(&self, other: &Sl2) -> Self {
        Sl2(self.0 * other.0)
    }

    /// The Lorentz matrix of the induced isometry of H³, via the action
    /// X ↦ A X A† on Hermitian matrices X = x₀ + x·σ.
    pub fn to_lorentz(&self) -> Isometry {
        let a = self.0;
        let ad = a.adjoint();
        let herm = |x: &Vector4<f64>| -> Matrix2<Complex64> {
            Matrix2::new(
                Complex64::new(x[0] + x[3], 0.0),
                Complex64::new(x[1], x[2]),
                Complex64::new(x[1], -x[2]),
                Complex64::new(x[0] - x[3], 0.0),
            )
        };
        let unherm = |m: &Matrix2<Complex64>| -> Vector4<f64> {
            Vector4::new(
                0.5 * (m[(0, 0)].re + m[(1, 1)].re),
                m[(0, 1)].re,
                m[(0, 1)].im,
                0.5 * (m[(0, 0)].re - m[(1, 1)].re),
            )
        };
        let mut l = Matrix4::zeros();
        for j in 0..4 {
            let mut e = Vector4::zeros();
            e[j] = 1.0;
            let y = a * herm(&e) * ad;
            l.set_column(j, &unherm(&y));
        }
        Isometry { l, sl2: Some(*self) }
    }
}

/// An orientation- and time-orientation-preserving isometry of H³.
#[derive(Debug, Clone, Copy)]
pub struct Isometry {
    l: Matrix4<f64>,
    sl2: Option<Sl2>,
}

impl Isometry {
    pub fn new(l: Matrix4<f64>) -> Result<Self> {
        let g = eta();
        let residual = (l.transpose() * g * l - g).abs().max();
        if residual > tol::LORENTZ {
            return Err(Error::DegenerateDirection(format!(
                "not a Lorentz matrix: |L^T eta L - eta| = {residual:e}"
            )));
        }
        if l[(0, 0)] <= 0.0 {
            return Err(Error::DegenerateDirection("time-orientation reversed".into()));
        }
        if l.determinant() < 0.0 {
            return Err(Error::DegenerateDirection("orientation reversed".into()));
        }
        Ok(Isometry { l, sl2: None })
    }

    pub fn identity() -> Self {
        Isometry { l: Matrix4::identity(), sl2: Some(Sl2::identity()) }
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.l
    }

    /// The 2×2 unit-determinant form, when this isometry was built from one.
    pub fn sl2(&self) -> Option<&Sl2> {
        self.sl2.as_ref()
    }

    pub fn apply(&self, p: &MPoint) -> MPoint {
        let x = self.l * p.coords();
        let drift = (mdot(&x, &x) + 1.0).abs();
        if drift > tol::RENORM_DRIFT {
            MPoint::renormalized(x).expect("Lorentz image stays timelike")
        } else {
            MPoint { x }
        }
    }

    pub fn apply_vector(&self, v: &TangentVec) -> TangentVec {
        TangentVec { base: self.apply(&v.base), v: self.l * v.v }
    }

    pub fn apply_plane(&self, plane: &HPlane) -> HPlane {
        HPlane { n: self.l * plane.n }
    }

    pub fn apply_geodesic(&self, geo: &HGeodesic) -> HGeodesic {
        let p = self.apply(geo.base());
        let u = self.apply_vector(geo.direction());
        HGeodesic { p, u: TangentVec { base: p, v: u.v } }
    }

    pub fn compose(&self, other: &Isometry) -> Isometry {
        let sl2 = match (&self.sl2, &other.sl2) {
            (Some(a), Some(b)) => Some(a.compose(b)),
            _ => None,
        };
        Isometry { l: self.l * other.l, sl2 }
    }

    pub fn inverse(&self) -> Isometry {
        // L^{-1} = eta L^T eta for Lorentz matrices.
        let g = eta();
        Isometry { l: g * self.l.transpose() * g, sl2: self.sl2.map(|s| s.inverse()) }
    }
}

/// Shared core of loxodromics and axis rotations: the isometry with complex
/// length λ along `axis`, built in the 2×2 picture from the axis endpoints
/// and conjugation of diag(e^{λ/2}, e^{−λ/2}).
fn axis_isometry(axis: &HGeodesic, lambda: Complex64) -> Isometry {
    // Forward/backward endpoints as projective boundary spinors.
    let spinor = |v: Vector4<f64>| -> nalgebra::Vector2<Complex64> {
        // Rank-one Hermitian matrix of a future null vector.
        let x = Matrix2::new(
            Complex64::new(v[0] + v[3], 0.0),
            Complex64::new(v[1], v[2]),
            Complex64::new(v[1], -v[2]),
            Complex64::new(v[0] - v[3], 0.0),
        );
        let c0 = nalgebra::Vector2::new(x[(0, 0)], x[(1, 0)]);
        let c1 = nalgebra::Vector2::new(x[(0, 1)], x[(1, 1)]);
        let col = if c0.norm() >= c1.norm() { c0 } else { c1 };
        col / Complex64::new(col.norm(), 0.0)
    };
    let fwd = spinor(axis.base().coords() + axis.direction().v);
    let bwd = spinor(axis.base().coords() - axis.direction().v);
    // C sends fwd ↦ (1,0) (i.e. ∞) and bwd ↦ (0,1) (i.e. 0).
    let c = Matrix2::new(-bwd[1], bwd[0], -fwd[1], fwd[0]);
    let det = c.determinant();
    let c = c / det.sqrt();
    let cinv = Matrix2::new(c[(1, 1)], -c[(0, 1)], -c[(1, 0)], c[(0, 0)]);
    let half = lambda / 2.0;
    let d = Matrix2::new(half.exp(), Complex64::ZERO, Complex64::ZERO, (-half).exp());
    let a = Sl2(cinv * d * c);
    a.to_lorentz()
}

/// Loxodromic isometry translating by `l` along `axis` and rotating by
/// `twist` around it; its complex length is l + i·twist.
pub fn loxodromic(axis: &HGeodesic, l: f64, twist: f64) -> Result<Isometry> {
    if l <= 0.0 {
        return Err(Error::NonLoxodromic(format!("translation length {l} <= 0")));
    }
    Ok(axis_isometry(axis, Complex64::new(l, twist)))
}

/// Rotation by `angle` about `axis` (an elliptic isometry).
pub fn rotation_about(axis: &HGeodesic, angle: f64) -> Isometry {
    axis_isometry(axis, Complex64::new(0.0, angle))
}

/// Translation along `axis` by a signed length (identity when zero).
pub fn translation_along(axis: &HGeodesic, l: f64) -> Isometry {
    if l == 0.0 {
        return Isometry::identity();
    }
    axis_isometry(axis, Complex64::new(l, 0.0))
}

// JSON encoding: {"mink": [x0,x1,x2,x3]} or {"klein": [y1,y2,y3]}.

#[derive(Serialize, Deserialize)]
enum PointRepr {
    #[serde(rename = "mink")]
    Mink([f64; 4]),
    #[serde(rename = "klein")]
    Klein([f64; 3]),
}

impl Serialize for MPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PointRepr::Mink([self.x[0], self.x[1], self.x[2], self.x[3]]).serialize(s)
    }
}

impl<'de> Deserialize<'de> for MPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        match PointRepr::deserialize(d)? {
            PointRepr::Mink(a) => MPoint::new(Vector4::new(a[0], a[1], a[2], a[3]))
                .map_err(|e| D::Error::custom(e.to_string())),
            PointRepr::Klein(a) => MPoint::from_klein(Vector3::new(a[0], a[1], a[2]))
                .map_err(|e| D::Error::custom(e.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_point(rng: &mut impl Rng, scale: f64) -> MPoint {
        let y = Vector3::new(
            rng.gen_range(-scale..scale),
            rng.gen_range(-scale..scale),
            rng.gen_range(-scale..scale),
        );
        MPoint::from_klein(y).unwrap()
    }

    fn random_tangent(rng: &mut impl Rng, base: MPoint) -> TangentVec {
        let w = Vector4::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        TangentVec::project(base, w).normalized().unwrap()
    }

    fn random_isometry(rng: &mut impl Rng) -> Isometry {
        let p = random_point(rng, 0.3);
        let q = random_point(rng, 0.3);
        let axis = HGeodesic::through(&p, &q).unwrap();
        loxodromic(&axis, rng.gen_range(0.1..1.5), rng.gen_range(-2.0..2.0)).unwrap()
    }

    #[test]
    fn dist_along_parametrized_geodesic() {
        let p = MPoint::origin();
        let q = MPoint::new(Vector4::new(1.0f64.cosh(), 1.0f64.sinh(), 0.0, 0.0)).unwrap();
        assert!((dist(&p, &q).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(dist(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn dist_matches_arclength_quadrature() {
        // Independent oracle: integrate the Klein-model line element along the
        // straight segment joining the Klein images.
        let p = MPoint::origin();
        let q = MPoint::new(Vector4::new(2.5f64.cosh(), 0.0, 2.5f64.sinh(), 0.0)).unwrap();
        let a = p.klein();
        let b = q.klein();
        let speed = |t: f64| {
            let y = a + t * (b - a);
            let dy = b - a;
            let r2 = y.norm_squared();
            let num = (1.0 - r2) * dy.norm_squared() + y.dot(&dy).powi(2);
            (num / (1.0 - r2).powi(2)).sqrt()
        };
        let len = crate::numerics::integrate_adaptive(&speed, 0.0, 1.0, 1e-12).unwrap();
        assert!((len - 2.5).abs() < 1e-9, "quadrature length {len}");
        assert!((dist(&p, &q).unwrap() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn dist_rejects_off_sheet_input() {
        let p = MPoint::origin();
        let bad = MPoint { x: Vector4::new(0.5, 0.0, 0.0, 0.0) };
        assert!(dist(&p, &bad).is_err());
    }

    #[test]
    fn exp_map_at_zero_is_base() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = random_point(&mut rng, 0.4);
        let v = random_tangent(&mut rng, p);
        let q = exp_map(&v, 0.0).unwrap();
        assert!(p.coord_gap(&q) < 1e-12);
        assert!(exp_map(&TangentVec { base: p, v: Vector4::zeros() }, 1.0).is_err());
    }

    #[test]
    fn exp_map_group_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let p = random_point(&mut rng, 0.4);
            let v = random_tangent(&mut rng, p);
            let (s, t) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let direct = exp_map(&v, s + t).unwrap();
            let geo = HGeodesic::new(p, v).unwrap();
            let vmid = parallel_transport(&v, &geo, s).unwrap();
            let two_step = exp_map(&vmid, t).unwrap();
            assert!(direct.coord_gap(&two_step) < 1e-9);
        }
    }

    #[test]
    fn transport_preserves_velocity_and_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let p = random_point(&mut rng, 0.4);
            let u = random_tangent(&mut rng, p);
            let geo = HGeodesic::new(p, u).unwrap();
            let s = rng.gen_range(-2.0..2.0);
            let tangent_moved = parallel_transport(&geo.velocity(0.0), &geo, s).unwrap();
            assert!((tangent_moved.v - geo.velocity(s).v).norm() < 1e-12);

            let w1 = random_tangent(&mut rng, p);
            let w2 = random_tangent(&mut rng, p);
            let t1 = parallel_transport(&w1, &geo, s).unwrap();
            let t2 = parallel_transport(&w2, &geo, s).unwrap();
            assert!((mdot(&t1.v, &t2.v) - mdot(&w1.v, &w2.v)).abs() < 1e-10);
        }
    }

    #[test]
    fn transport_matches_ode_oracle() {
        // Independent oracle: RK4 on X' = <X, γ'>·γ, the transport equation
        // written in ambient Minkowski coordinates.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = random_point(&mut rng, 0.3);
        let u = random_tangent(&mut rng, p);
        let geo = HGeodesic::new(p, u).unwrap();
        let w = random_tangent(&mut rng, p);
        let s_end = 1.3;
        let rhs = |s: f64, x: &Vector4<f64>| -> Vector4<f64> {
            let gamma = geo.at(s);
            let vel = geo.velocity(s);
            mdot(x, &vel.v) * gamma.coords()
        };
        let n = 2000;
        let h = s_end / n as f64;
        let mut x = w.v;
        for k in 0..n {
            let s = k as f64 * h;
            let k1 = rhs(s, &x);
            let k2 = rhs(s + 0.5 * h, &(x + 0.5 * h * k1));
            let k3 = rhs(s + 0.5 * h, &(x + 0.5 * h * k2));
            let k4 = rhs(s + h, &(x + h * k3));
            x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        let closed = parallel_transport(&w, &geo, s_end).unwrap();
        assert!((closed.v - x).norm() < 1e-10, "ode mismatch {:e}", (closed.v - x).norm());
    }

    #[test]
    fn signed_distance_examples() {
        let plane = HPlane::new(Vector4::new(0.0, 1.0, 0.0, 0.0)).unwrap();
        let on_plane = MPoint::origin();
        assert_eq!(plane.signed_distance(&on_plane), 0.0);
        for t in [-1.0, -0.3, 0.5, 1.2] {
            let p = MPoint::new(Vector4::new(
                f64::cosh(t),
                f64::sinh(t),
                0.0,
                0.0,
            ))
            .unwrap();
            assert!((plane.signed_distance(&p) - t).abs() < 1e-12);
        }
    }

    #[test]
    fn signed_distance_matches_projection_by_minimization() {
        // Oracle: minimize dist(p, x(u)) over a projective chart of the plane.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let plane = HPlane::new(Vector4::new(0.2, 0.9, -0.3, 0.4)).unwrap();
        // Build a chart q(u) = (q0 + u1 t1 + u2 t2)/sqrt(1-|u|^2).
        let q0 = plane.foot(&MPoint::origin());
        let t1 = TangentVec::project(q0, Vector4::new(0.0, 0.3, 0.9, 0.1));
        let t1 = TangentVec {
            base: q0,
            v: t1.v - mdot(&t1.v, plane.normal()) * plane.normal(),
        }
        .normalized()
        .unwrap();
        let t2v = mcross(q0.coords(), plane.normal(), &t1.v);
        let t2 = TangentVec { base: q0, v: t2v }.normalized().unwrap();
        let chart = |u: (f64, f64)| -> MPoint {
            let x = q0.coords() + u.0 * t1.v + u.1 * t2.v;
            MPoint::renormalized(x).unwrap()
        };
        for _ in 0..5 {
            let p = random_point(&mut rng, 0.45);
            // Coordinate descent on cosh(dist).
            let f = |u: (f64, f64)| -mdot(p.coords(), chart(u).coords());
            let mut u = (0.0, 0.0);
            let mut step = 0.25;
            for _ in 0..200 {
                let mut best = (u, f(u));
                for du in [
                    (step, 0.0),
                    (-step, 0.0),
                    (0.0, step),
                    (0.0, -step),
                    (step, step),
                    (-step, -step),
                ] {
                    let cand = (u.0 + du.0, u.1 + du.1);
                    if cand.0 * cand.0 + cand.1 * cand.1 < 0.96 {
                        let val = f(cand);
                        if val < best.1 {
                            best = (cand, val);
                        }
                    }
                }
                if best.0 == u {
                    step *= 0.5;
                    if step < 1e-10 {
                        break;
                    }
                } else {
                    u = best.0;
                }
            }
            let proj_dist = dist(&p, &chart(u)).unwrap();
            let signed = plane.signed_distance(&p);
            assert!(
                (signed.abs() - proj_dist).abs() < 1e-7,
                "signed {signed}, minimized {proj_dist}"
            );
        }
    }

    #[test]
    fn foot_lies_on_plane() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let plane = HPlane::new(Vector4::new(0.1, 0.5, 0.7, -0.2)).unwrap();
        for _ in 0..10 {
            let p = random_point(&mut rng, 0.5);
            let foot = plane.foot(&p);
            assert!(plane.signed_distance(&foot).abs() < 1e-12);
            assert!((mdot(foot.coords(), foot.coords()) + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn loxodromic_standard_axis_is_diagonal() {
        let axis = HGeodesic::new(
            MPoint::origin(),
            TangentVec::new(MPoint::origin(), Vector4::new(0.0, 0.0, 0.0, 1.0)).unwrap(),
        )
        .unwrap();
        let iso = loxodromic(&axis, 2.0, 0.0).unwrap();
        let a = iso.sl2().unwrap();
        let want = 2.0 * Complex64::new(1.0, 0.0).cosh();
        assert!((a.trace() - want).norm() < 1e-12);
        // Conjugate of diag(e, e^{-1}) keeps the trace.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let conj = random_isometry(&mut rng);
        let moved = conj.compose(&iso).compose(&conj.inverse());
        let q = moved.sl2().unwrap().trace();
        assert!((q - want).norm() < 1e-9 || (q + want).norm() < 1e-9);
    }

    #[test]
    fn loxodromic_translates_axis_points_by_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let p = random_point(&mut rng, 0.3);
            let q = random_point(&mut rng, 0.3);
            let axis = HGeodesic::through(&p, &q).unwrap();
            let l = rng.gen_range(0.2..2.0);
            let tw = rng.gen_range(-2.5..2.5);
            let iso = loxodromic(&axis, l, tw).unwrap();
            let moved = iso.apply(axis.base());
            assert!((dist(axis.base(), &moved).unwrap() - l).abs() < 1e-10);
            // Moved point stays on the axis.
            let there = axis.at(l);
            let back = axis.at(-l);
            let d = there.coord_gap(&moved).min(back.coord_gap(&moved));
            assert!(d < 1e-9);
        }
        assert!(loxodromic(
            &HGeodesic::through(&MPoint::origin(), &random_point(&mut rng, 0.2)).unwrap(),
            -1.0,
            0.0
        )
        .is_err());
    }

    #[test]
    fn loxodromic_trace_is_2cosh_half_complex_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let p = random_point(&mut rng, 0.3);
            let q = random_point(&mut rng, 0.3);
            let axis = HGeodesic::through(&p, &q).unwrap();
            let l = rng.gen_range(0.2..2.0);
            let tw = rng.gen_range(-2.5..2.5);
            let iso = loxodromic(&axis, l, tw).unwrap();
            let lam = Complex64::new(l, tw);
            let want = 2.0 * (lam / 2.0).cosh();
            let got = iso.sl2().unwrap().trace();
            assert!((got - want).norm() < 1e-10 || (got + want).norm() < 1e-10);
        }
    }

    #[test]
    fn loxodromic_matches_generator_exponential_oracle() {
        // Independent oracle: exponentiate the Lorentz generator of the
        // standard-axis screw motion by a scaling-and-squaring power series,
        // then conjugate by a frame isometry carrying the standard axis over.
        let p = MPoint::from_klein(Vector3::new(0.1, -0.2, 0.15)).unwrap();
        let q = MPoint::from_klein(Vector3::new(-0.2, 0.25, 0.3)).unwrap();
        let axis = HGeodesic::through(&p, &q).unwrap();
        let (l, tw) = (0.7, 0.9);

        // Frame taking origin/e3 to (p, axis direction).
        let u = axis.direction().v;
        let e1 = TangentVec::project(p, Vector4::new(0.0, 1.0, 0.3, -0.2));
        let e1 = TangentVec {
            base: p,
            v: e1.v - mdot(&e1.v, &u) * u,
        }
        .normalized()
        .unwrap();
        let e2 = TangentVec { base: p, v: mcross(p.coords(), &e1.v, &u) }.normalized().unwrap();
        let mut frame = Matrix4::zeros();
        frame.set_column(0, p.coords());
        frame.set_column(1, &e1.v);
        frame.set_column(2, &e2.v);
        frame.set_column(3, &u);
        if frame.determinant() < 0.0 {
            let c = -frame.column(2).clone_owned();
            frame.set_column(2, &c);
        }
        let frame = Isometry::new(frame).unwrap();

        // Generator: boost in (x0,x3) with rate l, rotation in (x1,x2) with rate tw.
        let mut gen = Matrix4::zeros();
        gen[(0, 3)] = l;
        gen[(3, 0)] = l;
        gen[(1, 2)] = -tw;
        gen[(2, 1)] = tw;
        let scaled = gen / 1024.0;
        let mut expm = Matrix4::identity();
        let mut term = Matrix4::identity();
        for k in 1..20 {
            term = term * scaled / k as f64;
            expm += term;
        }
        for _ in 0..10 {
            expm *= expm;
        }
        let oracle = frame.matrix() * expm * frame.inverse().matrix();

        let iso = loxodromic(&axis, l, tw).unwrap();
        let diff = (iso.matrix() - oracle).abs().max();
        assert!(diff < 1e-10, "exp oracle mismatch {diff:e}");
    }

    #[test]
    fn isometries_preserve_distances() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..25 {
            let iso = random_isometry(&mut rng);
            let p = random_point(&mut rng, 0.5);
            let q = random_point(&mut rng, 0.5);
            let d0 = dist(&p, &q).unwrap();
            let d1 = dist(&iso.apply(&p), &iso.apply(&q)).unwrap();
            assert!((d0 - d1).abs() < 1e-10);
        }
    }

    #[test]
    fn klein_image_of_geodesic_is_straight() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let p = random_point(&mut rng, 0.4);
            let q = random_point(&mut rng, 0.4);
            let geo = HGeodesic::through(&p, &q).unwrap();
            let (a, b, c) = (geo.at(0.0).klein(), geo.at(0.35).klein(), geo.at(0.7).klein());
            // Midpoint collinearity residual of the chord.
            let ab = b - a;
            let ac = c - a;
            let cross = ab.cross(&ac).norm();
            assert!(cross / ac.norm() < 1e-10);
        }
    }

    #[test]
    fn rotation_fixes_axis_pointwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let p = random_point(&mut rng, 0.3);
        let q = random_point(&mut rng, 0.3);
        let axis = HGeodesic::through(&p, &q).unwrap();
        let rot = rotation_about(&axis, 1.1);
        for s in [-1.0, 0.0, 0.8] {
            let x = axis.at(s);
            assert!(x.coord_gap(&rot.apply(&x)) < 1e-10);
        }
        let off = exp_map(
            &TangentVec::project(p, Vector4::new(0.0, 0.4, -0.7, 0.2)),
            1.0,
        )
        .unwrap();
        assert!(dist(&off, &rot.apply(&off)).unwrap() > 1e-3);
    }

    #[test]
    fn point_json_roundtrip_and_klein_load() {
        let p = MPoint::from_klein(Vector3::new(0.2, -0.1, 0.3)).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("mink"));
        let back: MPoint = serde_json::from_str(&s).unwrap();
        assert!(p.coord_gap(&back) < 1e-12);
        let k: MPoint = serde_json::from_str(r#"{"klein": [0.2, -0.1, 0.3]}"#).unwrap();
        assert!(p.coord_gap(&k) < 1e-12);
        assert!(serde_json::from_str::<MPoint>(r#"{"klein": [0.9, 0.9, 0.9]}"#).is_err());
    }
}
