//! Holonomy representations, complex lengths, rational measured laminations,
//! and first variations of length.
//!
//! Lengths are computed from traces, never from orbit geometry: a loxodromic
//! with trace tr has complex length λ = 2 arccosh(tr/2) ∈ ℂ/2πiℤ, normalized
//! to Re λ > 0 and Im λ ∈ (−π, π]. The trace-sign ambiguity of the 2×2 form
//! is absorbed by the branch normalization.

use nalgebra::{Matrix2, Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minkowski::Sl2;
use crate::numerics::integrate_adaptive;

/// A finitely generated holonomy representation: unit-determinant 2×2
/// complex generators. Relations are the caller's business; nothing here
/// enforces them.
#[derive(Debug, Clone)]
pub struct Rep {
    generators: Vec<Sl2>,
}

impl Rep {
    pub fn new(generators: Vec<Matrix2<Complex64>>) -> Result<Self> {
        if generators.is_empty() || generators.len() > 26 {
            return Err(Error::bad_input("need between 1 and 26 generators"));
        }
        let generators = generators
            .into_iter()
            .map(Sl2::new)
            .collect::<Result<Vec<_>>>()?;
        Ok(Rep { generators })
    }

    pub fn generators(&self) -> &[Sl2] {
        &self.generators
    }

    /// Evaluate a word: lowercase letters are generators, uppercase their
    /// inverses, whitespace is ignored.
    pub fn evaluate(&self, word: &str) -> Result<Sl2> {
        let mut acc = Sl2::identity();
        let mut seen = false;
        for ch in word.chars() {
            if ch.is_whitespace() {
                continue;
            }
            let (idx, inverse) = if ch.is_ascii_lowercase() {
                (ch as usize - 'a' as usize, false)
            } else if ch.is_ascii_uppercase() {
                (ch as usize - 'A' as usize, true)
            } else {
                return Err(Error::bad_input(format!("bad letter {ch:?} in word {word:?}")));
            };
            let g = self
                .generators
                .get(idx)
                .ok_or_else(|| Error::bad_input(format!("word uses missing generator {ch:?}")))?;
            let g = if inverse { g.inverse() } else { *g };
            acc = acc.compose(&g);
            seen = true;
        }
        if !seen {
            return Err(Error::bad_input("empty word"));
        }
        Ok(acc)
    }
}

/// Complex translation length of a loxodromic 2×2 matrix:
/// λ = 2 arccosh(tr/2) with Re λ > 0 and Im λ ∈ (−π, π].
pub fn complex_length(a: &Sl2) -> Result<Complex64> {
    let z = a.trace() / 2.0;
    let mut lambda = 2.0 * z.acosh();
    // Reduce the imaginary part modulo 2π into (−π, π].
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut im = lambda.im % two_pi;
    if im > std::f64::consts::PI {
        im -= two_pi;
    } else if im <= -std::f64::consts::PI {
        im += two_pi;
    }
    lambda = Complex64::new(lambda.re.abs(), im);
    if lambda.re <= 1e-12 {
        return Err(Error::NonLoxodromic(format!(
            "element is elliptic or parabolic: Re lambda = {:e}",
            lambda.re
        )));
    }
    Ok(lambda)
}

/// Real translation length Re λ.
pub fn real_length(a: &Sl2) -> Result<f64> {
    Ok(complex_length(a)?.re)
}

/// A rational measured lamination: weighted cyclically reduced words.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RationalLamination {
    pub curves: Vec<WeightedCurve>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightedCurve {
    pub word: String,
    pub weight: f64,
}

impl RationalLamination {
    pub fn new(curves: Vec<(String, f64)>) -> Result<Self> {
        let curves: Vec<WeightedCurve> = curves
            .into_iter()
            .map(|(word, weight)| WeightedCurve { word, weight })
            .collect();
        let lam = RationalLamination { curves };
        lam.validate()?;
        Ok(lam)
    }

    pub fn validate(&self) -> Result<()> {
        if self.curves.is_empty() {
            return Err(Error::bad_input("lamination needs at least one curve"));
        }
        for c in &self.curves {
            if c.weight <= 0.0 {
                return Err(Error::bad_input(format!("weight {} must be > 0", c.weight)));
            }
            let letters: Vec<char> = c.word.chars().filter(|ch| !ch.is_whitespace()).collect();
            if letters.is_empty() {
                return Err(Error::bad_input("empty word in lamination"));
            }
            let inverse_pair = |x: char, y: char| {
                x.to_ascii_lowercase() == y.to_ascii_lowercase()
                    && x.is_ascii_lowercase() != y.is_ascii_lowercase()
            };
            for k in 0..letters.len() {
                let next = letters[(k + 1) % letters.len()];
                if inverse_pair(letters[k], next) && letters.len() > 1 {
                    return Err(Error::bad_input(format!(
                        "word {:?} is not cyclically reduced",
                        c.word
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Length of the lamination under the representation:
/// Σᵢ uᵢ · Re λ(ρ(wordᵢ)). Linear in the weights and invariant under cyclic
/// permutation of each word.
pub fn lamination_length(rep: &Rep, lam: &RationalLamination) -> Result<f64> {
    let mut total = 0.0;
    for (index, c) in lam.curves.iter().enumerate() {
        let m = rep.evaluate(&c.word)?;
        let lambda = complex_length(&m).map_err(|_| Error::NotLoxodromic {
            index,
            word: c.word.clone(),
            re: 0.0,
        })?;
        total += c.weight * lambda.re;
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Representation paths
// ---------------------------------------------------------------------------

/// Smooth builtin paths of representations.
#[derive(Debug, Clone)]
pub enum RepPath {
    /// diag(e^{1+t}, e^{−(1+t)}): the word "a" has length 2(1+t).
    LoxStretch,
    /// diag(e^{μ/2}, e^{−μ/2}) with μ(t) = (1.2+0.8t) + i(0.5+0.4t).
    LoxTwist,
    /// Two generators; the second conjugated by an elliptic of angle t
    /// about the axis of the first (a bending-style path).
    BendTwoGen,
}

impl RepPath {
    pub fn builtin(kind: &str) -> Result<Self> {
        match kind {
            "builtin:lox-stretch-v1" => Ok(RepPath::LoxStretch),
            "builtin:lox-twist-v1" => Ok(RepPath::LoxTwist),
            "builtin:bend-two-gen-v1" => Ok(RepPath::BendTwoGen),
            other => Err(Error::UnknownName(other.into())),
        }
    }

    pub fn names() -> [&'static str; 3] {
        ["builtin:lox-stretch-v1", "builtin:lox-twist-v1", "builtin:bend-two-gen-v1"]
    }

    pub fn domain(&self) -> (f64, f64) {
        (-0.4, 0.4)
    }

    pub fn rep_at(&self, t: f64) -> Result<Rep> {
        let diag = |half: Complex64| -> Matrix2<Complex64> {
            Matrix2::new(half.exp(), Complex64::ZERO, Complex64::ZERO, (-half).exp())
        };
        match self {
            RepPath::LoxStretch => Rep::new(vec![diag(Complex64::new(1.0 + t, 0.0))]),
            RepPath::LoxTwist => {
                Rep::new(vec![diag(Complex64::new(1.2 + 0.8 * t, 0.5 + 0.4 * t) / 2.0)])
            }
            RepPath::BendTwoGen => {
                let a = diag(Complex64::new(1.5, 0.2) / 2.0);
                let m = Matrix2::new(
                    Complex64::new(1.0, 0.0),
                    Complex64::new(-1.0, 0.0),
                    Complex64::new(1.0, 0.0),
                    Complex64::new(1.0, 0.0),
                ) / Complex64::new(2.0f64.sqrt(), 0.0);
                let minv = Matrix2::new(
                    Complex64::new(1.0, 0.0),
                    Complex64::new(1.0, 0.0),
                    Complex64::new(-1.0, 0.0),
                    Complex64::new(1.0, 0.0),
                ) / Complex64::new(2.0f64.sqrt(), 0.0);
                let b0 = m * diag(Complex64::new(0.9, 0.3) / 2.0) * minv;
                // Rotate B's axis about the elliptic axis with fixed points
                // ±i; this does not commute with A, so word lengths move.
                let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
                let e = Matrix2::new(
                    Complex64::new(c, 0.0),
                    Complex64::new(-s, 0.0),
                    Complex64::new(s, 0.0),
                    Complex64::new(c, 0.0),
                );
                let einv = Matrix2::new(
                    Complex64::new(c, 0.0),
                    Complex64::new(s, 0.0),
                    Complex64::new(-s, 0.0),
                    Complex64::new(c, 0.0),
                );
                Rep::new(vec![a, e * b0 * einv])
            }
        }
    }
}

/// JSON form of a representation: one [[re,im]; 4] row-major entry block
/// (a, b, c, d) per generator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepSpec {
    pub generators: Vec<[[f64; 2]; 4]>,
}

impl RepSpec {
    pub fn build(&self) -> Result<Rep> {
        let gens = self
            .generators
            .iter()
            .map(|g| {
                Matrix2::new(
                    Complex64::new(g[0][0], g[0][1]),
                    Complex64::new(g[1][0], g[1][1]),
                    Complex64::new(g[2][0], g[2][1]),
                    Complex64::new(g[3][0], g[3][1]),
                )
            })
            .collect();
        Rep::new(gens)
    }
}

/// JSON form of a representation path: a builtin name with parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepPathSpec {
    pub kind: String,
    #[serde(default)]
    pub params: serde_json::Value,
}

impl RepPathSpec {
    pub fn build(&self) -> Result<RepPath> {
        RepPath::builtin(&self.kind)
    }
}

/// Finite-difference and trace-analytic derivatives of a lamination length
/// along a representation path.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LengthDerivative {
    pub fd: f64,
    pub analytic: f64,
    pub residual: f64,
}

/// Compare the central difference of the lamination length with the
/// trace-route derivative Σ uᵢ Re(tr′ / sinh(λ/2)).
///
/// Traces are polynomials in the generator entries, so tr′ by central
/// difference inherits the path's smoothness; the complex branch is fixed by
/// the center value of λ, and a branch crossing inside the stencil
/// (Im λ jumping across ±π) is an error.
pub fn length_derivative(
    path: &RepPath,
    lam: &RationalLamination,
    t: f64,
    h: f64,
) -> Result<LengthDerivative> {
    let (lo, hi) = path.domain();
    if t - h < lo || t + h > hi {
        return Err(Error::bad_input("stencil leaves the path domain"));
    }
    let rep_m = path.rep_at(t - h)?;
    let rep_0 = path.rep_at(t)?;
    let rep_p = path.rep_at(t + h)?;
    let fd = (lamination_length(&rep_p, lam)? - lamination_length(&rep_m, lam)?) / (2.0 * h);

    let mut analytic = 0.0;
    for c in &lam.curves {
        let lam_m = complex_length(&rep_m.evaluate(&c.word)?)?;
        let lam_p = complex_length(&rep_p.evaluate(&c.word)?)?;
        if (lam_p.im - lam_m.im).abs() > std::f64::consts::PI {
            return Err(Error::BranchCrossing(t));
        }
        let tr_m = rep_m.evaluate(&c.word)?.trace();
        let tr_p = rep_p.evaluate(&c.word)?.trace();
        let tr_prime = (tr_p - tr_m) / Complex64::new(2.0 * h, 0.0);
        let lambda0 = complex_length(&rep_0.evaluate(&c.word)?)?;
        let d_lambda = tr_prime / (lambda0 / 2.0).sinh();
        analytic += c.weight * d_lambda.re;
    }
    Ok(LengthDerivative { fd, analytic, residual: (fd - analytic).abs() })
}

// ---------------------------------------------------------------------------
// Explicit metric deformations
// ---------------------------------------------------------------------------

/// Closed-form metric deformations (g₀, ġ₀) on a 3D chart with a g₀-geodesic
/// curve γ⁰, for the first-variation quadrature
/// ∫ ġ₀(γ̇,γ̇) / (2 g₀(γ̇,γ̇)) dℓ₀.
#[derive(Debug, Clone)]
pub enum MetricDeformation {
    /// Fermi chart (s,u,v) around a closed geodesic of length ℓ₀ with
    /// g_t = (1+t)² cosh²r ds² + (flat transverse part); γ⁰ is the axis.
    /// dℓ(t)/dt = ℓ₀.
    WarpedTorus { length: f64 },
    /// Flat g₀ = δ with conformal velocity ġ₀ = 2 sin(x)·g₀ along the x-axis
    /// segment of length L: the integral collapses to ∫ sin = 1 − cos L.
    ConformalSin { length: f64 },
    /// ġ₀ = 0.
    Frozen { length: f64 },
}

impl MetricDeformation {
    pub fn builtin(kind: &str) -> Result<Self> {
        match kind {
            "builtin:warped-torus-v1" => Ok(MetricDeformation::WarpedTorus { length: 2.0 }),
            "builtin:conformal-sin-v1" => Ok(MetricDeformation::ConformalSin { length: 2.0 }),
            "builtin:frozen-v1" => Ok(MetricDeformation::Frozen { length: 2.0 }),
            other => Err(Error::UnknownName(other.into())),
        }
    }

    pub fn curve_domain(&self) -> (f64, f64) {
        match self {
            MetricDeformation::WarpedTorus { length }
            | MetricDeformation::ConformalSin { length }
            | MetricDeformation::Frozen { length } => (0.0, *length),
        }
    }

    /// γ⁰: the chart axis in all builtin deformations.
    pub fn curve(&self, s: f64) -> Vector3<f64> {
        Vector3::new(s, 0.0, 0.0)
    }

    pub fn curve_velocity(&self, _s: f64) -> Vector3<f64> {
        Vector3::new(1.0, 0.0, 0.0)
    }

    /// Base metric at chart point (s,u,v).
    pub fn g0(&self, x: &Vector3<f64>) -> Matrix3<f64> {
        match self {
            MetricDeformation::WarpedTorus { .. } => warped_metric(x, 0.0),
            MetricDeformation::ConformalSin { .. } | MetricDeformation::Frozen { .. } => {
                Matrix3::identity()
            }
        }
    }

    /// Metric velocity ġ₀ at chart point x.
    pub fn gdot0(&self, x: &Vector3<f64>) -> Matrix3<f64> {
        match self {
            MetricDeformation::WarpedTorus { .. } => {
                let r2 = x.y * x.y + x.z * x.z;
                let mut g = Matrix3::zeros();
                // d/dt (1+t)² cosh²r at t=0.
                g[(0, 0)] = 2.0 * r2.sqrt().cosh().powi(2);
                g
            }
            MetricDeformation::ConformalSin { .. } => 2.0 * x.x.sin() * self.g0(x),
            MetricDeformation::Frozen { .. } => Matrix3::zeros(),
        }
    }

    /// Max |γ̈ + Γ(γ̇,γ̇)| over samples of γ⁰, with Christoffel symbols of g₀
    /// taken by central differences. The builtin curves are exact geodesics,
    /// so this only measures the stencil.
    pub fn geodesic_residual(&self) -> f64 {
        let (lo, hi) = self.curve_domain();
        let h = 1e-4;
        let mut worst = 0.0f64;
        for k in 0..7 {
            let s = lo + (hi - lo) * (k as f64 + 0.5) / 7.0;
            let x = self.curve(s);
            let v = self.curve_velocity(s);
            // γ̈ = 0 for straight chart curves; evaluate Γ^k_{ij} v^i v^j.
            let g_at = |p: Vector3<f64>| self.g0(&p);
            let ginv = g_at(x).try_inverse().expect("metric invertible");
            let mut dg = [Matrix3::zeros(); 3];
            for d in 0..3 {
                let mut e = Vector3::zeros();
                e[d] = h;
                dg[d] = (g_at(x + e) - g_at(x - e)) / (2.0 * h);
            }
            let mut acc = Vector3::zeros();
            for k_up in 0..3 {
                let mut gamma_vv = 0.0;
                for l in 0..3 {
                    let mut sum = 0.0;
                    for i in 0..3 {
                        for j in 0..3 {
                            sum += 0.5
                                * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)])
                                * v[i]
                                * v[j];
                        }
                    }
                    gamma_vv += ginv[(k_up, l)] * sum;
                }
                acc[k_up] = gamma_vv;
            }
            worst = worst.max(acc.norm());
        }
        worst
    }
}

// Fermi metric around the axis in transverse Cartesian coordinates (u,v):
// g = (1+t)² cosh²r ds² + du² + dv² + c(r²)(−v du + u dv)² with
// c = (sinh²r − r²)/r⁴, smooth and positive at r = 0.
fn warped_metric(x: &Vector3<f64>, t: f64) -> Matrix3<f64> {
    let (u, v) = (x.y, x.z);
    let r2 = u * u + v * v;
    let c = if r2 < 1e-4 {
        // sinh²r = r² + r⁴/3 + 2 r⁶/15 + …
        1.0 / 3.0 + 2.0 * r2 / 15.0 + 17.0 * r2 * r2 / 315.0
    } else {
        let r = r2.sqrt();
        (r.sinh().powi(2) - r2) / (r2 * r2)
    };
    let mut g = Matrix3::identity();
    g[(0, 0)] = (1.0 + t).powi(2) * r2.sqrt().cosh().powi(2);
    g[(1, 1)] = 1.0 + c * v * v;
    g[(1, 2)] = -c * u * v;
    g[(2, 1)] = -c * u * v;
    g[(2, 2)] = 1.0 + c * u * u;
    g
}

/// Quadrature of ġ₀(γ̇,γ̇) / (2 g₀(γ̇,γ̇)) with respect to g₀-arclength
/// along γ⁰, to absolute tolerance 1e−9.
pub fn first_variation_integral(d: &MetricDeformation) -> Result<f64> {
    let (lo, hi) = d.curve_domain();
    let f = |s: f64| {
        let x = d.curve(s);
        let v = d.curve_velocity(s);
        let g = d.g0(&x);
        let gd = d.gdot0(&x);
        let gvv = (g * v).dot(&v);
        let gdvv = (gd * v).dot(&v);
        gdvv / (2.0 * gvv) * gvv.sqrt()
    };
    integrate_adaptive(&f, lo, hi, 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_sl2(rng: &mut impl Rng) -> Sl2 {
        // Random loxodromic conjugated by a random unit-determinant matrix.
        let lam = Complex64::new(rng.gen_range(0.3..1.5), rng.gen_range(-1.0..1.0));
        let d = Matrix2::new(
            (lam / 2.0).exp(),
            Complex64::ZERO,
            Complex64::ZERO,
            (-lam / 2.0).exp(),
        );
        let raw = Matrix2::new(
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        );
        let det = raw.determinant();
        if det.norm() < 1e-3 {
            return random_sl2(rng);
        }
        let b = raw / det.sqrt();
        Sl2::new(b * d * Matrix2::new(b[(1, 1)], -b[(0, 1)], -b[(1, 0)], b[(0, 0)])).unwrap()
    }

    #[test]
    fn complex_length_of_diagonal() {
        let a = Sl2::new(Matrix2::new(
            Complex64::new(1f64.exp(), 0.0),
            Complex64::ZERO,
            Complex64::ZERO,
            Complex64::new((-1f64).exp(), 0.0),
        ))
        .unwrap();
        let lam = complex_length(&a).unwrap();
        assert!((lam - Complex64::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn complex_length_inverts_defining_relation() {
        // tr = 2 cosh(0.5 + 0.25i) corresponds to λ = 1 + 0.5i.
        let half = Complex64::new(0.5, 0.25);
        let a = Sl2::new(Matrix2::new(
            half.exp(),
            Complex64::ZERO,
            Complex64::ZERO,
            (-half).exp(),
        ))
        .unwrap();
        assert!((a.trace() - 2.0 * half.cosh()).norm() < 1e-12);
        let lam = complex_length(&a).unwrap();
        assert!((lam - Complex64::new(1.0, 0.5)).norm() < 1e-12);
        assert!((real_length(&a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complex_length_conjugation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..25 {
            let a = random_sl2(&mut rng);
            let b = random_sl2(&mut rng);
            let conj = Sl2::new(b.0 * a.0 * b.inverse().0).unwrap();
            let la = complex_length(&a).unwrap();
            let lc = complex_length(&conj).unwrap();
            assert!((la - lc).norm() < 1e-10, "conjugation moved lambda: {la} vs {lc}");
            // Inverses keep the real length.
            let li = complex_length(&a.inverse()).unwrap();
            assert!((la.re - li.re).abs() < 1e-10);
        }
    }

    #[test]
    fn elliptic_and_parabolic_rejected() {
        let rot = Sl2::new(Matrix2::new(
            Complex64::new(0.0, 1.0),
            Complex64::ZERO,
            Complex64::ZERO,
            Complex64::new(0.0, -1.0),
        ))
        .unwrap();
        assert!(complex_length(&rot).is_err());
        let parabolic = Sl2::new(Matrix2::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::ZERO,
            Complex64::new(1.0, 0.0),
        ))
        .unwrap();
        assert!(complex_length(&parabolic).is_err());
    }

    #[test]
    fn lamination_length_linear_in_weights() {
        let rep = RepPath::LoxStretch.rep_at(0.0).unwrap(); // word "a" has length 2
        let single = RationalLamination::new(vec![("a".into(), 2.5)]).unwrap();
        let got = lamination_length(&rep, &single).unwrap();
        assert!((got - 5.0).abs() < 1e-12);

        let doubled =
            RationalLamination::new(vec![("a".into(), 2.5), ("a".into(), 2.5)]).unwrap();
        assert!((lamination_length(&rep, &doubled).unwrap() - 2.0 * got).abs() < 1e-12);

        // Homogeneity of degree one in the weights.
        let scaled = RationalLamination::new(vec![("a".into(), 7.5)]).unwrap();
        assert!((lamination_length(&rep, &scaled).unwrap() - 3.0 * got).abs() < 1e-12);
    }

    #[test]
    fn cyclic_permutations_share_length() {
        let rep = RepPath::BendTwoGen.rep_at(0.2).unwrap();
        let words = ["abAB", "bABa", "ABab", "BabA"];
        let mut lengths = Vec::new();
        for w in words {
            let lam = RationalLamination::new(vec![(w.into(), 1.0)]).unwrap();
            lengths.push(lamination_length(&rep, &lam).unwrap());
        }
        for l in &lengths[1..] {
            assert!((l - lengths[0]).abs() < 1e-12, "cyclic permutation changed length");
        }
    }

    #[test]
    fn lamination_validation() {
        assert!(RationalLamination::new(vec![("aA".into(), 1.0)]).is_err());
        assert!(RationalLamination::new(vec![("abBA".into(), 1.0)]).is_err());
        assert!(RationalLamination::new(vec![("ab".into(), -1.0)]).is_err());
        assert!(RationalLamination::new(vec![("".into(), 1.0)]).is_err());
        assert!(RationalLamination::new(vec![("aB a b".into(), 2.5)]).is_ok());
    }

    #[test]
    fn lamination_lipschitz_in_weights() {
        let rep = RepPath::BendTwoGen.rep_at(0.1).unwrap();
        let words = ["ab", "aB"];
        let w1 = [1.0, 2.0];
        let w2 = [1.1, 1.7];
        let mk = |w: &[f64; 2]| {
            RationalLamination::new(
                words.iter().zip(w).map(|(s, &u)| (s.to_string(), u)).collect(),
            )
            .unwrap()
        };
        let l1 = lamination_length(&rep, &mk(&w1)).unwrap();
        let l2 = lamination_length(&rep, &mk(&w2)).unwrap();
        let max_len = words
            .iter()
            .map(|w| real_length(&rep.evaluate(w).unwrap()).unwrap())
            .fold(0.0f64, f64::max);
        let bound: f64 =
            w1.iter().zip(&w2).map(|(a, b)| (a - b).abs()).sum::<f64>() * max_len;
        assert!((l1 - l2).abs() <= bound + 1e-12);
    }

    #[test]
    fn word_errors_carry_position() {
        let rep = RepPath::LoxStretch.rep_at(0.0).unwrap();
        let lam = RationalLamination { curves: vec![WeightedCurve { word: "b".into(), weight: 1.0 }] };
        assert!(lamination_length(&rep, &lam).is_err());
    }

    #[test]
    fn constant_path_has_zero_derivative() {
        let lam = RationalLamination::new(vec![("a".into(), 1.0)]).unwrap();
        // Bend path at t with the lamination on the FIRST generator: the
        // generator a is constant along the path.
        let d = length_derivative(&RepPath::BendTwoGen, &lam, 0.1, 1e-4).unwrap();
        assert!(d.fd.abs() < 1e-12 && d.analytic.abs() < 1e-12);
    }

    #[test]
    fn stretch_path_derivative_is_two() {
        let lam = RationalLamination::new(vec![("a".into(), 1.0)]).unwrap();
        let d = length_derivative(&RepPath::LoxStretch, &lam, 0.0, 1e-4).unwrap();
        assert!((d.fd - 2.0).abs() < 1e-8, "fd {}", d.fd);
        // The analytic route still differentiates traces by stencil, so it
        // carries the same O(h²) truncation.
        assert!((d.analytic - 2.0).abs() < 1e-7);
        let tw = length_derivative(&RepPath::LoxTwist, &lam, 0.0, 1e-4).unwrap();
        assert!((tw.fd - 0.8).abs() < 1e-8, "twist fd {}", tw.fd);
    }

    #[test]
    fn bend_path_fd_matches_analytic_second_order() {
        let lam =
            RationalLamination::new(vec![("ab".into(), 1.0), ("aB".into(), 0.5)]).unwrap();
        let d1 = length_derivative(&RepPath::BendTwoGen, &lam, 0.05, 2e-3).unwrap();
        let d2 = length_derivative(&RepPath::BendTwoGen, &lam, 0.05, 1e-3).unwrap();
        assert!(d1.residual < 1e-6 && d2.residual < 1e-6);
        // Residual between fd and the (more accurate) analytic route decays
        // O(h²) when the truncation dominates.
        if d1.residual > 1e-10 {
            let ratio = d1.residual / d2.residual.max(1e-16);
            assert!((2.0..8.0).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn rep_path_entries_are_smooth() {
        // C² probe: second differences at h and h/2 agree after Richardson.
        for name in RepPath::names() {
            let path = RepPath::builtin(name).unwrap();
            let entry = |t: f64| path.rep_at(t).unwrap().generators()[0].0[(0, 0)];
            let second = |h: f64| {
                (entry(0.1 + h) - 2.0 * entry(0.1) + entry(0.1 - h)) / Complex64::new(h * h, 0.0)
            };
            let s1 = second(1e-3);
            let s2 = second(5e-4);
            assert!((s1 - s2).norm() < 1e-5, "{name}: second difference unstable");
        }
    }

    #[test]
    fn warped_torus_first_variation_is_length() {
        let d = MetricDeformation::WarpedTorus { length: 2.0 };
        assert!(d.geodesic_residual() < 1e-8, "axis is a geodesic");
        let got = first_variation_integral(&d).unwrap();
        assert!((got - 2.0).abs() < 1e-9, "integral {got}");
        // Cross-check: ℓ(t) = (1+t) ℓ₀ by direct arclength quadrature.
        let h = 1e-5;
        let len_at = |t: f64| {
            integrate_adaptive(
                &|s: f64| {
                    let x = Vector3::new(s, 0.0, 0.0);
                    let g = warped_metric(&x, t);
                    (g[(0, 0)]).sqrt()
                },
                0.0,
                2.0,
                1e-12,
            )
            .unwrap()
        };
        let fd = (len_at(h) - len_at(-h)) / (2.0 * h);
        assert!((fd - got).abs() < 1e-7, "fd {fd} vs integral {got}");
    }

    #[test]
    fn conformal_deformation_integrates_the_factor() {
        let d = MetricDeformation::ConformalSin { length: 2.0 };
        let got = first_variation_integral(&d).unwrap();
        let want = 1.0 - 2.0f64.cos();
        assert!((got - want).abs() < 1e-9, "integral {got} vs {want}");
    }

    #[test]
    fn frozen_deformation_gives_zero() {
        let d = MetricDeformation::Frozen { length: 2.0 };
        assert_eq!(first_variation_integral(&d).unwrap(), 0.0);
    }

    #[test]
    fn rep_spec_json_roundtrip() {
        let text = r#"{"generators": [
            [[2.718281828459045, 0.0], [0.0, 0.0], [0.0, 0.0], [0.36787944117144233, 0.0]],
            [[1.0, 0.0], [0.5, -0.25], [0.0, 0.0], [1.0, 0.0]]
        ]}"#;
        let spec: RepSpec = serde_json::from_str(text).unwrap();
        let rep = spec.build().unwrap();
        assert_eq!(rep.generators().len(), 2);
        assert!((real_length(&rep.evaluate("a").unwrap()).unwrap() - 2.0).abs() < 1e-12);
        // Word with an inverse letter: aB evaluates g0 * g1^{-1}.
        let m = rep.evaluate("aB").unwrap();
        let want = rep.generators()[0].compose(&rep.generators()[1].inverse());
        assert!((m.0 - want.0).norm() < 1e-14);
        // A generator with det != 1 is rejected.
        let bad = r#"{"generators": [[[2.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]]}"#;
        assert!(serde_json::from_str::<RepSpec>(bad).unwrap().build().is_err());
        // The lamination wire format parses.
        let lam: RationalLamination =
            serde_json::from_str(r#"{"curves": [{"word": "aB a b", "weight": 2.5}]}"#).unwrap();
        lam.validate().unwrap();
        assert!(lamination_length(&rep, &lam).is_ok());
    }
}
