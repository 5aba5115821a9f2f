//! Shared numerical machinery: quadrature rules, extrapolation, stencils.

use crate::error::{Error, Result};
use nalgebra::{Matrix2, Vector3};

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 2);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Chebyshev-like initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// ∫_a^b f dx by composite Gauss-Legendre with `n` nodes on `panels` panels.
pub fn integrate_gl<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize, panels: usize) -> f64 {
    let rule = gauss_legendre(n);
    let mut total = 0.0;
    let w = (b - a) / panels as f64;
    for p in 0..panels {
        let lo = a + w * p as f64;
        let mid = lo + 0.5 * w;
        let half = 0.5 * w;
        let mut acc = 0.0;
        for &(x, wt) in &rule {
            acc += wt * f(mid + half * x);
        }
        total += acc * half;
    }
    total
}

/// Adaptive Simpson quadrature with absolute tolerance.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        m: f64,
        fm: f64,
        b: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let (left, ml, fml) = simpson(f, a, fa, m, fm);
        let (right, mr, fmr) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        if depth >= 48 {
            return Err(Error::QuadratureBudget { tol, estimate: delta.abs() / 15.0 });
        }
        Ok(recurse(f, a, fa, ml, fml, m, fm, left, 0.5 * tol, depth + 1)?
            + recurse(f, m, fm, mr, fmr, b, fb, right, 0.5 * tol, depth + 1)?)
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, m, fm, b, fb, whole, tol, 0)
}

// Grundmann-Möller rule on the unit 3-simplex, s = 2 (degree 5, 15 points).
// Weights sum to 1/6, the volume of the unit simplex.
fn gm5_rule() -> Vec<([f64; 4], f64)> {
    let mut rule = Vec::with_capacity(15);
    // i = 0: |beta| = 2, nodes (2b+1)/8
    let w0 = 32768.0 / (16.0 * 40320.0);
    // i = 1: |beta| = 1, nodes (2b+1)/6
    let w1 = -7776.0 / (16.0 * 5040.0);
    // i = 2: beta = 0, node (1/4,..)
    let w2 = 1024.0 / (16.0 * 1440.0);
    let mut push = |beta: [u32; 4], denom: f64, w: f64| {
        let mut bary = [0.0; 4];
        for (j, b) in beta.iter().enumerate() {
            bary[j] = (2.0 * *b as f64 + 1.0) / denom;
        }
        rule.push((bary, w));
    };
    for a in 0..4usize {
        for b in a..4usize {
            let mut beta = [0u32; 4];
            beta[a] += 1;
            beta[b] += 1;
            push(beta, 8.0, w0);
        }
    }
    for a in 0..4usize {
        let mut beta = [0u32; 4];
        beta[a] = 1;
        push(beta, 6.0, w1);
    }
    push([0; 4], 4.0, w2);
    rule
}

#[derive(Clone, Copy)]
pub struct Tet(pub [Vector3<f64>; 4]);

impl Tet {
    pub fn volume(&self) -> f64 {
        let [a, b, c, d] = self.0;
        ((b - a).cross(&(c - a)).dot(&(d - a)) / 6.0).abs()
    }

    /// Bey red refinement into eight children of equal volume.
    fn refine(&self) -> [Tet; 8] {
        let [a, b, c, d] = self.0;
        let ab = 0.5 * (a + b);
        let ac = 0.5 * (a + c);
        let ad = 0.5 * (a + d);
        let bc = 0.5 * (b + c);
        let bd = 0.5 * (b + d);
        let cd = 0.5 * (c + d);
        [
            Tet([a, ab, ac, ad]),
            Tet([ab, b, bc, bd]),
            Tet([ac, bc, c, cd]),
            Tet([ad, bd, cd, d]),
            Tet([ab, ac, ad, bd]),
            Tet([ab, ac, bc, bd]),
            Tet([ac, ad, bd, cd]),
            Tet([ac, bc, bd, cd]),
        ]
    }
}

/// Adaptive quadrature of a smooth integrand over a list of tetrahedra.
///
/// Subdivision follows Bey refinement with a per-cell error estimate from the
/// degree-5 rule on the parent vs its children; recursion is depth-first so
/// the reduction order (and hence the result) is deterministic for a fixed
/// budget. `tol` is an absolute target for the estimated total error.
pub fn integrate_tets<F: Fn(&Vector3<f64>) -> f64>(
    tets: &[Tet],
    f: &F,
    tol: f64,
) -> Result<f64> {
    let rule = gm5_rule();
    let apply = |t: &Tet| -> f64 {
        let [a, b, c, d] = t.0;
        // Affine map from the unit simplex; |det J| = 6 V.
        let jac = 6.0 * t.volume();
        let mut acc = 0.0;
        for (bary, w) in &rule {
            let p = bary[0] * a + bary[1] * b + bary[2] * c + bary[3] * d;
            acc += w * f(&p);
        }
        acc * jac
    };
    fn recurse<G: Fn(&Tet) -> f64>(
        t: &Tet,
        coarse: f64,
        apply: &G,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let kids = t.refine();
        let fine: f64 = kids.iter().map(apply).sum();
        let delta = fine - coarse;
        // Degree-5 rule: children error shrinks by ~2^6.
        if delta.abs() <= 63.0 * tol || delta.abs() < 1e-16 {
            return Ok(fine + delta / 63.0);
        }
        if depth >= 14 {
            return Err(Error::QuadratureBudget { tol, estimate: delta.abs() / 63.0 });
        }
        let mut acc = 0.0;
        for kid in &kids {
            acc += recurse(kid, apply(kid), apply, tol / 8.0, depth + 1)?;
        }
        Ok(acc)
    }
    let total_vol: f64 = tets.iter().map(Tet::volume).sum();
    let mut acc = 0.0;
    for t in tets {
        let share = tol * (t.volume() / total_vol).max(1e-3);
        acc += recurse(t, apply(t), &apply, share, 0)?;
    }
    Ok(acc)
}

/// Extrapolation of `samples` = [(h, value)] to h = 0 assuming an error
/// expansion f(h) = f₀ + Σ c_k h^{p_k} over the given exponent ladder
/// (e.g. [1,2,3,...]). Solves the model directly; the first n−1 ladder
/// entries are eliminated, where n is the sample count.
pub fn richardson(samples: &[(f64, f64)], orders: &[f64]) -> f64 {
    let n = samples.len();
    assert!(n >= 1 && orders.len() >= n - 1);
    let h0 = samples[0].0;
    let mut a = nalgebra::DMatrix::zeros(n, n);
    let mut b = nalgebra::DVector::zeros(n);
    for (i, &(h, v)) in samples.iter().enumerate() {
        a[(i, 0)] = 1.0;
        for j in 1..n {
            a[(i, j)] = (h / h0).powf(orders[j - 1]);
        }
        b[i] = v;
    }
    let sol = a.lu().solve(&b).expect("extrapolation system is nonsingular");
    sol[0]
}

/// Second-order central difference.
pub fn central_diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Eigenvalues of I⁻¹M for symmetric M and symmetric positive-definite I.
/// Real because the pencil is symmetric; returned ascending.
pub fn pencil_eigenvalues(i: &Matrix2<f64>, m: &Matrix2<f64>) -> (f64, f64) {
    let inv = i.try_inverse().expect("first fundamental form must be invertible");
    let a = inv * m;
    let tr = a.trace();
    let det = a.determinant();
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    (0.5 * (tr - disc), 0.5 * (tr + disc))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_integrates_polynomials_exactly() {
        // degree-15 polynomial with 8 nodes
        let f = |x: f64| x.powi(15) + 3.0 * x.powi(4) + 1.0;
        let got = integrate_gl(f, -1.0, 1.0, 8, 1);
        let want = 2.0 * (3.0 / 5.0 + 1.0);
        assert!((got - want).abs() < 1e-14);
    }

    #[test]
    fn adaptive_simpson_hits_tolerance() {
        let got = integrate_adaptive(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12).unwrap();
        assert!((got - 2.0).abs() < 1e-11);
    }

    #[test]
    fn gm5_weights_sum_to_unit_simplex_volume() {
        let s: f64 = gm5_rule().iter().map(|(_, w)| w).sum();
        assert!((s - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn tet_rule_exact_to_degree_five() {
        let t = Tet([
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(0.0, 1.0, 0.0),
            Vector3::new(0.0, 0.0, 1.0),
        ]);
        // x^2 y z over the unit simplex = 2!1!1!/(2+1+1+3)! = 2/5040
        let got = integrate_tets(&[t], &|p| p.x * p.x * p.y * p.z, 1e-14).unwrap();
        assert!((got - 2.0 / 5040.0).abs() < 1e-15, "got {got}");
    }

    #[test]
    fn tet_adaptive_smooth_integrand() {
        let t = Tet([
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(0.5, 0.0, 0.0),
            Vector3::new(0.0, 0.5, 0.0),
            Vector3::new(0.0, 0.0, 0.5),
        ]);
        let f = |p: &Vector3<f64>| (1.0 - p.norm_squared()).powi(-2);
        let got = integrate_tets(&[t], &f, 1e-12).unwrap();
        // Cross-check against a much finer fixed refinement.
        let mut tets = vec![t];
        for _ in 0..3 {
            tets = tets.iter().flat_map(|t| t.refine().to_vec()).collect();
        }
        let fine: f64 = integrate_tets(&tets, &f, 1e-13).unwrap();
        assert!((got - fine).abs() < 1e-11);
    }

    #[test]
    fn richardson_known_expansion() {
        // f(h) = 7 + 2h + 3h^2 - h^3
        let f = |h: f64| 7.0 + 2.0 * h + 3.0 * h * h - h * h * h;
        let samples: Vec<(f64, f64)> = [0.02, 0.01, 0.005, 0.0025]
            .iter()
            .map(|&h| (h, f(h)))
            .collect();
        let got = richardson(&samples, &[1.0, 2.0, 3.0]);
        assert!((got - 7.0).abs() < 1e-12);
    }

    #[test]
    fn pencil_eigenvalues_diagonal_case() {
        let i = Matrix2::new(4.0, 0.0, 0.0, 1.0);
        let m = Matrix2::new(8.0, 0.0, 0.0, -3.0);
        let (lo, hi) = pencil_eigenvalues(&i, &m);
        assert!((lo + 3.0).abs() < 1e-14 && (hi - 2.0).abs() < 1e-14);
    }
}
