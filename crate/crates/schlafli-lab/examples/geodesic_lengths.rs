//! Complex lengths from traces, rational lamination lengths, and first
//! variations of length along representation paths and explicit metric
//! deformations.
//!
//! Run: cargo run -p schlafli-lab --example geodesic_lengths

use num_complex::Complex64;
use schlafli_lab::laminations::{
    complex_length, first_variation_integral, lamination_length, length_derivative,
    MetricDeformation, RationalLamination, RepPath,
};

fn main() {
    println!("=== Geodesic lengths and their first variation ===\n");

    // Complex length from a trace.
    let rep = RepPath::builtin("builtin:lox-twist-v1").unwrap().rep_at(0.0).unwrap();
    let a = rep.generators()[0];
    let lambda = complex_length(&a).unwrap();
    println!("generator with mu = 1.2 + 0.5i:");
    println!("  trace          = {:.9} {:+.9}i", a.trace().re, a.trace().im);
    println!("  complex length = {:.9} {:+.9}i", lambda.re, lambda.im);
    println!("  2cosh(λ/2)     = {:.9} {:+.9}i (recovers the trace)",
        (2.0 * (lambda / 2.0).cosh()).re, (2.0 * (lambda / 2.0).cosh()).im);

    // Conjugation invariance.
    let conj = {
        let c = nalgebra::Matrix2::new(
            Complex64::new(1.3, 0.2),
            Complex64::new(-0.4, 0.1),
            Complex64::new(0.2, -0.5),
            Complex64::new(0.7, 0.3),
        );
        let c = c / c.determinant().sqrt();
        schlafli_lab::minkowski::Sl2::new(
            c * a.0 * nalgebra::Matrix2::new(c[(1, 1)], -c[(0, 1)], -c[(1, 0)], c[(0, 0)]),
        )
        .unwrap()
    };
    println!(
        "  after conjugation: |λ - λ'| = {:.2e}",
        (complex_length(&conj).unwrap() - lambda).norm()
    );

    // Lamination lengths on the bending path.
    let path = RepPath::builtin("builtin:bend-two-gen-v1").unwrap();
    let lam = RationalLamination::new(vec![
        ("ab".into(), 1.0),
        ("aB".into(), 0.5),
        ("aabb".into(), 0.25),
    ])
    .unwrap();
    println!("\nlamination {{ab: 1, aB: 0.5, aabb: 0.25}} along the bending path:");
    println!("{:>6} {:>14} {:>14} {:>14} {:>10}", "t", "length", "FD dl/dt", "trace dl/dt", "residual");
    for k in 0..5 {
        let t = -0.2 + 0.1 * k as f64;
        let l = lamination_length(&path.rep_at(t).unwrap(), &lam).unwrap();
        let d = length_derivative(&path, &lam, t, 1e-4).unwrap();
        println!("{t:>6.2} {l:>14.9} {:>14.9} {:>14.9} {:>10.2e}", d.fd, d.analytic, d.residual);
    }

    // First variation of length under explicit metric deformations.
    println!("\nmetric deformations (first-variation integral):");
    for kind in ["builtin:warped-torus-v1", "builtin:conformal-sin-v1", "builtin:frozen-v1"] {
        let d = MetricDeformation::builtin(kind).unwrap();
        println!(
            "  {kind}: integral = {:.12}, geodesic residual = {:.1e}",
            first_variation_integral(&d).unwrap(),
            d.geodesic_residual()
        );
    }
    println!("  (warped torus: the integral equals the core length l0 = 2)");
}
