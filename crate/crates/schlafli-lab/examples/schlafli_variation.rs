//! The Schläfli formula and its dual along polyhedron deformations:
//! dVol/dt = ½ Σ ℓ(e) δθ(e) and dVol*/dt = −½ Σ θ(e) δℓ(e).
//!
//! Run: cargo run -p schlafli-lab --example schlafli_variation

use schlafli_lab::polyhedra::{edge_data_derivative, PolyhedronFamily, BUILTIN_FAMILIES};
use schlafli_lab::variation::{dual_schlafli_check, schlafli_check};

fn main() {
    println!("=== Schläfli variation formulas on builtin families ===\n");
    let (h, quad_tol) = (1e-4, 1e-11);

    for name in BUILTIN_FAMILIES {
        println!("family {name}");
        println!("{:>6} {:>14} {:>14} {:>10} | {:>14} {:>14} {:>10}", "t", "dVol/dt", "1/2 Σ l dθ", "resid", "dVol*/dt", "-1/2 Σ θ dl", "resid");
        for k in 0..5 {
            let t = -0.2 + 0.1 * k as f64;
            let s = schlafli_check(&PolyhedronFamily::builtin(name).unwrap(), t, h, quad_tol)
                .unwrap();
            let d = dual_schlafli_check(&PolyhedronFamily::builtin(name).unwrap(), t, h, quad_tol)
                .unwrap();
            println!(
                "{t:>6.2} {:>14.9} {:>14.9} {:>10.2e} | {:>14.9} {:>14.9} {:>10.2e}",
                s.lhs, s.rhs, s.residual, d.lhs, d.rhs, d.residual
            );
        }
        println!();
    }

    // The two formulas differ by a Leibniz term that is exact algebra on the
    // edge rows.
    let fam = PolyhedronFamily::builtin("builtin:asym-tetra-v1").unwrap();
    let rows = edge_data_derivative(&fam, 0.1, 1e-4).unwrap();
    let schlafli_rhs: f64 = 0.5 * rows.iter().map(|r| r.length * r.d_exterior_angle).sum::<f64>();
    let dual_rhs: f64 = -0.5 * rows.iter().map(|r| r.exterior_angle * r.d_length).sum::<f64>();
    let leibniz: f64 = 0.5
        * rows
            .iter()
            .map(|r| r.exterior_angle * r.d_length + r.length * r.d_exterior_angle)
            .sum::<f64>();
    println!("Leibniz closure at t = 0.1 on asym-tetra-v1:");
    println!("  1/2 Σ l dθ            = {schlafli_rhs:+.12}");
    println!("  -1/2 Σ θ dl           = {dual_rhs:+.12}");
    println!("  difference - Leibniz  = {:.2e}", (schlafli_rhs - leibniz - dual_rhs).abs());
}
