//! Finitely bent convex chains: construction from bending data, window
//! volumes, telescoping refinement and convergence of the ε-surface
//! distance fields.
//!
//! Run: cargo run -p schlafli-lab --example bent_chain_refinement

use nalgebra::Vector3;
use schlafli_lab::minkowski::MPoint;
use schlafli_lab::tubes::BentChain;

fn main() {
    println!("=== Finitely bent chains ===\n");

    let chain = BentChain::unfolded(&[(0.0, 0.4), (0.25, 0.3), (0.6, 0.5)], (-0.4, 1.0), 1.2)
        .unwrap();
    println!(
        "chain with {} half-spaces, {} bending lines, Σθ = {:.3}",
        chain.half_spaces().len(),
        chain.lines().len(),
        chain.transverse_bending_sum()
    );
    println!("window bending length Σθℓ = {:.6}", chain.window_bending_length());
    for eps in [0.1, 0.3, 0.6] {
        println!(
            "  eps = {eps}: tube volume = {:.9}, ∫H da = {:.9}",
            chain.tube_volume(eps),
            chain.mean_curvature_integral(eps)
        );
    }

    // The ε-surface is convex everywhere.
    let worst = chain
        .surface_forms(0.4, 6)
        .unwrap()
        .iter()
        .map(|f| f.principal_curvatures().1)
        .fold(f64::NEG_INFINITY, f64::max);
    println!("largest shape-operator eigenvalue on the eps-surface: {worst:.3e} (≤ 0)");

    // Refinement telescopes the bending measure.
    println!("\nrefining a single wedge of angle 0.8 dyadically:");
    let mut refined = BentChain::unfolded(&[(0.15, 0.8)], (-0.3, 0.6), 1.0).unwrap();
    let mut stages = vec![refined.clone()];
    for stage in 0..4 {
        let m = refined.lines().len();
        let offset = 0.3 / f64::powi(2.0, stage + 2);
        for i in (0..m).rev() {
            let th = refined.angles()[i];
            let pos = refined.positions()[i];
            refined = refined.refine(i, (th / 2.0, th / 2.0, pos + offset)).unwrap();
        }
        println!(
            "  stage {}: {} lines, Σθ = {:.12}",
            stage + 1,
            refined.lines().len(),
            refined.transverse_bending_sum()
        );
        stages.push(refined.clone());
    }

    // Distance-field gradients converge toward the finest stage.
    let finest = stages.pop().unwrap();
    let probes: Vec<Vector3<f64>> =
        (0..6).map(|i| Vector3::new(-0.05 + 0.08 * i as f64, 0.3, 0.0)).collect();
    let grad = |c: &BentChain, y: Vector3<f64>| -> Vector3<f64> {
        let h = 1e-4;
        let mut g = Vector3::zeros();
        for k in 0..3 {
            let mut e = Vector3::zeros();
            e[k] = h;
            g[k] = (c.distance(&MPoint::from_klein(y + e).unwrap())
                - c.distance(&MPoint::from_klein(y - e).unwrap()))
                / (2.0 * h);
        }
        g
    };
    println!("\nmax gradient deviation of the distance field vs the finest stage:");
    for (k, c) in stages.iter().enumerate() {
        let dev = probes
            .iter()
            .map(|&y| (grad(c, y) - grad(&finest, y)).norm())
            .fold(0.0f64, f64::max);
        println!("  {} line(s): {dev:.6e}", c.lines().len());
        let _ = k;
    }
}
