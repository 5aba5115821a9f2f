//! Tube volumes over flat pieces, bending wedges, vertex cones and the
//! solid-torus core; the ε-expansion of the dual volume and its end-to-end
//! solid-torus instance.
//!
//! Run: cargo run -p schlafli-lab --example tube_volumes

use schlafli_lab::polyhedra::{base_tetra, hull};
use schlafli_lab::tubes::{
    core_dual_volume_expansion, dual_volume_epsilon_limit, mean_curvature_integral,
    polyhedron_neighborhood, solid_torus_dual_volume, tube_volume, TubeBase, TubeSpec,
};

fn main() {
    println!("=== Tube volumes and the dual-volume expansion ===\n");

    let eps = 0.5;
    println!("pieces at eps = {eps}:");
    let flat = TubeSpec::new(TubeBase::FlatPatch { area: 1.0 }, eps).unwrap();
    println!("  flat patch (A=1):    {:.9}", tube_volume(&flat));
    let wedge = TubeSpec::new(TubeBase::Wedge { length: 1.0, angle: 1.0 }, eps).unwrap();
    println!("  wedge (l=1, θ=1):    {:.9}", tube_volume(&wedge));
    let cone =
        TubeSpec::new(TubeBase::VertexCone { solid_angle: 4.0 * std::f64::consts::PI }, eps)
            .unwrap();
    println!(
        "  full cone (Ω=4π):    {:.9} = ball volume π(sinh 2eps − 2eps) = {:.9}",
        tube_volume(&cone),
        std::f64::consts::PI * ((2.0 * eps).sinh() - 2.0 * eps)
    );
    let torus = TubeSpec::solid_torus(2.0, eps).unwrap();
    println!("  solid torus (l=2):   {:.9} = π l sinh²eps", tube_volume(&torus));

    // The one end-to-end instance with closed forms on both sides.
    println!("\nsolid torus, l = 1: Vol*(N_eps) three ways");
    println!("{:>5} {:>16} {:>16} {:>16}", "eps", "-πl cosh²eps", "Vol+½∫H", "expansion");
    for k in [1, 3, 5, 7, 10] {
        let e = 0.1 * k as f64;
        let direct = -std::f64::consts::PI * e.cosh().powi(2);
        let assembled = solid_torus_dual_volume(1.0, e).unwrap();
        let expansion = core_dual_volume_expansion(
            -std::f64::consts::PI,
            2.0 * std::f64::consts::PI,
            0,
            e,
        );
        println!("{e:>5.1} {direct:>16.10} {assembled:>16.10} {expansion:>16.10}");
    }

    println!("\nmean-curvature integral -2π|χ| sinh 2eps - ℓμ cosh 2eps:");
    for (chi, lmu) in [(0i64, 2.0 * std::f64::consts::PI), (-2, 5.0)] {
        println!(
            "  chi = {chi}, lmu = {lmu:.3}: ∫H da at eps=0.3 is {:.9}",
            mean_curvature_integral(chi, lmu, 0.3).unwrap()
        );
    }

    // Polyhedral neighborhoods: exact face/edge/vertex assembly.
    let p = hull(&base_tetra()).unwrap();
    let dual = p.dual_volume(1e-11).unwrap();
    println!("\ntetrahedron neighborhood assembly (Vol* of N_eps P):");
    println!("{:>6} {:>16} {:>16}", "eps", "Vol*(N_eps P)", "gap to Vol*(P)");
    for e in [0.2, 0.1, 0.05, 0.02, 0.01] {
        let a = polyhedron_neighborhood(&p, 1e-11, e).unwrap();
        println!("{e:>6.3} {:>16.10} {:>16.3e}", a.dual_volume, (a.dual_volume - dual).abs());
    }
    let lim = dual_volume_epsilon_limit(&p, 1e-11, 0.02, 5).unwrap();
    println!("extrapolated eps → 0 limit: {lim:.12}");
    println!("dual volume of P:           {dual:.12}");
    println!("gap: {:.2e}", (lim - dual).abs());
}
