//! Convex polyhedra in H^3: hull construction, edge data, volume by
//! quadrature, dual volume, face areas and vertex solid angles.
//!
//! Run: cargo run -p schlafli-lab --example polyhedron_volumes

use nalgebra::Vector3;
use schlafli_lab::polyhedra::{base_tetra, hull};

fn main() {
    println!("=== Convex polyhedra and their volumes ===\n");

    let tetra = hull(&base_tetra()).unwrap();
    println!(
        "base tetrahedron: V = {}, E = {}, F = {}",
        tetra.vertices().len(),
        tetra.edges().len(),
        tetra.faces().len()
    );

    println!("\nedge data (length, exterior angle):");
    for e in tetra.edges() {
        println!(
            "  edge {:?}: l = {:.6}, theta = {:.6} (interior {:.6})",
            e.source_vertices,
            e.length,
            e.exterior_angle,
            e.interior_angle()
        );
    }

    let tol = 1e-11;
    let vol = tetra.volume(tol).unwrap();
    let dual = tetra.dual_volume(tol).unwrap();
    let w = tetra.w_volume(tol).unwrap();
    println!("\nVol       = {vol:.12}");
    println!("sum l*theta = {:.12}", tetra.edge_bending_sum());
    println!("Vol*      = Vol - 1/2 sum l*theta = {dual:.12}");
    println!("W         = (Vol + Vol*)/2        = {w:.12}");

    // Face areas from angle defects and the Gram identity.
    println!("\nface areas (angle defect):");
    for f in 0..tetra.faces().len() {
        println!("  face {f}: area = {:.9}", tetra.face_area(f));
    }
    let omega_sum: f64 = tetra.vertex_solid_angles().iter().sum();
    println!(
        "sum of exterior solid angles = {omega_sum:.9} = 4 pi + Area = {:.9}",
        4.0 * std::f64::consts::PI + tetra.boundary_area()
    );

    // An octahedron with merged combinatorics.
    let octa: Vec<_> = [
        (0.3, 0.0, 0.0),
        (-0.3, 0.0, 0.0),
        (0.0, 0.3, 0.0),
        (0.0, -0.3, 0.0),
        (0.0, 0.0, 0.3),
        (0.0, 0.0, -0.3),
    ]
    .iter()
    .map(|&(a, b, c)| schlafli_lab::minkowski::MPoint::from_klein(Vector3::new(a, b, c)).unwrap())
    .collect();
    let octa = hull(&octa).unwrap();
    println!(
        "\noctahedron: V = {}, E = {}, F = {}; Vol = {:.9}, Vol* = {:.9}",
        octa.vertices().len(),
        octa.edges().len(),
        octa.faces().len(),
        octa.volume(tol).unwrap(),
        octa.dual_volume(tol).unwrap()
    );

    // Tiny bodies are Euclidean to O(scale^2).
    println!("\nshrinking the tetrahedron (volume / Euclidean volume -> 1):");
    for s in [0.4, 0.2, 0.1, 0.05] {
        let pts: Vec<_> = base_tetra()
            .iter()
            .map(|p| schlafli_lab::minkowski::MPoint::from_klein(s * p.klein()).unwrap())
            .collect();
        let p = hull(&pts).unwrap();
        let hyp = p.volume(1e-12).unwrap();
        let ys: Vec<Vector3<f64>> = pts.iter().map(|q| q.klein()).collect();
        let eu = ((ys[1] - ys[0]).cross(&(ys[2] - ys[0])).dot(&(ys[3] - ys[0])) / 6.0).abs();
        println!("  scale {s:.2}: ratio = {:.8}", hyp / eu);
    }
}
