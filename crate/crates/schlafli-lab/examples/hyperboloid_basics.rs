//! Hyperboloid-model primitives: points, distances, geodesics, parallel
//! transport, planes and loxodromic isometries.
//!
//! Run: cargo run -p schlafli-lab --example hyperboloid_basics

use nalgebra::{Vector3, Vector4};
use schlafli_lab::minkowski::{
    dist, exp_map, loxodromic, mdot, parallel_transport, HGeodesic, HPlane, MPoint, TangentVec,
};

fn main() {
    println!("=== Hyperboloid model of H^3 ===\n");

    let origin = MPoint::origin();
    println!("origin (1,0,0,0): <x,x> = {:.1}", mdot(origin.coords(), origin.coords()));

    // Klein lifts and distances.
    let p = MPoint::from_klein(Vector3::new(0.3, 0.1, -0.2)).unwrap();
    let q = MPoint::from_klein(Vector3::new(-0.25, 0.3, 0.15)).unwrap();
    println!("\nKlein points y_p = {:?}, y_q = {:?}", p.klein().as_slice(), q.klein().as_slice());
    println!("dist(p, q)   = {:.12}", dist(&p, &q).unwrap());
    println!("dist(p, p)   = {:.1e}", dist(&p, &p).unwrap());

    // A unit-speed geodesic through p toward q.
    let geo = HGeodesic::through(&p, &q).unwrap();
    let d = dist(&p, &q).unwrap();
    println!("\ngeodesic through p toward q:");
    println!("  gamma(d) reaches q with coordinate gap {:.2e}", geo.at(d).coord_gap(&q));
    println!(
        "  unit speed: <gamma'(0.7), gamma'(0.7)> = {:.12}",
        mdot(&geo.velocity(0.7).v, &geo.velocity(0.7).v)
    );

    // Parallel transport preserves products.
    let w1 = TangentVec::project(p, Vector4::new(0.0, 0.2, 0.9, -0.1)).normalized().unwrap();
    let w2 = TangentVec::project(p, Vector4::new(0.0, -0.6, 0.1, 0.8)).normalized().unwrap();
    let t1 = parallel_transport(&w1, &geo, 1.3).unwrap();
    let t2 = parallel_transport(&w2, &geo, 1.3).unwrap();
    println!("\nparallel transport along 1.3 units:");
    println!("  <w1,w2> before = {:.12}", mdot(&w1.v, &w2.v));
    println!("  <w1,w2> after  = {:.12}", mdot(&t1.v, &t2.v));

    // Exponential map group property.
    let far = exp_map(&w1, 0.8).unwrap();
    println!("\nexp_map(w1, 0.8) lands at dist {:.12} (should be 0.8)", dist(&p, &far).unwrap());

    // Planes and signed distances.
    let plane = HPlane::new(Vector4::new(0.0, 1.0, 0.0, 0.0)).unwrap();
    println!("\nplane with normal e1:");
    for t in [-1.0f64, 0.0, 0.5] {
        let x = MPoint::new(Vector4::new(t.cosh(), t.sinh(), 0.0, 0.0)).unwrap();
        println!("  signed distance at boost({t:+.1}) = {:+.12}", plane.signed_distance(&x));
    }

    // A loxodromic screw motion: translation 0.9, twist 0.6.
    let axis = HGeodesic::through(&p, &q).unwrap();
    let iso = loxodromic(&axis, 0.9, 0.6).unwrap();
    let moved = iso.apply(axis.base());
    println!("\nloxodromic along the p->q axis (l = 0.9, twist = 0.6):");
    println!("  axis point moves by {:.12}", dist(axis.base(), &moved).unwrap());
    let tr = iso.sl2().unwrap().trace();
    let want = 2.0 * (num_complex::Complex64::new(0.9, 0.6) / 2.0).cosh();
    println!("  trace of the 2x2 form = {:.9} {:+.9}i", tr.re, tr.im);
    println!("  2 cosh(lambda/2)      = {:.9} {:+.9}i", want.re, want.im);

    // Isometries preserve distances.
    let d0 = dist(&p, &q).unwrap();
    let d1 = dist(&iso.apply(&p), &iso.apply(&q)).unwrap();
    println!("\nisometry invariance: |d(Lp,Lq) - d(p,q)| = {:.2e}", (d1 - d0).abs());
}
