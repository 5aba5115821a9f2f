//! Compact convex polyhedra in H³.
//!
//! Hulls are built in the Klein model, where hyperbolic convexity is
//! Euclidean convexity: faces and edges come from the Euclidean hull of the
//! Klein images and are lifted back to the hyperboloid. Edge lengths use
//! cosh ℓ = −⟨v,w⟩ and exterior dihedral angles θ(e) = arccos⟨n₁,n₂⟩ for
//! outward unit normals, so θ ∈ (0,π) on convex bodies. Volume is quadrature
//! of the Klein volume element (1−|y|²)⁻² over a tetrahedral decomposition;
//! the dual volume subtracts ½ Σ ℓ(e) θ(e).

use std::collections::BTreeMap;

use nalgebra::{Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minkowski::{
    dist, exp_map, mdot, rotation_about, translation_along, HGeodesic, HPlane, Isometry, MPoint,
    TangentVec,
};
use crate::numerics::{integrate_tets, Tet};
use crate::tol;

/// A face of a convex polyhedron: supporting plane plus an ordered vertex
/// cycle (indices into the vertex list).
#[derive(Debug, Clone)]
pub struct Face {
    pub plane: HPlane,
    pub cycle: Vec<usize>,
}

/// An edge with its two adjacent faces and the metric data entering the
/// Schläfli formulas.
#[derive(Debug, Clone, Copy)]
pub struct Edge {
    /// Endpoints as indices into `vertices`.
    pub vertices: (usize, usize),
    /// Endpoints as indices into the original input point list.
    pub source_vertices: (usize, usize),
    pub faces: (usize, usize),
    pub length: f64,
    pub exterior_angle: f64,
}

impl Edge {
    pub fn interior_angle(&self) -> f64 {
        std::f64::consts::PI - self.exterior_angle
    }
}

#[derive(Debug, Clone)]
pub struct ConvexPolyhedron {
    vertices: Vec<MPoint>,
    /// Input-point index of each vertex.
    source: Vec<usize>,
    faces: Vec<Face>,
    edges: Vec<Edge>,
}

/// Convex hull of at least four points of H³, not all coplanar.
pub fn hull(points: &[MPoint]) -> Result<ConvexPolyhedron> {
    ConvexPolyhedron::hull(points)
}

// Triangles produced by the incremental hull, in Klein coordinates.
#[derive(Clone, Copy)]
struct Tri {
    v: [usize; 3],
    normal: Vector3<f64>,
    offset: f64,
}

impl Tri {
    fn new(v: [usize; 3], ys: &[Vector3<f64>]) -> Self {
        let (a, b, c) = (ys[v[0]], ys[v[1]], ys[v[2]]);
        let normal = (b - a).cross(&(c - a));
        Tri { v, normal, offset: normal.dot(&a) }
    }

    fn oriented_outward(mut self, interior: &Vector3<f64>) -> Self {
        if self.normal.dot(interior) > self.offset {
            self.v.swap(1, 2);
            self.normal = -self.normal;
            self.offset = -self.offset;
        }
        self
    }

    fn sees(&self, y: &Vector3<f64>, eps: f64) -> bool {
        self.normal.dot(y) - self.offset > eps * self.normal.norm()
    }

    fn directed_edges(&self) -> [(usize, usize); 3] {
        [(self.v[0], self.v[1]), (self.v[1], self.v[2]), (self.v[2], self.v[0])]
    }
}

impl ConvexPolyhedron {
    fn hull(points: &[MPoint]) -> Result<Self> {
        if points.len() < 4 {
            return Err(Error::DegenerateHull(format!("need >= 4 points, got {}", points.len())));
        }
        let ys: Vec<Vector3<f64>> = points.iter().map(MPoint::klein).collect();
        for (i, y) in ys.iter().enumerate() {
            if y.norm() >= 1.0 {
                return Err(Error::bad_input(format!("point {i} outside the Klein ball")));
            }
        }
        let tris = incremental_hull(&ys)?;
        Self::from_triangles(points, &ys, tris)
    }

    fn from_triangles(points: &[MPoint], ys: &[Vector3<f64>], tris: Vec<Tri>) -> Result<Self> {
        // Merge coplanar neighbors into polygonal faces.
        let groups = merge_coplanar(&tris);
        let interior = hull_interior_point(&tris, ys);

        let mut used: BTreeMap<usize, usize> = BTreeMap::new();
        let mut faces = Vec::with_capacity(groups.len());
        for group in &groups {
            let cycle_src = boundary_cycle(group, &tris)?;
            // Newell normal over the cycle; exact for planar polygons.
            let mut m = Vector3::zeros();
            let mut centroid = Vector3::zeros();
            for (k, &i) in cycle_src.iter().enumerate() {
                let j = cycle_src[(k + 1) % cycle_src.len()];
                m += ys[i].cross(&ys[j]);
                centroid += ys[i];
            }
            centroid /= cycle_src.len() as f64;
            let mut c = m.dot(&centroid);
            if m.dot(&interior) > c {
                m = -m;
                c = -c;
            }
            let lift = Vector4::new(c, m.x, m.y, m.z);
            let plane = HPlane::new(lift).map_err(|_| {
                Error::DegenerateHull("face plane does not meet the Klein ball".into())
            })?;
            for &i in &cycle_src {
                let next = used.len();
                used.entry(i).or_insert(next);
            }
            faces.push((plane, cycle_src));
        }

        let mut vertices = vec![MPoint::origin(); used.len()];
        let mut source = vec![0usize; used.len()];
        for (&src, &idx) in &used {
            vertices[idx] = points[src];
            source[idx] = src;
        }
        let faces: Vec<Face> = faces
            .into_iter()
            .map(|(plane, cycle_src)| Face {
                plane,
                cycle: cycle_src.iter().map(|i| used[i]).collect(),
            })
            .collect();

        // Edges: each directed face-boundary edge pairs with its reverse.
        let mut owner: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (fi, face) in faces.iter().enumerate() {
            for k in 0..face.cycle.len() {
                let a = face.cycle[k];
                let b = face.cycle[(k + 1) % face.cycle.len()];
                if owner.insert((a, b), fi).is_some() {
                    return Err(Error::DegenerateHull("directed edge owned twice".into()));
                }
            }
        }
        let mut edges = Vec::new();
        for (&(a, b), &fi) in &owner {
            if a > b {
                continue;
            }
            let &gi = owner
                .get(&(b, a))
                .ok_or_else(|| Error::DegenerateHull("unpaired directed edge".into()))?;
            let length = dist(&vertices[a], &vertices[b])?;
            let cosang = mdot(faces[fi].plane.normal(), faces[gi].plane.normal());
            let exterior_angle = cosang.clamp(-1.0, 1.0).acos();
            if !(tol::EDGE_ANGLE_MIN..=std::f64::consts::PI - tol::EDGE_ANGLE_MIN)
                .contains(&exterior_angle)
            {
                return Err(Error::DegenerateHull(format!(
                    "exterior angle {exterior_angle} outside (0, pi)"
                )));
            }
            edges.push(Edge {
                vertices: (a, b),
                source_vertices: (source[a], source[b]),
                faces: (fi, gi),
                length,
                exterior_angle,
            });
        }

        let poly = ConvexPolyhedron { vertices, source, faces, edges };
        poly.validate()?;
        Ok(poly)
    }

    fn validate(&self) -> Result<()> {
        let (v, e, f) = (self.vertices.len(), self.edges.len(), self.faces.len());
        if v + f != e + 2 {
            return Err(Error::DegenerateHull(format!("Euler check failed: V={v} E={e} F={f}")));
        }
        for face in &self.faces {
            for &i in &face.cycle {
                let d = mdot(self.vertices[i].coords(), face.plane.normal());
                if d.abs() > tol::FACE_INCIDENCE {
                    return Err(Error::DegenerateHull(format!(
                        "vertex {i} off its face plane by {d:e}"
                    )));
                }
            }
        }
        for face in &self.faces {
            for p in &self.vertices {
                if mdot(p.coords(), face.plane.normal()) > tol::FACE_INCIDENCE {
                    return Err(Error::DegenerateHull("vertex outside a face half-space".into()));
                }
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[MPoint] {
        &self.vertices
    }

    /// Input-point index of vertex `i`.
    pub fn source_index(&self, i: usize) -> usize {
        self.source[i]
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn contains(&self, p: &MPoint, slack: f64) -> bool {
        self.faces.iter().all(|f| f.plane.contains(p, slack))
    }

    /// Σ ℓ(e)·θ(e) over all edges: the total bending of the boundary.
    pub fn edge_bending_sum(&self) -> f64 {
        self.edges.iter().map(|e| e.length * e.exterior_angle).sum()
    }

    /// Hyperbolic volume by adaptive quadrature of the Klein volume element
    /// (1−|y|²)⁻² over a tetrahedral fan decomposition. Absolute estimated
    /// error is at most `tol`.
    pub fn volume(&self, tol: f64) -> Result<f64> {
        if tol < 1e-12 {
            return Err(Error::bad_input(format!("volume tol {tol:e} below 1e-12")));
        }
        let ys: Vec<Vector3<f64>> = self.vertices.iter().map(MPoint::klein).collect();
        let centroid = ys.iter().sum::<Vector3<f64>>() / ys.len() as f64;
        let mut tets = Vec::new();
        for face in &self.faces {
            let c = &face.cycle;
            for k in 1..c.len() - 1 {
                tets.push(Tet([centroid, ys[c[0]], ys[c[k]], ys[c[k + 1]]]));
            }
        }
        integrate_tets(&tets, &|y| (1.0 - y.norm_squared()).powi(-2), tol)
    }

    /// Dual volume Vol*(P) = Vol(P) − ½ Σ ℓ(e) θ(e).
    pub fn dual_volume(&self, tol: f64) -> Result<f64> {
        Ok(self.volume(tol)? - 0.5 * self.edge_bending_sum())
    }

    /// W(P) = ½ (Vol(P) + Vol*(P)) = Vol(P) − ¼ Σ ℓ(e) θ(e).
    pub fn w_volume(&self, tol: f64) -> Result<f64> {
        Ok(self.volume(tol)? - 0.25 * self.edge_bending_sum())
    }

    /// Interior angle of `face` at cycle position `k`, between the two
    /// geodesic edges meeting there.
    fn face_corner_angle(&self, face: &Face, k: usize) -> f64 {
        let n = face.cycle.len();
        let v = self.vertices[face.cycle[k]];
        let prev = self.vertices[face.cycle[(k + n - 1) % n]];
        let next = self.vertices[face.cycle[(k + 1) % n]];
        let dir = |to: &MPoint| {
            TangentVec::project(v, *to.coords())
                .normalized()
                .expect("distinct polyhedron vertices")
        };
        let (a, b) = (dir(&prev), dir(&next));
        mdot(&a.v, &b.v).clamp(-1.0, 1.0).acos()
    }

    /// Hyperbolic area of a face polygon, by the angle-defect of a fan
    /// triangulation (exact, no quadrature).
    pub fn face_area(&self, face_index: usize) -> f64 {
        let face = &self.faces[face_index];
        let c = &face.cycle;
        let mut area = 0.0;
        for k in 1..c.len() - 1 {
            let tri = [c[0], c[k], c[k + 1]];
            let mut angles = 0.0;
            for j in 0..3 {
                let v = self.vertices[tri[j]];
                let p = self.vertices[tri[(j + 1) % 3]];
                let q = self.vertices[tri[(j + 2) % 3]];
                let a = TangentVec::project(v, *p.coords()).normalized().unwrap();
                let b = TangentVec::project(v, *q.coords()).normalized().unwrap();
                angles += mdot(&a.v, &b.v).clamp(-1.0, 1.0).acos();
            }
            area += std::f64::consts::PI - angles;
        }
        area
    }

    /// Total boundary area Σ faces.
    pub fn boundary_area(&self) -> f64 {
        (0..self.faces.len()).map(|i| self.face_area(i)).sum()
    }

    /// Exterior solid angle at each vertex: 2π minus the sum of incident
    /// face corner angles. These satisfy Σ_v Ω_v = 4π + Area(∂P).
    pub fn vertex_solid_angles(&self) -> Vec<f64> {
        let mut omega = vec![2.0 * std::f64::consts::PI; self.vertices.len()];
        for face in &self.faces {
            for k in 0..face.cycle.len() {
                omega[face.cycle[k]] -= self.face_corner_angle(face, k);
            }
        }
        omega
    }

    pub fn apply(&self, iso: &Isometry) -> Result<ConvexPolyhedron> {
        let moved: Vec<MPoint> =
            self.source_points_in_order().iter().map(|p| iso.apply(p)).collect();
        ConvexPolyhedron::hull(&moved)
    }

    // Vertices listed by ascending source index, so a rebuilt hull keeps
    // source indices aligned with vertex identity.
    fn source_points_in_order(&self) -> Vec<MPoint> {
        let mut pairs: Vec<(usize, MPoint)> =
            self.source.iter().copied().zip(self.vertices.iter().copied()).collect();
        pairs.sort_by_key(|p| p.0);
        pairs.into_iter().map(|p| p.1).collect()
    }
}

fn incremental_hull(ys: &[Vector3<f64>]) -> Result<Vec<Tri>> {
    let scale = ys.iter().map(|y| y.norm()).fold(0.0, f64::max).max(1e-3);
    let eps = 1e-12 * scale;

    // Initial simplex: spread-out quadruple.
    let i0 = 0;
    let i1 = (0..ys.len())
        .max_by(|&a, &b| (ys[a] - ys[i0]).norm().total_cmp(&(ys[b] - ys[i0]).norm()))
        .unwrap();
    if (ys[i1] - ys[i0]).norm() < 1e-10 {
        return Err(Error::DegenerateHull("all points coincide".into()));
    }
    let line = (ys[i1] - ys[i0]).normalize();
    let i2 = (0..ys.len())
        .max_by(|&a, &b| {
            let da = ((ys[a] - ys[i0]) - (ys[a] - ys[i0]).dot(&line) * line).norm();
            let db = ((ys[b] - ys[i0]) - (ys[b] - ys[i0]).dot(&line) * line).norm();
            da.total_cmp(&db)
        })
        .unwrap();
    let arm = (ys[i2] - ys[i0]) - (ys[i2] - ys[i0]).dot(&line) * line;
    if arm.norm() < 1e-10 {
        return Err(Error::DegenerateHull("points are collinear".into()));
    }
    let n = line.cross(&arm.normalize());
    let i3 = (0..ys.len())
        .max_by(|&a, &b| {
            ((ys[a] - ys[i0]).dot(&n).abs()).total_cmp(&((ys[b] - ys[i0]).dot(&n).abs()))
        })
        .unwrap();
    if (ys[i3] - ys[i0]).dot(&n).abs() < 1e-10 {
        return Err(Error::DegenerateHull("points are coplanar in the Klein model".into()));
    }

    let interior = 0.25 * (ys[i0] + ys[i1] + ys[i2] + ys[i3]);
    let mut tris: Vec<Tri> = [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]]
        .into_iter()
        .map(|v| Tri::new(v, ys).oriented_outward(&interior))
        .collect();

    for p in 0..ys.len() {
        if [i0, i1, i2, i3].contains(&p) {
            continue;
        }
        let visible: Vec<usize> = (0..tris.len()).filter(|&t| tris[t].sees(&ys[p], eps)).collect();
        if visible.is_empty() {
            continue;
        }
        let vis_edges: std::collections::BTreeSet<(usize, usize)> =
            visible.iter().flat_map(|&t| tris[t].directed_edges()).collect();
        let horizon: Vec<(usize, usize)> = vis_edges
            .iter()
            .copied()
            .filter(|&(a, b)| !vis_edges.contains(&(b, a)))
            .collect();
        let mut keep: Vec<Tri> =
            (0..tris.len()).filter(|t| !visible.contains(t)).map(|t| tris[t]).collect();
        for (a, b) in horizon {
            keep.push(Tri::new([a, b, p], ys).oriented_outward(&interior));
        }
        tris = keep;
    }
    Ok(tris)
}

fn hull_interior_point(tris: &[Tri], ys: &[Vector3<f64>]) -> Vector3<f64> {
    let mut seen = std::collections::BTreeSet::new();
    let mut acc = Vector3::zeros();
    for t in tris {
        for &i in &t.v {
            if seen.insert(i) {
                acc += ys[i];
            }
        }
    }
    acc / seen.len() as f64
}

fn merge_coplanar(tris: &[Tri]) -> Vec<Vec<usize>> {
    let n = tris.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    let coplanar = |a: &Tri, b: &Tri| -> bool {
        let na = a.normal / a.normal.norm();
        let nb = b.normal / b.normal.norm();
        let ca = a.offset / a.normal.norm();
        let cb = b.offset / b.normal.norm();
        na.dot(&nb) > 1.0 - tol::COPLANAR_MERGE && (ca - cb).abs() < tol::COPLANAR_MERGE
    };
    // Union triangles sharing an edge with matching planes.
    let mut by_edge: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (i, t) in tris.iter().enumerate() {
        for (a, b) in t.directed_edges() {
            by_edge.insert((a, b), i);
        }
    }
    for (&(a, b), &i) in &by_edge {
        if let Some(&j) = by_edge.get(&(b, a)) {
            if i < j && coplanar(&tris[i], &tris[j]) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

fn boundary_cycle(group: &[usize], tris: &[Tri]) -> Result<Vec<usize>> {
    let dir_edges: std::collections::BTreeSet<(usize, usize)> =
        group.iter().flat_map(|&t| tris[t].directed_edges()).collect();
    let border: BTreeMap<usize, usize> = dir_edges
        .iter()
        .copied()
        .filter(|&(a, b)| !dir_edges.contains(&(b, a)))
        .collect();
    if border.is_empty() {
        return Err(Error::DegenerateHull("face group has no boundary".into()));
    }
    let start = *border.keys().next().unwrap();
    let mut cycle = vec![start];
    let mut cur = border[&start];
    while cur != start {
        cycle.push(cur);
        cur = *border
            .get(&cur)
            .ok_or_else(|| Error::DegenerateHull("face boundary is not a single cycle".into()))?;
        if cycle.len() > border.len() {
            return Err(Error::DegenerateHull("face boundary walk did not close".into()));
        }
    }
    if cycle.len() != border.len() {
        return Err(Error::DegenerateHull("face boundary has several components".into()));
    }
    Ok(cycle)
}

// ---------------------------------------------------------------------------
// Differentiable families
// ---------------------------------------------------------------------------

/// JSON form of a polyhedron: a list of points plus a quadrature tolerance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyhedronSpec {
    pub vertices: Vec<MPoint>,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_tol() -> f64 {
    tol::DEFAULT_QUAD_TOL
}

impl PolyhedronSpec {
    pub fn build(&self) -> Result<ConvexPolyhedron> {
        hull(&self.vertices)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Builtin {
    StretchTetra,
    ScaleTetra,
    AsymTetra,
    RigidTetra,
    EdgeTwistTetra,
}

/// One-parameter family of polyhedra with fixed combinatorics: either a
/// versioned builtin generator or dense time samples with local cubic
/// interpolation.
#[derive(Debug, Clone)]
pub struct PolyhedronFamily {
    name: String,
    kind: FamilyKind,
    domain: (f64, f64),
}

#[derive(Debug, Clone)]
enum FamilyKind {
    Builtin(Builtin),
    Samples { ts: Vec<f64>, vertex_sets: Vec<Vec<MPoint>> },
}

/// Names of the frozen builtin polyhedron families.
pub const BUILTIN_FAMILIES: [&str; 5] = [
    "builtin:stretch-tetra-v1",
    "builtin:scale-tetra-v1",
    "builtin:asym-tetra-v1",
    "builtin:rigid-tetra-v1",
    "builtin:edge-twist-tetra-v1",
];

/// The three families used for derivative baselines (no rigid motions).
pub const DEFORMING_FAMILIES: [&str; 3] =
    ["builtin:stretch-tetra-v1", "builtin:scale-tetra-v1", "builtin:asym-tetra-v1"];

fn base_tetra_klein() -> [Vector3<f64>; 4] {
    [
        Vector3::new(0.12, 0.08, -0.10),
        Vector3::new(0.35, -0.06, 0.05),
        Vector3::new(-0.08, 0.30, 0.07),
        Vector3::new(-0.05, -0.04, 0.33),
    ]
}

/// The frozen base tetrahedron shared by the builtin families.
pub fn base_tetra() -> [MPoint; 4] {
    base_tetra_klein().map(|y| MPoint::from_klein(y).unwrap())
}

impl PolyhedronFamily {
    pub fn builtin(name: &str) -> Result<Self> {
        let kind = match name {
            "builtin:stretch-tetra-v1" => Builtin::StretchTetra,
            "builtin:scale-tetra-v1" => Builtin::ScaleTetra,
            "builtin:asym-tetra-v1" => Builtin::AsymTetra,
            "builtin:rigid-tetra-v1" => Builtin::RigidTetra,
            "builtin:edge-twist-tetra-v1" => Builtin::EdgeTwistTetra,
            other => return Err(Error::UnknownName(other.into())),
        };
        Ok(PolyhedronFamily {
            name: name.to_string(),
            kind: FamilyKind::Builtin(kind),
            domain: (-0.5, 0.5),
        })
    }

    /// Family from dense samples; vertices are interpolated coordinate-wise
    /// by a local cubic through the four nearest sample times and then
    /// renormalized onto the hyperboloid.
    pub fn from_samples(ts: Vec<f64>, vertex_sets: Vec<Vec<MPoint>>) -> Result<Self> {
        if ts.len() != vertex_sets.len() || ts.len() < 4 {
            return Err(Error::bad_input("need >= 4 samples with matching times"));
        }
        if !ts.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::bad_input("sample times must be strictly increasing"));
        }
        let nv = vertex_sets[0].len();
        if vertex_sets.iter().any(|v| v.len() != nv) {
            return Err(Error::bad_input("all samples need the same vertex count"));
        }
        let domain = (ts[0], *ts.last().unwrap());
        Ok(PolyhedronFamily {
            name: "samples".into(),
            kind: FamilyKind::Samples { ts, vertex_sets },
            domain,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn vertices_at(&self, t: f64) -> Result<Vec<MPoint>> {
        if t < self.domain.0 - 1e-12 || t > self.domain.1 + 1e-12 {
            return Err(Error::bad_input(format!(
                "t = {t} outside family domain [{}, {}]",
                self.domain.0, self.domain.1
            )));
        }
        match &self.kind {
            FamilyKind::Builtin(b) => builtin_vertices(*b, t),
            FamilyKind::Samples { ts, vertex_sets } => {
                let nv = vertex_sets[0].len();
                let mut out = Vec::with_capacity(nv);
                // Window of the four nearest samples.
                let pos = ts.partition_point(|&s| s < t);
                let lo = pos.saturating_sub(2).min(ts.len() - 4);
                for v in 0..nv {
                    let mut x = Vector4::zeros();
                    for i in lo..lo + 4 {
                        let mut w = 1.0;
                        for j in lo..lo + 4 {
                            if j != i {
                                w *= (t - ts[j]) / (ts[i] - ts[j]);
                            }
                        }
                        x += w * vertex_sets[i][v].coords();
                    }
                    out.push(MPoint::renormalized(x)?);
                }
                Ok(out)
            }
        }
    }

    pub fn polyhedron_at(&self, t: f64) -> Result<ConvexPolyhedron> {
        hull(&self.vertices_at(t)?)
    }
}

fn builtin_vertices(which: Builtin, t: f64) -> Result<Vec<MPoint>> {
    let base = base_tetra();
    let dir = |p: MPoint, w: Vector4<f64>| TangentVec::project(p, w).normalized().unwrap();
    match which {
        Builtin::StretchTetra => {
            let mut v = base.to_vec();
            let u = dir(base[3], Vector4::new(0.0, 0.25, 0.40, 0.55));
            v[3] = exp_map(&u, 0.8 * t)?;
            Ok(v)
        }
        Builtin::ScaleTetra => base_tetra_klein()
            .iter()
            .map(|y| MPoint::from_klein((1.0 + 0.6 * t) * y))
            .collect(),
        Builtin::AsymTetra => {
            let mut v = base.to_vec();
            let u1 = dir(base[1], Vector4::new(0.0, 0.9, 0.2, -0.3));
            let u2 = dir(base[2], Vector4::new(0.0, -0.1, 0.8, 0.4));
            v[1] = exp_map(&u1, 0.5 * t)?;
            v[2] = exp_map(&u2, -0.35 * t)?;
            Ok(v)
        }
        Builtin::RigidTetra => {
            let axis = HGeodesic::new(
                MPoint::origin(),
                TangentVec::new(MPoint::origin(), Vector4::new(0.0, 0.6, 0.3, 0.74))
                    .unwrap()
                    .normalized()
                    .unwrap(),
            )?;
            let screw =
                translation_along(&axis, 0.45 * t).compose(&rotation_about(&axis, 0.35 * t));
            Ok(base.iter().map(|p| screw.apply(p)).collect())
        }
        Builtin::EdgeTwistTetra => {
            let axis = HGeodesic::through(&base[0], &base[1])?;
            let rot = rotation_about(&axis, 0.9 * t);
            let mut v = base.to_vec();
            v[2] = rot.apply(&base[2]);
            v[3] = rot.apply(&base[3]);
            Ok(v)
        }
    }
}

/// Per-edge lengths, exterior angles, and their central-difference
/// derivatives along a family.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EdgeDerivative {
    /// Edge endpoints as input-point indices.
    pub vertices: (usize, usize),
    pub length: f64,
    pub exterior_angle: f64,
    pub d_length: f64,
    pub d_exterior_angle: f64,
}

/// Central-difference edge data for a family at `t` with stencil `h`.
///
/// Fails with `CombinatorialChange` when the edge sets at t−h, t, t+h do not
/// agree as sets of input-point index pairs.
pub fn edge_data_derivative(
    family: &PolyhedronFamily,
    t: f64,
    h: f64,
) -> Result<Vec<EdgeDerivative>> {
    let (lo, hi) = family.domain();
    if t - h < lo - 1e-12 || t + h > hi + 1e-12 {
        return Err(Error::bad_input(format!("stencil [{}, {}] leaves the domain", t - h, t + h)));
    }
    let key = |e: &Edge| {
        let (a, b) = e.source_vertices;
        (a.min(b), a.max(b))
    };
    let collect = |p: &ConvexPolyhedron| -> BTreeMap<(usize, usize), (f64, f64)> {
        p.edges().iter().map(|e| (key(e), (e.length, e.exterior_angle))).collect()
    };
    let minus = collect(&family.polyhedron_at(t - h)?);
    let mid = collect(&family.polyhedron_at(t)?);
    let plus = collect(&family.polyhedron_at(t + h)?);
    if minus.len() != mid.len()
        || plus.len() != mid.len()
        || !mid.keys().all(|k| minus.contains_key(k) && plus.contains_key(k))
    {
        return Err(Error::CombinatorialChange(t));
    }
    Ok(mid
        .iter()
        .map(|(&k, &(length, exterior_angle))| {
            let (lm, am) = minus[&k];
            let (lp, ap) = plus[&k];
            EdgeDerivative {
                vertices: k,
                length,
                exterior_angle,
                d_length: (lp - lm) / (2.0 * h),
                d_exterior_angle: (ap - am) / (2.0 * h),
            }
        })
        .collect())
}

/// JSON form of a family: a builtin name or explicit samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FamilySpec {
    Builtin {
        kind: String,
        #[serde(default)]
        params: serde_json::Value,
    },
    Samples {
        samples: Vec<FamilySample>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilySample {
    pub t: f64,
    pub vertices: Vec<MPoint>,
}

impl FamilySpec {
    pub fn build(&self) -> Result<PolyhedronFamily> {
        match self {
            FamilySpec::Builtin { kind, .. } => PolyhedronFamily::builtin(kind),
            FamilySpec::Samples { samples } => {
                let ts = samples.iter().map(|s| s.t).collect();
                let vs = samples.iter().map(|s| s.vertices.clone()).collect();
                PolyhedronFamily::from_samples(ts, vs)
            }
        }
    }
}
