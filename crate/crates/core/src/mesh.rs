//! Structured simplicial meshes of the body `α = (−1/2,1/2)² × (0,1)` and
//! the plate midplane `β = (−1,1)²`, with boundary tags.
//!
//! The body is cut into `n³` cubes, each split into the six Kuhn
//! tetrahedra sharing the cube diagonal from its lowest to its highest
//! corner. With one global convention the tetrahedral mesh is conforming and
//! its trace on `x3 = 0` is the square grid split along the `/` diagonals.

use std::collections::HashMap;
use std::io::Write;

use nalgebra::{Point2, Point3, Vector3};

use crate::error::{Error, Result};

/// Tolerance used when classifying vertices against planes of the domain.
pub const GEOM_TOL: f64 = 1e-12;

/// Half-width of the interface square `Γ = [−1/2, 1/2]²`.
pub const GAMMA_HALF_WIDTH: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FaceTag {
    /// Face lying on `x3 = 0`, glued to the plate.
    Interface,
    /// Traction boundary `∂α ∖ Γ`.
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryFace {
    /// Sorted vertex indices.
    pub vertices: [usize; 3],
    pub owner: usize,
    pub tag: FaceTag,
}

#[derive(Debug, Clone)]
pub struct TetMesh {
    pub vertices: Vec<Point3<f64>>,
    pub tets: Vec<[usize; 4]>,
    pub boundary_faces: Vec<BoundaryFace>,
    /// Cubes per unit edge.
    pub n: usize,
    pub level: usize,
    pub h_alpha: f64,
}

/// Diagonal convention of the square cells of the plate grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Diagonal {
    /// `/` diagonals, identical to the body's interface triangulation.
    SameAsBody,
    /// `\` diagonals.
    Flipped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeTag {
    Clamped,
}

#[derive(Debug, Clone)]
pub struct TriMesh {
    pub vertices: Vec<Point2<f64>>,
    pub triangles: Vec<[usize; 3]>,
    /// Sorted vertex pairs on `∂β`.
    pub boundary_edges: Vec<([usize; 2], EdgeTag)>,
    /// Triangles contained in `closure(Γ)`.
    pub interface_region_triangles: Vec<usize>,
    /// Cells per side of `(−1, 1)²`.
    pub n: usize,
    pub diagonal: Diagonal,
    pub level: usize,
    pub h_beta: f64,
}

/// All faces of a tetrahedral mesh with their neighbouring cells.
#[derive(Debug, Clone)]
pub struct TetTopology {
    /// Sorted vertex triples.
    pub faces: Vec<[usize; 3]>,
    /// Adjacent tets; the first entry is the one with the smaller index.
    pub face_tets: Vec<(usize, Option<usize>)>,
    /// Boundary tag for faces on `∂α`.
    pub face_tags: Vec<Option<FaceTag>>,
    /// `tet_faces[t][i]` is the face opposite local vertex `i`.
    pub tet_faces: Vec<[usize; 4]>,
}

/// Edges of a triangle mesh.
#[derive(Debug, Clone)]
pub struct TriTopology {
    /// Sorted vertex pairs.
    pub edges: Vec<[usize; 2]>,
    /// `tri_edges[t][k]` is the edge opposite local vertex `k`.
    pub tri_edges: Vec<[usize; 3]>,
    pub edge_on_boundary: Vec<bool>,
    pub vertex_on_boundary: Vec<bool>,
}

/// Builds the Kuhn tetrahedral mesh of the body with `n` cubes per edge.
pub fn build_body_mesh(n: usize) -> Result<TetMesh> {
    if n == 0 {
        return Err(Error::MeshParameter("body mesh needs n >= 1".into()));
    }
    let m = n + 1;
    let idx = |i: usize, j: usize, k: usize| i + m * (j + m * k);
    let mut vertices = Vec::with_capacity(m * m * m);
    for k in 0..m {
        for j in 0..m {
            for i in 0..m {
                vertices.push(Point3::new(
                    -0.5 + i as f64 / n as f64,
                    -0.5 + j as f64 / n as f64,
                    k as f64 / n as f64,
                ));
            }
        }
    }
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut tets = Vec::with_capacity(6 * n * n * n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                for perm in PERMS {
                    let mut c = [i, j, k];
                    let mut tet = [idx(c[0], c[1], c[2]), 0, 0, 0];
                    for (s, &axis) in perm.iter().enumerate() {
                        c[axis] += 1;
                        tet[s + 1] = idx(c[0], c[1], c[2]);
                    }
                    if signed_volume(&vertices, &tet) < 0.0 {
                        tet.swap(2, 3);
                    }
                    tets.push(tet);
                }
            }
        }
    }
    let mut mesh = TetMesh {
        vertices,
        tets,
        boundary_faces: Vec::new(),
        n,
        level: 0,
        h_alpha: 3f64.sqrt() / n as f64,
    };
    mesh.boundary_faces = mesh.classify_boundary();
    Ok(mesh)
}

fn signed_volume(vertices: &[Point3<f64>], tet: &[usize; 4]) -> f64 {
    let a = vertices[tet[0]];
    let e1 = vertices[tet[1]] - a;
    let e2 = vertices[tet[2]] - a;
    let e3 = vertices[tet[3]] - a;
    e1.dot(&e2.cross(&e3)) / 6.0
}

const TET_FACES: [[usize; 3]; 4] = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];

fn sorted3(mut f: [usize; 3]) -> [usize; 3] {
    f.sort_unstable();
    f
}

impl TetMesh {
    pub fn signed_volume(&self, t: usize) -> f64 {
        signed_volume(&self.vertices, &self.tets[t])
    }

    pub fn tet_points(&self, t: usize) -> [Point3<f64>; 4] {
        self.tets[t].map(|v| self.vertices[v])
    }

    fn face_map(&self) -> HashMap<[usize; 3], Vec<usize>> {
        let mut map: HashMap<[usize; 3], Vec<usize>> = HashMap::with_capacity(2 * self.tets.len());
        for (t, tet) in self.tets.iter().enumerate() {
            for lf in TET_FACES {
                map.entry(sorted3(lf.map(|i| tet[i]))).or_default().push(t);
            }
        }
        map
    }

    fn tag_for(&self, f: &[usize; 3]) -> FaceTag {
        if f.iter().all(|&v| self.vertices[v].z.abs() <= GEOM_TOL) {
            FaceTag::Interface
        } else {
            FaceTag::Free
        }
    }

    fn classify_boundary(&self) -> Vec<BoundaryFace> {
        let mut out: Vec<BoundaryFace> = self
            .face_map()
            .into_iter()
            .filter(|(_, ts)| ts.len() == 1)
            .map(|(f, ts)| BoundaryFace {
                vertices: f,
                owner: ts[0],
                tag: self.tag_for(&f),
            })
            .collect();
        out.sort_by_key(|b| b.vertices);
        out
    }

    /// Full face list with deterministic (sorted) ordering.
    pub fn topology(&self) -> TetTopology {
        let mut entries: Vec<([usize; 3], Vec<usize>)> = self.face_map().into_iter().collect();
        entries.sort_by_key(|(f, _)| *f);
        let index: HashMap<[usize; 3], usize> = entries
            .iter()
            .enumerate()
            .map(|(i, (f, _))| (*f, i))
            .collect();
        let mut faces = Vec::with_capacity(entries.len());
        let mut face_tets = Vec::with_capacity(entries.len());
        let mut face_tags = Vec::with_capacity(entries.len());
        for (f, mut ts) in entries {
            ts.sort_unstable();
            faces.push(f);
            face_tets.push((ts[0], ts.get(1).copied()));
            face_tags.push(if ts.len() == 1 { Some(self.tag_for(&f)) } else { None });
        }
        let tet_faces = self
            .tets
            .iter()
            .map(|tet| TET_FACES.map(|lf| index[&sorted3(lf.map(|i| tet[i]))]))
            .collect();
        TetTopology {
            faces,
            face_tets,
            face_tags,
            tet_faces,
        }
    }

    /// Uniform refinement: the mesh with twice as many cubes per edge.
    pub fn refine_uniform(&self) -> Self {
        let mut fine = build_body_mesh(2 * self.n).expect("n >= 1");
        fine.level = self.level + 1;
        fine
    }

    /// Writes `v x y z` and `t i j k l` lines.
    pub fn write_dump<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for v in &self.vertices {
            writeln!(w, "v {} {} {}", v.x, v.y, v.z)?;
        }
        for t in &self.tets {
            writeln!(w, "t {} {} {} {}", t[0], t[1], t[2], t[3])?;
        }
        Ok(())
    }
}

/// Builds the plate grid with `n` cells per side; `n` must be a positive
/// multiple of four so that the lines `x, y = ±1/2` are grid lines.
pub fn build_plate_mesh(n: usize, diagonal: Diagonal) -> Result<TriMesh> {
    if n == 0 || n % 4 != 0 {
        return Err(Error::MeshParameter(format!(
            "plate mesh needs n to be a positive multiple of 4 so that the interface boundary is resolved, got {n}"
        )));
    }
    Ok(TriMesh::structured_unchecked(n, diagonal))
}

impl TriMesh {
    /// Structured grid of `(−1,1)²` without the interface-resolution check.
    pub fn structured_unchecked(n: usize, diagonal: Diagonal) -> Self {
        assert!(n >= 1);
        let m = n + 1;
        let idx = |i: usize, j: usize| i + m * j;
        let mut vertices = Vec::with_capacity(m * m);
        for j in 0..m {
            for i in 0..m {
                vertices.push(Point2::new(
                    -1.0 + 2.0 * i as f64 / n as f64,
                    -1.0 + 2.0 * j as f64 / n as f64,
                ));
            }
        }
        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let a = idx(i, j);
                let b = idx(i + 1, j);
                let c = idx(i + 1, j + 1);
                let d = idx(i, j + 1);
                match diagonal {
                    Diagonal::SameAsBody => triangles.extend([[a, b, c], [a, c, d]]),
                    Diagonal::Flipped => triangles.extend([[a, b, d], [b, c, d]]),
                }
            }
        }
        let mut boundary_edges = Vec::with_capacity(4 * n);
        for i in 0..n {
            for e in [
                [idx(i, 0), idx(i + 1, 0)],
                [idx(i, n), idx(i + 1, n)],
                [idx(0, i), idx(0, i + 1)],
                [idx(n, i), idx(n, i + 1)],
            ] {
                boundary_edges.push((e, EdgeTag::Clamped));
            }
        }
        let mut mesh = TriMesh {
            vertices,
            triangles,
            boundary_edges,
            interface_region_triangles: Vec::new(),
            n,
            diagonal,
            level: 0,
            h_beta: 2.0 * 2f64.sqrt() / n as f64,
        };
        mesh.interface_region_triangles = (0..mesh.triangles.len())
            .filter(|&t| mesh.triangle_in_gamma(t))
            .collect();
        mesh
    }

    pub fn triangle_points(&self, t: usize) -> [Point2<f64>; 3] {
        self.triangles[t].map(|v| self.vertices[v])
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        0.5 * ((b - a).perp(&(c - a)))
    }

    /// All vertices inside `closure(Γ)`.
    pub fn triangle_in_gamma(&self, t: usize) -> bool {
        self.triangles[t]
            .iter()
            .all(|&v| in_closed_gamma(&self.vertices[v]))
    }

    pub fn refine_uniform(&self) -> Self {
        let mut fine = TriMesh::structured_unchecked(2 * self.n, self.diagonal);
        fine.level = self.level + 1;
        fine
    }

    pub fn topology(&self) -> TriTopology {
        let mut index: HashMap<[usize; 2], usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut counts = Vec::new();
        let mut tri_edges = Vec::with_capacity(self.triangles.len());
        for tri in &self.triangles {
            let mut te = [0; 3];
            for (k, slot) in te.iter_mut().enumerate() {
                let mut e = [tri[(k + 1) % 3], tri[(k + 2) % 3]];
                e.sort_unstable();
                let id = *index.entry(e).or_insert_with(|| {
                    edges.push(e);
                    counts.push(0usize);
                    edges.len() - 1
                });
                counts[id] += 1;
                *slot = id;
            }
            tri_edges.push(te);
        }
        let edge_on_boundary: Vec<bool> = counts.iter().map(|&c| c == 1).collect();
        let mut vertex_on_boundary = vec![false; self.vertices.len()];
        for (e, &b) in edges.iter().zip(&edge_on_boundary) {
            if b {
                vertex_on_boundary[e[0]] = true;
                vertex_on_boundary[e[1]] = true;
            }
        }
        TriTopology {
            edges,
            tri_edges,
            edge_on_boundary,
            vertex_on_boundary,
        }
    }

    pub fn write_dump<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for v in &self.vertices {
            writeln!(w, "v {} {}", v.x, v.y)?;
        }
        for t in &self.triangles {
            writeln!(w, "t {} {} {}", t[0], t[1], t[2])?;
        }
        Ok(())
    }
}

pub fn in_closed_gamma(p: &Point2<f64>) -> bool {
    p.x.abs() <= GAMMA_HALF_WIDTH + GEOM_TOL && p.y.abs() <= GAMMA_HALF_WIDTH + GEOM_TOL
}

/// True when the interior of triangle `tri` does not meet the open square Γ
/// (separating axis test over the square axes and the triangle normals).
fn interior_disjoint_from_gamma(tri: &[Point2<f64>; 3]) -> bool {
    let square = [
        Point2::new(-0.5, -0.5),
        Point2::new(0.5, -0.5),
        Point2::new(0.5, 0.5),
        Point2::new(-0.5, 0.5),
    ];
    let mut axes = vec![nalgebra::Vector2::new(1.0, 0.0), nalgebra::Vector2::new(0.0, 1.0)];
    for k in 0..3 {
        let e = tri[(k + 1) % 3] - tri[k];
        axes.push(nalgebra::Vector2::new(-e.y, e.x));
    }
    axes.iter().any(|ax| {
        let (tmin, tmax) = tri
            .iter()
            .map(|p| p.coords.dot(ax))
            .fold((f64::MAX, f64::MIN), |(a, b), v| (a.min(v), b.max(v)));
        let (smin, smax) = square
            .iter()
            .map(|p| p.coords.dot(ax))
            .fold((f64::MAX, f64::MIN), |(a, b), v| (a.min(v), b.max(v)));
        let scale = ax.norm().max(1.0);
        tmax <= smin + GEOM_TOL * scale || smax <= tmin + GEOM_TOL * scale
    })
}

/// One invariant violation found by [`validate_tet_mesh`] or
/// [`validate_tri_mesh`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonPositiveVolume { tet: usize, volume: f64 },
    VolumeSum { total: f64 },
    BoundaryTag { face: [usize; 3] },
    BoundaryOffDomain { face: [usize; 3] },
    BoundaryArea { total: f64 },
    NonPositiveArea { triangle: usize, area: f64 },
    AreaSum { total: f64 },
    InterfaceNotResolved { triangle: usize },
    InterfaceRegionMismatch { triangle: usize },
}

pub fn validate_tet_mesh(mesh: &TetMesh) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut total = 0.0;
    for t in 0..mesh.tets.len() {
        let v = mesh.signed_volume(t);
        if v <= 0.0 {
            out.push(Violation::NonPositiveVolume { tet: t, volume: v });
        }
        total += v.abs();
    }
    if (total - 1.0).abs() > 1e-10 {
        out.push(Violation::VolumeSum { total });
    }
    let on_box = |p: &Point3<f64>| -> [bool; 6] {
        [
            (p.x + 0.5).abs() <= GEOM_TOL,
            (p.x - 0.5).abs() <= GEOM_TOL,
            (p.y + 0.5).abs() <= GEOM_TOL,
            (p.y - 0.5).abs() <= GEOM_TOL,
            p.z.abs() <= GEOM_TOL,
            (p.z - 1.0).abs() <= GEOM_TOL,
        ]
    };
    let mut area = 0.0;
    for bf in &mesh.boundary_faces {
        let flags: Vec<[bool; 6]> = bf.vertices.iter().map(|&v| on_box(&mesh.vertices[v])).collect();
        let common = (0..6).find(|&s| flags.iter().all(|f| f[s]));
        match common {
            None => out.push(Violation::BoundaryOffDomain { face: bf.vertices }),
            Some(side) => {
                let expect = if side == 4 { FaceTag::Interface } else { FaceTag::Free };
                if bf.tag != expect {
                    out.push(Violation::BoundaryTag { face: bf.vertices });
                }
            }
        }
        let [a, b, c] = bf.vertices.map(|v| mesh.vertices[v]);
        area += 0.5 * (b - a).cross(&(c - a)).norm();
    }
    if (area - 6.0).abs() > 1e-10 {
        out.push(Violation::BoundaryArea { total: area });
    }
    out
}

pub fn validate_tri_mesh(mesh: &TriMesh) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut total = 0.0;
    for t in 0..mesh.triangles.len() {
        let a = mesh.signed_area(t);
        if a <= 0.0 {
            out.push(Violation::NonPositiveArea { triangle: t, area: a });
        }
        total += a.abs();
        let inside = mesh.triangle_in_gamma(t);
        if !inside && !interior_disjoint_from_gamma(&mesh.triangle_points(t)) {
            out.push(Violation::InterfaceNotResolved { triangle: t });
        }
        if inside != mesh.interface_region_triangles.binary_search(&t).is_ok() {
            out.push(Violation::InterfaceRegionMismatch { triangle: t });
        }
    }
    if (total - 4.0).abs() > 1e-10 {
        out.push(Violation::AreaSum { total });
    }
    out
}

/// Outward unit normal and area of a tet face given by three points, oriented
/// away from `opposite`.
pub fn face_normal_area(
    a: &Point3<f64>,
    b: &Point3<f64>,
    c: &Point3<f64>,
    opposite: &Point3<f64>,
) -> (Vector3<f64>, f64) {
    let cr = (b - a).cross(&(c - a));
    let area = 0.5 * cr.norm();
    let mut n = cr / cr.norm();
    if n.dot(&(opposite - a)) > 0.0 {
        n = -n;
    }
    (n, area)
}
