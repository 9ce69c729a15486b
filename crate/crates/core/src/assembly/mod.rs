//! Discrete operators and load vectors of the coupled problem.

pub mod body;
pub mod coupling;
pub mod displacement;
pub mod plate;
pub mod system;

use nalgebra::{Point2, Point3, Vector3};

use crate::elements::{DiscontinuousP1Map, HuMaElement, MorleyElement, P1Tri, PlateDofMap, StressDofMap};
use crate::error::{Error, Result};
use crate::mesh::{TetMesh, TriMesh};
use crate::overlay::{extract_interface_triangulation, intersect_triangulations, InterfaceFace, OverlayCell};

pub use body::{
    assemble_body_load, assemble_compliance, assemble_displacement_mass, assemble_divergence,
    impose_traction_bc, interpolate_stress, project_to_vh,
};
pub use coupling::assemble_interface_coupling;
pub use displacement::{assemble_displacement_system, DisplacementSystem};
pub use plate::{assemble_plate_load, assemble_plate_stiffness, Region};
pub use system::{assemble_block_system, BlockSystem, MonolithicSystem, SolutionFields};

/// Data driving a coupled solve.
pub trait Forcing {
    /// Body load `f^α`.
    fn body_load(&self, x: &Point3<f64>) -> Vector3<f64>;
    /// Traction data on the free body boundary with outward normal `n`.
    fn traction(&self, x: &Point3<f64>, n: &Vector3<f64>) -> Vector3<f64>;
    /// Plate load density on `β`.
    fn plate_load_smooth(&self, x: &Point2<f64>) -> Vector3<f64>;
    /// Additional plate load density supported on `Γ`.
    fn plate_load_jump(&self, x: &Point2<f64>) -> Vector3<f64>;
}

/// Homogeneous data.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroForcing;

impl Forcing for ZeroForcing {
    fn body_load(&self, _: &Point3<f64>) -> Vector3<f64> {
        Vector3::zeros()
    }
    fn traction(&self, _: &Point3<f64>, _: &Vector3<f64>) -> Vector3<f64> {
        Vector3::zeros()
    }
    fn plate_load_smooth(&self, _: &Point2<f64>) -> Vector3<f64> {
        Vector3::zeros()
    }
    fn plate_load_jump(&self, _: &Point2<f64>) -> Vector3<f64> {
        Vector3::zeros()
    }
}

/// Quadrature degrees for volume terms, interface terms and error norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Degrees {
    pub volume: usize,
    pub interface: usize,
    pub error: usize,
}

impl Default for Degrees {
    fn default() -> Self {
        Self {
            volume: 4,
            interface: 6,
            error: 8,
        }
    }
}

/// Body mesh with the stress and displacement spaces.
#[derive(Debug, Clone)]
pub struct BodySpace {
    pub mesh: TetMesh,
    pub stress: StressDofMap,
    pub disp: DiscontinuousP1Map,
    pub elements: Vec<HuMaElement>,
}

impl BodySpace {
    pub fn new(mesh: TetMesh) -> Result<Self> {
        let stress = StressDofMap::new(&mesh);
        let disp = DiscontinuousP1Map::new(&mesh);
        let elements = (0..mesh.tets.len())
            .map(|t| {
                stress
                    .element(&mesh, t)
                    .map_err(|reason| Error::Element { element: t, reason })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            mesh,
            stress,
            disp,
            elements,
        })
    }

    pub fn n_sigma(&self) -> usize {
        self.stress.n_dofs
    }

    pub fn n_v(&self) -> usize {
        self.disp.n_dofs()
    }
}

/// Plate mesh with the membrane and Morley spaces.
#[derive(Debug, Clone)]
pub struct PlateSpace {
    pub mesh: TriMesh,
    pub dofs: PlateDofMap,
    pub p1: Vec<P1Tri>,
    pub morley: Vec<MorleyElement>,
}

impl PlateSpace {
    pub fn new(mesh: TriMesh) -> Result<Self> {
        let dofs = PlateDofMap::new(&mesh);
        let mut p1 = Vec::with_capacity(mesh.triangles.len());
        let mut morley = Vec::with_capacity(mesh.triangles.len());
        for t in 0..mesh.triangles.len() {
            let pts = mesh.triangle_points(t);
            p1.push(P1Tri::new(pts).ok_or_else(|| Error::Element {
                element: t,
                reason: "degenerate triangle".into(),
            })?);
            morley.push(
                MorleyElement::new(pts, mesh.triangles[t])
                    .map_err(|reason| Error::Element { element: t, reason })?,
            );
        }
        Ok(Self {
            mesh,
            dofs,
            p1,
            morley,
        })
    }

    pub fn n_w(&self) -> usize {
        self.dofs.n_dofs
    }
}

/// Overlay of the body interface faces with the plate triangles in `Γ`.
#[derive(Debug, Clone)]
pub struct InterfaceOverlay {
    pub faces: Vec<InterfaceFace>,
    pub cells: Vec<OverlayCell>,
    /// Tet-local vertex index of each face vertex.
    pub face_local_vertices: Vec<[usize; 3]>,
    /// Tet-local face index (the vertex not on the face).
    pub face_local_index: Vec<usize>,
}

impl InterfaceOverlay {
    pub fn new(body: &TetMesh, plate: &TriMesh, degree: usize) -> Result<Self> {
        let faces = extract_interface_triangulation(body);
        let cells = intersect_triangulations(&faces, plate, degree)?;
        let mut face_local_vertices = Vec::with_capacity(faces.len());
        let mut face_local_index = Vec::with_capacity(faces.len());
        for f in &faces {
            let tet = body.tets[f.owner];
            let loc = f.vertices.map(|v| tet.iter().position(|&w| w == v).unwrap());
            face_local_index.push((0..4).find(|k| !loc.contains(k)).unwrap());
            face_local_vertices.push(loc);
        }
        Ok(Self {
            faces,
            cells,
            face_local_vertices,
            face_local_index,
        })
    }

    /// Tet barycentrics from face barycentrics of interface face `f`.
    pub fn tet_barycentric(&self, f: usize, bf: &[f64; 3]) -> [f64; 4] {
        let mut b = [0.0; 4];
        for (a, &k) in self.face_local_vertices[f].iter().enumerate() {
            b[k] = bf[a];
        }
        b
    }

    /// True when every cell coincides with its parent face.
    pub fn is_matching(&self) -> bool {
        self.cells.len() == self.faces.len()
            && self
                .cells
                .iter()
                .all(|c| (c.area - face_area(&self.faces[c.face])).abs() < 1e-12)
    }
}

fn face_area(f: &InterfaceFace) -> f64 {
    let [a, b, c] = f.points;
    0.5 * (b - a).perp(&(c - a)).abs()
}

/// Everything needed to assemble the coupled system on one mesh pair.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub body: BodySpace,
    pub plate: PlateSpace,
    pub overlay: InterfaceOverlay,
    pub degrees: Degrees,
}

impl Discretization {
    pub fn new(body: TetMesh, plate: TriMesh, degrees: Degrees) -> Result<Self> {
        let overlay = InterfaceOverlay::new(&body, &plate, degrees.interface)?;
        Ok(Self {
            body: BodySpace::new(body)?,
            plate: PlateSpace::new(plate)?,
            overlay,
            degrees,
        })
    }
}
