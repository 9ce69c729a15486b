//! Global numbering of the discrete spaces.

use crate::mesh::{FaceTag, TetMesh, TetTopology, TriMesh, TriTopology};

use super::huma::{HuMaElement, FACE_DOFS, HUMA_DIM, INTERIOR_DOFS};

/// Mesh entity carrying a DOF.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DofEntity {
    Vertex(usize),
    Edge(usize),
    Face(usize),
    Interior(usize),
}

/// Stress DOFs: nine per face, numbered `9 * face + 3 * a + c`, followed by
/// six per tet.
#[derive(Debug, Clone)]
pub struct StressDofMap {
    pub topo: TetTopology,
    pub n_face_dofs: usize,
    pub n_dofs: usize,
    pub tet_dofs: Vec<[usize; HUMA_DIM]>,
    /// Per tet and local face: `+1` when the global normal is outward.
    pub normal_sign: Vec<[f64; 4]>,
}

impl StressDofMap {
    pub fn new(mesh: &TetMesh) -> Self {
        let topo = mesh.topology();
        let n_faces = topo.faces.len();
        let n_face_dofs = FACE_DOFS * n_faces;
        let mut tet_dofs = Vec::with_capacity(mesh.tets.len());
        let mut normal_sign = Vec::with_capacity(mesh.tets.len());
        for (t, faces) in topo.tet_faces.iter().enumerate() {
            let mut d = [0; HUMA_DIM];
            let mut s = [0.0; 4];
            for (i, &f) in faces.iter().enumerate() {
                for k in 0..FACE_DOFS {
                    d[FACE_DOFS * i + k] = FACE_DOFS * f + k;
                }
                s[i] = if topo.face_tets[f].0 == t { 1.0 } else { -1.0 };
            }
            for m in 0..INTERIOR_DOFS {
                d[36 + m] = n_face_dofs + INTERIOR_DOFS * t + m;
            }
            tet_dofs.push(d);
            normal_sign.push(s);
        }
        Self {
            n_dofs: n_face_dofs + INTERIOR_DOFS * mesh.tets.len(),
            n_face_dofs,
            topo,
            tet_dofs,
            normal_sign,
        }
    }

    pub fn element(&self, mesh: &TetMesh, t: usize) -> Result<HuMaElement, String> {
        HuMaElement::new(mesh.tet_points(t), mesh.tets[t], self.normal_sign[t])
    }

    pub fn entity(&self, dof: usize) -> DofEntity {
        if dof < self.n_face_dofs {
            DofEntity::Face(dof / FACE_DOFS)
        } else {
            DofEntity::Interior((dof - self.n_face_dofs) / INTERIOR_DOFS)
        }
    }

    pub fn face_tag(&self, dof: usize) -> Option<FaceTag> {
        match self.entity(dof) {
            DofEntity::Face(f) => self.topo.face_tags[f],
            _ => None,
        }
    }

    /// DOFs on free-boundary faces, fixed by traction data.
    pub fn is_essential(&self, dof: usize) -> bool {
        self.face_tag(dof) == Some(FaceTag::Free)
    }

    pub fn is_interface(&self, dof: usize) -> bool {
        self.face_tag(dof) == Some(FaceTag::Interface)
    }

    /// Global face index of a sorted vertex triple.
    pub fn face_index(&self, sorted: &[usize; 3]) -> Option<usize> {
        self.topo.faces.binary_search(sorted).ok()
    }
}

/// Discontinuous vector P1 on tets: `12 t + 3 v + c`.
#[derive(Debug, Clone, Copy)]
pub struct DiscontinuousP1Map {
    pub n_tets: usize,
}

impl DiscontinuousP1Map {
    pub fn new(mesh: &TetMesh) -> Self {
        Self {
            n_tets: mesh.tets.len(),
        }
    }

    pub fn n_dofs(&self) -> usize {
        12 * self.n_tets
    }

    pub fn dof(&self, t: usize, local: usize) -> usize {
        12 * t + local
    }
}

/// Continuous vector P1 on tets: `3 vertex + c`.
#[derive(Debug, Clone, Copy)]
pub struct ContinuousP1Map {
    pub n_vertices: usize,
}

impl ContinuousP1Map {
    pub fn new(mesh: &TetMesh) -> Self {
        Self {
            n_vertices: mesh.vertices.len(),
        }
    }

    pub fn n_dofs(&self) -> usize {
        3 * self.n_vertices
    }
}

/// Free plate DOFs: membrane pairs on interior vertices, then Morley values
/// on interior vertices, then Morley normal derivatives on interior edges.
/// Clamped DOFs are not numbered.
#[derive(Debug, Clone)]
pub struct PlateDofMap {
    pub topo: TriTopology,
    /// First of the two membrane DOFs of each vertex.
    pub membrane: Vec<Option<usize>>,
    pub morley_vertex: Vec<Option<usize>>,
    pub morley_edge: Vec<Option<usize>>,
    pub n_membrane: usize,
    pub n_dofs: usize,
    /// Local layout `2 v + c`.
    pub tri_membrane: Vec<[Option<usize>; 6]>,
    /// Local layout: three vertices then edges opposite vertices 0, 1, 2.
    pub tri_morley: Vec<[Option<usize>; 6]>,
}

impl PlateDofMap {
    pub fn new(mesh: &TriMesh) -> Self {
        let topo = mesh.topology();
        let mut next = 0;
        let membrane: Vec<Option<usize>> = topo
            .vertex_on_boundary
            .iter()
            .map(|&b| {
                (!b).then(|| {
                    next += 2;
                    next - 2
                })
            })
            .collect();
        let n_membrane = next;
        let morley_vertex: Vec<Option<usize>> = topo
            .vertex_on_boundary
            .iter()
            .map(|&b| {
                (!b).then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect();
        let morley_edge: Vec<Option<usize>> = topo
            .edge_on_boundary
            .iter()
            .map(|&b| {
                (!b).then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect();
        let mut tri_membrane = Vec::with_capacity(mesh.triangles.len());
        let mut tri_morley = Vec::with_capacity(mesh.triangles.len());
        for (t, tri) in mesh.triangles.iter().enumerate() {
            let mut m = [None; 6];
            let mut w = [None; 6];
            for k in 0..3 {
                m[2 * k] = membrane[tri[k]];
                m[2 * k + 1] = membrane[tri[k]].map(|d| d + 1);
                w[k] = morley_vertex[tri[k]];
                w[3 + k] = morley_edge[topo.tri_edges[t][k]];
            }
            tri_membrane.push(m);
            tri_morley.push(w);
        }
        Self {
            topo,
            membrane,
            morley_vertex,
            morley_edge,
            n_membrane,
            n_dofs: next,
            tri_membrane,
            tri_morley,
        }
    }

    pub fn entity(&self, dof: usize) -> Option<DofEntity> {
        if let Some(v) = self.membrane.iter().position(|d| matches!(d, Some(b) if *b == dof || *b + 1 == dof)) {
            return Some(DofEntity::Vertex(v));
        }
        if let Some(v) = self.morley_vertex.iter().position(|d| *d == Some(dof)) {
            return Some(DofEntity::Vertex(v));
        }
        self.morley_edge
            .iter()
            .position(|d| *d == Some(dof))
            .map(DofEntity::Edge)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_body_mesh, build_plate_mesh, Diagonal};

    #[test]
    fn stress_counts() {
        let m = build_body_mesh(1).unwrap();
        let d = StressDofMap::new(&m);
        // 6 tets, 12 boundary faces, 6 interior faces
        assert_eq!(d.topo.faces.len(), 18);
        assert_eq!(d.n_dofs, 9 * 18 + 36);
        let essential = (0..d.n_dofs).filter(|&i| d.is_essential(i)).count();
        let iface = (0..d.n_dofs).filter(|&i| d.is_interface(i)).count();
        assert_eq!(essential, 9 * 10);
        assert_eq!(iface, 9 * 2);
    }

    #[test]
    fn every_stress_dof_is_referenced() {
        let m = build_body_mesh(2).unwrap();
        let d = StressDofMap::new(&m);
        let mut seen = vec![0; d.n_dofs];
        for t in &d.tet_dofs {
            for &g in t {
                seen[g] += 1;
            }
        }
        for (g, &c) in seen.iter().enumerate() {
            let expect = match d.entity(g) {
                DofEntity::Face(f) => 1 + d.topo.face_tets[f].1.is_some() as usize,
                _ => 1,
            };
            assert_eq!(c, expect);
        }
    }

    #[test]
    fn displacement_counts() {
        let m = build_body_mesh(2).unwrap();
        assert_eq!(DiscontinuousP1Map::new(&m).n_dofs(), 12 * 6 * 8);
        assert_eq!(ContinuousP1Map::new(&build_body_mesh(1).unwrap()).n_dofs(), 24);
    }

    #[test]
    fn plate_counts() {
        let p = build_plate_mesh(4, Diagonal::SameAsBody).unwrap();
        let d = PlateDofMap::new(&p);
        // 9 interior vertices, interior edges = 56 - 16
        assert_eq!(d.n_membrane, 18);
        assert_eq!(d.n_dofs, 18 + 9 + 40);
        assert_eq!(d.entity(18), Some(DofEntity::Vertex(6)));
    }
}
