//! Displacement formulation: continuous P1 body, P1 membrane and Morley
//! bending, glued by identifying body vertex DOFs on `Γ` with the plate
//! vertex DOFs at the same points.

use std::collections::HashMap;

use nalgebra::{Point3, SMatrix, Vector3};

use super::{assemble_plate_load, assemble_plate_stiffness, Forcing, PlateSpace, Region};
use crate::elements::P1Tet;
use crate::error::{Error, Result};
use crate::materials::{c0_apply, MaterialParams, SymTensor3};
use crate::mesh::{FaceTag, TetMesh, GEOM_TOL};
use crate::quadrature::{tet_rule, triangle_rule};
use crate::sparse::{SparseMatrix, Triplets};

#[derive(Debug, Clone)]
pub struct DisplacementSystem {
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
    /// System index of each body vertex component.
    pub body_dofs: Vec<[usize; 3]>,
    /// Offset of the plate block.
    pub plate_offset: usize,
    pub n_plate: usize,
    pub shared_vertices: usize,
}

impl DisplacementSystem {
    pub fn n_dofs(&self) -> usize {
        self.matrix.nrows
    }

    /// Body vertex displacements and plate coefficients from a solution.
    pub fn split(&self, x: &[f64]) -> (Vec<Vector3<f64>>, Vec<f64>) {
        let body = self
            .body_dofs
            .iter()
            .map(|d| Vector3::new(x[d[0]], x[d[1]], x[d[2]]))
            .collect();
        (body, x[self.plate_offset..].to_vec())
    }
}

fn key(x: f64, y: f64) -> (i64, i64) {
    ((x * 1e9).round() as i64, (y * 1e9).round() as i64)
}

fn p1_strains(tet: &P1Tet) -> [SymTensor3; 12] {
    std::array::from_fn(|i| {
        let g = tet.grads[i / 3];
        let c = i % 3;
        let mut m = nalgebra::Matrix3::zeros();
        m.set_column(c, &g);
        SymTensor3::from_matrix(&m.transpose())
    })
}

pub fn assemble_displacement_system<F: Forcing + ?Sized>(
    body: &TetMesh,
    plate: &PlateSpace,
    params: &MaterialParams,
    forcing: &F,
    volume_degree: usize,
    interface_degree: usize,
) -> Result<DisplacementSystem> {
    let plate_vertex: HashMap<(i64, i64), usize> = plate
        .mesh
        .vertices
        .iter()
        .enumerate()
        .map(|(i, p)| (key(p.x, p.y), i))
        .collect();
    let mut body_dofs = Vec::with_capacity(body.vertices.len());
    let mut next = 0;
    let mut shared = Vec::new();
    for (v, p) in body.vertices.iter().enumerate() {
        if p.z.abs() <= GEOM_TOL {
            let pv = *plate_vertex.get(&key(p.x, p.y)).ok_or_else(|| {
                Error::NonMatching(format!("body vertex ({}, {}) has no plate vertex", p.x, p.y))
            })?;
            shared.push((v, pv));
            body_dofs.push([usize::MAX; 3]);
        } else {
            body_dofs.push([next, next + 1, next + 2]);
            next += 3;
        }
    }
    let plate_offset = next;
    let tri_key = |pts: [(i64, i64); 3]| {
        let mut k = pts;
        k.sort_unstable();
        k
    };
    let body_faces: std::collections::HashSet<_> = body
        .boundary_faces
        .iter()
        .filter(|f| f.tag == FaceTag::Interface)
        .map(|f| tri_key(f.vertices.map(|v| key(body.vertices[v].x, body.vertices[v].y))))
        .collect();
    let plate_gamma = &plate.mesh.interface_region_triangles;
    if plate_gamma.len() != body_faces.len()
        || plate_gamma.iter().any(|&t| {
            !body_faces.contains(&tri_key(plate.mesh.triangles[t].map(|v| {
                let p = plate.mesh.vertices[v];
                key(p.x, p.y)
            })))
        })
    {
        return Err(Error::NonMatching("plate triangles in Γ differ from the body interface faces".into()));
    }
    for &(v, pv) in &shared {
        let m = plate.dofs.membrane[pv];
        let w = plate.dofs.morley_vertex[pv];
        match (m, w) {
            (Some(m), Some(w)) => {
                body_dofs[v] = [plate_offset + m, plate_offset + m + 1, plate_offset + w]
            }
            _ => return Err(Error::NonMatching("interface vertex lies on the clamped edge".into())),
        }
    }
    let n = plate_offset + plate.n_w();
    let mut t = Triplets::new(n, n);
    let mut rhs = vec![0.0; n];
    let rule = tet_rule(volume_degree)?;
    for tet_ids in &body.tets {
        let el = P1Tet::new(tet_ids.map(|v| body.vertices[v])).ok_or_else(|| Error::Element {
            element: 0,
            reason: "degenerate tetrahedron".into(),
        })?;
        let eps = p1_strains(&el);
        let mut k = SMatrix::<f64, 12, 12>::zeros();
        for i in 0..12 {
            let s = c0_apply(&eps[i], params);
            for j in 0..12 {
                k[(i, j)] = el.volume * s.ddot(&eps[j]);
            }
        }
        let dofs: [usize; 12] = std::array::from_fn(|i| body_dofs[tet_ids[i / 3]][i % 3]);
        for i in 0..12 {
            for j in 0..12 {
                t.push(dofs[i], dofs[j], k[(i, j)]);
            }
        }
        for (b, w) in rule.iter() {
            let f = forcing.body_load(&el.point(b));
            for i in 0..12 {
                rhs[dofs[i]] += 6.0 * el.volume * w * b[i / 3] * f[i % 3];
            }
        }
    }
    // Neumann data on the free boundary.
    let frule = triangle_rule(interface_degree)?;
    for bf in &body.boundary_faces {
        if bf.tag != FaceTag::Free {
            continue;
        }
        let tet = body.tets[bf.owner];
        let opp = tet.iter().find(|v| !bf.vertices.contains(v)).unwrap();
        let pts = bf.vertices.map(|v| body.vertices[v]);
        let (nrm, area) = crate::mesh::face_normal_area(&pts[0], &pts[1], &pts[2], &body.vertices[*opp]);
        for (mu, w) in frule.iter() {
            let x = Point3::from(pts[0].coords * mu[0] + pts[1].coords * mu[1] + pts[2].coords * mu[2]);
            let g = forcing.traction(&x, &nrm);
            for a in 0..3 {
                for c in 0..3 {
                    rhs[body_dofs[bf.vertices[a]][c]] += 2.0 * area * w * mu[a] * g[c];
                }
            }
        }
    }
    let (km, kb) = assemble_plate_stiffness(plate, params, Region::All);
    t.extend_from(&km, plate_offset, plate_offset, 1.0);
    t.extend_from(&kb, plate_offset, plate_offset, 1.0);
    let fw = assemble_plate_load(plate, forcing, interface_degree)?;
    for (i, v) in fw.iter().enumerate() {
        rhs[plate_offset + i] += v;
    }
    Ok(DisplacementSystem {
        matrix: t.into_csr(),
        rhs,
        body_dofs,
        plate_offset,
        n_plate: plate.n_w(),
        shared_vertices: shared.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::ZeroForcing;
    use crate::mesh::{build_body_mesh, build_plate_mesh, Diagonal};

    #[test]
    fn dof_count_audit() {
        let body = build_body_mesh(2).unwrap();
        let plate = PlateSpace::new(build_plate_mesh(4, Diagonal::SameAsBody).unwrap()).unwrap();
        let sys = assemble_displacement_system(&body, &plate, &MaterialParams::benchmark(), &ZeroForcing, 4, 6).unwrap();
        assert_eq!(sys.shared_vertices, 9);
        assert_eq!(sys.n_dofs(), 3 * 27 + plate.n_w() - 3 * 9);
        assert!(sys.rhs.iter().all(|v| *v == 0.0));
        assert!(sys.matrix.max_asymmetry() < 1e-9 * sys.matrix.max_abs());
        let ev = sys.matrix.to_dense().symmetric_eigenvalues();
        assert!(ev.min() > 0.0);
    }

    #[test]
    fn non_matching_is_rejected() {
        let body = build_body_mesh(2).unwrap();
        let plate = PlateSpace::new(crate::mesh::TriMesh::structured_unchecked(2, Diagonal::SameAsBody)).unwrap();
        let r = assemble_displacement_system(&body, &plate, &MaterialParams::benchmark(), &ZeroForcing, 4, 6);
        assert!(matches!(r, Err(Error::NonMatching(_))));
        let flipped = PlateSpace::new(build_plate_mesh(4, Diagonal::Flipped).unwrap()).unwrap();
        let r = assemble_displacement_system(&body, &flipped, &MaterialParams::benchmark(), &ZeroForcing, 4, 6);
        assert!(matches!(r, Err(Error::NonMatching(_))));
    }
}
