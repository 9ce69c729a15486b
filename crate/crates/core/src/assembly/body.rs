//! Body terms: compliance mass, divergence, loads and traction data.

use nalgebra::{Point3, SMatrix, SVector, Vector3};

use super::{BodySpace, Forcing};
use crate::elements::HUMA_DIM;
use crate::error::Result;
use crate::materials::{c0_inv_apply, MaterialParams, SymTensor3};
use crate::mesh::FaceTag;
use crate::quadrature::{tet_rule, triangle_rule};
use crate::sparse::{SparseMatrix, Triplets};

/// `A[i][j] = ∫ C0⁻¹ φ_i : φ_j` over all stress DOFs.
pub fn assemble_compliance(body: &BodySpace, params: &MaterialParams, degree: usize) -> Result<SparseMatrix> {
    let rule = tet_rule(degree)?;
    let n = body.n_sigma();
    let mut t = Triplets::with_capacity(n, n, body.elements.len() * HUMA_DIM * HUMA_DIM);
    let mut local = vec![0.0; HUMA_DIM * HUMA_DIM];
    for (k, el) in body.elements.iter().enumerate() {
        local.iter_mut().for_each(|v| *v = 0.0);
        let scale = 6.0 * el.geom.volume;
        for (b, w) in rule.iter() {
            let vals = el.values(b);
            let comp: Vec<_> = vals.iter().map(|v| c0_inv_apply(v, params)).collect();
            let wq = w * scale;
            for i in 0..HUMA_DIM {
                for j in i..HUMA_DIM {
                    local[i * HUMA_DIM + j] += wq * comp[i].ddot(&vals[j]);
                }
            }
        }
        let dofs = &body.stress.tet_dofs[k];
        for i in 0..HUMA_DIM {
            for j in i..HUMA_DIM {
                let v = local[i * HUMA_DIM + j];
                t.push(dofs[i], dofs[j], v);
                if i != j {
                    t.push(dofs[j], dofs[i], v);
                }
            }
        }
    }
    Ok(t.into_csr())
}

/// `B[k][i] = ∫ div φ_i · ψ_k`, with `ψ_k` the discontinuous P1 basis.
pub fn assemble_divergence(body: &BodySpace) -> Result<SparseMatrix> {
    let rule = tet_rule(2)?;
    let mut t = Triplets::with_capacity(body.n_v(), body.n_sigma(), body.elements.len() * 12 * HUMA_DIM);
    for (k, el) in body.elements.iter().enumerate() {
        let mut local = [[0.0; HUMA_DIM]; 12];
        let scale = 6.0 * el.geom.volume;
        for (b, w) in rule.iter() {
            let divs = el.divergences(b);
            for v in 0..4 {
                for c in 0..3 {
                    let psi = w * scale * b[v];
                    for (j, d) in divs.iter().enumerate() {
                        local[3 * v + c][j] += psi * d[c];
                    }
                }
            }
        }
        let dofs = &body.stress.tet_dofs[k];
        for (r, row) in local.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                t.push(body.disp.dof(k, r), dofs[j], v);
            }
        }
    }
    Ok(t.into_csr())
}

fn local_mass(volume: f64) -> SMatrix<f64, 12, 12> {
    let mut m = SMatrix::<f64, 12, 12>::zeros();
    for a in 0..4 {
        for b in 0..4 {
            let v = volume * if a == b { 2.0 } else { 1.0 } / 20.0;
            for c in 0..3 {
                m[(3 * a + c, 3 * b + c)] = v;
            }
        }
    }
    m
}

/// Block-diagonal mass matrix of the displacement space.
pub fn assemble_displacement_mass(body: &BodySpace) -> SparseMatrix {
    let mut t = Triplets::with_capacity(body.n_v(), body.n_v(), body.elements.len() * 48);
    for (k, el) in body.elements.iter().enumerate() {
        let m = local_mass(el.geom.volume);
        for i in 0..12 {
            for j in 0..12 {
                t.push(body.disp.dof(k, i), body.disp.dof(k, j), m[(i, j)]);
            }
        }
    }
    t.into_csr()
}

/// `f_V[k] = −∫ f^α · ψ_k`.
pub fn assemble_body_load<F: Forcing + ?Sized>(body: &BodySpace, forcing: &F, degree: usize) -> Result<Vec<f64>> {
    let rule = tet_rule(degree)?;
    let mut out = vec![0.0; body.n_v()];
    for (k, el) in body.elements.iter().enumerate() {
        let scale = 6.0 * el.geom.volume;
        for (b, w) in rule.iter() {
            let f = forcing.body_load(&el.geom.point(b));
            for v in 0..4 {
                for c in 0..3 {
                    out[body.disp.dof(k, 3 * v + c)] -= w * scale * b[v] * f[c];
                }
            }
        }
    }
    Ok(out)
}

/// Elementwise L² projection onto the discontinuous P1 space.
pub fn project_to_vh<F: Fn(&Point3<f64>) -> Vector3<f64>>(body: &BodySpace, f: F, degree: usize) -> Result<Vec<f64>> {
    let rule = tet_rule(degree)?;
    let mut out = vec![0.0; body.n_v()];
    for (k, el) in body.elements.iter().enumerate() {
        let scale = 6.0 * el.geom.volume;
        let mut rhs = SVector::<f64, 12>::zeros();
        for (b, w) in rule.iter() {
            let v = f(&el.geom.point(b));
            for a in 0..4 {
                for c in 0..3 {
                    rhs[3 * a + c] += w * scale * b[a] * v[c];
                }
            }
        }
        let sol = local_mass(el.geom.volume)
            .cholesky()
            .expect("P1 mass is SPD")
            .solve(&rhs);
        for i in 0..12 {
            out[body.disp.dof(k, i)] = sol[i];
        }
    }
    Ok(out)
}

/// Global stress coefficients of the canonical interpolant of `f`. Face
/// moments are shared, so either neighbour may write them.
pub fn interpolate_stress<F: Fn(&Point3<f64>) -> SymTensor3>(body: &BodySpace, f: F, degree: usize) -> Vec<f64> {
    let mut out = vec![0.0; body.n_sigma()];
    for (k, el) in body.elements.iter().enumerate() {
        let d = el.dofs_of(|b| f(&el.geom.point(b)), degree);
        for (i, &g) in body.stress.tet_dofs[k].iter().enumerate() {
            out[g] = d[i];
        }
    }
    out
}

/// Essential stress values on free-boundary faces: the nine scaled moments
/// `(1/|F|) ∫_F g_c μ_a` of the traction data, `g = forcing.traction`.
pub fn impose_traction_bc<F: Forcing + ?Sized>(
    body: &BodySpace,
    forcing: &F,
    degree: usize,
) -> Result<Vec<(usize, f64)>> {
    let rule = triangle_rule(degree)?;
    let topo = &body.stress.topo;
    let mut out = Vec::new();
    for (f, tag) in topo.face_tags.iter().enumerate() {
        if *tag != Some(FaceTag::Free) {
            continue;
        }
        let owner = topo.face_tets[f].0;
        let el = &body.elements[owner];
        let tet = body.mesh.tets[owner];
        let verts = topo.faces[f];
        let local_face = (0..4).find(|&i| !verts.contains(&tet[i])).unwrap();
        let n: Vector3<f64> = el.outward_normals[local_face];
        let pts = verts.map(|v| body.mesh.vertices[v]);
        let mut m = [0.0; 9];
        for (mu, w) in rule.iter() {
            let x = Point3::from(pts[0].coords * mu[0] + pts[1].coords * mu[1] + pts[2].coords * mu[2]);
            let g = forcing.traction(&x, &n);
            for a in 0..3 {
                for c in 0..3 {
                    m[3 * a + c] += 2.0 * w * g[c] * mu[a];
                }
            }
        }
        for (k, v) in m.iter().enumerate() {
            out.push((9 * f + k, *v));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::ZeroForcing;
    use crate::mesh::build_body_mesh;

    #[test]
    fn compliance_scales_with_modulus() {
        let body = BodySpace::new(build_body_mesh(1).unwrap()).unwrap();
        let p = MaterialParams::benchmark();
        let a = assemble_compliance(&body, &p, 4).unwrap();
        let p10 = MaterialParams { e_alpha: 10.0 * p.e_alpha, ..p };
        let a10 = assemble_compliance(&body, &p10, 4).unwrap();
        for (x, y) in a.values.iter().zip(&a10.values) {
            assert!((x - 10.0 * y).abs() < 1e-12 * x.abs().max(1e-3));
        }
        assert!(a.max_asymmetry() < 1e-12 * a.max_abs());
    }

    #[test]
    fn constant_stress_has_no_divergence() {
        let body = BodySpace::new(build_body_mesh(2).unwrap()).unwrap();
        let b = assemble_divergence(&body).unwrap();
        assert_eq!(b.nrows, 72 * 8);
        let mut x = vec![0.0; body.n_sigma()];
        for (k, el) in body.elements.iter().enumerate() {
            let d = el.dofs_of(|_| crate::materials::SymTensor3([1.0, 2.0, -1.0, 0.3, 0.2, -0.4]), 1);
            for (i, &g) in body.stress.tet_dofs[k].iter().enumerate() {
                x[g] = d[i];
            }
        }
        let r = b.mul_vec(&x);
        assert!(r.iter().all(|v| v.abs() < 1e-11));
    }

    #[test]
    fn zero_traction_gives_zero_constraints() {
        let body = BodySpace::new(build_body_mesh(1).unwrap()).unwrap();
        let c = impose_traction_bc(&body, &ZeroForcing, 6).unwrap();
        assert_eq!(c.len(), 90);
        assert!(c.iter().all(|(_, v)| *v == 0.0));
    }

    #[test]
    fn projection_reproduces_affine_fields() {
        let body = BodySpace::new(build_body_mesh(1).unwrap()).unwrap();
        let f = |x: &Point3<f64>| Vector3::new(1.0 + x.x, 2.0 * x.y - x.z, 0.5);
        let p = project_to_vh(&body, f, 2).unwrap();
        for (k, el) in body.elements.iter().enumerate() {
            for v in 0..4 {
                let e = f(&el.geom.points[v]);
                for c in 0..3 {
                    assert!((p[body.disp.dof(k, 3 * v + c)] - e[c]).abs() < 1e-12);
                }
            }
        }
    }
}
