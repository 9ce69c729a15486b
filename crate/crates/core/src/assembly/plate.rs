//! Plate stiffness (membrane P1 and Morley bending) and plate loads.

use super::{Forcing, PlateSpace};
use crate::error::Result;
use crate::materials::{c1_apply, c2_apply, MaterialParams, SymTensor2};
use crate::quadrature::triangle_rule;
use crate::sparse::{SparseMatrix, Triplets};

/// Which triangles contribute to the plate energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    All,
    /// Only triangles outside `closure(Γ)`.
    OmitInterface,
}

/// Membrane and bending stiffness over the free plate DOFs.
pub fn assemble_plate_stiffness(
    plate: &PlateSpace,
    params: &MaterialParams,
    region: Region,
) -> (SparseMatrix, SparseMatrix) {
    let n = plate.n_w();
    let mut km = Triplets::new(n, n);
    let mut kb = Triplets::new(n, n);
    let in_gamma = {
        let mut v = vec![false; plate.mesh.triangles.len()];
        for &t in &plate.mesh.interface_region_triangles {
            v[t] = true;
        }
        v
    };
    for t in 0..plate.mesh.triangles.len() {
        if region == Region::OmitInterface && in_gamma[t] {
            continue;
        }
        let p1 = &plate.p1[t];
        let strains: [SymTensor2; 6] = std::array::from_fn(|i| {
            let g = p1.grads[i / 2];
            if i % 2 == 0 {
                SymTensor2([g.x, 0.0, 0.5 * g.y])
            } else {
                SymTensor2([0.0, g.y, 0.5 * g.x])
            }
        });
        let dm = &plate.dofs.tri_membrane[t];
        for i in 0..6 {
            let Some(gi) = dm[i] else { continue };
            let si = c1_apply(&strains[i], params);
            for j in 0..6 {
                if let Some(gj) = dm[j] {
                    km.push(gi, gj, p1.area * si.ddot(&strains[j]));
                }
            }
        }
        let hs = plate.morley[t].hessians().map(|h| SymTensor2::from_matrix(&h));
        let dw = &plate.dofs.tri_morley[t];
        for i in 0..6 {
            let Some(gi) = dw[i] else { continue };
            let mi = c2_apply(&hs[i], params);
            for j in 0..6 {
                if let Some(gj) = dw[j] {
                    kb.push(gi, gj, p1.area * mi.ddot(&hs[j]));
                }
            }
        }
    }
    (km.into_csr(), kb.into_csr())
}

/// `f_W[w] = ∫_β f_smooth · χ_w + ∫_Γ f_jump · χ_w`; the transverse part
/// uses the Morley basis itself.
pub fn assemble_plate_load<F: Forcing + ?Sized>(plate: &PlateSpace, forcing: &F, degree: usize) -> Result<Vec<f64>> {
    let rule = triangle_rule(degree)?;
    let mut out = vec![0.0; plate.n_w()];
    let mut in_gamma = vec![false; plate.mesh.triangles.len()];
    for &t in &plate.mesh.interface_region_triangles {
        in_gamma[t] = true;
    }
    for t in 0..plate.mesh.triangles.len() {
        let p1 = &plate.p1[t];
        let morley = &plate.morley[t];
        let dm = &plate.dofs.tri_membrane[t];
        let dw = &plate.dofs.tri_morley[t];
        for (b, w) in rule.iter() {
            let x = p1.point(b);
            let mut f = forcing.plate_load_smooth(&x);
            if in_gamma[t] {
                f += forcing.plate_load_jump(&x);
            }
            let wq = 2.0 * p1.area * w;
            for k in 0..3 {
                for c in 0..2 {
                    if let Some(g) = dm[2 * k + c] {
                        out[g] += wq * f[c] * b[k];
                    }
                }
            }
            let vals = morley.values(&x);
            for j in 0..6 {
                if let Some(g) = dw[j] {
                    out[g] += wq * f[2] * vals[j];
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_plate_mesh, Diagonal};
    use nalgebra::Vector2;

    #[test]
    fn affine_fields_have_no_bending_energy() {
        let plate = PlateSpace::new(build_plate_mesh(4, Diagonal::SameAsBody).unwrap()).unwrap();
        let p = MaterialParams::benchmark();
        for t in 0..plate.mesh.triangles.len() {
            let el = &plate.morley[t];
            let c = el.interpolate(|x| 1.0 + 2.0 * x.x - x.y, |_| Vector2::new(2.0, -1.0));
            let h = el.evaluate_hessian(&c);
            let m = c2_apply(&SymTensor2::from_matrix(&h), &p);
            assert!(m.0.iter().all(|v| v.abs() < 1e-10));
        }
    }

    #[test]
    fn stiffness_is_symmetric_positive_definite() {
        let plate = PlateSpace::new(build_plate_mesh(4, Diagonal::Flipped).unwrap()).unwrap();
        let (km, kb) = assemble_plate_stiffness(&plate, &MaterialParams::benchmark(), Region::All);
        let k = km.add(&kb).to_dense();
        assert!((k.clone() - k.transpose()).amax() < 1e-9 * k.amax());
        let ev = k.symmetric_eigenvalues();
        assert!(ev.min() > 0.0);
    }

    #[test]
    fn omit_interface_drops_gamma_triangles() {
        let plate = PlateSpace::new(build_plate_mesh(4, Diagonal::SameAsBody).unwrap()).unwrap();
        let p = MaterialParams::benchmark();
        let (a, _) = assemble_plate_stiffness(&plate, &p, Region::All);
        let (o, _) = assemble_plate_stiffness(&plate, &p, Region::OmitInterface);
        // The centre vertex only touches triangles inside Γ.
        let centre = plate.dofs.membrane[12].unwrap();
        assert!(a.get(centre, centre) > 0.0);
        assert_eq!(o.get(centre, centre), 0.0);
    }
}
