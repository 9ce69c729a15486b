//! Interface coupling `G[w][s] = ∫_Γ (φ_s n) · Π χ_w` over the overlay.

use super::{BodySpace, InterfaceOverlay, PlateSpace};
use crate::error::Result;
use crate::overlay::map_to_parents;
use crate::sparse::{SparseMatrix, Triplets};

/// Traction components `φ n` for `n = (0, 0, −1)`: `−(φ_xz, φ_yz, φ_zz)`.
#[inline]
pub(crate) fn bottom_traction(s: &crate::materials::SymTensor3) -> [f64; 3] {
    [-s.0[4], -s.0[3], -s.0[2]]
}

/// Rows: free plate DOFs. Columns: all stress DOFs. Morley edge DOFs lower
/// to zero, so their rows are empty.
pub fn assemble_interface_coupling(
    body: &BodySpace,
    plate: &PlateSpace,
    overlay: &InterfaceOverlay,
) -> Result<SparseMatrix> {
    let mut t = Triplets::new(plate.n_w(), body.n_sigma());
    for cell in &overlay.cells {
        let face = &overlay.faces[cell.face];
        let el = &body.elements[face.owner];
        let sdofs = &body.stress.tet_dofs[face.owner];
        let dm = &plate.dofs.tri_membrane[cell.triangle];
        let dw = &plate.dofs.tri_morley[cell.triangle];
        let mut local = [[0.0; 42]; 9];
        for (p, &w) in cell.quad_points.iter().zip(&cell.quad_weights) {
            let (bf, bt) = map_to_parents(cell, &overlay.faces, &plate.mesh, p)?;
            let b = overlay.tet_barycentric(cell.face, &bf);
            let vals = el.values(&b);
            for (j, v) in vals.iter().enumerate() {
                let tr = bottom_traction(v);
                for k in 0..3 {
                    for c in 0..3 {
                        local[3 * k + c][j] += w * tr[c] * bt[k];
                    }
                }
            }
        }
        for k in 0..3 {
            let rows = [dm[2 * k], dm[2 * k + 1], dw[k]];
            for c in 0..3 {
                if let Some(r) = rows[c] {
                    for (j, &v) in local[3 * k + c].iter().enumerate() {
                        t.push(r, sdofs[j], v);
                    }
                }
            }
        }
    }
    Ok(t.into_csr())
}
