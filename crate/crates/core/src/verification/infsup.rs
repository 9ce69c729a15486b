//! Discrete inf-sup constant of the body stress/displacement pair.

use nalgebra::{DMatrix, DVector};

use crate::assembly::{assemble_displacement_mass, assemble_divergence, BodySpace};
use crate::error::{Error, Result};
use crate::quadrature::tet_rule;
use crate::solvers::{BlockLabels, SymmetricFactor, RESIDUAL_TOLERANCE};
use crate::sparse::{SparseMatrix, Triplets};

/// Gram matrix of `(τ, τ') + (div_h τ, div_h τ')` over all stress DOFs.
pub fn stress_gram(body: &BodySpace) -> Result<SparseMatrix> {
    let rule = tet_rule(4)?;
    let n = body.n_sigma();
    let mut t = Triplets::with_capacity(n, n, body.elements.len() * 42 * 42);
    for (k, el) in body.elements.iter().enumerate() {
        let mut local = vec![0.0; 42 * 42];
        let scale = 6.0 * el.geom.volume;
        for (b, w) in rule.iter() {
            let vals = el.values(b);
            let divs = el.divergences(b);
            for i in 0..42 {
                for j in 0..42 {
                    local[42 * i + j] += w * scale * (vals[i].ddot(&vals[j]) + divs[i].dot(&divs[j]));
                }
            }
        }
        let dofs = &body.stress.tet_dofs[k];
        for i in 0..42 {
            for j in 0..42 {
                t.push(dofs[i], dofs[j], local[42 * i + j]);
            }
        }
    }
    Ok(t.into_csr())
}

/// Gram matrix and divergence block restricted to stresses with zero
/// traction moments on the free boundary.
fn restricted_blocks(body: &BodySpace) -> Result<(SparseMatrix, SparseMatrix)> {
    let n = body.n_sigma();
    let mut map = vec![None; n];
    let mut nf = 0;
    for (d, m) in map.iter_mut().enumerate() {
        if !body.stress.is_essential(d) {
            *m = Some(nf);
            nf += 1;
        }
    }
    let nv = body.n_v();
    let ident: Vec<Option<usize>> = (0..nv).map(Some).collect();
    let x = stress_gram(body)?.select(&map, nf, &map, nf);
    let b = assemble_divergence(body)?.select(&ident, nv, &map, nf);
    Ok((x, b))
}

/// `inf_v sup_τ (div τ, v) / (‖τ‖_div ‖v‖_0)` over stresses with zero
/// traction moments on the free boundary; dense, for small meshes.
pub fn discrete_infsup_constant(body: &BodySpace) -> Result<f64> {
    let (x, b) = restricted_blocks(body)?;
    let nv = body.n_v();
    let factor = SymmetricFactor::spd(&x, BlockLabels(vec![(usize::MAX, "stress gram")]), RESIDUAL_TOLERANCE)?;
    let bt = b.transpose();
    let mut schur = DMatrix::zeros(nv, nv);
    let mut e = vec![0.0; nv];
    for j in 0..nv {
        e.iter_mut().for_each(|v| *v = 0.0);
        e[j] = 1.0;
        let (y, _) = factor.solve(&bt.mul_vec(&e))?;
        let col = b.mul_vec(&y);
        for i in 0..nv {
            schur[(i, j)] = col[i];
        }
    }
    let schur = 0.5 * (&schur + schur.transpose());
    let mass = assemble_displacement_mass(body).to_dense();
    let l = mass.cholesky().ok_or_else(|| Error::NotSpd("displacement mass".into()))?;
    let linv = l.l().try_inverse().ok_or_else(|| Error::NotSpd("displacement mass factor".into()))?;
    let c = &linv * schur * linv.transpose();
    let ev = c.symmetric_eigenvalues();
    Ok(ev.min().max(0.0).sqrt())
}

/// Same constant by block inverse subspace iteration on the pencil
/// `(B X⁻¹ Bᵀ, M)`, with `B X⁻¹ Bᵀ` applied through the sparse saddle-point
/// factorization of `[[X, Bᵀ], [B, 0]]`. Stops when the smallest Ritz value
/// changes by less than `tol` relative.
pub fn discrete_infsup_constant_sparse(body: &BodySpace, block: usize, tol: f64, max_it: usize) -> Result<f64> {
    let (x, b) = restricted_blocks(body)?;
    let (nf, nv) = (x.nrows, b.nrows);
    let mut t = Triplets::with_capacity(nf + nv, nf + nv, x.nnz() + 2 * b.nnz());
    t.extend_from(&x, 0, 0, 1.0);
    t.extend_from(&b, nf, 0, 1.0);
    t.extend_from(&b.transpose(), 0, nf, 1.0);
    let saddle = t.into_csr();
    let signs: Vec<i8> = (0..nf + nv).map(|i| if i < nf { 1 } else { -1 }).collect();
    let labels = BlockLabels(vec![(nf, "stress"), (usize::MAX, "displacement")]);
    let factor = SymmetricFactor::indefinite(&saddle, &signs, labels, RESIDUAL_TOLERANCE)?;
    let mass = assemble_displacement_mass(body);
    // `S⁻¹ y = −p` where `[z; p]` solves the saddle system with data `[0; y]`.
    let schur_inverse = |y: &[f64]| -> Result<Vec<f64>> {
        let mut rhs = vec![0.0; nf + nv];
        rhs[nf..].copy_from_slice(y);
        let (sol, _) = factor.solve(&rhs)?;
        Ok(sol[nf..].iter().map(|v| -v).collect())
    };
    let k = block.clamp(1, nv);
    let mut rng = 0x9e37_79b9_7f4a_7c15u64;
    let mut p = DMatrix::from_fn(nv, k, |_, _| {
        // xorshift; any full-rank start block will do
        rng ^= rng << 13;
        rng ^= rng >> 7;
        rng ^= rng << 17;
        (rng >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    });
    let mut last = f64::INFINITY;
    for _ in 0..max_it {
        let mut mp = DMatrix::zeros(nv, k);
        let mut y = DMatrix::zeros(nv, k);
        for j in 0..k {
            let col = mass.mul_vec(p.column(j).as_slice());
            let sol = schur_inverse(&col)?;
            mp.set_column(j, &DVector::from_vec(col));
            y.set_column(j, &DVector::from_vec(sol));
        }
        // With `Y = S⁻¹ M P`: `Yᵀ S Y = Yᵀ M P`.
        let a_r = y.transpose() * &mp;
        let a_r = 0.5 * (&a_r + a_r.transpose());
        let mut m_y = DMatrix::zeros(nv, k);
        for j in 0..k {
            m_y.set_column(j, &DVector::from_vec(mass.mul_vec(y.column(j).as_slice())));
        }
        let m_r = y.transpose() * &m_y;
        let m_r = 0.5 * (&m_r + m_r.transpose());
        let l = m_r.cholesky().ok_or_else(|| Error::NotSpd("Ritz mass".into()))?;
        let linv = l.l().try_inverse().ok_or_else(|| Error::NotSpd("Ritz mass factor".into()))?;
        let c = &linv * a_r * linv.transpose();
        let eig = c.symmetric_eigen();
        let order = {
            let mut o: Vec<usize> = (0..k).collect();
            o.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
            o
        };
        let vecs = linv.transpose() * &eig.eigenvectors;
        let q = &y * vecs;
        p = DMatrix::zeros(nv, k);
        for (dst, &src) in order.iter().enumerate() {
            let col = q.column(src);
            p.set_column(dst, &(col / col.norm()));
        }
        let mu = eig.eigenvalues[order[0]].max(0.0);
        if (mu - last).abs() <= tol * mu {
            return Ok(mu.sqrt());
        }
        last = mu;
    }
    Err(Error::NoConvergence { iterations: max_it, last, history: vec![] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_body_mesh;

    #[test]
    fn sparse_and_dense_routes_agree() {
        let body = BodySpace::new(build_body_mesh(1).unwrap()).unwrap();
        let dense = discrete_infsup_constant(&body).unwrap();
        let sparse = discrete_infsup_constant_sparse(&body, 8, 1e-12, 500).unwrap();
        assert!((dense - sparse).abs() <= 1e-6 * dense, "{dense} {sparse}");
        assert!(dense > 0.1);
    }
}
