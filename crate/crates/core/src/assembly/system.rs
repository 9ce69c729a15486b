//! Block system of the mixed method and its condensed monolithic form
//! `[[A, Bᵀ, −Gᵀ], [B, 0, 0], [−G, 0, −K]]` over `[σ_free; u^α; u^β]`.

use super::{
    assemble_body_load, assemble_compliance, assemble_divergence, assemble_interface_coupling,
    assemble_plate_load, assemble_plate_stiffness, impose_traction_bc, Discretization, Forcing, Region,
};
use crate::error::Result;
use crate::materials::MaterialParams;
use crate::sparse::{SparseMatrix, Triplets};

#[derive(Debug, Clone)]
pub struct BlockSystem {
    pub a: SparseMatrix,
    pub b: SparseMatrix,
    pub g: SparseMatrix,
    pub k_mem: SparseMatrix,
    pub k_bend: SparseMatrix,
    /// `−∫ f^α · ψ_k`.
    pub f_v: Vec<f64>,
    /// `∫ f^β · χ_w`.
    pub f_w: Vec<f64>,
    /// Essential stress values `(dof, value)`.
    pub constraints: Vec<(usize, f64)>,
}

/// Discrete fields: all stress coefficients (essential ones included), body
/// displacement and free plate coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionFields {
    pub sigma: Vec<f64>,
    pub u_alpha: Vec<f64>,
    pub w: Vec<f64>,
}

impl SolutionFields {
    pub fn zeros(n_sigma: usize, n_v: usize, n_w: usize) -> Self {
        Self {
            sigma: vec![0.0; n_sigma],
            u_alpha: vec![0.0; n_v],
            w: vec![0.0; n_w],
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let sum = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        Self {
            sigma: sum(&self.sigma, &other.sigma),
            u_alpha: sum(&self.u_alpha, &other.u_alpha),
            w: sum(&self.w, &other.w),
        }
    }
}

pub fn assemble_block_system<F: Forcing + ?Sized>(
    disc: &Discretization,
    params: &MaterialParams,
    forcing: &F,
) -> Result<BlockSystem> {
    let deg = disc.degrees;
    let (k_mem, k_bend) = assemble_plate_stiffness(&disc.plate, params, Region::All);
    Ok(BlockSystem {
        a: assemble_compliance(&disc.body, params, deg.volume)?,
        b: assemble_divergence(&disc.body)?,
        g: assemble_interface_coupling(&disc.body, &disc.plate, &disc.overlay)?,
        k_mem,
        k_bend,
        f_v: assemble_body_load(&disc.body, forcing, deg.volume)?,
        f_w: assemble_plate_load(&disc.plate, forcing, deg.interface)?,
        constraints: impose_traction_bc(&disc.body, forcing, deg.interface)?,
    })
}

/// Square system after eliminating the essential stress DOFs.
#[derive(Debug, Clone)]
pub struct MonolithicSystem {
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
    /// Expected pivot signs: `+1` on stress rows, `−1` on the others.
    pub signs: Vec<i8>,
    pub free: Vec<usize>,
    pub n_sigma: usize,
    pub n_v: usize,
    pub n_w: usize,
    /// Essential stress values, zero on free DOFs.
    pub sigma_essential: Vec<f64>,
}

impl BlockSystem {
    pub fn n_sigma(&self) -> usize {
        self.a.nrows
    }

    pub fn n_v(&self) -> usize {
        self.b.nrows
    }

    pub fn n_w(&self) -> usize {
        self.k_mem.nrows
    }

    pub fn stiffness(&self) -> SparseMatrix {
        self.k_mem.add(&self.k_bend)
    }

    /// Free stress DOFs, their renumbering, and the essential value vector.
    pub fn sigma_partition(&self) -> (Vec<usize>, Vec<Option<usize>>, Vec<f64>) {
        let n = self.n_sigma();
        let mut essential = vec![false; n];
        let mut values = vec![0.0; n];
        for &(d, v) in &self.constraints {
            essential[d] = true;
            values[d] = v;
        }
        let free: Vec<usize> = (0..n).filter(|&i| !essential[i]).collect();
        let mut map = vec![None; n];
        for (k, &i) in free.iter().enumerate() {
            map[i] = Some(k);
        }
        (free, map, values)
    }

    /// Condensed coupled system.
    pub fn monolithic(&self) -> MonolithicSystem {
        self.condensed(true)
    }

    /// Condensed body-only system `[[A, Bᵀ], [B, 0]]` (no interface coupling);
    /// the right-hand side carries `f_V` and the essential values.
    pub fn body_only(&self) -> MonolithicSystem {
        self.condensed(false)
    }

    fn condensed(&self, with_plate: bool) -> MonolithicSystem {
        let (free, map, sigma_essential) = self.sigma_partition();
        let nf = free.len();
        let nv = self.n_v();
        let nw = if with_plate { self.n_w() } else { 0 };
        let n = nf + nv + nw;
        let mut t = Triplets::with_capacity(n, n, self.a.nnz() + 2 * self.b.nnz() + 2 * self.g.nnz() + 2 * self.k_mem.nnz());
        for (i, j, v) in self.a.iter() {
            if let (Some(r), Some(c)) = (map[i], map[j]) {
                t.push(r, c, v);
            }
        }
        for (k, j, v) in self.b.iter() {
            if let Some(c) = map[j] {
                t.push(nf + k, c, v);
                t.push(c, nf + k, v);
            }
        }
        if with_plate {
            for (w, j, v) in self.g.iter() {
                if let Some(c) = map[j] {
                    t.push(nf + nv + w, c, -v);
                    t.push(c, nf + nv + w, -v);
                }
            }
            for m in [&self.k_mem, &self.k_bend] {
                t.extend_from(m, nf + nv, nf + nv, -1.0);
            }
        }
        let mut rhs = vec![0.0; n];
        // Move essential columns to the right-hand side.
        let a_e = self.a.mul_vec(&sigma_essential);
        let b_e = self.b.mul_vec(&sigma_essential);
        for (k, &i) in free.iter().enumerate() {
            rhs[k] = -a_e[i];
        }
        for k in 0..nv {
            rhs[nf + k] = self.f_v[k] - b_e[k];
        }
        if with_plate {
            let g_e = self.g.mul_vec(&sigma_essential);
            for w in 0..nw {
                rhs[nf + nv + w] = -self.f_w[w] + g_e[w];
            }
        }
        let mut signs = vec![-1i8; n];
        signs[..nf].iter_mut().for_each(|s| *s = 1);
        MonolithicSystem {
            matrix: t.into_csr(),
            rhs,
            signs,
            free,
            n_sigma: self.n_sigma(),
            n_v: nv,
            n_w: nw,
            sigma_essential,
        }
    }
}

impl MonolithicSystem {
    pub fn n_free(&self) -> usize {
        self.free.len()
    }

    /// Scatters a solution vector back into fields.
    pub fn split(&self, x: &[f64]) -> SolutionFields {
        let nf = self.n_free();
        let mut sigma = self.sigma_essential.clone();
        for (k, &i) in self.free.iter().enumerate() {
            sigma[i] = x[k];
        }
        SolutionFields {
            sigma,
            u_alpha: x[nf..nf + self.n_v].to_vec(),
            w: x[nf + self.n_v..].to_vec(),
        }
    }

    /// Gathers fields into a solution vector.
    pub fn gather(&self, s: &SolutionFields) -> Vec<f64> {
        let mut x: Vec<f64> = self.free.iter().map(|&i| s.sigma[i]).collect();
        x.extend_from_slice(&s.u_alpha);
        x.extend_from_slice(&s.w[..self.n_w]);
        x
    }
}
