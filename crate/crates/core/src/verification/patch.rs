//! Constant-stress patch test of the coupled mixed method.

use nalgebra::Point3;

use super::study::MeshPair;
use super::{Factor, Field, ManufacturedCase, Settings, Term};
use crate::assembly::{assemble_block_system, interpolate_stress};
use crate::error::Result;
use crate::materials::MaterialParams;
use crate::mesh::in_closed_gamma;
use crate::solvers::solve_monolithic;
use super::norms::{mixed_displacement_l2, stress_l2};

/// An affine body displacement; the plate fields are unused.
pub fn patch_case(params: MaterialParams) -> ManufacturedCase {
    use Factor::{Linear as L, One as O};
    ManufacturedCase {
        body: [
            Field(vec![Term::new(0.3, L, O, O), Term::new(0.1, O, L, O), Term::new(-0.2, O, O, L), Term::new(0.05, O, O, O)]),
            Field(vec![Term::new(-0.1, L, O, O), Term::new(0.2, O, L, O), Term::new(0.05, O, O, L)]),
            Field(vec![Term::new(0.15, L, O, O), Term::new(-0.1, O, L, O), Term::new(0.25, O, O, L), Term::new(1.0, O, O, O)]),
        ],
        plate: [Field(vec![]), Field(vec![]), Field(vec![])],
        params,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchOutcome {
    pub sigma_error: f64,
    pub u_alpha_error: f64,
    pub relative_residual: f64,
}

/// Solves with the plate load replaced by `K w* + G σ_I`, where `w*`
/// carries the body trace at plate vertices in `closure(Γ)` and `σ_I` is the
/// interpolant of the constant stress; the discrete solution is then
/// `(σ_I, u, w*)`.
pub fn run_patch_test(pair: MeshPair, settings: &Settings) -> Result<PatchOutcome> {
    let case = patch_case(settings.params);
    let disc = pair.discretization(settings)?;
    let mut blocks = assemble_block_system(&disc, &settings.params, &case)?;
    let plate = &disc.plate;
    let mut w_star = vec![0.0; plate.n_w()];
    for (v, p) in plate.mesh.vertices.iter().enumerate() {
        if !in_closed_gamma(p) {
            continue;
        }
        let u = case.u_alpha(&Point3::new(p.x, p.y, 0.0));
        if let Some(m) = plate.dofs.membrane[v] {
            w_star[m] = u.x;
            w_star[m + 1] = u.y;
        }
        if let Some(d) = plate.dofs.morley_vertex[v] {
            w_star[d] = u.z;
        }
    }
    let sigma_i = interpolate_stress(&disc.body, |x| case.sigma_alpha(x), 2);
    let mut f_w = blocks.stiffness().mul_vec(&w_star);
    blocks.g.mul_vec_add(&sigma_i, 1.0, &mut f_w);
    blocks.f_w = f_w;
    let (fields, report) = solve_monolithic(&blocks.monolithic(), settings.residual_tol)?;
    let deg = settings.degrees.error;
    Ok(PatchOutcome {
        sigma_error: stress_l2(&disc.body, &fields.sigma, Some(&case), deg)?,
        u_alpha_error: mixed_displacement_l2(&disc.body, &fields.u_alpha, Some(&case), deg)?,
        relative_residual: report.relative_residual,
    })
}
