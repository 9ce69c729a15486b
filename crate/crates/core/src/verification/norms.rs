//! Error norms of discrete fields against the manufactured solution.

use nalgebra::{Matrix2, Vector2, Vector3};

use super::ManufacturedCase;
use crate::assembly::{BodySpace, PlateSpace, SolutionFields};
use crate::error::Result;
use crate::materials::SymTensor3;
use crate::quadrature::{tet_rule, triangle_rule};

/// Errors of one solve; all norms are absolute.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorNorms {
    pub sigma_l2: f64,
    pub u_alpha_l2: f64,
    /// `|u_* − u_*h|_1`
    pub membrane_h1: f64,
    pub membrane_l2: f64,
    /// Broken `|u_3 − u_3h|_{2,h}`.
    pub bending_h2: f64,
    /// Broken `|u_3 − u_3h|_{1,h}`.
    pub bending_h1: f64,
    pub bending_l2: f64,
}

impl ErrorNorms {
    pub const NAMES: [&'static str; 7] = [
        "sigma_l2",
        "u_alpha_l2",
        "u_star_h1",
        "u_star_l2",
        "u3_h2",
        "u3_h1",
        "u3_l2",
    ];

    pub fn values(&self) -> [f64; 7] {
        [
            self.sigma_l2,
            self.u_alpha_l2,
            self.membrane_h1,
            self.membrane_l2,
            self.bending_h2,
            self.bending_h1,
            self.bending_l2,
        ]
    }

    /// `sqrt(‖σ‖² + ‖u^α‖² + ‖u_*‖² + ‖u_3‖²)`, all in `L²`.
    pub fn combined_l2(&self) -> f64 {
        (self.sigma_l2.powi(2) + self.u_alpha_l2.powi(2) + self.membrane_l2.powi(2) + self.bending_l2.powi(2)).sqrt()
    }
}

fn frobenius_sq(s: &SymTensor3) -> f64 {
    s.ddot(s)
}

/// `‖σ − σ_h‖_0`; with `case = None` the norm of `σ_h` itself.
pub fn stress_l2(body: &BodySpace, sigma: &[f64], case: Option<&ManufacturedCase>, degree: usize) -> Result<f64> {
    let rule = tet_rule(degree)?;
    let mut sum = 0.0;
    let mut local = [0.0; 42];
    for (t, el) in body.elements.iter().enumerate() {
        for (l, &g) in body.stress.tet_dofs[t].iter().enumerate() {
            local[l] = sigma[g];
        }
        for (b, w) in rule.iter() {
            let mut d = el.evaluate(&local, b);
            if let Some(c) = case {
                let e = c.sigma_alpha(&el.geom.point(b));
                for k in 0..6 {
                    d.0[k] -= e.0[k];
                }
            }
            sum += 6.0 * el.geom.volume * w * frobenius_sq(&d);
        }
    }
    Ok(sum.sqrt())
}

/// `L²` error of a piecewise linear body displacement given per-tet vertex
/// coefficients (`3 v + c` layout).
pub fn body_displacement_l2<F>(body: &BodySpace, coeffs: F, case: Option<&ManufacturedCase>, degree: usize) -> Result<f64>
where
    F: Fn(usize) -> [f64; 12],
{
    let rule = tet_rule(degree)?;
    let mut sum = 0.0;
    for (t, el) in body.elements.iter().enumerate() {
        let c = coeffs(t);
        for (b, w) in rule.iter() {
            let mut v = el.geom.evaluate_vector(&c, b);
            if let Some(case) = case {
                v -= case.u_alpha(&el.geom.point(b));
            }
            sum += 6.0 * el.geom.volume * w * v.norm_squared();
        }
    }
    Ok(sum.sqrt())
}

/// `‖u^α − u_h^α‖_0` for the discontinuous displacement of the mixed method.
pub fn mixed_displacement_l2(body: &BodySpace, u: &[f64], case: Option<&ManufacturedCase>, degree: usize) -> Result<f64> {
    body_displacement_l2(body, |t| std::array::from_fn(|i| u[body.disp.dof(t, i)]), case, degree)
}

/// Plate norms; fields: `[membrane H1, membrane L2, bending H2, H1, L2]`.
pub fn plate_errors(plate: &PlateSpace, w: &[f64], case: Option<&ManufacturedCase>, degree: usize) -> Result<[f64; 5]> {
    let rule = triangle_rule(degree)?;
    let mut acc = [0.0; 5];
    let get = |d: Option<usize>| d.map_or(0.0, |g| w[g]);
    for t in 0..plate.mesh.triangles.len() {
        let p1 = &plate.p1[t];
        let morley = &plate.morley[t];
        let m: [f64; 6] = plate.dofs.tri_membrane[t].map(get);
        let b: [f64; 6] = plate.dofs.tri_morley[t].map(get);
        let hess_h = morley.evaluate_hessian(&b);
        // Membrane gradient is constant: rows are components.
        let mut grad_h = Matrix2::zeros();
        for k in 0..3 {
            for c in 0..2 {
                grad_h.set_row(c, &(grad_h.row(c) + p1.grads[k].transpose() * m[2 * k + c]));
            }
        }
        for (bq, wq) in rule.iter() {
            let x = p1.point(bq);
            let wt = 2.0 * p1.area * wq;
            let mut u = Vector2::new(
                (0..3).map(|k| bq[k] * m[2 * k]).sum::<f64>(),
                (0..3).map(|k| bq[k] * m[2 * k + 1]).sum::<f64>(),
            );
            let mut g = grad_h;
            let mut u3 = morley.evaluate(&b, &x);
            let mut g3 = morley.evaluate_gradient(&b, &x);
            let mut h3 = hess_h;
            if let Some(case) = case {
                let ue = case.u_beta(&x);
                let ge = case.grad_u_beta(&x);
                u -= Vector2::new(ue.x, ue.y);
                g.set_row(0, &(g.row(0) - ge[0].transpose()));
                g.set_row(1, &(g.row(1) - ge[1].transpose()));
                u3 -= ue.z;
                g3 -= ge[2];
                h3 -= case.hessian_u3(&x);
            }
            acc[0] += wt * g.norm_squared();
            acc[1] += wt * u.norm_squared();
            acc[2] += wt * h3.norm_squared();
            acc[3] += wt * g3.norm_squared();
            acc[4] += wt * u3 * u3;
        }
    }
    Ok(acc.map(f64::sqrt))
}

/// All norms of a mixed solution.
pub fn compute_error_norms(
    body: &BodySpace,
    plate: &PlateSpace,
    fields: &SolutionFields,
    case: Option<&ManufacturedCase>,
    degree: usize,
) -> Result<ErrorNorms> {
    let p = plate_errors(plate, &fields.w, case, degree)?;
    Ok(ErrorNorms {
        sigma_l2: stress_l2(body, &fields.sigma, case, degree)?,
        u_alpha_l2: mixed_displacement_l2(body, &fields.u_alpha, case, degree)?,
        membrane_h1: p[0],
        membrane_l2: p[1],
        bending_h2: p[2],
        bending_h1: p[3],
        bending_l2: p[4],
    })
}

/// Relative combined `L²` distance between two discrete solutions.
pub fn relative_combined_difference(
    body: &BodySpace,
    plate: &PlateSpace,
    a: &SolutionFields,
    reference: &SolutionFields,
    degree: usize,
) -> Result<f64> {
    let diff = SolutionFields {
        sigma: a.sigma.iter().zip(&reference.sigma).map(|(x, y)| x - y).collect(),
        u_alpha: a.u_alpha.iter().zip(&reference.u_alpha).map(|(x, y)| x - y).collect(),
        w: a.w.iter().zip(&reference.w).map(|(x, y)| x - y).collect(),
    };
    let num = compute_error_norms(body, plate, &diff, None, degree)?.combined_l2();
    let den = compute_error_norms(body, plate, reference, None, degree)?.combined_l2();
    Ok(if den == 0.0 { num } else { num / den })
}

/// Elementwise `L²` norm of `div_h σ_h + P_h f`, with `P_h f` given by its
/// discontinuous P1 coefficients.
pub fn equilibrium_defect(body: &BodySpace, sigma: &[f64], projected_load: &[f64], degree: usize) -> Result<f64> {
    let rule = tet_rule(degree)?;
    let mut sum = 0.0;
    let mut local = [0.0; 42];
    for (t, el) in body.elements.iter().enumerate() {
        for (l, &g) in body.stress.tet_dofs[t].iter().enumerate() {
            local[l] = sigma[g];
        }
        let pf: [f64; 12] = std::array::from_fn(|i| projected_load[body.disp.dof(t, i)]);
        for (b, w) in rule.iter() {
            let div: Vector3<f64> = el
                .divergences(b)
                .iter()
                .zip(&local)
                .map(|(d, c)| d * *c)
                .sum();
            let r = div + el.geom.evaluate_vector(&pf, b);
            sum += 6.0 * el.geom.volume * w * r.norm_squared();
        }
    }
    Ok(sum.sqrt())
}
