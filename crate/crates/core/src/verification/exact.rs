//! Closed-form manufactured solutions and the forcing they induce.
//!
//! Each displacement component is a sum of separable products
//! `a(x) b(y) c(z)` of one-dimensional factors with analytic derivatives, so
//! stresses, body loads, plate loads and interface tractions all follow from
//! exact differentiation.

use std::f64::consts::PI;
use std::str::FromStr;

use nalgebra::{Matrix2, Matrix3, Point2, Point3, Vector2, Vector3};

use crate::assembly::Forcing;
use crate::error::{Error, Result};
use crate::materials::{c0_apply, c1_apply, c2_apply, MaterialParams, SymTensor2, SymTensor3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Factor {
    One,
    /// `x`
    Linear,
    /// `1 + x²`
    OnePlusSq,
    /// `sin(π x)`
    Sin,
    /// `(1 − x²)²`
    QuarticBump,
}

impl Factor {
    /// `k`-th derivative at `x`.
    pub fn d(&self, k: usize, x: f64) -> f64 {
        match self {
            Factor::One => (k == 0) as u8 as f64,
            Factor::Linear => match k {
                0 => x,
                1 => 1.0,
                _ => 0.0,
            },
            Factor::OnePlusSq => match k {
                0 => 1.0 + x * x,
                1 => 2.0 * x,
                2 => 2.0,
                _ => 0.0,
            },
            Factor::Sin => PI.powi(k as i32) * (PI * x + k as f64 * PI / 2.0).sin(),
            Factor::QuarticBump => match k {
                0 => (1.0 - x * x).powi(2),
                1 => -4.0 * x + 4.0 * x.powi(3),
                2 => -4.0 + 12.0 * x * x,
                3 => 24.0 * x,
                4 => 24.0,
                _ => 0.0,
            },
        }
    }
}

/// `coef · a(x) b(y) c(z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub coef: f64,
    pub factors: [Factor; 3],
}

impl Term {
    pub fn new(coef: f64, a: Factor, b: Factor, c: Factor) -> Self {
        Self {
            coef,
            factors: [a, b, c],
        }
    }

    pub fn partial(&self, orders: [usize; 3], p: &[f64; 3]) -> f64 {
        self.coef
            * (0..3)
                .map(|i| self.factors[i].d(orders[i], p[i]))
                .product::<f64>()
    }
}

/// Scalar field as a sum of separable terms.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Field(pub Vec<Term>);

impl Field {
    pub fn partial(&self, orders: [usize; 3], p: &[f64; 3]) -> f64 {
        self.0.iter().map(|t| t.partial(orders, p)).sum()
    }

    pub fn value(&self, p: &[f64; 3]) -> f64 {
        self.partial([0, 0, 0], p)
    }

    pub fn gradient(&self, p: &[f64; 3]) -> Vector3<f64> {
        Vector3::new(
            self.partial([1, 0, 0], p),
            self.partial([0, 1, 0], p),
            self.partial([0, 0, 1], p),
        )
    }

    pub fn hessian(&self, p: &[f64; 3]) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| {
            let mut o = [0; 3];
            o[i] += 1;
            o[j] += 1;
            self.partial(o, p)
        })
    }
}

/// Displacements of the body and the plate plus material data.
#[derive(Debug, Clone)]
pub struct ManufacturedCase {
    pub body: [Field; 3],
    /// Plate fields; the third factor of every term is `One`.
    pub plate: [Field; 3],
    pub params: MaterialParams,
}

/// Quantities that can be requested from [`ManufacturedCase::eval`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactField {
    BodyDisplacement,
    BodyStress,
    BodyLoad,
    PlateDisplacement,
    MembraneStress,
    Moments,
    PlateLoadSmooth,
    PlateLoadJump,
}

impl FromStr for ExactField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "u_alpha" => Self::BodyDisplacement,
            "sigma_alpha" => Self::BodyStress,
            "f_alpha" => Self::BodyLoad,
            "u_beta" => Self::PlateDisplacement,
            "sigma_beta" => Self::MembraneStress,
            "m_beta" => Self::Moments,
            "f_beta_smooth" => Self::PlateLoadSmooth,
            "f_beta_jump" => Self::PlateLoadJump,
            other => return Err(Error::UnknownField(other.to_string())),
        })
    }
}

fn p3(x: &Point3<f64>) -> [f64; 3] {
    [x.x, x.y, x.z]
}

fn p2(x: &Point2<f64>) -> [f64; 3] {
    [x.x, x.y, 0.0]
}

impl ManufacturedCase {
    /// The smooth benchmark solution with trace and clamping compatibility.
    pub fn benchmark(params: MaterialParams) -> Self {
        use Factor::*;
        let ss = Field(vec![Term::new(1.0, Sin, Sin, OnePlusSq)]);
        let qq = Field(vec![Term::new(1.0, QuarticBump, QuarticBump, OnePlusSq)]);
        let ss_p = Field(vec![Term::new(1.0, Sin, Sin, One)]);
        let qq_p = Field(vec![Term::new(1.0, QuarticBump, QuarticBump, One)]);
        Self {
            body: [ss.clone(), ss, qq],
            plate: [ss_p.clone(), ss_p, qq_p],
            params,
        }
    }

    pub fn u_alpha(&self, x: &Point3<f64>) -> Vector3<f64> {
        let p = p3(x);
        Vector3::from_fn(|i, _| self.body[i].value(&p))
    }

    /// `∂_j u_i`.
    pub fn grad_u_alpha(&self, x: &Point3<f64>) -> Matrix3<f64> {
        let p = p3(x);
        Matrix3::from_fn(|i, j| {
            let mut o = [0; 3];
            o[j] = 1;
            self.body[i].partial(o, &p)
        })
    }

    pub fn strain_alpha(&self, x: &Point3<f64>) -> SymTensor3 {
        SymTensor3::from_matrix(&self.grad_u_alpha(x))
    }

    pub fn sigma_alpha(&self, x: &Point3<f64>) -> SymTensor3 {
        c0_apply(&self.strain_alpha(x), &self.params)
    }

    /// `f^α = −div σ^α`.
    pub fn f_alpha(&self, x: &Point3<f64>) -> Vector3<f64> {
        let p = p3(x);
        let (e, nu) = (self.params.e_alpha, self.params.nu_alpha);
        let mu = e / (2.0 * (1.0 + nu));
        let lambda = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
        let h: Vec<Matrix3<f64>> = self.body.iter().map(|f| f.hessian(&p)).collect();
        // ∂_i div u
        let grad_div = Vector3::from_fn(|i, _| (0..3).map(|j| h[j][(i, j)]).sum::<f64>());
        Vector3::from_fn(|i, _| {
            let lap = h[i].trace();
            -(mu * (lap + grad_div[i]) + lambda * grad_div[i])
        })
    }

    /// `σ^α n` for a given unit normal.
    pub fn traction(&self, x: &Point3<f64>, n: &Vector3<f64>) -> Vector3<f64> {
        self.sigma_alpha(x).to_matrix() * n
    }

    pub fn u_beta(&self, x: &Point2<f64>) -> Vector3<f64> {
        let p = p2(x);
        Vector3::from_fn(|i, _| self.plate[i].value(&p))
    }

    /// Gradients of the three plate components.
    pub fn grad_u_beta(&self, x: &Point2<f64>) -> [Vector2<f64>; 3] {
        let p = p2(x);
        std::array::from_fn(|i| {
            let g = self.plate[i].gradient(&p);
            Vector2::new(g.x, g.y)
        })
    }

    pub fn hessian_u3(&self, x: &Point2<f64>) -> Matrix2<f64> {
        let h = self.plate[2].hessian(&p2(x));
        Matrix2::new(h[(0, 0)], h[(0, 1)], h[(1, 0)], h[(1, 1)])
    }

    pub fn membrane_strain(&self, x: &Point2<f64>) -> SymTensor2 {
        let g = self.grad_u_beta(x);
        let m = Matrix2::new(g[0].x, g[0].y, g[1].x, g[1].y);
        SymTensor2::from_matrix(&m)
    }

    pub fn membrane_stress(&self, x: &Point2<f64>) -> SymTensor2 {
        c1_apply(&self.membrane_strain(x), &self.params)
    }

    pub fn moments(&self, x: &Point2<f64>) -> SymTensor2 {
        c2_apply(&SymTensor2::from_matrix(&self.hessian_u3(x)), &self.params)
    }

    /// Plate operator applied to `u^β`: `−div N` for the membrane and
    /// `D Δ² u3` for the bending part.
    pub fn f_beta_smooth(&self, x: &Point2<f64>) -> Vector3<f64> {
        let p = p2(x);
        let k = self.params.membrane_modulus();
        let nu = self.params.nu_beta;
        let h: Vec<Matrix3<f64>> = self.plate[..2].iter().map(|f| f.hessian(&p)).collect();
        let grad_div = |i: usize| h[0][(i, 0)] + h[1][(i, 1)];
        let lap = |i: usize| h[i][(0, 0)] + h[i][(1, 1)];
        // ∂_J N_IJ = K ((1−ν) ½ (Δu_I + ∂_I div u) + ν ∂_I div u)
        let div_n = |i: usize| k * ((1.0 - nu) * 0.5 * (lap(i) + grad_div(i)) + nu * grad_div(i));
        let w = &self.plate[2];
        let bilap = w.partial([4, 0, 0], &p) + 2.0 * w.partial([2, 2, 0], &p) + w.partial([0, 4, 0], &p);
        Vector3::new(-div_n(0), -div_n(1), self.params.d_beta() * bilap)
    }

    /// Interface load `σ^α n^α` with the body normal `(0, 0, −1)` on `Γ`.
    pub fn f_beta_jump(&self, x: &Point2<f64>) -> Vector3<f64> {
        self.traction(&Point3::new(x.x, x.y, 0.0), &Vector3::new(0.0, 0.0, -1.0))
    }

    /// Generic evaluation; `point` has three coordinates for body fields and
    /// two for plate fields.
    pub fn eval(&self, field: ExactField, point: &[f64]) -> Vec<f64> {
        let b = || Point3::new(point[0], point[1], point[2]);
        let q = || Point2::new(point[0], point[1]);
        match field {
            ExactField::BodyDisplacement => self.u_alpha(&b()).as_slice().to_vec(),
            ExactField::BodyStress => self.sigma_alpha(&b()).0.to_vec(),
            ExactField::BodyLoad => self.f_alpha(&b()).as_slice().to_vec(),
            ExactField::PlateDisplacement => self.u_beta(&q()).as_slice().to_vec(),
            ExactField::MembraneStress => self.membrane_stress(&q()).0.to_vec(),
            ExactField::Moments => self.moments(&q()).0.to_vec(),
            ExactField::PlateLoadSmooth => self.f_beta_smooth(&q()).as_slice().to_vec(),
            ExactField::PlateLoadJump => self.f_beta_jump(&q()).as_slice().to_vec(),
        }
    }
}

/// Parses a field name and evaluates it.
pub fn eval_exact(case: &ManufacturedCase, which: &str, point: &[f64]) -> Result<Vec<f64>> {
    let field: ExactField = which.parse()?;
    let need = match field {
        ExactField::BodyDisplacement | ExactField::BodyStress | ExactField::BodyLoad => 3,
        _ => 2,
    };
    if point.len() != need {
        return Err(Error::UnknownField(format!(
            "{which} expects {need} coordinates, got {}",
            point.len()
        )));
    }
    Ok(case.eval(field, point))
}

impl Forcing for ManufacturedCase {
    fn body_load(&self, x: &Point3<f64>) -> Vector3<f64> {
        self.f_alpha(x)
    }

    fn traction(&self, x: &Point3<f64>, n: &Vector3<f64>) -> Vector3<f64> {
        ManufacturedCase::traction(self, x, n)
    }

    fn plate_load_smooth(&self, x: &Point2<f64>) -> Vector3<f64> {
        self.f_beta_smooth(x)
    }

    fn plate_load_jump(&self, x: &Point2<f64>) -> Vector3<f64> {
        self.f_beta_jump(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_values() {
        let c = ManufacturedCase::benchmark(MaterialParams::benchmark());
        let u = c.u_alpha(&Point3::origin());
        assert!((u - Vector3::new(0.0, 0.0, 1.0)).norm() < 1e-15);
        let s = c.sigma_alpha(&Point3::origin());
        assert!(s.0[3].abs() < 1e-14 && s.0[4].abs() < 1e-14);
    }

    #[test]
    fn factor_derivatives_match_differences() {
        let h = 1e-5;
        for f in [Factor::Sin, Factor::QuarticBump, Factor::OnePlusSq, Factor::Linear] {
            for k in 0..4 {
                for x in [-0.7, 0.1, 0.45] {
                    let fd = (f.d(k, x + h) - f.d(k, x - h)) / (2.0 * h);
                    assert!((fd - f.d(k + 1, x)).abs() < 1e-5 * (1.0 + fd.abs()), "{f:?} {k}");
                }
            }
        }
    }

    #[test]
    fn unknown_field_is_rejected() {
        let c = ManufacturedCase::benchmark(MaterialParams::benchmark());
        assert!(matches!(eval_exact(&c, "pressure", &[0.0, 0.0]), Err(Error::UnknownField(_))));
        assert_eq!(eval_exact(&c, "u_beta", &[0.0, 0.0]).unwrap(), vec![0.0, 0.0, 1.0]);
    }
}
