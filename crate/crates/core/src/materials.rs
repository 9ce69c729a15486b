//! Isotropic constitutive maps for the body (3D elasticity) and the plate
//! (membrane and Kirchhoff bending).

use nalgebra::{Matrix2, Matrix3};

/// Material and geometric parameters of the coupled model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    pub e_alpha: f64,
    pub nu_alpha: f64,
    pub e_beta: f64,
    pub nu_beta: f64,
    pub t_beta: f64,
}

impl MaterialParams {
    /// `E_α = 100`, `ν = 0.3`, `t_β = 0.02`, with `E_β` chosen so that the
    /// flexural rigidity equals one.
    pub fn benchmark() -> Self {
        let nu = 0.3;
        let t = 0.02;
        Self {
            e_alpha: 100.0,
            nu_alpha: nu,
            e_beta: 12.0 * (1.0 - nu * nu) / (t * t * t),
            nu_beta: nu,
            t_beta: t,
        }
    }

    /// Flexural rigidity `E_β t_β³ / (12 (1 − ν_β²))`.
    pub fn d_beta(&self) -> f64 {
        self.e_beta * self.t_beta.powi(3) / (12.0 * (1.0 - self.nu_beta * self.nu_beta))
    }

    /// Membrane stiffness `E_β t_β / (1 − ν_β²)`.
    pub fn membrane_modulus(&self) -> f64 {
        self.e_beta * self.t_beta / (1.0 - self.nu_beta * self.nu_beta)
    }

    /// Returns a description of the first violated parameter range, if any.
    pub fn validate(&self) -> Option<String> {
        let checks = [
            (self.e_alpha > 0.0, "e_alpha must be positive"),
            (self.e_beta > 0.0, "e_beta must be positive"),
            (self.t_beta > 0.0, "t_beta must be positive"),
            (
                self.nu_alpha > 0.0 && self.nu_alpha < 0.5,
                "nu_alpha must lie in (0, 1/2)",
            ),
            (
                self.nu_beta > 0.0 && self.nu_beta < 0.5,
                "nu_beta must lie in (0, 1/2)",
            ),
        ];
        checks
            .iter()
            .find(|(ok, _)| !ok)
            .map(|(_, msg)| msg.to_string())
    }
}

impl Default for MaterialParams {
    fn default() -> Self {
        Self::benchmark()
    }
}

/// Symmetric 3×3 tensor stored as `(xx, yy, zz, yz, xz, xy)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymTensor3(pub [f64; 6]);

/// Symmetric 2×2 tensor stored as `(xx, yy, xy)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymTensor2(pub [f64; 3]);

impl SymTensor3 {
    pub fn identity() -> Self {
        Self([1.0, 1.0, 1.0, 0.0, 0.0, 0.0])
    }

    pub fn trace(&self) -> f64 {
        self.0[0] + self.0[1] + self.0[2]
    }

    /// Symmetric part of `m`.
    pub fn from_matrix(m: &Matrix3<f64>) -> Self {
        Self([
            m[(0, 0)],
            m[(1, 1)],
            m[(2, 2)],
            0.5 * (m[(1, 2)] + m[(2, 1)]),
            0.5 * (m[(0, 2)] + m[(2, 0)]),
            0.5 * (m[(0, 1)] + m[(1, 0)]),
        ])
    }

    pub fn to_matrix(&self) -> Matrix3<f64> {
        let [xx, yy, zz, yz, xz, xy] = self.0;
        Matrix3::new(xx, xy, xz, xy, yy, yz, xz, yz, zz)
    }

    /// Full contraction `a : b`.
    pub fn ddot(&self, other: &Self) -> f64 {
        let a = &self.0;
        let b = &other.0;
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + 2.0 * (a[3] * b[3] + a[4] * b[4] + a[5] * b[5])
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|v| v * s))
    }

    fn add_identity(&self, s: f64) -> Self {
        let mut out = *self;
        out.0[0] += s;
        out.0[1] += s;
        out.0[2] += s;
        out
    }
}

impl SymTensor2 {
    pub fn identity() -> Self {
        Self([1.0, 1.0, 0.0])
    }

    pub fn trace(&self) -> f64 {
        self.0[0] + self.0[1]
    }

    pub fn from_matrix(m: &Matrix2<f64>) -> Self {
        Self([m[(0, 0)], m[(1, 1)], 0.5 * (m[(0, 1)] + m[(1, 0)])])
    }

    pub fn to_matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.0[0], self.0[2], self.0[2], self.0[1])
    }

    pub fn ddot(&self, other: &Self) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + 2.0 * self.0[2] * other.0[2]
    }

    fn plane_law(&self, scale: f64, nu: f64) -> Self {
        let tr = self.trace();
        Self([
            scale * ((1.0 - nu) * self.0[0] + nu * tr),
            scale * ((1.0 - nu) * self.0[1] + nu * tr),
            scale * (1.0 - nu) * self.0[2],
        ])
    }
}

/// `σ = E/(1+ν) ε + Eν/((1+ν)(1−2ν)) tr(ε) I`.
pub fn c0_apply(eps: &SymTensor3, p: &MaterialParams) -> SymTensor3 {
    let (e, nu) = (p.e_alpha, p.nu_alpha);
    let lambda = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    eps.scale(e / (1.0 + nu)).add_identity(lambda * eps.trace())
}

/// `ε = (1+ν)/E σ − ν/E tr(σ) I`.
pub fn c0_inv_apply(sigma: &SymTensor3, p: &MaterialParams) -> SymTensor3 {
    let (e, nu) = (p.e_alpha, p.nu_alpha);
    sigma
        .scale((1.0 + nu) / e)
        .add_identity(-nu / e * sigma.trace())
}

/// Membrane law `σ = E_β t_β/(1−ν_β²) ((1−ν_β) ε + ν_β tr(ε) I)`.
pub fn c1_apply(eps: &SymTensor2, p: &MaterialParams) -> SymTensor2 {
    eps.plane_law(p.membrane_modulus(), p.nu_beta)
}

/// Bending law `M = D_β ((1−ν_β) K + ν_β tr(K) I)`.
pub fn c2_apply(curv: &SymTensor2, p: &MaterialParams) -> SymTensor2 {
    curv.plane_law(p.d_beta(), p.nu_beta)
}

/// `C0⁻¹` as a matrix acting on full 3×3 tensors.
pub fn compliance_matrix(sigma: &Matrix3<f64>, p: &MaterialParams) -> Matrix3<f64> {
    let (e, nu) = (p.e_alpha, p.nu_alpha);
    sigma * ((1.0 + nu) / e) - Matrix3::identity() * (nu / e * sigma.trace())
}

/// `C0` acting on full 3×3 tensors.
pub fn stiffness_matrix(eps: &Matrix3<f64>, p: &MaterialParams) -> Matrix3<f64> {
    let (e, nu) = (p.e_alpha, p.nu_alpha);
    let lambda = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    eps * (e / (1.0 + nu)) + Matrix3::identity() * (lambda * eps.trace())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> MaterialParams {
        MaterialParams {
            e_alpha: 100.0,
            nu_alpha: 0.3,
            ..MaterialParams::benchmark()
        }
    }

    #[test]
    fn c0_of_identity() {
        let s = c0_apply(&SymTensor3::identity(), &params());
        for i in 0..3 {
            assert!((s.0[i] - 250.0).abs() < 1e-12);
            assert_eq!(s.0[i + 3], 0.0);
        }
    }

    #[test]
    fn compliance_of_identity() {
        let p = params();
        let e = c0_inv_apply(&SymTensor3::identity(), &p);
        let expect = (1.0 - 2.0 * p.nu_alpha) / p.e_alpha;
        assert!((e.0[0] - expect).abs() < 1e-15);
    }

    #[test]
    fn trace_free_compliance() {
        let p = params();
        let s = SymTensor3([1.0, -1.0, 0.0, 0.3, -0.2, 0.5]);
        let e = c0_inv_apply(&s, &p);
        let expect = s.scale((1.0 + p.nu_alpha) / p.e_alpha);
        for i in 0..6 {
            assert!((e.0[i] - expect.0[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_poisson_limit_shear() {
        let p = MaterialParams {
            nu_alpha: 0.0,
            ..params()
        };
        let eps = SymTensor3([0.0, 0.0, 0.0, 0.1, 0.2, 0.3]);
        let s = c0_apply(&eps, &p);
        assert!((s.0[5] - 100.0 * 0.3).abs() < 1e-12);
    }

    #[test]
    fn membrane_and_bending_laws() {
        let p = params();
        let s = c1_apply(&SymTensor2::identity(), &p);
        let expect = p.e_beta * p.t_beta / (1.0 - p.nu_beta);
        assert!((s.0[0] - expect).abs() < 1e-9 * expect);

        let m = c2_apply(&SymTensor2::identity(), &p);
        assert!((m.0[0] - 1.3).abs() < 1e-12);
        assert!(m.0[2].abs() < 1e-15);

        let m = c2_apply(&SymTensor2([1.0, -1.0, 0.0]), &p);
        assert!((m.0[0] - 0.7).abs() < 1e-12);
        assert!((m.0[1] + 0.7).abs() < 1e-12);
    }

    #[test]
    fn benchmark_rigidity_is_one() {
        assert!((MaterialParams::benchmark().d_beta() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn membrane_law_without_poisson() {
        let p = MaterialParams {
            nu_beta: 0.0,
            ..params()
        };
        let eps = SymTensor2([0.2, -0.1, 0.05]);
        let s = c1_apply(&eps, &p);
        for i in 0..3 {
            assert!((s.0[i] - p.e_beta * p.t_beta * eps.0[i]).abs() < 1e-9);
        }
    }
}
