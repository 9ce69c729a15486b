//! Morley nonconforming plate element.
//!
//! Local DOFs: values at the three vertices, then normal derivatives at the
//! midpoints of the edges opposite vertices 0, 1, 2. The normal of an edge
//! is the tangent from its lower to its higher global vertex index, rotated
//! clockwise, so neighbouring triangles share the functional.

use nalgebra::{Matrix2, Point2, SMatrix, Vector2};

pub type Matrix6 = SMatrix<f64, 6, 6>;

#[derive(Debug, Clone)]
pub struct MorleyElement {
    pub points: [Point2<f64>; 3],
    center: Point2<f64>,
    h: f64,
    /// Column `j` holds the monomial coefficients of basis function `j`.
    coeffs: Matrix6,
    pub normals: [Vector2<f64>; 3],
    pub midpoints: [Point2<f64>; 3],
}

impl MorleyElement {
    /// `global` are the global vertex ids, used only to orient edge normals.
    pub fn new(points: [Point2<f64>; 3], global: [usize; 3]) -> Result<Self, String> {
        let center = Point2::from((points[0].coords + points[1].coords + points[2].coords) / 3.0);
        let h = (0..3)
            .map(|k| (points[(k + 1) % 3] - points[k]).norm())
            .fold(0.0, f64::max);
        if h == 0.0 {
            return Err("degenerate triangle".into());
        }
        let mut normals = [Vector2::zeros(); 3];
        let mut midpoints = [Point2::origin(); 3];
        for k in 0..3 {
            let (a, b) = ((k + 1) % 3, (k + 2) % 3);
            let (lo, hi) = if global[a] < global[b] { (a, b) } else { (b, a) };
            let t = (points[hi] - points[lo]).normalize();
            normals[k] = Vector2::new(t.y, -t.x);
            midpoints[k] = Point2::from((points[a].coords + points[b].coords) * 0.5);
        }
        let mut el = Self {
            points,
            center,
            h,
            coeffs: Matrix6::zeros(),
            normals,
            midpoints,
        };
        let mut d = Matrix6::zeros();
        for k in 0..3 {
            let m = el.monomials(&points[k]);
            let g = el.monomial_grads(&el.midpoints[k]);
            for c in 0..6 {
                d[(k, c)] = m[c];
                d[(3 + k, c)] = g[c].dot(&normals[k]);
            }
        }
        let det = d.determinant();
        if det.abs() < 1e-12 {
            return Err(format!("singular Morley DOF matrix (det {det:.3e})"));
        }
        el.coeffs = d.try_inverse().ok_or("singular Morley DOF matrix")?;
        Ok(el)
    }

    fn scaled(&self, p: &Point2<f64>) -> (f64, f64) {
        ((p.x - self.center.x) / self.h, (p.y - self.center.y) / self.h)
    }

    fn monomials(&self, p: &Point2<f64>) -> [f64; 6] {
        let (x, y) = self.scaled(p);
        [1.0, x, y, x * x, x * y, y * y]
    }

    fn monomial_grads(&self, p: &Point2<f64>) -> [Vector2<f64>; 6] {
        let (x, y) = self.scaled(p);
        let s = 1.0 / self.h;
        [
            Vector2::zeros(),
            Vector2::new(s, 0.0),
            Vector2::new(0.0, s),
            Vector2::new(2.0 * x * s, 0.0),
            Vector2::new(y * s, x * s),
            Vector2::new(0.0, 2.0 * y * s),
        ]
    }

    fn monomial_hessians(&self) -> [Matrix2<f64>; 6] {
        let s = 1.0 / (self.h * self.h);
        [
            Matrix2::zeros(),
            Matrix2::zeros(),
            Matrix2::zeros(),
            Matrix2::new(2.0 * s, 0.0, 0.0, 0.0),
            Matrix2::new(0.0, s, s, 0.0),
            Matrix2::new(0.0, 0.0, 0.0, 2.0 * s),
        ]
    }

    pub fn values(&self, p: &Point2<f64>) -> [f64; 6] {
        let m = self.monomials(p);
        std::array::from_fn(|j| (0..6).map(|c| self.coeffs[(c, j)] * m[c]).sum())
    }

    pub fn gradients(&self, p: &Point2<f64>) -> [Vector2<f64>; 6] {
        let g = self.monomial_grads(p);
        std::array::from_fn(|j| (0..6).map(|c| g[c] * self.coeffs[(c, j)]).sum())
    }

    /// Hessians of the six basis functions (constant on the triangle).
    pub fn hessians(&self) -> [Matrix2<f64>; 6] {
        let hm = self.monomial_hessians();
        std::array::from_fn(|j| (0..6).map(|c| hm[c] * self.coeffs[(c, j)]).sum())
    }

    /// DOF values of a smooth function given its value and gradient.
    pub fn interpolate<F, G>(&self, f: F, grad: G) -> [f64; 6]
    where
        F: Fn(&Point2<f64>) -> f64,
        G: Fn(&Point2<f64>) -> Vector2<f64>,
    {
        let mut out = [0.0; 6];
        for k in 0..3 {
            out[k] = f(&self.points[k]);
            out[3 + k] = grad(&self.midpoints[k]).dot(&self.normals[k]);
        }
        out
    }

    pub fn evaluate(&self, coeffs: &[f64; 6], p: &Point2<f64>) -> f64 {
        self.values(p).iter().zip(coeffs).map(|(a, b)| a * b).sum()
    }

    pub fn evaluate_gradient(&self, coeffs: &[f64; 6], p: &Point2<f64>) -> Vector2<f64> {
        self.gradients(p).iter().zip(coeffs).map(|(g, c)| g * *c).sum()
    }

    pub fn evaluate_hessian(&self, coeffs: &[f64; 6]) -> Matrix2<f64> {
        self.hessians().iter().zip(coeffs).map(|(h, c)| h * *c).sum()
    }
}

/// Nodal interpolation of a Morley function into continuous P1: the vertex
/// DOFs are the nodal values.
pub fn lower_morley_to_p1(coeffs: &[f64; 6]) -> [f64; 3] {
    [coeffs[0], coeffs[1], coeffs[2]]
}
