//! Linear Lagrange elements on triangles and tetrahedra.

use nalgebra::{Matrix2, Matrix3, Point2, Point3, Vector2, Vector3};

/// Barycentric gradients and measure of a physical triangle.
#[derive(Debug, Clone, Copy)]
pub struct P1Tri {
    pub points: [Point2<f64>; 3],
    pub grads: [Vector2<f64>; 3],
    pub area: f64,
}

impl P1Tri {
    pub fn new(points: [Point2<f64>; 3]) -> Option<Self> {
        let j = Matrix2::from_columns(&[points[1] - points[0], points[2] - points[0]]);
        let det = j.determinant();
        let inv = j.try_inverse()?;
        let g1 = Vector2::new(inv[(0, 0)], inv[(0, 1)]);
        let g2 = Vector2::new(inv[(1, 0)], inv[(1, 1)]);
        Some(Self {
            points,
            grads: [-g1 - g2, g1, g2],
            area: 0.5 * det.abs(),
        })
    }

    pub fn point(&self, b: &[f64; 3]) -> Point2<f64> {
        Point2::from(
            self.points[0].coords * b[0] + self.points[1].coords * b[1] + self.points[2].coords * b[2],
        )
    }

    /// Interpolates a vector field at the vertices; returns `[v0x, v0y, v1x, ...]`.
    pub fn interpolate_vector<F: Fn(&Point2<f64>) -> Vector2<f64>>(&self, f: F) -> [f64; 6] {
        let mut out = [0.0; 6];
        for (k, p) in self.points.iter().enumerate() {
            let v = f(p);
            out[2 * k] = v.x;
            out[2 * k + 1] = v.y;
        }
        out
    }
}

/// Barycentric gradients and measure of a physical tetrahedron.
#[derive(Debug, Clone, Copy)]
pub struct P1Tet {
    pub points: [Point3<f64>; 4],
    pub grads: [Vector3<f64>; 4],
    pub volume: f64,
}

impl P1Tet {
    pub fn new(points: [Point3<f64>; 4]) -> Option<Self> {
        let j = Matrix3::from_columns(&[
            points[1] - points[0],
            points[2] - points[0],
            points[3] - points[0],
        ]);
        let det = j.determinant();
        let inv = j.try_inverse()?;
        let g: Vec<Vector3<f64>> = (0..3).map(|r| inv.row(r).transpose()).collect();
        Some(Self {
            points,
            grads: [-g[0] - g[1] - g[2], g[0], g[1], g[2]],
            volume: det.abs() / 6.0,
        })
    }

    pub fn point(&self, b: &[f64; 4]) -> Point3<f64> {
        Point3::from(
            self.points
                .iter()
                .zip(b)
                .map(|(p, w)| p.coords * *w)
                .sum::<Vector3<f64>>(),
        )
    }

    /// Barycentric coordinates of a physical point.
    pub fn barycentric(&self, x: &Point3<f64>) -> [f64; 4] {
        let d = x - self.points[0];
        let l1 = self.grads[1].dot(&d);
        let l2 = self.grads[2].dot(&d);
        let l3 = self.grads[3].dot(&d);
        [1.0 - l1 - l2 - l3, l1, l2, l3]
    }

    /// Local coefficient layout `3 * vertex + component`.
    pub fn interpolate_vector<F: Fn(&Point3<f64>) -> Vector3<f64>>(&self, f: F) -> [f64; 12] {
        let mut out = [0.0; 12];
        for (k, p) in self.points.iter().enumerate() {
            let v = f(p);
            out[3 * k..3 * k + 3].copy_from_slice(v.as_slice());
        }
        out
    }

    pub fn evaluate_vector(&self, coeffs: &[f64; 12], b: &[f64; 4]) -> Vector3<f64> {
        (0..4)
            .map(|k| Vector3::new(coeffs[3 * k], coeffs[3 * k + 1], coeffs[3 * k + 2]) * b[k])
            .sum()
    }
}
