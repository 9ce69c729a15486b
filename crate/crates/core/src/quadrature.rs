//! Quadrature rules on the reference triangle and tetrahedron.
//!
//! Points are stored in barycentric coordinates, so a rule can be mapped to
//! any physical simplex by forming the convex combination of its vertices.
//! Weights sum to the measure of the reference simplex (1/2 for the
//! triangle, 1/6 for the tetrahedron); multiply by `|K| / |K_ref|` to
//! integrate over a physical element.
//!
//! Low degrees use classical symmetric tables. Everything else comes from a
//! collapsed (Duffy) product of Gauss–Legendre rules, which has positive
//! weights and exactness of any requested degree.

use crate::error::{Error, Result};

/// Largest supported total degree on triangles.
pub const MAX_TRIANGLE_DEGREE: usize = 10;
/// Largest supported total degree on tetrahedra.
pub const MAX_TET_DEGREE: usize = 8;

/// A quadrature rule with `N` barycentric coordinates per point.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<const N: usize> {
    pub points: Vec<[f64; N]>,
    pub weights: Vec<f64>,
    /// Total polynomial degree integrated exactly.
    pub degree: usize,
}

pub type TriangleRule = QuadratureRule<3>;
pub type TetRule = QuadratureRule<4>;

impl<const N: usize> QuadratureRule<N> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Iterate over `(barycentric point, weight)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (&[f64; N], f64)> {
        self.points.iter().zip(self.weights.iter().copied())
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// True when every weight is strictly positive.
    pub fn has_positive_weights(&self) -> bool {
        self.weights.iter().all(|&w| w > 0.0)
    }
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-like initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

/// Rule on the reference triangle exact for total degree `degree`.
pub fn triangle_rule(degree: usize) -> Result<TriangleRule> {
    if degree > MAX_TRIANGLE_DEGREE {
        return Err(Error::UnsupportedQuadrature {
            shape: "triangle",
            degree,
            max: MAX_TRIANGLE_DEGREE,
        });
    }
    Ok(match degree {
        0 | 1 => TriangleRule {
            points: vec![[1.0 / 3.0; 3]],
            weights: vec![0.5],
            degree: 1,
        },
        2 => {
            let a = 2.0 / 3.0;
            let b = 1.0 / 6.0;
            TriangleRule {
                points: vec![[a, b, b], [b, a, b], [b, b, a]],
                weights: vec![1.0 / 6.0; 3],
                degree: 2,
            }
        }
        4 => {
            // Strang–Fix / Dunavant 6-point rule.
            let a1 = 0.445_948_490_915_965;
            let w1 = 0.223_381_589_678_011 / 2.0;
            let a2 = 0.091_576_213_509_771;
            let w2 = 0.109_951_743_655_322 / 2.0;
            let mut points = Vec::with_capacity(6);
            let mut weights = Vec::with_capacity(6);
            for (a, w) in [(a1, w1), (a2, w2)] {
                let b = 1.0 - 2.0 * a;
                points.extend([[b, a, a], [a, b, a], [a, a, b]]);
                weights.extend([w; 3]);
            }
            TriangleRule {
                points,
                weights,
                degree: 4,
            }
        }
        d => collapsed_triangle(d),
    })
}

fn collapsed_triangle(degree: usize) -> TriangleRule {
    let (gu, wu) = gauss_legendre_unit((degree + 2).div_ceil(2));
    let (gv, wv) = gauss_legendre_unit((degree + 1).div_ceil(2));
    let mut points = Vec::with_capacity(gu.len() * gv.len());
    let mut weights = Vec::with_capacity(gu.len() * gv.len());
    for (&u, &wu) in gu.iter().zip(&wu) {
        for (&v, &wv) in gv.iter().zip(&wv) {
            let x = u;
            let y = v * (1.0 - u);
            points.push([1.0 - x - y, x, y]);
            weights.push(wu * wv * (1.0 - u));
        }
    }
    TriangleRule {
        points,
        weights,
        degree,
    }
}

/// Rule on the reference tetrahedron exact for total degree `degree`.
pub fn tet_rule(degree: usize) -> Result<TetRule> {
    if degree > MAX_TET_DEGREE {
        return Err(Error::UnsupportedQuadrature {
            shape: "tetrahedron",
            degree,
            max: MAX_TET_DEGREE,
        });
    }
    Ok(match degree {
        0 | 1 => TetRule {
            points: vec![[0.25; 4]],
            weights: vec![1.0 / 6.0],
            degree: 1,
        },
        2 => {
            let a = 0.585_410_196_624_968_5;
            let b = 0.138_196_601_125_010_5;
            TetRule {
                points: vec![[a, b, b, b], [b, a, b, b], [b, b, a, b], [b, b, b, a]],
                weights: vec![1.0 / 24.0; 4],
                degree: 2,
            }
        }
        d => collapsed_tet(d),
    })
}

fn collapsed_tet(degree: usize) -> TetRule {
    let (gu, wu) = gauss_legendre_unit((degree + 3).div_ceil(2));
    let (gv, wv) = gauss_legendre_unit((degree + 2).div_ceil(2));
    let (gw, ww) = gauss_legendre_unit((degree + 1).div_ceil(2));
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for (&u, &wu) in gu.iter().zip(&wu) {
        for (&v, &wv) in gv.iter().zip(&wv) {
            for (&w, &ww) in gw.iter().zip(&ww) {
                let x = u;
                let y = v * (1.0 - u);
                let z = w * (1.0 - u) * (1.0 - v);
                points.push([1.0 - x - y - z, x, y, z]);
                weights.push(wu * wv * ww * (1.0 - u) * (1.0 - u) * (1.0 - v));
            }
        }
    }
    TetRule {
        points,
        weights,
        degree,
    }
}

/// Integral of `x^a y^b` over the reference triangle.
pub fn triangle_monomial_integral(a: u32, b: u32) -> f64 {
    // 2|T| a! b! 0! / (a+b+2)! with |T| = 1/2
    factorial(a) * factorial(b) / factorial(a + b + 2)
}

/// Integral of `x^a y^b z^c` over the reference tetrahedron.
pub fn tet_monomial_integral(a: u32, b: u32, c: u32) -> f64 {
    factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3)
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centroid_rules() {
        let t = triangle_rule(1).unwrap();
        assert_eq!(t.len(), 1);
        assert!((t.weights[0] - 0.5).abs() < 1e-15);
        let k = tet_rule(1).unwrap();
        assert_eq!(k.len(), 1);
        assert!((k.weights[0] - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn product_of_barycentrics() {
        let t = triangle_rule(2).unwrap();
        let v: f64 = t.iter().map(|(p, w)| w * p[1] * p[2]).sum();
        assert!((v - 1.0 / 24.0).abs() < 1e-15);
        let k = tet_rule(3).unwrap();
        let v: f64 = k.iter().map(|(p, w)| w * p[1] * p[2] * p[3]).sum();
        assert!((v - 1.0 / 720.0).abs() < 1e-15);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in 1..8 {
            let (x, w) = gauss_legendre_unit(n);
            for p in 0..(2 * n) as i32 {
                let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p)).sum();
                assert!((v - 1.0 / (p as f64 + 1.0)).abs() < 1e-14, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn unsupported_degrees_are_rejected() {
        assert!(triangle_rule(11).is_err());
        assert!(tet_rule(9).is_err());
    }
}
