//! Lowest-order Hu–Ma symmetric stress element on tetrahedra.
//!
//! The local space is spanned by `p · t tᵀ` over the six edges, where `t` is
//! the unit edge tangent and `p` ranges over the seven-dimensional space
//! `P1 + (λi − λj) span{λl, λm} + span{λi λj}` attached to edge `(i, j)`.
//! Every member is a quadratic, so fields are stored as coefficients of the
//! ten homogeneous quadratic monomials `λa λb` in each of the six symmetric
//! components.
//!
//! DOFs: for face `i` (opposite local vertex `i`), the nine scaled moments
//! `(1/|F|) ∫_F (τ n_F)_c μ_a`, where `μ_a` are the face barycentrics in
//! increasing global vertex order and `n_F` is the global face normal; then
//! the six mean values `(1/|K|) ∫_K τ_m`.

use nalgebra::{DMatrix, Point3, Vector3};

use super::lagrange::P1Tet;
use crate::materials::SymTensor3;
use crate::quadrature::{tet_rule, triangle_rule};

pub const HUMA_DIM: usize = 42;
pub const FACE_DOFS: usize = 9;
pub const INTERIOR_DOFS: usize = 6;
/// Upper bound on `‖D‖₁ ‖D⁻¹‖₁` for the local DOF matrix.
pub const MAX_CONDITION: f64 = 1e12;

pub const EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
const MONOS: [(usize, usize); 10] = [
    (0, 0),
    (0, 1),
    (0, 2),
    (0, 3),
    (1, 1),
    (1, 2),
    (1, 3),
    (2, 2),
    (2, 3),
    (3, 3),
];
/// Symmetric component index `(row, col)` for storage order `xx yy zz yz xz xy`.
const COMP: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)];

fn mono(a: usize, b: usize) -> usize {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    MONOS.iter().position(|&m| m == (a, b)).unwrap()
}

fn comp_index(r: usize, c: usize) -> usize {
    let (r, c) = if r <= c { (r, c) } else { (c, r) };
    COMP.iter().position(|&m| m == (r, c)).unwrap()
}

type Quadratic = [f64; 10];
/// Symmetric-tensor-valued quadratic: `[component][monomial]`.
pub type TensorPoly = [[f64; 10]; 6];

fn linear(a: usize) -> Quadratic {
    let mut q = [0.0; 10];
    for b in 0..4 {
        q[mono(a, b)] += 1.0;
    }
    q
}

fn product(a: usize, b: usize) -> Quadratic {
    let mut q = [0.0; 10];
    q[mono(a, b)] = 1.0;
    q
}

fn sub(p: Quadratic, q: Quadratic) -> Quadratic {
    std::array::from_fn(|i| p[i] - q[i])
}

/// The seven polynomial factors attached to edge `e`.
fn edge_polys(e: usize) -> [Quadratic; 7] {
    let (i, j) = EDGES[e];
    let mut rest = (0..4).filter(|&k| k != i && k != j);
    let l = rest.next().unwrap();
    let m = rest.next().unwrap();
    [
        linear(0),
        linear(1),
        linear(2),
        linear(3),
        sub(product(i, l), product(j, l)),
        sub(product(i, m), product(j, m)),
        product(i, j),
    ]
}

fn monomial_values(b: &[f64; 4]) -> [f64; 10] {
    MONOS.map(|(x, y)| b[x] * b[y])
}

/// Evaluates a tensor quadratic at barycentric point `b`.
pub fn poly_value(p: &TensorPoly, b: &[f64; 4]) -> SymTensor3 {
    let m = monomial_values(b);
    SymTensor3(std::array::from_fn(|k| {
        p[k].iter().zip(&m).map(|(c, v)| c * v).sum()
    }))
}

#[derive(Debug, Clone)]
pub struct HuMaElement {
    pub geom: P1Tet,
    /// Local vertex indices of face `i`, sorted by global vertex id.
    pub face_vertices: [[usize; 3]; 4],
    pub outward_normals: [Vector3<f64>; 4],
    pub face_areas: [f64; 4],
    /// `+1` when the global normal of face `i` is outward for this tet.
    pub normal_sign: [f64; 4],
    pub basis: Vec<TensorPoly>,
}

impl HuMaElement {
    /// Builds the dual basis. `global` are the global vertex ids and
    /// `normal_sign[i]` orients the global normal of face `i`.
    pub fn new(
        points: [Point3<f64>; 4],
        global: [usize; 4],
        normal_sign: [f64; 4],
    ) -> Result<Self, String> {
        let geom = P1Tet::new(points).ok_or("degenerate tetrahedron")?;
        let mut face_vertices = [[0; 3]; 4];
        let mut outward_normals = [Vector3::zeros(); 4];
        let mut face_areas = [0.0; 4];
        for i in 0..4 {
            let mut fv: Vec<usize> = (0..4).filter(|&k| k != i).collect();
            fv.sort_by_key(|&k| global[k]);
            face_vertices[i] = [fv[0], fv[1], fv[2]];
            // ∇λ_i points inward across face i, with |∇λ_i| = |F| / (3|K|).
            let g = geom.grads[i];
            outward_normals[i] = -g / g.norm();
            face_areas[i] = g.norm() * 3.0 * geom.volume;
        }
        let mut el = Self {
            geom,
            face_vertices,
            outward_normals,
            face_areas,
            normal_sign,
            basis: Vec::new(),
        };
        let spanning = el.spanning();
        let mut d = DMatrix::zeros(HUMA_DIM, HUMA_DIM);
        for (f, phi) in spanning.iter().enumerate() {
            let dofs = el.dofs_of_poly(phi);
            for i in 0..HUMA_DIM {
                d[(i, f)] = dofs[i];
            }
        }
        let inv = d
            .clone()
            .try_inverse()
            .ok_or("singular Hu–Ma DOF matrix")?;
        let cond = norm1(&d) * norm1(&inv);
        if !cond.is_finite() || cond > MAX_CONDITION {
            return Err(format!("Hu–Ma DOF matrix condition estimate {cond:.3e}"));
        }
        el.basis = (0..HUMA_DIM)
            .map(|j| {
                let mut p = [[0.0; 10]; 6];
                for (f, phi) in spanning.iter().enumerate() {
                    let c = inv[(f, j)];
                    if c != 0.0 {
                        for k in 0..6 {
                            for m in 0..10 {
                                p[k][m] += c * phi[k][m];
                            }
                        }
                    }
                }
                p
            })
            .collect();
        Ok(el)
    }

    /// The 42 spanning functions, indexed `7 * edge + q`.
    pub fn spanning(&self) -> Vec<TensorPoly> {
        let mut out = Vec::with_capacity(HUMA_DIM);
        for e in 0..6 {
            let (i, j) = EDGES[e];
            let t = (self.geom.points[j] - self.geom.points[i]).normalize();
            let tt = SymTensor3::from_matrix(&(t * t.transpose()));
            for q in edge_polys(e) {
                out.push(std::array::from_fn(|k| q.map(|c| c * tt.0[k])));
            }
        }
        out
    }

    /// Global normal of face `i`.
    pub fn face_normal(&self, i: usize) -> Vector3<f64> {
        self.outward_normals[i] * self.normal_sign[i]
    }

    /// Tet barycentrics of the face point with face barycentrics `mu`.
    pub fn face_to_tet(&self, i: usize, mu: &[f64; 3]) -> [f64; 4] {
        let mut b = [0.0; 4];
        for (a, &v) in self.face_vertices[i].iter().enumerate() {
            b[v] = mu[a];
        }
        b
    }

    /// DOF values of an arbitrary field given in barycentric coordinates,
    /// using quadrature exact to `degree` on faces and `degree` in the cell.
    pub fn dofs_of<F: Fn(&[f64; 4]) -> SymTensor3>(&self, f: F, degree: usize) -> [f64; HUMA_DIM] {
        let mut out = [0.0; HUMA_DIM];
        let frule = triangle_rule(degree + 1).expect("face rule");
        for i in 0..4 {
            let n = self.face_normal(i);
            for (mu, w) in frule.iter() {
                let b = self.face_to_tet(i, mu);
                let tn = f(&b).to_matrix() * n;
                for a in 0..3 {
                    for c in 0..3 {
                        out[9 * i + 3 * a + c] += 2.0 * w * tn[c] * mu[a];
                    }
                }
            }
        }
        let trule = tet_rule(degree).expect("cell rule");
        for (b, w) in trule.iter() {
            let v = f(b);
            for m in 0..6 {
                out[36 + m] += 6.0 * w * v.0[m];
            }
        }
        out
    }

    fn dofs_of_poly(&self, p: &TensorPoly) -> [f64; HUMA_DIM] {
        self.dofs_of(|b| poly_value(p, b), 2)
    }

    pub fn value(&self, j: usize, b: &[f64; 4]) -> SymTensor3 {
        poly_value(&self.basis[j], b)
    }

    /// All basis values at one point.
    pub fn values(&self, b: &[f64; 4]) -> Vec<SymTensor3> {
        let m = monomial_values(b);
        self.basis
            .iter()
            .map(|p| {
                SymTensor3(std::array::from_fn(|k| {
                    p[k].iter().zip(&m).map(|(c, v)| c * v).sum()
                }))
            })
            .collect()
    }

    /// Row-wise divergence of basis function `j` at `b`.
    pub fn divergence(&self, j: usize, b: &[f64; 4]) -> Vector3<f64> {
        poly_divergence(&self.basis[j], &self.geom.grads, b)
    }

    pub fn divergences(&self, b: &[f64; 4]) -> Vec<Vector3<f64>> {
        self.basis
            .iter()
            .map(|p| poly_divergence(p, &self.geom.grads, b))
            .collect()
    }

    pub fn evaluate(&self, coeffs: &[f64], b: &[f64; 4]) -> SymTensor3 {
        let mut s = [0.0; 6];
        for (v, c) in self.values(b).iter().zip(coeffs) {
            for k in 0..6 {
                s[k] += c * v.0[k];
            }
        }
        SymTensor3(s)
    }

    /// `τ n` on local face `i` with the outward unit normal of this tet.
    pub fn traction(&self, coeffs: &[f64], face: usize, b: &[f64; 4]) -> Vector3<f64> {
        self.evaluate(coeffs, b).to_matrix() * self.outward_normals[face]
    }
}

/// Divergence of a tensor quadratic, given the barycentric gradients.
pub fn poly_divergence(p: &TensorPoly, grads: &[Vector3<f64>; 4], b: &[f64; 4]) -> Vector3<f64> {
    // ∂_c(λx λy) = λx ∂_c λy + λy ∂_c λx
    let mut dm = [Vector3::zeros(); 10];
    for (k, &(x, y)) in MONOS.iter().enumerate() {
        dm[k] = grads[y] * b[x] + grads[x] * b[y];
    }
    let mut out = Vector3::zeros();
    for r in 0..3 {
        for c in 0..3 {
            let k = comp_index(r, c);
            out[r] += p[k].iter().zip(&dm).map(|(coef, d)| coef * d[c]).sum::<f64>();
        }
    }
    out
}

fn norm1(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix3;

    fn sample() -> HuMaElement {
        HuMaElement::new(
            [
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.1, 0.1, -0.1),
                Point3::new(0.2, 0.9, 0.1),
                Point3::new(0.1, 0.3, 1.2),
            ],
            [10, 3, 7, 1],
            [1.0, -1.0, 1.0, -1.0],
        )
        .unwrap()
    }

    #[test]
    fn duality() {
        let el = sample();
        for j in 0..HUMA_DIM {
            let d = el.dofs_of(|b| el.value(j, b), 2);
            for (i, v) in d.iter().enumerate() {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((v - e).abs() < 1e-9, "dof {i} of basis {j}: {v}");
            }
        }
    }

    #[test]
    fn contains_linear_symmetric_fields() {
        let el = sample();
        let a = Matrix3::new(1.0, 0.2, -0.3, 0.2, 2.0, 0.5, -0.3, 0.5, -1.0);
        let bm = Matrix3::new(0.3, -1.0, 0.0, -1.0, 0.1, 0.7, 0.0, 0.7, 0.4);
        let field = |b: &[f64; 4]| {
            let x = el.geom.point(b);
            SymTensor3::from_matrix(&(a + bm * (x.x - 2.0 * x.z)))
        };
        let dofs = el.dofs_of(field, 2);
        for b in [[0.1, 0.2, 0.3, 0.4], [0.7, 0.1, 0.1, 0.1], [0.0, 0.5, 0.5, 0.0]] {
            let v = el.evaluate(&dofs, &b);
            let e = field(&b);
            for k in 0..6 {
                assert!((v.0[k] - e.0[k]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn identity_traction() {
        let el = sample();
        let dofs = el.dofs_of(|_| SymTensor3::identity(), 1);
        let t = el.traction(&dofs, 3, &[0.3, 0.3, 0.4, 0.0]);
        assert!((t - el.outward_normals[3]).norm() < 1e-11);
    }

    #[test]
    fn divergence_is_linear() {
        // A quadratic vector field is affine iff its second differences vanish.
        let el = sample();
        let pts = [[0.25; 4], [0.4, 0.2, 0.2, 0.2], [0.1, 0.5, 0.2, 0.2], [0.1, 0.2, 0.5, 0.2]];
        for j in 0..HUMA_DIM {
            let d: Vec<Vector3<f64>> = pts.iter().map(|b| el.divergence(j, b)).collect();
            let mid = [0.25, 0.35, 0.2, 0.2];
            let avg = (d[1] + d[2]) * 0.5;
            assert!((el.divergence(j, &mid) - avg).norm() < 1e-9 * (1.0 + avg.norm()));
        }
    }

    #[test]
    fn flat_tet_is_rejected() {
        let r = HuMaElement::new(
            [
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(0.0, 1.0, 0.0),
                Point3::new(1.0, 1.0, 1e-14),
            ],
            [0, 1, 2, 3],
            [1.0; 4],
        );
        assert!(r.is_err());
    }
}
