//! Sparse direct solvers: a sign-guided LDLᵀ for the saddle-point system and
//! a Cholesky factorization for SPD systems, both followed by iterative
//! refinement against the unmodified matrix.

use web_time::Instant;

use faer::dyn_stack::{MemBuffer, MemStack, StackReq};
use faer::linalg::cholesky::ldlt::factor::{LdltError, LdltParams, LdltRegularization};
use faer::linalg::cholesky::llt::factor::{LltError, LltParams, LltRegularization};
use faer::sparse::linalg::cholesky::{
    factorize_symbolic_cholesky, supernodal::SupernodalLdltRef, CholeskySymbolicParams, LdltRef, LltRef,
    SymbolicCholesky, SymbolicCholeskyRaw, SymmetricOrdering,
};
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::{Conj, MatMut, Par, Side, Spec};

use crate::assembly::{BlockSystem, MonolithicSystem, SolutionFields};
use crate::error::{Error, Result};
use crate::sparse::{norm2, SparseMatrix};

/// Default relative residual contract.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

const MAX_REFINEMENT: usize = 40;
/// Static shift on rows with an empty diagonal, relative to the equilibrated
/// matrix.
const STATIC_SHIFT: f64 = 1e-10;
/// Pivots below `DYNAMIC_EPSILON` or of the wrong sign are replaced by
/// `±DYNAMIC_DELTA`; refinement absorbs the perturbation.
const DYNAMIC_EPSILON: f64 = 1e-13;
const DYNAMIC_DELTA: f64 = 1e-9;

/// Signature of a symmetric factorization: counts of positive, negative and
/// zero pivots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub relative_residual: f64,
    pub refinement_steps: usize,
    /// Pivot signature of the factorized (shifted) matrix, if available.
    pub inertia: Option<Inertia>,
    pub seconds: f64,
}

/// Named contiguous row ranges used to report where a factorization broke.
#[derive(Debug, Clone)]
pub struct BlockLabels(pub Vec<(usize, &'static str)>);

impl BlockLabels {
    fn name(&self, row: usize) -> &'static str {
        self.0.iter().find(|(end, _)| row < *end).map_or("unknown", |(_, n)| n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Ldlt,
    Llt,
}

/// A cached factorization of a symmetric sparse matrix.
pub struct SymmetricFactor {
    matrix: SparseMatrix,
    scaling: Vec<f64>,
    symbolic: SymbolicCholesky<usize>,
    values: Vec<f64>,
    kind: Kind,
    inertia: Option<Inertia>,
    tolerance: f64,
    labels: BlockLabels,
}

/// Ruiz equilibration: `D M D` with unit row maxima after a few sweeps.
fn equilibrate(m: &SparseMatrix) -> Vec<f64> {
    let n = m.nrows;
    let mut d = vec![1.0; n];
    for _ in 0..6 {
        let mut r = vec![0.0f64; n];
        for (i, j, v) in m.iter() {
            r[i] = r[i].max((d[i] * v * d[j]).abs());
        }
        for i in 0..n {
            if r[i] > 0.0 {
                d[i] /= r[i].sqrt();
            }
        }
    }
    d
}

struct Csc {
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

/// Scaled copy of the lower triangle (diagonal always present) in CSC form;
/// `shift[i]` is added to the diagonal.
fn scaled_lower(m: &SparseMatrix, d: &[f64], shift: &[f64]) -> Csc {
    // Row `i` of the upper triangle of a symmetric CSR equals column `i` of
    // the lower triangle in CSC.
    let n = m.nrows;
    let mut col_ptr = Vec::with_capacity(n + 1);
    let mut row_idx = Vec::new();
    let mut values = Vec::new();
    col_ptr.push(0);
    for i in 0..n {
        let mut diag = shift[i];
        let mut rest = Vec::new();
        for (j, v) in m.row(i) {
            if j == i {
                diag += d[i] * v * d[i];
            } else if j > i {
                rest.push((j, d[i] * v * d[j]));
            }
        }
        row_idx.push(i);
        values.push(diag);
        for (j, v) in rest {
            row_idx.push(j);
            values.push(v);
        }
        col_ptr.push(row_idx.len());
    }
    Csc { col_ptr, row_idx, values }
}

fn diagonal_of_ldlt(symbolic: &SymbolicCholesky<usize>, values: &[f64]) -> Vec<f64> {
    match symbolic.raw() {
        SymbolicCholeskyRaw::Simplicial(s) => {
            let cp = s.col_ptr();
            (0..s.nrows()).map(|j| values[cp[j]]).collect()
        }
        SymbolicCholeskyRaw::Supernodal(s) => {
            let l = SupernodalLdltRef::new(s, values);
            let mut d = Vec::with_capacity(s.nrows());
            for k in 0..s.n_supernodes() {
                let v = l.supernode(k).val();
                for c in 0..v.ncols() {
                    d.push(v[(c, c)]);
                }
            }
            d
        }
    }
}

/// Original row of a failed pivot. The simplicial kernel reports one-based
/// positions, the supernodal one zero-based.
fn pivot_row(symbolic: &SymbolicCholesky<usize>, perm_fwd: &[usize], index: usize) -> usize {
    let k = match symbolic.raw() {
        SymbolicCholeskyRaw::Simplicial(_) => index.saturating_sub(1),
        SymbolicCholeskyRaw::Supernodal(_) => index,
    };
    perm_fwd[k.min(perm_fwd.len() - 1)]
}

impl SymmetricFactor {
    /// LDLᵀ of a symmetric quasi-definite-like matrix. `signs[i]` is the
    /// expected pivot sign of row `i`.
    pub fn indefinite(matrix: &SparseMatrix, signs: &[i8], labels: BlockLabels, tolerance: f64) -> Result<Self> {
        let n = matrix.nrows;
        let scaling = equilibrate(matrix);
        let mut shift = vec![0.0; n];
        for i in 0..n {
            if matrix.get(i, i) == 0.0 {
                shift[i] = f64::from(signs[i]) * STATIC_SHIFT;
            }
        }
        let csc = scaled_lower(matrix, &scaling, &shift);
        let symbolic = symbolic_of(n, &csc)?;
        let a = SparseColMatRef::new(
            SymbolicSparseColMatRef::new_checked(n, n, &csc.col_ptr, None, &csc.row_idx),
            &csc.values,
        );
        let mut values = vec![0.0; symbolic.len_val()];
        let req = symbolic.factorize_numeric_ldlt_scratch::<f64>(Par::Seq, Spec::<LdltParams, f64>::default());
        let mut buf = MemBuffer::new(req);
        let perm_fwd: Vec<usize> = match symbolic.perm() {
            Some(p) => p.arrays().0.to_vec(),
            None => (0..n).collect(),
        };
        let reg = LdltRegularization {
            dynamic_regularization_signs: Some(signs),
            dynamic_regularization_delta: DYNAMIC_DELTA,
            dynamic_regularization_epsilon: DYNAMIC_EPSILON,
        };
        match symbolic.factorize_numeric_ldlt(
            &mut values,
            a,
            Side::Lower,
            reg,
            Par::Seq,
            MemStack::new(&mut buf),
            Spec::<LdltParams, f64>::default(),
        ) {
            Ok(_) => {}
            Err(LdltError::ZeroPivot { index }) => {
                let row = pivot_row(&symbolic, &perm_fwd, index);
                return Err(Error::SingularFactorization {
                    block: labels.name(row).to_string(),
                    detail: format!("zero pivot at row {row}"),
                });
            }
        }
        let d = diagonal_of_ldlt(&symbolic, &values);
        let mut inertia = Inertia::default();
        for &v in &d {
            if v > 0.0 {
                inertia.positive += 1;
            } else if v < 0.0 {
                inertia.negative += 1;
            } else {
                inertia.zero += 1;
            }
        }
        Ok(Self {
            matrix: matrix.clone(),
            scaling,
            symbolic,
            values,
            kind: Kind::Ldlt,
            inertia: Some(inertia),
            tolerance,
            labels,
        })
    }

    /// Cholesky factorization; fails with [`Error::NotSpd`] on a
    /// non-positive pivot.
    pub fn spd(matrix: &SparseMatrix, labels: BlockLabels, tolerance: f64) -> Result<Self> {
        let n = matrix.nrows;
        let scaling = equilibrate(matrix);
        let csc = scaled_lower(matrix, &scaling, &vec![0.0; n]);
        let symbolic = symbolic_of(n, &csc)?;
        let a = SparseColMatRef::new(
            SymbolicSparseColMatRef::new_checked(n, n, &csc.col_ptr, None, &csc.row_idx),
            &csc.values,
        );
        let mut values = vec![0.0; symbolic.len_val()];
        let req = symbolic.factorize_numeric_llt_scratch::<f64>(Par::Seq, Spec::<LltParams, f64>::default());
        let mut buf = MemBuffer::new(req);
        let perm_fwd: Vec<usize> = match symbolic.perm() {
            Some(p) => p.arrays().0.to_vec(),
            None => (0..n).collect(),
        };
        let res = symbolic.factorize_numeric_llt(
            &mut values,
            a,
            Side::Lower,
            LltRegularization::default(),
            Par::Seq,
            MemStack::new(&mut buf),
            Spec::<LltParams, f64>::default(),
        );
        if let Err(e) = res {
            let LltError::NonPositivePivot { index } = e;
            let row = pivot_row(&symbolic, &perm_fwd, index);
            return Err(Error::NotSpd(format!("non-positive pivot at row {row} ({})", labels.name(row))));
        }
        Ok(Self {
            matrix: matrix.clone(),
            scaling,
            symbolic,
            values,
            kind: Kind::Llt,
            inertia: Some(Inertia { positive: n, negative: 0, zero: 0 }),
            tolerance,
            labels,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows
    }

    pub fn inertia(&self) -> Option<Inertia> {
        self.inertia
    }

    /// One application of the factorized (scaled, shifted) inverse.
    fn apply_inverse(&self, r: &[f64], stack_buf: &mut MemBuffer) -> Vec<f64> {
        let n = self.dim();
        let mut y: Vec<f64> = r.iter().zip(&self.scaling).map(|(v, d)| v * d).collect();
        let rhs = MatMut::from_column_major_slice_mut(&mut y, n, 1);
        let stack = MemStack::new(stack_buf);
        match self.kind {
            Kind::Ldlt => LdltRef::new(&self.symbolic, &self.values).solve_in_place_with_conj(Conj::No, rhs, Par::Seq, stack),
            Kind::Llt => LltRef::new(&self.symbolic, &self.values).solve_in_place_with_conj(Conj::No, rhs, Par::Seq, stack),
        }
        y.iter_mut().zip(&self.scaling).for_each(|(v, d)| *v *= d);
        y
    }

    /// Solves `M x = b` with refinement until `‖b − Mx‖ ≤ tol ‖b‖`.
    pub fn solve(&self, b: &[f64]) -> Result<(Vec<f64>, SolveReport)> {
        let start = Instant::now();
        let n = self.dim();
        let bn = norm2(b);
        if bn == 0.0 {
            return Ok((
                vec![0.0; n],
                SolveReport { relative_residual: 0.0, refinement_steps: 0, inertia: self.inertia, seconds: 0.0 },
            ));
        }
        let req = StackReq::any_of(&[self.symbolic.solve_in_place_scratch::<f64>(1, Par::Seq)]);
        let mut buf = MemBuffer::new(req);
        let mut x = vec![0.0; n];
        let mut r = b.to_vec();
        let mut rel = 1.0;
        let mut steps = 0;
        // Refine to rounding level; stop once a step no longer halves the
        // residual below the contract.
        let mut best = (f64::INFINITY, x.clone());
        while steps < MAX_REFINEMENT {
            let dx = self.apply_inverse(&r, &mut buf);
            x.iter_mut().zip(&dx).for_each(|(a, d)| *a += d);
            r.copy_from_slice(b);
            self.matrix.mul_vec_add(&x, -1.0, &mut r);
            steps += 1;
            let new = norm2(&r) / bn;
            if new < best.0 {
                best = (new, x.clone());
            }
            let stagnated = new > 0.5 * rel && best.0 <= self.tolerance;
            rel = new;
            if rel <= 4.0 * f64::EPSILON || stagnated {
                break;
            }
        }
        let (rel, x) = best;
        if !(rel <= self.tolerance) {
            if self.kind == Kind::Ldlt && rel > 0.5 {
                let worst = (0..n).max_by(|&i, &j| r[i].abs().total_cmp(&r[j].abs())).unwrap_or(0);
                return Err(Error::SingularFactorization {
                    block: self.labels.name(worst).to_string(),
                    detail: format!("refinement diverged, relative residual {rel:.3e}"),
                });
            }
            return Err(Error::Residual { residual: rel, tolerance: self.tolerance });
        }
        Ok((
            x,
            SolveReport {
                relative_residual: rel,
                refinement_steps: steps,
                inertia: self.inertia,
                seconds: start.elapsed().as_secs_f64(),
            },
        ))
    }
}

fn symbolic_of(n: usize, csc: &Csc) -> Result<SymbolicCholesky<usize>> {
    let s = SymbolicSparseColMatRef::new_checked(n, n, &csc.col_ptr, None, &csc.row_idx);
    factorize_symbolic_cholesky(s, Side::Lower, SymmetricOrdering::Amd, CholeskySymbolicParams::default()).map_err(|e| {
        Error::SingularFactorization { block: "symbolic".into(), detail: format!("{e:?}") }
    })
}

impl MonolithicSystem {
    pub fn labels(&self) -> BlockLabels {
        let nf = self.n_free();
        BlockLabels(vec![(nf, "stress"), (nf + self.n_v, "body displacement"), (usize::MAX, "plate")])
    }

    pub fn factorize(&self, tolerance: f64) -> Result<SymmetricFactor> {
        SymmetricFactor::indefinite(&self.matrix, &self.signs, self.labels(), tolerance)
    }
}

/// Direct solve of the coupled saddle-point system.
pub fn solve_saddle_point(system: &BlockSystem) -> Result<(SolutionFields, SolveReport)> {
    solve_monolithic(&system.monolithic(), RESIDUAL_TOLERANCE)
}

pub fn solve_monolithic(m: &MonolithicSystem, tolerance: f64) -> Result<(SolutionFields, SolveReport)> {
    let start = Instant::now();
    if norm2(&m.rhs) == 0.0 {
        let x = vec![0.0; m.matrix.nrows];
        return Ok((
            m.split(&x),
            SolveReport { relative_residual: 0.0, refinement_steps: 0, inertia: None, seconds: 0.0 },
        ));
    }
    let f = m.factorize(tolerance)?;
    let (x, mut report) = f.solve(&m.rhs)?;
    report.seconds = start.elapsed().as_secs_f64();
    Ok((m.split(&x), report))
}

/// Direct solve of an SPD system.
pub fn solve_spd(matrix: &SparseMatrix, rhs: &[f64]) -> Result<(Vec<f64>, SolveReport)> {
    let start = Instant::now();
    if norm2(rhs) == 0.0 {
        return Ok((
            vec![0.0; matrix.nrows],
            SolveReport { relative_residual: 0.0, refinement_steps: 0, inertia: None, seconds: 0.0 },
        ));
    }
    let f = SymmetricFactor::spd(matrix, BlockLabels(vec![(usize::MAX, "matrix")]), RESIDUAL_TOLERANCE)?;
    let (x, mut report) = f.solve(rhs)?;
    report.seconds = start.elapsed().as_secs_f64();
    Ok((x, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble_block_system, assemble_plate_load, Discretization, Degrees, Forcing, ZeroForcing};
    use crate::mesh::{build_body_mesh, build_plate_mesh, Diagonal};
    use nalgebra::{DMatrix, DVector, Point2, Point3, Vector3};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small_disc() -> Discretization {
        Discretization::new(
            build_body_mesh(1).unwrap(),
            build_plate_mesh(4, Diagonal::SameAsBody).unwrap(),
            Degrees::default(),
        )
        .unwrap()
    }

    #[test]
    fn identity_returns_rhs() {
        let b: Vec<f64> = (0..7).map(|i| i as f64 - 2.5).collect();
        let (x, report) = solve_spd(&SparseMatrix::identity(7), &b).unwrap();
        assert_eq!(x, b);
        assert!(report.relative_residual <= 1e-15);
    }

    #[test]
    fn random_spd_matches_dense_cholesky() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 50;
        let m = DMatrix::from_fn(n, n, |_, _| if rng.random::<f64>() < 0.2 { rng.random_range(-1.0..1.0) } else { 0.0 });
        let a = m.transpose() * &m + DMatrix::identity(n, n) * 0.5;
        let b = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let dense = a.clone().cholesky().unwrap().solve(&b);
        let (x, _) = solve_spd(&SparseMatrix::from_dense(&a), b.as_slice()).unwrap();
        let err = (DVector::from_vec(x) - &dense).norm() / dense.norm();
        assert!(err <= 1e-10, "{err}");
    }

    #[test]
    fn indefinite_matches_dense_lu() {
        // [[2, 1], [1, 0]] needs the shifted zero pivot.
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 0.5, 1.0, 0.5, 3.0, 0.0, 1.0, 0.0, 0.0]);
        let f = SymmetricFactor::indefinite(&SparseMatrix::from_dense(&a), &[1, 1, -1], BlockLabels(vec![]), 1e-12).unwrap();
        assert_eq!(f.inertia(), Some(Inertia { positive: 2, negative: 1, zero: 0 }));
        let b = [1.0, -2.0, 0.5];
        let (x, _) = f.solve(&b).unwrap();
        let dense = a.lu().solve(&DVector::from_row_slice(&b)).unwrap();
        for i in 0..3 {
            assert!((x[i] - dense[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_rhs_gives_zero_solution() {
        let disc = small_disc();
        let bs = assemble_block_system(&disc, &crate::materials::MaterialParams::benchmark(), &ZeroForcing).unwrap();
        let (fields, report) = solve_saddle_point(&bs).unwrap();
        assert!(fields.sigma.iter().chain(&fields.u_alpha).chain(&fields.w).all(|v| *v == 0.0));
        assert_eq!(report.relative_residual, 0.0);
    }

    #[test]
    fn saddle_point_inertia_follows_block_signs() {
        let disc = small_disc();
        let bs = assemble_block_system(&disc, &crate::materials::MaterialParams::benchmark(), &ZeroForcing).unwrap();
        let m = bs.monolithic();
        let inertia = m.factorize(RESIDUAL_TOLERANCE).unwrap().inertia().unwrap();
        assert_eq!(inertia.positive, m.n_free());
        assert_eq!(inertia.negative, m.n_v + m.n_w);
        assert_eq!(inertia.zero, 0);
    }

    #[test]
    fn indefinite_matrix_is_rejected_as_spd() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        let e = SymmetricFactor::spd(&SparseMatrix::from_dense(&a), BlockLabels(vec![]), 1e-10).err().unwrap();
        assert!(matches!(e, Error::NotSpd(_)));
    }

    struct Uplift(f64);

    impl Forcing for Uplift {
        fn body_load(&self, _: &Point3<f64>) -> Vector3<f64> {
            Vector3::zeros()
        }
        fn traction(&self, _: &Point3<f64>, _: &Vector3<f64>) -> Vector3<f64> {
            Vector3::zeros()
        }
        fn plate_load_smooth(&self, _: &Point2<f64>) -> Vector3<f64> {
            Vector3::new(0.0, 0.0, self.0)
        }
        fn plate_load_jump(&self, _: &Point2<f64>) -> Vector3<f64> {
            Vector3::zeros()
        }
    }

    #[test]
    fn clamped_plate_deflects_with_the_load() {
        let disc = small_disc();
        let bs = assemble_block_system(&disc, &crate::materials::MaterialParams::benchmark(), &ZeroForcing).unwrap();
        let load = assemble_plate_load(&disc.plate, &Uplift(2.0), 6).unwrap();
        let (w, report) = solve_spd(&bs.stiffness(), &load).unwrap();
        assert!(report.relative_residual <= RESIDUAL_TOLERANCE);
        let centre = disc.plate.mesh.vertices.iter().position(|p| p.coords.norm() < 1e-12).unwrap();
        let d = disc.plate.dofs.morley_vertex[centre].unwrap();
        assert!(w[d] > 0.0);
        let m = disc.plate.dofs.membrane[centre].unwrap();
        assert!(w[m].abs() < 1e-12 && w[m + 1].abs() < 1e-12);
    }
}
