//! Body/plate splitting of the coupled mixed system and conjugate gradients
//! on the plate trace over the interface region.
//!
//! With `R` the restriction to interface plate DOFs, the body map
//! `E λ = R G σ(λ)` returns the traction load of the homogeneous body problem
//! driven by the trace `λ`, and `S λ* = −R K⁻¹ Rᵀ λ*` the interface trace of
//! the clamped plate under an interface load. The interface unknown is the
//! remainder trace, solving `(I − S E) x = S (R G σ̃ + E w̃_Γ)` where `σ̃` and
//! `w̃` come from the uncoupled solves.

use web_time::Instant;

use crate::assembly::{
    assemble_block_system, assemble_plate_stiffness, BlockSystem, Discretization, Forcing, MonolithicSystem, PlateSpace,
    Region, SolutionFields,
};
use crate::error::{Error, Result};
use crate::materials::MaterialParams;
use crate::mesh::in_closed_gamma;
use crate::solvers::{BlockLabels, SymmetricFactor, RESIDUAL_TOLERANCE};
use crate::sparse::{dot, SparseMatrix};

/// Plate DOFs attached to vertices and edges inside `closure(Γ)`.
#[derive(Debug, Clone)]
pub struct InterfaceDofSet {
    pub interface: Vec<usize>,
    pub complement: Vec<usize>,
    /// Position in `interface` of each plate DOF.
    position: Vec<Option<usize>>,
}

impl InterfaceDofSet {
    pub fn new(plate: &PlateSpace) -> Self {
        let mut flag = vec![false; plate.n_w()];
        let d = &plate.dofs;
        for (v, p) in plate.mesh.vertices.iter().enumerate() {
            if in_closed_gamma(p) {
                if let Some(m) = d.membrane[v] {
                    flag[m] = true;
                    flag[m + 1] = true;
                }
                if let Some(w) = d.morley_vertex[v] {
                    flag[w] = true;
                }
            }
        }
        for (e, [a, b]) in d.topo.edges.iter().enumerate() {
            let (pa, pb) = (plate.mesh.vertices[*a], plate.mesh.vertices[*b]);
            if in_closed_gamma(&pa) && in_closed_gamma(&pb) {
                if let Some(w) = d.morley_edge[e] {
                    flag[w] = true;
                }
            }
        }
        let interface: Vec<usize> = (0..flag.len()).filter(|&i| flag[i]).collect();
        let complement = (0..flag.len()).filter(|&i| !flag[i]).collect();
        let mut position = vec![None; flag.len()];
        for (k, &i) in interface.iter().enumerate() {
            position[i] = Some(k);
        }
        Self { interface, complement, position }
    }

    pub fn len(&self) -> usize {
        self.interface.len()
    }

    pub fn is_empty(&self) -> bool {
        self.interface.is_empty()
    }

    pub fn position(&self, plate_dof: usize) -> Option<usize> {
        self.position[plate_dof]
    }

    pub fn restrict(&self, w: &[f64]) -> Vec<f64> {
        self.interface.iter().map(|&i| w[i]).collect()
    }

    /// Zero extension to all plate DOFs.
    pub fn extend(&self, lambda: &[f64]) -> Vec<f64> {
        let mut w = vec![0.0; self.position.len()];
        for (&i, v) in self.interface.iter().zip(lambda) {
            w[i] = *v;
        }
        w
    }
}

/// What an interface vector represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    /// Plate coefficients on interface DOFs.
    Trace,
    /// Load-vector action on interface DOFs.
    Traction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceVector {
    pub values: Vec<f64>,
    pub role: Role,
}

impl InterfaceVector {
    pub fn trace(values: Vec<f64>) -> Self {
        Self { values, role: Role::Trace }
    }

    pub fn traction(values: Vec<f64>) -> Self {
        Self { values, role: Role::Traction }
    }
}

/// Energy of the discrete plate extension, `λᵀ (K_ΓΓ − K_ΓI K_II⁻¹ K_IΓ) μ`.
pub struct SchurProduct {
    k_gg: SparseMatrix,
    k_gi: SparseMatrix,
    k_ii: SymmetricFactor,
    pub region: Region,
}

impl SchurProduct {
    pub fn new(k: &SparseMatrix, dofs: &InterfaceDofSet, region: Region) -> Result<Self> {
        let n = k.nrows;
        let mut gmap = vec![None; n];
        let mut imap = vec![None; n];
        for (p, &i) in dofs.interface.iter().enumerate() {
            gmap[i] = Some(p);
        }
        for (p, &i) in dofs.complement.iter().enumerate() {
            imap[i] = Some(p);
        }
        let (ng, ni) = (dofs.interface.len(), dofs.complement.len());
        let k_ii = k.select(&imap, ni, &imap, ni);
        Ok(Self {
            k_gg: k.select(&gmap, ng, &gmap, ng),
            k_gi: k.select(&gmap, ng, &imap, ni),
            k_ii: SymmetricFactor::spd(&k_ii, BlockLabels(vec![(usize::MAX, "plate complement")]), RESIDUAL_TOLERANCE)
                .map_err(|e| Error::SingularFactorization { block: "plate complement".into(), detail: e.to_string() })?,
            region,
        })
    }

    /// Plate DOF values of the discrete extension of `λ` off the interface.
    pub fn extension(&self, lambda: &[f64]) -> Result<Vec<f64>> {
        let rhs: Vec<f64> = self.k_gi.mul_t_vec(lambda).iter().map(|v| -v).collect();
        Ok(self.k_ii.solve(&rhs)?.0)
    }

    /// `Σ λ`.
    pub fn apply(&self, lambda: &[f64]) -> Result<Vec<f64>> {
        let ext = self.extension(lambda)?;
        let mut out = self.k_gg.mul_vec(lambda);
        self.k_gi.mul_vec_add(&ext, 1.0, &mut out);
        Ok(out)
    }

    pub fn inner(&self, lambda: &[f64], mu: &[f64]) -> Result<f64> {
        Ok(dot(&self.apply(lambda)?, mu))
    }
}

/// `⟨λ, μ⟩_U`.
pub fn u_inner_product(schur: &SchurProduct, lambda: &InterfaceVector, mu: &InterfaceVector) -> Result<f64> {
    schur.inner(&lambda.values, &mu.values)
}

/// Outcome of the interface iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct CgResult {
    pub solution: Vec<f64>,
    pub iterations: usize,
    /// Relative residual in the `U` norm, starting with `1` at iteration 0.
    pub history: Vec<f64>,
    /// Relative Euclidean residual, for comparison.
    pub euclidean_history: Vec<f64>,
    pub rho_avg: f64,
}

/// Cached operators of the split problem.
pub struct InterfaceProblem<'a> {
    pub disc: &'a Discretization,
    pub blocks: BlockSystem,
    pub dofs: InterfaceDofSet,
    body_system: MonolithicSystem,
    body: SymmetricFactor,
    plate: SymmetricFactor,
    stiffness: SparseMatrix,
    pub schur: SchurProduct,
}

impl<'a> InterfaceProblem<'a> {
    pub fn new<F: Forcing + ?Sized>(disc: &'a Discretization, params: &MaterialParams, forcing: &F) -> Result<Self> {
        Self::with_region(disc, params, forcing, Region::All)
    }

    /// `region` selects the plate energy used for the `U` product.
    pub fn with_region<F: Forcing + ?Sized>(
        disc: &'a Discretization,
        params: &MaterialParams,
        forcing: &F,
        region: Region,
    ) -> Result<Self> {
        let blocks = assemble_block_system(disc, params, forcing)?;
        let dofs = InterfaceDofSet::new(&disc.plate);
        let body_system = blocks.body_only();
        let body = body_system.factorize(RESIDUAL_TOLERANCE)?;
        let stiffness = blocks.stiffness();
        let plate = SymmetricFactor::spd(&stiffness, BlockLabels(vec![(usize::MAX, "plate")]), RESIDUAL_TOLERANCE)?;
        let (km, kb) = assemble_plate_stiffness(&disc.plate, params, region);
        let schur = SchurProduct::new(&km.add(&kb), &dofs, region)?;
        Ok(Self { disc, blocks, dofs, body_system, body, plate, stiffness, schur })
    }

    pub fn n_interface(&self) -> usize {
        self.dofs.len()
    }

    /// Homogeneous body solve driven by plate coefficients `w` (all plate
    /// DOFs); returns full stress and body displacement vectors.
    fn body_response(&self, w: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let m = &self.body_system;
        let gt = self.blocks.g.mul_t_vec(w);
        let mut rhs = vec![0.0; m.matrix.nrows];
        for (k, &i) in m.free.iter().enumerate() {
            rhs[k] = gt[i];
        }
        let (x, _) = self.body.solve(&rhs)?;
        let mut sigma = vec![0.0; m.n_sigma];
        for (k, &i) in m.free.iter().enumerate() {
            sigma[i] = x[k];
        }
        Ok((sigma, x[m.n_free()..].to_vec()))
    }

    /// Plate solve `K w = load`.
    fn plate_response(&self, load: &[f64]) -> Result<Vec<f64>> {
        Ok(self.plate.solve(load)?.0)
    }

    fn e_raw(&self, lambda: &[f64]) -> Result<Vec<f64>> {
        let (sigma, _) = self.body_response(&self.dofs.extend(lambda))?;
        Ok(self.dofs.restrict(&self.blocks.g.mul_vec(&sigma)))
    }

    fn s_raw(&self, load: &[f64]) -> Result<Vec<f64>> {
        let w = self.plate_response(&self.dofs.extend(load))?;
        Ok(self.dofs.restrict(&w).iter().map(|v| -v).collect())
    }

    /// Discrete Dirichlet–Neumann map.
    pub fn op_e(&self, lambda: &InterfaceVector) -> Result<InterfaceVector> {
        debug_assert_eq!(lambda.role, Role::Trace);
        Ok(InterfaceVector::traction(self.e_raw(&lambda.values)?))
    }

    /// Discrete Neumann–Dirichlet map.
    pub fn op_s(&self, load: &InterfaceVector) -> Result<InterfaceVector> {
        debug_assert_eq!(load.role, Role::Traction);
        Ok(InterfaceVector::trace(self.s_raw(&load.values)?))
    }

    /// `(I − S E) λ`.
    pub fn apply_operator(&self, lambda: &[f64]) -> Result<Vec<f64>> {
        let se = self.s_raw(&self.e_raw(lambda)?)?;
        Ok(lambda.iter().zip(&se).map(|(a, b)| a - b).collect())
    }

    /// Uncoupled solves: the body with its own data and no interface
    /// coupling, the plate with its load.
    pub fn solve_reduced(&self) -> Result<SolutionFields> {
        let m = &self.body_system;
        let (x, _) = self.body.solve(&m.rhs)?;
        let body = m.split(&x);
        let w = self.plate_response(&self.blocks.f_w)?;
        Ok(SolutionFields { sigma: body.sigma, u_alpha: body.u_alpha, w })
    }

    /// Right-hand side `S (R G σ̃ + E w̃_Γ)`.
    pub fn interface_rhs(&self, reduced: &SolutionFields) -> Result<Vec<f64>> {
        let g_sigma = self.dofs.restrict(&self.blocks.g.mul_vec(&reduced.sigma));
        let e_w = self.e_raw(&self.dofs.restrict(&reduced.w))?;
        let load: Vec<f64> = g_sigma.iter().zip(&e_w).map(|(a, b)| a + b).collect();
        self.s_raw(&load)
    }

    /// Conjugate gradients in the `U` inner product.
    pub fn cg(&self, rhs: &[f64], tol: f64, max_it: usize) -> Result<CgResult> {
        let n = rhs.len();
        let mut x = vec![0.0; n];
        let mut r = rhs.to_vec();
        let mut sr = self.schur.apply(&r)?;
        let mut rr = dot(&r, &sr);
        let r0 = rr.sqrt();
        let e0 = dot(&r, &r).sqrt();
        if r0 == 0.0 {
            return Ok(CgResult {
                solution: x,
                iterations: 0,
                history: vec![0.0],
                euclidean_history: vec![0.0],
                rho_avg: 0.0,
            });
        }
        let mut history = vec![1.0];
        let mut euclidean_history = vec![1.0];
        let mut p = r.clone();
        let mut sp = sr.clone();
        for it in 1..=max_it {
            let q = self.apply_operator(&p)?;
            let alpha = rr / dot(&q, &sp);
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * q[i];
            }
            sr = self.schur.apply(&r)?;
            let rr_new = dot(&r, &sr);
            let rel = rr_new.max(0.0).sqrt() / r0;
            history.push(rel);
            euclidean_history.push(dot(&r, &r).sqrt() / e0);
            if rel <= tol {
                return Ok(CgResult {
                    solution: x,
                    iterations: it,
                    rho_avg: rel.powf(1.0 / it as f64),
                    history,
                    euclidean_history,
                });
            }
            let beta = rr_new / rr;
            rr = rr_new;
            for i in 0..n {
                p[i] = r[i] + beta * p[i];
                sp[i] = sr[i] + beta * sp[i];
            }
        }
        Err(Error::NoConvergence { iterations: max_it, last: *history.last().unwrap(), history })
    }

    /// Remainder solves for a given interface trace, summed with the
    /// reduced fields.
    pub fn reconstruct_full_solution(&self, trace: &[f64], reduced: &SolutionFields) -> Result<SolutionFields> {
        let red = reduced;
        let total_trace: Vec<f64> = self.dofs.restrict(&red.w).iter().zip(trace).map(|(a, b)| a + b).collect();
        let (sigma_bar, u_bar) = self.body_response(&self.dofs.extend(&total_trace))?;
        let sigma: Vec<f64> = red.sigma.iter().zip(&sigma_bar).map(|(a, b)| a + b).collect();
        let load: Vec<f64> = self.blocks.g.mul_vec(&sigma).iter().map(|v| -v).collect();
        let w_bar = self.plate_response(&load)?;
        Ok(SolutionFields {
            sigma,
            u_alpha: red.u_alpha.iter().zip(&u_bar).map(|(a, b)| a + b).collect(),
            w: red.w.iter().zip(&w_bar).map(|(a, b)| a + b).collect(),
        })
    }

    /// Plate stiffness over all free DOFs.
    pub fn plate_stiffness(&self) -> &SparseMatrix {
        &self.stiffness
    }
}

/// Summary of a complete decomposition solve.
#[derive(Debug, Clone)]
pub struct DdOutcome {
    pub fields: SolutionFields,
    pub cg: CgResult,
    pub n_interface: usize,
    pub seconds: f64,
}

/// Reduced solves, interface CG and reconstruction.
pub fn dd_solve<F: Forcing + ?Sized>(
    disc: &Discretization,
    params: &MaterialParams,
    forcing: &F,
    tol: f64,
    max_it: usize,
) -> Result<DdOutcome> {
    let start = Instant::now();
    let problem = InterfaceProblem::new(disc, params, forcing)?;
    let reduced = problem.solve_reduced()?;
    let rhs = problem.interface_rhs(&reduced)?;
    let cg = problem.cg(&rhs, tol, max_it)?;
    let fields = problem.reconstruct_full_solution(&cg.solution, &reduced)?;
    Ok(DdOutcome { fields, n_interface: problem.n_interface(), cg, seconds: start.elapsed().as_secs_f64() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::Degrees;
    use crate::mesh::{build_body_mesh, build_plate_mesh, Diagonal};
    use crate::solvers::solve_saddle_point;
    use crate::sparse::norm2;
    use crate::verification::ManufacturedCase;
    use nalgebra::DVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn disc() -> Discretization {
        Discretization::new(
            build_body_mesh(2).unwrap(),
            build_plate_mesh(4, Diagonal::SameAsBody).unwrap(),
            Degrees::default(),
        )
        .unwrap()
    }

    fn random(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    fn combo(a: f64, x: &[f64], b: f64, y: &[f64]) -> Vec<f64> {
        x.iter().zip(y).map(|(u, v)| a * u + b * v).collect()
    }

    fn rel_diff(x: &[f64], y: &[f64]) -> f64 {
        norm2(&combo(1.0, x, -1.0, y)) / norm2(y).max(f64::MIN_POSITIVE)
    }

    #[test]
    fn maps_are_linear_and_vanish_at_zero() {
        let d = disc();
        let p = MaterialParams::benchmark();
        let case = ManufacturedCase::benchmark(p);
        let prob = InterfaceProblem::new(&d, &p, &case).unwrap();
        let n = prob.n_interface();
        let zero = prob.op_e(&InterfaceVector::trace(vec![0.0; n])).unwrap();
        assert!(zero.values.iter().all(|v| *v == 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (x, y) = (random(&mut rng, n), random(&mut rng, n));
        let e = |v: &[f64]| prob.op_e(&InterfaceVector::trace(v.to_vec())).unwrap().values;
        let s = |v: &[f64]| prob.op_s(&InterfaceVector::traction(v.to_vec())).unwrap().values;
        assert!(rel_diff(&e(&combo(2.0, &x, -3.0, &y)), &combo(2.0, &e(&x), -3.0, &e(&y))) <= 1e-12);
        assert!(rel_diff(&s(&combo(0.5, &x, 4.0, &y)), &combo(0.5, &s(&x), 4.0, &s(&y))) <= 1e-12);
    }

    #[test]
    fn rigid_translation_produces_no_traction() {
        let d = disc();
        let p = MaterialParams::benchmark();
        let case = ManufacturedCase::benchmark(p);
        let prob = InterfaceProblem::new(&d, &p, &case).unwrap();
        let plate = &d.plate;
        let mut w = vec![0.0; plate.n_w()];
        for v in 0..plate.mesh.vertices.len() {
            if let Some(m) = plate.dofs.membrane[v] {
                w[m] = 0.3;
                w[m + 1] = -0.7;
            }
            if let Some(k) = plate.dofs.morley_vertex[v] {
                w[k] = 1.1;
            }
        }
        let e = prob.op_e(&InterfaceVector::trace(prob.dofs.restrict(&w))).unwrap();
        assert!(norm2(&e.values) <= 1e-9, "{}", norm2(&e.values));
    }

    #[test]
    fn extension_matches_dense_solve() {
        let d = disc();
        let p = MaterialParams::benchmark();
        let case = ManufacturedCase::benchmark(p);
        let prob = InterfaceProblem::new(&d, &p, &case).unwrap();
        let k = prob.plate_stiffness().to_dense();
        let dofs = &prob.dofs;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let lambda = random(&mut rng, dofs.len());
        let (ni, ng) = (dofs.complement.len(), dofs.len());
        let kii = nalgebra::DMatrix::from_fn(ni, ni, |a, b| k[(dofs.complement[a], dofs.complement[b])]);
        let kig = nalgebra::DMatrix::from_fn(ni, ng, |a, b| k[(dofs.complement[a], dofs.interface[b])]);
        let direct = kii.cholesky().unwrap().solve(&(-kig * DVector::from_column_slice(&lambda)));
        let ext = prob.schur.extension(&lambda).unwrap();
        assert!(rel_diff(&ext, direct.as_slice()) <= 1e-10);
    }

    #[test]
    fn operator_is_u_symmetric_and_positive() {
        let d = disc();
        let p = MaterialParams::benchmark();
        let case = ManufacturedCase::benchmark(p);
        let prob = InterfaceProblem::new(&d, &p, &case).unwrap();
        let n = prob.n_interface();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let (x, y) = (random(&mut rng, n), random(&mut rng, n));
            let a = prob.schur.inner(&prob.apply_operator(&x).unwrap(), &y).unwrap();
            let b = prob.schur.inner(&x, &prob.apply_operator(&y).unwrap()).unwrap();
            assert!((a - b).abs() <= 1e-9 * a.abs().max(b.abs()), "{a} {b}");
            assert!(prob.schur.inner(&prob.apply_operator(&x).unwrap(), &x).unwrap() > 0.0);
        }
    }

    #[test]
    fn monolithic_trace_solves_the_interface_equation() {
        let d = disc();
        let p = MaterialParams::benchmark();
        let case = ManufacturedCase::benchmark(p);
        let prob = InterfaceProblem::new(&d, &p, &case).unwrap();
        let (mono, _) = solve_saddle_point(&prob.blocks).unwrap();
        let reduced = prob.solve_reduced().unwrap();
        let rhs = prob.interface_rhs(&reduced).unwrap();
        let x = combo(1.0, &prob.dofs.restrict(&mono.w), -1.0, &prob.dofs.restrict(&reduced.w));
        assert!(rel_diff(&prob.apply_operator(&x).unwrap(), &rhs) <= 1e-8);
        let full = prob.reconstruct_full_solution(&x, &reduced).unwrap();
        assert!(rel_diff(&full.sigma, &mono.sigma) <= 1e-8);
        assert!(rel_diff(&full.u_alpha, &mono.u_alpha) <= 1e-8);
        assert!(rel_diff(&full.w, &mono.w) <= 1e-8);
    }

    #[test]
    fn tight_cg_reproduces_the_monolithic_solution() {
        let d = disc();
        let p = MaterialParams::benchmark();
        let case = ManufacturedCase::benchmark(p);
        let out = dd_solve(&d, &p, &case, 1e-12, 100).unwrap();
        let blocks = assemble_block_system(&d, &p, &case).unwrap();
        let (mono, _) = solve_saddle_point(&blocks).unwrap();
        assert!(rel_diff(&out.fields.sigma, &mono.sigma) <= 1e-8);
        assert!(rel_diff(&out.fields.w, &mono.w) <= 1e-8);
        assert_eq!(out.cg.history.len(), out.cg.iterations + 1);
    }

    #[test]
    fn zero_rhs_needs_no_iterations() {
        let d = disc();
        let p = MaterialParams::benchmark();
        let case = ManufacturedCase::benchmark(p);
        let prob = InterfaceProblem::new(&d, &p, &case).unwrap();
        let r = prob.cg(&vec![0.0; prob.n_interface()], 1e-6, 10).unwrap();
        assert_eq!(r.iterations, 0);
        assert!(r.solution.iter().all(|v| *v == 0.0));
    }
}
