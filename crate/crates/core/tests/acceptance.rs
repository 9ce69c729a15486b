//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::{DMatrix, Point2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bodyplate::assembly::{project_to_vh, BodySpace, InterfaceOverlay};
use bodyplate::decomposition::{dd_solve, InterfaceProblem};
use bodyplate::elements::HUMA_DIM;
use bodyplate::mesh::{build_body_mesh, build_plate_mesh, Diagonal};
use bodyplate::quadrature::triangle_rule;
use bodyplate::solvers::solve_saddle_point;
use bodyplate::verification::infsup::{discrete_infsup_constant, discrete_infsup_constant_sparse};
use bodyplate::verification::norms::{equilibrium_defect, relative_combined_difference};
use bodyplate::verification::patch::run_patch_test;
use bodyplate::verification::study::solve_mixed;
use bodyplate::verification::{run_convergence_study, ManufacturedCase, MeshPair, Method, Settings, StudyConfig};
use bodyplate::Result;

type Outcome = Result<(bool, String)>;

const RATE_FLOORS: [(&str, f64); 5] =
    [("sigma_l2", 0.9), ("u_alpha_l2", 1.6), ("u_star_h1", 0.9), ("u3_h2", 0.9), ("u3_l2", 1.6)];

fn check_rates(method: Method, levels: usize, matching: bool, floors: &[(&str, f64)]) -> Outcome {
    let settings = Settings::default();
    let case = ManufacturedCase::benchmark(settings.params);
    let report = run_convergence_study(&StudyConfig { method, levels, matching, settings }, &case)?;
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, floor) in floors {
        let r = report.final_rate(name).unwrap_or(f64::NAN);
        ok &= r >= *floor;
        detail.push(format!("{name} {r:.2}>={floor}"));
    }
    // Errors must decrease monotonically over the levels.
    for k in 0..7 {
        ok &= report.rows.windows(2).all(|w| w[1].1.errors.values()[k] < w[0].1.errors.values()[k]);
    }
    let sigma: Vec<String> = report.rows.iter().map(|(_, o)| format!("{:.3e}", o.errors.sigma_l2)).collect();
    detail.push(format!("sigma errors [{}]", sigma.join(", ")));
    Ok((ok, detail.join("; ")))
}

fn matching_rates() -> Outcome {
    check_rates(Method::MixedNc, 3, true, &RATE_FLOORS)
}

fn non_matching_rates() -> Outcome {
    check_rates(Method::MixedNc, 4, false, &RATE_FLOORS)
}

fn displacement_rates() -> Outcome {
    check_rates(Method::Displacement, 3, true, &[("u_alpha_l2", 1.6), ("u3_h2", 0.9), ("u_star_h1", 0.9)])
}

fn domain_decomposition() -> Outcome {
    let settings = Settings::default();
    let case = ManufacturedCase::benchmark(settings.params);
    let mut iterations = Vec::new();
    let mut ok = true;
    let mut detail = Vec::new();
    for level in 1..=3 {
        let pair = MeshPair::for_level(level, true);
        let (_, mono, disc) = solve_mixed(pair, &settings, &case)?;
        let dd = dd_solve(&disc, &settings.params, &case, 1e-6, 200)?;
        let rel = relative_combined_difference(&disc.body, &disc.plate, &dd.fields, &mono, settings.degrees.error)?;
        ok &= dd.cg.iterations <= 7 && dd.cg.rho_avg <= 0.1 && rel <= 1e-5;
        iterations.push(dd.cg.iterations);
        detail.push(format!(
            "({},{}) it {} rho {:.4} diff {:.1e}",
            pair.body_n, pair.plate_n, dd.cg.iterations, dd.cg.rho_avg, rel
        ));
    }
    let spread = iterations.iter().max().unwrap() - iterations.iter().min().unwrap();
    ok &= spread <= 2;
    Ok((ok, detail.join("; ")))
}

fn patch_test() -> Outcome {
    let settings = Settings::default();
    let mut ok = true;
    let mut detail = Vec::new();
    for matching in [true, false] {
        let pair = MeshPair::for_level(1, matching);
        let out = run_patch_test(pair, &settings)?;
        ok &= out.sigma_error <= 1e-8;
        detail.push(format!("({},{}) sigma error {:.2e}", pair.body_n, pair.plate_n, out.sigma_error));
    }
    Ok((ok, detail.join("; ")))
}

/// Maximum over interior faces of the mismatch of the traction moments seen
/// from the two neighbours, relative to the largest moment.
fn face_moment_mismatch(body: &BodySpace, sigma: &[f64]) -> Result<f64> {
    let rule = triangle_rule(4)?;
    let topo = &body.stress.topo;
    let moments = |t: usize, i: usize| -> [f64; 9] {
        let el = &body.elements[t];
        let local: Vec<f64> = body.stress.tet_dofs[t].iter().map(|&g| sigma[g]).collect();
        let mut m = [0.0; 9];
        for (mu, w) in rule.iter() {
            let tr = el.traction(&local, i, &el.face_to_tet(i, mu));
            for a in 0..3 {
                for c in 0..3 {
                    m[3 * a + c] += 2.0 * el.face_areas[i] * w * mu[a] * tr[c];
                }
            }
        }
        m
    };
    let (mut worst, mut scale) = (0.0f64, 0.0f64);
    for (f, &(t1, t2)) in topo.face_tets.iter().enumerate() {
        let Some(t2) = t2 else { continue };
        let i1 = topo.tet_faces[t1].iter().position(|&g| g == f).unwrap();
        let i2 = topo.tet_faces[t2].iter().position(|&g| g == f).unwrap();
        let (m1, m2) = (moments(t1, i1), moments(t2, i2));
        for k in 0..9 {
            worst = worst.max((m1[k] + m2[k]).abs());
            scale = scale.max(m1[k].abs());
        }
    }
    Ok(worst / scale)
}

fn element_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut detail = Vec::new();

    let body = BodySpace::new(build_body_mesh(2)?)?;
    let mut duality = 0.0f64;
    let mut min_rank = usize::MAX;
    for el in &body.elements {
        let span = el.spanning();
        let m = DMatrix::from_fn(60, span.len(), |r, c| span[c][r / 10][r % 10]);
        let sv = m.singular_values();
        let rank = sv.iter().filter(|s| **s > 1e-10 * sv.max()).count();
        min_rank = min_rank.min(rank).min(el.basis.len());
        for j in 0..HUMA_DIM {
            let d = el.dofs_of(|b| el.value(j, b), 2);
            for (i, v) in d.iter().enumerate() {
                duality = duality.max((v - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
    }
    let ok_huma = min_rank == HUMA_DIM && duality <= 1e-9;
    detail.push(format!("Hu-Ma dim {min_rank}, duality {duality:.1e}"));

    let sigma: Vec<f64> = (0..body.n_sigma()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mismatch = face_moment_mismatch(&body, &sigma)?;
    let ok_faces = mismatch <= 1e-10;
    detail.push(format!("face moments {mismatch:.1e}"));

    let plate = bodyplate::assembly::PlateSpace::new(build_plate_mesh(8, Diagonal::Flipped)?)?;
    let c: [f64; 6] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
    let f = |p: &Point2<f64>| c[0] + c[1] * p.x + c[2] * p.y + c[3] * p.x * p.x + c[4] * p.x * p.y + c[5] * p.y * p.y;
    let g = |p: &Point2<f64>| Vector2::new(c[1] + 2.0 * c[3] * p.x + c[4] * p.y, c[2] + c[4] * p.x + 2.0 * c[5] * p.y);
    let mut morley = 0.0f64;
    for (t, el) in plate.morley.iter().enumerate() {
        let coeffs = el.interpolate(f, g);
        let pts = plate.mesh.triangle_points(t);
        for b in [[1.0 / 3.0; 3], [0.6, 0.3, 0.1], [0.05, 0.05, 0.9]] {
            let x = Point2::from(pts[0].coords * b[0] + pts[1].coords * b[1] + pts[2].coords * b[2]);
            morley = morley.max((el.evaluate(&coeffs, &x) - f(&x)).abs());
        }
    }
    let ok_morley = morley <= 1e-10;
    detail.push(format!("Morley P2 {morley:.1e}"));

    let mut area = 0.0f64;
    for matching in [true, false] {
        for level in 1..=4 {
            let pair = MeshPair::for_level(level, matching);
            let b = build_body_mesh(pair.body_n)?;
            let p = build_plate_mesh(pair.plate_n, pair.diagonal)?;
            let overlay = InterfaceOverlay::new(&b, &p, 6)?;
            let total: f64 = overlay.cells.iter().map(|c| c.area).sum();
            area = area.max((total - 1.0).abs());
            let mut per_tri = vec![0.0; p.triangles.len()];
            for cell in &overlay.cells {
                per_tri[cell.triangle] += cell.area;
            }
            for &t in &p.interface_region_triangles {
                let [a, b, c] = p.triangle_points(t);
                area = area.max((per_tri[t] - 0.5 * (b - a).perp(&(c - a)).abs()).abs());
            }
        }
    }
    let ok_area = area <= 1e-10;
    detail.push(format!("overlay area {area:.1e}"));

    Ok((ok_huma && ok_faces && ok_morley && ok_area, detail.join("; ")))
}

fn operator_suite() -> Outcome {
    let settings = Settings::default();
    let case = ManufacturedCase::benchmark(settings.params);
    let disc = MeshPair::for_level(2, true).discretization(&settings)?;
    let problem = InterfaceProblem::new(&disc, &settings.params, &case)?;
    let n = problem.n_interface();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut random = || -> Vec<f64> { (0..n).map(|_| rng.random_range(-1.0..1.0)).collect() };
    let mut asym = 0.0f64;
    let mut min_energy = f64::INFINITY;
    for _ in 0..50 {
        let (x, y) = (random(), random());
        let ax = problem.apply_operator(&x)?;
        let ay = problem.apply_operator(&y)?;
        let (a, b) = (problem.schur.inner(&ax, &y)?, problem.schur.inner(&x, &ay)?);
        asym = asym.max((a - b).abs() / a.abs().max(b.abs()));
        min_energy = min_energy.min(problem.schur.inner(&ax, &x)? / problem.schur.inner(&x, &x)?);
    }

    let (fields, _) = solve_saddle_point(&problem.blocks)?;
    let load = project_to_vh(&disc.body, |x| case.f_alpha(x), settings.degrees.volume)?;
    let defect = equilibrium_defect(&disc.body, &fields.sigma, &load, settings.degrees.error)?;

    let ok = asym <= 1e-9 && min_energy > 0.0 && defect <= 1e-8;
    Ok((ok, format!("U-asymmetry {asym:.1e}; min Rayleigh quotient {min_energy:.3e}; equilibrium {defect:.1e}")))
}

fn infsup() -> Outcome {
    let coarse = BodySpace::new(build_body_mesh(MeshPair::for_level(1, true).body_n)?)?;
    let fine = BodySpace::new(build_body_mesh(MeshPair::for_level(2, true).body_n)?)?;
    let dense = discrete_infsup_constant(&coarse)?;
    let c0 = discrete_infsup_constant_sparse(&coarse, 8, 1e-10, 500)?;
    let c1 = discrete_infsup_constant_sparse(&fine, 8, 1e-10, 500)?;
    let routes_agree = (dense - c0).abs() <= 1e-6 * dense;
    let ok = routes_agree && c1 > 0.0 && c1 > 0.8 * c0;
    Ok((ok, format!("beta {c0:.4} -> {c1:.4} (dense {dense:.4})")))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("mixed method, matching meshes: rates", matching_rates),
        ("mixed method, non-matching meshes: rates", non_matching_rates),
        ("displacement baseline: rates", displacement_rates),
        ("interface CG: iterations, contraction, reconstruction", domain_decomposition),
        ("patch test: constant stress reproduced", patch_test),
        ("element suite", element_suite),
        ("interface operator and equilibrium", operator_suite),
        ("inf-sup constant stable under refinement", infsup),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = match run() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!ok);
        println!(
            "{} [{}] {name}: {detail} ({:.1} s)",
            if ok { "PASS" } else { "FAIL" },
            k + 1,
            start.elapsed().as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
