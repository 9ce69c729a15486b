use bodyplate::assembly::{project_to_vh, Discretization, SolutionFields};
use bodyplate::elements::lower_morley_to_p1;
use bodyplate::overlay::map_to_parents;
use bodyplate::verification::norms::equilibrium_defect;
use bodyplate::verification::study::solve_mixed;
use bodyplate::verification::{ManufacturedCase, MeshPair, Settings};

/// `‖u^α_h − Π u^β_h‖` on `Γ`, with the plate deflection lowered to P1.
fn junction_gap(disc: &Discretization, fields: &SolutionFields) -> f64 {
    let (body, plate, overlay) = (&disc.body, &disc.plate, &disc.overlay);
    let get = |d: Option<usize>| d.map_or(0.0, |g| fields.w[g]);
    let mut sum = 0.0;
    for cell in &overlay.cells {
        let face = &overlay.faces[cell.face];
        let coeffs: [f64; 12] = std::array::from_fn(|i| fields.u_alpha[body.disp.dof(face.owner, i)]);
        let m: [f64; 6] = plate.dofs.tri_membrane[cell.triangle].map(get);
        let w3 = lower_morley_to_p1(&plate.dofs.tri_morley[cell.triangle].map(get));
        for (p, &w) in cell.quad_points.iter().zip(&cell.quad_weights) {
            let (bf, bt) = map_to_parents(cell, &overlay.faces, &plate.mesh, p).unwrap();
            let u = body.elements[face.owner].geom.evaluate_vector(&coeffs, &overlay.tet_barycentric(cell.face, &bf));
            let v = [
                (0..3).map(|k| bt[k] * m[2 * k]).sum::<f64>(),
                (0..3).map(|k| bt[k] * m[2 * k + 1]).sum::<f64>(),
                (0..3).map(|k| bt[k] * w3[k]).sum::<f64>(),
            ];
            sum += w * (0..3).map(|c| (u[c] - v[c]).powi(2)).sum::<f64>();
        }
    }
    sum.sqrt()
}

#[test]
fn junction_gap_shrinks_under_refinement() {
    let settings = Settings::default();
    let case = ManufacturedCase::benchmark(settings.params);
    for matching in [true, false] {
        let gaps: Vec<f64> = (1..=3)
            .map(|level| {
                let (_, fields, disc) = solve_mixed(MeshPair::for_level(level, matching), &settings, &case).unwrap();
                junction_gap(&disc, &fields)
            })
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "matching {matching}: {gaps:?}");
    }
}

#[test]
fn discrete_equilibrium_holds_on_non_matching_meshes() {
    let settings = Settings::default();
    let case = ManufacturedCase::benchmark(settings.params);
    let (_, fields, disc) = solve_mixed(MeshPair::for_level(2, false), &settings, &case).unwrap();
    let load = project_to_vh(&disc.body, |x| case.f_alpha(x), settings.degrees.volume).unwrap();
    let defect = equilibrium_defect(&disc.body, &fields.sigma, &load, settings.degrees.error).unwrap();
    assert!(defect <= 1e-8, "{defect}");
}
