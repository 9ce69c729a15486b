//! Browser bindings: overlay geometry, a clamped plate under pressure, and
//! the interface CG history of the coupled benchmark.

use nalgebra::{Point2, Point3, Vector3};
use wasm_bindgen::prelude::*;

use bodyplate::assembly::{assemble_plate_load, assemble_plate_stiffness, Forcing, InterfaceOverlay, PlateSpace, Region};
use bodyplate::decomposition::dd_solve;
use bodyplate::materials::MaterialParams;
use bodyplate::mesh::{build_body_mesh, build_plate_mesh, Diagonal};
use bodyplate::solvers::solve_spd;
use bodyplate::verification::{ManufacturedCase, MeshPair, Settings};

const MAX_BODY_N: usize = 4;
const MAX_PLATE_N: usize = 64;

fn diagonal(flipped: bool) -> Diagonal {
    if flipped {
        Diagonal::Flipped
    } else {
        Diagonal::SameAsBody
    }
}

fn check_sizes(body_n: usize, plate_n: usize) -> bodyplate::Result<()> {
    if body_n > MAX_BODY_N || plate_n > MAX_PLATE_N {
        return Err(bodyplate::Error::MeshParameter(format!(
            "demo limits are body n <= {MAX_BODY_N} and plate n <= {MAX_PLATE_N}"
        )));
    }
    Ok(())
}

/// Overlay cells as flattened polygons: cell `i` owns the points
/// `coords[2 * offsets[i] .. 2 * offsets[i + 1]]`.
#[wasm_bindgen]
pub struct OverlayView {
    coords: Vec<f64>,
    offsets: Vec<u32>,
    faces: usize,
    total_area: f64,
}

#[wasm_bindgen]
impl OverlayView {
    #[wasm_bindgen(getter)]
    pub fn coords(&self) -> Vec<f64> {
        self.coords.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn offsets(&self) -> Vec<u32> {
        self.offsets.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn cells(&self) -> usize {
        self.offsets.len() - 1
    }

    #[wasm_bindgen(getter)]
    pub fn faces(&self) -> usize {
        self.faces
    }

    #[wasm_bindgen(getter, js_name = totalArea)]
    pub fn total_area(&self) -> f64 {
        self.total_area
    }
}

pub fn overlay_view(body_n: usize, plate_n: usize, flipped: bool) -> bodyplate::Result<OverlayView> {
    check_sizes(body_n, plate_n)?;
    let body = build_body_mesh(body_n)?;
    let plate = build_plate_mesh(plate_n, diagonal(flipped))?;
    let overlay = InterfaceOverlay::new(&body, &plate, 2)?;
    let mut coords = Vec::new();
    let mut offsets = vec![0u32];
    for cell in &overlay.cells {
        for p in &cell.polygon {
            coords.extend([p.x, p.y]);
        }
        offsets.push((coords.len() / 2) as u32);
    }
    Ok(OverlayView {
        coords,
        offsets,
        faces: overlay.faces.len(),
        total_area: overlay.cells.iter().map(|c| c.area).sum(),
    })
}

/// Common refinement of the body's interface faces and the plate mesh.
#[wasm_bindgen(js_name = overlayGeometry)]
pub fn overlay_geometry(body_n: usize, plate_n: usize, flipped: bool) -> Result<OverlayView, JsError> {
    overlay_view(body_n, plate_n, flipped).map_err(|e| JsError::new(&e.to_string()))
}

struct Pressure(f64);

impl Forcing for Pressure {
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

/// Vertex deflections of a clamped plate; vertices are listed row by row.
#[wasm_bindgen]
pub struct PlateView {
    n: usize,
    deflection: Vec<f64>,
    vertices: Vec<f64>,
}

#[wasm_bindgen]
impl PlateView {
    #[wasm_bindgen(getter)]
    pub fn n(&self) -> usize {
        self.n
    }

    #[wasm_bindgen(getter)]
    pub fn deflection(&self) -> Vec<f64> {
        self.deflection.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn vertices(&self) -> Vec<f64> {
        self.vertices.clone()
    }

    #[wasm_bindgen(getter, js_name = maxDeflection)]
    pub fn max_deflection(&self) -> f64 {
        self.deflection.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub fn plate_view(plate_n: usize, pressure: f64) -> bodyplate::Result<PlateView> {
    check_sizes(0, plate_n)?;
    let plate = PlateSpace::new(build_plate_mesh(plate_n, Diagonal::SameAsBody)?)?;
    let params = MaterialParams::benchmark();
    let (km, kb) = assemble_plate_stiffness(&plate, &params, Region::All);
    let load = assemble_plate_load(&plate, &Pressure(pressure), 4)?;
    let (w, _) = solve_spd(&km.add(&kb), &load)?;
    let deflection = plate.dofs.morley_vertex.iter().map(|d| d.map_or(0.0, |g| w[g])).collect();
    let vertices = plate.mesh.vertices.iter().flat_map(|p| [p.x, p.y]).collect();
    Ok(PlateView { n: plate_n, deflection, vertices })
}

/// Clamped plate on `(−1, 1)²` with unit flexural rigidity under a uniform
/// transverse load.
#[wasm_bindgen(js_name = clampedPlate)]
pub fn clamped_plate(plate_n: usize, pressure: f64) -> Result<PlateView, JsError> {
    plate_view(plate_n, pressure).map_err(|e| JsError::new(&e.to_string()))
}

pub fn cg_history(body_n: usize, plate_n: usize, flipped: bool, tol: f64) -> bodyplate::Result<Vec<f64>> {
    check_sizes(body_n, plate_n)?;
    let settings = Settings::default();
    let case = ManufacturedCase::benchmark(settings.params);
    let disc = MeshPair { body_n, plate_n, diagonal: diagonal(flipped) }.discretization(&settings)?;
    let out = dd_solve(&disc, &settings.params, &case, tol, settings.cg_max_it)?;
    Ok(out.cg.history)
}

/// Relative residuals of conjugate gradients on the interface problem.
#[wasm_bindgen(js_name = interfaceCgHistory)]
pub fn interface_cg_history(body_n: usize, plate_n: usize, flipped: bool, tol: f64) -> Result<Vec<f64>, JsError> {
    cg_history(body_n, plate_n, flipped, tol).map_err(|e| JsError::new(&e.to_string()))
}
