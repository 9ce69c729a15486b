//! Interface triangulation of the body and its common refinement with the
//! plate mesh on `Γ`.

use nalgebra::Point2;

use crate::error::{Error, Result};
use crate::mesh::{FaceTag, TetMesh, TriMesh};
use crate::quadrature::triangle_rule;

/// Polygons with area at or below this are treated as exact touches.
pub const AREA_EPSILON: f64 = 1e-14;
pub const DEFAULT_OVERLAY_DEGREE: usize = 6;

/// Barycentric coordinates slightly outside `[0, 1]` by at most this are
/// clamped; anything further is an error.
const BARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct InterfaceFace {
    /// Index into `TetMesh::boundary_faces`.
    pub boundary_face: usize,
    pub owner: usize,
    /// Body vertex ids, ordered counter-clockwise in the `x1–x2` plane.
    pub vertices: [usize; 3],
    pub points: [Point2<f64>; 3],
}

#[derive(Debug, Clone)]
pub struct OverlayCell {
    /// Convex polygon, counter-clockwise.
    pub polygon: Vec<Point2<f64>>,
    /// Index into the interface face list.
    pub face: usize,
    /// Plate triangle id.
    pub triangle: usize,
    pub area: f64,
    pub quad_points: Vec<Point2<f64>>,
    /// Physical weights, summing to `area`.
    pub quad_weights: Vec<f64>,
}

pub fn extract_interface_triangulation(body: &TetMesh) -> Vec<InterfaceFace> {
    body.boundary_faces
        .iter()
        .enumerate()
        .filter(|(_, bf)| bf.tag == FaceTag::Interface)
        .map(|(i, bf)| {
            let mut vertices = bf.vertices;
            let mut points = vertices.map(|v| {
                let p = body.vertices[v];
                Point2::new(p.x, p.y)
            });
            if signed_area(&points) < 0.0 {
                vertices.swap(1, 2);
                points.swap(1, 2);
            }
            InterfaceFace {
                boundary_face: i,
                owner: bf.owner,
                vertices,
                points,
            }
        })
        .collect()
}

fn signed_area(t: &[Point2<f64>; 3]) -> f64 {
    0.5 * (t[1] - t[0]).perp(&(t[2] - t[0]))
}

fn polygon_area(poly: &[Point2<f64>]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| poly[i].coords.perp(&poly[(i + 1) % n].coords))
        .sum::<f64>()
        * 0.5
}

fn bbox(points: &[Point2<f64>]) -> [f64; 4] {
    points.iter().fold(
        [f64::MAX, f64::MAX, f64::MIN, f64::MIN],
        |[x0, y0, x1, y1], p| [x0.min(p.x), y0.min(p.y), x1.max(p.x), y1.max(p.y)],
    )
}

/// Clips `subject` against the counter-clockwise triangle `clip`.
fn clip_convex(subject: &[Point2<f64>], clip: &[Point2<f64>; 3]) -> Vec<Point2<f64>> {
    let mut out = subject.to_vec();
    for k in 0..3 {
        if out.is_empty() {
            break;
        }
        let a = clip[k];
        let b = clip[(k + 1) % 3];
        let edge = b - a;
        let side = |p: &Point2<f64>| edge.perp(&(p - a));
        let input = std::mem::take(&mut out);
        let m = input.len();
        for i in 0..m {
            let cur = input[i];
            let prev = input[(i + m - 1) % m];
            let sc = side(&cur);
            let sp = side(&prev);
            if sc >= 0.0 {
                if sp < 0.0 {
                    out.push(prev + (cur - prev) * (sp / (sp - sc)));
                }
                out.push(cur);
            } else if sp >= 0.0 {
                out.push(prev + (cur - prev) * (sp / (sp - sc)));
            }
        }
    }
    out
}

/// Common refinement of the interface faces and the plate triangles in
/// `closure(Γ)`, with a degree-`quad_degree` rule on each fan sub-triangle.
pub fn intersect_triangulations(
    faces: &[InterfaceFace],
    plate: &TriMesh,
    quad_degree: usize,
) -> Result<Vec<OverlayCell>> {
    let rule = triangle_rule(quad_degree)?;
    let tris: Vec<(usize, [Point2<f64>; 3], [f64; 4])> = plate
        .interface_region_triangles
        .iter()
        .map(|&t| {
            let mut pts = plate.triangle_points(t);
            if signed_area(&pts) < 0.0 {
                pts.swap(1, 2);
            }
            (t, pts, bbox(&pts))
        })
        .collect();
    let mut cells = Vec::new();
    let mut total = 0.0;
    for (fi, face) in faces.iter().enumerate() {
        let fb = bbox(&face.points);
        let mut local: Vec<OverlayCell> = Vec::new();
        for (t, pts, tb) in &tris {
            if tb[0] >= fb[2] || fb[0] >= tb[2] || tb[1] >= fb[3] || fb[1] >= tb[3] {
                continue;
            }
            let poly = clip_convex(&face.points, pts);
            if poly.len() < 3 {
                continue;
            }
            let area = polygon_area(&poly);
            if area <= AREA_EPSILON {
                continue;
            }
            let mut quad_points = Vec::new();
            let mut quad_weights = Vec::new();
            for k in 1..poly.len() - 1 {
                let tri = [poly[0], poly[k], poly[k + 1]];
                let sub = signed_area(&tri);
                if sub <= 0.0 {
                    continue;
                }
                for (b, w) in rule.iter() {
                    let p = tri[0].coords * b[0] + tri[1].coords * b[1] + tri[2].coords * b[2];
                    quad_points.push(Point2::from(p));
                    quad_weights.push(2.0 * sub * w);
                }
            }
            total += area;
            local.push(OverlayCell {
                polygon: poly,
                face: fi,
                triangle: *t,
                area,
                quad_points,
                quad_weights,
            });
        }
        local.sort_by_key(|c| c.triangle);
        cells.extend(local);
    }
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::OverlayArea { area: total });
    }
    Ok(cells)
}

/// Barycentric coordinates of `p` in triangle `t`.
pub fn barycentric(t: &[Point2<f64>; 3], p: &Point2<f64>) -> [f64; 3] {
    let d = signed_area(t);
    let l1 = signed_area(&[t[0], *p, t[2]]) / d;
    let l2 = signed_area(&[t[0], t[1], *p]) / d;
    [1.0 - l1 - l2, l1, l2]
}

fn checked_barycentric(t: &[Point2<f64>; 3], p: &Point2<f64>) -> Result<[f64; 3]> {
    let mut b = barycentric(t, p);
    if b.iter().any(|&v| v < -BARY_TOL || v > 1.0 + BARY_TOL) {
        return Err(Error::PointOutsideCell { x: p.x, y: p.y });
    }
    for v in &mut b {
        *v = v.clamp(0.0, 1.0);
    }
    let s: f64 = b.iter().sum();
    Ok(b.map(|v| v / s))
}

/// Barycentric coordinates of `point` in the parent face (ordered as
/// `InterfaceFace::vertices`) and in the parent plate triangle (ordered as
/// `TriMesh::triangles`).
pub fn map_to_parents(
    cell: &OverlayCell,
    faces: &[InterfaceFace],
    plate: &TriMesh,
    point: &Point2<f64>,
) -> Result<([f64; 3], [f64; 3])> {
    let face = &faces[cell.face];
    let bf = checked_barycentric(&face.points, point)?;
    let bt = checked_barycentric(&plate.triangle_points(cell.triangle), point)?;
    Ok((bf, bt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_body_mesh, build_plate_mesh, Diagonal};

    #[test]
    fn interface_face_counts() {
        let f = extract_interface_triangulation(&build_body_mesh(1).unwrap());
        assert_eq!(f.len(), 2);
        let area: f64 = f.iter().map(|f| signed_area(&f.points)).sum();
        assert!((area - 1.0).abs() < 1e-14);
        assert_eq!(extract_interface_triangulation(&build_body_mesh(2).unwrap()).len(), 8);
    }

    #[test]
    fn crossed_diagonals_give_four_quarters() {
        let sq = |flip: bool| -> [[Point2<f64>; 3]; 2] {
            let a = Point2::new(0.0, 0.0);
            let b = Point2::new(1.0, 0.0);
            let c = Point2::new(1.0, 1.0);
            let d = Point2::new(0.0, 1.0);
            if flip {
                [[a, b, d], [b, c, d]]
            } else {
                [[a, b, c], [a, c, d]]
            }
        };
        let mut areas = Vec::new();
        for s in sq(false) {
            for t in sq(true) {
                let p = clip_convex(&s, &t);
                if p.len() >= 3 {
                    let a = polygon_area(&p);
                    if a > AREA_EPSILON {
                        areas.push(a);
                    }
                }
            }
        }
        assert_eq!(areas.len(), 4);
        for a in areas {
            assert!((a - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn matching_overlay_is_the_face_list() {
        for n in [2, 4] {
            let body = build_body_mesh(n).unwrap();
            let plate = build_plate_mesh(2 * n, Diagonal::SameAsBody).unwrap();
            let faces = extract_interface_triangulation(&body);
            let cells = intersect_triangulations(&faces, &plate, 6).unwrap();
            assert_eq!(cells.len(), 2 * n * n);
            for c in &cells {
                assert!((c.area - signed_area(&faces[c.face].points)).abs() < 1e-15);
                let sum: f64 = c.quad_weights.iter().sum();
                assert!((sum - c.area).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn map_round_trip() {
        let body = build_body_mesh(2).unwrap();
        let plate = build_plate_mesh(4, Diagonal::SameAsBody).unwrap();
        let faces = extract_interface_triangulation(&body);
        let cells = intersect_triangulations(&faces, &plate, 2).unwrap();
        let c = &cells[0];
        let centroid = Point2::from(c.polygon.iter().map(|p| p.coords).sum::<nalgebra::Vector2<f64>>() / c.polygon.len() as f64);
        let (bf, bt) = map_to_parents(c, &faces, &plate, &centroid).unwrap();
        let fp = &faces[c.face].points;
        let back = fp[0].coords * bf[0] + fp[1].coords * bf[1] + fp[2].coords * bf[2];
        assert!((back - centroid.coords).norm() < 1e-12);
        let tp = plate.triangle_points(c.triangle);
        let back = tp[0].coords * bt[0] + tp[1].coords * bt[1] + tp[2].coords * bt[2];
        assert!((back - centroid.coords).norm() < 1e-12);
        let (bv, _) = map_to_parents(c, &faces, &plate, &fp[0]).unwrap();
        assert!((bv[0] - 1.0).abs() < 1e-12);
        assert!(map_to_parents(c, &faces, &plate, &Point2::new(5.0, 5.0)).is_err());
    }
}
