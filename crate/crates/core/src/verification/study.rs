//! Single solves and convergence studies on the benchmark problem.

use std::fmt::Write as _;
use std::str::FromStr;
use web_time::Instant;

use nalgebra::Matrix3;

use super::norms::{body_displacement_l2, compute_error_norms, plate_errors, ErrorNorms};
use super::{ManufacturedCase, Settings};
use crate::assembly::{
    assemble_block_system, assemble_displacement_system, BodySpace, Discretization, PlateSpace, SolutionFields,
};
use crate::error::{Error, Result};
use crate::materials::{c0_apply, SymTensor3};
use crate::mesh::{build_body_mesh, build_plate_mesh, Diagonal};
use crate::quadrature::tet_rule;
use crate::solvers::{solve_monolithic, BlockLabels, SymmetricFactor};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Hu–Ma stresses with Morley bending, coupled through the lowering.
    MixedNc,
    /// Conforming P1 body glued to the plate at shared vertices.
    Displacement,
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mixed-nc" => Ok(Method::MixedNc),
            "displacement" => Ok(Method::Displacement),
            _ => Err(Error::UnknownField(format!("method `{s}`"))),
        }
    }
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::MixedNc => "mixed-nc",
            Method::Displacement => "displacement",
        }
    }
}

/// Subdivision counts of one body/plate mesh pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeshPair {
    pub body_n: usize,
    pub plate_n: usize,
    pub diagonal: Diagonal,
}

impl MeshPair {
    /// Level `ℓ ≥ 1` of a study. Matching: body `2^ℓ`, plate twice that
    /// with the body's diagonals. Non-matching: body `2^(ℓ−1)`, plate four
    /// times that with flipped diagonals.
    pub fn for_level(level: usize, matching: bool) -> Self {
        if matching {
            let n = 1 << level;
            Self { body_n: n, plate_n: 2 * n, diagonal: Diagonal::SameAsBody }
        } else {
            let n = 1 << (level - 1);
            Self { body_n: n, plate_n: 4 * n, diagonal: Diagonal::Flipped }
        }
    }

    pub fn h_alpha(&self) -> f64 {
        1.0 / self.body_n as f64
    }

    pub fn h_beta(&self) -> f64 {
        2.0 / self.plate_n as f64
    }

    pub fn discretization(&self, settings: &Settings) -> Result<Discretization> {
        Discretization::new(
            build_body_mesh(self.body_n)?,
            build_plate_mesh(self.plate_n, self.diagonal)?,
            settings.degrees,
        )
    }
}

/// Result of one solve with its errors.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub pair: MeshPair,
    pub n_dofs: usize,
    pub errors: ErrorNorms,
    pub relative_residual: f64,
    pub seconds: f64,
}

/// Mixed solve; also returns the fields and the discretization.
pub fn solve_mixed(
    pair: MeshPair,
    settings: &Settings,
    case: &ManufacturedCase,
) -> Result<(SolveOutcome, SolutionFields, Discretization)> {
    let start = Instant::now();
    let disc = pair.discretization(settings)?;
    let blocks = assemble_block_system(&disc, &settings.params, case)?;
    let m = blocks.monolithic();
    let (fields, report) = solve_monolithic(&m, settings.residual_tol)?;
    let errors = compute_error_norms(&disc.body, &disc.plate, &fields, Some(case), settings.degrees.error)?;
    let outcome = SolveOutcome {
        pair,
        n_dofs: m.matrix.nrows,
        errors,
        relative_residual: report.relative_residual,
        seconds: start.elapsed().as_secs_f64(),
    };
    Ok((outcome, fields, disc))
}

/// Displacement baseline on a matching pair.
pub fn solve_displacement(pair: MeshPair, settings: &Settings, case: &ManufacturedCase) -> Result<SolveOutcome> {
    let start = Instant::now();
    let body = BodySpace::new(build_body_mesh(pair.body_n)?)?;
    let plate = PlateSpace::new(build_plate_mesh(pair.plate_n, pair.diagonal)?)?;
    let sys = assemble_displacement_system(
        &body.mesh,
        &plate,
        &settings.params,
        case,
        settings.degrees.volume,
        settings.degrees.interface,
    )?;
    let factor = SymmetricFactor::spd(&sys.matrix, BlockLabels(vec![(sys.plate_offset, "body"), (usize::MAX, "plate")]), settings.residual_tol)?;
    let (x, report) = factor.solve(&sys.rhs)?;
    let (verts, w) = sys.split(&x);
    let deg = settings.degrees.error;
    let coeffs = |t: usize| -> [f64; 12] {
        let tet = body.mesh.tets[t];
        std::array::from_fn(|i| verts[tet[i / 3]][i % 3])
    };
    let rule = tet_rule(deg)?;
    let mut sigma_sq = 0.0;
    for (t, el) in body.elements.iter().enumerate() {
        let c = coeffs(t);
        let mut grad = Matrix3::zeros();
        for v in 0..4 {
            for comp in 0..3 {
                grad.set_row(comp, &(grad.row(comp) + el.geom.grads[v].transpose() * c[3 * v + comp]));
            }
        }
        let s = c0_apply(&SymTensor3::from_matrix(&grad), &settings.params);
        for (b, wq) in rule.iter() {
            let e = case.sigma_alpha(&el.geom.point(b));
            let d = SymTensor3(std::array::from_fn(|k| s.0[k] - e.0[k]));
            sigma_sq += 6.0 * el.geom.volume * wq * d.ddot(&d);
        }
    }
    let p = plate_errors(&plate, &w, Some(case), deg)?;
    let errors = ErrorNorms {
        sigma_l2: sigma_sq.sqrt(),
        u_alpha_l2: body_displacement_l2(&body, coeffs, Some(case), deg)?,
        membrane_h1: p[0],
        membrane_l2: p[1],
        bending_h2: p[2],
        bending_h1: p[3],
        bending_l2: p[4],
    };
    Ok(SolveOutcome {
        pair,
        n_dofs: sys.n_dofs(),
        errors,
        relative_residual: report.relative_residual,
        seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn solve_with(method: Method, pair: MeshPair, settings: &Settings, case: &ManufacturedCase) -> Result<SolveOutcome> {
    match method {
        Method::MixedNc => solve_mixed(pair, settings, case).map(|r| r.0),
        Method::Displacement => solve_displacement(pair, settings, case),
    }
}

#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub method: Method,
    pub levels: usize,
    pub matching: bool,
    pub settings: Settings,
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub method: Method,
    pub matching: bool,
    pub settings: Settings,
    pub rows: Vec<(usize, SolveOutcome)>,
}

/// `log2(previous / current)`.
pub fn rate(previous: f64, current: f64) -> f64 {
    (previous / current).log2()
}

/// C-style `%.6e`.
pub fn format_sci(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.6e}");
    let (mant, exp) = s.split_once('e').expect("exponent");
    let e: i32 = exp.parse().expect("exponent digits");
    format!("{mant}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
}

impl ConvergenceReport {
    /// Rates of norm `k` per row; `None` on the first level.
    pub fn rates(&self, k: usize) -> Vec<Option<f64>> {
        let mut out = vec![None];
        for w in self.rows.windows(2) {
            out.push(Some(rate(w[0].1.errors.values()[k], w[1].1.errors.values()[k])));
        }
        out.truncate(self.rows.len());
        out
    }

    /// Final-level rate of the named norm.
    pub fn final_rate(&self, name: &str) -> Option<f64> {
        let k = ErrorNorms::NAMES.iter().position(|n| *n == name)?;
        self.rates(k).last().copied().flatten()
    }

    pub fn csv_header() -> String {
        let mut h = String::from("level,body_n,plate_n,h_alpha,h_beta,dofs");
        for n in ErrorNorms::NAMES {
            let _ = write!(h, ",{n},{n}_rate");
        }
        h
    }

    /// Deterministic CSV: header, then one row per level.
    pub fn to_csv(&self) -> String {
        let mut out = Self::csv_header();
        out.push('\n');
        let rates: Vec<_> = (0..ErrorNorms::NAMES.len()).map(|k| self.rates(k)).collect();
        for (i, (level, row)) in self.rows.iter().enumerate() {
            let _ = write!(
                out,
                "{level},{},{},{},{},{}",
                row.pair.body_n,
                row.pair.plate_n,
                format_sci(row.pair.h_alpha()),
                format_sci(row.pair.h_beta()),
                row.n_dofs
            );
            for (k, v) in row.errors.values().iter().enumerate() {
                let r = rates[k][i].map(|r| format!("{r:.2}")).unwrap_or_default();
                let _ = write!(out, ",{},{r}", format_sci(*v));
            }
            out.push('\n');
        }
        out
    }

    /// Aligned human-readable table.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "method {} | {} meshes | E_alpha {} nu {} t_beta {} D_beta {}\n",
            self.method.name(),
            if self.matching { "matching" } else { "non-matching" },
            self.settings.params.e_alpha,
            self.settings.params.nu_alpha,
            self.settings.params.t_beta,
            self.settings.params.d_beta()
        );
        let _ = write!(out, "{:>5} {:>5} {:>5} {:>8}", "level", "body", "plate", "dofs");
        for n in ErrorNorms::NAMES {
            let _ = write!(out, " {n:>12} {:>5}", "rate");
        }
        let _ = writeln!(out, " {:>8}", "seconds");
        let rates: Vec<_> = (0..ErrorNorms::NAMES.len()).map(|k| self.rates(k)).collect();
        for (i, (level, row)) in self.rows.iter().enumerate() {
            let _ = write!(out, "{level:>5} {:>5} {:>5} {:>8}", row.pair.body_n, row.pair.plate_n, row.n_dofs);
            for (k, v) in row.errors.values().iter().enumerate() {
                let r = rates[k][i].map(|r| format!("{r:.2}")).unwrap_or_else(|| "-".into());
                let _ = write!(out, " {:>12} {r:>5}", format!("{v:.5e}"));
            }
            let _ = writeln!(out, " {:>8.2}", row.seconds);
        }
        out
    }
}

/// Loops over levels `1..=levels`.
pub fn run_convergence_study(config: &StudyConfig, case: &ManufacturedCase) -> Result<ConvergenceReport> {
    if config.levels < 2 {
        return Err(Error::MeshParameter("a convergence study needs at least two levels".into()));
    }
    if config.method == Method::Displacement && !config.matching {
        return Err(Error::NonMatching("the displacement baseline glues vertices and needs matching meshes".into()));
    }
    let mut rows = Vec::with_capacity(config.levels);
    for level in 1..=config.levels {
        let pair = MeshPair::for_level(level, config.matching);
        let out = solve_with(config.method, pair, &config.settings, case)
            .map_err(|e| Error::AtLevel { level, source: Box::new(e) })?;
        rows.push((level, out));
    }
    Ok(ConvergenceReport { method: config.method, matching: config.matching, settings: config.settings, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci_format_matches_c() {
        assert_eq!(format_sci(89.1246), "8.912460e+01");
        assert_eq!(format_sci(0.000123), "1.230000e-04");
        assert_eq!(format_sci(0.0), "0.000000e+00");
        assert_eq!(format_sci(-2.5e-120), "-2.500000e-120");
    }

    #[test]
    fn rate_of_quartering_is_two() {
        assert!((rate(4e-1, 1e-1) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn level_plans() {
        let m = MeshPair::for_level(3, true);
        assert_eq!((m.body_n, m.plate_n), (8, 16));
        let n = MeshPair::for_level(1, false);
        assert_eq!((n.body_n, n.plate_n, n.diagonal), (1, 4, Diagonal::Flipped));
    }

    #[test]
    fn method_names_round_trip() {
        for m in [Method::MixedNc, Method::Displacement] {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("mixed".parse::<Method>().is_err());
    }
}
