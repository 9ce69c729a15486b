//! Run settings and the `key = value` configuration format.

use crate::assembly::Degrees;
use crate::error::{Error, Result};
use crate::materials::MaterialParams;
use crate::solvers::RESIDUAL_TOLERANCE;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub params: MaterialParams,
    pub degrees: Degrees,
    /// Relative residual required of every direct solve.
    pub residual_tol: f64,
    pub cg_tol: f64,
    pub cg_max_it: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            params: MaterialParams::benchmark(),
            degrees: Degrees::default(),
            residual_tol: RESIDUAL_TOLERANCE,
            cg_tol: 1e-6,
            cg_max_it: 200,
        }
    }
}

pub const CONFIG_KEYS: [&str; 12] = [
    "e_alpha",
    "nu_alpha",
    "e_beta",
    "nu_beta",
    "t_beta",
    "d_beta",
    "volume_degree",
    "interface_degree",
    "error_degree",
    "residual_tol",
    "cg_tol",
    "cg_max_it",
];

impl Settings {
    /// Applies `key = value` lines on top of `self`. Blank lines and lines
    /// starting with `#` are ignored. `d_beta` fixes `E_β` from the other
    /// plate parameters and is applied last.
    pub fn apply_config(mut self, text: &str) -> Result<Self> {
        let mut d_beta = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Config { line: i + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let real = || value.parse::<f64>().map_err(|_| err(format!("`{key}` needs a number, got `{value}`")));
            let int = || value.parse::<usize>().map_err(|_| err(format!("`{key}` needs an integer, got `{value}`")));
            match key {
                "e_alpha" => self.params.e_alpha = real()?,
                "nu_alpha" => self.params.nu_alpha = real()?,
                "e_beta" => self.params.e_beta = real()?,
                "nu_beta" => self.params.nu_beta = real()?,
                "t_beta" => self.params.t_beta = real()?,
                "d_beta" => d_beta = Some(real()?),
                "volume_degree" => self.degrees.volume = int()?,
                "interface_degree" => self.degrees.interface = int()?,
                "error_degree" => self.degrees.error = int()?,
                "residual_tol" => self.residual_tol = real()?,
                "cg_tol" => self.cg_tol = real()?,
                "cg_max_it" => self.cg_max_it = int()?,
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
        }
        if let Some(d) = d_beta {
            let p = &mut self.params;
            p.e_beta = 12.0 * d * (1.0 - p.nu_beta * p.nu_beta) / p.t_beta.powi(3);
        }
        if let Some(msg) = self.params.validate() {
            return Err(Error::Config { line: 0, message: msg });
        }
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_and_comments() {
        let s = Settings::default()
            .apply_config("# comment\n\ne_alpha = 50\ncg_tol=1e-8\nerror_degree = 6\n")
            .unwrap();
        assert_eq!(s.params.e_alpha, 50.0);
        assert_eq!(s.cg_tol, 1e-8);
        assert_eq!(s.degrees.error, 6);
    }

    #[test]
    fn flexural_rigidity_key() {
        let s = Settings::default().apply_config("t_beta = 0.05\nd_beta = 2").unwrap();
        assert!((s.params.d_beta() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn bad_lines_report_their_number() {
        let e = Settings::default().apply_config("e_alpha = 1\nbogus = 3").unwrap_err();
        assert!(matches!(e, Error::Config { line: 2, .. }));
        let e = Settings::default().apply_config("nu_alpha = x").unwrap_err();
        assert!(matches!(e, Error::Config { line: 1, .. }));
    }
}
