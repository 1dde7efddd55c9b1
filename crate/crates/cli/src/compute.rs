//! Point evaluations shared by the single-shot commands, sweeps and figures.

use serde::{Deserialize, Serialize};
use vacuum_census::dual_loss::{nk_dual_loss, DualLossProblem};
use vacuum_census::population::nk;
use vacuum_census::{find_roots, Complex64, DispersionRoots, Error, LorentzMedium, Method};
use vacuum_census::{PopulationResult, Result};

use crate::table::Cell;

/// Relative tolerance for single-loss quadrature.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Relative tolerance for the nested dual-loss integral.
pub const DEFAULT_DUAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    #[default]
    Auto,
    #[value(name = "closed_form")]
    ClosedForm,
    Quadrature,
    Hopfield,
    #[value(name = "dual_loss")]
    DualLoss,
}

impl MethodChoice {
    /// `auto` picks Hopfield when lossless, dual loss when `gamma_P` is
    /// given, the closed form otherwise.
    pub fn resolve(self, gamma_l: f64, gamma_p: Option<f64>) -> Method {
        match self {
            MethodChoice::Auto if gamma_p.is_some() => Method::DualLoss,
            MethodChoice::Auto if gamma_l == 0.0 => Method::HopfieldLossless,
            MethodChoice::Auto | MethodChoice::ClosedForm => Method::ClosedForm,
            MethodChoice::Quadrature => Method::Quadrature,
            MethodChoice::Hopfield => Method::HopfieldLossless,
            MethodChoice::DualLoss => Method::DualLoss,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            MethodChoice::Auto => "auto",
            MethodChoice::ClosedForm => "closed_form",
            MethodChoice::Quadrature => "quadrature",
            MethodChoice::Hopfield => "hopfield",
            MethodChoice::DualLoss => "dual_loss",
        }
    }
}

fn invalid(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::InvalidParameter {
        name,
        value,
        reason,
    }
}

/// `N_k` at one point of parameter space (`omega0 = 1`).
pub fn population(
    omega_c: f64,
    gamma_l: f64,
    gamma_p: Option<f64>,
    ck: f64,
    method: Method,
    tol: Option<f64>,
) -> Result<PopulationResult> {
    let medium = LorentzMedium::unit(omega_c, gamma_l)?;
    match (method, gamma_p) {
        (Method::DualLoss, Some(gp)) => {
            let problem = DualLossProblem::new(medium, gp, ck)?;
            nk_dual_loss(&problem, tol.unwrap_or(DEFAULT_DUAL_TOL))
        }
        (Method::DualLoss, None) => Err(invalid(
            "gamma_P",
            f64::NAN,
            "dual_loss needs a photonic loss rate",
        )),
        (_, Some(gp)) => Err(invalid("gamma_P", gp, "only used by dual_loss")),
        (Method::HopfieldLossless, None) if gamma_l != 0.0 => {
            Err(invalid("gamma_L", gamma_l, "hopfield needs gamma_L = 0"))
        }
        (m, None) => nk(&medium, ck, m, tol.unwrap_or(DEFAULT_TOL)),
    }
}

pub fn roots(omega_c: f64, gamma_l: f64, ck: f64) -> Result<DispersionRoots> {
    find_roots(&LorentzMedium::unit(omega_c, gamma_l)?, ck)
}

pub fn eps(omega_c: f64, gamma_l: f64, z: Complex64) -> Result<Complex64> {
    LorentzMedium::unit(omega_c, gamma_l)?.eps(z)
}

/// Rounding-level error of one dielectric evaluation.
pub fn eps_error(value: Complex64) -> f64 {
    4.0 * f64::EPSILON * value.norm()
}

/// Largest polished residual, the error figure reported for roots.
pub fn roots_error(r: &DispersionRoots) -> f64 {
    r.residuals().map_or(f64::NAN, |[a, b]| a.max(b))
}

/// `status` and `message` cells for a row.
pub fn status_cells<T>(outcome: &Result<T>) -> [Cell; 2] {
    match outcome {
        Ok(_) => ["ok".into(), Cell::Empty],
        Err(e) => [e.kind().into(), e.to_string().into()],
    }
}

pub const ROOT_COLUMNS: [&str; 11] = [
    "root0_re",
    "root0_im",
    "root1_re",
    "root1_im",
    "deriv0_re",
    "deriv0_im",
    "deriv1_re",
    "deriv1_im",
    "regime",
    "ultrastrong",
    "degenerate",
];

/// Cells for [`ROOT_COLUMNS`] followed by `est_error`.
pub fn root_cells(outcome: &Result<DispersionRoots>) -> Vec<Cell> {
    match outcome {
        Ok(r) => vec![
            r.roots[0].re.into(),
            r.roots[0].im.into(),
            r.roots[1].re.into(),
            r.roots[1].im.into(),
            r.derivs[0].re.into(),
            r.derivs[0].im.into(),
            r.derivs[1].re.into(),
            r.derivs[1].im.into(),
            r.regime.as_str().into(),
            r.ultrastrong.into(),
            r.degenerate.into(),
            roots_error(r).into(),
        ],
        Err(_) => vec![Cell::Empty; ROOT_COLUMNS.len() + 1],
    }
}
