use alloc::boxed::Box;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes shared by every computation in the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the domain of the model.
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    /// The dielectric function was evaluated at (or numerically on top of) a matter pole.
    PoleProximity { re: f64, im: f64 },
    /// A spectral density was requested at zero linewidth, where it is a delta distribution.
    DegenerateDensity { name: &'static str },
    /// Light and matter are decoupled (`omega_c = 0`); the caller must use the analytic bare result.
    Decoupled,
    /// Symmetry reduction of the dispersion quartic did not give two representatives.
    RootCount { found: usize },
    /// A polished dispersion root misses the residual bound.
    Residual { residual: f64, bound: f64 },
    /// Adaptive quadrature exhausted its refinement budget.
    NonConvergence { value: f64, error: f64 },
    /// The integrand returned NaN or an infinity.
    NonFinite { at: f64 },
    /// Principal-value estimates diverge under refinement of the excision radius.
    PrincipalValueDivergent { spread: f64 },
    /// The mode-function system is singular at this frequency.
    SingularSystem { omega: f64 },
    /// A squared normalization came out negative or non-finite.
    NegativeNormalization { omega: f64 },
    /// Neither closed-form prefactor variant reproduces the quadrature oracle.
    PrefactorValidation {
        printed: f64,
        conjugate: f64,
        oracle: f64,
    },
    /// A sweep failed at one of its grid points.
    AtGridIndex { index: usize, source: Box<Error> },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }

    /// Short machine-readable tag for the failure class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::PoleProximity { .. } => "pole_proximity",
            Error::DegenerateDensity { .. } => "degenerate_density",
            Error::Decoupled => "decoupled",
            Error::RootCount { .. } => "root_count",
            Error::Residual { .. } => "residual",
            Error::NonConvergence { .. } => "non_convergence",
            Error::NonFinite { .. } => "non_finite",
            Error::PrincipalValueDivergent { .. } => "pv_divergent",
            Error::SingularSystem { .. } => "singular_system",
            Error::NegativeNormalization { .. } => "negative_normalization",
            Error::PrefactorValidation { .. } => "prefactor_validation",
            Error::AtGridIndex { source, .. } => source.kind(),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter {
                name,
                value,
                reason,
            } => write!(f, "invalid {name} = {value}: {reason}"),
            Error::PoleProximity { re, im } => {
                write!(f, "dielectric function evaluated at a matter pole ({re}{im:+}i)")
            }
            Error::DegenerateDensity { name } => {
                write!(f, "{name} density degenerates to a delta distribution at zero linewidth")
            }
            Error::Decoupled => write!(
                f,
                "omega_c = 0: dispersion reduces to the bare photon root omega = ck"
            ),
            Error::RootCount { found } => write!(
                f,
                "expected 2 first-quadrant dispersion roots, found {found}"
            ),
            Error::Residual { residual, bound } => {
                write!(f, "root residual {residual:e} exceeds bound {bound:e}")
            }
            Error::NonConvergence { value, error } => write!(
                f,
                "quadrature did not converge (value {value:e}, error estimate {error:e})"
            ),
            Error::NonFinite { at } => write!(f, "integrand is not finite at {at}"),
            Error::PrincipalValueDivergent { spread } => write!(
                f,
                "principal value diverges under refinement (spread {spread:e}); pole is not simple"
            ),
            Error::SingularSystem { omega } => {
                write!(f, "mode-function system is singular at omega = {omega}")
            }
            Error::NegativeNormalization { omega } => {
                write!(f, "negative squared normalization at omega = {omega}")
            }
            Error::PrefactorValidation {
                printed,
                conjugate,
                oracle,
            } => write!(
                f,
                "no prefactor variant matches the oracle {oracle:e} (minus: {printed:e}, plus: {conjugate:e})"
            ),
            Error::AtGridIndex { index, source } => write!(f, "grid point {index}: {source}"),
        }
    }
}

impl core::error::Error for Error {}
