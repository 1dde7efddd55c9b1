//! Ground-state virtual photon population `N_k` with matter losses.
//!
//! Two independent routes are provided. [`nk_quadrature`] integrates the
//! spectral representation
//!
//! ```text
//! N_k = \int_0^inf dw (w - ck)^2 / (2 pi ck) Im eps(w) w^2 / |eps(w) w^2 - (ck)^2|^2
//! ```
//!
//! and [`nk_closed_form`] evaluates the same integral by residues over the two
//! first-quadrant dispersion roots,
//!
//! ```text
//! N_k = sum_j Im[ P(W_j) / (4 pi (ck)^2) W_j' (i pi - 2 log W_j) ] - 1/2
//! ```
//!
//! with `log` cut along the positive real axis. The sign inside `P` is fixed
//! by [`VALIDATED_PREFACTOR`]; see [`validate_prefactor`].

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::dielectric::LorentzMedium;
use crate::dispersion::{dispersion_polynomial, find_roots, DispersionRoots};
use crate::error::{Error, Result};
use crate::hopfield;
use crate::poly;
use crate::quadrature::{integrate_semi_infinite, IntegrationSpec};
use crate::Complex64;

/// How a [`PopulationResult`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ClosedForm,
    Quadrature,
    HopfieldLossless,
    DualLoss,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
            Method::HopfieldLossless => "hopfield_lossless",
            Method::DualLoss => "dual_loss",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationResult {
    pub k_c: f64,
    pub n_k: f64,
    pub method: Method,
    /// Absolute error estimate of the method on `n_k`.
    pub est_error: f64,
    /// Photonic energy per mode, `ck * n_k`.
    pub e_k: f64,
}

impl PopulationResult {
    pub fn new(k_c: f64, n_k: f64, method: Method, est_error: f64) -> Self {
        PopulationResult {
            k_c,
            n_k,
            method,
            est_error,
            e_k: k_c * n_k,
        }
    }
}

/// Sign in the closed-form prefactor `P(W) = W^2 -/+ (ck)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrefactorSign {
    /// `W^2 - (ck)^2`.
    Minus,
    /// `W^2 + (ck)^2`.
    Plus,
}

/// The variant that reproduces quadrature and the Hopfield result.
/// `Minus` fails both (it gives about -1/4 in the lossless small-k limit).
pub const VALIDATED_PREFACTOR: PrefactorSign = PrefactorSign::Plus;

/// Agreement required of a prefactor variant during validation.
pub const PREFACTOR_VALIDATION_TOLERANCE: f64 = 1e-4;

/// Quadrature tolerance used by [`validate_prefactor`].
const VALIDATION_QUADRATURE_TOL: f64 = 1e-8;

fn check_k(k_c: f64) -> Result<()> {
    if k_c > 0.0 && k_c.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("ck", k_c, "must be positive and finite"))
    }
}

fn residue_sum(roots: &DispersionRoots, sign: PrefactorSign) -> Complex64 {
    let ksq = roots.k_c * roots.k_c;
    let s = match sign {
        PrefactorSign::Minus => -1.0,
        PrefactorSign::Plus => 1.0,
    };
    roots.weighted_sum(|z| {
        (z * z + s * ksq) / (4.0 * PI * ksq) * (Complex64::new(0.0, PI) - 2.0 * z.ln())
    })
}

fn closed_form_with(roots: &DispersionRoots, sign: PrefactorSign) -> (f64, f64) {
    let sum = residue_sum(roots, sign);
    let n = sum.im - 0.5;
    (n, 16.0 * f64::EPSILON * (1.0 + sum.norm()))
}

/// `N_k` from the residue sum over the dispersion roots.
///
/// Works for any `gamma_L` in the model's range, including zero. Near an
/// exceptional point the root sum is evaluated as a contour integral.
pub fn nk_closed_form(medium: &LorentzMedium, k_c: f64) -> Result<PopulationResult> {
    check_k(k_c)?;
    let roots = find_roots(medium, k_c)?;
    let (n, err) = closed_form_with(&roots, VALIDATED_PREFACTOR);
    Ok(PopulationResult::new(k_c, n, Method::ClosedForm, err))
}

/// The keyhole-contour form before the sum rule is applied: the `-1/2` is
/// replaced by `-sum_j Re[W_j W_j' / (2 ck)]`, root by root. Diverges at an
/// exceptional point; meant for cross-checks only.
pub fn nk_closed_form_keyhole(medium: &LorentzMedium, k_c: f64) -> Result<f64> {
    check_k(k_c)?;
    let roots = find_roots(medium, k_c)?;
    let ksq = k_c * k_c;
    let mut n = 0.0;
    for (&z, d) in roots.roots.iter().zip(roots.derivs) {
        let p = (z * z + ksq) / (4.0 * PI * ksq);
        n += (p * d * (Complex64::new(0.0, PI) - 2.0 * z.ln())).im;
        n -= (z * d / (2.0 * k_c)).re;
    }
    Ok(n)
}

/// Compares both prefactor variants with an independent oracle at one point:
/// quadrature for `gamma_L > 0`, the Hopfield result for `gamma_L = 0`.
///
/// Returns the variant that agrees to [`PREFACTOR_VALIDATION_TOLERANCE`]
/// (relative), or [`Error::PrefactorValidation`] if neither does.
pub fn validate_prefactor(medium: &LorentzMedium, k_c: f64) -> Result<PrefactorSign> {
    let roots = find_roots(medium, k_c)?;
    let oracle = if medium.gamma_l() > 0.0 {
        nk_quadrature(medium, k_c, VALIDATION_QUADRATURE_TOL)?.n_k
    } else {
        hopfield::nk_lossless(medium, k_c)?
    };
    let minus = closed_form_with(&roots, PrefactorSign::Minus).0;
    let plus = closed_form_with(&roots, PrefactorSign::Plus).0;
    let agrees = |v: f64| (v - oracle).abs() <= PREFACTOR_VALIDATION_TOLERANCE * oracle.abs();
    match (agrees(minus), agrees(plus)) {
        (false, true) => Ok(PrefactorSign::Plus),
        (true, false) => Ok(PrefactorSign::Minus),
        _ => Err(Error::PrefactorValidation {
            printed: minus,
            conjugate: plus,
            oracle,
        }),
    }
}

/// `N_k` by adaptive quadrature of the spectral integral.
///
/// `tol` is the relative accuracy target, in `[1e-12, 1e-4]`. A lossless
/// medium has no spectral width and is delegated to
/// [`hopfield::nk_lossless`].
pub fn nk_quadrature(medium: &LorentzMedium, k_c: f64, tol: f64) -> Result<PopulationResult> {
    check_k(k_c)?;
    if !(1e-12..=1e-4).contains(&tol) {
        return Err(Error::invalid("tol", tol, "must lie in [1e-12, 1e-4]"));
    }
    if medium.omega_c() == 0.0 {
        return Ok(PopulationResult::new(k_c, 0.0, Method::Quadrature, 0.0));
    }
    if medium.gamma_l() == 0.0 {
        let n = hopfield::nk_lossless(medium, k_c)?;
        return Ok(PopulationResult::new(
            k_c,
            n,
            Method::HopfieldLossless,
            16.0 * f64::EPSILON * n,
        ));
    }

    let roots = find_roots(medium, k_c)?;
    let cut = (10.0 * medium.omega0()).max(10.0 * k_c);
    let spec = IntegrationSpec::with_rel_tol(tol)
        .abs_tol(1e-300)
        .tail_cut(cut)
        .breakpoints(breakpoints(medium, k_c, &roots, cut));

    let coeffs = dispersion_polynomial(medium, k_c);
    let prefactor = medium.omega_c() * medium.omega_c() * medium.gamma_l() / (2.0 * PI * k_c);
    // Im eps w^2 / |eps w^2 - k^2|^2 with denominators cleared:
    // omega_c^2 gamma w^3 / |p(w)|^2, p the dispersion quartic.
    let integrand = |w: f64| {
        let (p, _) = poly::eval_with_derivative(&coeffs, Complex64::new(w, 0.0));
        let gap = w - k_c;
        prefactor * gap * gap * w * w * w / p.norm_sqr()
    };
    let est = integrate_semi_infinite(integrand, 0.0, &spec)?;
    if est.error > tol * est.value.abs() {
        return Err(Error::NonConvergence {
            value: est.value,
            error: est.error,
        });
    }
    Ok(PopulationResult::new(
        k_c,
        est.value,
        Method::Quadrature,
        est.error,
    ))
}

/// Panel edges around each spectral peak, so narrow resonances are resolved.
fn breakpoints(medium: &LorentzMedium, k_c: f64, roots: &DispersionRoots, cut: f64) -> Vec<f64> {
    let g = medium.gamma_l();
    let mut points = Vec::with_capacity(32);
    points.push(medium.omega0());
    points.push(k_c);
    for r in roots.roots {
        points.push(r.re);
        for width in [r.im, 5.0 * r.im, 5.0 * g] {
            points.push(r.re - width);
            points.push(r.re + width);
        }
    }
    points.retain(|&p| p > 0.0 && p < cut && p.is_finite());
    points
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Asymptote {
    SmallK,
    LargeK,
}

/// Lossless limiting laws: `omega_c^2 / (4 ck sqrt(omega0^2 + omega_c^2))`
/// for small `ck` and `omega0 omega_c^2 / (4 (ck)^3)` for large `ck`.
pub fn nk_asymptote(medium: &LorentzMedium, k_c: f64, which: Asymptote) -> f64 {
    let wc2 = medium.omega_c() * medium.omega_c();
    match which {
        Asymptote::SmallK => e_max(medium) / k_c,
        Asymptote::LargeK => medium.omega0() * wc2 / (4.0 * k_c * k_c * k_c),
    }
}

/// Saturation value of `E_k = ck N_k` for `ck -> 0` in the lossless limit.
pub fn e_max(medium: &LorentzMedium) -> f64 {
    let wc2 = medium.omega_c() * medium.omega_c();
    wc2 / (4.0 * (medium.omega0() * medium.omega0() + wc2).sqrt())
}

/// `N_k` by the requested single-loss method. A decoupled medium gives 0.
pub fn nk(medium: &LorentzMedium, k_c: f64, method: Method, tol: f64) -> Result<PopulationResult> {
    check_k(k_c)?;
    if medium.omega_c() == 0.0 && method != Method::DualLoss {
        return Ok(PopulationResult::new(k_c, 0.0, method, 0.0));
    }
    match method {
        Method::ClosedForm => nk_closed_form(medium, k_c),
        Method::Quadrature => nk_quadrature(medium, k_c, tol),
        Method::HopfieldLossless => {
            let n = hopfield::nk_lossless(medium, k_c)?;
            Ok(PopulationResult::new(
                k_c,
                n,
                Method::HopfieldLossless,
                16.0 * f64::EPSILON * n,
            ))
        }
        Method::DualLoss => Err(Error::invalid(
            "gamma_P",
            0.0,
            "dual-loss populations need a photonic loss rate",
        )),
    }
}
