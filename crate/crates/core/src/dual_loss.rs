//! Virtual photons with matter and photonic losses together.
//!
//! The photon mode at `ck` is broadened into a continuum with density
//! `|chi_k|^2` (linewidth `gamma_P`) and couples to the matter continuum
//! `|zeta|^2` (linewidth `gamma_L`). Diagonalizing the two coupled continua
//! gives, for each frequency `omega`, two eigenoperators `j = +, -` with mode
//! functions `s_{x,j}`, `s_{w,j}` and normalizations `K_j`, built from the
//! principal-value functions
//!
//! ```text
//! W(omega) = P \int_0^inf w' |chi_k(w')|^2 / (omega^2 - w'^2) dw'
//! Z(omega) = P \int_0^inf omega^2 |zeta(w')|^2 / (w' (omega^2 - w'^2)) dw'
//! ```
//!
//! The anomalous photon coefficient of mode `(j, omega)` at bath frequency
//! `w'` has `|y_j|^2 = omega_c^4 |chi_k(w')|^2 / (omega + w')^2 F_j^2 K_j^2`, so
//! the population factorizes into nested one-dimensional integrals:
//!
//! ```text
//! N_k = \int_0^inf d omega  rho(omega) \int_0^inf dw' |chi_k(w')|^2 / (omega + w')^2,
//! rho = omega_c^4 sum_j F_j^2 K_j^2.
//! ```
//!
//! In the gauge `s_{w,+} = 0`, `F_+ = 1/(omega_c^2 W)` blows up where `W`
//! vanishes while `K_+^2` vanishes with it; [`photon_weight`] evaluates
//! `rho` in a form that stays regular there.

use alloc::vec::Vec;
use core::cell::Cell;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::dielectric::{chi_density, LorentzMedium};
use crate::error::{Error, Result};
use crate::poly;
use crate::population::{Method, PopulationResult};
use crate::quadrature::{
    integrate_principal_value, integrate_semi_infinite, Estimate, IntegrationSpec,
};
use crate::Complex64;

/// Relative accuracy of [`pv_w`] and [`pv_z`].
pub const PV_TOL: f64 = 1e-10;

/// Floor for the adaptively tightened inner tolerance of [`nk_dual_loss`].
const MIN_INNER_TOL: f64 = 1e-12;

/// A Lorentz medium plus a lossy photon mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualLossProblem {
    medium: LorentzMedium,
    gamma_p: f64,
    k_c: f64,
}

impl DualLossProblem {
    /// `gamma_P` must lie in `(0, 2 omega0]` and the medium must be lossy:
    /// both continua need a finite width.
    pub fn new(medium: LorentzMedium, gamma_p: f64, k_c: f64) -> Result<Self> {
        if !(gamma_p > 0.0 && gamma_p <= 2.0 * medium.omega0()) {
            return Err(Error::invalid(
                "gamma_P",
                gamma_p,
                "must lie in (0, 2 omega0]",
            ));
        }
        if !(k_c > 0.0 && k_c.is_finite()) {
            return Err(Error::invalid("ck", k_c, "must be positive and finite"));
        }
        if medium.gamma_l() == 0.0 {
            return Err(Error::DegenerateDensity { name: "matter" });
        }
        Ok(DualLossProblem {
            medium,
            gamma_p,
            k_c,
        })
    }

    pub fn medium(&self) -> &LorentzMedium {
        &self.medium
    }

    pub fn gamma_p(&self) -> f64 {
        self.gamma_p
    }

    pub fn k_c(&self) -> f64 {
        self.k_c
    }

    fn chi(&self, omega: f64) -> f64 {
        if omega > 0.0 {
            chi_density(self.k_c, self.gamma_p, omega).unwrap_or(f64::NAN)
        } else {
            0.0
        }
    }

    fn zeta(&self, omega: f64) -> f64 {
        if omega > 0.0 {
            self.medium.zeta_density(omega).unwrap_or(f64::NAN)
        } else {
            0.0
        }
    }

    fn photon_points(&self) -> impl Iterator<Item = f64> + '_ {
        [1.0, 5.0, 25.0]
            .into_iter()
            .flat_map(move |m| [self.k_c - m * self.gamma_p, self.k_c + m * self.gamma_p])
            .chain([self.k_c])
    }

    fn matter_points(&self) -> impl Iterator<Item = f64> + '_ {
        let (w0, g) = (self.medium.omega0(), self.medium.gamma_l());
        [1.0, 5.0]
            .into_iter()
            .flat_map(move |m| [w0 - m * g, w0 + m * g])
            .chain([w0])
    }

    fn tail_cut(&self) -> f64 {
        (10.0 * self.medium.omega0()).max(10.0 * self.k_c)
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if omega > 0.0 && omega.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(
            "omega",
            omega,
            "must be positive and finite",
        ))
    }
}

/// `P \int_0^inf f(w') / (omega^2 - w'^2) dw'` for a density term `f`:
/// principal value over `[0, 2 omega]`, ordinary integral beyond.
fn pv_integral<F: Fn(f64) -> f64>(
    f: F,
    omega: f64,
    points: Vec<f64>,
    tail_cut: f64,
    tol: f64,
    abs_tol: f64,
) -> Result<Estimate> {
    let kernel = |x: f64| f(x) / ((omega - x) * (omega + x));
    let spec = IntegrationSpec::with_rel_tol(tol)
        .abs_tol(abs_tol)
        .tail_cut(tail_cut.max(2.0 * omega))
        .breakpoints(points);
    let near = integrate_principal_value(kernel, omega, 0.0, 2.0 * omega, &spec)?;
    let far = integrate_semi_infinite(kernel, 2.0 * omega, &spec)?;
    Ok(near.add(far))
}

fn pv_w_estimate(problem: &DualLossProblem, omega: f64, tol: f64) -> Result<Estimate> {
    check_omega(omega)?;
    let k2 = problem.k_c * problem.k_c;
    pv_integral(
        |x| x * problem.chi(x),
        omega,
        problem.photon_points().collect(),
        problem.tail_cut(),
        tol,
        tol / (omega * omega + k2),
    )
}

fn pv_z_estimate(problem: &DualLossProblem, omega: f64, tol: f64) -> Result<Estimate> {
    check_omega(omega)?;
    let w0sq = problem.medium.omega0() * problem.medium.omega0();
    let w2 = omega * omega;
    pv_integral(
        |x| {
            if x > 0.0 {
                w2 * problem.zeta(x) / x
            } else {
                0.0
            }
        },
        omega,
        problem.matter_points().collect(),
        problem.tail_cut(),
        tol,
        tol * w2 / (w0sq + w2),
    )
}

/// The photonic principal-value function `W(omega)`.
pub fn pv_w(problem: &DualLossProblem, omega: f64) -> Result<f64> {
    Ok(pv_w_estimate(problem, omega, PV_TOL)?.value)
}

/// The matter principal-value function `Z(omega)`. Depends on the medium
/// only; the problem supplies it.
pub fn pv_z(problem: &DualLossProblem, omega: f64) -> Result<f64> {
    Ok(pv_z_estimate(problem, omega, PV_TOL)?.value)
}

/// Mode functions of both eigenoperators at one frequency, in the gauge
/// `s_{w,+} = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeFunctionSolution {
    pub omega: f64,
    pub s_x_plus: f64,
    pub s_x_minus: f64,
    pub s_w_minus: f64,
    pub k_plus_sq: f64,
    pub k_minus_sq: f64,
    pub f_plus: f64,
    pub f_minus: f64,
    pub g_plus: f64,
    pub g_minus: f64,
    omega_c: f64,
    zeta_sq: f64,
    chi_sq: f64,
}

impl ModeFunctionSolution {
    /// Solves the algebraic system given the densities and PV functions at
    /// `omega`.
    pub fn from_parts(
        omega_c: f64,
        omega: f64,
        zeta_sq: f64,
        chi_sq: f64,
        w: f64,
        z: f64,
    ) -> Result<Self> {
        let wc2 = omega_c * omega_c;
        let pi2 = PI * PI;
        if w == 0.0 || !(zeta_sq > 0.0) || !(chi_sq > 0.0) {
            return Err(Error::SingularSystem { omega });
        }
        let g_plus = w;
        let f_plus = 1.0 / (wc2 * w);
        let s_x_plus = 2.0 * (f_plus - z) / zeta_sq;

        // Cross-orthogonality, linear in s_x_minus once F_- = s_x_minus zeta^2/2 + Z.
        let a = wc2 * chi_sq * pi2 * f_plus;
        let coeff = zeta_sq * (0.5 * a + s_x_plus);
        let scale = zeta_sq * (0.5 * a.abs() + s_x_plus.abs());
        if !(coeff.abs() > 1e-14 * scale) {
            return Err(Error::SingularSystem { omega });
        }
        let s_x_minus = -(zeta_sq * pi2 + a * z) / coeff;
        let f_minus = 0.5 * s_x_minus * zeta_sq + z;
        let g_minus = 1.0 / (wc2 * f_minus);
        let s_w_minus = 2.0 * (g_minus - w) / chi_sq;

        let norm = |s_w: f64, s_x: f64, f: f64| {
            1.0 / (wc2 * (wc2 * chi_sq * (pi2 + s_w * s_w) * f * f + zeta_sq * (pi2 + s_x * s_x)))
        };
        let k_plus_sq = norm(0.0, s_x_plus, f_plus);
        let k_minus_sq = norm(s_w_minus, s_x_minus, f_minus);
        for k in [k_plus_sq, k_minus_sq] {
            if !(k >= 0.0 && k.is_finite()) {
                return Err(Error::NegativeNormalization { omega });
            }
        }
        Ok(ModeFunctionSolution {
            omega,
            s_x_plus,
            s_x_minus,
            s_w_minus,
            k_plus_sq,
            k_minus_sq,
            f_plus,
            f_minus,
            g_plus,
            g_minus,
            omega_c,
            zeta_sq,
            chi_sq,
        })
    }

    /// `|omega_c^2 G_j F_j - 1|` for `j = +, -`.
    pub fn consistency_residuals(&self) -> [f64; 2] {
        let wc2 = self.omega_c * self.omega_c;
        [
            (wc2 * self.g_plus * self.f_plus - 1.0).abs(),
            (wc2 * self.g_minus * self.f_minus - 1.0).abs(),
        ]
    }

    fn norm_terms(&self, s_w: f64, s_x: f64, f: f64) -> f64 {
        let wc2 = self.omega_c * self.omega_c;
        let pi2 = PI * PI;
        wc2 * (wc2 * self.chi_sq * (pi2 + s_w * s_w) * f * f + self.zeta_sq * (pi2 + s_x * s_x))
    }

    /// `|K_j^2 * (norm bracket) - 1|` for `j = +, -`.
    pub fn normalization_residuals(&self) -> [f64; 2] {
        [
            (self.k_plus_sq * self.norm_terms(0.0, self.s_x_plus, self.f_plus) - 1.0).abs(),
            (self.k_minus_sq * self.norm_terms(self.s_w_minus, self.s_x_minus, self.f_minus) - 1.0)
                .abs(),
        ]
    }

    /// The `+ -` orthogonality relation, relative to the size of its terms.
    pub fn cross_residual(&self) -> f64 {
        let wc2 = self.omega_c * self.omega_c;
        let pi2 = PI * PI;
        let photon = wc2 * self.chi_sq * pi2 * self.f_plus * self.f_minus;
        let matter = self.zeta_sq * (pi2 + self.s_x_plus * self.s_x_minus);
        let scale = photon.abs() + self.zeta_sq * (pi2 + (self.s_x_plus * self.s_x_minus).abs());
        (photon + matter).abs() / scale
    }

    /// `omega_c^4 sum_j F_j^2 K_j^2`.
    pub fn photon_weight(&self) -> f64 {
        let wc4 = self.omega_c.powi(4);
        wc4 * (self.f_plus * self.f_plus * self.k_plus_sq
            + self.f_minus * self.f_minus * self.k_minus_sq)
    }
}

/// Solves for the mode functions at `omega`, with numerical PV functions.
pub fn solve_mode_functions(problem: &DualLossProblem, omega: f64) -> Result<ModeFunctionSolution> {
    check_omega(omega)?;
    let w = pv_w(problem, omega)?;
    let z = pv_z(problem, omega)?;
    ModeFunctionSolution::from_parts(
        problem.medium.omega_c(),
        omega,
        problem.zeta(omega),
        problem.chi(omega),
        w,
        z,
    )
}

/// `omega_c^4 sum_j F_j^2 K_j^2` from the densities and PV functions, in a
/// form without the gauge pole at `W = 0`.
pub fn photon_weight_from(omega_c: f64, zeta_sq: f64, chi_sq: f64, w: f64, z: f64) -> f64 {
    let wc2 = omega_c * omega_c;
    let pi2 = PI * PI;
    let u = wc2 * w;
    let c = wc2 * chi_sq * pi2;
    let plus = 1.0 / (wc2 * (c + zeta_sq * pi2 * u * u + 4.0 * (1.0 - z * u).powi(2) / zeta_sq));
    let a = -(zeta_sq * pi2 * u + c * z);
    let b = 2.0 * (1.0 - z * u) + 0.5 * c * zeta_sq;
    let f = 0.5 * a * zeta_sq + z * b;
    let g = b / wc2 - w * f;
    let den = c * f * f + 4.0 * wc2 * g * g / chi_sq + zeta_sq * pi2 * b * b + zeta_sq * a * a;
    let minus = f * f / (wc2 * den);
    wc2 * wc2 * (plus + minus)
}

fn weight_estimate(problem: &DualLossProblem, omega: f64, tol: f64) -> Result<(f64, f64)> {
    let w = pv_w_estimate(problem, omega, tol)?;
    let z = pv_z_estimate(problem, omega, tol)?;
    let rho = |wv: f64, zv: f64| {
        photon_weight_from(
            problem.medium.omega_c(),
            problem.zeta(omega),
            problem.chi(omega),
            wv,
            zv,
        )
    };
    let weight = rho(w.value, z.value);
    // Linearized propagation of the PV errors.
    let error = (rho(w.value + w.error, z.value) - weight).abs()
        + (rho(w.value, z.value + z.error) - weight).abs();
    Ok((weight, error))
}

/// Spectral weight of the bare photon in the eigenmodes at `omega`.
pub fn photon_weight(problem: &DualLossProblem, omega: f64) -> Result<f64> {
    check_omega(omega)?;
    Ok(weight_estimate(problem, omega, PV_TOL)?.0)
}

/// `\int_0^inf |chi_k(w')|^2 / (nu + w')^2 dw'`.
fn bath_overlap(problem: &DualLossProblem, nu: f64, tol: f64) -> Result<Estimate> {
    let spec = IntegrationSpec::with_rel_tol(tol)
        .abs_tol(1e-300)
        .tail_cut(problem.tail_cut())
        .breakpoints(problem.photon_points());
    integrate_semi_infinite(
        |x| {
            let s = nu + x;
            problem.chi(x) / (s * s)
        },
        0.0,
        &spec,
    )
}

/// Complex frequencies where both losses broaden the polaritons: roots of
/// `(w^2 - (ck)^2 + i gamma_P w) D(w) + omega_c^2 w^2` with
/// `D = omega0^2 - w^2 - i gamma_L w`.
fn lossy_polaritons(problem: &DualLossProblem) -> Vec<Complex64> {
    let m = &problem.medium;
    let (w0sq, g, gp) = (m.omega0() * m.omega0(), m.gamma_l(), problem.gamma_p);
    let k2 = problem.k_c * problem.k_c;
    let i = Complex64::i();
    // (w^2 + i gp w - k2)(w0sq - i g w - w^2) + wc^2 w^2, ascending powers
    let p = [Complex64::new(-k2, 0.0), i * gp, Complex64::new(1.0, 0.0)];
    let d = [Complex64::new(w0sq, 0.0), -i * g, Complex64::new(-1.0, 0.0)];
    let mut coeffs = [Complex64::new(0.0, 0.0); 5];
    for (a, pa) in p.iter().enumerate() {
        for (b, db) in d.iter().enumerate() {
            coeffs[a + b] += pa * db;
        }
    }
    coeffs[2] += m.omega_c() * m.omega_c();
    poly::roots(&coeffs)
}

/// `N_k` with both loss channels, to relative accuracy `tol` in `[1e-8, 1e-3]`.
pub fn nk_dual_loss(problem: &DualLossProblem, tol: f64) -> Result<PopulationResult> {
    if !(1e-8..=1e-3).contains(&tol) {
        return Err(Error::invalid("tol", tol, "must lie in [1e-8, 1e-3]"));
    }
    let k_c = problem.k_c;
    if problem.medium.omega_c() == 0.0 {
        return Ok(PopulationResult::new(k_c, 0.0, Method::DualLoss, 0.0));
    }

    let cut = problem.tail_cut();
    let mut points: Vec<f64> = problem
        .photon_points()
        .chain(problem.matter_points())
        .collect();
    for r in lossy_polaritons(problem) {
        let width = r.im.abs();
        points.extend([
            r.re,
            r.re - width,
            r.re + width,
            r.re - 5.0 * width,
            r.re + 5.0 * width,
        ]);
    }
    points.retain(|&p| p > 0.0 && p < cut && p.is_finite());

    // Narrow resonances amplify inner errors through the weight, so the
    // inner tolerance is tightened until their share fits the budget.
    let mut inner_tol = 0.1 * tol;
    loop {
        let (outer, inner) = dual_loss_pass(problem, &points, cut, tol, inner_tol)?;
        // Inner errors enter the outer integrand multiplicatively; the largest
        // relative inner error bounds their effect on the integral.
        let est_error = outer.error + inner * outer.value.abs();
        if est_error <= tol * outer.value.abs() {
            return Ok(PopulationResult::new(
                k_c,
                outer.value,
                Method::DualLoss,
                est_error,
            ));
        }
        let outer_fits = outer.error <= 0.5 * tol * outer.value.abs();
        if !outer_fits || inner_tol <= MIN_INNER_TOL {
            return Err(Error::NonConvergence {
                value: outer.value,
                error: est_error,
            });
        }
        inner_tol = (0.1 * inner_tol).max(MIN_INNER_TOL);
    }
}

/// One evaluation of the nested integral; returns the outer estimate and
/// the largest relative error of the inner factors.
fn dual_loss_pass(
    problem: &DualLossProblem,
    points: &[f64],
    cut: f64,
    tol: f64,
    inner_tol: f64,
) -> Result<(Estimate, f64)> {
    let failure: Cell<Option<Error>> = Cell::new(None);
    let inner_error = Cell::new(0.0f64);
    let integrand = |nu: f64| -> f64 {
        let eval = || -> Result<f64> {
            let (rho, rho_err) = weight_estimate(problem, nu, inner_tol)?;
            let overlap = bath_overlap(problem, nu, inner_tol)?;
            if rho > 0.0 {
                let rel = rho_err / rho + overlap.error / overlap.value;
                inner_error.set(inner_error.get().max(rel));
            }
            Ok(rho * overlap.value)
        };
        match eval() {
            Ok(v) => v,
            Err(e) => {
                let first = failure.take().unwrap_or(e);
                failure.set(Some(first));
                f64::NAN
            }
        }
    };
    let spec = IntegrationSpec::with_rel_tol(0.5 * tol)
        .abs_tol(1e-300)
        .tail_cut(cut)
        .breakpoints(points.iter().copied());
    let outer = integrate_semi_infinite(integrand, 0.0, &spec);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok((outer?, inner_error.get()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopfield;
    use crate::population::nk_quadrature;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn problem(wc: f64, gl: f64, gp: f64, k: f64) -> DualLossProblem {
        DualLossProblem::new(LorentzMedium::unit(wc, gl).unwrap(), gp, k).unwrap()
    }

    // Residue-calculus closed forms of the two PV functions.
    fn w_closed(p: &DualLossProblem, w: f64) -> f64 {
        let k = p.k_c();
        (1.0 / Complex64::new(w * w - k * k, p.gamma_p() * w)).re
    }

    fn z_closed(p: &DualLossProblem, w: f64) -> f64 {
        let m = p.medium();
        let d = Complex64::new(m.omega0() * m.omega0() - w * w, -m.gamma_l() * w);
        -(w * w / d).re
    }

    // Photon weight as -Im T / pi of the photon self-energy T built from
    // eps directly: independent of the mode-function algebra.
    fn green_weight(p: &DualLossProblem, w: f64) -> f64 {
        let eps = p.medium().eps_real(w).unwrap();
        let e = (eps - 1.0) * w * w;
        let dp = Complex64::new(w * w - p.k_c() * p.k_c(), p.gamma_p() * w);
        let t = -e * dp / (2.0 * (e + dp));
        -t.im / PI
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn rejects_invalid_problems() {
        let m = LorentzMedium::unit(0.5, 1.0).unwrap();
        assert!(DualLossProblem::new(m, 0.0, 1.0).is_err());
        assert!(DualLossProblem::new(m, 2.5, 1.0).is_err());
        assert!(DualLossProblem::new(m, 0.5, 0.0).is_err());
        let lossless = LorentzMedium::unit(0.5, 0.0).unwrap();
        assert!(DualLossProblem::new(lossless, 0.5, 1.0).is_err());
        assert!(DualLossProblem::new(m, 2.0, 1.0).is_ok());
    }

    #[test]
    fn pv_w_matches_residue_form() {
        let p = problem(0.5, 1.0, 0.5, 1.0);
        // W vanishes at omega = ck; compare against its natural scale 1/(gamma_P ck)
        assert!(pv_w(&p, 1.0).unwrap().abs() < 1e-8 / 0.5);
        for w in [0.3, 0.97, 1.6, 4.0] {
            let v = pv_w(&p, w).unwrap();
            assert!(
                rel(v, w_closed(&p, w)) < 1e-8,
                "{w}: {v} vs {}",
                w_closed(&p, w)
            );
        }
        let narrow = problem(0.5, 1.0, 1e-3, 1.0);
        for w in [0.9, 0.999, 1.002, 1.1] {
            let v = pv_w(&narrow, w).unwrap();
            assert!(rel(v, w_closed(&narrow, w)) < 1e-8, "{w}");
        }
    }

    #[test]
    fn pv_w_tail() {
        // omega^2 W -> int w' |chi|^2 dw' = 1
        let p = problem(0.5, 1.0, 0.5, 1.0);
        let w = 1e3;
        assert!((pv_w(&p, w).unwrap() * w * w - 1.0).abs() < 1e-5);
    }

    #[test]
    fn pv_w_scales_dimensionally() {
        let lambda = 2.0;
        let a = problem(0.5, 1.0, 0.5, 1.0);
        let m = LorentzMedium::new(lambda, 0.5 * lambda, lambda).unwrap();
        let b = DualLossProblem::new(m, 0.5 * lambda, lambda).unwrap();
        for w in [0.4, 1.0, 2.2] {
            let lhs = pv_w(&b, lambda * w).unwrap();
            let rhs = pv_w(&a, w).unwrap() / (lambda * lambda);
            assert!(rel(lhs, rhs) < 1e-9);
        }
    }

    #[test]
    fn pv_z_matches_residue_form_and_partial_fractions() {
        let p = problem(0.5, 0.5, 0.5, 1.0);
        let w = 1.0;
        let v = pv_z(&p, w).unwrap();
        assert!(v.abs() < 1e-8, "zero at the resonance: {v}");
        for w in [0.2, 0.8, 1.3, 3.0] {
            let v = pv_z(&p, w).unwrap();
            assert!(
                rel(v, z_closed(&p, w)) < 1e-8,
                "{w}: {v} vs {}",
                z_closed(&p, w)
            );
            // Z = 1 - P int w' |zeta|^2 / (w'^2 - w^2)
            let other = pv_integral(
                |x| -x * p.zeta(x),
                w,
                p.matter_points().collect(),
                p.tail_cut(),
                1e-11,
                1e-14,
            )
            .unwrap()
            .value;
            assert!(rel(1.0 - other, v) < 1e-8);
        }
        assert!(pv_z(&p, 1e-4).unwrap().abs() < 1e-7);
    }

    #[test]
    fn pv_z_when_fold_reaches_origin() {
        let p = problem(1.0, 2.0, 2.0, 1.0);
        let w = 0.5f64.next_up();
        let v = pv_z(&p, w).unwrap();
        assert!(rel(v, z_closed(&p, w)) < 1e-8, "{v}");
    }

    #[test]
    fn mode_function_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let p = problem(
                rng.gen_range(0.05..1.0),
                rng.gen_range(0.05..2.0),
                rng.gen_range(0.05..2.0),
                rng.gen_range(0.2..3.0),
            );
            let w = rng.gen_range(0.01..5.0);
            let s = ModeFunctionSolution::from_parts(
                p.medium().omega_c(),
                w,
                p.zeta(w),
                p.chi(w),
                w_closed(&p, w),
                z_closed(&p, w),
            )
            .unwrap();
            for r in s.consistency_residuals() {
                assert!(r < 1e-10);
            }
            for r in s.normalization_residuals() {
                assert!(r < 1e-8);
            }
            assert!(s.cross_residual() < 1e-8);
            assert!(s.k_plus_sq >= 0.0 && s.k_minus_sq >= 0.0);
            let regular = photon_weight_from(
                p.medium().omega_c(),
                p.zeta(w),
                p.chi(w),
                w_closed(&p, w),
                z_closed(&p, w),
            );
            assert!(rel(s.photon_weight(), regular) < 1e-7, "{w}");
        }
    }

    #[test]
    fn numerical_mode_functions_satisfy_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = problem(0.5, 1.0, 0.5, 1.0);
        for _ in 0..100 {
            let w = rng.gen_range(0.01..5.0);
            let s = solve_mode_functions(&p, w).unwrap();
            assert!(s.consistency_residuals().iter().all(|&r| r < 1e-10));
            assert!(s.normalization_residuals().iter().all(|&r| r < 1e-8));
            assert!(s.cross_residual() < 1e-8);
        }
    }

    #[test]
    fn weight_matches_green_function() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..500 {
            let p = problem(
                rng.gen_range(0.05..1.0),
                rng.gen_range(0.05..2.0),
                rng.gen_range(0.01..2.0),
                rng.gen_range(0.2..3.0),
            );
            let w = rng.gen_range(0.01..5.0);
            let ours = photon_weight_from(
                p.medium().omega_c(),
                p.zeta(w),
                p.chi(w),
                w_closed(&p, w),
                z_closed(&p, w),
            );
            let green = green_weight(&p, w);
            assert!(rel(ours, green) < 1e-9, "{w}: {ours} vs {green}");
        }
    }

    #[test]
    fn weight_is_regular_where_w_vanishes() {
        // W changes sign at omega = ck
        let p = problem(0.5, 1.0, 0.5, 1.0);
        assert!(ModeFunctionSolution::from_parts(
            0.5,
            1.0,
            p.zeta(1.0),
            p.chi(1.0),
            0.0,
            z_closed(&p, 1.0)
        )
        .is_err());
        let at = photon_weight_from(0.5, p.zeta(1.0), p.chi(1.0), 0.0, z_closed(&p, 1.0));
        assert!(rel(at, green_weight(&p, 1.0)) < 1e-9);
        let numeric = photon_weight(&p, 1.0).unwrap();
        assert!(rel(numeric, at) < 1e-7);
    }

    #[test]
    fn small_photon_loss_recovers_single_loss() {
        let m = LorentzMedium::unit(0.5, 1.0).unwrap();
        let single = nk_quadrature(&m, 1.0, 1e-8).unwrap().n_k;
        let dual = nk_dual_loss(&problem(0.5, 1.0, 1e-4, 1.0), 1e-5).unwrap();
        assert!(rel(dual.n_k, single) < 1e-2, "{} vs {single}", dual.n_k);
        assert!(dual.est_error <= 1e-5 * dual.n_k);
    }

    #[test]
    fn narrow_losses_meet_the_tolerance() {
        let r = nk_dual_loss(&problem(1.0, 0.05, 0.05, 1.0), 1e-6).unwrap();
        assert!(r.est_error <= 1e-6 * r.n_k);
        let loose = nk_dual_loss(&problem(1.0, 0.05, 0.05, 1.0), 1e-4).unwrap();
        assert!(rel(loose.n_k, r.n_k) < 1e-4);
    }

    #[test]
    fn total_broadening_reduces_by_half() {
        let base = hopfield::nk_lossless(&LorentzMedium::unit(0.5, 0.0).unwrap(), 1.0).unwrap();
        let n = nk_dual_loss(&problem(0.5, 2.0, 2.0, 1.0), 1e-4)
            .unwrap()
            .n_k;
        let ratio = n / base;
        assert!((0.4..=0.6).contains(&ratio), "{ratio}");
    }

    #[test]
    fn decoupled_gives_zero_and_tol_is_checked() {
        assert_eq!(
            nk_dual_loss(&problem(0.0, 1.0, 1.0, 1.0), 1e-4)
                .unwrap()
                .n_k,
            0.0
        );
        assert!(nk_dual_loss(&problem(0.5, 1.0, 1.0, 1.0), 1e-2).is_err());
    }
}
