//! Lorentz dielectric model and the spectral densities built from it.
//!
//! `eps(z) = 1 + omega_c^2 / (omega0^2 - z^2 - i gamma_L z)` is used verbatim
//! on the whole complex plane.

use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::Complex64;

/// Relative distance (in units of `omega0^2`) below which the Lorentz
/// denominator counts as a pole hit.
pub const POLE_TOLERANCE: f64 = 1e-14;

/// A single dispersionless, damped matter resonance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzMedium {
    omega0: f64,
    omega_c: f64,
    gamma_l: f64,
}

impl LorentzMedium {
    /// Validates `omega0 > 0`, `omega_c >= 0` and `0 <= gamma_l <= 2 omega0`.
    ///
    /// `gamma_l = 2 omega0` (critical damping) is accepted; anything above it
    /// is an overdamped resonance and rejected.
    pub fn new(omega0: f64, omega_c: f64, gamma_l: f64) -> Result<Self> {
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(Error::invalid(
                "omega0",
                omega0,
                "must be positive and finite",
            ));
        }
        if !(omega_c >= 0.0 && omega_c.is_finite()) {
            return Err(Error::invalid(
                "omega_c",
                omega_c,
                "must be >= 0 and finite",
            ));
        }
        if !(gamma_l >= 0.0) {
            return Err(Error::invalid("gamma_L", gamma_l, "must be >= 0"));
        }
        if gamma_l > 2.0 * omega0 {
            return Err(Error::invalid(
                "gamma_L",
                gamma_l,
                "exceeds the overdamping bound 2*omega0",
            ));
        }
        Ok(Self {
            omega0,
            omega_c,
            gamma_l,
        })
    }

    /// Medium in units where `omega0 = 1`.
    pub fn unit(omega_c: f64, gamma_l: f64) -> Result<Self> {
        Self::new(1.0, omega_c, gamma_l)
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }

    pub fn gamma_l(&self) -> f64 {
        self.gamma_l
    }

    /// Same resonance with the losses switched off.
    pub fn lossless(&self) -> Self {
        Self {
            gamma_l: 0.0,
            ..*self
        }
    }

    pub fn with_gamma_l(&self, gamma_l: f64) -> Result<Self> {
        Self::new(self.omega0, self.omega_c, gamma_l)
    }

    pub fn with_omega_c(&self, omega_c: f64) -> Result<Self> {
        Self::new(self.omega0, omega_c, self.gamma_l)
    }

    /// The two complex matter poles `(-i gamma_L +- sqrt(4 omega0^2 - gamma_L^2)) / 2`.
    pub fn matter_poles(&self) -> [Complex64; 2] {
        let disc = (4.0 * self.omega0 * self.omega0 - self.gamma_l * self.gamma_l).max(0.0);
        let re = 0.5 * disc.sqrt();
        let im = -0.5 * self.gamma_l;
        [Complex64::new(re, im), Complex64::new(-re, im)]
    }

    fn denominator(&self, z: Complex64) -> Result<Complex64> {
        // Factored through the poles: accurate close to them, where the
        // expanded quadratic cancels.
        let [p, q] = self.matter_poles();
        let d = -(z - p) * (z - q);
        if d.norm() < POLE_TOLERANCE * self.omega0 * self.omega0 {
            return Err(Error::PoleProximity { re: z.re, im: z.im });
        }
        Ok(d)
    }

    /// Dielectric function at a complex frequency.
    pub fn eps(&self, z: Complex64) -> Result<Complex64> {
        let d = self.denominator(z)?;
        Ok(1.0 + self.omega_c * self.omega_c / d)
    }

    /// Dielectric function on the real frequency axis.
    pub fn eps_real(&self, omega: f64) -> Result<Complex64> {
        self.eps(Complex64::new(omega, 0.0))
    }

    /// `d/dz [eps(z) z^2]`, the quantity entering implicit root derivatives.
    pub fn eps_z2_derivative(&self, z: Complex64) -> Result<Complex64> {
        let d = self.denominator(z)?;
        let dd = -2.0 * z - Complex64::i() * self.gamma_l;
        // d/dz [z^2 / D] = (2 z D - z^2 D') / D^2
        let ratio = (2.0 * z * d - z * z * dd) / (d * d);
        Ok(2.0 * z + self.omega_c * self.omega_c * ratio)
    }

    /// Matter spectral density `|zeta(omega)|^2`, normalized so that
    /// `int_0^inf |zeta|^2 / omega d omega = 1`.
    pub fn zeta_density(&self, omega: f64) -> Result<f64> {
        if !(omega > 0.0) {
            return Err(Error::invalid("omega", omega, "density needs omega > 0"));
        }
        if self.gamma_l == 0.0 {
            return Err(Error::DegenerateDensity { name: "matter" });
        }
        Ok(lorentzian_profile(self.omega0, self.gamma_l, omega) * omega * omega * omega)
    }
}

/// `(2 gamma / pi) / ((center^2 - omega^2)^2 + gamma^2 omega^2)`
fn lorentzian_profile(center: f64, gamma: f64, omega: f64) -> f64 {
    let detuning = (center - omega) * (center + omega);
    2.0 * gamma / PI / (detuning * detuning + gamma * gamma * omega * omega)
}

/// Photonic spectral density `|chi_k(omega)|^2` of a leaky mode at `ck` with
/// linewidth `gamma_p`; `omega |chi_k|^2` integrates to one over `(0, inf)`.
pub fn chi_density(k_c: f64, gamma_p: f64, omega: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::invalid("omega", omega, "density needs omega > 0"));
    }
    if !(k_c > 0.0) {
        return Err(Error::invalid("ck", k_c, "must be > 0"));
    }
    if gamma_p == 0.0 {
        return Err(Error::DegenerateDensity { name: "photonic" });
    }
    if !(gamma_p > 0.0) {
        return Err(Error::invalid("gamma_P", gamma_p, "must be > 0"));
    }
    Ok(lorentzian_profile(k_c, gamma_p, omega) * omega)
}

/// Bath parameters of the microscopic model whose continuum limit is the
/// Lorentz medium: a coupling strength `q`, a cutoff `omega_m`, and the
/// renormalized resonance they produce.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicroscopicCoupling {
    pub q: f64,
    pub omega_m: f64,
    pub tilde_omega0: f64,
}

impl MicroscopicCoupling {
    /// `tilde_omega0^2 = omega0^2 (q + omega_m) / q`.
    pub fn new(omega0: f64, q: f64, omega_m: f64) -> Result<Self> {
        if !(q > 0.0) {
            return Err(Error::invalid("q", q, "must be > 0"));
        }
        if !(omega_m >= 0.0) {
            return Err(Error::invalid("omega_M", omega_m, "must be >= 0"));
        }
        Ok(Self {
            q,
            omega_m,
            tilde_omega0: omega0 * ((q + omega_m) / q).sqrt(),
        })
    }
}

/// Linewidth produced by a bath of strength `q`: `gamma_L = pi omega0^2 / (2 q)`.
pub fn gamma_from_microscopic(omega0: f64, q: f64) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::invalid("q", q, "must be > 0"));
    }
    Ok(PI * omega0 * omega0 / (2.0 * q))
}

/// Inverse of [`gamma_from_microscopic`].
pub fn q_from_gamma(omega0: f64, gamma_l: f64) -> Result<f64> {
    if !(gamma_l > 0.0) {
        return Err(Error::invalid("gamma_L", gamma_l, "must be > 0"));
    }
    Ok(PI * omega0 * omega0 / (2.0 * gamma_l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_semi_infinite, IntegrationSpec};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn static_limit() {
        let m = LorentzMedium::unit(0.5, 0.8).unwrap();
        let e = m.eps(c(0.0, 0.0)).unwrap();
        assert!((e - c(1.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn on_resonance() {
        let m = LorentzMedium::unit(0.5, 0.5).unwrap();
        let e = m.eps_real(1.0).unwrap();
        assert!((e - c(1.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn reflection_symmetry_at_sample_point() {
        let m = LorentzMedium::unit(0.5, 0.5).unwrap();
        let z = c(0.3, 0.4);
        let lhs = m.eps(z).unwrap();
        let rhs = m.eps(-z.conj()).unwrap().conj();
        assert!((lhs - rhs).norm() < 1e-15);
    }

    #[test]
    fn rejects_invalid_media() {
        assert!(LorentzMedium::unit(0.5, 2.0).is_ok());
        assert!(LorentzMedium::unit(0.5, 2.0 + 1e-12).is_err());
        assert!(LorentzMedium::unit(-0.1, 0.5).is_err());
        assert!(LorentzMedium::unit(0.5, -0.1).is_err());
        assert!(LorentzMedium::new(0.0, 0.5, 0.5).is_err());
        assert!(LorentzMedium::unit(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn pole_hit_is_an_error() {
        let m = LorentzMedium::unit(0.5, 0.5).unwrap();
        for p in m.matter_poles() {
            assert!(matches!(m.eps(p), Err(Error::PoleProximity { .. })));
            assert!(m.eps_z2_derivative(p).is_err());
        }
        let lossless = m.lossless();
        assert!(lossless.eps_real(1.0).is_err());
    }

    #[test]
    fn derivative_vacuum_limit() {
        let m = LorentzMedium::unit(0.0, 0.5).unwrap();
        let d = m.eps_z2_derivative(c(2.0, 0.0)).unwrap();
        assert!((d - c(4.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn derivative_matches_central_difference() {
        let m = LorentzMedium::unit(0.5, 0.5).unwrap();
        let z = c(1.3, 0.0);
        let h = 1e-6;
        let f = |z: Complex64| m.eps(z).unwrap() * z * z;
        let fd = (f(z + h) - f(z - h)) / (2.0 * h);
        let an = m.eps_z2_derivative(z).unwrap();
        assert!((fd - an).norm() / an.norm() < 1e-6);
    }

    #[test]
    fn derivative_is_real_without_losses() {
        let m = LorentzMedium::unit(0.5, 0.0).unwrap();
        let d = m.eps_z2_derivative(c(0.7, 0.0)).unwrap();
        assert_eq!(d.im, 0.0);
    }

    #[test]
    fn zeta_density_on_resonance() {
        let m = LorentzMedium::unit(0.3, 0.5).unwrap();
        assert!((m.zeta_density(1.0).unwrap() - 4.0 / PI).abs() < 1e-14);
        assert!(m.zeta_density(0.0).is_err());
        assert!(matches!(
            m.lossless().zeta_density(1.0),
            Err(Error::DegenerateDensity { .. })
        ));
    }

    #[test]
    fn chi_density_on_resonance() {
        let v = chi_density(1.0, 0.5, 1.0).unwrap();
        assert!((v - 4.0 / PI).abs() < 1e-14);
        assert!(chi_density(1.0, 0.0, 1.0).is_err());
        assert!(chi_density(1.0, 0.5, -1.0).is_err());
    }

    #[test]
    fn densities_normalize() {
        for g in [0.1, 0.5, 1.0, 2.0] {
            let m = LorentzMedium::unit(0.5, g).unwrap();
            let spec = IntegrationSpec::with_rel_tol(1e-12).breakpoints([0.5, 1.0, 2.0]);
            let z =
                integrate_semi_infinite(|w| m.zeta_density(w).unwrap() / w, 0.0, &spec).unwrap();
            assert!((z.value - 1.0).abs() < 1e-8, "zeta g={g}: {}", z.value);
            let x = integrate_semi_infinite(|w| w * chi_density(1.0, g, w).unwrap(), 0.0, &spec)
                .unwrap();
            assert!((x.value - 1.0).abs() < 1e-8, "chi g={g}: {}", x.value);
        }
    }

    #[test]
    fn narrow_photon_density_concentrates() {
        let g = 1e-3;
        let spec =
            IntegrationSpec::with_rel_tol(1e-10).breakpoints([1.0 - 5.0 * g, 1.0, 1.0 + 5.0 * g]);
        let inside = crate::quadrature::integrate_adaptive(
            |w| w * chi_density(1.0, g, w).unwrap(),
            1.0 - 5.0 * g,
            1.0 + 5.0 * g,
            &spec,
        )
        .unwrap();
        // Lorentzian with half-width gamma/2: the +-5 gamma window holds (2/pi) atan(10).
        let expected = 2.0 / PI * 10f64.atan();
        assert!((inside.value - expected).abs() < 1e-3, "{}", inside.value);
    }

    #[test]
    fn absorption_matches_zeta_density() {
        let m = LorentzMedium::unit(0.5, 0.7).unwrap();
        for w in [0.5, 1.0, 2.0] {
            let im = m.eps_real(w).unwrap().im;
            let from_density =
                m.omega_c() * m.omega_c() * PI * m.zeta_density(w).unwrap() / (2.0 * w * w);
            assert!((im - from_density).abs() < 1e-14 * im.abs().max(1.0));
        }
    }

    #[test]
    fn microscopic_mapping() {
        assert!((gamma_from_microscopic(1.0, PI / 4.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((gamma_from_microscopic(1.0, PI).unwrap() - 0.5).abs() < 1e-15);
        assert!(gamma_from_microscopic(1.0, 0.0).is_err());
        let q = 0.37;
        let back = q_from_gamma(1.3, gamma_from_microscopic(1.3, q).unwrap()).unwrap();
        assert!((back - q).abs() / q < 1e-12);
        let mc = MicroscopicCoupling::new(1.3, q, 50.0).unwrap();
        let expect = 1.3 * 1.3 * (q + 50.0) / q;
        assert!((mc.tilde_omega0 * mc.tilde_omega0 - expect).abs() / expect < 1e-12);
    }

    proptest! {
        #[test]
        fn symmetry_holds(re in -10.0f64..10.0, im in -10.0f64..10.0, wc in 0.0f64..2.0, g in 0.0f64..2.0) {
            let m = LorentzMedium::unit(wc, g).unwrap();
            let z = c(re, im);
            if let (Ok(a), Ok(b)) = (m.eps(z), m.eps(-z.conj())) {
                prop_assert!((a - b.conj()).norm() <= 1e-12 * a.norm().max(1.0));
            }
        }

        #[test]
        fn passive_on_real_axis(w in 1e-3f64..20.0, wc in 0.0f64..2.0, g in 0.0f64..2.0) {
            let m = LorentzMedium::unit(wc, g).unwrap();
            if let Ok(e) = m.eps_real(w) {
                prop_assert!(e.im >= 0.0);
            }
        }
    }
}
