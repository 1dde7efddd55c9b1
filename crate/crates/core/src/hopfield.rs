//! Lossless Hopfield diagonalization.
//!
//! With `gamma_L = 0` the light-matter Hamiltonian is quadratic and is
//! diagonalized by a Bogoliubov transformation onto two polariton branches.
//! The ground state then holds `sum_j |y_j|^2` virtual photons per mode.

#[allow(unused_imports)]
use num_traits::Float;

use crate::dielectric::LorentzMedium;
use crate::error::{Error, Result};
use crate::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Upper,
    Lower,
}

/// One polariton branch: frequency and the coefficient vector `(w, x, y, z)`
/// of photon annihilation, matter annihilation, photon creation and matter
/// creation operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopfieldMode {
    pub branch: Branch,
    pub omega: f64,
    pub w: Complex64,
    pub x: Complex64,
    pub y: Complex64,
    pub z: Complex64,
}

impl HopfieldMode {
    /// `|w|^2 + |x|^2 - |y|^2 - |z|^2`, which is 1 for a bosonic mode.
    pub fn bosonic_norm(&self) -> f64 {
        self.w.norm_sqr() + self.x.norm_sqr() - self.y.norm_sqr() - self.z.norm_sqr()
    }
}

/// `(omega_minus, omega_plus)`; the loss rate of `medium` is ignored.
pub fn eigenfrequencies(medium: &LorentzMedium, k_c: f64) -> (f64, f64) {
    let w0sq = medium.omega0() * medium.omega0();
    let wcsq = medium.omega_c() * medium.omega_c();
    let ksq = k_c * k_c;
    let sum = w0sq + wcsq + ksq;
    let diff = w0sq - ksq;
    let disc = diff * diff + wcsq * (wcsq + 2.0 * w0sq + 2.0 * ksq);
    let upper_sq = 0.5 * (sum + disc.sqrt());
    // From the product of the roots, free of cancellation.
    let lower_sq = ksq * w0sq / upper_sq;
    (lower_sq.sqrt(), upper_sq.sqrt())
}

/// `(omega_minus^2 - omega0^2, omega_plus^2 - omega0^2)` without the
/// cancellation of subtracting the squared eigenfrequencies.
fn detunings(medium: &LorentzMedium, k_c: f64) -> (f64, f64) {
    let w0sq = medium.omega0() * medium.omega0();
    let wc = medium.omega_c();
    let a = k_c * k_c + wc * wc - w0sq;
    let root = a.hypot(2.0 * wc * medium.omega0());
    // the pair multiplies to -(omega_c omega0)^2
    let product = -wc * wc * w0sq;
    if a >= 0.0 {
        let hi = 0.5 * (a + root);
        (product / hi, hi)
    } else {
        let lo = 0.5 * (a - root);
        (lo, product / lo)
    }
}

/// `(d omega_minus/dk, d omega_plus/dk)` by implicit differentiation of the
/// lossless dispersion relation.
pub fn group_velocities(medium: &LorentzMedium, k_c: f64) -> (f64, f64) {
    let (lo, hi) = eigenfrequencies(medium, k_c);
    let (dlo, dhi) = detunings(medium, k_c);
    // omega_+^2 - omega_-^2
    let split = dhi - dlo;
    (-k_c * dlo / (lo * split), k_c * dhi / (hi * split))
}

/// The Bogoliubov coefficients of one branch.
pub fn coefficients(medium: &LorentzMedium, k_c: f64, branch: Branch) -> Result<HopfieldMode> {
    if !(k_c > 0.0 && k_c.is_finite()) {
        return Err(Error::invalid("ck", k_c, "must be positive and finite"));
    }
    if medium.omega_c() == 0.0 {
        return Err(Error::Decoupled);
    }
    let (lo, hi) = eigenfrequencies(medium, k_c);
    let (dlo, dhi) = detunings(medium, k_c);
    let (omega, shift, sign) = match branch {
        Branch::Upper => (hi, dhi, 1.0),
        Branch::Lower => (lo, dlo, -1.0),
    };
    let w0 = medium.omega0();
    let r = omega / w0;
    let g = medium.omega_c() / w0;
    let detuning = shift / (w0 * w0);
    let norm = sign / (r * (detuning * detuning + g * g)).sqrt();
    let photon = (w0 / k_c).sqrt() / (2.0 * w0);
    let matter = Complex64::new(0.0, 0.5 * g);
    Ok(HopfieldMode {
        branch,
        omega,
        w: Complex64::new(norm * photon * detuning * (omega + k_c), 0.0),
        x: norm * matter * (1.0 + r),
        // detuning * (omega - ck) rewritten through the dispersion relation
        y: Complex64::new(norm * photon * g * g * r * r * w0 * w0 / (omega + k_c), 0.0),
        z: norm * matter * (1.0 - r),
    })
}

/// `N'_k = sum_j |y_j|^2`, zero for a decoupled medium.
pub fn nk_lossless(medium: &LorentzMedium, k_c: f64) -> Result<f64> {
    if medium.omega_c() == 0.0 {
        if !(k_c > 0.0 && k_c.is_finite()) {
            return Err(Error::invalid("ck", k_c, "must be positive and finite"));
        }
        return Ok(0.0);
    }
    let upper = coefficients(medium, k_c, Branch::Upper)?;
    let lower = coefficients(medium, k_c, Branch::Lower)?;
    Ok(upper.y.norm_sqr() + lower.y.norm_sqr())
}
