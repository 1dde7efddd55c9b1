//! Complex polariton frequencies of the Lorentz medium.
//!
//! Clearing denominators in `eps(w) w^2 = (ck)^2` gives the quartic
//!
//! ```text
//! (omega0^2 - w^2 - i gamma_L w)(w^2 - (ck)^2) + omega_c^2 w^2 = 0
//! ```
//!
//! whose roots come in pairs `{W, -W*}`. The physical (decaying) roots live
//! in the lower half plane; we store the first-quadrant representatives
//! obtained by complex conjugation, which are the roots of
//! `eps(-w) w^2 = (ck)^2`. Derivatives are conjugated along with the roots.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::dielectric::LorentzMedium;
use crate::error::{Error, Result};
use crate::poly;
use crate::Complex64;

/// Residual bound on `|eps(W) W^2 - (ck)^2|` in units of `max(omega0, ck)^2`.
pub const RESIDUAL_BOUND: f64 = 1e-10;

/// Root separation (units of `omega0`) below which the pair is flagged degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-8;

/// Root separation (units of `omega0`) below which root-weighted sums are
/// evaluated as a contour integral instead of term by term.
pub const CONTOUR_SWITCH: f64 = 5e-2;

const CONTOUR_NODES: usize = 64;

/// Coupling strength above which the system counts as ultrastrong, in units of `omega0`.
pub const ULTRASTRONG_THRESHOLD: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Real parts of the branches cross (`gamma_L >= 2 omega_c`).
    Weak,
    /// Branches anticross (`gamma_L < 2 omega_c`).
    Strong,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Weak => "weak",
            Regime::Strong => "strong",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CouplingRegime {
    pub regime: Regime,
    pub ultrastrong: bool,
}

/// Strong iff `gamma_L < 2 omega_c` (the tie counts as weak); ultrastrong
/// iff `omega_c >= 0.2 omega0`.
pub fn classify_regime(medium: &LorentzMedium) -> CouplingRegime {
    let regime = if medium.gamma_l() < 2.0 * medium.omega_c() {
        Regime::Strong
    } else {
        Regime::Weak
    };
    CouplingRegime {
        regime,
        ultrastrong: medium.omega_c() >= ULTRASTRONG_THRESHOLD * medium.omega0(),
    }
}

/// The two first-quadrant polariton frequencies at one wavevector.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionRoots {
    pub k_c: f64,
    /// First-quadrant representatives, ascending in real part unless
    /// reordered by a trajectory sweep.
    pub roots: [Complex64; 2],
    /// `d root / dk` (a velocity, with `c = 1`).
    pub derivs: [Complex64; 2],
    pub regime: Regime,
    pub ultrastrong: bool,
    /// Both representatives coincide to within [`DEGENERACY_TOLERANCE`]: an
    /// exceptional point, where the individual derivatives diverge.
    pub degenerate: bool,
    medium: LorentzMedium,
}

/// Ascending coefficients of the quartic for `(medium, ck)`, physical
/// (lower half plane) convention.
pub fn dispersion_polynomial(medium: &LorentzMedium, k_c: f64) -> [Complex64; 5] {
    let w0sq = medium.omega0() * medium.omega0();
    let ksq = k_c * k_c;
    let g = medium.gamma_l();
    let wc = medium.omega_c();
    [
        Complex64::new(-w0sq * ksq, 0.0),
        Complex64::new(0.0, g * ksq),
        Complex64::new(w0sq + ksq + wc * wc, 0.0),
        Complex64::new(0.0, -g),
        Complex64::new(-1.0, 0.0),
    ]
}

/// All four roots of the dispersion quartic, in the physical convention.
pub fn raw_roots(medium: &LorentzMedium, k_c: f64) -> Vec<Complex64> {
    poly::roots(&dispersion_polynomial(medium, k_c))
}

/// `eps(W) W^2 - (ck)^2` in the physical convention.
fn dispersion_function(medium: &LorentzMedium, k_c: f64, w: Complex64) -> Result<Complex64> {
    Ok(medium.eps(w)? * w * w - k_c * k_c)
}

fn residual_bound(medium: &LorentzMedium, k_c: f64, w: Complex64) -> Result<f64> {
    let scale = medium.omega0().max(k_c);
    // Floor from representing the root itself in double precision.
    let conditioning = 64.0 * f64::EPSILON * w.norm() * medium.eps_z2_derivative(w)?.norm();
    Ok(RESIDUAL_BOUND * scale * scale + conditioning)
}

/// Newton steps on the physical dispersion function, each kept only if it
/// lowers the residual.
fn polish(medium: &LorentzMedium, k_c: f64, mut w: Complex64) -> Result<Complex64> {
    let mut best = dispersion_function(medium, k_c, w)?.norm();
    for _ in 0..2 {
        let h = dispersion_function(medium, k_c, w)?;
        let dh = medium.eps_z2_derivative(w)?;
        let step = h / dh;
        if !step.is_finite() {
            break;
        }
        let candidate = w - step;
        match dispersion_function(medium, k_c, candidate) {
            Ok(v) if v.norm() < best => {
                best = v.norm();
                w = candidate;
            }
            _ => break,
        }
    }
    Ok(w)
}

/// Solves the dispersion equation at `ck = k_c`.
pub fn find_roots(medium: &LorentzMedium, k_c: f64) -> Result<DispersionRoots> {
    if !(k_c > 0.0 && k_c.is_finite()) {
        return Err(Error::invalid("ck", k_c, "must be positive and finite"));
    }
    if medium.omega_c() == 0.0 {
        return Err(Error::Decoupled);
    }

    let raw = raw_roots(medium, k_c);
    let mut physical: Vec<Complex64> = raw.into_iter().filter(|r| r.re > 0.0).collect();
    if physical.len() != 2 {
        return Err(Error::RootCount {
            found: physical.len(),
        });
    }
    physical.sort_by(|a, b| a.re.total_cmp(&b.re));

    let mut roots = [Complex64::new(0.0, 0.0); 2];
    let mut derivs = [Complex64::new(0.0, 0.0); 2];
    for (j, &r) in physical.iter().enumerate() {
        let mut w = polish(medium, k_c, r)?;
        if medium.gamma_l() == 0.0 {
            w.im = 0.0;
        }
        let residual = dispersion_function(medium, k_c, w)?.norm();
        let bound = residual_bound(medium, k_c, w)?;
        if residual > bound {
            return Err(Error::Residual { residual, bound });
        }
        let d = 2.0 * k_c / medium.eps_z2_derivative(w)?;
        // Conjugation maps the lower-half-plane root to the first quadrant.
        roots[j] = Complex64::new(w.re, w.im.abs());
        derivs[j] = if w.im < 0.0 { d.conj() } else { d };
    }

    let class = classify_regime(medium);
    Ok(DispersionRoots {
        k_c,
        roots,
        derivs,
        regime: class.regime,
        ultrastrong: class.ultrastrong,
        degenerate: (roots[0] - roots[1]).norm() < DEGENERACY_TOLERANCE * medium.omega0(),
        medium: *medium,
    })
}

impl DispersionRoots {
    pub fn medium(&self) -> &LorentzMedium {
        &self.medium
    }

    /// `|eps(W) W^2 - (ck)^2|` for each root, evaluated at the physical
    /// root `W = conj(representative)`.
    pub fn residuals(&self) -> Result<[f64; 2]> {
        let mut out = [0.0; 2];
        for (o, r) in out.iter_mut().zip(self.roots) {
            *o = dispersion_function(&self.medium, self.k_c, r.conj())?.norm();
        }
        Ok(out)
    }

    /// `sum_j f(W_j) dW_j/dk` over the two representatives.
    ///
    /// `f` must be analytic in the closed first quadrant and across the
    /// positive real axis. Near an exceptional point the two terms diverge
    /// individually while the sum stays finite, so for close roots the sum is
    /// taken as `(1/2 pi i) \oint f(z) 2ck / h(z) dz` around both roots, with
    /// `h(z) = eps(-z) z^2 - (ck)^2` whose zeros are the representatives.
    pub fn weighted_sum<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Complex64 {
        match self.contour() {
            Some((center, radius)) => self.contour_sum(&f, center, radius),
            None => self
                .roots
                .iter()
                .zip(self.derivs)
                .map(|(&r, d)| f(r) * d)
                .sum(),
        }
    }

    /// `sum_j Re[(W_j / k) dW_j/dk]`; equals `c^2 = 1` for a Lorentz medium.
    pub fn sum_rule(&self) -> f64 {
        let k = self.k_c;
        self.weighted_sum(|z| z / k).re
    }

    /// Circle enclosing both roots, if they are close enough to need one and
    /// the circle can stay clear of the mirrored roots and of the negative
    /// real axis.
    fn contour(&self) -> Option<(Complex64, f64)> {
        let sep = (self.roots[0] - self.roots[1]).norm();
        if sep >= CONTOUR_SWITCH * self.medium.omega0() {
            return None;
        }
        let center = 0.5 * (self.roots[0] + self.roots[1]);
        // Nearest excluded points: the mirrored roots -W* and the origin side
        // of the plane (principal log cut).
        let mirror = self
            .roots
            .iter()
            .map(|r| (center + r.conj()).norm())
            .fold(f64::INFINITY, f64::min);
        let clearance = mirror.min(center.norm());
        let radius = 0.5 * clearance;
        if sep < 0.5 * radius {
            Some((center, radius))
        } else {
            None
        }
    }

    fn contour_sum<F: Fn(Complex64) -> Complex64>(
        &self,
        f: &F,
        center: Complex64,
        radius: f64,
    ) -> Complex64 {
        let coeffs: Vec<Complex64> = dispersion_polynomial(&self.medium, self.k_c)
            .iter()
            .map(|c| c.conj())
            .collect();
        let m = &self.medium;
        let i = Complex64::i();
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 0..CONTOUR_NODES {
            let theta = 2.0 * PI * (n as f64 + 0.5) / CONTOUR_NODES as f64;
            let offset = Complex64::from_polar(radius, theta);
            let z = center + offset;
            // 1/h(z) = D(z) / p(z) with D(z) = omega0^2 - z^2 + i gamma z.
            let d = m.omega0() * m.omega0() - z * z + i * m.gamma_l() * z;
            let (p, _) = poly::eval_with_derivative(&coeffs, z);
            // dz = i offset dtheta; the 1/(2 pi i) and dtheta = 2 pi / N leave offset / N.
            acc += f(z) * 2.0 * self.k_c * d / p * offset;
        }
        acc / CONTOUR_NODES as f64
    }
}

/// Which parameter a trajectory sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    /// `gamma_L` at fixed `omega_c` and `ck`.
    GammaL,
    /// `omega_c` at fixed `gamma_L` and `ck`.
    OmegaC,
    /// `ck` for a fixed medium.
    Wavevector,
}

/// Roots along a one-parameter grid, with branches kept continuous.
///
/// Consecutive points are paired by nearest neighbour in the complex plane.
/// When both pairings are equally close (at an exceptional point) the tie is
/// broken by the direction the branches were moving, i.e. against a linear
/// extrapolation of the two previous points.
pub fn trajectory_sweep(
    base: &LorentzMedium,
    k_c: f64,
    variable: SweepVariable,
    grid: &[f64],
) -> Result<Vec<DispersionRoots>> {
    trajectory_points(base, k_c, variable, grid)
        .into_iter()
        .enumerate()
        .map(|(index, point)| {
            point.map_err(|e| Error::AtGridIndex {
                index,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Like [`trajectory_sweep`] but keeps going past failed grid points.
///
/// Branch matching continues from the last two points that succeeded.
pub fn trajectory_points(
    base: &LorentzMedium,
    k_c: f64,
    variable: SweepVariable,
    grid: &[f64],
) -> Vec<Result<DispersionRoots>> {
    let mut out = Vec::with_capacity(grid.len());
    let mut prev: Option<DispersionRoots> = None;
    let mut before: Option<DispersionRoots> = None;
    for &x in grid {
        let solved = match variable {
            SweepVariable::GammaL => base.with_gamma_l(x).and_then(|m| find_roots(&m, k_c)),
            SweepVariable::OmegaC => base.with_omega_c(x).and_then(|m| find_roots(&m, k_c)),
            SweepVariable::Wavevector => find_roots(base, x),
        };
        let point = solved.map(|mut point| {
            if let Some(p) = &prev {
                if should_swap(p, before.as_ref(), &point) {
                    point.roots.swap(0, 1);
                    point.derivs.swap(0, 1);
                }
            }
            before = prev.replace(point.clone());
            point
        });
        out.push(point);
    }
    out
}

fn should_swap(
    prev: &DispersionRoots,
    before: Option<&DispersionRoots>,
    next: &DispersionRoots,
) -> bool {
    let cost = |target: [Complex64; 2]| {
        let keep = (next.roots[0] - target[0]).norm() + (next.roots[1] - target[1]).norm();
        let swap = (next.roots[1] - target[0]).norm() + (next.roots[0] - target[1]).norm();
        (keep, swap)
    };
    let (keep, swap) = cost(prev.roots);
    let tie = (keep - swap).abs() <= 1e-6 * (keep + swap) + f64::MIN_POSITIVE;
    if !tie {
        return swap < keep;
    }
    match before {
        Some(b) => {
            let predicted = [
                2.0 * prev.roots[0] - b.roots[0],
                2.0 * prev.roots[1] - b.roots[1],
            ];
            let (keep, swap) = cost(predicted);
            swap < keep
        }
        None => false,
    }
}
