//! Ground-state virtual photon populations of dissipative, ultrastrongly
//! coupled light-matter systems.
//!
//! The crate is `no_std` (it needs `alloc`) and purely numerical:
//!
//! * [`dielectric`]: the Lorentz dielectric function and its spectral densities.
//! * [`dispersion`]: complex polariton frequencies and their wavevector derivatives.
//! * [`hopfield`]: the lossless Hopfield diagonalization, used as a cross-check.
//! * [`population`]: the photon number `N_k` by closed form, by quadrature, and
//!   its asymptotes.
//! * [`dual_loss`]: `N_k` with both matter and photonic losses via two coupled continua.
//! * [`quadrature`]: the adaptive integration engine underneath.
//!
//! Units: `c = hbar = 1`, every frequency is expressed in one common unit and
//! wavevectors always enter as `ck`.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dielectric;
pub mod dispersion;
pub mod dual_loss;
pub mod error;
pub mod hopfield;
mod poly;
pub mod population;
pub mod quadrature;

pub use num_complex::Complex64;

pub use dielectric::LorentzMedium;
pub use dispersion::{find_roots, DispersionRoots, Regime, SweepVariable};
pub use dual_loss::DualLossProblem;
pub use error::{Error, Result};
pub use population::{Method, PopulationResult};
