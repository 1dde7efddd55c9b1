//! Aberth-Ehrlich simultaneous root finding for small complex polynomials.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::Complex64;

const MAX_ITERATIONS: usize = 500;

/// Evaluates `p(z)` and `p'(z)`; coefficients are in ascending order.
pub(crate) fn eval_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All roots of the polynomial with ascending coefficients `coeffs`.
///
/// The leading coefficient must be non-zero.
pub(crate) fn roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let degree = coeffs.len() - 1;
    let lead = coeffs[degree];
    debug_assert!(lead.norm() > 0.0);
    if degree == 0 {
        return Vec::new();
    }

    // Initial guesses on a circle whose radius matches the geometric mean of
    // the root moduli, rotated off the axes to avoid symmetric stalls.
    let radius = {
        let r = (coeffs[0].norm() / lead.norm()).powf(1.0 / degree as f64);
        if r > 0.0 && r.is_finite() {
            r
        } else {
            1.0
        }
    };
    let mut z: Vec<Complex64> = (0..degree)
        .map(|k| {
            let angle = 2.0 * core::f64::consts::PI * k as f64 / degree as f64 + 0.4;
            Complex64::from_polar(radius, angle)
        })
        .collect();

    for _ in 0..MAX_ITERATIONS {
        let mut largest_step = 0.0f64;
        for k in 0..degree {
            let (p, dp) = eval_with_derivative(coeffs, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..degree)
                .filter(|&j| j != k)
                .map(|j| {
                    let d = z[k] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        1.0 / d
                    }
                })
                .sum();
            let step = ratio / (1.0 - ratio * repulsion);
            if step.is_finite() {
                z[k] -= step;
                largest_step = largest_step.max(step.norm() / z[k].norm().max(f64::MIN_POSITIVE));
            }
        }
        if largest_step < 4.0 * f64::EPSILON {
            break;
        }
    }
    z
}
