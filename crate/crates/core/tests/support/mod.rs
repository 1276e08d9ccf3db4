//! Shared closed-form oracles for the integration suites.

use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Reflection and transmission amplitudes for a single square potential of
/// height v on [0, l] at energy e (mass m), from the textbook 2x2 matching
/// algebra. Valid for tunneling (e < v) through the complex branch.
pub fn square_potential_amplitudes(m: f64, e: f64, v: f64, l: f64) -> (Complex64, Complex64) {
    let k = Complex64::new((2.0 * m * e).sqrt(), 0.0);
    let x = 2.0 * m * (e - v);
    let q = if x >= 0.0 {
        Complex64::new(x.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-x).sqrt())
    };
    let (sin_ql, cos_ql) = ((q * l).sin(), (q * l).cos());
    let t = (-I * k * l).exp() / (cos_ql - 0.5 * I * (k / q + q / k) * sin_ql);
    let r = t * (I * k * l).exp() * 0.5 * I * (q / k - k / q) * sin_ql;
    (r, t)
}
