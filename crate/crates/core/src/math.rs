//! Small numeric helpers that std would otherwise provide.

use num_complex::Complex64;

/// `exp(z) - 1` without cancellation for small `|z|`.
pub(crate) fn cexpm1(z: Complex64) -> Complex64 {
    let em1 = libm::expm1(z.re);
    let (s, c) = (libm::sin(z.im), libm::cos(z.im));
    let half = libm::sin(0.5 * z.im);
    // cos(b) - 1 = -2 sin^2(b/2)
    Complex64::new(em1 * c - 2.0 * half * half, (em1 + 1.0) * s)
}
