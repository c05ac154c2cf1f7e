//! TE plane-wave propagation through an air / plate / air stack.
//!
//! Each transverse spatial frequency `alpha` propagates independently with
//! wavenumber `k = sqrt(alpha^2 + j*omega*sigma*mu)`. The plate's effect on
//! the coil side is captured by one generalized reflection coefficient that
//! sums every internal bounce in closed form.

use num_complex::Complex64;

use crate::math::cexpm1;
use crate::model::Plate;
use crate::{Error, Result};

/// Above this value of `Re(2*k2*D)` the back face is invisible at double
/// precision (`exp(-40) < 5e-18`) and the half-space coefficient is returned.
pub const HALF_SPACE_EXPONENT: f64 = 40.0;

/// Principal-branch layer wavenumber, 1/m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerWavenumber(Complex64);

impl LayerWavenumber {
    pub fn k(self) -> Complex64 {
        self.0
    }
}

/// Interface reflection and transmission amplitude ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceCoeffs {
    pub reflection: Complex64,
    pub transmission: Complex64,
}

pub fn wavenumber(alpha0: f64, omega: f64, sigma: f64, mu: f64) -> LayerWavenumber {
    debug_assert!(alpha0 > 0.0 && omega >= 0.0 && sigma >= 0.0 && mu > 0.0);
    let radicand = Complex64::new(alpha0 * alpha0, omega * sigma * mu);
    LayerWavenumber(radicand.sqrt())
}

/// Fresnel coefficients for a wave going from medium `i` into medium `j`.
pub fn fresnel(
    k_i: LayerWavenumber,
    k_j: LayerWavenumber,
    mu_i: f64,
    mu_j: f64,
) -> Result<InterfaceCoeffs> {
    let a = k_i.0 * mu_j;
    let b = k_j.0 * mu_i;
    let den = a + b;
    if den.norm() == 0.0 || !den.is_finite() {
        return Err(Error::DegenerateInterface);
    }
    Ok(InterfaceCoeffs {
        reflection: (a - b) / den,
        transmission: (a * 2.0) / den,
    })
}

/// Coil-side interface reflection of the plate, ignoring its back face.
pub fn half_space_reflection(alpha: f64, omega: f64, plate: &Plate, ambient_mu: f64) -> Complex64 {
    let (r, _) = interface_reflection(alpha, omega, plate, ambient_mu);
    r
}

/// Returns the coil-side reflection `R12` and the plate wavenumber `k2`.
fn interface_reflection(
    alpha: f64,
    omega: f64,
    plate: &Plate,
    ambient_mu: f64,
) -> (Complex64, Complex64) {
    let mu2 = plate.permeability();
    // k1^2 - k2^2 for a non-conducting ambient medium
    let dk2 = Complex64::new(0.0, -omega * plate.conductivity() * mu2);
    let k1 = alpha;
    let k2 = wavenumber(alpha, omega, plate.conductivity(), mu2).k();
    let r = if mu2 == ambient_mu {
        // (k1 - k2) / (k1 + k2) without the cancellation in k1 - k2
        let s = k2 + k1;
        dk2 / (s * s)
    } else {
        let a = k1 * mu2;
        let b = k2 * ambient_mu;
        (a - b) / (a + b)
    };
    (r, k2)
}

/// Generalized reflection of an air / plate / air stack seen from the coil side.
///
/// With `r = R12 = -R21 = -R23` and `x = exp(-2*k2*D)` the multiple-bounce sum
/// `R12 + T12*R23*T21*x / (1 - R21*R23*x)` collapses to
/// `r * (1 - x) / (1 - r^2 * x)`, which only ever exponentiates decaying
/// arguments.
pub fn generalized_reflection(alpha0: f64, omega: f64, plate: &Plate, ambient_mu: f64) -> Complex64 {
    if plate.conductivity() == 0.0 && plate.permeability() == ambient_mu {
        return Complex64::new(0.0, 0.0);
    }
    let (r, k2) = interface_reflection(alpha0, omega, plate, ambient_mu);
    let two_k2d = k2 * (2.0 * plate.thickness());
    if two_k2d.re > HALF_SPACE_EXPONENT {
        return r;
    }
    let x = (-two_k2d).exp();
    let one_minus_x = -cexpm1(-two_k2d);
    r * one_minus_x / (1.0 - r * r * x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MU0;
    use core::f64::consts::PI;

    const ALPHA: f64 = 1.0 / 0.006;

    #[test]
    fn wavenumber_collapses_without_conductivity() {
        for omega in [0.0, 1.0, 6.0e6] {
            let k = wavenumber(ALPHA, omega, 0.0, MU0).k();
            assert_eq!(k.im, 0.0);
            assert!((k.re - ALPHA).abs() <= 1e-13 * ALPHA);
        }
    }

    #[test]
    fn wavenumber_for_copper_at_100khz() {
        let omega = 2.0 * PI * 1.0e5;
        let k = wavenumber(ALPHA, omega, 59.8e6, MU0).k();
        // radicand is 2.778e4 + j*4.72162e7
        let radicand = k * k;
        assert!((radicand.re - ALPHA * ALPHA).abs() < 1e-6 * radicand.norm());
        assert!((radicand.im - 4.721618745481148e7).abs() < 1e-12 * 4.72162e7);
        // 40-digit reference evaluation
        assert!((k.re - 4860.245539248373).abs() < 1e-9, "{k}");
        assert!((k.im - 4857.387046963205).abs() < 1e-9, "{k}");
    }

    #[test]
    fn wavenumber_skin_depth_asymptote() {
        let (sigma, mu) = (36.9e6, MU0);
        let omega = 2.0 * PI * 1e12;
        let k = wavenumber(ALPHA, omega, sigma, mu).k();
        let scaled = k / libm::sqrt(omega * sigma * mu / 2.0);
        assert!((scaled - Complex64::new(1.0, 1.0)).norm() < 1e-9);
    }

    #[test]
    fn fresnel_matched_media() {
        let k = wavenumber(ALPHA, 1e5, 1e6, MU0);
        let c = fresnel(k, k, MU0, MU0).unwrap();
        assert_eq!(c.reflection, Complex64::new(0.0, 0.0));
        assert_eq!(c.transmission, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn fresnel_perfect_conductor_limit() {
        let k1 = wavenumber(ALPHA, 1e5, 0.0, MU0);
        let k2 = wavenumber(ALPHA, 1e5, 1e20, MU0);
        let c = fresnel(k1, k2, MU0, MU0).unwrap();
        assert!((c.reflection + 1.0).norm() < 1e-6);
    }

    #[test]
    fn fresnel_degenerate_denominator() {
        let zero = LayerWavenumber(Complex64::new(0.0, 0.0));
        assert_eq!(fresnel(zero, zero, MU0, MU0), Err(Error::DegenerateInterface));
    }

    #[test]
    fn vacuum_slab_reflects_nothing() {
        let p = Plate::non_magnetic(0.0, 1e-3).unwrap();
        for omega in [1.0, 1e3, 1e7] {
            assert_eq!(generalized_reflection(ALPHA, omega, &p, MU0), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn thick_plate_is_a_half_space() {
        let omega = 2.0 * PI * 1e5;
        let p = Plate::non_magnetic(59.8e6, 0.1).unwrap();
        let k1 = wavenumber(ALPHA, omega, 0.0, MU0);
        let k2 = wavenumber(ALPHA, omega, 59.8e6, MU0);
        let want = fresnel(k1, k2, MU0, MU0).unwrap().reflection;
        let got = generalized_reflection(ALPHA, omega, &p, MU0);
        assert!((got - want).norm() < 1e-14);
        // just below the guard, still within rounding of the half space
        let d = 0.99 * HALF_SPACE_EXPONENT / (2.0 * k2.k().re);
        let p = Plate::non_magnetic(59.8e6, d).unwrap();
        let got = generalized_reflection(ALPHA, omega, &p, MU0);
        assert!((got - want).norm() < 1e-15 * 1e3);
    }

    #[test]
    fn stable_reflection_matches_direct_fresnel() {
        let omega = 2.0 * PI * 50.0;
        let p = Plate::non_magnetic(5.0e6, 1.0).unwrap();
        for alpha in [1.0, 100.0, 1e4] {
            let k1 = wavenumber(alpha, omega, 0.0, MU0);
            let k2 = wavenumber(alpha, omega, 5.0e6, MU0);
            let direct = fresnel(k1, k2, MU0, MU0).unwrap().reflection;
            let stable = half_space_reflection(alpha, omega, &p, MU0);
            assert!((direct - stable).norm() <= 1e-9 * stable.norm(), "{alpha}");
        }
    }

    #[test]
    fn magnetic_plate_uses_general_fresnel() {
        let omega = 2.0 * PI * 1e3;
        let p = Plate::new(1.0e6, 100.0, 1.0).unwrap();
        let k1 = wavenumber(ALPHA, omega, 0.0, MU0);
        let k2 = wavenumber(ALPHA, omega, 1.0e6, 100.0 * MU0);
        let want = fresnel(k1, k2, MU0, 100.0 * MU0).unwrap().reflection;
        let got = half_space_reflection(ALPHA, omega, &p, MU0);
        assert!((got - want).norm() < 1e-14);
        // a non-conducting magnetic slab still reflects
        let ferrite = Plate::new(0.0, 50.0, 1e-3).unwrap();
        assert!(generalized_reflection(ALPHA, omega, &ferrite, MU0).norm() > 0.0);
    }

    #[test]
    fn reflection_is_passive() {
        for &sigma in &[1e5, 1e7, 6e7] {
            for &d in &[1e-6, 1e-4, 1e-2] {
                for &f in &[10.0, 1e3, 1e6] {
                    let p = Plate::non_magnetic(sigma, d).unwrap();
                    let r = generalized_reflection(ALPHA, 2.0 * PI * f, &p, MU0);
                    assert!(r.norm() <= 1.0);
                    assert!(r.im <= 0.0);
                }
            }
        }
    }
}
